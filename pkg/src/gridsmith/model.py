"""Domain types shared by both planning layers.

All containers are frozen dataclasses; array fields are stored read-only so
instances can be shared between workers.
"""

from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

HOURS_PER_DAY = 24
CONTINUOUS_KINDS = ("pv", "ess", "heat_storage", "cold_storage", "electric_chiller",
                    "absorption_chiller", "boiler")
STORAGE_KINDS = ("ess", "heat_storage", "cold_storage")


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Bus:
    id: str
    kind: str = "load"  # slack | load
    electrical_load: Optional[str] = None
    cooling_load: Optional[str] = None
    heating_load: Optional[str] = None
    candidate_techs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "candidate_techs", tuple(self.candidate_techs))

    @property
    def load_refs(self):
        return {"electrical": self.electrical_load, "cooling": self.cooling_load,
                "heating": self.heating_load}


@dataclass(frozen=True)
class Cable:
    from_bus: str
    to_bus: str
    length_m: float
    impedance_pu_per_m: float = 6e-6
    ampacity_pu: float = 0.4
    carries_heat: bool = False
    heat_loss_per_m: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "from_bus", str(self.from_bus))
        object.__setattr__(self, "to_bus", str(self.to_bus))

    @property
    def resistance_pu(self) -> float:
        return self.impedance_pu_per_m * self.length_m

    @property
    def heat_loss(self) -> float:
        """Fraction of sent heat lost along the link."""
        return self.heat_loss_per_m * self.length_m

    def reversed(self) -> "Cable":
        return Cable(self.to_bus, self.from_bus, self.length_m, self.impedance_pu_per_m,
                     self.ampacity_pu, self.carries_heat, self.heat_loss_per_m)


@dataclass(frozen=True)
class NetworkModel:
    buses: tuple
    cables: tuple
    slack_bus: str
    nominal_voltage_kv: float = 12.0
    base_power_kva: float = 10_000.0
    v_min: float = 0.95
    v_max: float = 1.05

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "cables", tuple(self.cables))
        object.__setattr__(self, "slack_bus", str(self.slack_bus))

    @property
    def bus_ids(self) -> list[str]:
        return [b.id for b in self.buses]

    def bus(self, bus_id) -> Bus:
        for b in self.buses:
            if b.id == str(bus_id):
                return b
        raise KeyError(bus_id)

    def to_pu(self, kw):
        return np.asarray(kw, dtype=float) / self.base_power_kva

    def from_pu(self, pu):
        return np.asarray(pu, dtype=float) * self.base_power_kva

    def reoriented(self, flip: Sequence[bool]) -> "NetworkModel":
        """Copy with the cables at positions where ``flip`` is true reversed."""
        cables = tuple(c.reversed() if f else c for c, f in zip(self.cables, flip))
        return NetworkModel(self.buses, cables, self.slack_bus, self.nominal_voltage_kv,
                            self.base_power_kva, self.v_min, self.v_max)


@dataclass(frozen=True)
class DiscreteTech:
    id: str
    unit_capacity_kw: float
    capital_cost_per_kw: float
    lifetime_years: float
    electrical_efficiency: float
    heat_to_power_ratio: float = 1.0
    fuel_price: Optional[float] = None  # $/kWh fuel; falls back to the tariff gas price
    max_units: int = 1
    om_cost_per_kwh: float = 0.0


@dataclass(frozen=True)
class ContinuousTech:
    id: str
    kind: str
    fixed_cost: float
    variable_cost_per_kw: float
    lifetime_years: float
    eta_charge: float = 1.0
    eta_discharge: float = 1.0
    cop: float = 1.0
    decay_per_hour: float = 0.0
    efficiency: float = 1.0
    power_ratio: float = 0.5  # storage power rating per unit of energy capacity
    max_capacity_kw: float = 10_000.0


@dataclass(frozen=True)
class TechnologyCatalog:
    discrete: tuple = ()
    continuous: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "discrete", tuple(self.discrete))
        object.__setattr__(self, "continuous", tuple(self.continuous))

    @property
    def ids(self) -> list[str]:
        return [t.id for t in self.discrete] + [t.id for t in self.continuous]

    def get(self, tech_id):
        for t in self.discrete + self.continuous:
            if t.id == tech_id:
                return t
        raise KeyError(tech_id)

    def of_kind(self, kind) -> list[ContinuousTech]:
        return [t for t in self.continuous if t.kind == kind]


@dataclass(frozen=True)
class TypicalDay:
    index: int
    weight: float  # days per year represented
    month: int = 1


@dataclass(frozen=True)
class TimeStructure:
    typical_days: tuple
    hours_per_day: int = HOURS_PER_DAY
    planning_horizon_years: int = 25
    discount_rate: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "typical_days", tuple(self.typical_days))

    @classmethod
    def monthly(cls, **kw) -> "TimeStructure":
        """Twelve typical days, one per month, weighted by days in month."""
        days = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)
        return cls(tuple(TypicalDay(i, float(d), i + 1) for i, d in enumerate(days)), **kw)

    @property
    def n_days(self) -> int:
        return len(self.typical_days)

    @property
    def n_slots(self) -> int:
        return self.n_days * self.hours_per_day

    @property
    def slot_weights(self) -> np.ndarray:
        """Days per year represented by each hour slot."""
        return np.repeat([d.weight for d in self.typical_days], self.hours_per_day).astype(float)

    @property
    def months(self) -> list[int]:
        return sorted({d.month for d in self.typical_days})

    def slots_of_day(self, k: int) -> range:
        return range(k * self.hours_per_day, (k + 1) * self.hours_per_day)


@dataclass(frozen=True)
class Tariff:
    energy_price: np.ndarray
    export_price: np.ndarray
    demand_charge: float = 10.0  # $/kW-month
    fuel_price_gas: float = 0.03  # $/kWh
    curtailment_penalty: float = 10.0  # $/kWh

    def __post_init__(self):
        object.__setattr__(self, "energy_price", _frozen_array(self.energy_price))
        object.__setattr__(self, "export_price", _frozen_array(self.export_price))


@dataclass(frozen=True)
class LoadProfile:
    values: np.ndarray
    unit: str = "kW"

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))

    def __len__(self):
        return self.values.size


ProfileLike = Union[LoadProfile, np.ndarray, Sequence[float]]


def _values(profile: ProfileLike) -> np.ndarray:
    return profile.values if isinstance(profile, LoadProfile) else np.asarray(profile, dtype=float)


def annual_summary(profile: ProfileLike, time: TimeStructure) -> tuple[float, float]:
    """Annual usage (MWh) and peak (kW) of an hourly typical-day profile."""
    v = _values(profile)
    if v.size != time.n_slots:
        raise ValueError(f"profile has {v.size} values, time structure has {time.n_slots} slots")
    if v.size == 0:
        return 0.0, 0.0
    return float(v @ time.slot_weights) / 1000.0, float(v.max())


def validate_model(model: NetworkModel, catalog: TechnologyCatalog, tariff: Tariff,
                   time: TimeStructure, profiles: Optional[dict] = None) -> list[str]:
    """Return the list of invariant violations; empty means usable."""
    out: list[str] = []
    ids = [b.id for b in model.buses]
    for bid, n in Counter(ids).items():
        if n > 1:
            out.append(f"duplicate bus id {bid}")
    slacks = [b.id for b in model.buses if b.kind == "slack"]
    if len(slacks) > 1:
        out.append(f"multiple slack buses: {', '.join(slacks)}")
    elif not slacks:
        out.append("no slack bus")
    if model.slack_bus not in ids:
        out.append(f"slack_bus {model.slack_bus} not among buses")
    elif slacks and model.slack_bus not in slacks:
        out.append(f"slack_bus {model.slack_bus} is not of kind slack")
    if model.base_power_kva <= 0:
        out.append("base_power_kva must be > 0")
    if not model.v_min < 1.0 < model.v_max:
        out.append("voltage band must contain 1.0 pu")
    for b in model.buses:
        if b.kind not in ("slack", "load"):
            out.append(f"bus {b.id}: unknown kind {b.kind}")
        if b.kind == "slack" and len(model.buses) > 1 and any(b.load_refs.values()):
            out.append(f"slack bus {b.id} carries loads")
        for t in b.candidate_techs:
            if t not in catalog.ids:
                out.append(f"bus {b.id}: unknown technology {t}")
        for kind, ref in b.load_refs.items():
            if ref is None:
                continue
            if profiles is not None and ref not in profiles:
                out.append(f"bus {b.id}: {kind} profile {ref} does not resolve")
    adj = defaultdict(set)
    for c in model.cables:
        if c.from_bus not in ids or c.to_bus not in ids:
            out.append(f"dangling endpoint on cable {c.from_bus}-{c.to_bus}")
            continue
        if c.from_bus == c.to_bus:
            out.append(f"self-loop cable at {c.from_bus}")
        if c.length_m <= 0:
            out.append(f"cable {c.from_bus}-{c.to_bus}: length_m must be > 0")
        if c.ampacity_pu <= 0:
            out.append(f"cable {c.from_bus}-{c.to_bus}: ampacity_pu must be > 0")
        if c.impedance_pu_per_m < 0:
            out.append(f"cable {c.from_bus}-{c.to_bus}: negative impedance")
        if not 0 <= c.heat_loss < 1:
            out.append(f"cable {c.from_bus}-{c.to_bus}: heat loss fraction outside [0, 1)")
        adj[c.from_bus].add(c.to_bus)
        adj[c.to_bus].add(c.from_bus)
    if ids:
        seen = {ids[0]}
        queue = deque([ids[0]])
        while queue:
            for nb in adj[queue.popleft()]:
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        if len(seen) < len(set(ids)):
            out.append("network is not connected")

    for t in catalog.discrete:
        if not 0 < t.electrical_efficiency <= 1:
            out.append(f"{t.id}: electrical_efficiency outside (0, 1]")
        if t.lifetime_years < 1:
            out.append(f"{t.id}: lifetime_years < 1")
        if t.unit_capacity_kw <= 0:
            out.append(f"{t.id}: unit_capacity_kw must be > 0")
        if t.capital_cost_per_kw < 0 or t.heat_to_power_ratio < 0 or t.max_units < 0:
            out.append(f"{t.id}: negative cost, heat-to-power ratio or unit limit")
    for t in catalog.continuous:
        if t.kind not in CONTINUOUS_KINDS:
            out.append(f"{t.id}: unknown kind {t.kind}")
        if t.fixed_cost < 0 or t.variable_cost_per_kw < 0:
            out.append(f"{t.id}: negative cost")
        if t.lifetime_years < 1:
            out.append(f"{t.id}: lifetime_years < 1")
        for name in ("eta_charge", "eta_discharge", "efficiency"):
            if not 0 < getattr(t, name) <= 1:
                out.append(f"{t.id}: {name} outside (0, 1]")
        if t.cop <= 0:
            out.append(f"{t.id}: COP must be > 0")
        if not 0 <= t.decay_per_hour < 1:
            out.append(f"{t.id}: decay outside [0, 1)")
        if t.max_capacity_kw < 0 or t.power_ratio <= 0:
            out.append(f"{t.id}: invalid capacity limit or power ratio")
    dup = [k for k, n in Counter(catalog.ids).items() if n > 1]
    if dup:
        out.append(f"duplicate technology ids: {', '.join(dup)}")

    n = time.n_slots
    for name in ("energy_price", "export_price"):
        series = getattr(tariff, name)
        if series.size != n:
            out.append(f"tariff {name} has {series.size} values, expected {n}")
        if np.any(series < 0):
            out.append(f"tariff {name} has negative prices")
    if tariff.demand_charge < 0 or tariff.fuel_price_gas < 0 or tariff.curtailment_penalty < 0:
        out.append("tariff charges must be >= 0")
    total = sum(d.weight for d in time.typical_days)
    if abs(total - 365) > 1:
        out.append(f"typical-day weights sum to {total:g}, expected 365 +/- 1")
    if time.planning_horizon_years < 1:
        out.append("planning horizon must be >= 1 year")
    if not 0 <= time.discount_rate < 1:
        out.append("discount rate outside [0, 1)")
    if profiles is not None:
        for name, vals in profiles.items():
            v = _values(vals)
            if v.size != n:
                out.append(f"profile {name} has {v.size} values, expected {n}")
            if np.any(v < 0) or not np.all(np.isfinite(v)):
                out.append(f"profile {name} has negative or non-finite values")
    return out
