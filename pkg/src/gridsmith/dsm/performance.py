"""Relative human task performance as a function of dry-bulb temperature."""

import numpy as np

# cubic in T (degC): c0 + c1 T + c2 T^2 + c3 T^3
HP_COEFFS = (-0.46853, 0.16475, -0.00582, 0.00006)


def human_performance(temp):
    """Relative performance in [0, 1] at ``temp`` degC (scalar or array)."""
    t = np.asarray(temp, dtype=float)
    c0, c1, c2, c3 = HP_COEFFS
    hp = np.clip(c0 + t * (c1 + t * (c2 + t * c3)), 0.0, 1.0)
    return float(hp) if hp.ndim == 0 else hp


def hp_argmax(t_lo: float = 18.0, t_hi: float = 28.0) -> float:
    """Temperature maximising performance on ``[t_lo, t_hi]``.

    Uses the stationary points of the cubic, then compares with the interval
    endpoints.
    """
    _, c1, c2, c3 = HP_COEFFS
    cands = [t_lo, t_hi]
    for r in np.roots([3 * c3, 2 * c2, c1]):
        if abs(r.imag) < 1e-12 and t_lo <= r.real <= t_hi:
            cands.append(float(r.real))
    vals = [human_performance(t) for t in cands]
    return cands[int(np.argmax(vals))]
