"""Human-readable LP text export (``min / subject to / bounds`` layout)."""

import re

import numpy as np

from .problem import as_milp

_BAD = re.compile(r"[^A-Za-z0-9_.\[\],]")


def _name(s):
    return _BAD.sub("_", s)


def _terms(cols, vals, names):
    parts = []
    for j, v in zip(cols, vals):
        sign = "-" if v < 0 else "+"
        parts.append(f"{sign} {abs(v):.12g} {_name(names[j])}")
    text = " ".join(parts) or "0"
    return text[2:] if text.startswith("+ ") else text


def to_lp_text(problem) -> str:
    milp = as_milp(problem)
    lp = milp.lp
    names = lp.var_names
    out = ["\\ generated by gridsmith", "Minimize" if lp.sense == "min" else "Maximize"]
    nz = np.flatnonzero(lp.c)
    obj = _terms(nz, lp.c[nz], names)
    if lp.offset:
        obj += f" + {lp.offset:.12g} __offset"
    out.append(f" obj: {obj}")
    out.append("Subject To")
    A = lp.A.tocsr()
    for i in range(lp.n_rows):
        s, e = A.indptr[i], A.indptr[i + 1]
        out.append(f" {_name(lp.row_names[i])}: {_terms(A.indices[s:e], A.data[s:e], names)} "
                   f"{lp.senses[i]} {lp.b[i]:.12g}")
    out.append("Bounds")
    for j in range(lp.n_vars):
        lo, hi = lp.lo[j], lp.hi[j]
        nm = _name(names[j])
        if lo == hi:
            out.append(f" {nm} = {lo:.12g}")
        elif np.isinf(lo) and np.isinf(hi):
            out.append(f" {nm} free")
        else:
            lo_s = "-inf" if np.isinf(lo) else f"{lo:.12g}"
            hi_s = "+inf" if np.isinf(hi) else f"{hi:.12g}"
            out.append(f" {lo_s} <= {nm} <= {hi_s}")
    if lp.offset:
        out.append(" __offset = 1")
    gen = [names[j] for j, k in enumerate(milp.kinds) if k == "integer"]
    bins = [names[j] for j, k in enumerate(milp.kinds) if k == "binary"]
    if gen:
        out.append("General")
        out.extend(f" {_name(n)}" for n in gen)
    if bins:
        out.append("Binary")
        out.extend(f" {_name(n)}" for n in bins)
    out.append("End")
    return "\n".join(out) + "\n"


def dump_lp(problem, path):
    with open(path, "w") as fh:
        fh.write(to_lp_text(problem))
