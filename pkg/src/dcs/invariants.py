"""Abelianized invariants: winding numbers of nonvanishing scalar
functionals along loops, fiber-chart winding vectors, linear-relation
checks, and exact Smith-normal-form certificates for the relation lattices.

Two kinds of functionals appear.  The bracket-ratio functionals w1, w2, w3
are defined on every planar configuration with concurrent lines; because the
two cutting lines meet the carrier line in the same point (the common
center), each ratio is identically one there, so their windings vanish on
every catalog loop -- the engine computes and reports this rather than
assuming it.  Fiber-chart functionals are defined only for loops whose three
lines stay pinned to the registered base lines; they are chart coordinates
of B_i minus A_i and are *not* invariants of the ambient space, so relation
checks include them only when every loop involved keeps all three lines
constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import sympy

from . import atlas
from .paths import Atom, LoopExpr, SampledPath, TWO_PI
from .projective import DEFAULT_TOL, ProjectiveError, Tolerances, unit_rows, singular_values_batch

WINDING_RESIDUAL_MAX = 0.05     # turns; beyond this the result is indeterminate
MAX_WINDING_SAMPLES = 2 ** 20


class WindingError(ProjectiveError):
    pass


class DegenerateFunctionalError(WindingError):
    pass


class MovingLinesError(WindingError):
    pass


# ---------------------------------------------------------------------------
# scalar functionals

@dataclass
class ScalarFunctional:
    """A nonvanishing complex functional of a configuration batch.

    fn maps an array (N, 6, m) to complex values (N,).  All built-ins are
    homogeneous of degree zero in each of the six points.
    """

    id: str
    fn: Callable
    ambient: int                       # expected number of coordinates minus one
    description: str = ""

    def __call__(self, configs: np.ndarray) -> np.ndarray:
        arr = np.asarray(configs, dtype=np.complex128)
        if arr.shape[-1] != self.ambient + 1:
            raise ProjectiveError(
                f"functional {self.id} expects CP^{self.ambient} configurations"
            )
        return self.fn(arr)

    def check_scale_invariance(self, configs: np.ndarray, rng) -> float:
        """Max relative change under random rescaling of every representative."""
        arr = np.asarray(configs, dtype=np.complex128)
        base = self.fn(arr)
        scales = np.exp(rng.normal(size=arr.shape[:-1]) + 1j * rng.uniform(0, TWO_PI, size=arr.shape[:-1]))
        rescaled = self.fn(arr * scales[..., None])
        return float(np.max(np.abs(rescaled - base) / np.abs(base)))


def _det3(a, b, c):
    return (
        a[..., 0] * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
        - a[..., 1] * (b[..., 0] * c[..., 2] - b[..., 2] * c[..., 0])
        + a[..., 2] * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0])
    )


def _bracket_ratio(i, j, k):
    """w = ([AjBjAi] [AkBkBi]) / ([AkBkAi] [AjBjBi]) with 1-based line indices."""
    ai, bi = 2 * (i - 1), 2 * (i - 1) + 1
    aj, bj = 2 * (j - 1), 2 * (j - 1) + 1
    ak, bk = 2 * (k - 1), 2 * (k - 1) + 1

    def fn(arr):
        u = arr
        num = _det3(u[..., aj, :], u[..., bj, :], u[..., ai, :]) * _det3(
            u[..., ak, :], u[..., bk, :], u[..., bi, :]
        )
        den = _det3(u[..., ak, :], u[..., bk, :], u[..., ai, :]) * _det3(
            u[..., aj, :], u[..., bj, :], u[..., bi, :]
        )
        return num / den

    return fn


W_FUNCTIONALS = {
    "w1": ScalarFunctional("w1", _bracket_ratio(1, 2, 3), 2,
                           "bracket ratio of (A1,B1) against lines 2 and 3"),
    "w2": ScalarFunctional("w2", _bracket_ratio(2, 3, 1), 2,
                           "cyclic image: (A2,B2) against lines 3 and 1"),
    "w3": ScalarFunctional("w3", _bracket_ratio(3, 1, 2), 2,
                           "cyclic image: (A3,B3) against lines 1 and 2"),
}


# fiber charts: for each supported ambient space, the three base lines as
# 2-point spans plus the chart map of each line (center at infinity).

def _chart_set(base, charts, ambient):
    lines = []
    for i in range(3):
        lines.append(np.stack([base[2 * i], base[2 * i + 1]]))
    return {"lines": lines, "charts": charts, "ambient": ambient}


_FIBER_SETS = {
    2: _chart_set(atlas.PLANAR_BASE, atlas.PLANAR_CHARTS, 2),
    3: _chart_set(atlas.SOLID_BASE, atlas.SOLID_CHARTS, 3),
    4: _chart_set(atlas.SOLID_BASE_CP4,
                  tuple(lambda p, c=c: c(p) for c in atlas.SOLID_CHARTS), 4),
}


def line_constancy(configs: np.ndarray, line_index: int, ambient: int) -> float:
    """Max incidence residual of (A_i, B_i) against the registered base line."""
    if ambient not in _FIBER_SETS:
        raise WindingError(f"no fiber charts registered for ambient CP^{ambient}")
    fs = _FIBER_SETS[ambient]
    base = unit_rows(fs["lines"][line_index])
    arr = np.asarray(configs, dtype=np.complex128)
    pts = unit_rows(arr[..., 2 * line_index:2 * line_index + 2, :])
    n = arr.shape[0]
    rows = np.concatenate([pts, np.broadcast_to(base, (n,) + base.shape)], axis=1)
    s = singular_values_batch(rows)
    return float(np.max(s[..., 2] / s[..., 0]))


def fiber_functional(line_index: int, ambient: int) -> ScalarFunctional:
    if ambient not in _FIBER_SETS:
        raise WindingError(f"no fiber charts registered for ambient CP^{ambient}")
    fs = _FIBER_SETS[ambient]
    chart = fs["charts"][line_index]

    def fn(arr):
        a = chart(arr[..., 2 * line_index, :])
        b = chart(arr[..., 2 * line_index + 1, :])
        return b - a

    return ScalarFunctional(
        f"fiber{line_index + 1}", fn, ambient,
        f"chart(B{line_index + 1}) - chart(A{line_index + 1}) on the base line",
    )


# ---------------------------------------------------------------------------
# winding computation

@dataclass
class WindingResult:
    functional_id: str
    winding: int
    residual: float
    min_modulus: float
    samples: int
    refinements: int
    indeterminate: bool = False

    def to_json(self) -> dict:
        return {
            "functional": self.functional_id,
            "winding": int(self.winding),
            "residual": float(self.residual),
            "min_modulus": float(self.min_modulus),
            "samples": int(self.samples),
            "refinements": int(self.refinements),
            "indeterminate": bool(self.indeterminate),
        }


def winding(loop, functional: ScalarFunctional, n: int = 512,
            tol: Tolerances = DEFAULT_TOL) -> WindingResult:
    """Integer winding of the functional along a closed loop, by continuous
    argument tracking with adaptive midpoint refinement.
    """
    if isinstance(loop, SampledPath):
        if loop.eval_fn is None:
            raise WindingError("sampled path carries no evaluator for refinement")
        eval_fn, kind = loop.eval_fn, loop.value_kind
    elif isinstance(loop, LoopExpr):
        eval_fn, kind = loop.at, loop.value_kind
    else:
        raise WindingError("winding expects a LoopExpr or SampledPath")
    if kind != "config":
        raise WindingError("winding functionals act on configuration loops")

    thetas = np.linspace(0.0, TWO_PI, n + 1)
    vals = functional(eval_fn(thetas))
    if abs(vals[0] - vals[-1]) > 1e-6 * max(1.0, float(np.abs(vals).max())):
        raise WindingError("functional values do not close up: the path is not a loop")
    refinements = 0
    while True:
        mods = np.abs(vals)
        if mods.min() < tol.margin_warn:
            i = int(np.argmin(mods))
            raise DegenerateFunctionalError(
                f"{functional.id} vanishes along the loop "
                f"(modulus {mods.min():.3e} at angle {thetas[i]:.6f})"
            )
        dargs = np.diff(np.angle(vals))
        dargs = (dargs + np.pi) % TWO_PI - np.pi
        bad = np.abs(dargs) >= np.pi / 2
        if not np.any(bad):
            break
        if thetas.size * 2 > MAX_WINDING_SAMPLES:
            return WindingResult(functional.id, 0, 1.0, float(mods.min()),
                                 thetas.size, refinements, indeterminate=True)
        mids = 0.5 * (thetas[:-1][bad] + thetas[1:][bad])
        thetas = np.sort(np.concatenate([thetas, mids]))
        refinements += 1
        vals = functional(eval_fn(thetas))
    total = float(np.sum(dargs)) / TWO_PI
    k = int(np.round(total))
    residual = abs(total - k)
    result = WindingResult(functional.id, k, residual, float(np.abs(vals).min()),
                           thetas.size, refinements)
    if residual > WINDING_RESIDUAL_MAX:
        result.indeterminate = True
    return result


def fiber_winding_vector(loop, ambient: int, n: int = 512,
                         tol: Tolerances = DEFAULT_TOL):
    """Per-line winding of chart(B_i) - chart(A_i); requires the three lines
    to stay on the registered base lines along the whole loop."""
    if isinstance(loop, LoopExpr):
        eval_fn = loop.at
    else:
        eval_fn = loop.eval_fn
    thetas = np.linspace(0.0, TWO_PI, n + 1)
    configs = eval_fn(thetas)
    for i in range(3):
        resid = line_constancy(configs, i, ambient)
        if resid > tol.rank_rel_tol:
            raise MovingLinesError(
                f"line {i + 1} moves along the loop (incidence residual {resid:.3e})"
            )
    results = [winding(loop, fiber_functional(i, ambient), n, tol) for i in range(3)]
    return tuple(results)


def lines_constant(loop, ambient: int, n: int = 256, tol: Tolerances = DEFAULT_TOL) -> bool:
    eval_fn = loop.at if isinstance(loop, LoopExpr) else loop.eval_fn
    thetas = np.linspace(0.0, TWO_PI, n + 1)
    configs = eval_fn(thetas)
    try:
        return all(line_constancy(configs, i, ambient) <= tol.rank_rel_tol for i in range(3))
    except (KeyError, IndexError):
        return False


# ---------------------------------------------------------------------------
# relation checking

@dataclass
class RelationReport:
    lhs: str
    rhs: str
    rows: list = field(default_factory=list)   # (functional, w_lhs, w_rhs, ok)
    ok: bool = True
    indeterminate: bool = False
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ok": bool(self.ok),
            "indeterminate": bool(self.indeterminate),
            "rows": [
                {"functional": f, "lhs": int(a), "rhs": int(b), "ok": bool(o)}
                for f, a, b, o in self.rows
            ],
            "notes": list(self.notes),
        }


def relation_functionals(lhs: LoopExpr, rhs: LoopExpr, ambient: int,
                         tol: Tolerances = DEFAULT_TOL):
    """w1..w3 always (planar); fiber charts only when every loop on both
    sides keeps all three lines on the base lines."""
    fns = list(W_FUNCTIONALS.values()) if ambient == 2 else []
    if lines_constant(lhs, ambient, tol=tol) and lines_constant(rhs, ambient, tol=tol):
        fns += [fiber_functional(i, ambient) for i in range(3)]
    return fns


def check_linear_relation(lhs: LoopExpr, rhs: LoopExpr, functionals=None,
                          n: int = 512, tol: Tolerances = DEFAULT_TOL) -> RelationReport:
    """Equality of winding vectors of two loops over a functional family."""
    ambient = _loop_ambient(lhs)
    if functionals is None:
        functionals = relation_functionals(lhs, rhs, ambient, tol)
    rep = RelationReport(lhs.label(), rhs.label())
    if not functionals:
        rep.notes.append("no functionals applicable to both sides")
    for f in functionals:
        wl = winding(lhs, f, n, tol)
        wr = winding(rhs, f, n, tol)
        ok = (wl.winding == wr.winding) and not (wl.indeterminate or wr.indeterminate)
        rep.rows.append((f.id, wl.winding, wr.winding, ok))
        rep.ok &= ok
        rep.indeterminate |= wl.indeterminate or wr.indeterminate
    return rep


def _loop_ambient(expr: LoopExpr) -> int:
    probe = expr.at(np.array([0.0]))
    return probe.shape[-1] - 1


def independence_matrix(loops: Sequence, functionals: Sequence[ScalarFunctional],
                        n: int = 512, tol: Tolerances = DEFAULT_TOL):
    """Integer winding matrix (loops x functionals) and its exact rank."""
    rows = []
    for lp in loops:
        row = []
        for f in functionals:
            res = winding(lp, f, n, tol)
            if res.indeterminate:
                raise WindingError(f"indeterminate winding for {f.id}")
            row.append(res.winding)
        rows.append(row)
    mat = sympy.Matrix(rows)
    return [[int(x) for x in row] for row in rows], int(mat.rank())


@dataclass
class DiskNullityReport:
    item_id: str
    functional_id: str
    status: str            # "pass" | "fail" | "inconclusive"
    boundary_winding: Optional[int]
    min_modulus: float

    def to_json(self) -> dict:
        return {
            "item": self.item_id,
            "functional": self.functional_id,
            "status": self.status,
            "boundary_winding": None if self.boundary_winding is None else int(self.boundary_winding),
            "min_modulus": float(self.min_modulus),
        }


def disk_winding_nullity(item_id: str, functional: ScalarFunctional,
                         grid=(128, 64), n: int = 512,
                         tol: Tolerances = DEFAULT_TOL) -> DiskNullityReport:
    """A loop bounding a disk on which the functional never vanishes has
    winding zero; vanishing inside makes the test inconclusive, not failed."""
    item = atlas.get(item_id)
    if item.kind != "disk":
        raise WindingError(f"{item_id} is not a disk item")
    n_theta, n_rho = grid
    thetas = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    rhos = np.linspace(0.0, 1.0, n_rho)
    tt, rr = np.meshgrid(thetas, rhos, indexing="ij")
    vals = functional(item.eval(tt.ravel(), rho=rr.ravel()))
    min_mod = float(np.abs(vals).min())
    if min_mod < tol.margin_warn:
        return DiskNullityReport(item_id, functional.id, "inconclusive", None, min_mod)
    res = winding(Atom(item_id), functional, n, tol)
    status = "pass" if (res.winding == 0 and not res.indeterminate) else "fail"
    return DiskNullityReport(item_id, functional.id, status, res.winding, min_mod)


# ---------------------------------------------------------------------------
# Smith normal form certificates

def snf_invariants(rows: Sequence[Sequence[int]], ncols: int):
    """Nonzero invariant factors of the integer row lattice, exactly."""
    if not rows:
        return []
    m = sympy.Matrix(list(rows))
    if m.cols != ncols:
        raise ValueError("row length does not match the ambient rank")
    from sympy.matrices.normalforms import smith_normal_form

    d = smith_normal_form(m)
    out = []
    for i in range(min(d.rows, d.cols)):
        v = int(d[i, i])
        if v != 0:
            out.append(abs(v))
    return sorted(out)


def abelian_quotient(rows: Sequence[Sequence[int]], ncols: int):
    """(free_rank, torsion_orders) of Z^ncols modulo the row lattice."""
    inv = snf_invariants(rows, ncols)
    free_rank = ncols - len(inv)
    torsion = [v for v in inv if v > 1]
    return free_rank, torsion


def quotient_str(free_rank: int, torsion) -> str:
    parts = ["Z"] * free_rank + [f"Z/{t}" for t in torsion]
    return " + ".join(parts) if parts else "0"
