"""Loops, disks and cylinders as sampled objects: concatenation, inversion,
reparametrization, pointwise comparison, and membership sweeps.

Concatenation convention (calibrated against the printed piecewise interval
tables): p * q traverses p at double speed on angles [0, pi] and q on
[pi, 2*pi]; left-associated nesting therefore produces quarter-speed outer
pieces.  Conjugation products use the equal-speed n-part convention of the
printed tables, available as EqualConcat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import atlas
from .projective import (
    DEFAULT_TOL,
    ProjectiveError,
    Tolerances,
    chordal_batch,
    singular_values_batch,
    unit_rows,
)
from .strata import SpaceTag, validate_batch, validate_lines_batch

TWO_PI = 2.0 * np.pi


class PathError(ProjectiveError):
    pass


class EndpointMismatchError(PathError):
    pass


# ---------------------------------------------------------------------------
# value comparison, by value kind

def value_dist(a: np.ndarray, b: np.ndarray, kind: str) -> np.ndarray:
    """Projective distance between two sampled values (batched).

    config       max chordal distance over the six points
    point/plane  chordal distance of representatives (planes as dual points)
    lines_dual   max chordal distance over the three dual covectors
    lines_span   max line mismatch: third relative singular value of the
                 stacked spans (zero iff the spans agree as lines)
    scalar/pair  absolute difference (max over components)
    """
    if kind in ("config", "lines_dual"):
        return chordal_batch(unit_rows(a), unit_rows(b)).max(axis=-1)
    if kind in ("point", "plane"):
        return chordal_batch(unit_rows(a), unit_rows(b))
    if kind == "lines_span":
        rows = np.concatenate([unit_rows(a), unit_rows(b)], axis=-2)
        s = singular_values_batch(rows)
        return (s[..., 2] / s[..., 0]).max(axis=-1)
    if kind in ("scalar", "pair"):
        d = np.abs(a - b)
        return d if kind == "scalar" else d.max(axis=-1)
    raise PathError(f"unknown value kind {kind!r}")


def config_lines_dual(arr: np.ndarray) -> np.ndarray:
    """Dual covectors of the three lines of CP^2 configuration batches."""
    return np.stack(
        [np.cross(arr[..., 2 * i, :], arr[..., 2 * i + 1, :]) for i in range(3)],
        axis=-2,
    )


def config_lines_span(arr: np.ndarray) -> np.ndarray:
    """The three (A_i, B_i) spans of a configuration batch, any ambient."""
    n = arr.shape[-1]
    return arr.reshape(arr.shape[:-2] + (3, 2, n))


def plane_incidence(points: np.ndarray, covectors: np.ndarray) -> np.ndarray:
    """Max |<unit point, unit covector>| over the six points (batched)."""
    u = unit_rows(points)
    c = unit_rows(covectors)
    return np.abs(np.einsum("...kj,...j->...k", u, c)).max(axis=-1)


# ---------------------------------------------------------------------------
# loop expressions

class LoopExpr:
    """A closed path on the angle interval [0, 2*pi], built over atlas ids."""

    value_kind = "config"

    def at(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def label(self) -> str:
        raise NotImplementedError

    def atoms(self):
        raise NotImplementedError

    def __mul__(self, other):
        return Concat(self, other)

    def inverse(self):
        return Inverse(self)


@dataclass
class Atom(LoopExpr):
    """A circle-domain atlas item, or a fixed-t boundary of a cylinder item,
    or the unit-circle restriction of a disk item."""

    item_id: str
    t: Optional[float] = None

    def __post_init__(self):
        self.item = atlas.get(self.item_id)
        if self.item.kind == "cylinder" and self.t is None:
            raise PathError(f"cylinder item {self.item_id} needs a boundary parameter t")
        self.value_kind = self.item.value_kind

    def at(self, theta):
        if self.item.kind == "disk":
            return self.item.eval(theta, rho=1.0)
        return self.item.eval(theta, t=self.t)

    def label(self):
        if self.t is not None:
            return f"{self.item_id}@t={self.t:g}"
        return self.item_id

    def atoms(self):
        return [self]


@dataclass
class Const(LoopExpr):
    """Constant loop at a fixed value (e.g. the base configuration)."""

    value: np.ndarray
    kind: str = "config"
    name: str = "const"

    def __post_init__(self):
        self.value_kind = self.kind

    def at(self, theta):
        th = np.asarray(theta, dtype=float)
        return np.broadcast_to(self.value, th.shape + self.value.shape).copy()

    def label(self):
        return self.name

    def atoms(self):
        return []


class Concat(LoopExpr):
    def __init__(self, p: LoopExpr, q: LoopExpr):
        if p.value_kind != q.value_kind:
            raise PathError("concatenation of paths with different value kinds")
        self.p, self.q = p, q
        self.value_kind = p.value_kind

    def at(self, theta):
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        first = th <= np.pi
        vp = self.p.at(np.where(first, 2.0 * th, 0.0))
        vq = self.q.at(np.where(first, 0.0, 2.0 * th - TWO_PI))
        out = np.where(first.reshape(first.shape + (1,) * (vp.ndim - th.ndim)), vp, vq)
        return out.reshape(np.shape(theta) + vp.shape[th.ndim:])

    def label(self):
        return f"({self.p.label()} * {self.q.label()})"

    def atoms(self):
        return self.p.atoms() + self.q.atoms()

    def validate_endpoints(self, tol: Tolerances = DEFAULT_TOL):
        d = float(value_dist(self.p.at(np.array([TWO_PI]))[0],
                             self.q.at(np.array([0.0]))[0], self.value_kind))
        if d > tol.proj_eq_tol:
            raise EndpointMismatchError(
                f"{self.p.label()} ends {d:.3e} away from the start of {self.q.label()}"
            )
        for part in (self.p, self.q):
            if isinstance(part, (Concat, EqualConcat)):
                part.validate_endpoints(tol)


class EqualConcat(LoopExpr):
    """n paths traversed at n-fold speed on equal angular windows."""

    def __init__(self, parts: Sequence[LoopExpr]):
        parts = list(parts)
        kinds = {p.value_kind for p in parts}
        if len(kinds) != 1:
            raise PathError("concatenation of paths with different value kinds")
        self.parts = parts
        self.value_kind = parts[0].value_kind

    def at(self, theta):
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        n = len(self.parts)
        idx = np.minimum((th * n / TWO_PI).astype(int), n - 1)
        out = None
        for k, part in enumerate(self.parts):
            mask = idx == k
            if not np.any(mask):
                continue
            v = part.at(n * th[mask] - k * TWO_PI)
            if out is None:
                out = np.zeros(th.shape + v.shape[1:], dtype=v.dtype)
            out[mask] = v
        return out.reshape(np.shape(theta) + out.shape[th.ndim:])

    def label(self):
        return "(" + " . ".join(p.label() for p in self.parts) + ")"

    def atoms(self):
        return [a for p in self.parts for a in p.atoms()]

    def validate_endpoints(self, tol: Tolerances = DEFAULT_TOL):
        for a, b in zip(self.parts, self.parts[1:]):
            d = float(value_dist(a.at(np.array([TWO_PI]))[0],
                                 b.at(np.array([0.0]))[0], self.value_kind))
            if d > tol.proj_eq_tol:
                raise EndpointMismatchError(
                    f"{a.label()} ends {d:.3e} away from the start of {b.label()}"
                )


class Inverse(LoopExpr):
    def __init__(self, p: LoopExpr):
        self.p = p
        self.value_kind = p.value_kind

    def at(self, theta):
        return self.p.at(TWO_PI - np.asarray(theta, dtype=float))

    def label(self):
        return f"{self.p.label()}^-1"

    def atoms(self):
        return self.p.atoms()


class Reparam(LoopExpr):
    def __init__(self, p: LoopExpr, schedule: Callable, name: str = "reparam"):
        self.p, self.schedule, self.name = p, schedule, name
        self.value_kind = p.value_kind

    def at(self, theta):
        return self.p.at(self.schedule(np.asarray(theta, dtype=float)))

    def label(self):
        return f"{self.name}({self.p.label()})"

    def atoms(self):
        return self.p.atoms()


class Embed(LoopExpr):
    """Push a CP^n-valued path into CP^(n+extra) by appending zeros."""

    def __init__(self, p: LoopExpr, extra: int = 1):
        self.p, self.extra = p, extra
        self.value_kind = p.value_kind

    def at(self, theta):
        return atlas.embed(self.p.at(theta), self.extra)

    def label(self):
        return f"embed({self.p.label()})"

    def atoms(self):
        return self.p.atoms()


def outer_thirds_schedule(theta):
    """Constant on the outer thirds, cubed argument on the middle third."""
    th = np.asarray(theta, dtype=float)
    return np.clip(3.0 * th - TWO_PI, 0.0, TWO_PI)


# ---------------------------------------------------------------------------
# expression parser:  atom | expr '*' expr | expr '^-1' | '(' expr ')'

def parse_loop_expr(text: str, t_values: Optional[dict] = None) -> LoopExpr:
    tokens = _tokenize(text)
    expr, pos = _parse_expr(tokens, 0)
    if pos != len(tokens):
        raise PathError(f"unexpected token {tokens[pos]!r} in loop expression")
    return expr


def _tokenize(text: str):
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()*":
            out.append(ch)
            i += 1
        elif text.startswith("^-1", i):
            out.append("^-1")
            i += 3
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(text[i:j])
            i = j
        else:
            raise PathError(f"bad character {ch!r} in loop expression")
    return out


def _parse_expr(tokens, pos):
    left, pos = _parse_term(tokens, pos)
    while pos < len(tokens) and tokens[pos] == "*":
        right, pos = _parse_term(tokens, pos + 1)
        left = Concat(left, right)
    return left, pos


def _parse_term(tokens, pos):
    node, pos = _parse_factor(tokens, pos)
    while pos < len(tokens) and tokens[pos] == "^-1":
        node = Inverse(node)
        pos += 1
    return node, pos


def _parse_factor(tokens, pos):
    if pos >= len(tokens):
        raise PathError("loop expression ended unexpectedly")
    tok = tokens[pos]
    if tok == "(":
        node, pos = _parse_expr(tokens, pos + 1)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise PathError("unbalanced parenthesis in loop expression")
        return node, pos + 1
    if tok in ("*", ")", "^-1"):
        raise PathError(f"unexpected token {tok!r} in loop expression")
    item = atlas.get(tok)
    if item.kind not in ("loop",):
        raise PathError(f"{tok} is not a circle-domain item")
    return Atom(tok), pos + 1


# ---------------------------------------------------------------------------
# sampled paths

@dataclass
class SampledPath:
    thetas: np.ndarray
    values: np.ndarray
    value_kind: str
    source: str
    closed: bool
    eval_fn: Optional[Callable] = None

    @classmethod
    def from_expr(cls, expr: LoopExpr, n: int, tol: Tolerances = DEFAULT_TOL) -> "SampledPath":
        if isinstance(expr, (Concat, EqualConcat)):
            expr.validate_endpoints(tol)
        thetas = np.linspace(0.0, TWO_PI, n + 1)
        values = expr.at(thetas)
        closed = float(value_dist(values[0], values[-1], expr.value_kind)) <= tol.proj_eq_tol
        return cls(thetas, values, expr.value_kind, expr.label(), closed, expr.at)


def pointwise_eq(p: LoopExpr, q: LoopExpr, grid_n: int = 512,
                 tol: Tolerances = DEFAULT_TOL) -> float:
    """Max projective distance over a shared closed grid."""
    if grid_n < 16:
        raise PathError("pointwise comparison needs at least 16 grid points")
    if p.value_kind != q.value_kind:
        raise PathError("cannot compare paths with different value kinds")
    thetas = np.linspace(0.0, TWO_PI, grid_n + 1)
    return float(np.max(value_dist(p.at(thetas), q.at(thetas), p.value_kind)))


def compare_values(a: np.ndarray, b: np.ndarray, kind: str) -> float:
    return float(np.max(value_dist(a, b, kind)))


# ---------------------------------------------------------------------------
# membership sweeps

@dataclass
class SweepReport:
    item_id: str
    grid: str
    ok: bool
    min_margin: float
    max_residual: float
    n_nodes: int
    fail_counts: dict = field(default_factory=dict)
    worst_param: tuple = ()

    def to_json(self) -> dict:
        return {
            "item": self.item_id,
            "grid": self.grid,
            "ok": bool(self.ok),
            "min_margin": float(self.min_margin),
            "max_residual": float(self.max_residual),
            "nodes": int(self.n_nodes),
            "fail_counts": dict(self.fail_counts),
            "worst_param": [float(x) for x in self.worst_param],
        }


def _merge_counts(total: dict, extra: dict):
    for k, v in extra.items():
        total[k] = total.get(k, 0) + v


def sweep_item(item_id: str, grid, tol: Tolerances = DEFAULT_TOL,
               tag: Optional[SpaceTag] = None) -> SweepReport:
    """Validate an atlas item over its whole domain.

    grid: n for circles, (n_theta, n_rho) for disks, (n_theta, n_t) for
    cylinders.  The configured target tag is used unless overridden.
    """
    item = atlas.get(item_id)
    tag = tag or item.target
    if tag is None:
        raise PathError(f"{item_id} has no membership target")

    def _check(points, param_grid):
        if item.value_kind == "config":
            res = validate_batch(points, tag, tol)
            ok = res.all_ok
            margin = float(res.margins.min())
            resid = float(res.residuals.max())
            worst = param_grid[int(np.argmin(res.margins))]
            counts = dict(res.fail_counts)
        elif item.value_kind in ("lines_dual", "lines_span"):
            oks, margins, resids, counts = validate_lines_batch(points, tag, tol)
            ok = bool(np.all(oks))
            margin = float(margins.min())
            resid = float(resids.max())
            worst = param_grid[int(np.argmin(margins))]
        else:
            raise PathError(f"{item_id} values have no membership notion")
        return ok, margin, resid, counts, worst

    if item.kind in ("loop", "basepoint"):
        n = int(grid)
        thetas = np.linspace(0.0, TWO_PI, n, endpoint=False)
        pts = item.eval(thetas)
        if item.kind == "basepoint":
            pts = pts[None]
            thetas = np.array([0.0])
        ok, margin, resid, counts, worst = _check(pts, [(t,) for t in thetas])
        return SweepReport(item_id, f"circle:{n}", ok, margin, resid, len(thetas), counts, worst)

    if item.kind == "disk":
        n_theta, n_rho = grid
        thetas = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
        rhos = np.linspace(0.0, 1.0, n_rho)
        tt, rr = np.meshgrid(thetas, rhos, indexing="ij")
        pts = item.eval(tt.ravel(), rho=rr.ravel())
        params = list(zip(tt.ravel(), rr.ravel()))
        ok, margin, resid, counts, worst = _check(pts, params)
        return SweepReport(item_id, f"disk:{n_theta}x{n_rho}", ok, margin, resid,
                           len(params), counts, worst)

    if item.kind == "cylinder":
        n_theta, n_t = grid
        thetas = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
        ok, margin, resid = True, np.inf, 0.0
        counts: dict = {}
        worst = (0.0, 0.0)
        for t in np.linspace(0.0, 1.0, n_t):
            pts = item.eval(thetas, t=float(t))
            o, mg, rs, cts, w = _check(pts, [(th, t) for th in thetas])
            ok &= o
            if mg < margin:
                margin, worst = mg, w
            resid = max(resid, rs)
            _merge_counts(counts, cts)
        return SweepReport(item_id, f"cylinder:{n_theta}x{n_t}", ok, margin, resid,
                           n_theta * n_t, counts, worst)

    raise PathError(f"{item_id} ({item.kind}) has no sweep domain")


def junction_report(item_id: str, n_t: int = 64, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Two-sided evaluation at every piecewise boundary, for all t on a grid.

    Returns the maximum projective distance between the left-piece and
    right-piece values, with the offending (theta, t) when nonzero.
    """
    item = atlas.get(item_id)
    if not item.arcs:
        return {"item": item_id, "max_mismatch": 0.0, "junctions": 0}
    ts = np.linspace(0.0, 1.0, n_t) if item.kind == "cylinder" else np.array([0.0])
    worst = 0.0
    worst_at = (0.0, 0.0)
    n_checked = 0
    for t in ts:
        bounds = item.junction_thetas(float(t))
        if not bounds:
            continue
        th = np.asarray(bounds, dtype=float)
        left = item.eval(th, t=float(t), side="left")
        right = item.eval(th, t=float(t), side="right")
        kind = item.value_kind
        d = value_dist(left, right, kind) if kind != "scalar" else np.abs(left - right)
        n_checked += len(bounds)
        i = int(np.argmax(d))
        if float(d[i]) > worst:
            worst = float(d[i])
            worst_at = (float(th[i]), float(t))
    return {
        "item": item_id,
        "max_mismatch": worst,
        "junctions": n_checked,
        "worst_at": [worst_at[0], worst_at[1]],
        "ok": worst < tol.proj_eq_tol,
    }


def closure_report(item_id: str, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Closed-loop and basepoint assertions for circle-domain items."""
    item = atlas.get(item_id)
    ends = []
    ts = (0.0, 1.0) if item.kind == "cylinder" else (None,)
    worst_close = 0.0
    worst_base = 0.0
    for t in ts:
        v0 = item.eval(np.array([0.0]), t=t)
        v1 = item.eval(np.array([TWO_PI]), t=t)
        worst_close = max(worst_close, compare_values(v0, v1, item.value_kind))
        if item.based and item.value_kind == "config":
            base = atlas.basepoint(item.target).array()
            worst_base = max(worst_base, compare_values(v0[0], base, "config"))
    return {
        "item": item_id,
        "closure": worst_close,
        "base_distance": worst_base,
        "ok": worst_close <= tol.proj_eq_tol and worst_base <= tol.proj_eq_tol,
    }
