"""Membership predicates for configuration spaces and Desargues spaces.

A Desargues configuration is an ordered tuple (A1,B1,A2,B2,A3,B3) of six
points placed on three distinct concurrent lines d_i = A_i B_i, all six
distinct from the common center I; planar if the points span a 2-plane,
solid if they span a 3-space.  ``validate`` checks exactly the written
conditions, nothing more.

Margins are "distance to degeneracy" quantities (bigger is safer): chordal
distances and relative singular values.  Exact incidence requirements
(concurrency, fixed center) are residuals (smaller is better) and are
reported separately instead of being folded into the margin minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .projective import (
    DEFAULT_TOL,
    DimensionMismatchError,
    HPoint,
    PLine,
    ProjectiveError,
    Tolerances,
    chordal_batch,
    line_through,
    meet_lines,
    singular_values_batch,
    unit_rows,
)

_PAIRS = [(i, j) for i in range(6) for j in range(i + 1, 6)]
_LINE_IDX = ((0, 1), (2, 3), (4, 5))


@dataclass(frozen=True)
class SpaceTag:
    """Identifies one of the configuration spaces handled by the engine.

    kind is one of Fk, Fk_stratum, D_planar, D_planar_fixed, D_solid,
    D_solid_fixed, F3_lines_through.  n is the ambient CP^n; span_i the
    required span dimension for Fk_stratum; center pins the intersection
    point for the _fixed and lines_through kinds.
    """

    kind: str
    n: int
    k: int = 0
    span_i: int = 0
    center: Optional[HPoint] = None

    _KINDS = (
        "Fk",
        "Fk_stratum",
        "D_planar",
        "D_planar_fixed",
        "D_solid",
        "D_solid_fixed",
        "F3_lines_through",
    )

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind.startswith("D_planar") and self.n < 2:
            raise ValueError("planar Desargues spaces need ambient n >= 2")
        if self.kind.startswith("D_solid") and self.n < 3:
            raise ValueError("solid Desargues spaces need ambient n >= 3")
        if self.kind.endswith("_fixed") or self.kind == "F3_lines_through":
            if self.center is None:
                raise ValueError(f"{self.kind} requires a center point")
            if self.center.ambient_dim != self.n:
                raise ValueError("center ambient dimension does not match tag")
        if self.kind == "Fk_stratum" and not 1 <= self.span_i <= self.n:
            raise ValueError("stratum span dimension out of range")

    @property
    def span_required(self) -> Optional[int]:
        if self.kind.startswith("D_planar"):
            return 2
        if self.kind.startswith("D_solid"):
            return 3
        if self.kind == "Fk_stratum":
            return self.span_i
        return None

    @classmethod
    def planar(cls, n):
        return cls("D_planar", n)

    @classmethod
    def planar_fixed(cls, n, center):
        return cls("D_planar_fixed", n, center=center)

    @classmethod
    def solid(cls, n):
        return cls("D_solid", n)

    @classmethod
    def solid_fixed(cls, n, center):
        return cls("D_solid_fixed", n, center=center)

    @classmethod
    def fk(cls, n, k):
        return cls("Fk", n, k=k)

    @classmethod
    def fk_stratum(cls, n, k, i):
        return cls("Fk_stratum", n, k=k, span_i=i)

    @classmethod
    def lines_through(cls, center):
        return cls("F3_lines_through", center.ambient_dim, center=center)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        if self.kind == "Fk":
            d["k"] = self.k
        if self.kind == "Fk_stratum":
            d.update(k=self.k, i=self.span_i)
        if self.center is not None:
            d["center"] = self.center.to_json()
        return d

    @classmethod
    def from_json(cls, d) -> "SpaceTag":
        center = HPoint.from_json(d["center"]) if "center" in d else None
        return cls(d["kind"], d["n"], k=d.get("k", 0), span_i=d.get("i", 0), center=center)


@dataclass
class MembershipReport:
    verdict: bool
    margin: float
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": bool(self.verdict),
            "margin": float(self.margin),
            "failures": list(self.failures),
            "details": {k: float(v) for k, v in self.details.items()},
            "warnings": list(self.warnings),
        }


class Config6:
    """Six ordered points with lazily derived lines and center.

    Construction is lenient; :func:`validate` reports which invariants hold
    instead of refusing to build a broken tuple.
    """

    __slots__ = ("points",)

    def __init__(self, points: Sequence[HPoint]):
        pts = tuple(points)
        if len(pts) != 6:
            raise ProjectiveError("a Desargues configuration has six points")
        dim = pts[0].ambient_dim
        for p in pts:
            if p.ambient_dim != dim:
                raise DimensionMismatchError("mixed ambient dimensions")
        self.points = pts

    @property
    def ambient_dim(self) -> int:
        return self.points[0].ambient_dim

    def array(self) -> np.ndarray:
        return np.stack([p.coords for p in self.points])

    def line(self, i: int, tol: Tolerances = DEFAULT_TOL) -> PLine:
        a, b = _LINE_IDX[i]
        return line_through(self.points[a], self.points[b], tol)

    def lines(self, tol: Tolerances = DEFAULT_TOL):
        return tuple(self.line(i, tol) for i in range(3))

    def center(self, tol: Tolerances = DEFAULT_TOL) -> HPoint:
        return meet_lines(self.line(0, tol), self.line(1, tol), tol)

    def to_json(self, tag: Optional[SpaceTag] = None) -> dict:
        d = {"points": [p.to_json() for p in self.points]}
        if tag is not None:
            d["tag"] = tag.to_json()
        return d

    @classmethod
    def from_json(cls, d) -> "Config6":
        return cls([HPoint.from_json(p) for p in d["points"]])

    @classmethod
    def from_array(cls, rows) -> "Config6":
        return cls([HPoint(r) for r in np.asarray(rows, dtype=np.complex128)])

    def __repr__(self) -> str:
        return "Config6(" + ", ".join(repr(p) for p in self.points) + ")"


def in_configuration_space(points: Sequence[HPoint], tol: Tolerances = DEFAULT_TOL) -> MembershipReport:
    """Pairwise-distinctness predicate for F_k; margin is the least distance."""
    pts = list(points)
    if not pts:
        raise ProjectiveError("empty point list")
    rows = unit_rows(np.stack([p.coords for p in pts]))
    k = len(pts)
    worst = np.inf
    failures = []
    for i in range(k):
        for j in range(i + 1, k):
            d = float(chordal_batch(rows[i], rows[j]))
            worst = min(worst, d)
            if d <= tol.proj_eq_tol:
                failures.append(f"points {i} and {j} coincide")
    return MembershipReport(not failures, worst, failures, {"min_pair_dist": worst})


def stratum_of(points: Sequence[HPoint], tol: Tolerances = DEFAULT_TOL) -> int:
    """Span dimension of a configuration that already passed distinctness."""
    rep = in_configuration_space(points, tol)
    if not rep.verdict:
        raise ProjectiveError("not a configuration: " + "; ".join(rep.failures))
    from .projective import span_dim

    return span_dim(points, tol)


@dataclass
class BatchResult:
    """Vectorized validation outcome over a grid of configurations."""

    verdicts: np.ndarray          # bool (N,)
    margins: np.ndarray           # float (N,): min distance-type quantity
    residuals: np.ndarray         # float (N,): max exact-incidence residual
    centers: np.ndarray           # complex (N, n+1): computed meets of d1, d2
    fail_counts: dict             # check name -> number of failing nodes
    worst_index: int              # node with the smallest margin

    @property
    def all_ok(self) -> bool:
        return bool(np.all(self.verdicts))


def validate_batch(points: np.ndarray, tag: SpaceTag, tol: Tolerances = DEFAULT_TOL) -> BatchResult:
    """Validate many six-point tuples at once.

    ``points`` has shape (N, 6, n+1).  Checks (named as reported):
    pairwise-distinct, lines-defined (within pairwise), lines-distinct,
    concurrent, center-apart, span, center-matches (fixed tags only).
    """
    pts = np.asarray(points, dtype=np.complex128)
    if pts.ndim == 2:
        pts = pts[None]
    n_nodes = pts.shape[0]
    m = pts.shape[2]
    if m != tag.n + 1:
        raise DimensionMismatchError(
            f"tag expects CP^{tag.n} but points have {m} coordinates"
        )
    u = unit_rows(pts)

    margins = np.full(n_nodes, np.inf)
    residuals = np.zeros(n_nodes)
    ok = np.ones(n_nodes, dtype=bool)
    fail_counts: dict = {}

    def _record(name, good):
        bad = ~good
        if np.any(bad):
            fail_counts[name] = int(np.sum(bad))
        return good

    # pairwise distinctness (covers "each line defined": pairs (0,1),(2,3),(4,5))
    pair_d = np.stack([chordal_batch(u[:, i], u[:, j]) for i, j in _PAIRS], axis=-1)
    margins = np.minimum(margins, pair_d.min(axis=-1))
    ok &= _record("pairwise-distinct", np.all(pair_d > tol.proj_eq_tol, axis=-1))

    # lines pairwise distinct: rank 3 of the stacked four span points
    for (la, lb), name in zip(((0, 1), (0, 2), (1, 2)), ("d1-d2", "d1-d3", "d2-d3")):
        ia, ib = _LINE_IDX[la], _LINE_IDX[lb]
        rows = u[:, [ia[0], ia[1], ib[0], ib[1]], :]
        s = singular_values_batch(rows)
        rel = s[..., 2] / s[..., 0]
        margins = np.minimum(margins, rel)
        ok &= _record(f"lines-distinct {name}", rel > tol.rank_rel_tol)

    # concurrency: meet of d1 and d2, then incidence of the meet on d3
    cols = np.stack([u[:, 0], u[:, 1], -u[:, 2], -u[:, 3]], axis=-1)  # (N, m, 4)
    _, s_cols, vh = np.linalg.svd(cols)
    if m > 3:
        meet_res = s_cols[..., 3] / s_cols[..., 0]
        residuals = np.maximum(residuals, meet_res)
        ok &= _record("concurrent d1-d2", meet_res <= tol.rank_rel_tol)
    ab = np.conj(vh[:, -1, :2])
    centers = ab[:, 0, None] * u[:, 0] + ab[:, 1, None] * u[:, 1]
    cn = np.linalg.norm(centers, axis=-1, keepdims=True)
    degenerate_meet = cn[:, 0] < 1e-12
    ok &= _record("meet-defined", ~degenerate_meet)
    cn[degenerate_meet] = 1.0
    centers = centers / cn

    rows3 = np.concatenate([centers[:, None, :], u[:, 4:6, :]], axis=1)
    s3 = singular_values_batch(rows3)
    inc = s3[..., 2] / s3[..., 0]
    residuals = np.maximum(residuals, inc)
    ok &= _record("concurrent d3", inc <= tol.rank_rel_tol)

    # all six points away from the center
    cd = np.stack([chordal_batch(u[:, i], centers) for i in range(6)], axis=-1)
    margins = np.minimum(margins, cd.min(axis=-1))
    ok &= _record("center-apart", np.all(cd > tol.proj_eq_tol, axis=-1))

    # span of the six points
    want = tag.span_required
    if want is not None:
        s6 = singular_values_batch(u)
        rel = s6[..., want] / s6[..., 0]
        margins = np.minimum(margins, rel)
        ok &= _record("span-at-least", rel > tol.rank_rel_tol)
        if m > want + 1:
            exc = s6[..., want + 1] / s6[..., 0]
            residuals = np.maximum(residuals, exc)
            ok &= _record("span-exact", exc <= tol.rank_rel_tol)

    # fixed center
    if tag.kind.endswith("_fixed"):
        c = tag.center.unit()
        dcen = chordal_batch(centers, c[None, :])
        residuals = np.maximum(residuals, dcen)
        ok &= _record("center-matches", dcen <= tol.proj_eq_tol)

    worst = int(np.argmin(np.where(ok, margins, np.inf))) if np.any(ok) else int(np.argmin(margins))
    return BatchResult(ok, margins, residuals, centers, fail_counts, worst)


def validate(points: Sequence[HPoint], tag: SpaceTag, tol: Tolerances = DEFAULT_TOL) -> MembershipReport:
    """Single-configuration membership check with named sub-check failures."""
    if tag.kind in ("Fk", "Fk_stratum"):
        rep = in_configuration_space(points, tol)
        if tag.kind == "Fk_stratum" and rep.verdict:
            from .projective import span_dim

            got = span_dim(points, tol)
            rep.details["span"] = got
            if got != tag.span_i:
                rep.verdict = False
                rep.failures.append(f"span {got} != required {tag.span_i}")
        return rep
    if tag.kind == "F3_lines_through":
        raise ProjectiveError("line triples are validated by validate_lines")
    if len(points) != 6:
        raise ProjectiveError("Desargues tags require six points")
    arr = np.stack([p.coords for p in points])[None]
    res = validate_batch(arr, tag, tol)
    failures = sorted(res.fail_counts)
    margin = float(res.margins[0])
    rep = MembershipReport(
        bool(res.verdicts[0]),
        margin,
        failures,
        {"margin": margin, "max_residual": float(res.residuals[0])},
    )
    if rep.verdict and margin < tol.margin_warn:
        rep.warnings.append(f"margin {margin:.3e} below margin_warn")
    return rep


def validate_lines(duals_or_spans, tag: SpaceTag, tol: Tolerances = DEFAULT_TOL) -> MembershipReport:
    """Triple of distinct lines through a fixed point.

    Lines may be given as dual covectors (CP^2) or as 2-point span arrays
    of shape (3, 2, n+1).
    """
    if tag.kind != "F3_lines_through":
        raise ProjectiveError("validate_lines requires an F3_lines_through tag")
    arr = np.asarray(duals_or_spans, dtype=np.complex128)
    failures = []
    details = {}
    if arr.ndim == 2:  # dual covectors in CP^2
        u = unit_rows(arr)
        worst = np.inf
        for i in range(3):
            for j in range(i + 1, 3):
                d = float(chordal_batch(u[i], u[j]))
                worst = min(worst, d)
                if d <= tol.proj_eq_tol:
                    failures.append(f"lines {i} and {j} coincide")
        details["min_line_dist"] = worst
        c = tag.center.unit()
        inc = float(np.max(np.abs(u @ c)))
        details["center_incidence"] = inc
        if inc > tol.rank_rel_tol:
            failures.append("lines do not all pass through the center")
        return MembershipReport(not failures, worst, failures, details)
    # span form
    u = unit_rows(arr)
    worst = np.inf
    for i in range(3):
        for j in range(i + 1, 3):
            rows = np.concatenate([u[i], u[j]], axis=0)
            s = singular_values_batch(rows)
            rel = float(s[2] / s[0])
            worst = min(worst, rel)
            if rel <= tol.rank_rel_tol:
                failures.append(f"lines {i} and {j} coincide")
    c = tag.center.unit()
    inc = 0.0
    for i in range(3):
        rows = np.concatenate([u[i], c[None]], axis=0)
        s = singular_values_batch(rows)
        inc = max(inc, float(s[2] / s[0]))
    details.update(min_line_dist=worst, center_incidence=inc)
    if inc > tol.rank_rel_tol:
        failures.append("lines do not all pass through the center")
    return MembershipReport(not failures, worst, failures, details)


def validate_lines_batch(arr: np.ndarray, tag: SpaceTag, tol: Tolerances = DEFAULT_TOL):
    """Vectorized validate_lines.

    arr: (N, 3, n+1) dual covectors (CP^2) or (N, 3, 2, n+1) spans.
    Returns (ok, margins, residuals, fail_counts).
    """
    if tag.kind != "F3_lines_through":
        raise ProjectiveError("validate_lines_batch requires an F3_lines_through tag")
    arr = np.asarray(arr, dtype=np.complex128)
    c = tag.center.unit()
    fail_counts: dict = {}

    def _record(name, good):
        if np.any(~good):
            fail_counts[name] = int(np.sum(~good))
        return good

    if arr.ndim == 3:  # dual covectors
        u = unit_rows(arr)
        d01 = chordal_batch(u[:, 0], u[:, 1])
        d02 = chordal_batch(u[:, 0], u[:, 2])
        d12 = chordal_batch(u[:, 1], u[:, 2])
        margins = np.minimum(np.minimum(d01, d02), d12)
        ok = _record("lines-distinct", margins > tol.proj_eq_tol)
        residuals = np.abs(u @ c).max(axis=-1)
        ok = ok & _record("center-incidence", residuals <= tol.rank_rel_tol)
        return ok, margins, residuals, fail_counts

    u = unit_rows(arr)  # (N, 3, 2, m)
    margins = np.full(arr.shape[0], np.inf)
    for i in range(3):
        for j in range(i + 1, 3):
            rows = np.concatenate([u[:, i], u[:, j]], axis=1)
            s = singular_values_batch(rows)
            margins = np.minimum(margins, s[..., 2] / s[..., 0])
    ok = _record("lines-distinct", margins > tol.rank_rel_tol)
    residuals = np.zeros(arr.shape[0])
    for i in range(3):
        rows = np.concatenate([u[:, i], np.broadcast_to(c, (arr.shape[0], 1, c.size))], axis=1)
        s = singular_values_batch(rows)
        residuals = np.maximum(residuals, s[..., 2] / s[..., 0])
    ok = ok & _record("center-incidence", residuals <= tol.rank_rel_tol)
    return ok, margins, residuals, fail_counts


def degeneracy_margin(config: Config6, tag: SpaceTag, tol: Tolerances = DEFAULT_TOL) -> float:
    """Distance to the boundary strata: min over pairwise point distances,
    line-distinctness margins, span margins, and point-center distances."""
    rep = validate(config.points, tag, tol)
    if not rep.verdict:
        raise ProjectiveError("degeneracy_margin of an invalid configuration")
    return rep.margin


def random_config(tag: SpaceTag, seed, tol: Tolerances = DEFAULT_TOL, max_tries: int = 200) -> Config6:
    """Constructive sampler: a center, three distinct lines through it, two
    distinct non-center points per line.  Rejection-samples until the
    degeneracy margin clears margin_warn; reproducible via the seed."""
    rng = np.random.default_rng(seed)
    n = tag.n
    want_span = tag.span_required or 2
    for _ in range(max_tries):
        if tag.center is not None:
            center = tag.center.coords
        else:
            center = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        pts = []
        if want_span == 2:
            # directions inside a random plane through the center
            basis = rng.normal(size=(2, n + 1)) + 1j * rng.normal(size=(2, n + 1))
            dirs = [basis[0], basis[1], basis[0] + basis[1]]
        else:
            basis = rng.normal(size=(3, n + 1)) + 1j * rng.normal(size=(3, n + 1))
            dirs = [basis[0], basis[1], basis[2]]
        for d in dirs:
            a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
            pts.append(center + a * d)
            pts.append(center + b * d)
        try:
            cfg = Config6([HPoint(p) for p in pts])
            rep = validate(cfg.points, tag, tol)
        except ProjectiveError:
            continue
        if rep.verdict and rep.margin > tol.margin_warn:
            return cfg
    raise ProjectiveError("random configuration sampling failed to converge")
