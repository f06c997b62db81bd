"""Checkers for B3-generalized complex structures on charts and atlases.

All checks are pointwise grid sweeps.  A :class:`CheckReport` records the
worst residual over the sampled points and where it occurred; residuals are
dimensionless, normalized by the spinor magnitude at the point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from b3gc import calculus as calc
from b3gc import clifford as cl
from b3gc.calculus import ChartDomain, ChartMap, FormField
from b3gc.clifford import GenVector, MixedForm


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-8              # relative singular-value cutoff for kernels
    real_index: float = 1e-8        # |(rho, conj rho)| > real_index * |rho|^2
    type_cut: float = 1e-8          # degree k counts if |rho_k| > type_cut * |rho|
    integrability: float = 1e-6
    closed: float = 1e-6
    b3: float = 1e-6
    b3_nondegenerate: float = 1e-2
    overlap: float = 1e-8
    glue: float = 1e-6
    period: float = 1e-10
    f_period: float = 1e-8
    transversality: float = 0.5
    complex_coord: float = 0.1
    min_rho0: float = 1e-2          # |rho_0| above which the normalized form is tested

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive")


DEFAULT_TOL = Tolerances()


@dataclass
class CheckReport:
    """Outcome of one check over a set of sample points."""

    name: str
    passed: bool
    worst_residual: float
    worst_point: Optional[list]
    tolerance: float
    n_points: int
    detail: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "verdict": "pass" if self.passed else "fail",
            "worst_residual": _finite(self.worst_residual),
            "worst_point": self.worst_point,
        }

    def __str__(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: worst {self.worst_residual:.3e} (tol {self.tolerance:.1e}, n={self.n_points}) {self.detail}".rstrip()


def _finite(x):
    x = float(x)
    return x if np.isfinite(x) else None


def report(name, residuals, points, tol, lower_bound=False, detail=""):
    """Build a CheckReport from per-point residuals.

    With ``lower_bound`` the check asserts ``residual > tol`` everywhere and
    the worst value is the minimum.
    """
    r = np.asarray(residuals, dtype=float).reshape(-1)
    pts = np.asarray(points, dtype=float).reshape(-1, 3) if points is not None else None
    if r.size == 0:
        return CheckReport(name, True, 0.0, None, tol, 0, detail or "no points")
    bad = ~np.isfinite(r)
    if lower_bound:
        i = int(np.argmin(np.where(bad, -np.inf, r)))
        passed = bool(np.all(r > tol) and not bad.any())
    else:
        i = int(np.argmax(np.where(bad, np.inf, r)))
        passed = bool(np.all(r < tol) and not bad.any())
    wp = pts[i].tolist() if pts is not None and len(pts) == len(r) else None
    return CheckReport(name, passed, float(r[i]), wp, tol, int(r.size), detail)


# ---------------------------------------------------------------------------
# atlas types


@dataclass(frozen=True)
class TwistData:
    """Twisting forms: a closed real 2-form F and a real 3-form H."""

    F: FormField
    H: FormField

    def residuals(self, points, step=None, richardson=True):
        """Pointwise (|dF|, |dH + F^F|).

        ``dH + F^F`` is a 4-form and vanishes identically in three
        dimensions; it is reported as zeros without differentiating H.
        """
        dF = calc.ext_d(self.F, points, step, richardson)
        return dF.norm(), np.zeros(dF.shape)


@dataclass
class Chart:
    name: str
    field: FormField
    twist: Optional[TwistData] = None

    @property
    def domain(self):
        return self.field.domain


@dataclass
class Overlap:
    """``rho_source = transition * phi^* rho_target`` on ``phi.source``."""

    source: int
    target: int
    map: ChartMap
    transition: Callable[[np.ndarray], np.ndarray]


@dataclass
class SpinorStructure:
    charts: list
    overlaps: list = field(default_factory=list)
    name: str = ""


# ---------------------------------------------------------------------------
# pointwise algebraic checks


def _nonzero(rho: MixedForm, what="rho"):
    n = rho.norm()
    if np.any(n == 0):
        raise ValueError(f"{what} vanishes at a sample point")
    return n


def singular_values(rho):
    return np.linalg.svd(cl.clifford_matrix(rho), compute_uv=False)


def annihilator_dim(rho, rank_tol=DEFAULT_TOL.rank):
    s = singular_values(rho)
    rank = np.sum(s > rank_tol * s[..., :1], axis=-1)
    return 7 - rank


def check_pure(rho, rank_tol=DEFAULT_TOL.rank):
    """Purity via the kernel of v -> v . rho (maximal isotropic means dim 3).

    Returns:
        (pure, kernel_dim) arrays over the batch.
    """
    rho = cl.as_form(rho)
    _nonzero(rho)
    k = annihilator_dim(rho, rank_tol)
    return k == 3, k


def check_real_index_zero(rho, tol=DEFAULT_TOL.real_index):
    """Return (flag, |(rho, conj rho)|)."""
    rho = cl.as_form(rho)
    value = np.abs(cl.pairing(rho, rho.conj()))
    return value > tol * rho.norm() ** 2, value


def compute_type(rho, tol=DEFAULT_TOL.type_cut):
    """Lowest degree carrying a non-negligible component."""
    rho = cl.as_form(rho)
    n = _nonzero(rho)
    norms = np.stack([np.sqrt(np.sum(np.abs(rho.degree_coeffs(k)) ** 2, axis=-1)) for k in range(4)], -1)
    present = norms > tol * n[..., None]
    return np.argmax(present, axis=-1)


# ---------------------------------------------------------------------------
# integrability


def twisted_derivative(field: FormField, points, twist: Optional[TwistData] = None,
                       step=None, richardson=False):
    """``d rho`` or ``(d + F ^ tau + H ^) rho`` at the points."""
    D = calc.ext_d(field, points, step, richardson)
    if twist is not None:
        rho = field(points)
        D = D + cl.wedge(twist.F(points), cl.tau(rho)) + cl.wedge(twist.H(points), rho)
    return D


def clifford_svd(rho):
    """Thin SVD of the Clifford matrix of rho, shared by purity and witness solves."""
    return np.linalg.svd(cl.clifford_matrix(rho), full_matrices=False)


def clifford_lstsq(rho, D, rank_tol=DEFAULT_TOL.rank, svd=None):
    """Minimum-norm complex least squares for ``v . rho = D`` (batched)."""
    M = cl.clifford_matrix(rho)
    U, s, Vh = svd if svd is not None else np.linalg.svd(M, full_matrices=False)
    keep = s > rank_tol * s[..., :1]
    sinv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    coef = np.einsum("...ji,...j->...i", U.conj(), cl.as_form(D).c) * sinv
    v = np.einsum("...ij,...i->...j", Vh.conj(), coef)
    resid = np.linalg.norm(np.einsum("...ij,...j->...i", M, v) - cl.as_form(D).c, axis=-1)
    return GenVector(v), resid


def find_integrability_witness(field: FormField, points, twist=None, step=None,
                               richardson=False, rank_tol=DEFAULT_TOL.rank, svd=None):
    """Pointwise witness ``v`` with ``v . rho = d rho`` (twisted when asked).

    Returns:
        (witness, relative residual).  The witness is only defined modulo
        the annihilator of rho; the minimum-norm representative is returned.
        Points where rho vanishes get residual ``nan``.
    """
    points = np.asarray(points, dtype=float)
    rho = field(points)
    D = twisted_derivative(field, points, twist, step, richardson)
    v, resid = clifford_lstsq(rho, D, rank_tol, svd)
    n = rho.norm()
    rel = np.where(n > 0, resid / np.where(n > 0, n, 1.0), np.nan)
    return v, rel


def witness_distance(witness: GenVector, expected: GenVector, rho, rank_tol=DEFAULT_TOL.rank):
    """Distance from ``expected`` to the affine set ``witness + Ann(rho)``."""
    M = cl.clifford_matrix(rho)
    diff = witness.v - expected.v
    w, _ = clifford_lstsq(rho, MixedForm(np.einsum("...ij,...j->...i", M, diff)), rank_tol)
    return np.linalg.norm(w.v, axis=-1)


# ---------------------------------------------------------------------------
# explicit conditions


def normalize_check_closed(field: FormField, points, tol=DEFAULT_TOL.closed, step=None,
                           richardson=True, min_rho0=DEFAULT_TOL.min_rho0, name="normalized-closed"):
    """Check that ``rho / rho_0`` is closed at points where rho_0 is away from 0.

    The quotient field is differentiated directly; the residual is
    ``|d(rho/rho_0)| / |rho/rho_0|``.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    rho0 = field(points).c[..., 0]
    if np.any(np.abs(rho0) <= min_rho0):
        raise ValueError("rho_0 vanishes (or is too small) in the region")
    quotient = field.map(lambda r, p: r / r.c[..., 0])
    d = calc.ext_d(quotient, points, step, richardson)
    resid = d.norm() / quotient(points).norm()
    return report(name, resid, points, tol)


def b3_explicit_residuals(rho: MixedForm, drho: Optional[MixedForm] = None):
    """Residuals of the four explicit conditions, normalized by |rho|^2.

    (a) rho0 rho3 - rho1^rho2, (b) Re(rho0 conj(rho3) - rho1^conj(rho2)),
    (c) rho0 d rho1 - d rho0 ^ rho1, (d) rho0 d rho2 - d rho0 ^ rho2.
    """
    n2 = rho.norm() ** 2
    r0 = rho.c[..., 0]
    r1, r2, r3 = rho.part(1), rho.part(2), rho.part(3)
    a = np.abs(r0 * r3.top - cl.wedge(r1, r2).top) / n2
    b = np.abs((r0 * r3.top.conj() - cl.wedge(r1, r2.conj()).top).real) / n2
    out = {"a": a, "b": b}
    if drho is not None:
        d0, d1, d2 = drho.part(1), drho.part(2), drho.part(3)
        out["c"] = np.linalg.norm((d1 * r0).c - cl.wedge(d0, r1).c, axis=-1) / n2
        out["d"] = np.linalg.norm((d2 * r0).c - cl.wedge(d0, r2).c, axis=-1) / n2
    return out


def check_b3_explicit(field: FormField, points, tol=DEFAULT_TOL.b3,
                      nondegenerate=DEFAULT_TOL.b3_nondegenerate, step=None,
                      differential=True, prefix="b3-explicit"):
    """Explicit 3-manifold conditions (a)-(d); returns one report per condition.

    With ``differential=False`` only the algebraic conditions (a), (b) run
    (used for twisted spinors, which need not satisfy (c), (d)).
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    rho = field(points)
    drho = calc.ext_d(field, points, step) if differential else None
    res = b3_explicit_residuals(rho, drho)
    reports = [
        report(f"{prefix}(a)", res["a"], points, tol),
        report(f"{prefix}(b)", res["b"], points, nondegenerate, lower_bound=True),
    ]
    if differential:
        reports.append(report(f"{prefix}(c)", res["c"], points, tol))
        reports.append(report(f"{prefix}(d)", res["d"], points, tol))
    return reports


# ---------------------------------------------------------------------------
# overlaps


def overlap_residual(structure: SpinorStructure, ov: Overlap, points):
    src = structure.charts[ov.source].field
    tgt = structure.charts[ov.target].field
    pulled = calc.pullback(ov.map, tgt)(points)
    g = np.asarray(ov.transition(points))
    lhs = src(points)
    return (lhs - pulled * g).norm() / lhs.norm(), np.abs(g)


def check_overlaps(structure: SpinorStructure, resolution=None, tol=DEFAULT_TOL.overlap):
    reports = []
    for ov in structure.overlaps:
        pts = ov.map.source.grid(resolution).valid_points()
        resid, g = overlap_residual(structure, ov, pts)
        name = f"overlap[{structure.charts[ov.source].name}->{structure.charts[ov.target].name}]"
        rep = report(name, resid, pts, tol, detail=f"min|g|={np.min(g):.3g}")
        if not np.all(g > 0):
            rep.passed = False
        reports.append(rep)
    return reports


# ---------------------------------------------------------------------------
# stability and type-change locus


@dataclass
class LocusResult:
    stable: bool
    curves: list                 # per curve: (chart index, array of zero points)
    min_dnorm: float
    min_complex_coord: float
    detail: str = ""
    zeros_per_chart: dict = field(default_factory=dict)

    @property
    def n_curves(self):
        return len(self.curves)


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def _face_windings(rho0, mask, periodic):
    """Winding numbers of rho0 around every grid face, per axis pair."""
    out = []
    n = rho0.shape
    ok_node = mask & (np.abs(rho0) > 0)
    arg = np.angle(rho0)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        def shift(x, ax):
            return np.roll(x, -1, axis=ax)

        c00, c10 = arg, shift(arg, a)
        c11, c01 = shift(c10, b), shift(arg, b)
        w = (_wrap(c10 - c00) + _wrap(c11 - c10) + _wrap(c01 - c11) + _wrap(c00 - c01)) / (2 * np.pi)
        ok = ok_node & shift(ok_node, a) & shift(ok_node, b) & shift(shift(ok_node, a), b)
        for ax in (a, b):
            if not periodic[ax]:
                sl = [slice(None)] * 3
                sl[ax] = n[ax] - 1
                ok[tuple(sl)] = False
        out.append(((a, b), np.where(ok, np.rint(w).astype(int), 0)))
    return out


def _refine_face_zeros(field, grid, faces):
    """Newton iteration for rho_0 = 0 inside each pierced face (2D, complex)."""
    base, a_ax, b_ax = faces
    if len(base) == 0:
        return np.zeros((0, 3)), np.zeros(0, dtype=bool)
    u0 = np.stack([grid.params[k][base[:, k]] for k in range(3)], axis=-1)
    ha = np.zeros((len(base), 3))
    hb = np.zeros((len(base), 3))
    ha[np.arange(len(base)), a_ax] = [grid.spacing[k] for k in a_ax]
    hb[np.arange(len(base)), b_ax] = [grid.spacing[k] for k in b_ax]

    def F(st):
        u = u0 + st[:, :1] * ha + st[:, 1:] * hb
        return field(grid.to_chart(u)).c[..., 0]

    st = np.full((len(base), 2), 0.5)
    eps = 1e-6
    for _ in range(40):
        f0 = F(st)
        fs = (F(st + [eps, 0]) - F(st - [eps, 0])) / (2 * eps)
        ft = (F(st + [0, eps]) - F(st - [0, eps])) / (2 * eps)
        J = np.stack([np.stack([fs.real, ft.real], -1), np.stack([fs.imag, ft.imag], -1)], -2)
        rhs = -np.stack([f0.real, f0.imag], -1)
        det = np.linalg.det(J)
        good = np.abs(det) > 1e-300
        delta = np.zeros_like(st)
        delta[good] = np.linalg.solve(J[good], rhs[good][..., None])[..., 0]
        st = st + np.clip(delta, -1.0, 1.0)
        if np.max(np.abs(delta)) < 1e-15:
            break
    u = u0 + st[:, :1] * ha + st[:, 1:] * hb
    val = np.abs(F(st))
    scale = field(grid.to_chart(u)).norm()
    inside = np.all((st > -0.25) & (st < 1.25), axis=-1) & (val < 1e-10 * np.maximum(scale, 1e-300))
    return grid.to_chart(u), inside


def _label_cells(cells, shape, periodic):
    """26-connected components of marked cells, merged across periodic axes."""
    marked = np.zeros(shape, dtype=bool)
    if len(cells):
        marked[tuple(cells.T)] = True
    labels, n = ndimage.label(marked, structure=np.ones((3, 3, 3)))
    parent = list(range(n + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for ax in range(3):
        if not periodic[ax]:
            continue
        first = np.take(labels, 0, axis=ax)
        last = np.take(labels, shape[ax] - 1, axis=ax)
        # 26-adjacency across the seam: compare with in-plane shifts
        for d1 in (-1, 0, 1):
            for d2 in (-1, 0, 1):
                shifted = np.roll(np.roll(last, d1, axis=0), d2, axis=1)
                both = (first > 0) & (shifted > 0)
                for i, j in zip(first[both], shifted[both]):
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[ri] = rj
    roots = np.array([find(i) for i in range(n + 1)])
    return roots[labels], sorted(set(roots[1:].tolist()))


def locate_chart_zeros(field: FormField, grid, tol: Tolerances = DEFAULT_TOL, step=None):
    """Zeros of rho_0 on one chart grid, grouped into curves.

    Returns:
        dict with ``zeros`` (K, 3), ``curve`` (K,) labels, ``dnorm`` and
        ``complex_coord`` per zero, and ``degenerate`` grid points where
        rho_0 vanishes to working precision.
    """
    pts = grid.points
    rho = field(np.where(grid.mask[..., None], pts, pts[grid.mask][0]))
    rho0 = np.where(grid.mask, rho.c[..., 0], 0)
    tiny = np.abs(rho0) <= tol.type_cut * rho.norm()
    degenerate = grid.mask & tiny

    bases, a_list, b_list = [], [], []
    cell_marks = []
    for (a, b), w in _face_windings(rho0, grid.mask, grid.periodic):
        idx = np.argwhere(w != 0)
        if len(idx) == 0:
            continue
        bases.append(idx)
        a_list.append(np.full(len(idx), a))
        b_list.append(np.full(len(idx), b))
        c = 3 - a - b
        cell_marks.append(idx)
        other = idx.copy()
        other[:, c] -= 1
        if grid.periodic[c]:
            other[:, c] %= grid.shape[c]
        cell_marks.append(other[other[:, c] >= 0])
    if bases:
        base = np.concatenate(bases)
        a_ax = np.concatenate(a_list)
        b_ax = np.concatenate(b_list)
        cells = np.concatenate(cell_marks)
    else:
        base = np.zeros((0, 3), dtype=int)
        a_ax = b_ax = np.zeros(0, dtype=int)
        cells = np.zeros((0, 3), dtype=int)

    zeros, inside = _refine_face_zeros(field, grid, (base, a_ax, b_ax))
    labels, roots = _label_cells(cells, grid.shape, grid.periodic)
    curve = labels[tuple(base.T)] if len(base) else np.zeros(0, dtype=int)
    zeros, curve = zeros[inside], curve[inside]
    # map labels to 0..n-1
    lut = {r: i for i, r in enumerate(sorted(set(curve.tolist())))}
    curve = np.array([lut[c] for c in curve.tolist()], dtype=int)

    if len(zeros):
        d0 = calc.ext_d(field, zeros, step).part(1)
        dnorm = d0.norm()
        re = MixedForm(d0.c.real)
        im = MixedForm(d0.c.imag)
        cc = cl.wedge(re, im).norm()
    else:
        dnorm = cc = np.zeros(0)
    return {"zeros": zeros, "curve": curve, "n_curves": len(lut), "dnorm": dnorm,
            "complex_coord": cc, "degenerate": grid.points[degenerate]}


def check_stable_and_locus(structure: SpinorStructure, resolution=None,
                           tol: Tolerances = DEFAULT_TOL, step=None, check_preconditions=True):
    """Stability (transversal vanishing of rho_0) and the type-change locus.

    Zeros are detected as faces of the grid around which rho_0 winds,
    refined by Newton iteration in the face plane, then tested for
    ``|d rho_0| > tol.transversality`` and
    ``|Re d rho_0 ^ Im d rho_0| > tol.complex_coord``.  Curves found in
    several charts are identified through the overlap maps.
    """
    per_chart = {}
    problems = []
    for ci, chart in enumerate(structure.charts):
        grid = chart.domain.grid(resolution)
        if check_preconditions:
            rho = chart.field(grid.valid_points())
            pure, _ = check_pure(rho, tol.rank)
            real, _ = check_real_index_zero(rho, tol.real_index)
            if not (pure.all() and real.all()):
                problems.append(f"{chart.name}: purity/real-index precondition failed")
        per_chart[ci] = locate_chart_zeros(chart.field, grid, tol, step)

    # union-find over (chart, curve)
    keys = [(ci, k) for ci, info in per_chart.items() for k in range(info["n_curves"])]
    parent = {k: k for k in keys}

    def find(k):
        while parent[k] != k:
            k = parent[k]
        return k

    for ov in structure.overlaps:
        src, tgt = per_chart[ov.source], per_chart[ov.target]
        if not len(src["zeros"]) or not len(tgt["zeros"]):
            continue
        inside = ov.map.source.contains(src["zeros"])
        if not inside.any():
            continue
        mapped = ov.map(src["zeros"][inside])
        cell = max(structure.charts[ov.target].domain.grid(resolution).spacing)
        for p, c in zip(mapped, src["curve"][inside]):
            dist = np.linalg.norm(tgt["zeros"] - p, axis=-1)
            j = int(np.argmin(dist))
            if dist[j] < 3 * cell:
                a, b = find((ov.source, int(c))), find((ov.target, int(tgt["curve"][j])))
                if a != b:
                    parent[a] = b

    groups = {}
    for k in keys:
        groups.setdefault(find(k), []).append(k)
    curves = []
    for members in groups.values():
        ci, k = members[0]
        info = per_chart[ci]
        curves.append((ci, info["zeros"][info["curve"] == k]))

    dn = np.concatenate([info["dnorm"] for info in per_chart.values()] + [np.zeros(0)])
    cc = np.concatenate([info["complex_coord"] for info in per_chart.values()] + [np.zeros(0)])
    n_degenerate = sum(len(info["degenerate"]) for info in per_chart.values())
    min_dn = float(dn.min()) if dn.size else np.inf
    min_cc = float(cc.min()) if cc.size else np.inf
    if n_degenerate:
        problems.append(f"non-stable degeneration: rho_0 vanishes at {n_degenerate} grid points")
    if dn.size and (min_dn <= tol.transversality or min_cc <= tol.complex_coord):
        problems.append("non-stable degeneration: zero of rho_0 is not transversal")
    return LocusResult(not problems, curves, min_dn, min_cc, "; ".join(problems), per_chart)


# ---------------------------------------------------------------------------
# chart suite


def verify_chart(chart: Chart, resolution=None, tol: Tolerances = DEFAULT_TOL, step=None,
                 richardson=False, witness: Optional[Callable] = None):
    """Run purity, real index, integrability and the explicit conditions on a chart.

    Twisted charts (with ``chart.twist``) are checked for twisted
    integrability and for the algebraic conditions only.  ``witness``
    optionally supplies an expected witness field ``points -> GenVector``.
    """
    pts = chart.domain.grid(resolution).valid_points()
    rho = chart.field(pts)
    tag = chart.name
    out = []

    nz = rho.norm() > 0
    if not nz.all():
        raise ValueError(f"{tag}: spinor vanishes at a grid point")
    svd = clifford_svd(rho)
    s = svd[1]
    kdim = 7 - np.sum(s > tol.rank * s[..., :1], axis=-1)
    out.append(report(f"{tag}:pure", np.abs(kdim - 3).astype(float), pts, 0.5,
                      detail=f"kernel dims {sorted(set(kdim.tolist()))}"))
    real, val = check_real_index_zero(rho, tol.real_index)
    out.append(report(f"{tag}:real-index", val / rho.norm() ** 2, pts, tol.real_index, lower_bound=True))

    # twisted charts carry steep cutoffs; fourth-order differences keep FD error below tolerance
    rich = richardson or chart.twist is not None
    v, resid = find_integrability_witness(chart.field, pts, chart.twist, step, rich, tol.rank, svd)
    out.append(report(f"{tag}:{'twisted-' if chart.twist else ''}integrable", resid, pts,
                      tol.integrability))
    if witness is not None:
        dist = witness_distance(v, witness(pts), rho, tol.rank)
        out.append(report(f"{tag}:witness", dist, pts, tol.integrability))

    out.extend(check_b3_explicit(chart.field, pts, tol.b3, tol.b3_nondegenerate, step,
                                 differential=chart.twist is None, prefix=f"{tag}:b3-explicit"))
    if chart.twist is None:
        far = np.abs(rho.c[..., 0]) > tol.min_rho0
        if far.any():
            out.append(normalize_check_closed(chart.field, pts[far], tol.closed, step,
                                              min_rho0=tol.min_rho0, name=f"{tag}:normalized-closed"))
    return out


def verify_structure(structure: SpinorStructure, resolution=None, tol: Tolerances = DEFAULT_TOL,
                     step=None, richardson=False, witnesses=None):
    reports = []
    witnesses = witnesses or {}
    for ci, chart in enumerate(structure.charts):
        reports.extend(verify_chart(chart, resolution, tol, step, richardson, witnesses.get(ci)))
    reports.extend(check_overlaps(structure, resolution, tol.overlap))
    return reports
