"""Charts, form fields, finite-difference exterior derivative, pullback, quadrature.

Chart coordinates are always three Cartesian-style numbers ``(x, y, t)``.
Disk and annulus charts keep Cartesian ``(x, y)`` so that polar expressions
are only ever evaluated away from the origin; quadrature over them runs in
polar parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from b3gc import clifford as cl
from b3gc.clifford import MixedForm

TWO_PI = 2.0 * np.pi
DEFAULT_REL_STEP = 1e-4
CHECK_RESOLUTION = 32
QUAD_RESOLUTION = 128

KINDS = ("box", "disk-circle", "annulus-circle", "boundary-torus", "circle")


@dataclass(frozen=True)
class Grid:
    """Structured sample grid over a chart domain.

    ``params`` are the per-axis parameter arrays; ``points`` the chart
    coordinates of every node, shape ``(n1, n2, n3, 3)``; ``mask`` flags
    nodes inside the domain.  ``to_chart`` maps parameter triples to the
    chart.
    """

    params: tuple
    points: np.ndarray
    mask: np.ndarray
    periodic: tuple
    spacing: tuple
    to_chart: Callable[[np.ndarray], np.ndarray]

    @property
    def shape(self):
        return self.mask.shape

    def valid_points(self):
        return self.points[self.mask]

    def indices(self):
        return np.argwhere(self.mask)


@dataclass(frozen=True)
class ChartDomain:
    """Parameter domain of a chart.

    Use the constructors :meth:`box`, :meth:`disk_circle`,
    :meth:`annulus_circle`, :meth:`boundary_torus` and :meth:`circle`.
    """

    kind: str
    ranges: tuple = ((0.0, TWO_PI),) * 3
    periodic: tuple = (True, True, True)
    inner: float = 0.0
    outer: float = 0.0
    fixed: tuple = (0.0, 0.0)
    resolution: tuple = (CHECK_RESOLUTION,) * 3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        for (lo, hi), per in zip(self.ranges, self.periodic):
            if hi <= lo:
                raise ValueError("empty coordinate range")
            if per and not (np.isclose(lo, 0.0) and np.isclose(hi, TWO_PI)):
                raise ValueError("periodic coordinates must range over [0, 2pi)")
        if self.kind == "annulus-circle" and not self.outer > self.inner > 0:
            raise ValueError("annulus radii must satisfy outer > inner > 0")
        if self.kind in ("disk-circle", "boundary-torus") and not self.outer > 0:
            raise ValueError("radius must be positive")
        if min(self.resolution) < 2:
            raise ValueError("resolution must be at least 2 per axis")

    # constructors -------------------------------------------------------
    @classmethod
    def box(cls, ranges, periodic=(False, False, True), resolution=CHECK_RESOLUTION):
        return cls("box", tuple(tuple(map(float, r)) for r in ranges), tuple(periodic),
                   resolution=_res(resolution, 3))

    @classmethod
    def disk_circle(cls, radius, resolution=CHECK_RESOLUTION):
        R = float(radius)
        return cls("disk-circle", ((-R, R), (-R, R), (0.0, TWO_PI)), (False, False, True),
                   outer=R, resolution=_res(resolution, 3))

    @classmethod
    def annulus_circle(cls, inner, outer, resolution=CHECK_RESOLUTION):
        R = float(outer)
        return cls("annulus-circle", ((-R, R), (-R, R), (0.0, TWO_PI)), (False, False, True),
                   inner=float(inner), outer=R, resolution=_res(resolution, 3))

    @classmethod
    def boundary_torus(cls, radius, resolution=CHECK_RESOLUTION):
        """Torus ``|(x, y)| = radius`` of a disk or annulus chart, parametrized by (angle, t)."""
        R = float(radius)
        return cls("boundary-torus", ((-R, R), (-R, R), (0.0, TWO_PI)), (False, False, True),
                   outer=R, resolution=_res(resolution, 2))

    @classmethod
    def circle(cls, x0=0.0, y0=0.0, resolution=CHECK_RESOLUTION):
        """The fibre circle ``t -> (x0, y0, t)``."""
        return cls("circle", ((-np.inf, np.inf), (-np.inf, np.inf), (0.0, TWO_PI)),
                   (False, False, True), fixed=(float(x0), float(y0)),
                   resolution=_res(resolution, 1))

    def with_resolution(self, resolution):
        from dataclasses import replace
        return replace(self, resolution=_res(resolution, len(self.resolution)))

    # geometry -------------------------------------------------------------
    @property
    def dim(self):
        return {"boundary-torus": 2, "circle": 1}.get(self.kind, 3)

    def coordinate_ranges(self):
        return np.array(self.ranges, dtype=float)

    def default_steps(self, rel=DEFAULT_REL_STEP):
        r = self.coordinate_ranges()
        span = r[:, 1] - r[:, 0]
        span = np.where(np.isfinite(span), span, TWO_PI)
        return rel * span

    def contains(self, points, slack=0.0):
        p = np.asarray(points, dtype=float)
        ok = np.ones(p.shape[:-1], dtype=bool)
        for a in range(3):
            if not self.periodic[a]:
                lo, hi = self.ranges[a]
                ok &= (p[..., a] >= lo - slack) & (p[..., a] <= hi + slack)
        if self.kind in ("disk-circle", "annulus-circle"):
            r = np.hypot(p[..., 0], p[..., 1])
            ok &= r <= self.outer + slack
            if self.kind == "annulus-circle":
                ok &= r >= self.inner - slack
        return ok

    def grid(self, resolution=None) -> Grid:
        """Check grid: cell-centred on open axes, uniform from 0 on periodic ones."""
        n = _res(resolution, 3) if resolution is not None else self.resolution
        if self.kind == "box":
            axes = tuple(_axis(lo, hi, k, per) for (lo, hi), k, per in zip(self.ranges, n, self.periodic))
            pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
            mask = np.ones(pts.shape[:-1], dtype=bool)
            return Grid(axes, pts, mask, self.periodic, _spacing(axes, self.ranges, self.periodic),
                        lambda u: np.asarray(u, dtype=float))
        if self.kind == "disk-circle":
            R = self.outer
            axes = (_axis(-R, R, n[0], False), _axis(-R, R, n[1], False), _axis(0, TWO_PI, n[2], True))
            pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
            mask = np.hypot(pts[..., 0], pts[..., 1]) < R * (1 - 1e-3)
            return Grid(axes, pts, mask, (False, False, True),
                        _spacing(axes, self.ranges, self.periodic), lambda u: np.asarray(u, dtype=float))
        if self.kind == "annulus-circle":
            axes = (_axis(self.inner, self.outer, n[0], False), _axis(0, TWO_PI, n[1], True),
                    _axis(0, TWO_PI, n[2], True))
            u = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
            pts = polar_to_chart(u)
            mask = np.ones(pts.shape[:-1], dtype=bool)
            ranges = ((self.inner, self.outer), (0, TWO_PI), (0, TWO_PI))
            return Grid(axes, pts, mask, (False, True, True), _spacing(axes, ranges, (False, True, True)),
                        polar_to_chart)
        raise ValueError(f"no 3D check grid for {self.kind}")

    def quadrature(self, resolution=None):
        """Nodes, weights and parametrization jacobians, shape (N, 3, dim)."""
        n = _res(resolution, self.dim) if resolution is not None else self.resolution
        if self.kind == "box":
            axes = [_axis(lo, hi, k, per) for (lo, hi), k, per in zip(self.ranges, n, self.periodic)]
            w = [np.full(k, (hi - lo) / k) for (lo, hi), k in zip(self.ranges, n)]
            u, wt = _tensor(axes, w)
            return u, wt, np.broadcast_to(np.eye(3), u.shape[:-1] + (3, 3))
        if self.kind in ("disk-circle", "annulus-circle"):
            r0 = self.inner if self.kind == "annulus-circle" else 0.0
            axes = [_axis(r0, self.outer, n[0], False), _axis(0, TWO_PI, n[1], True),
                    _axis(0, TWO_PI, n[2], True)]
            w = [np.full(n[0], (self.outer - r0) / n[0]), np.full(n[1], TWO_PI / n[1]),
                 np.full(n[2], TWO_PI / n[2])]
            u, wt = _tensor(axes, w)
            return polar_to_chart(u), wt, polar_jacobian(u)
        if self.kind == "boundary-torus":
            R = self.outer
            axes = [_axis(0, TWO_PI, n[0], True), _axis(0, TWO_PI, n[1], True)]
            w = [np.full(k, TWO_PI / k) for k in n]
            u, wt = _tensor(axes, w)
            th, t = u[..., 0], u[..., 1]
            pts = np.stack([R * np.cos(th), R * np.sin(th), t], axis=-1)
            jac = np.zeros(pts.shape[:-1] + (3, 2))
            jac[..., 0, 0] = -R * np.sin(th)
            jac[..., 1, 0] = R * np.cos(th)
            jac[..., 2, 1] = 1.0
            return pts, wt, jac
        if self.kind == "circle":
            t = _axis(0, TWO_PI, n[0], True)
            pts = np.stack([np.full_like(t, self.fixed[0]), np.full_like(t, self.fixed[1]), t], axis=-1)
            jac = np.zeros(t.shape + (3, 1))
            jac[..., 2, 0] = 1.0
            return pts, np.full(t.shape, TWO_PI / n[0]), jac
        raise ValueError(self.kind)


def _res(resolution, k):
    if resolution is None:
        return (CHECK_RESOLUTION,) * k
    if np.isscalar(resolution):
        return (int(resolution),) * k
    resolution = tuple(int(r) for r in resolution)
    if len(resolution) != k:
        raise ValueError(f"expected {k} resolutions, got {resolution}")
    return resolution


def _axis(lo, hi, n, periodic):
    h = (hi - lo) / n
    return lo + h * np.arange(n) if periodic else lo + h * (np.arange(n) + 0.5)


def _spacing(axes, ranges, periodic):
    return tuple((hi - lo) / len(ax) for ax, (lo, hi) in zip(axes, ranges))


def _tensor(axes, weights):
    u = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    w = np.ones(1)
    for wk in weights:
        w = np.multiply.outer(w, wk)
    return u, w.reshape(-1)


def polar_to_chart(u):
    u = np.asarray(u, dtype=float)
    r, th, t = u[..., 0], u[..., 1], u[..., 2]
    return np.stack([r * np.cos(th), r * np.sin(th), t], axis=-1)


def polar_jacobian(u):
    r, th = u[..., 0], u[..., 1]
    jac = np.zeros(u.shape[:-1] + (3, 3))
    jac[..., 0, 0] = np.cos(th)
    jac[..., 0, 1] = -r * np.sin(th)
    jac[..., 1, 0] = np.sin(th)
    jac[..., 1, 1] = r * np.cos(th)
    jac[..., 2, 2] = 1.0
    return jac


# ---------------------------------------------------------------------------
# fields and maps


@dataclass(frozen=True)
class FormField:
    """Smooth mixed-form field given by a closed-form evaluator.

    ``func`` maps chart points of shape ``(..., 3)`` to a MixedForm of batch
    shape ``(...)``.
    """

    domain: ChartDomain
    func: Callable[[np.ndarray], MixedForm]
    name: str = ""

    def __call__(self, points) -> MixedForm:
        return cl.as_form(self.func(np.asarray(points, dtype=float)))

    def map(self, fn, name=None):
        """Pointwise post-composition ``p -> fn(self(p), p)``."""
        return FormField(self.domain, lambda p: fn(self(p), p), name or self.name)


def combine(domain, fn, *fields, name=""):
    """Field ``p -> fn(f1(p), f2(p), ..., p)``."""
    return FormField(domain, lambda p: fn(*(f(p) for f in fields), p), name)


@dataclass(frozen=True)
class ChartMap:
    """Smooth map between chart domains with optional analytic jacobian.

    ``jac(points)`` returns ``J[..., i, j] = d y_i / d x_j``.
    """

    source: ChartDomain
    target: ChartDomain
    func: Callable[[np.ndarray], np.ndarray]
    jac: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, points):
        return self.func(np.asarray(points, dtype=float))

    def jacobian(self, points, step=None, use_analytic=True):
        points = np.asarray(points, dtype=float)
        if use_analytic and self.jac is not None:
            return self.jac(points)
        return fd_jacobian(self, points, step)


def fd_jacobian(phi: ChartMap, points, step=None):
    """Central-difference jacobian; periodic target axes are unwrapped."""
    steps = phi.source.default_steps() if step is None else np.broadcast_to(step, (3,))
    cols = []
    for a in range(3):
        e = np.zeros(3)
        e[a] = steps[a]
        diff = phi(points + e) - phi(points - e)
        for i in range(3):
            if phi.target.periodic[i]:
                diff[..., i] = (diff[..., i] + np.pi) % TWO_PI - np.pi
        cols.append(diff / (2 * steps[a]))
    return np.stack(cols, axis=-1)


def identity_map(domain):
    return ChartMap(domain, domain, lambda p: p, lambda p: np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3)),
                    lambda p: p, "identity")


# ---------------------------------------------------------------------------
# exterior derivative


def partial(field: FormField, points, axis, step=None, richardson=False, check_domain=True):
    """Central difference of every coefficient along one chart axis."""
    points = np.asarray(points, dtype=float)
    h = (field.domain.default_steps()[axis] if step is None else float(step))

    def central(hh):
        e = np.zeros(3)
        e[axis] = hh
        plus, minus = points + e, points - e
        if check_domain and not field.domain.periodic[axis]:
            if not (np.all(field.domain.contains(plus)) and np.all(field.domain.contains(minus))):
                raise ValueError("finite-difference stencil leaves the chart domain")
        return (field(plus).c - field(minus).c) / (2 * hh)

    if richardson:
        return (4 * central(h / 2) - central(h)) / 3
    return central(h)


def ext_d(field: FormField, points, step=None, richardson=False, check_domain=True) -> MixedForm:
    """Exterior derivative d(rho) = sum_a dx^a ^ d_a rho at the given points.

    Args:
        field: the form field.
        points: chart points, shape (..., 3).
        step: absolute FD step for all axes; default is 1e-4 of each
            coordinate range.
        richardson: combine steps h and h/2 for fourth-order accuracy.
    """
    out = 0
    for a in range(3):
        da = partial(field, points, a, step, richardson, check_domain)
        out = out + da @ cl.EPS[a].T
    return MixedForm(out)


def d_field(field: FormField, step=None, richardson=False, name=None) -> FormField:
    """Lazy field of ``ext_d(field)``."""
    return FormField(field.domain, lambda p: ext_d(field, p, step, richardson),
                     name or f"d({field.name})")


# ---------------------------------------------------------------------------
# pullback

_BLADES_BY_DEGREE = {k: [i for i, b in enumerate(cl.BLADES) if len(b) == k] for k in range(4)}


def pullback_matrix(J):
    """Matrix P with ``(phi^* rho).c = P @ rho.c`` for jacobian J (..., 3, 3).

    The pullback of dy^I is sum_K det(J[I, K]) dx^K.
    """
    J = np.asarray(J, dtype=float)
    P = np.zeros(J.shape[:-2] + (8, 8))
    P[..., 0, 0] = 1.0
    for k in (1, 2, 3):
        for i in _BLADES_BY_DEGREE[k]:
            I = list(cl.BLADES[i])
            for m in _BLADES_BY_DEGREE[k]:
                K = list(cl.BLADES[m])
                P[..., m, i] = _det(J[..., I, :][..., :, K])
    return P


def _det(M):
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0]
    if n == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    return np.linalg.det(M)


def pullback(phi: ChartMap, field: FormField, use_analytic=True, step=None) -> FormField:
    """Pull ``field`` back along ``phi``; the result lives on ``phi.source``."""

    def func(p):
        q = phi(p)
        if not np.all(field.domain.contains(q, slack=1e-9)):
            raise ValueError("chart map leaves the target domain")
        P = pullback_matrix(phi.jacobian(p, step=step, use_analytic=use_analytic))
        return MixedForm(np.einsum("...ij,...j->...i", P, field(q).c))

    return FormField(phi.source, func, f"pullback({field.name})")


def pullback_form(J, rho) -> MixedForm:
    """Pointwise pullback of a MixedForm by a jacobian (no composition)."""
    return MixedForm(np.einsum("...ij,...j->...i", pullback_matrix(J), cl.as_form(rho).c))


# ---------------------------------------------------------------------------
# quadrature


def integrate(field: FormField, domain: ChartDomain, resolution=None, degree_check=True):
    """Integral of the degree-``dim`` part of ``field`` over ``domain``.

    Periodic axes use the trapezoid rule (spectrally accurate for smooth
    periodic integrands), open axes the composite midpoint rule.
    """
    k = domain.dim
    pts, wts, jac = domain.quadrature(resolution)
    rho = field(pts)
    if degree_check:
        other = np.abs(rho.c[..., cl.DEGREE != k])
        if other.size and np.max(other) > 0:
            raise ValueError(f"field has components outside degree {k}")
    total = 0.0
    for i in _BLADES_BY_DEGREE[k]:
        I = list(cl.BLADES[i])
        total = total + rho.c[..., i] * _det(jac[..., I, :])
    return complex(np.sum(wts * total))
