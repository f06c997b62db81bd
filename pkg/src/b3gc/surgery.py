"""Surgery along a cosymplectic neighbourhood.

A neighbourhood ``D_a x S^1`` of a circle, with coordinates ``(x, y, t)``
and ``s = |(x, y)|``, carries the cosymplectic model spinor.  The ring
``b < s < a`` is glued to a solid torus with Cartesian coordinates
``(x, y, sigma)``, ``r = |(x, y)|`` and polar angle ``theta``, via

    (r, theta, sigma) -> (s, phi, t) = (sqrt(2 log r), p theta - q sigma, q theta).

``sigma`` here is the solid-torus angle coordinate (unrelated to the
cosymplectic 1-form).  On the overlap the solid-torus spinor satisfies
``z e^A e^B Psi^* rho_M = rho_T`` with ``A = cq dlog r`` and
``B = q dtheta ^ dsigma``.  Splitting ``A`` and ``B`` with radial cutoffs
gives twisted spinors on both pieces whose twist ``(F, H)`` is global.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from b3gc import calculus as calc
from b3gc import clifford as cl
from b3gc import structure as st
from b3gc.calculus import TWO_PI, ChartDomain, ChartMap, FormField
from b3gc.clifford import MixedForm
from b3gc.structure import Chart, CheckReport, Overlap, SpinorStructure, Tolerances, TwistData

CHI_WINDOW = (0.2, 0.5)       # fractions of the overlap width in r
CHI2_WINDOW = (0.5, 0.8)
MIN_MARGIN_CELLS = 5


# ---------------------------------------------------------------------------
# smooth profiles


def _f(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smoothstep(u):
    """C-infinity step, 0 for u <= 0 and 1 for u >= 1."""
    a, b = _f(u), _f(1.0 - np.asarray(u, dtype=float))
    return a / (a + b)


def smoothstep_deriv(u):
    u = np.asarray(u, dtype=float)
    a, b = _f(u), _f(1.0 - u)
    da = np.where(u > 0, a / np.where(u > 0, u, 1.0) ** 2, 0.0)
    db = np.where(u < 1, b / np.where(u < 1, 1.0 - u, 1.0) ** 2, 0.0)
    return (da * b + a * db) / (a + b) ** 2


@dataclass(frozen=True)
class SurgeryData:
    """Parameters of one surgery.

    Attributes:
        a, b: outer and inner radius of the ring in the neighbourhood model.
        c: period parameter of the cosymplectic 1-form (nonzero).
        p: integer framing parameter; q: +1 or -1.
        center: position of the neighbourhood in the base chart.
        beta_plateaus: (x0, x1) as fractions of ``e^(b^2)``.
    """

    p: int = 0
    q: int = 1
    c: float = 1.0
    a: float = 1.2
    b: float = 0.8
    center: tuple = (0.0, 0.0)
    beta_plateaus: tuple = (0.3, 0.7)

    def __post_init__(self):
        if not self.a > self.b > 0:
            raise ValueError("need a > b > 0")
        if self.q not in (1, -1):
            raise ValueError("q must be +1 or -1")
        if int(self.p) != self.p:
            raise ValueError("p must be an integer")
        if self.c == 0 or not np.isfinite(self.c):
            raise ValueError("c must be a nonzero real number")
        lo, hi = self.beta_plateaus
        if not 0 < lo < hi < 1:
            raise ValueError("beta plateaus must satisfy 0 < x0 < x1 < 1")

    # radii ------------------------------------------------------------------
    @property
    def r_in(self):
        return float(np.exp(self.b ** 2 / 2))

    @property
    def r_out(self):
        return float(np.exp(self.a ** 2 / 2))

    @property
    def x0(self):
        return self.beta_plateaus[0] * np.exp(self.b ** 2)

    @property
    def x1(self):
        return self.beta_plateaus[1] * np.exp(self.b ** 2)

    # profiles ---------------------------------------------------------------
    def beta(self, x):
        """Bump in ``x = r^2``: 0 on [0, x0], 1 from x1 on."""
        return smoothstep((np.asarray(x) - self.x0) / (self.x1 - self.x0))

    def _window(self, r, window):
        w = self.r_out - self.r_in
        lo, hi = self.r_in + window[0] * w, self.r_in + window[1] * w
        return (np.asarray(r) - lo) / (hi - lo), hi - lo

    def chi(self, r):
        """Cutoff for A: 0 near the inner edge of the overlap, 1 near the outer edge."""
        return smoothstep(self._window(r, CHI_WINDOW)[0])

    def chi2(self, r):
        """Cutoff for B, analogous to :meth:`chi`."""
        return smoothstep(self._window(r, CHI2_WINDOW)[0])

    def chi2_deriv(self, r):
        u, width = self._window(r, CHI2_WINDOW)
        return smoothstep_deriv(u) / width

    def margin_cells(self, resolution):
        """Smallest plateau margin of the cutoffs, in radial cells of the overlap grid."""
        n = resolution if np.isscalar(resolution) else resolution[0]
        return min(CHI_WINDOW[0], 1 - CHI2_WINDOW[1]) * n

    def ring_domain(self, resolution=None):
        return ChartDomain.annulus_circle(self.b, self.a, resolution or calc.CHECK_RESOLUTION)

    def overlap_domain(self, resolution=None):
        """The overlap annulus in solid-torus coordinates."""
        return ChartDomain.annulus_circle(self.r_in, self.r_out, resolution or calc.CHECK_RESOLUTION)

    def torus_domain(self, resolution=None):
        return ChartDomain.disk_circle(self.r_out, resolution or calc.CHECK_RESOLUTION)


# ---------------------------------------------------------------------------
# model spinors


def cosymplectic_model(a=1.2, c=1.0, domain: Optional[ChartDomain] = None):
    """``1 + i c dt + i dx^dy - c dt^dx^dy`` on ``D_a x S^1`` (or ``domain``)."""
    if not a > 0:
        raise ValueError("radius must be positive")
    if c == 0:
        raise ValueError("c must be nonzero")
    dom = domain or ChartDomain.disk_circle(a)

    def func(p):
        shape = p.shape[:-1]
        return MixedForm.from_terms({"": 1.0, "3": 1j * c, "12": 1j, "123": -c}, shape=shape)

    return FormField(dom, func, f"cosymplectic(c={c:g})")


def _polar(p):
    x, y = p[..., 0], p[..., 1]
    r2 = x * x + y * y
    return x, y, r2


def build_rho_T(data: SurgeryData, domain: Optional[ChartDomain] = None):
    """``z + cq dz - i q dz^dsigma + i beta(r^2)(p - c^2) dz^dtheta`` on the solid torus.

    ``dz ^ dtheta = dx ^ dy / conj(z)``; the beta factor removes the
    singularity at the core.
    """
    c, q, p = data.c, data.q, data.p
    dom = domain or data.torus_domain()

    def func(pts):
        x, y, r2 = _polar(pts)
        z = x + 1j * y
        b = data.beta(r2)
        safe = np.where(r2 > 0, r2, 1.0)
        dz_dtheta = np.where(b > 0, z / safe, 0.0)
        return MixedForm.from_terms({
            "": z,
            "1": c * q,
            "2": 1j * c * q,
            "12": 1j * b * (p - c ** 2) * dz_dtheta,
            "13": -1j * q,
            "23": q * np.ones_like(x),
        }, shape=x.shape)

    return FormField(dom, func, f"rho_T(p={p},q={q},c={c:g})")


def rho_T_witness(data: SurgeryData):
    """Witness ``-i q d/dsigma`` of ``d rho_T = v . rho_T``."""

    def w(points):
        shape = np.shape(points)[:-1]
        X = np.zeros(shape + (3,), dtype=complex)
        X[..., 2] = -1j * data.q
        return cl.GenVector.make(X, np.zeros(shape), np.zeros(shape + (3,)))

    return w


# ---------------------------------------------------------------------------
# gluing map


def psi_map(data: SurgeryData, resolution=None) -> ChartMap:
    """Gluing map from the overlap annulus of the solid torus to the ring."""
    p, q = data.p, data.q
    source = data.overlap_domain(resolution)
    target = data.ring_domain(resolution)
    lo, hi = data.r_in * (1 - 1e-9), data.r_out * (1 + 1e-9)

    def func(pts):
        x, y, r2 = _polar(pts)
        r = np.sqrt(r2)
        if np.any((r < lo) | (r > hi)):
            raise ValueError("point outside the overlap annulus")
        s = np.sqrt(2 * np.log(r))
        th = np.arctan2(y, x)
        phi = p * th - q * pts[..., 2]
        t = np.mod(q * th, TWO_PI)
        return np.stack([s * np.cos(phi), s * np.sin(phi), t], axis=-1)

    def jac(pts):
        x, y, r2 = _polar(pts)
        r = np.sqrt(r2)
        s = np.sqrt(2 * np.log(r))
        th = np.arctan2(y, x)
        phi = p * th - q * pts[..., 2]
        ds = np.stack([x, y, np.zeros_like(x)], -1) / (s * r2)[..., None]
        dth = np.stack([-y, x, np.zeros_like(x)], -1) / r2[..., None]
        dsig = np.zeros_like(ds)
        dsig[..., 2] = 1.0
        dphi = p * dth - q * dsig
        J = np.empty(pts.shape[:-1] + (3, 3))
        J[..., 0, :] = np.cos(phi)[..., None] * ds - (s * np.sin(phi))[..., None] * dphi
        J[..., 1, :] = np.sin(phi)[..., None] * ds + (s * np.cos(phi))[..., None] * dphi
        J[..., 2, :] = q * dth
        return J

    def inverse(pts):
        X, Y, t = pts[..., 0], pts[..., 1], pts[..., 2]
        s2 = X * X + Y * Y
        phi = np.arctan2(Y, X)
        r = np.exp(s2 / 2)
        th = q * t
        sig = np.mod(p * t - q * phi, TWO_PI)
        return np.stack([r * np.cos(th), r * np.sin(th), sig], axis=-1)

    return ChartMap(source, target, func, jac, inverse, f"Psi(p={p},q={q})")


def _radial_factor(coef, r2, scale):
    """``coef * scale(r) / r^2``, set to 0 where the cutoff vanishes (the core)."""
    safe = np.where(r2 > 0, r2, 1.0)
    if scale is None:
        return coef / safe
    return np.where(r2 > 0, coef * scale(np.sqrt(r2)) / safe, 0.0)


def field_A(data: SurgeryData, domain, scale=None):
    """``scale(r) * cq dlog r`` in solid-torus coordinates."""
    cq = data.c * data.q

    def func(p):
        x, y, r2 = _polar(p)
        k = _radial_factor(cq, r2, scale)
        return MixedForm.from_terms({"1": k * x, "2": k * y}, shape=x.shape)

    return FormField(domain, func, "A")


def field_B(data: SurgeryData, domain, scale=None, factor=1.0):
    """``factor * scale(r) * q dtheta ^ dsigma`` in solid-torus coordinates."""
    q = data.q * factor

    def func(p):
        x, y, r2 = _polar(p)
        k = _radial_factor(q, r2, scale)
        return MixedForm.from_terms({"13": -k * y, "23": k * x}, shape=x.shape)

    return FormField(domain, func, "B")


def field_A_ring(data: SurgeryData, domain, scale=None):
    """``A = cq dlog r = cq (x dx + y dy)`` in ring coordinates, ``r = e^(s^2/2)``."""
    cq = data.c * data.q

    def func(p):
        x, y, s2 = _polar(p)
        k = cq * (1.0 if scale is None else scale(np.exp(s2 / 2)))
        return MixedForm.from_terms({"1": k * x, "2": k * y}, shape=x.shape)

    return FormField(domain, func, "A_ring")


def field_B_ring(data: SurgeryData, domain, scale=None):
    """``B = q dphi ^ dt`` in ring coordinates."""
    q = data.q

    def func(p):
        x, y, s2 = _polar(p)
        k = q / s2 * (1.0 if scale is None else scale(np.exp(s2 / 2)))
        return MixedForm.from_terms({"13": -k * y, "23": k * x}, shape=x.shape)

    return FormField(domain, func, "B_ring")


def glue_lhs(data: SurgeryData, rho_M: FormField, B_factor=1.0, use_analytic=True, step=None,
             resolution=None):
    """Field ``z e^A e^B Psi^* rho_M`` over the overlap annulus."""
    psi = psi_map(data, resolution)
    pulled = calc.pullback(psi, rho_M, use_analytic=use_analytic, step=step)
    A = field_A(data, psi.source)
    B = field_B(data, psi.source, factor=B_factor)

    def func(p):
        z = p[..., 0] + 1j * p[..., 1]
        return cl.apply_A(A(p), cl.apply_B(B(p), pulled(p))) * z

    return FormField(psi.source, func, "z e^A e^B Psi^* rho_M")


def verify_glue(data: SurgeryData, rho_M: Optional[FormField] = None, resolution=32,
                tol=1e-6, B_factor=1.0, use_analytic=True, step=None) -> CheckReport:
    """Relative residual of ``z e^A e^B Psi^* rho_M = rho_T`` on the overlap grid."""
    if rho_M is None:
        rho_M = cosymplectic_model(data.a, data.c, data.ring_domain(resolution))
    lhs = glue_lhs(data, rho_M, B_factor, use_analytic, step, resolution)
    rho_T = build_rho_T(data)
    pts = data.overlap_domain(resolution).grid().valid_points()
    target = rho_T(pts)
    resid = (lhs(pts) - target).norm() / target.norm()
    return st.report(f"glue(p={data.p},q={data.q},c={data.c:g})", resid, pts, tol)


# ---------------------------------------------------------------------------
# twisting split


@dataclass
class GluedStructure:
    """Twisted spinors on the ring and on the solid torus with global (F, H).

    Chart 0 is the ring ``b < s < a`` of the neighbourhood model, chart 1
    the solid torus.  ``assembled`` holds ``F = -dA_piece`` and
    ``H = -dC_piece - dA_piece ^ A_piece`` obtained by finite differences;
    the charts carry the closed form of the same twist, and
    :func:`twist_checks` compares the two.  Cutoffs: ``A_M = (1 - chi) A``, ``A_T = -chi A``,
    ``C_M = (1 - chi2)(B - A_T^A_M)``, ``C_T = -chi2 (B - A_T^A_M)``, so that
    ``A = A_M - A_T`` and ``B - A_T^A_M = C_M - C_T`` on the overlap and each
    piece extends by zero.
    """

    data: SurgeryData
    structure: SpinorStructure
    untwisted: SpinorStructure
    fields: dict
    assembled: dict
    checks: list = field(default_factory=list)
    resolution: int = 32

    @property
    def twist_ring(self):
        """(F, H) assembled by differencing the split fields on the ring."""
        return self.assembled["ring"]

    @property
    def twist_torus(self):
        return self.assembled["torus"]


def split_twist(data: SurgeryData, resolution=32, tol: Tolerances = st.DEFAULT_TOL,
                step=None, run_checks=True, check_resolution=32) -> GluedStructure:
    """Split the gluing fields with cutoffs and assemble the twisted atlas.

    ``check_resolution`` sets the grid for the (F, H) consistency checks,
    which involve nested differences; it is capped at ``resolution``.
    """
    margin = data.margin_cells(resolution)
    if margin < MIN_MARGIN_CELLS:
        raise ValueError(f"cutoff plateau margin {margin:.1f} cells < {MIN_MARGIN_CELLS}; refine the grid")
    ring = data.ring_domain(resolution)
    torus = data.torus_domain(resolution)
    psi = psi_map(data, resolution)
    rho_M = cosymplectic_model(data.a, data.c, ring)
    rho_T = build_rho_T(data, torus)

    one_minus_chi = lambda r: 1.0 - data.chi(r)  # noqa: E731
    neg_chi = lambda r: -data.chi(r)  # noqa: E731
    A_M = field_A_ring(data, ring, one_minus_chi)
    A_T = field_A(data, torus, neg_chi)
    A_T_ring = field_A_ring(data, ring, neg_chi)
    A_M_torus = field_A(data, torus, one_minus_chi)

    def C_M_func(p):
        Bp = field_B_ring(data, ring)(p) - cl.wedge(A_T_ring(p), A_M(p))
        return Bp * (1.0 - data.chi2(np.exp(np.sum(p[..., :2] ** 2, -1) / 2)))

    def C_T_func(p):
        Bp = field_B(data, torus)(p) - cl.wedge(A_T(p), A_M_torus(p))
        return Bp * (-data.chi2(np.hypot(p[..., 0], p[..., 1])))

    C_M = FormField(ring, C_M_func, "C_M")
    C_T = FormField(torus, C_T_func, "C_T")

    def twist_for(A_piece, C_piece, dom):
        dA = calc.d_field(A_piece, step, richardson=True)
        dC = calc.d_field(C_piece, step, richardson=True)
        F = FormField(dom, lambda p: -dA(p), "F")
        H = FormField(dom, lambda p: -dC(p) - cl.wedge(dA(p), A_piece(p)), "H")
        return TwistData(F, H)

    assembled = {"ring": twist_for(A_M, C_M, ring), "torus": twist_for(A_T, C_T, torus)}
    # closed forms of the same twist: F = 0 and H = q chi2'(r) dr^dtheta^dsigma
    zero = lambda p: MixedForm.zeros(p.shape[:-1])  # noqa: E731
    tw_M = TwistData(FormField(ring, zero, "F=0"), FormField(ring, lambda p: h_closed_ring(data, p), "H"))
    tw_T = TwistData(FormField(torus, zero, "F=0"), FormField(torus, lambda p: h_closed_torus(data, p), "H"))
    rho_M_tw = FormField(ring, lambda p: cl.apply_A(A_M(p), cl.apply_B(C_M(p), rho_M(p))), "rho_M~")
    rho_T_tw = FormField(torus, lambda p: cl.apply_A(A_T(p), cl.apply_B(C_T(p), rho_T(p))), "rho_T~")

    def z_of(p):
        return p[..., 0] + 1j * p[..., 1]

    twisted = SpinorStructure(
        [Chart("ring", rho_M_tw, tw_M), Chart("torus", rho_T_tw, tw_T)],
        [Overlap(1, 0, psi, z_of)],
        f"surgery(p={data.p},q={data.q})",
    )
    untwisted = SpinorStructure(
        [Chart("ring", rho_M), Chart("torus", rho_T)],
        [Overlap(1, 0, psi, z_of)],
        f"surgery-untwisted(p={data.p},q={data.q})",
    )
    fields = {"A_M": A_M, "A_T": A_T, "C_M": C_M, "C_T": C_T, "A_M_torus": A_M_torus,
              "A": field_A(data, torus), "B": field_B(data, torus)}
    g = GluedStructure(data, twisted, untwisted, fields, assembled, resolution=resolution)
    if run_checks:
        g.checks = twist_checks(g, tol, step, min(resolution, check_resolution))
    return g


def h_closed_torus(data: SurgeryData, p):
    """``H = q chi2'(r) dr ^ dtheta ^ dsigma = q chi2'(r)/r dx^dy^dsigma``."""
    r = np.hypot(p[..., 0], p[..., 1])
    safe = np.where(r > 0, r, 1.0)
    return MixedForm.from_terms({"123": data.q * data.chi2_deriv(r) / safe}, shape=r.shape)


def h_closed_ring(data: SurgeryData, p):
    """The same 3-form in ring coordinates: ``q chi2'(r) r dx^dy^dt`` with ``r = e^(s^2/2)``."""
    r = np.exp(np.sum(p[..., :2] ** 2, axis=-1) / 2)
    return MixedForm.from_terms({"123": data.q * data.chi2_deriv(r) * r}, shape=r.shape)


def twist_checks(g: GluedStructure, tol: Tolerances = st.DEFAULT_TOL, step=None, resolution=None):
    """F agreement across the overlap, H agreement, dF = 0 and dH + F^F = 0."""
    data = g.data
    psi = g.structure.overlaps[0].map
    tw_M, tw_T = g.twist_ring, g.twist_torus
    resolution = resolution or g.resolution
    pts = psi.source.grid(resolution).valid_points()
    F_from_M = calc.pullback(psi, tw_M.F)(pts)
    H_from_M = calc.pullback(psi, tw_M.H)(pts)
    F_T, H_T = tw_T.F(pts), tw_T.H(pts)
    scale = max(1.0, float(np.max(H_T.norm())))
    out = [
        st.report("F-agreement", (F_from_M - F_T).norm() / scale, pts, tol.glue),
        st.report("H-agreement", (H_from_M - H_T).norm() / scale, pts, tol.glue),
    ]
    for ci, (name, tw) in enumerate((("ring", tw_M), ("torus", tw_T))):
        chart = g.structure.charts[ci]
        q = chart.domain.grid(resolution).valid_points()
        dF, compat = tw.residuals(q, step, richardson=False)
        out.append(st.report(f"dF=0[{name}]", dF / scale, q, tol.glue))
        out.append(st.report(f"dH+F^F=0[{name}]", compat / scale, q, tol.glue))
        closed = chart.twist
        err = (tw.F(q) - closed.F(q)).norm() + (tw.H(q) - closed.H(q)).norm()
        out.append(st.report(f"twist-closed-form[{name}]", err / scale, q, tol.glue))
    return out


# ---------------------------------------------------------------------------
# periods


@dataclass
class SurgeryPeriods:
    p: int
    q: int
    c: float
    radius: float
    h_period: float
    a_dtheta: float
    a_dsigma: float
    cross_term: float
    f_torus_T: float
    f_torus_M: float
    f_dtheta: float
    f_dsigma: float
    h_volume: float
    glue_residual: float = float("nan")

    @property
    def f_period_proxy(self):
        return max(abs(self.f_torus_T), abs(self.f_torus_M), abs(self.f_dtheta), abs(self.f_dsigma))

    def to_dict(self):
        return {"p": int(self.p), "q": int(self.q), "c": float(self.c), "h_period": float(self.h_period),
                "f_period_proxy": float(self.f_period_proxy), "glue_residual": float(self.glue_residual)}


def _dtheta(domain):
    def func(p):
        x, y, r2 = _polar(p)
        return MixedForm.from_terms({"1": -y / r2, "2": x / r2}, shape=x.shape)

    return FormField(domain, func, "dtheta")


def _dsigma(domain):
    return FormField(domain, lambda p: MixedForm.from_terms({"3": 1.0}, shape=p.shape[:-1]), "dsigma")


def boundary_periods(g: GluedStructure, radius=None, resolution=64,
                     volume_resolution=32) -> SurgeryPeriods:
    """Boundary-reduced periods for one surgery.

    On a torus ``r = radius`` in the outer plateau (where ``A_M``, ``C_M``
    vanish) every term containing ``A`` restricts to zero, so the period of
    the twisting class reduces to ``int B = 4 pi^2 q``.  The A-terms, the
    cross term and the F-period probes are integrated explicitly; the
    volume integral of H over the overlap is returned as a cross-check.
    """
    d = g.data
    w = d.r_out - d.r_in
    if radius is None:
        radius = d.r_in + 0.5 * (1 + CHI2_WINDOW[1]) * w
    if not (d.r_in + CHI2_WINDOW[1] * w <= radius < d.r_out):
        raise ValueError("boundary radius must lie in the outer plateau of the cutoffs")
    torus = ChartDomain.boundary_torus(radius, resolution)
    ftor = g.fields
    A, B, A_M_T = ftor["A"], ftor["B"], ftor["A_M_torus"]
    dth, dsg = _dtheta(A.domain), _dsigma(A.domain)

    def wedge_field(f1, f2):
        return FormField(A.domain, lambda p: cl.wedge(f1(p), f2(p)))

    psi = g.structure.overlaps[0].map
    F_T = g.twist_torus.F
    F_M_pulled = calc.pullback(psi, g.twist_ring.F)

    def integ(fld, dom):
        return calc.integrate(fld, dom, degree_check=False).real

    overlap = d.overlap_domain()
    return SurgeryPeriods(
        p=d.p, q=d.q, c=d.c, radius=radius,
        h_period=integ(B, torus),
        a_dtheta=integ(wedge_field(A, dth), torus),
        a_dsigma=integ(wedge_field(A, dsg), torus),
        cross_term=integ(wedge_field(A_M_T, A), torus),
        f_torus_T=integ(F_T, torus),
        f_torus_M=integ(F_M_pulled, torus),
        f_dtheta=calc.integrate(wedge_field(F_T, dth), overlap, volume_resolution, degree_check=False).real,
        f_dsigma=calc.integrate(wedge_field(F_T, dsg), overlap, volume_resolution, degree_check=False).real,
        h_volume=calc.integrate(g.twist_torus.H, overlap, volume_resolution, degree_check=False).real,
    )


# ---------------------------------------------------------------------------
# several surgeries


@dataclass
class MultiSurgeryResult:
    base: Optional[SpinorStructure]
    glued: list
    periods: list
    base_locus: int
    locus_count: int
    h_period_sum: float
    f_period_max: float
    verdict: str
    reports: list = field(default_factory=list)


VERDICT_UNTWISTED = "B3-structure"
VERDICT_TWISTED = "twisted B3-structure"


def check_disjoint(surgeries):
    for i, s in enumerate(surgeries):
        for t in surgeries[i + 1:]:
            if np.hypot(s.center[0] - t.center[0], s.center[1] - t.center[1]) < s.a + t.a:
                raise ValueError("surgery neighbourhoods overlap")


def multi_surgery(base: Optional[SpinorStructure], surgeries, resolution=32,
                  tol: Tolerances = st.DEFAULT_TOL, step=None, period_resolution=64,
                  chart_checks=True) -> MultiSurgeryResult:
    """Perform several surgeries on disjoint neighbourhoods of ``base``.

    The verdict is untwisted iff every F-period probe vanishes and the total
    period of the twisting class vanishes.  The locus count adds one curve
    per surgery to the base count (each measured, not assumed).
    """
    surgeries = list(surgeries)
    check_disjoint(surgeries)
    base_locus = 0
    reports = []
    if base is not None:
        base_locus = st.check_stable_and_locus(base, resolution, tol, step).n_curves
    if not surgeries:
        verdict = VERDICT_UNTWISTED
        return MultiSurgeryResult(base, [], [], base_locus, base_locus, 0.0, 0.0, verdict)
    glued, periods = [], []
    count = base_locus
    for data in surgeries:
        g = split_twist(data, resolution, tol, step)
        per = boundary_periods(g, resolution=period_resolution)
        per.glue_residual = verify_glue(data, resolution=resolution, tol=tol.glue).worst_residual
        # purity and real index are covered by the chart checks when they run
        locus = st.check_stable_and_locus(g.structure, resolution, tol, step,
                                          check_preconditions=not chart_checks)
        count += locus.n_curves
        reports.extend(g.checks)
        reports.append(st.report(f"stable[{g.structure.name}]", np.array([0.0 if locus.stable else 1.0]),
                                 None, 0.5, detail=locus.detail))
        if chart_checks:
            reports.extend(st.verify_structure(g.structure, resolution, tol, step))
        glued.append(g)
        periods.append(per)
    h_sum = float(sum(pr.h_period for pr in periods))
    f_max = float(max(pr.f_period_proxy for pr in periods))
    untwisted = f_max < tol.f_period and abs(h_sum) < tol.period
    verdict = VERDICT_UNTWISTED if untwisted else VERDICT_TWISTED
    return MultiSurgeryResult(base, glued, periods, base_locus, count, h_sum, f_max, verdict, reports)
