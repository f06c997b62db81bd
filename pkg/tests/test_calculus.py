"""Charts, finite-difference exterior derivative, pullback and quadrature."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from b3gc import calculus as calc
from b3gc import clifford as cl
from b3gc import surgery as sg
from b3gc.calculus import TWO_PI, ChartDomain, ChartMap, FormField
from b3gc.clifford import MixedForm

BOX = ChartDomain.box([(-1, 1), (-1, 1), (0, TWO_PI)], resolution=8)
OPEN_BOX = ChartDomain.box([(-1, 1)] * 3, periodic=(False, False, False), resolution=8)


def poly_field(rng, domain=OPEN_BOX, degree=2):
    """Random field with polynomial coefficients of the given degree in each variable."""
    coef = rng.normal(size=(8, degree + 1, degree + 1, degree + 1)) * 0.5

    def func(p):
        x, y, t = (p[..., a, None] for a in range(3))
        out = np.zeros(p.shape[:-1] + (8,), dtype=complex)
        for i in range(degree + 1):
            for j in range(degree + 1):
                for k in range(degree + 1):
                    out = out + coef[:, i, j, k] * x ** i * y ** j * t ** k
        return MixedForm(out)

    return FormField(domain, func, "poly")


def interior(domain, n=6):
    pts = domain.grid(n).valid_points()
    lo, hi = domain.coordinate_ranges().T
    return 0.8 * pts + 0.1 * (lo + hi) if not any(domain.periodic) else pts


def test_domain_invariants():
    with pytest.raises(ValueError):
        ChartDomain.box([(0, 1), (0, 1), (0, 3)], periodic=(False, False, True))
    with pytest.raises(ValueError):
        ChartDomain.annulus_circle(2.0, 1.0)
    ann = ChartDomain.annulus_circle(0.5, 1.0, 10)
    pts = ann.grid().valid_points()
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert np.all((r >= 0.5) & (r <= 1.0))


def test_d_of_coordinate_function():
    f = FormField(BOX, lambda p: MixedForm.from_terms({"": p[..., 0]}, shape=p.shape[:-1]))
    pts = BOX.grid().valid_points()
    d = calc.ext_d(f, pts)
    assert np.max((d - MixedForm.basis("1")).norm()) < 1e-8


def test_d_of_cosymplectic_spinor_vanishes():
    rho = sg.cosymplectic_model(1.2, 1.5, ChartDomain.disk_circle(1.2, 8))
    pts = rho.domain.grid().valid_points()
    assert np.max(calc.ext_d(rho, pts).norm()) < 1e-8


def test_d_of_typechange_form():
    def func(p):
        z = p[..., 0] + 1j * p[..., 1]
        one = np.ones_like(z)
        return MixedForm.from_terms({"": z, "1": one, "2": 1j * one, "13": 1j * one, "23": -one})

    rho = FormField(BOX, func)
    pts = BOX.grid().valid_points()
    d = calc.ext_d(rho, pts)
    assert np.max((d - MixedForm.from_terms({"1": 1, "2": 1j})).norm()) < 1e-8


def test_periodic_wrap_in_derivative():
    f = FormField(BOX, lambda p: MixedForm.from_terms({"": np.sin(p[..., 2])}, shape=p.shape[:-1]))
    pts = np.array([[0.0, 0.0, 0.0], [0.1, 0.2, TWO_PI * 0.999]])
    d = calc.ext_d(f, pts)
    assert np.allclose(d.c[:, 3], np.cos(pts[:, 2]), atol=1e-7)


def test_evaluation_outside_domain_raises():
    f = FormField(OPEN_BOX, lambda p: MixedForm.from_terms({"": p[..., 0]}, shape=p.shape[:-1]))
    with pytest.raises(ValueError):
        calc.ext_d(f, np.array([[1.5, 0.0, 0.0]]))


@settings(max_examples=10, deadline=None)
@given(hst.integers(0, 2 ** 31))
def test_d_squared_vanishes(seed):
    rho = poly_field(np.random.default_rng(seed))
    pts = interior(OPEN_BOX)
    dd = calc.ext_d(calc.d_field(rho, step=1e-3), pts, step=1e-3)
    assert np.max(dd.norm()) < 1e-5


@settings(max_examples=10, deadline=None)
@given(hst.integers(0, 2 ** 31))
def test_leibniz(seed):
    rng = np.random.default_rng(seed)
    for j in range(4):
        a = poly_field(rng).map(lambda r, p, j=j: r.part(j))
        b = poly_field(rng)
        prod = calc.combine(OPEN_BOX, lambda x, y, p: cl.wedge(x, y), a, b)
        pts = interior(OPEN_BOX)
        lhs = calc.ext_d(prod, pts, richardson=True)
        rhs = cl.wedge(calc.ext_d(a, pts, richardson=True), b(pts)) + \
            cl.wedge(a(pts), calc.ext_d(b, pts, richardson=True)) * (-1) ** j
        assert np.max((lhs - rhs).norm()) < 1e-6


def _shear_map():
    """An invertible polynomial map of the open box into a larger box."""
    target = ChartDomain.box([(-3, 3)] * 3, periodic=(False, False, False))

    def f(p):
        x, y, t = p[..., 0], p[..., 1], p[..., 2]
        return np.stack([x + 0.3 * y ** 2, y + 0.2 * t, t + 0.1 * x * y], -1)

    return ChartMap(OPEN_BOX, target, f)


@settings(max_examples=10, deadline=None)
@given(hst.integers(0, 2 ** 31))
def test_naturality(seed):
    phi = _shear_map()
    rho = poly_field(np.random.default_rng(seed), phi.target)
    pts = interior(OPEN_BOX)
    lhs = calc.ext_d(calc.pullback(phi, rho), pts, richardson=True)
    rhs = calc.pullback(phi, calc.d_field(rho, richardson=True))(pts)
    assert np.max((lhs - rhs).norm()) < 1e-6


def test_identity_pullback():
    rho = poly_field(np.random.default_rng(1))
    pts = interior(OPEN_BOX)
    assert calc.pullback(calc.identity_map(OPEN_BOX), rho)(pts).allclose(rho(pts))


def test_psi_pullbacks():
    data = sg.SurgeryData(p=0, q=1)
    psi = sg.psi_map(data, 8)
    pts = psi.source.grid().valid_points()
    J = psi.jacobian(pts)
    x, y = pts[:, 0], pts[:, 1]
    r2 = x * x + y * y
    dtheta = MixedForm.one_form(-y / r2, x / r2, 0 * x)
    # target coordinates are (s cos phi, s sin phi, t); t -> theta and phi -> -sigma
    dt = calc.pullback_form(J, MixedForm.basis("3"))
    assert np.max((dt - dtheta).norm()) < 1e-10
    q = psi(pts)
    s2 = q[:, 0] ** 2 + q[:, 1] ** 2
    dphi_target = MixedForm.one_form(-q[:, 1] / s2, q[:, 0] / s2, 0 * s2)
    dphi = calc.pullback_form(J, dphi_target)
    assert np.max((dphi + MixedForm.basis("3")).norm()) < 1e-10


def test_inversion_pullback_fd_jacobian():
    ann = ChartDomain.annulus_circle(0.5, 2.0, 8)

    def inv(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        return np.stack([x / r2, -y / r2, p[..., 2]], -1)

    phi = ChartMap(ann, ann, inv)
    dz = FormField(ann, lambda p: MixedForm.from_terms({"1": 1, "2": 1j}, shape=p.shape[:-1]))
    pts = ann.grid().valid_points()
    pts = pts[(np.hypot(pts[:, 0], pts[:, 1]) > 0.6) & (np.hypot(pts[:, 0], pts[:, 1]) < 1.6)]
    got = calc.pullback(phi, dz, use_analytic=False)(pts)
    z = pts[:, 0] + 1j * pts[:, 1]
    want = MixedForm.from_terms({"1": -1 / z ** 2, "2": -1j / z ** 2})
    assert np.max((got - want).norm()) < 1e-6


@pytest.mark.parametrize("q", [1, -1])
@pytest.mark.parametrize("n", [2, 5, 16])
def test_torus_flux_exact(q, n):
    R = 1.7
    dom = ChartDomain.boundary_torus(R, n)

    def B(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        return MixedForm.from_terms({"13": -q * y / r2, "23": q * x / r2}, shape=x.shape)

    val = calc.integrate(FormField(dom, B), dom)
    assert abs(val - 4 * np.pi ** 2 * q) < 1e-12


def test_circle_integral_and_degree_check():
    dom = ChartDomain.circle(0.3, 0.1, 8)
    one = FormField(dom, lambda p: MixedForm.from_terms({"3": 1.0}, shape=p.shape[:-1]))
    assert abs(calc.integrate(one, dom) - TWO_PI) < 1e-12
    bad = FormField(dom, lambda p: MixedForm.from_terms({"3": 1.0, "": 1.0}, shape=p.shape[:-1]))
    with pytest.raises(ValueError):
        calc.integrate(bad, dom)


def test_dlogr_wedge_vanishes_on_torus():
    R = 1.3
    dom = ChartDomain.boundary_torus(R, 12)

    def f(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        dlogr = MixedForm.one_form(x / r2, y / r2, 0 * x)
        xi = MixedForm.one_form(np.cos(p[..., 2]) + 0 * x, 0.3 + 0 * x, 1 + 0 * x)
        return cl.wedge(dlogr, xi)

    assert abs(calc.integrate(FormField(dom, f), dom)) < 1e-12


def test_constant_top_form_exact_on_t3():
    dom = ChartDomain.box([(0, TWO_PI)] * 3, (True, True, True), 3)
    f = FormField(dom, lambda p: MixedForm.from_terms({"123": 2.0}, shape=p.shape[:-1]))
    assert abs(calc.integrate(f, dom) - 2 * TWO_PI ** 3) < 1e-9
