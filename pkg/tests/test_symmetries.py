"""A-fields, B-fields, diffeomorphisms and twisting."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from b3gc import calculus as calc
from b3gc import clifford as cl
from b3gc import structure as st
from b3gc import symmetries as sy
from b3gc.calculus import TWO_PI, ChartDomain, ChartMap, FormField
from b3gc.clifford import GenVector, MixedForm

from criteria import random_forms, random_one_forms, random_two_forms, random_vectors

seeds = hst.integers(0, 2 ** 31)
DOM = ChartDomain.box([(-1, 1), (-1, 1), (0, TWO_PI)], resolution=6)


def field(fn):
    return FormField(DOM, fn)


def test_compose_examples():
    A = MixedForm.basis("1")
    s, corr = sy.compose_AA(A, MixedForm.zeros())
    assert s.allclose(A) and corr.allclose(MixedForm.zeros())
    s, corr = sy.compose_AA(A, A)
    assert s.allclose(A * 2) and corr.allclose(MixedForm.zeros())
    s, corr = sy.compose_AA(MixedForm.basis("1"), MixedForm.basis("2"))
    assert s.allclose(MixedForm.from_terms({"1": 1, "2": 1}))
    assert corr.allclose(-MixedForm.basis("12"))
    for label in cl.LABELS:
        rho = MixedForm.basis(label)
        lhs = cl.apply_A(MixedForm.basis("1"), cl.apply_A(MixedForm.basis("2"), rho))
        assert lhs.allclose(cl.apply_A(s, cl.apply_B(corr, rho)))


def test_compose_rejects_degree():
    with pytest.raises(ValueError):
        sy.compose_AA(MixedForm.basis("12"), MixedForm.basis("1"))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_compose_law_random(seed):
    rng = np.random.default_rng(seed)
    A, A2, rho = random_one_forms(rng, 20), random_one_forms(rng, 20), random_forms(rng, 20)
    s, corr = sy.compose_AA(A, A2)
    lhs = cl.apply_A(A, cl.apply_A(A2, rho))
    assert lhs.allclose(cl.apply_A(s, cl.apply_B(corr, rho)), atol=1e-11)


def test_transport_examples():
    v = GenVector.make(X=(1, 0, 0))
    w = sy.transport_vector(sy.Symmetry.B_field(MixedForm.basis("12")), v)
    assert np.allclose(w.v, GenVector.make(X=(1, 0, 0), alpha=(0, -1, 0)).v)
    A = MixedForm.one_form(0.3, -0.2, 0.5)
    v = GenVector.make(f=1.5)
    w = sy.transport_vector(sy.Symmetry.A_field(A), v)
    assert np.allclose(w.v, GenVector.make(f=1.5, alpha=2 * 1.5 * np.array([0.3, -0.2, 0.5])).v)
    rng = np.random.default_rng(0)
    v = random_vectors(rng, 5)
    for sym in (sy.Symmetry.A_field(MixedForm.zeros()), sy.Symmetry.B_field(MixedForm.zeros())):
        assert np.allclose(sy.transport_vector(sym, v).v, v.v)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_transport_intertwines(seed):
    rng = np.random.default_rng(seed)
    v, rho = random_vectors(rng, 20), random_forms(rng, 20)
    for sym, act in ((sy.Symmetry("A", random_one_forms(rng, 20)), cl.apply_A),
                     (sy.Symmetry("B", random_two_forms(rng, 20)), cl.apply_B)):
        w = sy.transport_vector(sym, v)
        lhs = act(sym.payload, cl.clifford_act(v, rho))
        rhs = cl.clifford_act(w, act(sym.payload, rho))
        assert lhs.allclose(rhs, atol=1e-10)


def test_published_A_transport_lacks_quadratic_term():
    """Without -(i_X A) A the intertwining identity fails whenever i_X A != 0."""
    A = MixedForm.one_form(1.0, 0.0, 0.0)
    v = GenVector.make(X=(1, 0, 0))
    rho = MixedForm.from_terms({"": 1, "2": 0.5, "13": 2})
    iXA = 1.0
    short = GenVector.make(X=(1, 0, 0), f=-iXA, alpha=(0, 0, 0))
    exact = sy.transport_vector(sy.Symmetry.A_field(A), v)
    lhs = cl.apply_A(A, cl.clifford_act(v, rho))
    assert cl.clifford_act(exact, cl.apply_A(A, rho)).allclose(lhs)
    assert not cl.clifford_act(short, cl.apply_A(A, rho)).allclose(lhs)


def test_diffeo_transport_and_action():
    target = ChartDomain.box([(-3, 3), (-3, 3), (0, TWO_PI)])

    def f(p):
        return np.stack([2 * p[..., 0] + p[..., 1], p[..., 1], p[..., 2]], -1)

    def finv(p):
        return np.stack([(p[..., 0] - p[..., 1]) / 2, p[..., 1], p[..., 2]], -1)

    J = np.array([[2.0, 1, 0], [0, 1, 0], [0, 0, 1]])
    phi = ChartMap(DOM, target, f, lambda p: np.broadcast_to(J, p.shape[:-1] + (3, 3)), finv)
    sym = sy.Symmetry("diffeo", phi)
    rng = np.random.default_rng(2)
    pts = DOM.grid().valid_points()[:20]
    v = random_vectors(rng, len(pts))
    rho_c = random_forms(rng, 1).at(0)
    rho = FormField(target, lambda p: MixedForm(np.broadcast_to(rho_c.c, p.shape[:-1] + (8,))))
    # pullback intertwines: phi^*(v . rho) = (J^-1 X, f, J^T alpha) . phi^*rho for constant v
    v0 = GenVector(v.v[0])
    w = sy.transport_vector(sym, GenVector(np.broadcast_to(v.v[0], (len(pts), 7))), pts)
    acted = FormField(target, lambda p: cl.clifford_act(v0, rho(p)))
    lhs = sy.apply_symmetry(sym, acted)(pts)
    rhs = cl.clifford_act(w, sy.apply_symmetry(sym, rho)(pts))
    assert lhs.allclose(rhs, atol=1e-12)
    with pytest.raises(ValueError):
        sy.Symmetry("diffeo", ChartMap(DOM, target, f))


def test_closedness_flag():
    closed = field(lambda p: MixedForm.one_form(p[..., 0], p[..., 1], 0 * p[..., 0]))
    open_ = field(lambda p: MixedForm.one_form(p[..., 1], 0 * p[..., 0], 0 * p[..., 0]))
    assert sy.Symmetry.A_field(closed).closed
    assert not sy.Symmetry.A_field(open_).closed
    assert sy.Symmetry.B_field(MixedForm.basis("12")).closed
    with pytest.raises(ValueError):
        sy.Symmetry.A_field(MixedForm.basis("12"))
    with pytest.raises(ValueError):
        sy.Symmetry("C", MixedForm.basis("1"))


def _spinor_field():
    """A non-closed, integrable spinor: typechange-type with polynomial decoration."""
    def func(p):
        z = p[..., 0] + 1j * p[..., 1]
        one = np.ones_like(z)
        return MixedForm.from_terms({"": z, "1": one, "2": 1j * one, "13": 1j * one, "23": -one})

    return field(func)


def _A():
    return field(lambda p: MixedForm.one_form(0.3 * p[..., 1] ** 2, 0.2 * np.sin(p[..., 2]), 0.1 * p[..., 0]))


def _B():
    return field(lambda p: MixedForm.two_form(0.2 * p[..., 0] * p[..., 1], 0.1 * np.cos(p[..., 2]),
                                              0.25 * p[..., 1]))


def test_twist_orientation_pinned():
    rho, A, B = _spinor_field(), _A(), _B()
    moved = rho.map(lambda r, p: cl.apply_A(A(p), cl.apply_B(B(p), r)))
    pts = DOM.grid().valid_points()
    twist = sy.twist_transform(None, A, B)
    _, res = st.find_integrability_witness(moved, pts, twist=twist, richardson=True)
    assert res.max() < 1e-5
    flipped = st.TwistData(twist.F.map(lambda f, p: -f), twist.H.map(lambda h, p: -h))
    _, res = st.find_integrability_witness(moved, pts, twist=flipped, richardson=True)
    assert res.max() > 1e-2


def test_twist_transform_trivial_cases():
    pts = DOM.grid().valid_points()
    F = field(lambda p: MixedForm.two_form(0.5 + 0 * p[..., 0], 0 * p[..., 0], 0 * p[..., 0]))
    H = field(lambda p: MixedForm.three_form(p[..., 0]))
    same = sy.twist_transform(st.TwistData(F, H), None, None)
    assert same.F(pts).allclose(F(pts)) and same.H(pts).allclose(H(pts))
    closedA = field(lambda p: MixedForm.one_form(p[..., 0], 0 * p[..., 0], 0 * p[..., 0]))
    closedB = field(lambda p: MixedForm.two_form(1 + 0 * p[..., 0], 0 * p[..., 0], 0 * p[..., 0]))
    zero = sy.twist_transform(None, closedA, closedB)
    assert np.max(zero.F(pts).norm()) < 1e-8 and np.max(zero.H(pts).norm()) < 1e-8


def test_untwisting_exact_F():
    """F = d Lambda: acting by e^Lambda removes F and gives H' = H + F ^ Lambda."""
    pts = DOM.grid().valid_points()
    Lam = field(lambda p: MixedForm.one_form(-p[..., 1], 0 * p[..., 0], 0 * p[..., 0]))
    F = calc.d_field(Lam)
    H = field(lambda p: MixedForm.three_form(0.3 + 0 * p[..., 0]))
    out = sy.twist_transform(st.TwistData(F, H), Lam, None)
    assert np.max(out.F(pts).norm()) < 1e-8
    want = H(pts) + cl.wedge(F(pts), Lam(pts))
    assert np.max((out.H(pts) - want).norm()) < 1e-8


def test_twist_transform_rejects_non_closed_F():
    F = field(lambda p: MixedForm.two_form(p[..., 2], 0 * p[..., 0], 0 * p[..., 0]))
    zero = field(lambda p: MixedForm.zeros(p.shape[:-1]))
    with pytest.raises(ValueError):
        sy.twist_transform(st.TwistData(F, zero), _A(), None)


def test_closed_symmetries_preserve_integrability():
    rho = _spinor_field()
    A = field(lambda p: MixedForm.one_form(p[..., 0], p[..., 1], 0.5 + 0 * p[..., 0]))
    B = field(lambda p: MixedForm.two_form(0.3 + 0 * p[..., 0], 0 * p[..., 0], 0.1 + 0 * p[..., 0]))
    moved = sy.apply_symmetry(sy.Symmetry.A_field(A), sy.apply_symmetry(sy.Symmetry.B_field(B), rho))
    _, res = st.find_integrability_witness(moved, DOM.grid().valid_points())
    assert res.max() < 1e-6
