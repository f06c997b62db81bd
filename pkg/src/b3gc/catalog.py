"""Named example structures wired to the check suite.

Each entry builds a :class:`SpinorStructure` from keyword parameters and
carries the profile it is expected to show: type, number of type-change
curves, stability, integrability witness and the value of
``(rho, conj rho)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from b3gc import calculus as calc
from b3gc import structure as st
from b3gc import surgery as sg
from b3gc.calculus import TWO_PI, ChartDomain, ChartMap, FormField
from b3gc.clifford import GenVector, MixedForm
from b3gc.structure import Chart, CheckReport, Overlap, SpinorStructure, Tolerances


@dataclass
class Expected:
    """Expected profile of a catalog structure.

    Attributes:
        type: "0", "1" or "locus" (type 1 exactly on the zero set of rho_0).
        locus_count: number of type-change curves (None when not stable).
        stable: whether rho_0 vanishes transversally (or not at all).
        witnesses: per chart index, ``points -> GenVector`` (None: not pinned).
        pairing: per chart index, ``points -> (rho, conj rho)``.
        note: where the expectation comes from.
    """

    type: str
    locus_count: Optional[int]
    stable: bool
    witnesses: dict = field(default_factory=dict)
    pairing: dict = field(default_factory=dict)
    note: str = ""


@dataclass
class CatalogEntry:
    name: str
    builder: Callable[..., SpinorStructure]
    expected: Callable[..., Expected]
    description: str = ""
    defaults: dict = field(default_factory=dict)


def _const(terms, domain, name):
    return FormField(domain, lambda p: MixedForm.from_terms(terms, shape=p.shape[:-1]), name)


def _zvec(X=(0, 0, 0)):
    def w(points):
        shape = np.shape(points)[:-1]
        Xa = np.broadcast_to(np.asarray(X, dtype=complex), shape + (3,))
        return GenVector.make(Xa, np.zeros(shape), np.zeros(shape + (3,)))

    return w


def _const_value(value):
    return lambda p: np.full(np.shape(p)[:-1], value, dtype=complex)


def _inversion(source, target):
    """``(x, y, t) -> (x, -y, t) / |z|^2`` on the plane, i.e. ``z -> 1/z``."""

    def func(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        return np.stack([x / r2, -y / r2, p[..., 2]], axis=-1)

    def jac(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        J = np.zeros(p.shape[:-1] + (3, 3))
        J[..., 0, 0] = (y * y - x * x) / r2 ** 2
        J[..., 0, 1] = -2 * x * y / r2 ** 2
        J[..., 1, 0] = 2 * x * y / r2 ** 2
        J[..., 1, 1] = (y * y - x * x) / r2 ** 2
        J[..., 2, 2] = 1.0
        return J

    return ChartMap(source, target, func, jac, func, "z -> 1/z")


# ---------------------------------------------------------------------------
# builders


def cosymplectic_t3(c=1.0, resolution=calc.CHECK_RESOLUTION):
    """``1 + i c dt + i dx^dy - c dt^dx^dy`` on the flat 3-torus."""
    dom = ChartDomain.box([(0, TWO_PI)] * 3, (True, True, True), resolution)
    rho = _const({"": 1.0, "3": 1j * c, "12": 1j, "123": -c}, dom, "cosymplectic-T3")
    return SpinorStructure([Chart("T3", rho)], [], "cosymplectic-T3")


def _round_s2_spinor(domain):
    """``1 + i dtheta + i omega - dtheta^omega`` with the round area form of a stereographic chart."""

    def func(p):
        x, y = p[..., 0], p[..., 1]
        w = 4.0 / (1.0 + x * x + y * y) ** 2
        return MixedForm.from_terms({"": 1.0, "3": 1j, "12": 1j * w, "123": -w}, shape=x.shape)

    return FormField(domain, func, "cosymplectic-S2xS1")


def cosymplectic_s2xs1(radius=2.0, resolution=calc.CHECK_RESOLUTION):
    """Round S^2 x S^1 with two stereographic charts; the transition is 1."""
    disk = ChartDomain.disk_circle(radius, resolution)
    ann = ChartDomain.annulus_circle(1.0 / radius, radius, resolution)
    charts = [Chart("north", _round_s2_spinor(disk)), Chart("south", _round_s2_spinor(disk))]
    one = lambda p: np.ones(np.shape(p)[:-1])  # noqa: E731
    overlaps = [Overlap(0, 1, _inversion(ann, disk), one), Overlap(1, 0, _inversion(ann, disk), one)]
    return SpinorStructure(charts, overlaps, "cosymplectic-S2xS1")


def nacs_t3(resolution=calc.CHECK_RESOLUTION):
    """Flat model ``Omega + i Omega^eta`` with ``Omega = dx + i dy``, ``eta = dt``."""
    dom = ChartDomain.box([(0, TWO_PI)] * 3, (True, True, True), resolution)
    rho = _const({"1": 1.0, "2": 1j, "13": 1j, "23": -1.0}, dom, "nacs-T3")
    return SpinorStructure([Chart("T3", rho)], [], "nacs-T3")


def _typechange_field(domain, sign=1.0, coefficient=1.0):
    """``z + s dz + i s c' dz^dt`` where ``c' = coefficient``."""

    def func(p):
        x, y = p[..., 0], p[..., 1]
        z = x + 1j * y
        one = np.ones_like(x)
        return MixedForm.from_terms({
            "": z, "1": sign * coefficient * one, "2": 1j * sign * coefficient * one,
            "13": 1j * sign * one, "23": -sign * one,
        }, shape=x.shape)

    return FormField(domain, func)


def typechange_cxr(half_width=1.0, resolution=calc.CHECK_RESOLUTION):
    """``z + dz + i dz^dt`` on ``[-w, w]^2 x S^1``."""
    dom = ChartDomain.box([(-half_width, half_width)] * 2 + [(0, TWO_PI)], resolution=resolution)
    return SpinorStructure([Chart("CxR", _typechange_field(dom))], [], "typechange-CxR")


def glued_s2xs1(radius=2.0, variant="corrected", resolution=calc.CHECK_RESOLUTION):
    """S^2 x S^1 with ``z + dz + i dz^dtheta`` near each pole.

    The second chart carries the same form in ``w = 1/z``, written as
    ``w - dw - i dw^dtheta``; on the overlap ``rho_north = z^2 phi^* rho_south``.
    ``variant="as_printed"`` uses ``z + i dz + i dz^dtheta`` in both charts,
    which is pure but has ``(rho, conj rho) = 0``.
    """
    if variant not in ("corrected", "as_printed"):
        raise ValueError(f"unknown variant {variant!r}")
    disk = ChartDomain.disk_circle(radius, resolution)
    ann = ChartDomain.annulus_circle(1.0 / radius, radius, resolution)
    if variant == "corrected":
        north = _typechange_field(disk)
        south = _typechange_field(disk, sign=-1.0)
    else:
        def printed(sign):
            def func(p):
                x, y = p[..., 0], p[..., 1]
                one = np.ones_like(x)
                return MixedForm.from_terms({
                    "": x + 1j * y, "1": 1j * sign * one, "2": -sign * one,
                    "13": 1j * sign * one, "23": -sign * one,
                }, shape=x.shape)
            return FormField(disk, func)
        north, south = printed(1.0), printed(-1.0)
    z2 = lambda p: (p[..., 0] + 1j * p[..., 1]) ** 2  # noqa: E731
    charts = [Chart("north", north), Chart("south", south)]
    overlaps = [Overlap(0, 1, _inversion(ann, disk), z2), Overlap(1, 0, _inversion(ann, disk), z2)]
    return SpinorStructure(charts, overlaps, f"glued-S2xS1[{variant}]")


def surgery_solid_torus(p=0, q=1, c=1.0, a=1.2, b=0.8, resolution=calc.CHECK_RESOLUTION):
    data = sg.SurgeryData(p=p, q=q, c=c, a=a, b=b)
    rho = sg.build_rho_T(data, data.torus_domain(resolution))
    return SpinorStructure([Chart("solid-torus", rho)], [], "surgery-solid-torus")


def cosymplectic_neighbourhood(a=1.2, c=1.0, resolution=calc.CHECK_RESOLUTION):
    rho = sg.cosymplectic_model(a, c, ChartDomain.disk_circle(a, resolution))
    return SpinorStructure([Chart("D_a x S1", rho)], [], "cosymplectic-neighbourhood")


# ---------------------------------------------------------------------------
# expectations


def _exp_cos_t3(c=1.0, **_):
    return Expected("0", 0, True, {0: _zvec()}, {0: _const_value(4.0 * c)}, "closed form, constant coefficients")


def _round_pairing(p):
    return 16.0 / (1.0 + p[..., 0] ** 2 + p[..., 1] ** 2) ** 2 + 0j


def _exp_cos_s2(**_):
    return Expected("0", 0, True, {0: _zvec(), 1: _zvec()}, {0: _round_pairing, 1: _round_pairing},
                    "pairing 4 in the (dtheta, omega) frame")


def _exp_nacs(**_):
    return Expected("1", None, False, {0: _zvec()}, {0: _const_value(-4.0)}, "rho_0 vanishes identically")


def _exp_cxr(**_):
    return Expected("locus", 1, True, {0: _zvec((0, 0, 1j))}, {0: _const_value(-4.0)}, "witness i d/dt")


def _exp_glued(variant="corrected", **_):
    if variant == "as_printed":
        return Expected("locus", 2, True, {}, {0: _const_value(0.0), 1: _const_value(0.0)},
                        "printed form: real index fails")
    return Expected("locus", 2, True, {0: _zvec((0, 0, 1j)), 1: _zvec((0, 0, -1j))},
                    {0: _const_value(-4.0), 1: _const_value(-4.0)},
                    "witness i d/dtheta near z = 0 and -i d/dtheta near w = 0")


def _exp_solid_torus(p=0, q=1, c=1.0, a=1.2, b=0.8, **_):
    data = sg.SurgeryData(p=p, q=q, c=c, a=a, b=b)
    return Expected("locus", 1, True, {0: sg.rho_T_witness(data)}, {0: _const_value(4.0 * c * q * q)},
                    "witness -i q d/dsigma")


def _exp_neighbourhood(c=1.0, **_):
    return Expected("0", 0, True, {0: _zvec()}, {0: _const_value(4.0 * c)}, "closed form")


CATALOG = {
    e.name: e for e in (
        CatalogEntry("cosymplectic-T3", cosymplectic_t3, _exp_cos_t3, "cosymplectic spinor on T^3", {"c": 1.0}),
        CatalogEntry("cosymplectic-S2xS1", cosymplectic_s2xs1, _exp_cos_s2, "round S^2 x S^1, two charts"),
        CatalogEntry("nacs-T3", nacs_t3, _exp_nacs, "flat nacs model, type 1 and not stable"),
        CatalogEntry("typechange-CxR", typechange_cxr, _exp_cxr, "type change along z = 0"),
        CatalogEntry("glued-S2xS1", glued_s2xs1, _exp_glued, "two type-change circles on S^2 x S^1",
                     {"variant": "corrected"}),
        CatalogEntry("surgery-solid-torus", surgery_solid_torus, _exp_solid_torus, "solid-torus spinor",
                     {"p": 0, "q": 1, "c": 1.0}),
        CatalogEntry("cosymplectic-neighbourhood", cosymplectic_neighbourhood, _exp_neighbourhood,
                     "neighbourhood model D_a x S^1", {"a": 1.2, "c": 1.0}),
    )
}

NAMES = tuple(CATALOG)


def make(name, **params) -> SpinorStructure:
    """Build the named structure; unknown names raise KeyError."""
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(NAMES)}")
    return CATALOG[name].builder(**params)


def expected(name, **params) -> Expected:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}")
    merged = {**CATALOG[name].defaults, **params}
    return CATALOG[name].expected(**merged)


# ---------------------------------------------------------------------------
# running


def profile_checks(structure: SpinorStructure, exp: Expected, resolution=None,
                   tol: Tolerances = st.DEFAULT_TOL, step=None):
    """Compare type, pairing, stability and locus count with the expectation."""
    reports = []
    locus = st.check_stable_and_locus(structure, resolution, tol, step, check_preconditions=False)
    for ci, chart in enumerate(structure.charts):
        pts = chart.domain.grid(resolution).valid_points()
        rho = chart.field(pts)
        types = st.compute_type(rho, tol.type_cut)
        want = np.ones_like(types) if exp.type == "1" else np.zeros_like(types)
        bad = (types != want).astype(float)
        detail = ""
        if exp.type == "locus":
            zeros = locus.zeros_per_chart[ci]["zeros"]
            if len(zeros):
                zt = st.compute_type(chart.field(zeros), tol.type_cut)
                detail = f"type at {len(zeros)} located zeros: {sorted(set(zt.tolist()))}"
                if np.any(zt != 1):
                    bad = np.append(bad, 1.0)
        reports.append(st.report(f"{chart.name}:type-profile", bad, pts if len(bad) == len(pts) else None,
                                 0.5, detail=detail))
        if ci in exp.pairing:
            from b3gc import clifford as cl  # local: module is light, keeps the import list short
            got = cl.pairing(rho, rho.conj())
            want_p = exp.pairing[ci](pts)
            reports.append(st.report(f"{chart.name}:pairing-value",
                                     np.abs(got - want_p) / np.maximum(1.0, np.abs(want_p)), pts, 1e-10))
    reports.append(st.report("stability", np.array([float(locus.stable != exp.stable)]), None, 0.5,
                             detail=locus.detail or ("stable" if locus.stable else "not stable")))
    if exp.locus_count is not None:
        reports.append(st.report("locus-count", np.array([float(abs(locus.n_curves - exp.locus_count))]),
                                 None, 0.5, detail=f"found {locus.n_curves}, expected {exp.locus_count}"))
    return reports, locus


def run_entry(name, resolution=None, tol: Tolerances = st.DEFAULT_TOL, step=None, **params):
    """Full suite plus expected-profile comparison for one entry."""
    structure = make(name, **params)
    exp = expected(name, **params)
    reports = st.verify_structure(structure, resolution, tol, step, witnesses=exp.witnesses)
    prof, _ = profile_checks(structure, exp, resolution, tol, step)
    return reports + prof


def run_all(resolution=None, tol: Tolerances = st.DEFAULT_TOL, step=None):
    """Run every entry with default parameters; report names are prefixed by the entry."""
    out = []
    for name in NAMES:
        for rep in run_entry(name, resolution, tol, step):
            rep.name = f"{name}/{rep.name}"
            out.append(rep)
    return out
