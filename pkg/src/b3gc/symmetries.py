"""A-fields, B-fields and diffeomorphisms acting on spinors and sections.

Orientation convention for twisting: acting by ``e^A e^B`` on an
``(F, H)``-twisted integrable spinor yields an
``(F - dA, H - dB - (dA - 2F)^A)``-twisted integrable spinor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from b3gc import calculus as calc
from b3gc import clifford as cl
from b3gc.calculus import ChartMap, FormField
from b3gc.clifford import GenVector, MixedForm
from b3gc.structure import TwistData

KINDS = ("A", "B", "diffeo")
CLOSED_TOL = 1e-6


@dataclass(frozen=True)
class Symmetry:
    """One generator of the symmetry group.

    ``payload`` is a 1-form (A), a 2-form (B) or a ChartMap (diffeo).  Forms
    may be constant MixedForms or FormFields.  ``closed`` records whether the
    payload is closed; for fields it is decided by a finite-difference check
    when not given.
    """

    kind: str
    payload: Union[MixedForm, FormField, ChartMap]
    closed: Optional[bool] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown symmetry kind {self.kind!r}")
        if self.kind == "diffeo":
            if not isinstance(self.payload, ChartMap) or self.payload.inverse is None:
                raise ValueError("diffeomorphisms need a ChartMap with an inverse")
            object.__setattr__(self, "closed", True)
            return
        degree = 1 if self.kind == "A" else 2
        if isinstance(self.payload, FormField):
            sample = self.payload(self.payload.domain.grid(8).valid_points())
            cl._require_degree(sample, degree, self.kind)
            if self.closed is None:
                object.__setattr__(self, "closed", is_closed(self.payload))
        else:
            cl._require_degree(self.payload, degree, self.kind)
            object.__setattr__(self, "closed", True)

    def form_at(self, points=None):
        if isinstance(self.payload, FormField):
            if points is None:
                raise ValueError("field payload needs sample points")
            return self.payload(points)
        return self.payload

    @classmethod
    def A_field(cls, A, closed=None):
        return cls("A", A if isinstance(A, FormField) else cl.as_form(A), closed)

    @classmethod
    def B_field(cls, B, closed=None):
        return cls("B", B if isinstance(B, FormField) else cl.as_form(B), closed)


def is_closed(field: FormField, resolution=8, tol=CLOSED_TOL):
    pts = field.domain.grid(resolution).valid_points()
    d = calc.ext_d(field, pts, richardson=True)
    return bool(np.max(d.norm()) < tol * max(1.0, float(np.max(field(pts).norm()))))


def apply_symmetry(sym: Symmetry, rho, points=None):
    """Act on a spinor value (MixedForm) or a spinor field (FormField).

    A diffeomorphism ``phi`` acts on fields over ``phi.target`` by pullback,
    producing a field over ``phi.source``.
    """
    if isinstance(rho, FormField):
        if sym.kind == "diffeo":
            return calc.pullback(sym.payload, rho)
        return rho.map(lambda r, p: apply_symmetry(sym, r, p))
    if sym.kind == "A":
        return cl.apply_A(sym.form_at(points), rho)
    if sym.kind == "B":
        return cl.apply_B(sym.form_at(points), rho)
    raise ValueError("diffeomorphisms act on fields, not on pointwise values")


def compose_AA(A, A2):
    """``e^A e^A' = e^(A + A') e^(-A ^ A')``: returns ``(A + A', -A ^ A')``."""
    cl._require_degree(A, 1, "A")
    cl._require_degree(A2, 1, "A'")
    A, A2 = cl.as_form(A), cl.as_form(A2)
    return A + A2, -cl.wedge(A, A2)


def transport_vector(sym: Symmetry, v: GenVector, points=None) -> GenVector:
    """Section ``w`` with ``sym(v . rho) = w . sym(rho)`` for every rho.

    B-field: ``(X, f, alpha - i_X B)``.  A-field:
    ``(X, f - i_X A, alpha + 2 f A - (i_X A) A)``; the quadratic term keeps
    the pairing invariant.  Diffeomorphism (pullback by phi, ``points`` in the
    source): ``(J^-1 X, f, J^T alpha)`` with ``X, alpha`` taken at ``phi(p)``.
    """
    X, f, alpha = v.X, v.f, v.alpha
    if sym.kind == "B":
        B = sym.form_at(points)
        iXB = cl.contract(X, B).c[..., 1:4]
        return GenVector.make(X, f, alpha - iXB)
    if sym.kind == "A":
        a = cl.as_form(sym.form_at(points)).c[..., 1:4]
        iXA = np.sum(X * a, axis=-1)
        return GenVector.make(X, f - iXA, alpha + (2 * f - iXA)[..., None] * a)
    if points is None:
        raise ValueError("diffeomorphism transport needs source points")
    J = sym.payload.jacobian(points)
    X2 = np.linalg.solve(J, X[..., None])[..., 0]
    alpha2 = np.einsum("...ji,...j->...i", J, alpha)
    return GenVector.make(X2, f, alpha2)


def twist_transform(twist: Optional[TwistData], A: Optional[FormField], B: Optional[FormField],
                    domain=None, step=None, richardson=True, check=True, tol=CLOSED_TOL):
    """Twist data after acting by ``e^A e^B``.

    Returns ``(F - dA, H - dB - (dA - 2F)^A)`` as a TwistData.  Missing
    arguments are read as zero.  With ``check`` the input is required to be
    closed (``dF = 0``) at a coarse sample; ``dH + F^F`` is a 4-form and
    holds trivially in three dimensions.
    """
    ref = next((x for x in (A, B, twist.F if twist else None) if x is not None), None)
    if domain is None:
        if ref is None:
            raise ValueError("need a domain when all inputs are zero")
        domain = ref.domain
    zero = FormField(domain, lambda p: MixedForm.zeros(p.shape[:-1]), "0")
    F = twist.F if twist else zero
    H = twist.H if twist else zero
    A = A if A is not None else zero
    B = B if B is not None else zero
    if check and twist is not None:
        pts = domain.grid(8).valid_points()
        dF, compat = twist.residuals(pts, step, richardson)
        scale = max(1.0, float(np.max(F(pts).norm())))
        if np.max(dF) > tol * scale or np.max(compat) > tol * scale:
            raise ValueError("input twist data violates dF = 0 or dH + F^F = 0")
    dA = calc.d_field(A, step, richardson)
    dB = calc.d_field(B, step, richardson)

    def F_new(p):
        return F(p) - dA(p)

    def H_new(p):
        a = A(p)
        return H(p) - dB(p) - cl.wedge(dA(p) - 2 * F(p), a)

    return TwistData(FormField(domain, F_new, "F'"), FormField(domain, H_new, "H'"))
