"""Pointwise graded algebra of mixed-degree complex forms in three variables.

A :class:`MixedForm` stores one complex coefficient per ascending index set
``I`` of ``{1, 2, 3}``.  Coefficient arrays carry the basis on the trailing
axis, so the same object represents a single form or a whole grid of them::

    index  0    1     2     3     4      5      6      7
    blade  1   dx1   dx2   dx3   dx12   dx13   dx23   dx123

Every sign (wedge, contraction, reversal) is derived from this one ordering.

Sections of ``T + 1 + T*`` are :class:`GenVector` values with seven
components ``(X1, X2, X3, f, a1, a2, a3)`` acting through

    v . rho = i_X rho + f tau(rho) + alpha ^ rho.
"""
from __future__ import annotations

from itertools import product

import numpy as np

BLADES: tuple[tuple[int, ...], ...] = (
    (), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2),
)
LABELS: tuple[str, ...] = tuple("".join(str(a + 1) for a in b) for b in BLADES)
DEGREE = np.array([len(b) for b in BLADES])
INDEX = {b: i for i, b in enumerate(BLADES)}
LABEL_INDEX = {lab: i for i, lab in enumerate(LABELS)}
TOP = 7


def _sort_sign(seq):
    """Return (sign, sorted tuple) of a sequence of distinct axes."""
    s = list(seq)
    sign = 1
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign, tuple(s)


def _build_tables():
    wedge = []
    for i, j in product(range(8), repeat=2):
        bi, bj = BLADES[i], BLADES[j]
        if set(bi) & set(bj):
            continue
        sign, blade = _sort_sign(bi + bj)
        wedge.append((i, j, INDEX[blade], sign))

    iota = np.zeros((3, 8, 8))
    eps = np.zeros((3, 8, 8))
    for a in range(3):
        for i, b in enumerate(BLADES):
            if a in b:
                pos = b.index(a)
                rest = b[:pos] + b[pos + 1:]
                iota[a, INDEX[rest], i] = (-1) ** pos
            else:
                sign, blade = _sort_sign((a,) + b)
                eps[a, INDEX[blade], i] = sign
    return tuple(wedge), iota, eps


WEDGE_TABLE, IOTA, EPS = _build_tables()
TAU_SIGNS = (-1.0) ** DEGREE
REVERSE_SIGNS = np.array([(-1.0) ** (k * (k - 1) // 2) for k in DEGREE])

#: Clifford generators: v . rho = sum_k v[k] * GAMMA[k] @ rho.
GAMMA = np.concatenate([IOTA, np.diag(TAU_SIGNS)[None], EPS], axis=0)


class MixedForm:
    """Mixed-degree complex form, possibly batched over leading axes.

    Args:
        coeffs: array whose trailing axis has length 8 (basis order above).
    """

    __slots__ = ("c",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.shape[-1:] != (8,):
            raise ValueError(f"trailing axis must have length 8, got {c.shape}")
        self.c = c

    # constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, shape=()):
        return cls(np.zeros(tuple(shape) + (8,), dtype=complex))

    @classmethod
    def from_terms(cls, terms, shape=None):
        """Build from ``{"": a0, "1": a1, "12": a12, ...}``.

        Values may be scalars or arrays sharing one batch shape.
        """
        if shape is None:
            shape = np.broadcast_shapes(*(np.shape(v) for v in terms.values())) if terms else ()
        c = np.zeros(tuple(shape) + (8,), dtype=complex)
        for label, value in terms.items():
            c[..., LABEL_INDEX[label]] += value
        return cls(c)

    @classmethod
    def scalar(cls, value):
        return cls.from_terms({"": value})

    @classmethod
    def one_form(cls, a1, a2, a3):
        return cls.from_terms({"1": a1, "2": a2, "3": a3})

    @classmethod
    def two_form(cls, a12, a13, a23):
        return cls.from_terms({"12": a12, "13": a13, "23": a23})

    @classmethod
    def three_form(cls, a123):
        return cls.from_terms({"123": a123})

    @classmethod
    def basis(cls, label):
        return cls.from_terms({label: 1.0})

    # access ---------------------------------------------------------------
    @property
    def shape(self):
        return self.c.shape[:-1]

    def __getitem__(self, label):
        return self.c[..., LABEL_INDEX[label]]

    def part(self, k):
        """Degree-``k`` component as a MixedForm."""
        return MixedForm(np.where(DEGREE == k, self.c, 0))

    def degree_coeffs(self, k):
        return self.c[..., DEGREE == k]

    @property
    def even(self):
        return MixedForm(np.where(DEGREE % 2 == 0, self.c, 0))

    @property
    def odd(self):
        return MixedForm(np.where(DEGREE % 2 == 1, self.c, 0))

    @property
    def top(self):
        return self.c[..., TOP]

    def conj(self):
        return MixedForm(self.c.conj())

    def norm(self):
        return np.sqrt(np.sum(np.abs(self.c) ** 2, axis=-1))

    def at(self, index):
        """Select batch entries (numpy indexing over the leading axes)."""
        return MixedForm(self.c[index])

    def allclose(self, other, atol=1e-12, rtol=0.0):
        return np.allclose(self.c, _coeffs(other), atol=atol, rtol=rtol)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        return MixedForm(self.c + _coeffs(other))

    __radd__ = __add__

    def __sub__(self, other):
        return MixedForm(self.c - _coeffs(other))

    def __rsub__(self, other):
        return MixedForm(_coeffs(other) - self.c)

    def __neg__(self):
        return MixedForm(-self.c)

    def __mul__(self, scalar):
        if isinstance(scalar, MixedForm):
            raise TypeError("use ^ for the wedge product")
        return MixedForm(self.c * np.asarray(scalar)[..., None])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return MixedForm(self.c / np.asarray(scalar)[..., None])

    def __xor__(self, other):
        return wedge(self, other)

    def __rxor__(self, other):
        return wedge(other, self)

    def __repr__(self):
        if self.shape:
            return f"MixedForm(shape={self.shape})"
        terms = [
            f"{v:.6g}" + (f"*dx{lab}" if lab else "")
            for v, lab in zip(self.c, LABELS) if v != 0
        ]
        return "MixedForm(" + (" + ".join(terms) or "0") + ")"


def _coeffs(x):
    if isinstance(x, MixedForm):
        return x.c
    # plain scalars are degree-0 forms
    x = np.asarray(x, dtype=complex)
    out = np.zeros(x.shape + (8,), dtype=complex)
    out[..., 0] = x
    return out


def as_form(x) -> MixedForm:
    return x if isinstance(x, MixedForm) else MixedForm(_coeffs(x))


class GenVector:
    """Value of a section ``X + f + alpha`` of ``T + 1 + T*``.

    Components are stored as ``(..., 7)``: vector part, scalar, covector part.
    """

    __slots__ = ("v",)

    def __init__(self, components):
        v = np.asarray(components, dtype=complex)
        if v.shape[-1:] != (7,):
            raise ValueError(f"trailing axis must have length 7, got {v.shape}")
        self.v = v

    @classmethod
    def make(cls, X=(0, 0, 0), f=0, alpha=(0, 0, 0)):
        X = np.asarray(X, dtype=complex)
        alpha = np.asarray(alpha, dtype=complex)
        f = np.asarray(f, dtype=complex)
        shape = np.broadcast_shapes(X.shape[:-1], alpha.shape[:-1], f.shape)
        out = np.zeros(shape + (7,), dtype=complex)
        out[..., :3] = X
        out[..., 3] = f
        out[..., 4:] = alpha
        return cls(out)

    @property
    def X(self):
        return self.v[..., :3]

    @property
    def f(self):
        return self.v[..., 3]

    @property
    def alpha(self):
        return self.v[..., 4:]

    @property
    def shape(self):
        return self.v.shape[:-1]

    def alpha_form(self):
        return MixedForm.one_form(self.alpha[..., 0], self.alpha[..., 1], self.alpha[..., 2])

    def __add__(self, other):
        return GenVector(self.v + other.v)

    def __sub__(self, other):
        return GenVector(self.v - other.v)

    def __mul__(self, s):
        return GenVector(self.v * np.asarray(s)[..., None])

    __rmul__ = __mul__

    def __repr__(self):
        return f"GenVector(X={self.X}, f={self.f}, alpha={self.alpha})"


# ---------------------------------------------------------------------------
# graded operations


def wedge(a, b) -> MixedForm:
    """Exterior product of two mixed forms (broadcast over batch axes)."""
    ac, bc = _coeffs(a), _coeffs(b)
    shape = np.broadcast_shapes(ac.shape[:-1], bc.shape[:-1])
    A, B = np.moveaxis(ac, -1, 0), np.moveaxis(bc, -1, 0)
    # skip basis components that vanish over the whole batch
    live_a = np.any(ac != 0, axis=tuple(range(ac.ndim - 1)))
    live_b = np.any(bc != 0, axis=tuple(range(bc.ndim - 1)))
    out = np.zeros((8,) + shape, dtype=complex)
    for i, j, k, s in WEDGE_TABLE:
        if not (live_a[i] and live_b[j]):
            continue
        if s > 0:
            out[k] += A[i] * B[j]
        else:
            out[k] -= A[i] * B[j]
    return MixedForm(np.moveaxis(out, 0, -1))


def tau(rho) -> MixedForm:
    """Parity operator: even part minus odd part."""
    return MixedForm(_coeffs(rho) * TAU_SIGNS)


def reverse(rho) -> MixedForm:
    """Reversal anti-automorphism: degree k picks up (-1)^(k(k-1)/2)."""
    return MixedForm(_coeffs(rho) * REVERSE_SIGNS)


def contract(X, rho) -> MixedForm:
    """Interior product i_X rho for vector components ``X`` of shape (..., 3)."""
    X = np.asarray(X, dtype=complex)
    rc = _coeffs(rho)
    out = 0
    for a in range(3):
        out = out + X[..., a, None] * (rc @ IOTA[a].T)
    return MixedForm(out)


def clifford_act(v: GenVector, rho) -> MixedForm:
    """Clifford action ``i_X rho + f tau(rho) + alpha ^ rho``."""
    rc = _coeffs(rho)
    out = 0
    for k in range(7):
        out = out + v.v[..., k, None] * (rc @ GAMMA[k].T)
    return MixedForm(out)


def clifford_matrix(rho) -> np.ndarray:
    """Matrix of the linear map v -> v . rho, shape (..., 8, 7)."""
    rc = _coeffs(rho)
    return np.einsum("kij,...j->...ik", GAMMA, rc)


def pairing(rho, psi):
    """Spinor pairing: top coefficient of rev(rho_-)^psi_+ - rev(rho_+)^psi_-."""
    rho, psi = as_form(rho), as_form(psi)
    value = wedge(reverse(rho.odd), psi.even) - wedge(reverse(rho.even), psi.odd)
    return value.top


def gv_pairing(v: GenVector, w: GenVector):
    """Symmetric bilinear pairing, <v, v> = alpha(X) + f^2."""
    cross = np.sum(v.alpha * w.X, axis=-1) + np.sum(w.alpha * v.X, axis=-1)
    return 0.5 * cross + v.f * w.f


def _require_degree(form, k, name):
    c = _coeffs(form)
    if np.any(c[..., DEGREE != k] != 0):
        raise ValueError(f"{name} must be a pure {k}-form")


def apply_B(B, rho) -> MixedForm:
    """B-field action ``rho + B ^ rho`` (B ^ B vanishes in three variables)."""
    _require_degree(B, 2, "B")
    rho = as_form(rho)
    return rho + wedge(B, rho)


def apply_A(A, rho) -> MixedForm:
    """A-field action ``rho + A ^ tau(rho)``."""
    _require_degree(A, 1, "A")
    rho = as_form(rho)
    return rho + wedge(A, tau(rho))


def exp_two_form(C) -> MixedForm:
    """``e^C = 1 + C`` for a 2-form in three variables."""
    _require_degree(C, 2, "C")
    return as_form(C) + 1.0


def gram_matrix() -> np.ndarray:
    """Gram matrix of :func:`gv_pairing` on the standard basis (7 x 7)."""
    eye = np.eye(7)
    return np.array([[gv_pairing(GenVector(a), GenVector(b)).real for b in eye] for a in eye])
