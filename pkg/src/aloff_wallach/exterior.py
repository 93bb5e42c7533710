"""Exterior algebra on the left-invariant coframe of SU(3).

The coframe is {w1, ..., w7, h}; index 8 is the h-direction (dual to the
generator of the isotropy circle).  Forms have constant coefficients and are
stored sparsely, keyed by a bitmask of their (sorted) indices.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

NDIM = 8
VERTICAL = 8
_PHYSICAL_MASK = (1 << 7) - 1
_ROUNDOFF = 64 * np.finfo(float).eps


class InputHasVerticalLeg(ValueError):
    """Raised when a metric operation receives a form with an h-leg."""


def indices_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        if not 1 <= i <= NDIM:
            raise ValueError(f"coframe index {i} outside 1..{NDIM}")
        mask |= 1 << (i - 1)
    return mask


@lru_cache(maxsize=None)
def mask_to_indices(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(NDIM) if mask >> i & 1)


@lru_cache(maxsize=None)
def merge_sign(left: int, right: int) -> int:
    """Sign of w_left ^ w_right relative to the sorted monomial (0 on overlap)."""
    if left & right:
        return 0
    swaps = 0
    for j in mask_to_indices(right):
        swaps += bin(left >> j).count("1")
    return -1 if swaps % 2 else 1


def permutation_sign(seq: Iterable[int]) -> int:
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class Form:
    """A constant-coefficient exterior form of fixed degree.

    Immutable; exact zeros are never stored.  ``Form.mono(1, 2)`` builds
    w12, with arbitrary index order allowed (the sign is absorbed).
    """

    __slots__ = ("degree", "_coeffs")

    def __init__(self, degree: int, coeffs: Mapping[int, float] | None = None):
        if not 0 <= degree <= NDIM:
            raise ValueError(f"degree {degree} outside 0..{NDIM}")
        clean = {}
        for mask, value in (coeffs or {}).items():
            if bin(mask).count("1") != degree:
                raise ValueError(f"monomial {mask_to_indices(mask)} does not have degree {degree}")
            value = float(value)
            if value != 0.0:
                clean[mask] = value
        self.degree = degree
        self._coeffs = clean

    @classmethod
    def mono(cls, *indices: int, coef: float = 1.0) -> "Form":
        sign = permutation_sign(indices)
        if sign == 0:
            return cls(len(indices))
        return cls(len(indices), {indices_to_mask(indices): sign * coef})

    @classmethod
    def scalar(cls, value: float) -> "Form":
        return cls(0, {0: value})

    @classmethod
    def zero(cls, degree: int) -> "Form":
        return cls(degree)

    @property
    def coeffs(self) -> dict[int, float]:
        return dict(self._coeffs)

    def terms(self) -> Iterator[tuple[tuple[int, ...], float]]:
        for mask in sorted(self._coeffs):
            yield mask_to_indices(mask), self._coeffs[mask]

    def coeff(self, *indices: int) -> float:
        sign = permutation_sign(indices)
        if sign == 0 or len(indices) != self.degree:
            return 0.0
        return sign * self._coeffs.get(indices_to_mask(indices), 0.0)

    def max_abs(self) -> float:
        return max((abs(v) for v in self._coeffs.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def has_vertical_leg(self, tol: float = 0.0) -> bool:
        bit = 1 << (VERTICAL - 1)
        return any(mask & bit and abs(v) > tol for mask, v in self._coeffs.items())

    def horizontal_part(self) -> "Form":
        """Drop every term with a leg along h."""
        bit = 1 << (VERTICAL - 1)
        return Form(self.degree, {k: v for k, v in self._coeffs.items() if not k & bit})

    def chop(self, tol: float = 1e-14) -> "Form":
        return Form(self.degree, {k: v for k, v in self._coeffs.items() if abs(v) > tol})

    def _check_degree(self, other: "Form") -> None:
        if other.degree != self.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")

    def __add__(self, other: "Form") -> "Form":
        self._check_degree(other)
        out = dict(self._coeffs)
        for mask, v in other._coeffs.items():
            out[mask] = out.get(mask, 0.0) + v
        return Form(self.degree, out)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.degree, {k: -v for k, v in self._coeffs.items()})

    def __mul__(self, scalar: float) -> "Form":
        return Form(self.degree, {k: scalar * v for k, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Form":
        return self * (1.0 / scalar)

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.degree == other.degree and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.degree, tuple(sorted(self._coeffs.items()))))

    def allclose(self, other: "Form", atol: float = 1e-9) -> bool:
        return self.degree == other.degree and (self - other).max_abs() <= atol

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"Form({self.degree}, 0)"
        parts = []
        for idx, v in self.terms():
            name = "w" + "".join("h" if i == VERTICAL else str(i) for i in idx) if idx else "1"
            parts.append(f"{v:+.6g}*{name}")
        return " ".join(parts)


def wedge(x: Form, y: Form) -> Form:
    degree = x.degree + y.degree
    if degree > NDIM:
        return Form(min(degree, NDIM))
    out: dict[int, float] = {}
    for mi, vi in x._coeffs.items():
        for mj, vj in y._coeffs.items():
            sign = merge_sign(mi, mj)
            if sign:
                key = mi | mj
                out[key] = out.get(key, 0.0) + sign * vi * vj
    return Form(degree, out)


def wedge_all(*forms: Form) -> Form:
    out = Form.scalar(1.0)
    for f in forms:
        out = wedge(out, f)
    return out


def d(x: Form, sc) -> Form:
    """Exterior derivative of a left-invariant form.

    ``sc`` supplies the differentials of the coframe through
    ``sc.differentials`` (a sequence of eight 2-forms); d then acts as an
    antiderivation, with constant coefficients contributing nothing.
    """
    if x.degree == NDIM:
        return Form(NDIM)
    dcof = sc.differentials
    out: dict[int, float] = {}
    for mask, value in x._coeffs.items():
        idx = mask_to_indices(mask)
        for pos, i in enumerate(idx):
            left = indices_to_mask(idx[:pos])
            right = indices_to_mask(idx[pos + 1:])
            base = -value if pos % 2 else value
            for m2, c2 in dcof[i - 1]._coeffs.items():
                s1 = merge_sign(left, m2)
                if not s1:
                    continue
                s2 = merge_sign(left | m2, right)
                if not s2:
                    continue
                key = left | m2 | right
                out[key] = out.get(key, 0.0) + s1 * s2 * base * c2
    # cancellations of exact structure leave roundoff at the scale of the inputs
    scale = x.max_abs() * max((c.max_abs() for c in dcof), default=0.0)
    return Form(x.degree + 1, out).chop(_ROUNDOFF * scale)


def contract(a: int, x: Form) -> Form:
    """Interior product with the a-th dual frame vector."""
    if x.degree == 0:
        return Form(0)
    bit = 1 << (a - 1)
    out = {}
    for mask, value in x._coeffs.items():
        if mask & bit:
            pos = bin(mask & (bit - 1)).count("1")
            out[mask ^ bit] = -value if pos % 2 else value
    return Form(x.degree - 1, out)


class DiagMetric:
    """Diagonal metric on the coframe: g = sum_a scales[a] * w_a^2."""

    __slots__ = ("scales", "orientation")

    def __init__(self, scales: Iterable[float], orientation: int = 1):
        scales = tuple(float(s) for s in scales)
        if len(scales) == 7:
            scales = scales + (1.0,)
        if len(scales) != NDIM:
            raise ValueError("a diagonal metric needs 7 or 8 scales")
        if any(not s > 0 for s in scales):
            raise ValueError("metric scales must be strictly positive")
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.scales = scales
        self.orientation = orientation

    def _weight(self, mask: int) -> float:
        w = 1.0
        for i in mask_to_indices(mask):
            w /= self.scales[i - 1]
        return w

    def volume_form(self) -> Form:
        vol = math.sqrt(math.prod(self.scales[:7]))
        return Form(7, {_PHYSICAL_MASK: self.orientation * vol})

    def __repr__(self) -> str:
        return f"DiagMetric({self.scales[:7]}, orientation={self.orientation:+d})"


def _require_basic(x: Form) -> None:
    if x.has_vertical_leg():
        raise InputHasVerticalLeg("form has a leg along the h-direction")


def hodge(x: Form, g: DiagMetric) -> Form:
    """Hodge star on the 7 physical directions (w_I ^ *w_I = |w_I|^2 vol)."""
    _require_basic(x)
    out = {}
    for mask, value in x._coeffs.items():
        comp = _PHYSICAL_MASK ^ mask
        sign = merge_sign(mask, comp)
        factor = 1.0
        for i in mask_to_indices(mask):
            factor /= math.sqrt(g.scales[i - 1])
        for j in mask_to_indices(comp):
            factor *= math.sqrt(g.scales[j - 1])
        out[comp] = g.orientation * sign * factor * value
    return Form(7 - x.degree, out)


def inner(x: Form, y: Form, g: DiagMetric) -> float:
    _require_basic(x)
    _require_basic(y)
    if x.degree != y.degree:
        return 0.0
    return sum(v * y._coeffs.get(mask, 0.0) * g._weight(mask) for mask, v in x._coeffs.items())


def norm_sq(x: Form, g: DiagMetric) -> float:
    _require_basic(x)
    return sum(v * v * g._weight(mask) for mask, v in x._coeffs.items())


# so(3)-valued forms, with [T_i, T_j] = 2 eps_ijk T_k.

_CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class So3Form:
    """A form with values in so(3), stored as its T1, T2, T3 components."""

    __slots__ = ("components",)

    def __init__(self, f1: Form, f2: Form, f3: Form):
        if not f1.degree == f2.degree == f3.degree:
            raise ValueError("so(3) components must share one degree")
        self.components = (f1, f2, f3)

    @classmethod
    def along(cls, form: Form, vec: Iterable[float]) -> "So3Form":
        """form (x) (v1 T1 + v2 T2 + v3 T3)."""
        v = tuple(vec)
        return cls(form * v[0], form * v[1], form * v[2])

    @classmethod
    def zero(cls, degree: int) -> "So3Form":
        z = Form(degree)
        return cls(z, z, z)

    @property
    def degree(self) -> int:
        return self.components[0].degree

    @property
    def f1(self) -> Form:
        return self.components[0]

    @property
    def f2(self) -> Form:
        return self.components[1]

    @property
    def f3(self) -> Form:
        return self.components[2]

    def __add__(self, other: "So3Form") -> "So3Form":
        return So3Form(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "So3Form") -> "So3Form":
        return So3Form(*(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "So3Form":
        return So3Form(*(-a for a in self.components))

    def __mul__(self, scalar: float) -> "So3Form":
        return So3Form(*(a * scalar for a in self.components))

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.components)

    def has_vertical_leg(self, tol: float = 0.0) -> bool:
        return any(c.has_vertical_leg(tol) for c in self.components)

    def is_reducible(self, tol: float = 0.0) -> bool:
        """True when only the T1 component is nonzero."""
        return self.f2.is_zero(tol) and self.f3.is_zero(tol)

    def allclose(self, other: "So3Form", atol: float = 1e-9) -> bool:
        return (self - other).max_abs() <= atol

    def __repr__(self) -> str:
        return f"So3Form(T1: {self.f1!r}; T2: {self.f2!r}; T3: {self.f3!r})"


def bracket_wedge(x: So3Form, y: So3Form) -> So3Form:
    """[x ^ y] = sum_jk x_j ^ y_k [T_j, T_k]."""
    out = [Form(x.degree + y.degree)] * 3
    for i, j, k in _CYCLIC:
        out[k] = out[k] + 2.0 * (wedge(x.components[i], y.components[j])
                                 - wedge(x.components[j], y.components[i]))
    return So3Form(*out)


def so3_d(x: So3Form, sc) -> So3Form:
    return So3Form(*(d(c, sc) for c in x.components))


def so3_wedge(x: So3Form, form: Form) -> So3Form:
    return So3Form(*(wedge(c, form) for c in x.components))


def so3_curvature(conn: So3Form, sc) -> So3Form:
    """F = dA + 1/2 [A ^ A]; e.g. F1 = dA1 + 2 A2 ^ A3."""
    if conn.degree != 1:
        raise ValueError("a connection is an so(3)-valued 1-form")
    return so3_d(conn, sc) + 0.5 * bracket_wedge(conn, conn)


def covariant_d(conn: So3Form, x: So3Form, sc) -> So3Form:
    """d_A x = dx + [A ^ x] for an adjoint-valued form x."""
    return so3_d(x, sc) + bracket_wedge(conn, x)


# Dense layout used by the vectorised curvature evaluators.

@lru_cache(maxsize=None)
def basis_masks(degree: int) -> tuple[int, ...]:
    return tuple(sorted(m for m in range(1 << NDIM) if bin(m).count("1") == degree))


@lru_cache(maxsize=None)
def basis_position(degree: int) -> dict[int, int]:
    return {m: i for i, m in enumerate(basis_masks(degree))}


def to_dense(x: Form) -> np.ndarray:
    pos = basis_position(x.degree)
    out = np.zeros(len(pos))
    for mask, v in x._coeffs.items():
        out[pos[mask]] = v
    return out


def from_dense(vec: np.ndarray, degree: int, tol: float = 0.0) -> Form:
    masks = basis_masks(degree)
    return Form(degree, {m: float(v) for m, v in zip(masks, vec) if abs(v) > tol})


def wedge_matrix(x: Form, degree: int) -> np.ndarray:
    """Matrix of y -> y ^ x acting on dense forms of the given degree."""
    src = basis_masks(degree)
    dst = basis_position(degree + x.degree)
    mat = np.zeros((len(dst), len(src)))
    for col, ms in enumerate(src):
        for mx, v in x._coeffs.items():
            sign = merge_sign(ms, mx)
            if sign:
                mat[dst[ms | mx], col] += sign * v
    return mat
