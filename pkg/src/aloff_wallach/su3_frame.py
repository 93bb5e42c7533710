"""The (k, l)-adapted basis of su(3) and its structure constants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .exterior import NDIM, Form


class DegenerateSubgroup(ValueError):
    """(k, l) = (0, 0) does not define a circle subgroup."""


@dataclass(frozen=True)
class FrameSpec:
    k: int
    l: int

    def __post_init__(self):
        if int(self.k) != self.k or int(self.l) != self.l:
            raise ValueError("k and l must be integers")
        if self.k == 0 and self.l == 0:
            raise DegenerateSubgroup("(k, l) = (0, 0) is not a circle subgroup")

    @property
    def m(self) -> int:
        return -self.k - self.l

    @property
    def s(self) -> float:
        return math.sqrt(self.k**2 + self.l**2 + self.m**2) / math.sqrt(6.0)

    @property
    def weights(self) -> tuple[int, int, int]:
        """Isotropy weights on V1 = <e1,e5>, V2 = <e2,e6>, V3 = <e3,e7>."""
        k, l, m = self.k, self.l, self.m
        return (k - l, l - m, m - k)

    def is_x11_type(self) -> bool:
        """True on the Weyl orbit of (1, 1), where one isotropy weight vanishes."""
        k, l, m = self.k, self.l, self.m
        return k == l or l == m or m == k


def _unit(i: int, j: int) -> np.ndarray:
    out = np.zeros((3, 3), dtype=complex)
    out[i, j] = 1.0
    return out


def build_frame(k: int, l: int) -> tuple[FrameSpec, tuple[np.ndarray, ...]]:
    """Return the frame data and the matrices (e1, ..., e7, H)."""
    fs = FrameSpec(k, l)
    m, s = fs.m, fs.s
    r2 = math.sqrt(2.0)
    E = _unit
    e1 = (E(0, 1) - E(1, 0)) / r2
    e2 = (E(1, 2) - E(2, 1)) / r2
    e3 = (E(2, 0) - E(0, 2)) / r2
    e5 = 1j * (E(0, 1) + E(1, 0)) / r2
    e6 = 1j * (E(1, 2) + E(2, 1)) / r2
    e7 = 1j * (E(0, 2) + E(2, 0)) / r2
    e4 = 1j / (3 * r2 * s) * np.diag([l - m, m - k, k - l]).astype(complex)
    H = 1j / (math.sqrt(6.0) * s) * np.diag([k, l, m]).astype(complex)
    return fs, (e1, e2, e3, e4, e5, e6, e7, H)


def killing_inner(x: np.ndarray, y: np.ndarray) -> float:
    """<X, Y> = -tr(XY)."""
    return float(-np.trace(x @ y).real)


@dataclass(frozen=True)
class StructureConstants:
    """c[a, b, c] = <[e_b, e_c], e_a> over the basis (e1..e7, H), 0-based.

    The coframe differentials follow dw^a = sum_{b<c} c^a_{bc} w^b ^ w^c,
    the sign under which dphi = +lambda psi for the nearly parallel points.
    """

    frame: FrameSpec
    c: np.ndarray = field(repr=False)

    @cached_property
    def differentials(self) -> tuple[Form, ...]:
        out = []
        for a in range(NDIM):
            coeffs = {}
            for b in range(NDIM):
                for cc in range(b + 1, NDIM):
                    v = self.c[a, b, cc]
                    if abs(v) > 1e-15:
                        coeffs[(1 << b) | (1 << cc)] = v
            out.append(Form(2, coeffs))
        return tuple(out)

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.c + self.c.transpose(0, 2, 1))))

    def jacobi_residual(self) -> float:
        # sum over cyclic (b,c,e) of c^a_{bd} c^d_{ce}
        t = np.einsum("abd,dce->abce", self.c, self.c)
        jac = t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)
        return float(np.max(np.abs(jac)))

    def isotropy_weights(self) -> tuple[float, float, float]:
        """Rotation rates of ad(sqrt(6) s H) on V1, V2, V3 (e_i -> e_{i+4})."""
        gen = math.sqrt(6.0) * self.frame.s
        # [H, e_i] = c^a_{8 i} e_a
        return tuple(gen * self.c[i + 4, 7, i] for i in range(3))


@lru_cache(maxsize=None)
def structure_constants(k: int, l: int) -> StructureConstants:
    fs, basis = build_frame(k, l)
    c = np.zeros((NDIM, NDIM, NDIM))
    for b in range(NDIM):
        for cc in range(b + 1, NDIM):
            comm = basis[b] @ basis[cc] - basis[cc] @ basis[b]
            for a in range(NDIM):
                v = killing_inner(comm, basis[a])
                c[a, b, cc] = v
                c[a, cc, b] = -v
    c[np.abs(c) < 1e-15] = 0.0
    c.setflags(write=False)
    return StructureConstants(fs, c)
