"""The four-parameter family of homogeneous coclosed G2-structures on X_{k,l}."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .exterior import DiagMetric, Form, d, hodge, inner, norm_sq, wedge
from .su3_frame import FrameSpec, StructureConstants, structure_constants

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class G2Params:
    k: int
    l: int
    A: float
    B: float
    C: float
    D: float

    def __post_init__(self):
        FrameSpec(self.k, self.l)
        for name in "ABCD":
            v = getattr(self, name)
            if not (math.isfinite(v) and v != 0.0):
                raise ValueError(f"{name} must be a finite nonzero real (got {v})")

    @property
    def frame(self) -> FrameSpec:
        return FrameSpec(self.k, self.l)

    @property
    def m(self) -> int:
        return -self.k - self.l

    @property
    def s(self) -> float:
        return self.frame.s

    @property
    def sc(self) -> StructureConstants:
        return structure_constants(self.k, self.l)

    def replace(self, **kw) -> "G2Params":
        vals = dict(k=self.k, l=self.l, A=self.A, B=self.B, C=self.C, D=self.D)
        vals.update(kw)
        return G2Params(**vals)

    def scaled(self, mu: float) -> "G2Params":
        return self.replace(A=mu * self.A, B=mu * self.B, C=mu * self.C, D=mu * self.D)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_dict(self) -> dict:
        return {"k": self.k, "l": self.l, "A": self.A, "B": self.B, "C": self.C, "D": self.D}

    @classmethod
    def from_dict(cls, data: dict) -> "G2Params":
        return cls(int(data["k"]), int(data["l"]), float(data["A"]), float(data["B"]),
                   float(data["C"]), float(data["D"]))

    @classmethod
    def from_json(cls, text: str) -> "G2Params":
        return cls.from_dict(json.loads(text))


def phi(p: G2Params) -> Form:
    A, B, C, D = p.A, p.B, p.C, p.D
    abc = A * B * C
    out = (Form.mono(1, 2, 3, coef=abc) + Form.mono(1, 6, 7, coef=-abc)
           + Form.mono(2, 5, 7, coef=abc) + Form.mono(3, 5, 6, coef=-abc))
    horizontal = (Form.mono(1, 5, coef=A * A) + Form.mono(2, 6, coef=B * B)
                  + Form.mono(3, 7, coef=C * C))
    return out - D * wedge(Form.mono(4), horizontal)


def psi(p: G2Params) -> Form:
    A, B, C, D = p.A, p.B, p.C, p.D
    abcd = A * B * C * D
    return (Form.mono(4, 5, 6, 7, coef=abcd) + Form.mono(2, 3, 4, 5, coef=-abcd)
            + Form.mono(1, 3, 4, 6, coef=abcd) + Form.mono(1, 2, 4, 7, coef=-abcd)
            + Form.mono(2, 3, 6, 7, coef=B * B * C * C)
            + Form.mono(1, 3, 5, 7, coef=A * A * C * C)
            + Form.mono(1, 2, 5, 6, coef=A * A * B * B))


def orientation(p: G2Params) -> int:
    """Orientation making phi ^ psi a positive multiple of the volume form."""
    return 1 if p.D > 0 else -1


def metric(p: G2Params) -> DiagMetric:
    A2, B2, C2, D2 = p.A**2, p.B**2, p.C**2, p.D**2
    return DiagMetric((A2, B2, C2, D2, A2, B2, C2, 1.0), orientation(p))


def volume(p: G2Params) -> Form:
    """Riemannian volume form of g_phi in the orientation of ``orientation``."""
    return metric(p).volume_form()


def phi_wedge_psi(p: G2Params) -> Form:
    """phi ^ psi = 7 vol; this is the quantity printed as 7 A^2 B^2 C^2 D w1..7."""
    return wedge(phi(p), psi(p))


def tau0_closed_form(p: G2Params) -> float:
    A, B, C, D = p.A, p.B, p.C, p.D
    k, l, m, s = p.k, p.l, p.m, p.s
    rhs = 4 * (A / (B * C) + B / (A * C) + C / (A * B)) - (D / s) * (l / C**2 + k / B**2 + m / A**2)
    return SQRT2 * rhs / 7.0


def tau0_projection(p: G2Params) -> float:
    """<dphi, psi> / |psi|^2 with the metric of phi."""
    g = metric(p)
    ps = psi(p)
    return inner(d(phi(p), p.sc), ps, g) / norm_sq(ps, g)


def tau0(p: G2Params) -> float:
    return tau0_closed_form(p)


def tau3_residual(p: G2Params) -> Form:
    """*(dphi - tau0 psi), the remaining torsion 3-form."""
    return hodge(d(phi(p), p.sc) - tau0(p) * psi(p), metric(p))


# Sign flips (A,B) -> (-A,-B), (B,C) -> (-B,-C), (A,C) -> (-A,-C) fix phi.
SIGN_GROUP = ((1, 1, 1), (-1, -1, 1), (1, -1, -1), (-1, 1, -1))


def orbit(p: G2Params) -> list[G2Params]:
    return [p.replace(A=sa * p.A, B=sb * p.B, C=sc * p.C) for sa, sb, sc in SIGN_GROUP]


def canonicalize(p: G2Params) -> G2Params:
    """Representative of the sign orbit with A > 0 and B > 0."""
    for q in orbit(p):
        if q.A > 0 and q.B > 0:
            return q
    raise AssertionError("unreachable: the sign group acts transitively on sign(A), sign(B)")
