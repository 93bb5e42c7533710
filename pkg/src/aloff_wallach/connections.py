"""Invariant connections on homogeneous U(1)- and SO(3)-bundles over X_{k,l}.

Connections are parametrised as A = A_c^n + sum_p x_p G_p, where A_c^n is the
canonical connection and the G_p are fixed so(3)-valued 1-forms allowed by
the isotropy weights.  Curvature is then an explicit quadratic polynomial in
the coefficients x_p, which ``CurvatureModel`` evaluates on dense arrays.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .exterior import (Form, So3Form, basis_masks, bracket_wedge, covariant_d,
                       so3_curvature, to_dense, wedge, wedge_matrix)
from .g2_family import G2Params, metric, psi
from .su3_frame import FrameSpec

SQRT2 = math.sqrt(2.0)
SQRT6 = math.sqrt(6.0)

# relative size below which Delta, Gamma, sigma are treated as exactly zero
DEGENERACY_TOL = 1e-12


class NonBasicCurvature(RuntimeError):
    """The curvature of a supposedly invariant connection has an h-leg."""


COEFFICIENTS = ("b", "a1", "a2", "a3", "a1_extra", "a5")


@dataclass(frozen=True)
class InvariantConnection:
    n: int
    b: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a1_extra: float = 0.0
    a5: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    case_id: str = "case0"

    @property
    def irreducible(self) -> bool:
        return any(v != 0.0 for v in (self.a1, self.a2, self.a3))

    def coefficients(self, names: Sequence[str] = COEFFICIENTS) -> np.ndarray:
        return np.array([getattr(self, name) for name in names], dtype=float)

    def with_coefficients(self, names: Sequence[str], values: Sequence[float]) -> "InvariantConnection":
        return replace(self, **{name: float(v) for name, v in zip(names, values)})

    def so3_form(self, frame: FrameSpec) -> So3Form:
        gens = generators(self.alpha, self.beta)
        out = canonical_connection(frame, self.n)
        for name in COEFFICIENTS:
            value = getattr(self, name)
            if value:
                out = out + value * gens[name]
        return out

    def to_dict(self) -> dict:
        return asdict(self)


def canonical_connection(frame: FrameSpec, n: int) -> So3Form:
    """A_c^n = -(n/2) h / (sqrt(6) s) (x) T1."""
    return So3Form.along(Form.mono(8, coef=-0.5 * n / (SQRT6 * frame.s)), (1, 0, 0))


def _rotated(e_a: int, e_b: int, angle: float) -> So3Form:
    c, s = math.cos(angle), math.sin(angle)
    return (So3Form.along(Form.mono(e_a), (0, c, s))
            + So3Form.along(Form.mono(e_b), (0, -s, c)))


def generators(alpha: float = 0.0, beta: float = 0.0) -> dict[str, So3Form]:
    """The invariant directions G_p, keyed by coefficient name."""
    return {
        "b": So3Form.along(Form.mono(4), (1, 0, 0)),
        "a1": _rotated(1, 5, 0.0),
        "a2": _rotated(2, 6, alpha),
        "a3": _rotated(3, 7, beta),
        "a1_extra": So3Form.along(Form.mono(1), (1, 0, 0)),
        "a5": So3Form.along(Form.mono(5), (1, 0, 0)),
    }


def trivial_bundle_x11_generators() -> tuple[list[str], list[So3Form]]:
    """General n = 0 ansatz on X_{1,1}: w1 (x) c1 + w4 (x) c4 + w5 (x) c5."""
    names, gens = [], []
    for e in (1, 4, 5):
        for t in range(3):
            vec = [0.0, 0.0, 0.0]
            vec[t] = 1.0
            names.append(f"c{e}_{t + 1}")
            gens.append(So3Form.along(Form.mono(e), vec))
    return names, gens


@dataclass(frozen=True)
class Ansatz:
    """Which coefficients are free on P_n, and which case of the splitting applies."""

    k: int
    l: int
    n: int
    case_id: str
    free: tuple[str, ...]
    angle: str | None = None

    @property
    def weight_slots(self) -> tuple[str, ...]:
        return tuple(f for f in self.free if f in ("a1", "a2", "a3"))


def ansatz(k: int, l: int, n: int) -> Ansatz:
    frame = FrameSpec(k, l)
    w = frame.weights
    if frame.is_x11_type():
        if k != l:
            raise ValueError(f"(k, l) = ({k}, {l}) lies on the Weyl orbit of (1, 1); "
                             "use the representative with k = l")
        if n == 0:
            return Ansatz(k, l, n, "x11_case1", ("c1", "c4", "c5"))
        if n == w[1]:
            return Ansatz(k, l, n, "x11_case2", ("b", "a1_extra", "a5", "a2"))
        if n == w[2]:
            return Ansatz(k, l, n, "x11_case3", ("b", "a1_extra", "a5", "a3"))
        return Ansatz(k, l, n, "x11_case0", ("b", "a1_extra", "a5"))
    slots = [f"a{i + 1}" for i in range(3) if w[i] == n]
    if not slots:
        return Ansatz(k, l, n, "case0", ("b",))
    if len(slots) == 1:
        return Ansatz(k, l, n, f"case{slots[0][1]}", ("b", slots[0]))
    # two coinciding weights; three is impossible for (k, l) != (0, 0)
    if slots == ["a2", "a3"]:
        return Ansatz(k, l, n, "case4", ("b", "a2", "a3", "beta"), angle="beta")
    if slots == ["a1", "a3"]:
        return Ansatz(k, l, n, "case5", ("b", "a1", "a3", "beta"), angle="beta")
    return Ansatz(k, l, n, "case6", ("b", "a1", "a2", "alpha"), angle="alpha")


def gamma_delta(p: G2Params) -> tuple[float, float]:
    A2, B2, C2 = p.A**2, p.B**2, p.C**2
    k, l, m = p.k, p.l, p.m
    gamma = A2 * B2 * (m - k) + A2 * C2 * (l - m) + B2 * C2 * (k - l)
    delta = A2 * B2 * l + A2 * C2 * k + B2 * C2 * m
    return gamma, delta


def _poly_scale(p: G2Params) -> float:
    k, l, m = abs(p.k), abs(p.l), abs(p.m)
    return max(k, l, m) * max(p.A**2 * p.B**2, p.A**2 * p.C**2, p.B**2 * p.C**2)


def sigmas(p: G2Params) -> tuple[float, float, float]:
    """Existence discriminants for irreducible SO(3) instantons on P_{k-l}, P_{l-m}, P_{m-k}."""
    A, B, C, D = p.A, p.B, p.C, p.D
    k, l, m, s = p.k, p.l, p.m, p.s
    gamma, delta = gamma_delta(p)
    s1 = 3 * (m / 2 - s * A * D / (B * C)) * delta + (k - l) / 2 * gamma
    s2 = 3 * (k / 2 - s * B * D / (A * C)) * delta + (l - m) / 2 * gamma
    s3 = 3 * (l / 2 - s * C * D / (A * B)) * delta + (m - k) / 2 * gamma
    return s1, s2, s3


def _irreducible_data(p: G2Params, slot: int) -> tuple[float, float, float]:
    """(sigma_i, a_i^2, b) for the weight space V_i, 0-based."""
    A, B, C, D = p.A, p.B, p.C, p.D
    k, l, m, s = p.k, p.l, p.m, p.s
    sig = sigmas(p)[slot]
    if slot == 0:
        return sig, sig / (12 * B**2 * C**2 * s**2), (m / (2 * s) - A * D / (B * C)) / SQRT2
    if slot == 1:
        return sig, sig / (12 * A**2 * C**2 * s**2), (k / (2 * s) - B * D / (A * C)) / SQRT2
    return sig, sig / (12 * A**2 * B**2 * s**2), (l / (2 * s) - C * D / (A * B)) / SQRT2


@dataclass
class Solution:
    connection: InvariantConnection
    residual: float
    reducible: bool
    family_dim: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        return {"connection": self.connection.to_dict(), "residual": self.residual,
                "reducible": self.reducible, "family_dim": self.family_dim, "note": self.note}


@dataclass
class ClassificationReport:
    params: G2Params
    n: int
    gauge: str
    gamma: float
    delta: float
    sigma1: float
    sigma2: float
    sigma3: float
    case_id: str
    solutions: list[Solution] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def irreducible(self) -> list[Solution]:
        return [s for s in self.solutions if not s.reducible]

    @property
    def reducible(self) -> list[Solution]:
        return [s for s in self.solutions if s.reducible]

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "n": self.n, "gauge": self.gauge,
                "gamma": self.gamma, "delta": self.delta, "sigma1": self.sigma1,
                "sigma2": self.sigma2, "sigma3": self.sigma3, "case_id": self.case_id,
                "solutions": [s.to_dict() for s in self.solutions], "notes": list(self.notes)}


def instanton_curvature(conn: InvariantConnection, p: G2Params) -> So3Form:
    F = so3_curvature(conn.so3_form(p.frame), p.sc)
    if F.has_vertical_leg(1e-12 * max(1.0, F.max_abs())):
        raise NonBasicCurvature(f"curvature of {conn} has an h-leg; the ansatz is not invariant")
    return So3Form(*(c.horizontal_part() for c in F.components))


def instanton_residual(conn: InvariantConnection, p: G2Params) -> float:
    """Largest coefficient of F ^ psi over the three so(3) components."""
    F = instanton_curvature(conn, p)
    ps = psi(p)
    return max(wedge(f, ps).max_abs() for f in F.components)


def _report(p: G2Params, n: int, gauge: str) -> ClassificationReport:
    gamma, delta = gamma_delta(p)
    s1, s2, s3 = sigmas(p)
    return ClassificationReport(p, n, gauge, gamma, delta, s1, s2, s3, ansatz(p.k, p.l, n).case_id)


def _is_zero(value: float, scale: float) -> bool:
    return abs(value) <= DEGENERACY_TOL * max(scale, 1.0)


def abelian_b(p: G2Params, n: int) -> float:
    """The omega_4 coefficient of the unique Abelian instanton (requires Delta != 0)."""
    gamma, delta = gamma_delta(p)
    return -n * gamma / (6 * SQRT2 * p.s * delta)


def classify_abelian(p: G2Params, n: int) -> ClassificationReport:
    report = _report(p, n, "u1")
    gamma, delta = report.gamma, report.delta
    scale = _poly_scale(p)
    x11 = p.frame.is_x11_type()
    extra_dim = 0
    if x11:
        # the T1 directions along w1, w5 enter only through sqrt(2) BC (AD + BC)
        if _is_zero(p.A * p.D + p.B * p.C, p.B**2 * p.C**2):
            extra_dim = 2
            report.notes.append("AD + BC = 0: the w1, w5 coefficients are unconstrained")
    if not _is_zero(delta, scale):
        conn = InvariantConnection(n, b=abelian_b(p, n), case_id=report.case_id)
        report.solutions.append(Solution(conn, instanton_residual(conn, p), True, extra_dim))
    elif not _is_zero(gamma, scale):
        if n == 0:
            conn = InvariantConnection(0, case_id=report.case_id)
            report.solutions.append(Solution(conn, instanton_residual(conn, p), True, 1 + extra_dim,
                                             "Delta = 0: b is free"))
        else:
            report.notes.append("Delta = 0 and Gamma != 0: no invariant instanton unless n = 0")
    else:
        conn = InvariantConnection(n, case_id=report.case_id)
        report.solutions.append(Solution(conn, instanton_residual(conn, p), True, 1 + extra_dim,
                                         "Delta = Gamma = 0: b is free"))
    return report


def classify_so3(p: G2Params, n: int) -> ClassificationReport:
    """All invariant instantons on P_n: the reducible ones plus the irreducible +/- pairs."""
    report = classify_abelian(p, n)
    report.gauge = "so3"
    ans = ansatz(p.k, p.l, n)
    slots = [int(name[1]) - 1 for name in ans.weight_slots]
    if ans.case_id == "x11_case1":
        slots = [0]
    candidates = []
    for slot in slots:
        sig, a_sq, b = _irreducible_data(p, slot)
        if sig > 0 and not _is_zero(sig, _poly_scale(p) * max(1.0, abs(p.D) * abs(p.s))):
            candidates.append((slot, math.sqrt(a_sq), b))
    if len(slots) == 2:
        b_values = [_irreducible_data(p, slot)[2] for slot in slots]
        if math.isclose(b_values[0], b_values[1], rel_tol=1e-12, abs_tol=1e-12):
            report.notes.append("both weight brackets vanish at one b: mixed solutions not excluded")
        else:
            report.notes.append("mixed solutions excluded: the two weight brackets vanish at distinct b")
    for slot, a, b in candidates:
        name = f"a{slot + 1}"
        for sign in (1.0, -1.0):
            conn = InvariantConnection(n, b=b, case_id=report.case_id, **{name: sign * a})
            report.solutions.append(Solution(conn, instanton_residual(conn, p), False))
    return report


def deformation_matrix(p: G2Params, a: float, b: float) -> np.ndarray:
    """Linearised instanton equations on P_{k-l} in the (omega_4 T1, psi_1) directions."""
    A, B, C, D = p.A, p.B, p.C, p.D
    m, s = p.m, p.s
    _, delta = gamma_delta(p)
    return np.array([
        [SQRT2 * delta, -8 * B**2 * C**2 * s * a],
        [4 * B * C * s * a, (SQRT2 * (2 * A * D * s / (B * C) - m) + 4 * s * b) * B * C],
    ])


def deformation_det(p: G2Params, conn: InvariantConnection) -> float:
    """32 B^3 C^3 s^2 a^2 + (4 AD s - 2 BC m + 4 sqrt(2) BC b s) Delta."""
    A, B, C, D = p.A, p.B, p.C, p.D
    m, s = p.m, p.s
    _, delta = gamma_delta(p)
    a, b = conn.a1, conn.b
    return 32 * B**3 * C**3 * s**2 * a**2 + (4 * A * D * s - 2 * B * C * m + 4 * SQRT2 * B * C * b * s) * delta


class CurvatureModel:
    """F(x) = F0 + sum_p x_p L_p + sum_{p,q} x_p x_q Q_pq on a fixed ansatz.

    Components are stored densely over the 28 coframe 2-forms; the model
    evaluates curvature, the F ^ psi residual and the energy density on
    arbitrary batches of coefficient vectors.
    """

    def __init__(self, p: G2Params, base: So3Form, gens: Sequence[So3Form], names: Sequence[str]):
        sc = p.sc
        self.params = p
        self.names = tuple(names)
        self.base = base
        self.gens = tuple(gens)
        dense = lambda F: np.stack([to_dense(c) for c in F.components])  # noqa: E731
        self.F0 = dense(so3_curvature(base, sc))
        self.L = np.stack([dense(covariant_d(base, g, sc)) for g in gens])
        P = len(gens)
        self.Q = np.zeros((P, P) + self.F0.shape)
        for i in range(P):
            for j in range(P):
                self.Q[i, j] = dense(0.5 * bracket_wedge(gens[i], gens[j]))
        masks = basis_masks(2)
        h_bit = 1 << 7
        vertical = np.array([bool(mk & h_bit) for mk in masks])
        lin = np.abs(self.L).max(axis=0) if P else 0
        if (np.abs(self.F0[:, vertical]).max() > 1e-12
                or (P and np.abs(lin[:, vertical]).max() > 1e-12)
                or (P and np.abs(self.Q[..., vertical]).max() > 1e-12)):
            raise NonBasicCurvature("ansatz is not invariant: curvature acquires an h-leg")
        self.physical = ~vertical
        self.W = wedge_matrix(psi(p), 2)
        g = metric(p)
        self.norm_weights = np.array([0.0 if vertical[i] else g._weight(mk) for i, mk in enumerate(masks)])

    @classmethod
    def for_ansatz(cls, p: G2Params, n: int, names: Sequence[str],
                   alpha: float = 0.0, beta: float = 0.0) -> "CurvatureModel":
        gens = generators(alpha, beta)
        return cls(p, canonical_connection(p.frame, n), [gens[nm] for nm in names], names)

    def curvature_dense(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        F = self.F0 + np.einsum("...p,pcf->...cf", x, self.L)
        F = F + np.einsum("...p,...q,pqcf->...cf", x, x, self.Q)
        return F

    def curvature(self, x: Sequence[float]) -> So3Form:
        from .exterior import from_dense
        F = self.curvature_dense(np.asarray(x))
        return So3Form(*(from_dense(F[c], 2, 1e-14) for c in range(3)))

    def residual_vector(self, x: np.ndarray) -> np.ndarray:
        F = self.curvature_dense(x)
        R = np.einsum("ij,...cj->...ci", self.W, F)
        return R.reshape(R.shape[:-2] + (-1,))

    def residual(self, x: np.ndarray) -> np.ndarray:
        return np.abs(self.residual_vector(x)).max(axis=-1)

    def energy(self, x: np.ndarray) -> np.ndarray:
        """Invariant Yang-Mills density 1/2 |F|^2 with the metric of phi."""
        F = self.curvature_dense(x)
        return 0.5 * np.einsum("...cf,f->...", F**2, self.norm_weights)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """d(residual_vector)/dx at a single point."""
        x = np.asarray(x, dtype=float)
        dF = self.L + np.einsum("q,pqcf->pcf", x, self.Q) + np.einsum("q,qpcf->pcf", x, self.Q)
        dR = np.einsum("ij,pcj->pci", self.W, dF)
        return dR.reshape(len(x), -1).T


def sweep(k: int, l: int, n: int, fixed: dict, vary: str, values: Sequence[float]) -> list[dict]:
    """Table of sigma_i, the irreducible branch, the reducible b and det along one axis."""
    if vary not in "ABCD" or len(vary) != 1:
        raise ValueError("vary must be one of A, B, C, D")
    missing = {"A", "B", "C", "D"} - {vary} - set(fixed)
    if missing or vary in fixed:
        raise ValueError("fix exactly the three parameters that do not vary")
    ans = ansatz(k, l, n)
    slots = [int(name[1]) - 1 for name in ans.weight_slots]
    if ans.case_id == "x11_case1":
        slots = [0]
    rows = []
    for t in values:
        p = G2Params(k, l, **{vary: float(t)}, **{key: float(v) for key, v in fixed.items()})
        s1, s2, s3 = sigmas(p)
        gamma, delta = gamma_delta(p)
        a_plus = a_minus = math.nan
        if slots:
            sig, a_sq, _ = _irreducible_data(p, slots[0])
            if _is_zero(sig, _poly_scale(p) * max(1.0, abs(p.D) * abs(p.s))):
                a_plus = a_minus = 0.0
            elif sig > 0:
                a_plus, a_minus = math.sqrt(a_sq), -math.sqrt(a_sq)
        b_red = abelian_b(p, n) if delta != 0 else math.nan
        det = math.nan
        if slots == [0] and delta != 0:
            det = deformation_det(p, InvariantConnection(n, b=b_red))
        rows.append({"param_value": float(t), "sigma1": s1, "sigma2": s2, "sigma3": s3,
                     "a_plus": a_plus, "a_minus": a_minus, "b_reducible": b_red, "def_det": det})
    return rows


def grid_search(model: CurvatureModel, bounds: Sequence[tuple[float, float]], pitch: float = 1e-2,
                floor: float = 1e-4, max_candidates: int = 400, chunk: int = 200_000) -> list[np.ndarray]:
    """Find zeros of F ^ psi by a dense grid scan followed by least-squares polishing.

    Independent of any closed form: grid local minima of the residual are
    refined with a Levenberg-Marquardt solve and kept when the polished
    residual is below ``floor``.  Only 1- and 2-dimensional grids are supported.
    """
    axes = [np.arange(lo, hi + pitch / 2, pitch) for lo, hi in bounds]
    if len(axes) == 1:
        grid = axes[0][:, None]
        res = model.residual(grid)
        interior = (res[1:-1] <= res[:-2]) & (res[1:-1] <= res[2:])
        idx = np.flatnonzero(interior) + 1
        idx = np.concatenate([idx, [0, len(res) - 1]])
        starts = grid[idx]
        order = np.argsort(res[idx])
    elif len(axes) == 2:
        X, Y = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
        res = np.concatenate([model.residual(pts[i:i + chunk]) for i in range(0, len(pts), chunk)])
        R = res.reshape(X.shape)
        padded = np.pad(R, 1, constant_values=np.inf)
        centre = padded[1:-1, 1:-1]
        is_min = np.ones_like(centre, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di or dj:
                    is_min &= centre <= padded[1 + di:padded.shape[0] - 1 + di, 1 + dj:padded.shape[1] - 1 + dj]
        idx = np.flatnonzero(is_min.ravel())
        starts = pts[idx]
        order = np.argsort(res[idx])
    else:
        raise ValueError("grid_search supports at most two free coefficients")
    found: list[np.ndarray] = []
    for i in order[:max_candidates]:
        sol = least_squares(model.residual_vector, starts[i], jac=model.jacobian, method="lm",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        x = sol.x
        if model.residual(x) < floor and all(np.max(np.abs(x - y)) > 1e-6 for y in found):
            found.append(x)
    return found
