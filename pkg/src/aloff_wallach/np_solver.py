"""Nearly parallel G2-structures inside the four-parameter family.

The condition d(phi) = lambda psi reduces to four polynomial equations in
(A, B, C, D).  They are solved by damped Newton iteration from a grid of
starting points, vectorised over all starts at once.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exterior import d
from .g2_family import G2Params, phi, psi

SQRT2 = math.sqrt(2.0)
# starts drifting towards A = B = C = 0 reach tiny residuals without being structures
DEGENERATE = 1e-3


class NoConvergence(RuntimeError):
    def __init__(self, message: str, partial: list["NpSolution"]):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class NpSolution:
    params: G2Params
    lam: float
    branch: str
    residual: float

    def row(self) -> dict:
        p = self.params
        return {"k": p.k, "l": p.l, "branch": self.branch, "A": p.A, "B": p.B, "C": p.C,
                "D": p.D, "lambda": self.lam, "residual": self.residual}


def _residual_arrays(k, l, lam, A, B, C, D):
    m = -k - l
    s = math.sqrt(k * k + l * l + m * m) / math.sqrt(6.0)
    A2, B2, C2 = A * A, B * B, C * C
    abc = A * B * C
    return np.stack([
        A2 + B2 + C2 - SQRT2 * lam * abc,
        D * (k * A2 + m * B2) - 4 * s * abc + SQRT2 * lam * s * A2 * B2,
        D * (l * B2 + k * C2) - 4 * s * abc + SQRT2 * lam * s * B2 * C2,
        D * (l * A2 + m * C2) - 4 * s * abc + SQRT2 * lam * s * A2 * C2,
    ], axis=-1)


def _jacobian_arrays(k, l, lam, A, B, C, D):
    m = -k - l
    s = math.sqrt(k * k + l * l + m * m) / math.sqrt(6.0)
    r2l = SQRT2 * lam
    J = np.empty(np.shape(A) + (4, 4))
    J[..., 0, :] = np.stack([2 * A - r2l * B * C, 2 * B - r2l * A * C, 2 * C - r2l * A * B,
                             np.zeros_like(A)], axis=-1)
    J[..., 1, :] = np.stack([2 * k * D * A - 4 * s * B * C + 2 * r2l * s * A * B * B,
                             2 * m * D * B - 4 * s * A * C + 2 * r2l * s * A * A * B,
                             -4 * s * A * B, k * A * A + m * B * B], axis=-1)
    J[..., 2, :] = np.stack([-4 * s * B * C,
                             2 * l * D * B - 4 * s * A * C + 2 * r2l * s * B * C * C,
                             2 * k * D * C - 4 * s * A * B + 2 * r2l * s * B * B * C,
                             l * B * B + k * C * C], axis=-1)
    J[..., 3, :] = np.stack([2 * l * D * A - 4 * s * B * C + 2 * r2l * s * A * C * C,
                             -4 * s * A * C,
                             2 * m * D * C - 4 * s * A * B + 2 * r2l * s * A * A * C,
                             l * A * A + m * C * C], axis=-1)
    return J


def np_residual(p: G2Params, lam: float = 1.0) -> np.ndarray:
    """Left-hand sides of the four nearly parallel equations."""
    return _residual_arrays(p.k, p.l, lam, np.float64(p.A), np.float64(p.B),
                            np.float64(p.C), np.float64(p.D))


def np_jacobian(p: G2Params, lam: float = 1.0) -> np.ndarray:
    return _jacobian_arrays(p.k, p.l, lam, np.float64(p.A), np.float64(p.B),
                            np.float64(p.C), np.float64(p.D))


def full_form_residual(p: G2Params, lam: float = 1.0) -> float:
    """Largest coefficient of d(phi) - lambda psi, computed from the forms themselves."""
    return (d(phi(p), p.sc) - lam * psi(p)).max_abs()


def newton(k: int, l: int, lam: float, x0: np.ndarray, tol: float = 1e-12,
           max_iter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on a batch of starts; returns (points, residual inf-norms)."""
    x = np.array(x0, dtype=float, copy=True)
    res = np.abs(_residual_arrays(k, l, lam, *x.T)).max(axis=-1)
    for _ in range(max_iter):
        active = res >= tol
        if not active.any():
            break
        xa = x[active]
        F = _residual_arrays(k, l, lam, *xa.T)
        J = _jacobian_arrays(k, l, lam, *xa.T)
        ok = np.abs(np.linalg.det(J)) > 1e-300
        step = np.zeros_like(xa)
        step[ok] = np.linalg.solve(J[ok], F[ok][..., None])[..., 0]
        t = np.ones(len(xa))
        r0 = np.abs(F).max(axis=-1)
        new = xa - step
        rn = np.abs(_residual_arrays(k, l, lam, *new.T)).max(axis=-1)
        for _ in range(30):
            worse = ~(rn < r0) & (t > 1e-8)
            if not worse.any():
                break
            t[worse] *= 0.5
            new[worse] = xa[worse] - t[worse, None] * step[worse]
            rn[worse] = np.abs(_residual_arrays(k, l, lam, *new[worse].T)).max(axis=-1)
        x[active] = new
        res[active] = rn
    return x, res


def canonical_coordinates(x: np.ndarray) -> np.ndarray:
    """Apply the sign symmetry row-wise so that A > 0 and B > 0."""
    x = np.array(x, dtype=float, copy=True)
    flip_a = x[:, 0] < 0
    flip_b = x[:, 1] < 0
    # (A,C) flips A alone modulo (A,B); (B,C) flips B; (A,B) flips both
    x[flip_a, 0] *= -1
    x[flip_a, 2] *= -1
    x[flip_b, 1] *= -1
    x[flip_b, 2] *= -1
    return x


def _cluster(pts: np.ndarray, tol: float) -> list[np.ndarray]:
    """Representatives of points equal up to ``tol`` in the sup norm."""
    reps: list[np.ndarray] = []
    remaining = pts
    while len(remaining):
        head = remaining[0]
        close = np.max(np.abs(remaining - head), axis=-1) < tol
        reps.append(head)
        remaining = remaining[~close]
    return reps


def _branch(p: G2Params) -> str:
    return "plus" if p.D > 0 else "minus"


def _is_generic(k: int, l: int) -> bool:
    m = -k - l
    return k != l and k != -l and l != m and l != -m and m != k and m != -k


def solve_np(k: int, l: int, lam: float = 1.0, per_axis: int = 8,
             low: float = 0.2, high: float = 4.0) -> list[NpSolution]:
    """Nearly parallel structures in the family, one representative per sign class.

    Starts are a regular grid in [low, high]^4 combined with all sign
    patterns of (A, B, C, D).  Converged points are canonicalised (A, B > 0)
    and deduplicated at 1e-6.  Results are memoised, as the search is deterministic.
    """
    return list(_solve_np(k, l, float(lam), per_axis, float(low), float(high)))


@lru_cache(maxsize=64)
def _solve_np(k: int, l: int, lam: float, per_axis: int, low: float, high: float) -> tuple[NpSolution, ...]:
    axis = np.linspace(low, high, per_axis)
    grid = np.array(list(itertools.product(axis, repeat=4)))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=4)))
    starts = (grid[None, :, :] * signs[:, None, :]).reshape(-1, 4)
    x, res = newton(k, l, lam, starts)
    good = np.isfinite(res) & (res < 1e-12) & np.all(np.abs(x) > DEGENERATE, axis=-1)
    pts = canonical_coordinates(x[good])
    found: list[NpSolution] = []
    for key in _cluster(pts, 1e-6):
        p = G2Params(k, l, *map(float, key))
        resid = float(np.abs(np_residual(p, lam)).max())
        found.append(NpSolution(p, lam, _branch(p), resid))
    found.sort(key=lambda sol: (sol.params.D < 0, sol.params.A, sol.params.B, sol.params.C))
    if _is_generic(k, l):
        branches = {sol.branch for sol in found}
        if len(found) < 2 or branches != {"plus", "minus"}:
            raise NoConvergence(f"expected two inequivalent solutions on X_{{{k},{l}}}, "
                                f"found {len(found)}", found)
    return tuple(found)


def squash_equations(t: float, lam: float) -> tuple[float, float]:
    """Coefficients of d(phi_t) - lambda psi_t on the two invariant 4-forms of the squash family.

    With dphi_t = t (t^2 + 1) (s/24) X + 2 t (s/48)^2 Y and
    psi_t = (1/6) (s/48)^2 Y + t^2 (s/48) X, after dividing out s/48.
    """
    return 2 * t * (t * t + 1) - lam * t * t, 2 * t - lam / 6


def squash_np() -> list[tuple[float, float]]:
    """Both nonzero solutions (t, lambda) of the squash nearly parallel condition."""
    # lambda = 12 t from the Y-coefficient; the X-coefficient then reads 10 t^2 = 2
    t = math.sqrt(2.0 / 10.0)
    return [(-t, -12.0 * t), (t, 12.0 * t)]


def x11_np_solutions(lam: float = 1.0) -> list[G2Params]:
    """The two nearly parallel structures on X_{1,1} with C^2 = B^2, D^2 = A^2."""
    tri = G2Params(1, 1, 2 * SQRT2 / lam, 2 / lam, 2 / lam, 2 * SQRT2 / lam)
    # A^2 = 2 B^2 / 5 with C = B, D = -A; the first equation fixes the scale
    # B^2 (2/5 + 2) = sqrt(2) lam A B^2  ->  A = 12 / (5 sqrt(2) lam)
    A = 12.0 / (5.0 * SQRT2 * lam)
    B = A * math.sqrt(5.0 / 2.0)
    strict = G2Params(1, 1, A, B, B, -A)
    return [tri, strict]


def solutions_csv(solutions: list[NpSolution]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["k", "l", "branch", "A", "B", "C", "D", "lambda", "residual"],
                            lineterminator="\n")
    writer.writeheader()
    for sol in solutions:
        writer.writerow({key: (f"{v:.9g}" if isinstance(v, float) else v) for key, v in sol.row().items()})
    return buf.getvalue()
