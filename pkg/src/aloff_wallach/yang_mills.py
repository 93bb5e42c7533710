"""Invariant Yang-Mills energy, its derivatives and critical points.

By homogeneity the energy of an invariant connection is its pointwise
density 1/2 |F|^2 times the volume, so the density is used throughout.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import root

from .connections import (CurvatureModel, InvariantConnection, _is_zero, _poly_scale,
                          gamma_delta, instanton_curvature, instanton_residual)
from .exterior import norm_sq
from .g2_family import G2Params, metric

FD_STEP = 1e-5


class DeltaZero(ValueError):
    """Delta = 0, so there is no unique Abelian instanton to test."""


def ym_energy(p: G2Params, conn: InvariantConnection) -> float:
    F = instanton_curvature(conn, p)
    g = metric(p)
    return 0.5 * sum(norm_sq(f, g) for f in F.components)


def _central(f: Callable[[np.ndarray], float], x: np.ndarray, i: int, h: float) -> float:
    e = np.zeros_like(x)
    e[i] = h
    return (f(x + e) - f(x - e)) / (2 * h)


def fd_gradient(f: Callable[[np.ndarray], float], x: Sequence[float], h: float = FD_STEP) -> np.ndarray:
    """Central differences with one Richardson step."""
    x = np.asarray(x, dtype=float)
    out = np.empty(len(x))
    for i in range(len(x)):
        coarse = _central(f, x, i, h)
        fine = _central(f, x, i, h / 2)
        out[i] = (4 * fine - coarse) / 3
    return out


def _second(f, x, i, j, h):
    ei = np.zeros_like(x)
    ej = np.zeros_like(x)
    ei[i] = h
    ej[j] = h
    if i == j:
        return (f(x + ei) - 2 * f(x) + f(x - ei)) / h**2
    return (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)


def fd_hessian(f: Callable[[np.ndarray], float], x: Sequence[float], h: float = 1e-3) -> np.ndarray:
    """Second differences with one Richardson step, symmetrised.

    The energy is a quartic polynomial, so a larger step than for the
    gradient keeps cancellation error well below the truncation error that
    Richardson removes.
    """
    x = np.asarray(x, dtype=float)
    P = len(x)
    H = np.empty((P, P))
    for i in range(P):
        for j in range(i, P):
            coarse = _second(f, x, i, j, h)
            fine = _second(f, x, i, j, h / 2)
            H[i, j] = H[j, i] = (4 * fine - coarse) / 3
    return H


def _energy_of(p: G2Params, conn: InvariantConnection, names: Sequence[str]):
    return lambda x: ym_energy(p, conn.with_coefficients(names, x))


def ym_gradient(p: G2Params, conn: InvariantConnection, names: Sequence[str]) -> np.ndarray:
    return fd_gradient(_energy_of(p, conn, names), conn.coefficients(names))


def ym_hessian(p: G2Params, conn: InvariantConnection, names: Sequence[str]) -> np.ndarray:
    return fd_hessian(_energy_of(p, conn, names), conn.coefficients(names))


def symmetric_eigenvalues(H: np.ndarray) -> np.ndarray:
    if H.shape == (1, 1):
        return H[0].copy()
    if H.shape == (2, 2):
        mean = 0.5 * (H[0, 0] + H[1, 1])
        rad = math.hypot(0.5 * (H[0, 0] - H[1, 1]), H[0, 1])
        return np.array([mean - rad, mean + rad])
    return np.linalg.eigvalsh(H)


def morse_index(H: np.ndarray, tol: float = 1e-9) -> int:
    eig = symmetric_eigenvalues(H)
    scale = max(1.0, float(np.abs(eig).max()))
    return int(np.sum(eig < -tol * scale))


@dataclass
class YmPoint:
    conn: InvariantConnection
    names: tuple[str, ...]
    energy: float
    grad: np.ndarray
    hessian: np.ndarray
    index: int
    is_instanton: bool

    def to_dict(self) -> dict:
        out = {name: float(v) for name, v in zip(self.names, self.conn.coefficients(self.names))}
        out.update(energy=self.energy, index=self.index, is_instanton=self.is_instanton)
        return out


def analyse_point(p: G2Params, conn: InvariantConnection, names: Sequence[str],
                  instanton_tol: float = 1e-8) -> YmPoint:
    names = tuple(names)
    H = ym_hessian(p, conn, names)
    return YmPoint(conn, names, ym_energy(p, conn), ym_gradient(p, conn, names), H,
                   morse_index(H), instanton_residual(conn, p) < instanton_tol)


def ym_criticality_residual(p: G2Params) -> float:
    """Polynomial whose vanishing makes the Abelian instanton Yang-Mills critical."""
    _, delta = gamma_delta(p)
    if _is_zero(delta, _poly_scale(p)):
        raise DeltaZero("Delta = 0: the Abelian instanton is not unique")
    A2, B2, C2 = p.A**2, p.B**2, p.C**2
    return (A2 * B2 * (A2 - B2) * p.l + A2 * C2 * (C2 - A2) * p.k
            + B2 * C2 * (B2 - C2) * p.m)


def abelian_critical_b(p: G2Params, n: int) -> float:
    """Minimiser of the energy along the Abelian family b w4 (x) T1."""
    A4, B4, C4 = p.A**4, p.B**4, p.C**4
    k, l, m, s = p.k, p.l, p.m, p.s
    num = A4 * B4 * l * (k - m) + A4 * C4 * k * (m - l) + B4 * C4 * m * (l - k)
    den = A4 * B4 * l * l + A4 * C4 * k * k + B4 * C4 * m * m
    return n / (6 * math.sqrt(2) * s) * num / den


@dataclass
class Landscape:
    a_name: str
    a_values: np.ndarray
    b_values: np.ndarray
    energy: np.ndarray
    critical_points: list[YmPoint]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "energy"])
        for i, a in enumerate(self.a_values):
            for j, b in enumerate(self.b_values):
                w.writerow([f"{a:.9g}", f"{b:.9g}", f"{self.energy[i, j]:.9g}"])
        return buf.getvalue()

    def critical_json(self) -> list[dict]:
        out = []
        for pt in self.critical_points:
            out.append({"a": float(getattr(pt.conn, self.a_name)), "b": float(pt.conn.b),
                        "energy": pt.energy, "index": pt.index, "is_instanton": pt.is_instanton})
        return out


def _energy_derivatives(model: CurvatureModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact gradient and Hessian of the model energy (used only to polish roots)."""
    F = model.curvature_dense(x)
    dF = model.L + np.einsum("q,pqcf->pcf", x, model.Q) + np.einsum("q,qpcf->pcf", x, model.Q)
    w = model.norm_weights
    grad = np.einsum("cf,pcf,f->p", F, dF, w)
    ddF = model.Q + np.swapaxes(model.Q, 0, 1)
    hess = np.einsum("pcf,qcf,f->pq", dF, dF, w) + np.einsum("cf,pqcf,f->pq", F, ddF, w)
    return grad, hess


def landscape_grid(p: G2Params, n: int, a_name: str, a_range: tuple[float, float],
                   b_range: tuple[float, float], resolution: int = 200,
                   alpha: float = 0.0, beta: float = 0.0) -> Landscape:
    """Energy on a resolution x resolution grid in the (a, b) plane, plus its critical points."""
    names = ("b", a_name)
    model = CurvatureModel.for_ansatz(p, n, names, alpha, beta)
    a_vals = np.linspace(*a_range, resolution) if resolution > 1 else np.array([a_range[0]])
    b_vals = np.linspace(*b_range, resolution) if resolution > 1 else np.array([b_range[0]])
    Ag, Bg = np.meshgrid(a_vals, b_vals, indexing="ij")
    pts = np.stack([Bg.ravel(), Ag.ravel()], axis=-1)
    energy = model.energy(pts).reshape(Ag.shape)
    crit = []
    if resolution > 2:
        grads = np.array([_energy_derivatives(model, x)[0] for x in pts])
        gnorm = np.abs(grads).max(axis=-1).reshape(Ag.shape)
        padded = np.pad(gnorm, 1, constant_values=np.inf)
        is_min = np.ones_like(gnorm, dtype=bool)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di or dj:
                    is_min &= gnorm <= padded[1 + di:padded.shape[0] - 1 + di,
                                              1 + dj:padded.shape[1] - 1 + dj]
        seen: list[np.ndarray] = []
        for idx in np.flatnonzero(is_min.ravel()):
            sol = root(lambda x: _energy_derivatives(model, x)[0], pts[idx],
                       jac=lambda x: _energy_derivatives(model, x)[1], method="hybr", tol=1e-14)
            x = np.where(np.abs(sol.x) < 1e-13, 0.0, sol.x)
            inside = (a_range[0] <= x[1] <= a_range[1]) and (b_range[0] <= x[0] <= b_range[1])
            if not inside or np.abs(_energy_derivatives(model, x)[0]).max() > 1e-10:
                continue
            if any(np.max(np.abs(x - y)) < 1e-6 for y in seen):
                continue
            seen.append(x)
            conn = InvariantConnection(n, alpha=alpha, beta=beta).with_coefficients(names, x)
            crit.append(analyse_point(p, conn, names))
        crit.sort(key=lambda pt: (pt.energy, pt.conn.b, getattr(pt.conn, a_name)))
    return Landscape(a_name, a_vals, b_vals, energy, crit)
