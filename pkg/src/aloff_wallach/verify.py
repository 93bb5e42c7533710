"""Reproduction suite: every published number recomputed from first principles.

Each record compares a printed value with the computed one.  Records whose
printed value is known to be inconsistent with the rest of the theory carry
a note; they report ``flagged`` instead of ``fail`` when they disagree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.optimize import brentq

from .connections import (SQRT2, InvariantConnection, So3Form, abelian_b,
                          classify_abelian, classify_so3, deformation_det, gamma_delta,
                          instanton_curvature, instanton_residual, sigmas, sweep)
from .exterior import Form, so3_curvature, wedge
from .g2_family import G2Params, canonicalize, psi
from .np_solver import np_residual, solve_np, squash_equations, squash_np, x11_np_solutions
from .topology import char_classes, weight_bundle_classes, weight_bundles
from .yang_mills import (CurvatureModel, abelian_critical_b, analyse_point, landscape_grid,
                         ym_criticality_residual)

R5 = math.sqrt(5.0)


@dataclass(frozen=True)
class VerifyRecord:
    claim_id: str
    expected: float
    computed: float
    tolerance: float
    note: str = ""

    @property
    def agrees(self) -> bool:
        return abs(self.expected - self.computed) <= self.tolerance

    @property
    def status(self) -> str:
        if self.agrees:
            return "pass"
        return "flagged" if self.note else "fail"

    def to_dict(self) -> dict:
        return {"claim_id": self.claim_id, "expected": self.expected, "computed": self.computed,
                "tolerance": self.tolerance, "status": self.status, "note": self.note}


def _rec(claim, expected, computed, tol, note=""):
    return VerifyRecord(claim, float(expected), float(computed), float(tol), note)


def _flag(ok: bool) -> float:
    return 1.0 if ok else 0.0


# Printed nearly parallel data: (k, l) -> branch -> (A, B, C, D, s1, s2, s3, bundle n)
NP_TABLES = {
    "example5": ((1, 2), {
        "phi_plus": (2.82249, 2.29632, 1.79654, 2.49609, -694.91837, -357.13002, 102.96860, -4),
        "phi_minus": (1.69915, 2.63936, 2.72083, -1.72713, 257.21323, -623.28938, -676.14197, -1)}),
    "example6": ((1, 3), {
        "phi_plus": (2.81314, 2.38489, 1.76003, 2.30416, -1304.73725, -794.17740, 286.31370, -5),
        "phi_minus": (1.70181, 2.61482, 2.73734, -1.76385, 468.21163, -1124.80823, -1272.28946, -2)}),
    "example7": ((1, 4), {
        "phi_plus": (2.80647, 2.42496, 1.74612, 2.20834, -2113.76099, -1378.20704, 526.44201, -6),
        "phi_minus": (1.01066, 2.42496, 1.74612, -1.79228, 349.25330, -1593.71394, -823.16662, -3)}),
    "example8": ((2, 3), {
        "phi_plus": (2.82707, 2.19724, 1.84821, 2.66829, -1857.93578, -753.70309, 107.33579, -7),
        "phi_minus": (1.69781, 2.65772, 2.70655, -1.70795, 705.20889, -1726.54024, -1812.54120, -1)}),
    "example9": ((2, 11), {
        "phi_plus": (2.80000, 2.45576, 1.73649, 2.13220, -14809.57254, -10158.19056, 4009.81206, -15),
        "phi_minus": (1.70630, 2.58424, 2.75458, -1.82250, 5116.36820, -12243.99444, -14559.71627, -9)}),
}

# printed (w2, p1) of the bundle carrying irreducible instantons
NP_TOPOLOGY = {
    "example5": {"phi_plus": (0, 2), "phi_minus": (1, 1)},
    "example6": {"phi_plus": (1, 12), "phi_minus": (0, 4)},
    "example7": {"phi_plus": (0, 15), "phi_minus": (1, 9)},
    "example8": {"phi_plus": (1, 11), "phi_minus": (1, 1)},
    "example9": {"phi_plus": (1, 78), "phi_minus": (1, 81)},
}

EXAMPLE7_NOTE = "printed phi- row repeats B, C of phi+ and does not solve the nearly parallel system"


def x1m1_np_params() -> G2Params:
    A = -4 * math.sqrt(2 / 5)
    B = 4 / 15 * math.sqrt(75 + 15 * R5)
    C = -4 / 15 * math.sqrt(75 - 15 * R5)
    D = -16 / 45 * math.sqrt(30)
    return G2Params(1, -1, A, B, C, D)


def _nearly_parallel_records() -> Iterator[VerifyRecord]:
    for ex, ((k, l), rows) in NP_TABLES.items():
        sols = {("phi_plus" if s.branch == "plus" else "phi_minus"): s for s in solve_np(k, l)}
        for branch, printed in rows.items():
            note = EXAMPLE7_NOTE if (ex, branch) == ("example7", "phi_minus") else ""
            p = sols[branch].params
            for name, exp, comp in zip("ABCD", printed[:4], (p.A, p.B, p.C, p.D)):
                yield _rec(f"{ex}.{branch}.{name}", exp, comp, 1e-4, note)
            sig = sigmas(p)
            for i in range(3):
                yield _rec(f"{ex}.{branch}.sigma{i + 1}", printed[4 + i], sig[i], 1e-3, note)
            weights = weight_bundles(k, l)
            positive = [weights[i] for i in range(3) if sig[i] > 0]
            yield _rec(f"{ex}.{branch}.bundle", printed[7], positive[0] if len(positive) == 1 else math.nan, 0)
            w2, p1 = NP_TOPOLOGY[ex][branch]
            cc = char_classes(k, l, printed[7])
            yield _rec(f"{ex}.{branch}.w2", w2, cc.w2, 0)
            yield _rec(f"{ex}.{branch}.p1", p1, cc.p1, 0)
        plus, minus = (char_classes(k, l, rows[b][7]) for b in ("phi_plus", "phi_minus"))
        yield _rec(f"{ex}.distinct_bundles", 1.0, _flag((plus.w2, plus.p1) != (minus.w2, minus.p1)), 0)


def _merging_records() -> Iterator[VerifyRecord]:
    for A in (0.25, 0.5, 0.9, 1.3):
        p = G2Params(1, -1, A, 1, 1, 1)
        yield _rec(f"example3.sigma1.A={A}", 2 * (1 - A * A), sigmas(p)[0], 1e-12)
    r = classify_so3(G2Params(1, -1, 0.5, 1, 1, 1), 2)
    yield _rec("example3.irreducible_count.A=0.5", 2, len(r.irreducible), 0)
    f3 = lambda A: sigmas(G2Params(1, -1, A, 1, 1, 1))[0]  # noqa: E731
    yield _rec("example3.merge_point", 1.0, brentq(f3, 0.5, 1.4, xtol=1e-14), 1e-6)
    for A in (0.3, 0.9, 1.2, 1.5, 2.0):
        p = G2Params(1, -5, A, 1, 1, 1)
        yield _rec(f"example4.sigma1.A={A}", (A * A - 1) * (12 * math.sqrt(7) * A - 42), sigmas(p)[0], 1e-9)
    f4 = lambda A: sigmas(G2Params(1, -5, A, 1, 1, 1))[0]  # noqa: E731
    yield _rec("example4.merge_point_1", 1.0, brentq(f4, 0.5, 1.2, xtol=1e-14), 1e-6)
    yield _rec("example4.merge_point_2", math.sqrt(7) / 2, brentq(f4, 1.2, 1.5, xtol=1e-14), 1e-6)
    yield _rec("example4.bundle_label", 3, 1 - (-5), 0,
               "text names P_3 while k - l = 6 and the figure caption says P_6")
    # determinant of the deformation system at the reducible instanton
    rng = np.random.default_rng(7)
    worst_printed = worst_derived = 0.0
    for _ in range(100):
        while True:
            vals = rng.uniform(0.3, 3.0, 4) * rng.choice([-1, 1], 4)
            k, l = [(1, 2), (2, 3), (1, -1), (1, 3), (2, 5)][rng.integers(5)]
            p = G2Params(k, l, *vals)
            if abs(gamma_delta(p)[1]) > 1e-3:
                break
        det = deformation_det(p, InvariantConnection(k - l, b=abelian_b(p, k - l)))
        s1 = sigmas(p)[0]
        worst_printed = max(worst_printed, abs(det / (8 * p.B * p.C * s1 / 3) - 1))
        worst_derived = max(worst_derived, abs(det / (-4 * p.B * p.C * s1 / 3) - 1))
    yield _rec("obstruction.det_equals_8BC_sigma1_over_3", 0.0, worst_printed, 1e-9,
               "substituting the reducible b into the printed determinant gives -4 BC sigma1 / 3")
    yield _rec("obstruction.det_equals_minus_4BC_sigma1_over_3", 0.0, worst_derived, 1e-9)


def _x1m1_records() -> Iterator[VerifyRecord]:
    p = x1m1_np_params()
    yield _rec("x1m1_np.np_residual", 0.0, float(np.abs(np_residual(p)).max()), 1e-12)
    solved = {s.branch: s.params for s in solve_np(1, -1)}["minus"]
    can = canonicalize(p)
    yield _rec("x1m1_np.np_matches_solver", 0.0,
               max(abs(a - b) for a, b in zip((can.A, can.B, can.C, can.D),
                                              (solved.A, solved.B, solved.C, solved.D))), 1e-12)
    yield _rec("x1m1_np.sigma1", -14336 / 225, sigmas(p)[0], 1e-9,
               "the sigma1 formula evaluated on the printed structure gives -17408/225; sign agrees")
    yield _rec("x1m1_np.sigma1_negative", 1.0, _flag(sigmas(p)[0] < 0), 0)
    yield _rec("x1m1_np.sigma2_negative", 1.0, _flag(sigmas(p)[1] < 0), 0)
    yield _rec("x1m1_np.sigma3_positive", 1.0, _flag(sigmas(p)[2] > 0), 0)
    for n in (1, 2, -3):
        # printed connection (n/2) h_hat + a4 w4, with h_hat = h / (sqrt 6 s)
        a4 = n * math.sqrt(30) / 36
        conn = (So3Form.along(Form.mono(8, coef=0.5 * n / (math.sqrt(6) * p.s)), (1, 0, 0))
                + So3Form.along(Form.mono(4, coef=a4), (1, 0, 0)))
        F = so3_curvature(conn, p.sc)
        res = max(wedge(f, psi(p)).max_abs() for f in F.components)
        yield _rec(f"x1m1_np.abelian_a4.n={n}", 0.0, res, 1e-9)
        yield _rec(f"x1m1_np.abelian_b_relabelled.n={n}", a4, abelian_b(p, -n), 1e-12)
    a3 = math.sqrt(15) / 60 * math.sqrt(5 - R5) * math.sqrt(13 * R5 - 25)
    a4 = -math.sqrt(6) / 36 * (45 - 7 * R5) / (5 + R5)
    yield _rec("x1m1_np.irreducible_a3_radical_residual", 0.0,
               instanton_residual(InvariantConnection(-1, b=a4, a3=a3), p), 1e-9,
               "printed a3 radical disagrees with the instanton equations; the saddle value a is correct")
    sols = classify_so3(p, -1).irreducible
    yield _rec("x1m1_np.irreducible_a4", a4, sols[0].connection.b, 1e-12)
    yield _rec("x1m1_np.irreducible_on_P2", 0, len(classify_so3(p, 2).irreducible), 0)
    yield _rec("x1m1_np.irreducible_a2_zero", 0.0, max(abs(s.connection.a2) for s in sols), 0)
    # saddle points of the energy in the a2 = 0 plane
    a = math.sqrt(12 * R5 - 21) / 6
    b = -math.sqrt(6) * (202 * R5 - 345) / (36 * (14 * R5 - 5))
    yield _rec("x1m1_saddle.a", a, abs(sols[0].connection.a3), 1e-12)
    yield _rec("x1m1_saddle.b", b, sols[0].connection.b, 1e-12)
    pt = analyse_point(p, InvariantConnection(-1, b=b, a3=a), ("b", "a3"))
    yield _rec("x1m1_saddle.gradient", 0.0, float(np.abs(pt.grad).max()), 1e-6)
    yield _rec("x1m1_saddle.index", 1, pt.index, 0)
    # printed E(a, b) is |F|^2, twice the density used here; the single scale is fitted at a = b = 0
    model = CurvatureModel.for_ansatz(p, -1, ("b", "a3"))
    scale = _printed_energy(0.0, 0.0) / float(model.energy(np.zeros(2)))
    yield _rec("x1m1_saddle.energy_scale", 2.0, scale, 1e-12)
    yield _rec("x1m1_saddle.energy_at_(0.3,-0.2)", _printed_energy(0.3, -0.2),
               scale * float(model.energy(np.array([-0.2, 0.3]))), 1e-12)
    det = 1265625 / 81920000 * (250875 - 126967 * R5) / (4580 - 1364 * R5)
    tr = 1874 / 512000 * (54305 * R5 - 28931) / (402 - 56 * R5)
    H = scale * pt.hessian
    yield _rec("x1m1_saddle.hessian_det", det, np.linalg.det(H), 1e-6)
    yield _rec("x1m1_saddle.hessian_trace", tr, np.trace(H), 1e-6,
               "the trace of the printed energy's Hessian is (735 + 4155 sqrt 5)/8192; the sign agrees")
    yield _rec("x1m1_saddle.hessian_trace_exact", (735 + 4155 * R5) / 8192, np.trace(H), 1e-6)
    land = landscape_grid(p, -1, "a3", (-1.5, 1.5), (-1.5, 1.5), 200)
    minima = [c for c in land.critical_points if c.index == 0]
    saddles = [c for c in land.critical_points if c.index == 1]
    yield _rec("x1m1_landscape.local_minima", 3, len(minima), 0)
    yield _rec("x1m1_landscape.saddles", 2, len(saddles), 0)
    yield _rec("x1m1_landscape.saddles_are_instantons", 1.0, _flag(all(s.is_instanton for s in saddles)), 0)
    glob = land.critical_points[0]
    yield _rec("x1m1_landscape.global_minimum_reducible", 1.0,
               _flag(glob.is_instanton and abs(glob.conn.a3) < 1e-9), 0)


def _printed_energy(a: float, b: float) -> float:
    P, M = 75 + 15 * R5, 75 - 15 * R5
    return (25 / 4096 + 50625 / 4096 * (2 * math.sqrt(6) * b + 1) ** 2 / P**2
            + 50625 / 4096 * (2 * math.sqrt(6) * b + 8 * a * a - 1) ** 2 / M**2
            + 1125 / 256 * a * a / P
            + 91125 / 147456 * a * a * (4 * math.sqrt(3) * b + 3 * math.sqrt(2)) ** 2 / M)


def _abelian_ym_records() -> Iterator[VerifyRecord]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10):
        p = G2Params(1, 2, *rng.uniform(0.5, 2.5, 4))
        model = CurvatureModel.for_ansatz(p, 3, ("b",))
        # exact minimiser of the quadratic energy in b
        e0, e1, e2 = (float(model.energy(np.array([t]))) for t in (-1.0, 0.0, 1.0))
        b_min = (e0 - e2) / (2 * (e0 - 2 * e1 + e2))
        worst = max(worst, abs(b_min - abelian_critical_b(p, 3)))
    yield _rec("abelian_ym.critical_b", 0.0, worst, 1e-9)
    for sol in solve_np(2, 3):
        yield _rec(f"ym_hypersurface.np.{sol.branch}", 0.0,
                   ym_criticality_residual(sol.params), 1e-6)


def _x11_records() -> Iterator[VerifyRecord]:
    A, B = 0.6, 1.3
    p = G2Params(1, 1, A, B, B, A)
    gamma, delta = gamma_delta(p)
    yield _rec("x11.abelian.gamma", 0.0, gamma, 1e-12)
    yield _rec("x11.abelian.delta", 2 * B * B * (A * A - B * B), delta, 1e-12)
    for n in (1, 2, 5):
        yield _rec(f"x11.abelian.b_zero.n={n}", 0.0, classify_abelian(p, n).solutions[0].connection.b, 1e-12)
    q = G2Params(1, 1, 1.1, 1.1, 1.1, 1.1)
    yield _rec("x11.abelian.family_at_A_eq_B", 1, classify_abelian(q, 2).solutions[0].family_dim, 0)
    a1 = math.sqrt((B**4 - A**4) / (2 * B**4))
    a4 = -(A * A + B * B) / (SQRT2 * B * B)
    yield _rec("x11.so3.P0.residual", 0.0, instanton_residual(InvariantConnection(0, b=a4, a1=a1), p), 1e-9)
    F = instanton_curvature(InvariantConnection(0, b=a4, a1=a1), p)
    t = A * A / (B * B)
    yield _rec("x11.so3.P0.curvature.f1.w15", -(t + 1) * t, F.f1.coeff(1, 5), 1e-12)
    yield _rec("x11.so3.P0.curvature.f1.w26", (t + 1) / 2, F.f1.coeff(2, 6), 1e-12)
    yield _rec("x11.so3.P0.curvature.f2.w45", math.sqrt(1 - t * t) * t, F.f2.coeff(4, 5), 1e-12)
    yield _rec("x11.so3.P0.curvature.f3.w27", math.sqrt(1 - t * t) / 2, F.f3.coeff(2, 7), 1e-12)
    a2 = 0.5 * math.sqrt(B * B / (A * A) - 1)
    conn3 = InvariantConnection(3, b=-1 / (2 * SQRT2), a2=a2)
    yield _rec("x11.so3.P3.residual", 0.0, instanton_residual(conn3, p), 1e-9)
    F = instanton_curvature(conn3, p)
    c = math.sqrt(B * B / (A * A) - 1) / SQRT2
    yield _rec("x11.so3.P3.curvature.f1.w26", -(1 - B * B / (2 * A * A)), F.f1.coeff(2, 6), 1e-12)
    yield _rec("x11.so3.P3.curvature.f2.w46", c, F.f2.coeff(4, 6), 1e-12)
    yield _rec("x11.so3.P3.curvature.f3.w24", c, F.f3.coeff(2, 4), 1e-12)
    # b on P_3 for general structures on X_{1,1}
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(20):
        while True:
            q = G2Params(1, 1, *(rng.uniform(0.3, 3, 4) * rng.choice([-1, 1], 4)))
            if sigmas(q)[1] > 1e-6:
                break
        a2 = math.sqrt(sigmas(q)[1] / (12 * q.A**2 * q.C**2))
        b_half = 0.5 * (0.5 - q.B * q.D / (q.A * q.C))
        worst = max(worst, instanton_residual(InvariantConnection(3, b=b_half, a2=a2), q))
    yield _rec("x11.so3.P3.printed_b_residual", 0.0, worst, 1e-9,
               "printed prefactor 1/2 fails; the prefactor 1/sqrt(2) shared with the generic case solves it")
    tri, strict = x11_np_solutions()
    for name, q in (("tri_sasakian", tri), ("strict", strict)):
        yield _rec(f"x11.np.{name}.np_residual", 0.0, float(np.abs(np_residual(q)).max()), 1e-10)
    s = sigmas(tri)
    yield _rec("x11.np.tri_sasakian.sigma1", 6 * (tri.B**4 - tri.A**4), s[0], 1e-9)
    yield _rec("x11.np.tri_sasakian.sigma2", 3 * tri.B**2 * (tri.B**2 - tri.A**2), s[1], 1e-9)
    yield _rec("x11.np.tri_sasakian.all_negative", 1.0, _flag(max(s) < 0), 0)
    s = sigmas(strict)
    yield _rec("x11.np.strict.sigma1", 6 * (strict.A**2 - strict.B**2) ** 2, s[0], 1e-9)
    yield _rec("x11.np.strict.sigma2", 9 * strict.B**2 * (strict.A**2 - strict.B**2), s[1], 1e-9)
    yield _rec("x11.np.strict.irreducible_on_P0", 2, len(classify_so3(strict, 0).irreducible), 0)
    yield _rec("x11.collapse.slope", 2.0, collapse_slope(), 0.1)
    yield _rec("x11.collapse.divergence_exponent", -1.0, divergence_exponent(), 0.1)


def collapse_distance(A: float, B: float = 1.0) -> float:
    """Size of (instanton on P_0) - (pullback connection) in the metric of phi_{1,1}."""
    t = A * A / (B * B)
    diff = np.array([t, (math.sqrt(1 - t * t) - 1) / SQRT2, (math.sqrt(1 - t * t) - 1) / SQRT2])
    return float(np.abs(diff).max())


# halving grid of A values for the collapse fits
COLLAPSE_GRID = (0.5, 0.25, 0.125, 0.0625)


def collapse_slope(B: float = 1.0, grid=COLLAPSE_GRID) -> float:
    """Log-log slope of the collapse distance against A as A -> 0."""
    A = np.asarray(grid)
    dist = np.array([collapse_distance(a, B) for a in A])
    return float(np.polyfit(np.log(A), np.log(dist), 1)[0])


def vertical_contraction_norm(A: float, B: float = 1.0) -> float:
    """Largest coefficient of i_{e1} F for the P_3 instanton on phi_{A,B}."""
    p = G2Params(1, 1, A, B, B, A)
    a2 = 0.5 * math.sqrt(B * B / (A * A) - 1)
    F = instanton_curvature(InvariantConnection(3, b=-1 / (2 * SQRT2), a2=a2), p)
    from .exterior import contract
    return max(contract(1, f).max_abs() for f in F.components)


def divergence_exponent(B: float = 1.0, grid=COLLAPSE_GRID) -> float:
    A = np.asarray(grid)
    vals = np.array([vertical_contraction_norm(a, B) for a in A])
    return float(np.polyfit(np.log(A), np.log(vals), 1)[0])


def _misc_records() -> Iterator[VerifyRecord]:
    for i, (t, lam) in enumerate(sorted(squash_np())):
        sign = -1 if i == 0 else 1
        yield _rec(f"squash.t{i}", sign / R5, t, 1e-15)
        yield _rec(f"squash.lambda{i}", sign * 12 / R5, lam, 1e-15)
        yield _rec(f"squash.printed_equation{i}", 0.0, t * t + 1 - 2 * lam * t, 1e-15,
                   "printed second equation should read 2 (t^2 + 1) = lambda t")
        yield _rec(f"squash.derived_equations{i}", 0.0, max(map(abs, squash_equations(t, lam))), 1e-15)
    bad = 0
    for k in range(-20, 21):
        for l in range(-20, 21):
            if k == 0 and l == 0:
                continue
            closed = weight_bundle_classes(k, l)
            direct = tuple(char_classes(k, l, n) for n in weight_bundles(k, l))
            bad += closed != direct
    yield _rec("topology.closed_form_agreement", 0, bad, 0)
    cc = char_classes(2, 3, -7)
    yield _rec("topology.x23.p1_of_minus7", 11, cc.p1, 0)


# each section with the claim-id prefixes it produces, so a filter skips unrelated work
SECTIONS: tuple[tuple[tuple[str, ...], Callable[[], Iterator[VerifyRecord]]], ...] = (
    (("example5", "example6", "example7", "example8", "example9"), _nearly_parallel_records),
    (("example3", "example4", "obstruction"), _merging_records),
    (("x1m1_",), _x1m1_records),
    (("abelian_ym", "ym_hypersurface"), _abelian_ym_records),
    (("x11.",), _x11_records),
    (("squash", "topology"), _misc_records),
)


def run_suite(prefix: str = "") -> list[VerifyRecord]:
    records = []
    for heads, section in SECTIONS:
        if any(h.startswith(prefix) or prefix.startswith(h) for h in heads):
            records.extend(r for r in section() if r.claim_id.startswith(prefix))
    return records


def sweep_merge_check(k: int, l: int, n: int, fixed: dict, lo: float, hi: float, steps: int):
    """Rows of a sweep together with the sigma1 = 0 crossings found by bisection."""
    values = np.linspace(lo, hi, steps)
    rows = sweep(k, l, n, fixed, "A", values)
    f = lambda A: sigmas(G2Params(k, l, A, **fixed))[0]  # noqa: E731
    roots = []
    for r0, r1 in zip(rows, rows[1:]):
        if r0["sigma1"] == 0.0:
            roots.append(r0["param_value"])
        elif r0["sigma1"] * r1["sigma1"] < 0:
            roots.append(brentq(f, r0["param_value"], r1["param_value"], xtol=1e-14))
    return rows, roots
