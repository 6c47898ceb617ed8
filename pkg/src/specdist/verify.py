"""Self-check suites: every algebraic identity and bound the package relies on,
run on seeded random instances.  Used by the CLI `verify` subcommand and
re-exercised from the test suite.

Deviations are measured as |x - y| / max(1, |x|, |y|): absolute for small
quantities, relative above magnitude one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import probes, torus
from .algebra import MoyalElement, inner, integral, involution, radial, sobolev_norm, star
from .calculus import dz, dzbar, reconstruct, staircase
from .distance import (analytic_upper_bound, basis_distance, certificate_lower_bound,
                       optimize_distance, staircase_candidates)
from .lipschitz import ENTRY_BOUND, ball_report, commutator_norm, op_norm, radial_in_ball
from .states import basis_state, diagonal_difference, finite_state, zeta_state

DEFAULT_SEED = 20100324


def deviation(x, y) -> float:
    return abs(x - y) / max(1.0, abs(x), abs(y))


def matrix_deviation(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) / scale


@dataclass
class CheckResult:
    name: str
    instances: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass
class SuiteResult:
    name: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary_lines(self):
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            line = f"  [{status}] {self.name}/{c.name} ({c.instances} instances)"
            if c.violations:
                line += f" -- {len(c.violations)} violation(s); first: {c.violations[0]}"
            yield line


def _rand_coeffs(rng, order: int) -> np.ndarray:
    # entries uniform in the unit disk
    re = rng.uniform(-1.0, 1.0, (order, order))
    im = rng.uniform(-1.0, 1.0, (order, order))
    return (re + 1j * im) / math.sqrt(2.0)


def _rand_element(rng, theta: float, max_order: int = 16) -> MoyalElement:
    order = int(rng.integers(2, max_order + 1))
    return MoyalElement(theta, _rand_coeffs(rng, order))


_THETAS = (0.5, 1.0, 2.0)


def algebra_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed)
    tol = 1e-12
    assoc = CheckResult("associativity", 1000)
    cyclic = CheckResult("trace_cyclicity", 1000)
    antihom = CheckResult("involution_antihomomorphism", 1000)
    adjoint = CheckResult("left_multiplication_adjoint", 1000)
    for i in range(1000):
        theta = _THETAS[i % 3]
        a, b, c = (_rand_element(rng, theta) for _ in range(3))
        d1 = matrix_deviation(star(star(a, b), c).coeffs, star(a, star(b, c)).coeffs)
        if d1 > tol:
            assoc.violations.append(f"instance {i}: deviation {d1:.3g}")
        d2 = deviation(integral(star(a, b)), integral(star(b, a)))
        if d2 > tol:
            cyclic.violations.append(f"instance {i}: deviation {d2:.3g}")
        d3 = matrix_deviation(involution(star(a, b)).coeffs,
                              star(involution(b), involution(a)).coeffs)
        if d3 > tol:
            antihom.violations.append(f"instance {i}: deviation {d3:.3g}")
        d4 = deviation(inner(a, star(b, c)), inner(star(involution(b), a), c))
        if d4 > tol:
            adjoint.violations.append(f"instance {i}: deviation {d4:.3g}")

    mono = CheckResult("weighted_norm_monotonicity", 300)
    pairs = [((0.0, 0.0), (1.0, 0.0)), ((0.0, 0.0), (0.0, 1.0)), ((1.0, 1.0), (2.0, 2.0)),
             ((0.5, 0.25), (1.5, 0.25)), ((0.0, 0.0), (2.0, 2.0))]
    for i in range(300):
        # termwise monotone only when theta*(m+1/2) >= 1 for every index,
        # i.e. theta >= 2; smaller theta has corner counterexamples
        theta = (2.0, 3.0, 4.0)[i % 3]
        a = _rand_element(rng, theta, 12)
        for (u, v), (s, t) in pairs:
            lo = sobolev_norm(a, u, v)
            hi = sobolev_norm(a, s, t)
            if lo > hi * (1.0 + 1e-12):
                mono.violations.append(f"instance {i}: ({u},{v}) vs ({s},{t})")
    return SuiteResult("algebra", [assoc, cyclic, antihom, adjoint, mono])


def calculus_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed + 1)
    tol = 1e-12
    leibniz = CheckResult("leibniz_rule", 300)
    for i in range(300):
        theta = _THETAS[i % 3]
        a = _rand_element(rng, theta, 12)
        b = _rand_element(rng, theta, 12)
        lhs = dz(star(a, b)).coeffs
        n = lhs.shape[0]
        rhs = (star(dz(a).as_element().pad(n), b.pad(n)).coeffs
               + star(a.pad(n), dz(b).as_element().pad(n)).coeffs)
        d = matrix_deviation(lhs, rhs)
        if d > tol:
            leibniz.violations.append(f"instance {i}: deviation {d:.3g}")

    roundtrip = CheckResult("reconstruction_roundtrip", 500)
    for i in range(500):
        theta = _THETAS[i % 3]
        a = _rand_element(rng, theta, 12)
        back = reconstruct(a.coeffs[0, 0], dz(a), dzbar(a))
        d = matrix_deviation(back.coeffs, a.pad(back.order).coeffs)
        if d > tol:
            roundtrip.violations.append(f"instance {i}: deviation {d:.3g}")

    conj = CheckResult("derivative_conjugation", 300)
    for i in range(300):
        a = _rand_element(rng, _THETAS[i % 3], 12)
        lhs = dz(a).coeffs.conj().T
        rhs = dzbar(involution(a)).coeffs
        d = matrix_deviation(lhs, rhs)
        if d > tol:
            conj.violations.append(f"instance {i}: deviation {d:.3g}")

    radial_structure = CheckResult("radial_derivative_band", 200)
    for i in range(200):
        theta = _THETAS[i % 3]
        diag = rng.uniform(-1, 1, int(rng.integers(2, 12)))
        al = dz(radial(theta, diag)).coeffs
        off_band = al - np.diag(np.diag(al, -1), -1)
        if np.max(np.abs(off_band)) > 0:
            radial_structure.violations.append(f"instance {i}")
    return SuiteResult("calculus", [leibniz, roundtrip, conj, radial_structure])


def lipschitz_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed + 2)
    sqrt2 = CheckResult("self_adjoint_norm_symmetry", 200)
    for i in range(200):
        theta = _THETAS[i % 3]
        a = _rand_element(rng, theta, 12)
        sa = 0.5 * (a + involution(a))
        d = deviation(op_norm(dz(sa).coeffs), op_norm(dzbar(sa).coeffs))
        if d > 1e-12:
            sqrt2.violations.append(f"instance {i}: deviation {d:.3g}")

    entries = CheckResult("ball_entry_bound", 500)
    for i in range(500):
        theta = _THETAS[i % 3]
        a = _rand_element(rng, theta, 12)
        cn = commutator_norm(a)
        if cn == 0:
            continue
        a = (1.0 / cn) * a
        worst = max(float(np.max(np.abs(dz(a).coeffs))), float(np.max(np.abs(dzbar(a).coeffs))))
        if worst > ENTRY_BOUND + 1e-9:
            entries.violations.append(f"instance {i}: entry {worst:.12f}")

    agreement = CheckResult("radial_membership_agreement", 200)
    for i in range(200):
        theta = _THETAS[i % 3]
        diag = rng.uniform(-1, 1, int(rng.integers(2, 12)))
        a = radial(theta, diag)
        cn = commutator_norm(a)
        if cn > 0:
            a = (rng.uniform(0.5, 1.5) / cn) * a
        if radial_in_ball(a) != ball_report(a).member:
            agreement.violations.append(f"instance {i}")

    submult = CheckResult("operator_norm_submultiplicative", 300)
    for i in range(300):
        theta = _THETAS[i % 3]
        a = _rand_element(rng, theta, 12)
        b = _rand_element(rng, theta, 12)
        n = max(a.order, b.order)
        lhs = op_norm(star(a, b).coeffs)
        rhs = op_norm(a.pad(n).coeffs) * op_norm(b.pad(n).coeffs)
        if lhs > rhs * (1.0 + 1e-12):
            submult.violations.append(f"instance {i}: {lhs} > {rhs}")

    exact = CheckResult("left_multiplication_norm_exactness", 100)
    for i in range(100):
        theta = _THETAS[i % 3]
        a = MoyalElement(theta, _rand_coeffs(rng, 8))
        nrm = op_norm(a.coeffs)
        best = 0.0
        for _ in range(20):
            phi = _rand_coeffs(rng, 8)
            best = max(best, float(np.linalg.norm(a.coeffs @ phi) / np.linalg.norm(phi)))
        if best > nrm * (1.0 + 1e-12):
            exact.violations.append(f"instance {i}: ratio {best} exceeds norm {nrm}")
        _, _, vh = np.linalg.svd(a.coeffs)
        top = vh[0].conj().reshape(-1, 1)
        achieved = float(np.linalg.norm(a.coeffs @ top) / np.linalg.norm(top))
        if deviation(achieved, nrm) > 1e-10:
            exact.violations.append(f"instance {i}: top vector ratio {achieved} vs {nrm}")
    return SuiteResult("lipschitz", [sqrt2, entries, agreement, submult, exact])


def states_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed + 3)
    norm = CheckResult("normalization", 150)
    positive = CheckResult("positivity_on_staircase", 150)
    zero_sum = CheckResult("difference_sums_to_zero", 150)
    for i in range(150):
        theta = _THETAS[i % 3]
        which = i % 3
        if which == 0:
            st = basis_state(int(rng.integers(0, 12)), theta)
        elif which == 1:
            st = zeta_state(float(rng.uniform(1.05, 3.0)), int(rng.integers(10, 200)), theta)
        else:
            size = int(rng.integers(1, 12))
            w = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            st = finite_state(w, theta)
        total = float(np.sum(np.abs(st.c) ** 2))
        if abs(total - 1.0) > 1e-12:
            norm.violations.append(f"instance {i}: sum {total}")
        val = st.expect(staircase(12, theta))
        if val.real < -1e-13 or abs(val.imag) > 1e-13:
            positive.violations.append(f"instance {i}: value {val}")
        other = basis_state(int(rng.integers(0, 12)), theta)
        if abs(float(np.sum(diagonal_difference(st, other)))) > 1e-12:
            zero_sum.violations.append(f"instance {i}")

    tail = CheckResult("partial_sum_ratio", 1)
    st = zeta_state(1.5, 40000, 1.0)
    ratio = st.meta["partial_sum"] / st.meta["zeta"]
    if not ratio >= 0.99:
        tail.violations.append(f"ratio {ratio}")
    return SuiteResult("states", [norm, positive, zero_sum, tail])


def distance_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed + 4)
    saturation = CheckResult("basis_pair_saturation", 0)
    count = 0
    for theta in _THETAS:
        for n in range(0, 4):
            for m in range(n + 1, 5):
                count += 1
                s1, s2 = basis_state(m, theta), basis_state(n, theta)
                closed = basis_distance(m, n, theta)
                elements, labels = staircase_candidates(m, theta)
                cert, _ = certificate_lower_bound(s1, s2, elements, labels)
                upper = analytic_upper_bound(s1, s2)
                if abs(cert - closed) > 1e-12 or abs(upper - closed) > 1e-12:
                    saturation.violations.append(
                        f"(m={m}, n={n}, theta={theta}): cert {cert}, closed {closed}, upper {upper}")
    saturation.instances = count

    # optimizer checks at a small order; the solver carries its own tolerance,
    # so the lower-bound chain is asserted with explicit solver slack
    bracket = CheckResult("bracketing", 3)
    feasible = CheckResult("optimizer_feasibility", 3)
    monotone = CheckResult("optimizer_monotone_in_order", 1)
    solver_slack = 1e-6
    cases = [
        (basis_state(0, 1.0), basis_state(1, 1.0)),
        (basis_state(0, 2.0), finite_state([1.0, 1.0], 2.0)),
        (finite_state([1.0, 0.5, 0.25], 0.5), basis_state(2, 0.5)),
    ]
    for i, (s1, s2) in enumerate(cases):
        elements, labels = staircase_candidates(max(s1.support, s2.support), s1.theta)
        cert, _ = certificate_lower_bound(s1, s2, elements, labels)
        upper = analytic_upper_bound(s1, s2)
        res = optimize_distance(s1, s2, order=10)
        if res.feasibility_residual > 1e-9:
            feasible.violations.append(f"case {i}: residual {res.feasibility_residual:.3g}")
        ok = (cert <= upper + 1e-9 and res.value <= upper + 1e-9
              and res.value >= cert - solver_slack - solver_slack * cert)
        if not ok:
            bracket.violations.append(
                f"case {i}: cert {cert}, optimizer {res.value}, upper {upper}")
    vals = [optimize_distance(cases[1][0], cases[1][1], order=k).value for k in (6, 8, 10)]
    if not (vals[0] <= vals[1] + 1e-6 and vals[1] <= vals[2] + 1e-6):
        monotone.violations.append(f"values {vals}")

    phase = CheckResult("global_phase_invariance", 20)
    for i in range(20):
        theta = _THETAS[i % 3]
        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        s1 = finite_state(w, theta)
        s2 = basis_state(int(rng.integers(0, 4)), theta)
        s1p = finite_state(w * np.exp(1j * rng.uniform(0, 2 * np.pi)), theta)
        elements, labels = staircase_candidates(4, theta)
        c1, _ = certificate_lower_bound(s1, s2, elements, labels)
        c2, _ = certificate_lower_bound(s1p, s2, elements, labels)
        u1 = analytic_upper_bound(s1, s2)
        u2 = analytic_upper_bound(s1p, s2)
        if abs(c1 - c2) > 1e-12 or abs(u1 - u2) > 1e-12:
            phase.violations.append(f"instance {i}")

    symmetrize = CheckResult("self_adjoint_restriction_lossless", 100)
    for i in range(100):
        theta = _THETAS[i % 3]
        a = _rand_element(rng, theta, 8)
        cn = commutator_norm(a)
        if cn == 0:
            continue
        a = (1.0 / cn) * a
        s1 = basis_state(int(rng.integers(0, 6)), theta)
        w = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        s2 = finite_state(w, theta)
        g = s1.expect(a) - s2.expect(a)
        if abs(g) == 0:
            continue
        rotated = (abs(g) / g) * a
        b = 0.5 * (rotated + involution(rotated))
        if commutator_norm(b) > 1.0 + 1e-9:
            symmetrize.violations.append(f"instance {i}: symmetrized norm")
        gb = (s1.expect(b) - s2.expect(b)).real
        if gb < abs(g) - 1e-12:
            symmetrize.violations.append(f"instance {i}: {gb} < {abs(g)}")
    return SuiteResult("distance",
                       [saturation, bracket, feasible, monotone, phase, symmetrize])


def probes_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed + 5)
    consistency = CheckResult("certificate_gap_cross_path", 12)
    for i in range(12):
        theta = _THETAS[i % 3]
        m0 = (10, 100, 1000)[i % 3]
        w = rng.uniform(0.1, 1.0, int(rng.integers(1, 40)))
        s1 = finite_state(w, theta)
        s2 = zeta_state(1.5, 50, theta) if i % 2 else basis_state(int(rng.integers(0, 20)), theta)
        el = staircase(m0, theta)
        direct = abs(s1.expect(el) - s2.expect(el))
        fast = probes.staircase_gap(m0, s1, s2)
        if abs(direct - fast) > 1e-10:
            consistency.violations.append(f"instance {i}: {direct} vs {fast}")

    growth = CheckResult("monotone_divergence", 1)
    grid = probes.default_grid(1e2, 1e6, 16)
    b = probes.probe_series(probes.ProbeSpec("basis", index=0),
                            probes.ProbeSpec("zeta", s=1.2), grid)
    if not (all(np.diff(b[len(b) // 2:]) > 0) and b[-1] > 10.0 * b[0]):
        growth.violations.append(f"series head {b[:3]} tail {b[-3:]}")

    estimates = CheckResult("inequality_families", 1)
    estimates.violations.extend(estimate_violations_cached())

    crossover = CheckResult("weight_gap_crossover", 6)
    for (s1v, s2v) in [(1.1, 1.3), (1.1, 1.4), (1.2, 1.5), (1.01, 1.25), (1.3, 1.5), (1.05, 1.1)]:
        m = probes.crossover_index(s1v, s2v)
        if not (probes.zeta_weight_gap(m, s1v, s2v) <= 0.0 < probes.zeta_weight_gap(m + 1, s1v, s2v)):
            crossover.violations.append(f"({s1v},{s2v}): M={m}")
        plus, minus = probes.crossover_mass(s1v, s2v)
        if plus <= 0 or deviation(plus, minus) > 1e-9:
            crossover.violations.append(f"({s1v},{s2v}): masses {plus} vs {minus}")

    honesty = CheckResult("undecidable_pair_never_flagged", 1)
    flag = probes.divergence_flag(probes.ProbeSpec("zeta", s=1.25),
                                  probes.ProbeSpec("zeta", s=1.5))
    if flag == "divergent":
        honesty.violations.append(f"flag {flag!r}")
    return SuiteResult("probes", [consistency, growth, estimates, crossover, honesty])


_estimate_cache: list | None = None


def estimate_violations_cached() -> list:
    global _estimate_cache
    if _estimate_cache is None:
        _estimate_cache = probes.estimate_checks()
    return _estimate_cache


def torus_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed + 6)
    thetas = (0.0, 0.25, 1.0 / 3.0, 0.37, np.sqrt(2.0) - 1.0, 0.9)

    bichar = CheckResult("bicharacter_identities", 1000)
    for i in range(1000):
        theta = thetas[i % len(thetas)]
        m, n, p = (tuple(rng.integers(-20, 21, 2)) for _ in range(3))
        s = lambda a, b: torus.bicharacter(a, b, theta)
        checks = [
            abs(s((m[0] + n[0], m[1] + n[1]), p) - s(m, p) * s(n, p)),
            abs(s(m, (n[0] + p[0], n[1] + p[1])) - s(m, n) * s(m, p)),
            abs(s(m, m) - 1.0),
            abs(s(m, (-m[0], -m[1])) - 1.0),
            abs(abs(s(m, n)) - 1.0),
        ]
        if max(checks) > 1e-12:
            bichar.violations.append(f"instance {i}: deviation {max(checks):.3g}")

    def rand_torus(theta, radius=3, nterms=4):
        terms = {}
        for _ in range(nterms):
            m = tuple(int(v) for v in rng.integers(-radius, radius + 1, 2))
            terms[m] = complex(rng.standard_normal(), rng.standard_normal())
        return torus.TorusElement(theta, terms)

    assoc = CheckResult("product_associativity", 200)
    for i in range(200):
        theta = thetas[i % len(thetas)]
        a, b, c = (rand_torus(theta) for _ in range(3))
        lhs = torus.product(torus.product(a, b), c)
        rhs = torus.product(a, torus.product(b, c))
        diff = lhs - rhs
        worst = max((abs(v) for v in diff.terms.values()), default=0.0)
        scale = max([1.0] + [abs(v) for v in lhs.terms.values()])
        if worst > 1e-12 * scale:
            assoc.violations.append(f"instance {i}: deviation {worst:.3g}")

    gns = CheckResult("gns_orthonormality", 200)
    for i in range(200):
        theta = thetas[i % len(thetas)]
        m = tuple(int(v) for v in rng.integers(-5, 6, 2))
        n = tuple(int(v) for v in rng.integers(-5, 6, 2))
        val = torus.trace(torus.product(torus.involution(torus.weyl(theta, m)),
                                        torus.weyl(theta, n)))
        expected = 1.0 if m == n else 0.0
        if abs(val - expected) > 1e-12:
            gns.violations.append(f"instance {i}: <{m},{n}> = {val}")

    kills = CheckResult("derivation_annihilates_trace", 200)
    for i in range(200):
        a = rand_torus(thetas[i % len(thetas)])
        if abs(torus.trace(torus.deriv(a))) > 0.0:
            kills.violations.append(f"instance {i}")

    bound = CheckResult("derivative_coefficient_bound", 60)
    for i in range(60):
        theta = thetas[i % len(thetas)]
        a = rand_torus(theta, radius=2, nterms=3)
        a = a + torus.involution(a)  # self-adjoint
        # any box norm dominates every coefficient that fits in the box, so a
        # fixed modest box gives a valid (and cheap) rescaling here
        box = a.support_radius + 3
        cn = torus.torus_commutator_norm(a, box_radius=box)
        if cn == 0:
            continue
        a = (1.0 / cn) * a
        worst = max((abs(v) for v in torus.deriv(a).terms.values()), default=0.0)
        worst = max(worst, max((abs(v) for v in torus.deriv_bar(a).terms.values()), default=0.0))
        if worst > 1.0 + 1e-9:
            bound.violations.append(f"instance {i}: coefficient {worst}")

    saturation = CheckResult("certificate_meets_coefficient_bound", 0)
    count = 0
    for m1 in range(-3, 4):
        for m2 in range(-3, 4):
            if (m1, m2) == (0, 0):
                continue
            count += 1
            m = (m1, m2)
            cert = torus.weyl_certificate(m, 0.37)
            gap = abs(torus.vector_state(0.37, m).expect(cert)
                      - torus.tracial_state(0.37).expect(cert))
            target = torus.coefficient_bound(m)
            if abs(gap - target) > 1e-12:
                saturation.violations.append(
                    f"M={m}: certificate gap {gap:.10f} vs coefficient bound {target:.10f}")
    saturation.instances = count
    return SuiteResult("torus", [bichar, assoc, gns, kills, bound, saturation])


SUITES = {
    "algebra": algebra_suite,
    "calculus": calculus_suite,
    "lipschitz": lipschitz_suite,
    "states": states_suite,
    "distance": distance_suite,
    "probes": probes_suite,
    "torus": torus_suite,
}


def run_suites(names=None, seed: int = DEFAULT_SEED):
    if names is None:
        names = list(SUITES)
    return [SUITES[n](seed) for n in names]
