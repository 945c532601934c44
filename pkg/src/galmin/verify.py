"""Desk-scale invariant suite backing the `verify-all` CLI subcommand.

Runs exact finite identities and inequalities across all modules and
returns a single report; any false verdict makes the CLI exit nonzero.
"""

from __future__ import annotations

import math

import numpy as np

from .arith import big_omega, build_sieve, divisors, euler_phi, small_omega
from .characters import (
    build_table,
    char_sum,
    gauss_sum,
    orthogonality_check,
    polya_partial_sum,
)
from .charexp import (
    burgess_R,
    low_moment_experiment,
    mollified_moments,
    weil_moment_check,
)
from .constants import q_of, solve_beta
from .extremal import multiplication_table_count
from .forms import (
    KernelKind,
    KernelSpec,
    WeightVector,
    e_form,
    e_gradient,
    r_counts_dense,
    t_form_fast,
    t_form_naive,
    v_form,
)
from .minimize import grid_oracle, minimize_energy, minimize_quadratic
from .report import ExperimentReport, Timer

_PRIMES_TO_300 = [p for p in range(3, 301)
                  if all(p % d for d in range(2, int(math.isqrt(p)) + 1))]


def run_verification(seed: int = 0, fast: bool = False) -> ExperimentReport:
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("verify-all", parameters={"seed": seed, "fast": fast})
    with Timer() as tm:
        _verify_constants(rep)
        _verify_arith(rep)
        _verify_forms(rep, rng, fast)
        _verify_minimizers(rep)
        _verify_counts(rep)
        _verify_characters(rep, fast)
        _verify_char_experiments(rep, rng, fast)
    rep.timing_ms = tm.ms
    return rep


def _verify_constants(rep):
    pc = solve_beta(1e-10)
    rep.check("beta_near_048155", pc.beta, 0.48155,
              abs(pc.beta - 0.48155) < 1e-4)
    rep.check("eta_near_016656", pc.eta, 0.16656,
              abs(pc.eta - 0.16656) < 1e-4)
    rep.check("eta_below_one_sixth", pc.eta, 1 / 6, pc.eta < 1 / 6)
    rep.check("delta_near_008607", pc.delta, 0.08607,
              abs(pc.delta - 0.08607) < 1e-4)
    rep.check("q_at_one_is_zero", q_of(1.0), 0.0, q_of(1.0) == 0.0)


def _verify_arith(rep):
    sieve = build_sieve(10_000)
    ok_phi = all(sum(euler_phi(sieve, d) for d in divisors(sieve, n)) == n
                 for n in range(1, 2001))
    rep.check("phi_divisor_sum", 1, 1, ok_phi)
    ok_omega = all(big_omega(sieve, n) >= small_omega(sieve, n)
                   for n in range(1, 2001))
    rep.check("big_omega_ge_small_omega", 1, 1, ok_omega)


def _verify_forms(rep, rng, fast):
    n_vectors = 50 if fast else 200
    worst = -math.inf
    for _ in range(n_vectors):
        n = int(rng.integers(1, 501))
        c = WeightVector.from_weights(rng.random(n))
        v, t = v_form(c), t_form_naive(c)
        worst = max(worst, v - 0.5 * t)
    rep.check("kernel_inequality_V_le_half_T", worst, 0.0, worst <= 1e-12)

    worst_rel = 0.0
    for _ in range(10 if fast else 25):
        n = int(rng.integers(2, 1001 if fast else 2001))
        c = WeightVector.from_weights(rng.random(n))
        a, b = t_form_naive(c), t_form_fast(c)
        worst_rel = max(worst_rel, abs(a - b) / abs(a))
    rep.check("t_naive_vs_fast", worst_rel, 1e-10, worst_rel <= 1e-10)

    # r(n) mass identity and energy lower bound via H(N).
    for n in (5, 17, 60):
        c = WeightVector.from_weights(rng.random(n))
        r = r_counts_dense(c)
        rep.check(f"r_mass_identity_N{n}", float(r.sum()), c.one_norm**2,
                  math.isclose(float(r.sum()), c.one_norm**2, rel_tol=1e-12))
        cs = c.normalized()
        e = e_form(cs)
        h = multiplication_table_count(n)
        rep.check(f"energy_times_H_ge_one_N{n}", e * h, 1.0,
                  e * h >= 1.0 - 1e-8)

    # Gradient vs central finite differences.
    n = 12
    c = WeightVector.from_weights(rng.random(n) + 0.1)
    grad = e_gradient(c)
    h = 1e-6
    worst = 0.0
    for i in range(n):
        wp, wm = c.weights.copy(), c.weights.copy()
        wp[i] += h
        wm[i] -= h
        fd = (e_form(WeightVector(n, wp)) - e_form(WeightVector(n, wm))) / (2 * h)
        worst = max(worst, abs(fd - grad[i]))
    rep.check("e_gradient_finite_difference", worst, 1e-6, worst <= 1e-5)


def _verify_minimizers(rep):
    v2 = minimize_quadratic(KernelSpec(KernelKind.V_KERNEL), 2, tolerance=1e-10)
    rep.check("V2_closed_form", v2.scaled_value, 5 / 6,
              abs(v2.scaled_value - 5 / 6) < 1e-8)
    t2 = minimize_quadratic(KernelSpec(KernelKind.T_KERNEL), 2, tolerance=1e-10)
    rep.check("T2_closed_form", t2.scaled_value, 1 + 1 / math.sqrt(2),
              abs(t2.scaled_value - (1 + 1 / math.sqrt(2))) < 1e-8)
    e2 = minimize_energy(2, restarts=3)
    rep.check("E2_closed_form", e2.scaled_value, 1.5,
              abs(e2.scaled_value - 1.5) < 1e-6)
    for n in (3, 4, 5):
        for kind in ("V", "T"):
            spec = KernelSpec(KernelKind.V_KERNEL if kind == "V" else KernelKind.T_KERNEL)
            it = minimize_quadratic(spec, n, tolerance=1e-12)
            go = grid_oracle(kind, n, step=1 / 60)
            rep.check(f"{kind}{n}_vs_grid_oracle", it.value, go.value,
                      abs(it.value - go.value) <= 1e-6)
        em = minimize_energy(n, restarts=4)
        ge = grid_oracle("E", n, step=1 / 60)
        rep.check(f"E{n}_vs_grid_oracle", em.value, ge.value,
                  abs(em.value - ge.value) <= 1e-4)


def _verify_counts(rep):
    for n, expected in ((3, 6), (4, 9), (5, 14)):
        rep.check(f"H_{n}", multiplication_table_count(n), expected,
                  multiplication_table_count(n) == expected)


def _verify_characters(rep, fast):
    primes = [p for p in _PRIMES_TO_300 if p <= (50 if fast else 300)]
    worst_tau = 0.0
    worst_parseval = 0.0
    for p in primes:
        table = build_table(p)
        for chi in table.characters(skip_principal=True):
            worst_tau = max(worst_tau, abs(abs(gauss_sum(chi)) - math.sqrt(p)))
        n = max(1, p // 2)
        total = sum(abs(char_sum(chi, 0, n)) ** 2 for chi in table.characters())
        worst_parseval = max(worst_parseval,
                             abs(total - (p - 1) * n) / ((p - 1) * n))
    rep.check("gauss_sum_modulus", worst_tau, 1e-9, worst_tau <= 1e-9)
    rep.check("parseval", worst_parseval, 1e-6, worst_parseval <= 1e-6)

    table = build_table(13)
    rep.check("orthogonality_plus_minus",
              orthogonality_check(table, 1, 12).real, 6.0,
              abs(orthogonality_check(table, 1, 12) - 6.0) < 1e-9)
    rep.check("orthogonality_zero",
              abs(orthogonality_check(table, 2, 3)), 0.0,
              abs(orthogonality_check(table, 2, 3)) < 1e-9)

    # Polya formula residual decay on a sample of moduli. Half-integer
    # cutoff: at integer t the Fourier series takes the half-jump value,
    # leaving an irreducible ~1/2 residual that masks the decay in H.
    ok = True
    for p in ([31, 101] if fast else [31, 101, 199, 293]):
        chi = build_table(p).character(1)
        t = p // 3 + 0.5
        _, _, res_small = polya_partial_sum(chi, t, p)
        _, _, res_big = polya_partial_sum(chi, t, p * p)
        if res_big > res_small or res_big > 2 + 10 * p * math.log(p) / (p * p):
            ok = False
    rep.check("polya_residual_decay", 1, 1, ok)


def _verify_char_experiments(rep, rng, fast):
    primes = [5, 13, 31] if fast else [5, 13, 31, 61, 101, 151, 199]
    ok_weil = True
    for p in primes:
        table = build_table(p)
        for j in (1, 2):
            chi = table.character(j)
            if chi.is_principal:
                continue
            for B in (1, 4, 8):
                for r in (2, 3):
                    lhs, rhs = weil_moment_check(chi, B, r)
                    if lhs > rhs:
                        ok_weil = False
    rep.check("weil_moment_bound", 1, 1, ok_weil)

    ok_r = True
    for p in primes:
        for A in (1, 3, 7):
            for N in (A, 2 * A, p // max(A, 1)):
                if not (A <= N and A * N <= p and N >= 1):
                    continue
                c = WeightVector.from_weights(rng.random(A))
                for M in (0, 1, p // 2):
                    R = burgess_R(c, A, M, N, p)
                    bound = c.one_norm**2 + 2 * N * v_form(c)
                    if R > bound * (1 + 1e-12):
                        ok_r = False
    rep.check("R_bound_gcd_form_grid", 1, 1, ok_r)

    ok_m0 = True
    for p in ([13, 31] if fast else [13, 31, 61, 101, 151]):
        q = math.isqrt(p // 3)
        for c in (WeightVector.from_weights(np.ones(q)),
                  WeightVector.from_weights(rng.random(q) + 0.05)):
            mm = mollified_moments(p, 1.0, c)
            if mm.M0 < mm.holder_lower_bound - 1e-6:
                ok_m0 = False
            e = e_form(c)
            if not math.isclose(mm.M4, 0.5 * (p - 1) * e, rel_tol=1e-8):
                ok_m0 = False
    rep.check("mollified_holder_and_M4_identity", 1, 1, ok_m0)

    ok_low = True
    for p in ([31, 61] if fast else [31, 61, 101, 151]):
        for r in (0.5, 1.0, 1.25):
            n = max(1, math.isqrt(p) - 1)
            low = low_moment_experiment(p, n, r)
            if not low.all_hold:
                ok_low = False
    rep.check("low_moment_holder", 1, 1, ok_low)
