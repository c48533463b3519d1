"""One test per acceptance criterion; each records a PASS/FAIL line shown in the terminal summary."""

import math
import time

import numpy as np
import pytest

from belldistill import bell, cli, ghz_family as gf, io, linalg, states
from belldistill.ghz_family import BipartiteSplit
from oracles import bisection_eigenvalues, brute_force_coefficients, charpoly_eigenvalues, random_hermitian

DUR4_HALF = ("100", "010", "001", "111")
DUR4_ZERO = ("110", "101", "011")


def _cli(*argv):
    code, report = cli.run([str(a) for a in argv])
    assert code in (0, cli.EXIT_NO_VIOLATION), f"{argv} exited {code}"
    return report["results"]


def _dur_file(tmp_path, n, phase="matched"):
    path = tmp_path / f"dur{n}-{phase}.json"
    io.save(io.StateFile("dense", n, states.dur_state(n, phase), {"frame_phase": states.resolve_phase(phase, n)}), path)
    return path


def test_c1_dur_violation_threshold(tmp_path, record_criterion):
    # dense-trace oracle at N = 4 before the closed form is trusted further out
    rho4 = states.dur_state(4)
    dense4 = bell.expectation(bell.mk_operator(bell.MeasurementSettings.xy(4)), rho4)
    assert dense4 == pytest.approx(2**1.5 / 5, abs=1e-12)
    paths = {n: _dur_file(tmp_path, n) for n in range(4, 9)}
    start = time.perf_counter()
    results = {n: _cli("bell", paths[n], "--xy") for n in range(4, 9)}
    elapsed = time.perf_counter() - start
    ok = elapsed < 5.0
    for n, res in results.items():
        ok &= abs(res["value"] - 2 ** ((n - 1) / 2) / (n + 1)) <= 1e-9
        ok &= res["violates"] is (n == 8)
    record_criterion("C1 Dur violation threshold", ok, f"N=8 value {results[8]['value']:.9f}, {elapsed:.2f}s")
    assert ok


def test_c2_dur_bound_entanglement(tmp_path, record_criterion):
    paths = {n: _dur_file(tmp_path, n) for n in range(4, 9)}
    start = time.perf_counter()
    worst = min(
        row["min_eigenvalue"] for n in range(4, 9) for row in _cli("ppt", paths[n], "--scan", "single")["cuts"]
    )
    elapsed = time.perf_counter() - start
    ok = worst >= -1e-9 and elapsed < 60.0
    record_criterion("C2 Dur single-party cuts PPT", ok, f"min eigenvalue {worst:.3e}, {elapsed:.2f}s")
    assert ok


def test_c3_ghz_maximal_value(record_criterion):
    worst = 0.0
    for n in range(2, 9):
        qmax = 2 ** ((n - 1) / 2)
        psi = states.ghz(n, bell.beta_n(n))
        value = bell.expectation(bell.mk_xy_operator(n), states.density(psi))
        eig = linalg.hermitian_eigenvalues(bell.mk_xy_operator(n))
        worst = max(worst, abs(value - qmax), abs(eig[0] + qmax), abs(eig[-1] - qmax))
    ok = worst <= 1e-9
    record_criterion("C3 GHZ maximal value and spectrum", ok, f"max deviation {worst:.2e}")
    assert ok


def test_c4_recursion_matches_closed_form(record_criterion):
    worst = max(
        np.max(np.abs(bell.mk_operator(bell.MeasurementSettings.xy(n)) - bell.mk_xy_operator(n, bell.beta_n(n))))
        for n in range(1, 9)
    )
    ok = worst <= 1e-12
    record_criterion("C4 recursion equals closed form", ok, f"max entry deviation {worst:.2e}")
    assert ok


def test_c5_lemma_campaign(record_criterion):
    start = time.perf_counter()
    campaigns = [gf.verify_lemma(n, 10_000, seed=n) for n in range(3, 11)]
    elapsed = time.perf_counter() - start
    counter = sum(c.counterexamples for c in campaigns)
    violating = sum(c.violating for c in campaigns)
    ok = counter == 0 and violating == 80_000 and elapsed < 30.0
    record_criterion("C5 lemma on 10000 families per N=3..10", ok, f"{counter} counterexamples, {elapsed:.2f}s")
    assert ok


def test_c6_pigeonhole_bound(record_criterion):
    ok = all(gf.pigeonhole_bound(n) > 1 for n in range(3, 21)) and gf.pigeonhole_bound(2) <= 1
    ok &= all(gf.pigeonhole_bound(n) == (2 ** (n - 1) - 1) / 2 ** ((n - 1) / 2) for n in range(2, 21))
    record_criterion("C6 pigeonhole bound", ok, f"N=3 {gf.pigeonhole_bound(3):.4f}, N=2 {gf.pigeonhole_bound(2):.4f}")
    assert ok


def test_c7_boundary_behavior(tmp_path, record_criterion):
    rho = states.dur_state(4, 0.0)
    c = gf.extract_coefficients(rho, 0.0)
    ok = abs(c.lambda0_plus - 0.2) <= 1e-10 and abs(c.lambda0_minus) <= 1e-10
    for bits in DUR4_HALF:
        r = gf.split_report(c, BipartiteSplit.from_bits(bits))
        ok &= abs(r.two_lambda_j - 0.2) <= 1e-10 and not r.distillable
    for bits in DUR4_ZERO:
        r = gf.split_report(c, BipartiteSplit.from_bits(bits))
        ok &= abs(c.lambda_(r.split.label)) <= 1e-10 and r.distillable
    plus, minus, two_l = brute_force_coefficients(rho)
    ok &= np.allclose(2 * c.lambdas, two_l, atol=1e-10)
    row = _cli("ppt", _dur_file(tmp_path, 4, 0.0), "--split", "110")["cuts"][0]
    ok &= row["ppt"] is False
    record_criterion("C7 dur(4, 0) boundary and split 110 NPT", ok, f"split 110 min eigenvalue {row['min_eigenvalue']:.3f}")
    assert ok


def test_c8_oracle_equivalence(record_criterion):
    rng = np.random.default_rng(8)
    worst = 0.0
    for k in range(100):
        dim = 1 + k % 16
        m = random_hermitian(dim, rng)
        for backend in linalg.available_backends():
            got = linalg.hermitian_eigenvalues(m, backend=backend)
            worst = max(worst, np.max(np.abs(got - bisection_eigenvalues(m))))
            if dim <= 4:
                worst = max(worst, np.max(np.abs(got - charpoly_eigenvalues(m))))
    ok = worst <= 1e-8
    record_criterion("C8 eigensolver matches oracles", ok, f"max deviation {worst:.2e} on 100 instances")
    assert ok


def test_c9_roundtrip_and_consistency(record_criterion):
    idem = 0.0
    for n in range(2, 7):
        for seed in range(10):
            phase = 0.37 * seed
            c = gf.extract_coefficients(states.random_density_matrix(n, seed), phase)
            again = gf.extract_coefficients(c.to_density(phase), phase)
            idem = max(idem, abs(again.lambda0_plus - c.lambda0_plus), abs(again.lambda0_minus - c.lambda0_minus))
            idem = max(idem, float(np.max(np.abs(again.lambdas - c.lambdas))))
    norm = 0.0
    bell_gap = 0.0
    for n in (3, 4):
        beta = bell.beta_n(n)
        for seed in range(200):
            rho = states.random_density_matrix(n, 1000 + seed)
            c = gf.extract_coefficients(rho, beta)
            norm = max(norm, abs(c.normalization - 1.0))
            bell_gap = max(bell_gap, abs(bell.bell_report(rho).value - 2 ** ((n - 1) / 2) * c.delta))
    ok = idem <= 1e-12 and norm <= 1e-10 and bell_gap <= 1e-9
    record_criterion(
        "C9 round trip and consistency", ok, f"idempotence {idem:.1e}, normalization {norm:.1e}, Bell identity {bell_gap:.1e}"
    )
    assert ok
