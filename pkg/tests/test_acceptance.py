"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Run with ``pytest tests/test_acceptance.py -v -s``."""

import contextlib
import math
import time

import numpy as np
import pytest

from cbtsim.collision import (
    apply_gate,
    choi_matrix,
    collision_gate,
    make_slot,
)
from cbtsim.linalg import (
    SpaceShape,
    dag,
    eig_biorthogonal,
    expm,
    kron,
    partial_trace,
)
from cbtsim.liouville import (
    LiouvillianMatrix,
    lep_detect,
    liouvillian_spectrum,
    oscillation_pair,
    period_average,
    vectorize,
)
from cbtsim.master import qme_generator
from cbtsim.observables import expval, g2
from cbtsim.reservoir import (
    NegativeRatio,
    ReservoirQubitSpec,
    biorthogonalize,
    boltzmann_right_state,
    coupling_operator,
    modified_kms,
    spectral_functions,
)
from cbtsim.scenarios import (
    benchmark_map_vs_qme,
    build_setup,
    default_config,
    dichromatic_run,
    merge_config,
    phase_scan,
    qme_generators,
    qs_run,
    single_qubit_run,
)
from cbtsim.systems import three_level_model, two_level_model


@contextlib.contextmanager
def criterion(number, description):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL — {description}")
        raise
    print(f"ACCEPTANCE {number}: PASS — {description} "
          f"[{time.time() - start:.1f} s]")


def spectral_for(omega, theta_q, beta, theta_c):
    spec = ReservoirQubitSpec(omega=omega, theta_q=theta_q, beta=beta,
                              theta_c=theta_c)
    return spec, spectral_functions(spec, biorthogonalize(spec),
                                    coupling_operator(theta_c))


def test_criterion_1_hermitian_reservoir_reduction():
    with criterion(1, "Hermitian-reservoir limit: equal rates, recovered "
                      "temperature, thermal collision fixed point"):
        for omega in (0.5, 0.8, 1.0, 1.5, 2.0):
            for beta in (0.0, 0.5, 1.0, 2.0, 4.0):
                for theta_c in (0.3, 0.7, 1.1, 1.9, 2.7):
                    _, data = spectral_for(omega, 0.0, beta, theta_c)
                    assert abs(data.gamma_plus - data.gammabar_plus) < 1e-12
                    assert abs(data.gamma_minus - data.gammabar_minus) < 1e-12
                    assert data.beta_bar == pytest.approx(beta, abs=1e-10)

        model, s_x = two_level_model(1.0)
        spec = ReservoirQubitSpec(1.0, 0.0, 1.0, math.pi / 2)
        slot = make_slot(spec, s_x, model, (0, 1, 1.0))
        gate = collision_gate(model.h_s, slot, 0.3, 0.05)
        rho = np.diag([1.0, 0.0]).astype(complex)
        for _ in range(50000):
            rho = apply_gate(rho, gate, slot.rho_q, 2)
        ratio = (rho[1, 1] / rho[0, 0]).real
        assert abs(ratio - math.exp(-1.0)) < 1e-4


def test_criterion_2_modified_kms_identity():
    with criterion(2, "three-way gain/loss ratio identity on the grid"):
        for theta_q in (0.25, 0.55, 1.0):
            for theta_c in (0.0, math.pi / 6, math.pi / 3):
                for beta in (0.5, 1.0, 2.0):
                    spec, data = spectral_for(1.0, theta_q, beta, theta_c)
                    if data.gamma_plus == 0.0:
                        continue
                    eta_rates = data.gammabar_minus / data.gamma_plus
                    eta_elements = math.exp(-beta) * data.b_ba / data.b_ab
                    assert abs(eta_rates - eta_elements) < 1e-10
                    if eta_rates > 0:
                        beta_bar = modified_kms(data, 1.0, beta)
                        assert abs(math.exp(-beta_bar) - eta_rates) < 1e-10
                    else:
                        with pytest.raises(NegativeRatio):
                            modified_kms(data, 1.0, beta)


def test_criterion_3_complex_balance_flux():
    with criterion(3, "stationary net probability flux vanishes"):
        cfg = default_config("single_qubit")
        cfg["reservoir"].update({"theta_q": math.pi / 6, "theta_c": math.pi / 3})
        cfg["schedule"]["periods"] = 20000
        out = single_qubit_run(cfg)
        assert abs(out["flux"]) < 1e-8


def test_criterion_4_oracle_equivalence():
    with criterion(4, "closed-form rates match trace formulas on the grid"):
        worst = 0.0
        for omega in (0.5, 1.0, 2.0):
            for theta_q in (0.0, 0.25, 0.55, 1.0, 1.3):
                for beta in (0.0, 0.5, 1.0, 2.0):
                    for theta_c in (0.0, 0.5, math.pi / 3, math.pi / 2, 2.5):
                        spec, data = spectral_for(omega, theta_q, beta, theta_c)
                        # independent closed forms, straight from the weights
                        # and matrix elements
                        w_a, w_b = data.w_a, data.w_b
                        closed = (w_b * data.b_ba * data.b_ab,
                                  w_b * data.b_ab ** 2,
                                  w_a * data.b_ab * data.b_ba,
                                  w_a * data.b_ba ** 2)
                        got = (data.gamma_plus, data.gammabar_plus,
                               data.gamma_minus, data.gammabar_minus)
                        worst = max(worst, max(abs(a - b)
                                               for a, b in zip(got, closed)))
        assert worst < 1e-10


def test_criterion_5_map_vs_qme_convergence():
    with criterion(5, "engine deviation falls with coupling, not with step"):
        cfg = default_config("qs")
        cfg["bench"] = {"parameter": "g", "values": [1.0, 0.5, 0.25],
                        "t_bar": 0.2, "steps": 4000}
        devs_g = [r["max_dev"] for r in benchmark_map_vs_qme(cfg)]
        assert devs_g[0] > devs_g[1] > devs_g[2]

        cfg = default_config("qs")
        cfg["bench"] = {"parameter": "t_bar", "values": [0.2, 0.1, 0.05],
                        "g": 1.0, "steps": 4000}
        devs_t = [r["max_dev"] for r in benchmark_map_vs_qme(cfg)]
        # shrinking the collision interval does not drive the gap to zero
        assert min(devs_t) > 0.1


def test_criterion_6_dichromatic_emission():
    with criterion(6, "photon saturation, cross-mode bunching and "
                      "long-lag suppression"):
        out = dichromatic_run(default_config("dichromatic"))
        traj = out["collision"]
        for name in ("n1", "n2"):
            series = traj.observables[name]
            tail = max(2, len(series) // 10)
            rel = abs(series[-1] - series[-tail]) / abs(series[-1])
            assert rel < 0.01

        cross = next(c for c in out["g2"] if c.pair == (1, 2))
        assert cross.values[0] > 2.0
        assert cross.values[-1] < 1.0
        assert cross.lags[-1] == 4000

        small_tau = []
        for theta_q in (0.1, 0.3, 0.5):
            cfg = default_config("dichromatic")
            cfg["reservoir"]["theta_q"] = theta_q
            cfg["g2"]["pairs"] = [[1, 2]]
            cfg["g2"]["lags"] = [0]
            run = dichromatic_run(cfg)
            small_tau.append(run["g2"][0].values[0])
        assert small_tau[0] < small_tau[1] < small_tau[2]


def test_criterion_7_quantum_synchronization():
    with criterion(7, "long-term in-phase locking, anti-phase for "
                      "ferromagnetic coupling, initial-state independence"):
        out = qs_run(default_config("qs"))
        assert out["c12_final"] >= 0.99

        cfg = default_config("qs")
        cfg["model"]["j_coupling"] = -0.2
        out = qs_run(cfg)
        assert out["c12_final"] <= -0.99

        for angle in (2 * math.pi / 3, math.pi / 3, 0.0):
            cfg = default_config("qs")
            cfg["initial_state"] = {"type": "relative_angle", "angle": angle}
            out = qs_run(cfg)
            assert out["c12_final"] >= 0.99


def test_criterion_8_phase_boundary():
    with criterion(8, "oscillation amplitude vanishes at zero temperature, "
                      "persists at the operating point"):
        # the amplitude at the operating point sits on a quasi-stationary
        # plateau at the scan's default horizon; the zero-temperature
        # amplitude is a vanishing transient, so its row is evaluated in the
        # long-horizon limit where the claim lives
        cfg = default_config("qs")
        cfg["scan"] = {"phi0": [math.pi / 3], "beta": [1.0], "steps": 50000}
        row = phase_scan(cfg)[0]
        assert row["amplitude"] > 1e-2

        cfg = default_config("qs")
        cfg["scan"] = {"phi0": [math.pi / 3], "beta": [50.0], "steps": 600000}
        row = phase_scan(cfg)[0]
        assert row["amplitude"] < 1e-3


def test_criterion_9_lep_detection():
    with criterion(9, "exceptional-point orders and oscillation modes"):
        jordan2 = LiouvillianMatrix(dim=2, matrix=np.array([[0., 1.], [0., 0.]]))
        top = lep_detect(jordan2).clusters[0]
        assert (top.algebraic, top.geometric, top.lep_order) == (2, 1, 2)
        jordan3 = np.zeros((3, 3))
        jordan3[0, 1] = jordan3[1, 2] = 1.0
        top = lep_detect(LiouvillianMatrix(dim=3, matrix=jordan3),
                         tol_cluster=1e-4, tol_rank=1e-3).clusters[0]
        assert top.lep_order == 3

        def qs_average(theta_q):
            cfg = merge_config({"scenario": "qs",
                                "reservoir": {"theta_q": theta_q, "beta": 1.0,
                                              "phi0": math.pi / 3}})
            model, _, schedule, _ = build_setup(cfg)
            gens = qme_generators(cfg, model, schedule)
            return period_average([vectorize(g) for g in gens])

        lm = qs_average(math.atanh(math.sin(math.pi / 3)))
        norm = np.linalg.norm(lm.matrix, 2)
        report = lep_detect(lm, tol_cluster=1e-3 * norm, tol_rank=1e-2)
        best = max(report.clusters, key=lambda c: c.lep_order)
        assert best.lep_order == 4
        assert abs(best.center) < 1e-3 * norm

        lm = qs_average(0.55)
        values, _ = liouvillian_spectrum(lm)
        pair = oscillation_pair(values)
        assert pair is not None
        assert abs(pair[0].imag) > 1e-3
        assert pair[0].real >= values[0].real - 1e-7 * np.max(np.abs(values))


def test_criterion_10_structural_suites():
    with criterion(10, "complete positivity, kernel properties, "
                       "zero-lag regression consistency"):
        # Choi positivity of one collision for two- and three-level systems
        for builder in (_two_level_channel, _three_level_channel):
            channel, dim = builder()
            choi = choi_matrix(channel, dim)
            assert np.max(np.abs(choi - dag(choi))) < 1e-10
            assert np.min(np.linalg.eigvalsh(choi)) >= -1e-10

        rng = np.random.default_rng(7)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        c = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
        m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        assert abs(np.trace(partial_trace(m, SpaceShape((2, 3)), 0)) - np.trace(m)) < 1e-12
        x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        x = 5.0 * x / np.linalg.norm(x, 2)
        assert np.allclose(expm(x) @ expm(-x), np.eye(4), atol=1e-9)
        es = eig_biorthogonal(x)
        rebuilt = sum(es.values[k] * np.outer(es.rights[:, k], es.lefts[k])
                      for k in range(4))
        assert np.allclose(rebuilt, x, atol=1e-8)

        # zero-lag regression equals the direct four-operator expectation
        mrho = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        rho = mrho @ mrho.conj().T
        rho /= np.trace(rho)
        from cbtsim.systems import annihilation_operator
        p = annihilation_operator(2)
        i3 = np.eye(3, dtype=complex)
        p1, p2 = kron(p, i3), kron(i3, p)
        ident = lambda sigma, n: sigma
        for ordering in ("pp_dagger", "normal"):
            curve = g2(rho, p1, p2, [0], ident, ordering=ordering)
            if ordering == "pp_dagger":
                num = expval(rho, p1 @ p2 @ dag(p2) @ dag(p1))
                den = expval(rho, p1 @ dag(p1)) * expval(rho, p2 @ dag(p2))
            else:
                num = expval(rho, dag(p1) @ dag(p2) @ p2 @ p1)
                den = expval(rho, dag(p1) @ p1) * expval(rho, dag(p2) @ p2)
            assert abs(curve.values[0] - num / den) < 1e-10


def _two_level_channel():
    model, s_x = two_level_model(1.0)
    spec = ReservoirQubitSpec(1.0, 0.4, 1.0, 1.1)
    slot = make_slot(spec, s_x, model, (0, 1, 1.0))
    gate = collision_gate(model.h_s, slot, 0.8, 0.1)
    return (lambda e: apply_gate(e, gate, slot.rho_q, 2)), 2


def _three_level_channel():
    model, s_x = three_level_model(1.0, 1.5)
    spec = ReservoirQubitSpec(1.5, 0.4, 1.0, 1.1)
    slot = make_slot(spec, s_x, model, (1, 2, 1.5))
    gate = collision_gate(model.h_s, slot, 0.8, 0.1)
    return (lambda e: apply_gate(e, gate, slot.rho_q, 3)), 3
