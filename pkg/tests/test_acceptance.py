"""Exit criteria for the package, one test per criterion at its fixed tolerance."""
import json
import math
import statistics
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from gmn import classical, harness, noise, protocol, qsim
from gmn.harness import RunConfig
from gmn.noise import NoiseModel
from gmn.protocol import Parity

GOLDEN = json.loads((Path(__file__).parent / "golden" / "classical.json").read_text())


def test_01_classical_bound(criterion):
    start = time.perf_counter()
    best, argmax = classical.optimal_classical()
    elapsed = time.perf_counter() - start
    ok = best.probability == Fraction(3, 4) and classical.REFERENCE_STRATEGY in argmax and elapsed < 1.0
    criterion(1, "classical bound", ok, f"max={best.probability}, reference strategy optimal, {elapsed:.3f}s")
    assert best.probability == Fraction(3, 4)
    assert classical.REFERENCE_STRATEGY in argmax
    assert elapsed < 1.0


def test_02_perfect_quantum_strategy(criterion):
    start = time.perf_counter()
    worst = 0.0
    for v in protocol.enumerate_valid_variations():
        probs = protocol.round_distribution(v, protocol.ghz())
        good = protocol.EVEN_OUTCOMES if protocol.parity(v) is Parity.EVEN else protocol.ODD_OUTCOMES
        worst = max(worst, abs(probs[list(good)].sum() - 1))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 1.0
    criterion(2, "perfect quantum strategy", ok, f"max |P(correct) - 1| = {worst:.1e}, {elapsed:.3f}s")
    assert worst < 1e-12
    assert elapsed < 1.0


def test_03_rotation_identity(criterion):
    results = [
        qsim.equal_up_to_global_phase(
            protocol.rotate_for_variation(protocol.ghz(), v), protocol.ghz_transform_oracle(v), atol=1e-12
        )
        for v in protocol.enumerate_valid_variations()
    ]
    criterion(3, "rotated GHZ equals oracle", all(results), f"{sum(results)}/32 variations")
    assert all(results)


def test_04_preparation_pipeline(criterion):
    psi, p_pbs, p_trigger = protocol.prepare_ghz_via_pbs()
    f = qsim.fidelity(psi, protocol.prepare_ghz_direct())
    ok = abs(f - 1) < 1e-12 and abs(p_pbs - 0.5) < 1e-12 and abs(p_trigger - 0.5) < 1e-12
    criterion(4, "beam-splitter preparation", ok, f"fidelity={f:.15f}, p_pbs={p_pbs}, p_trigger={p_trigger}")
    assert abs(f - 1) < 1e-12
    assert abs(p_pbs - 0.5) < 1e-12
    assert abs(p_trigger - 0.5) < 1e-12


def test_05_published_statistics(criterion):
    p, se, z = harness.stats_from_totals(28768, 5032)
    ok = abs(p - 0.8511) <= 5e-4 and abs(se - 0.0019) <= 2e-4 and 52 <= z <= 53
    criterion(5, "published statistics replay", ok, f"p={p:.5f}, se={se:.5f}, z={z:.2f}")
    assert abs(p - 0.8511) <= 5e-4
    assert abs(se - 0.0019) <= 2e-4
    assert 52 <= z <= 53


def test_06_noisy_reproduction(criterion):
    v = noise.calibrate_visibility(0.851)
    start = time.perf_counter()
    report = harness.run_experiment(RunConfig(1056, NoiseModel(v), master_seed=7, workers=1))
    elapsed = time.perf_counter() - start
    median_z = statistics.median(s.zscore_vs_classical for s in report.per_variation)
    p = report.pooled_probability
    ok = abs(p - 0.851) <= 0.006 and 7 <= median_z <= 11 and elapsed < 30
    criterion(6, "calibrated Monte Carlo", ok, f"v={v:.3f}, p={p:.4f}, median z={median_z:.2f}, {elapsed:.2f}s")
    assert abs(v - 0.702) < 1e-12
    assert abs(p - 0.851) <= 0.006
    assert 7 <= median_z <= 11
    assert elapsed < 30


def test_07_noise_closed_form(criterion):
    grid = np.linspace(0, 1, 21)
    worst = max(
        abs(noise.win_probability_exact(NoiseModel(v, p)) - ((1 + v) * (1 - p) / 2 + p / 2))
        for v in grid
        for p in grid
    )
    criterion(7, "noise closed form", worst < 1e-12, f"max deviation {worst:.1e} on 21x21 grid")
    assert worst < 1e-12


def test_08_efficiency_invariance(criterion):
    rates = {}
    for seed, eff in enumerate((1.0, 0.5, 0.1)):
        cfg = RunConfig(3125, NoiseModel(0.702, detector_efficiency=(eff,) * 3), master_seed=1000 + seed)
        report = harness.run_experiment(cfg)
        assert report.pooled_total == 10**5
        rates[eff] = (report.pooled_correct, report.pooled_total)
    zs = []
    effs = list(rates)
    for i in range(3):
        for j in range(i + 1, 3):
            (c1, n1), (c2, n2) = rates[effs[i]], rates[effs[j]]
            pooled = (c1 + c2) / (n1 + n2)
            se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
            zs.append((c1 / n1 - c2 / n2) / se)
    ok = all(abs(z) < 3 for z in zs)
    detail = ", ".join(f"eff {e}: {c / n:.4f}" for e, (c, n) in rates.items()) + f"; max |z|={max(map(abs, zs)):.2f}"
    criterion(8, "efficiency invariance", ok, detail)
    assert ok


def test_09_communication_cost(criterion):
    start = time.perf_counter()
    v11, w11 = classical.best_comm_protocol(1, 1)
    v00, w00 = classical.best_comm_protocol(0, 0)
    elapsed = time.perf_counter() - start
    golden_ok = (
        GOLDEN["comm"]["xor"]["11"] == str(v11.probability)
        and w11.to_dict() == GOLDEN["examples"]["xor_11"]
        and w00.to_dict() == GOLDEN["examples"]["local"]
    )
    ok = v11.probability == 1 and v00.probability == Fraction(3, 4) and golden_ok and elapsed < 60
    criterion(
        9, "communication cost", ok,
        f"two bits -> {v11.probability}, no bits -> {v00.probability}, golden match={golden_ok}, {elapsed:.2f}s",
    )
    assert v11.probability == 1
    assert classical.evaluate_protocol(w11).wins == 32
    assert v00.probability == Fraction(3, 4)
    assert golden_ok
    assert elapsed < 60


def test_10_determinism(criterion):
    noise_model = NoiseModel(0.702, 0.02, (0.8, 0.9, 0.7))
    blobs = {
        w: harness.emit_report(harness.run_experiment(RunConfig(1000, noise_model, master_seed=42, workers=w)))
        for w in (1, 4, 8)
    }
    ok = blobs[1] == blobs[4] == blobs[8]
    criterion(10, "worker-count determinism", ok, f"{len(blobs[1])} bytes, identical for workers 1/4/8")
    assert ok
