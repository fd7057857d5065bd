"""End-to-end acceptance criteria on the 10x10 grid preset.

Each test records a one-line verdict that is printed in the terminal summary.
"""
import statistics
import time

import numpy as np
import pytest

from kcoverage.cli import main
from kcoverage.engine import SimulationConfig, Simulator
from kcoverage.harness.experiment import figure5_config
from kcoverage.topology import UniformRandomTopology
from kcoverage.verification import check_centralized, check_death_after_std, message_bound_violations

from conftest import SEEDS

pytestmark = pytest.mark.acceptance


def full_phase(sim):
    """Periods before the first one in which some cell has fewer than 3 alive coverers."""
    inc = sim.region_graph.incidence
    for rec in sim.history:
        alive = np.zeros(inc.shape[1], dtype=bool)
        alive[list(rec.alive)] = True
        if np.any(inc[:, alive].sum(axis=1) < 3):
            return rec.period - 1
    return len(sim.history)


def network_lifetime(sim):
    return sim.trace.network_lifetime()


def col(sim, name):
    return np.array(sim.trace.column(name), dtype=float)


def test_1_cgs_full_coverage_phase(figure5_runs, criterion):
    parts, ok = [], True
    for loss in (0.0, 0.05):
        sims = figure5_runs.get("cgs", loss)
        phases = [full_phase(s) for s in sims]
        held = all(np.all(col(s, "theta_p3")[:p] == 1.0) for s, p in zip(sims, phases))
        med = statistics.median(phases)
        ok &= held and 22 <= med <= 30
        parts.append(f"loss={loss}: Θ'3=1 throughout={held}, median phase={med}")
    criterion(1, ok, "; ".join(parts) + " (need 22..30)")
    assert ok


def test_2_random_baseline_coverage(figure5_runs, criterion):
    m40 = np.mean([col(s, "theta_p3")[:20].mean() for s in figure5_runs.get("random", p_sleep=0.4)])
    m25 = np.mean([col(s, "theta_p3")[:20].mean() for s in figure5_runs.get("random", p_sleep=0.25)])
    ok = abs(m40 - 0.90) <= 0.05 and abs(m25 - 0.95) <= 0.04
    criterion(2, ok, f"p=0.4 mean Θ'3={m40:.3f} (0.90±0.05); p=0.25 mean Θ'3={m25:.3f} (0.95±0.04)")
    assert ok


def test_3_endgame_at_period_34(figure5_runs, criterion):
    rnd = np.mean([col(s, "theta_p1")[33] for s in figure5_runs.get("random", p_sleep=0.25)])
    cgs = figure5_runs.get("cgs")
    t3, t2, t1 = (np.mean([col(s, f"theta_p{k}")[33] for s in cgs]) for k in (3, 2, 1))
    ok = rnd <= 0.05 and t3 >= 0.6 and t2 >= 0.7 and t1 >= 0.85
    criterion(3, ok, f"random p=0.25 Θ'1={rnd:.3f} (≤0.05); CGS Θ'3={t3:.3f} (≥0.6) "
                     f"Θ'2={t2:.3f} (≥0.7) Θ'1={t1:.3f} (≥0.85)")
    assert ok


def test_4_awake_count_and_lifetime(figure5_runs, criterion):
    cgs = figure5_runs.get("cgs")
    r25 = figure5_runs.get("random", p_sleep=0.25)
    r40 = figure5_runs.get("random", p_sleep=0.4)
    cgs_awake, rnd_awake = [], []
    for c, r in zip(cgs, r25):
        p = full_phase(c)
        cgs_awake.extend(col(c, "awake")[:p])
        rnd_awake.extend(col(r, "awake")[:p])
    a_cgs, a_rnd = np.mean(cgs_awake), np.mean(rnd_awake)
    l_cgs = statistics.median(network_lifetime(s) for s in cgs)
    l_rnd = statistics.median(network_lifetime(s) for s in r40)
    ok = a_cgs < a_rnd and abs(l_cgs - l_rnd) <= 0.15 * l_rnd
    criterion(4, ok, f"awake CGS={a_cgs:.1f} vs random p=0.25={a_rnd:.1f}; "
                     f"lifetime CGS={l_cgs} vs random p=0.4={l_rnd} (±15%)")
    assert ok


def test_5_coverage_guarantee_under_loss(cgs_safety, criterion):
    cover, _ = cgs_safety
    criterion(5, cover.passed, cover.line())
    assert cover.cases == 200 and cover.passed


def test_6_death_after_std(criterion):
    res = check_death_after_std()
    criterion(6, res.passed, res.line())
    assert res.passed


def test_7_centralized_oracle(criterion):
    res = check_centralized(100)
    criterion(7, res.passed, res.line())
    assert res.cases == 100 and res.passed


def test_8_message_bound(figure5_runs, cgs_safety, criterion):
    _, msgs = cgs_safety
    bad, elections = list(msgs.violations), msgs.cases
    for loss in (0.0, 0.05):
        for sim in figure5_runs.get("cgs", loss):
            for rec in sim.history:
                if rec.election is not None:
                    elections += 1
                    v = message_bound_violations(rec.election)
                    if v:
                        bad.append((sim.config.seed, rec.period, v))
    criterion(8, not bad, f"{elections} elections, {len(bad)} with a node over the bound")
    assert not bad


def test_9_determinism(tmp_path, criterion):
    for d in ("a", "b"):
        assert main(["preset", "figure5", "--seeds", "7", "--out", str(tmp_path / d)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
    same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names)
    base = Simulator(figure5_config(scheduler="random", seed=7, max_periods=30))
    lossy = Simulator(figure5_config(scheduler="random", seed=7, max_periods=30, loss_probability=0.2))
    base.run(), lossy.run()
    isolated = base.nodes == lossy.nodes and [r.awake for r in base.history] == [r.awake for r in lossy.history]
    u1 = Simulator(SimulationConfig(topology=UniformRandomTopology(), seed=7, max_periods=0))
    u2 = Simulator(SimulationConfig(topology=UniformRandomTopology(), seed=7, max_periods=0,
                                    loss_probability=0.3))
    isolated &= u1.nodes == u2.nodes
    ok = len(names) == 5 and same and isolated
    criterion(9, ok, f"{len(names)} CSVs byte-identical={same}; substreams isolated={isolated}")
    assert ok


def test_10_estimator_agreement(criterion):
    worst = 0.0
    for seed in range(50):
        cfg = SimulationConfig(topology=UniformRandomTopology(), scheduler="always_on", max_periods=1, seed=seed)
        row = Simulator(cfg).run().rows[0]
        worst = max(worst, max(abs(a - b) for a, b in zip(row.theta, row.theta_prime)))
    ok = worst <= 0.1
    criterion(10, ok, f"max |Θ'k − Θk| over 50 deployments, k=1..3: {worst:.4f} (≤0.1)")
    assert ok


def test_runtime_budget(criterion):
    start = time.perf_counter()
    Simulator(figure5_config(scheduler="cgs", max_periods=40, seed=1)).run()
    elapsed = time.perf_counter() - start
    criterion("runtime", elapsed < 5.0, f"one 100-node 40-period CGS run took {elapsed:.2f} s (<5 s)")
    assert elapsed < 5.0

