import math

import numpy as np
import pytest

from spikedwigner import montecarlo as mc
from spikedwigner.limits import LimitLaw, frechet_E_cdf
from spikedwigner.matrices import SpikeVectorSpec, SpikedModel, build_wigner, perturbed_matrix, top_eigenvalues
from spikedwigner.tails import TailLaw


LAW2 = TailLaw.pareto(2.0)
LAW4 = TailLaw.pareto4_unitvar()


def _config(**kw):
    base = dict(law=LAW2, spike=SpikeVectorSpec.uniform(), theta=0.0,
                n_list=(30,), trials=4, master_seed=11)
    base.update(kw)
    return mc.ExperimentConfig(**base)


# --------------------------------------------------------------------------- #
# seeds and determinism
# --------------------------------------------------------------------------- #

def test_derive_seed_pure_and_distinct():
    s = mc.derive_seed(42, 100, 3)
    assert s == mc.derive_seed(42, 100, 3)
    seeds = {mc.derive_seed(42, n, t) for n in (50, 100, 200) for t in range(50)}
    assert len(seeds) == 150
    assert mc.derive_seed(43, 100, 3) != s


def test_spike_dominates_tiny_matrix():
    cfg = _config(law=LAW4, spike=SpikeVectorSpec.basis(1), theta=5.0,
                  n_list=(2,), trials=20, master_seed=3)
    recs = mc.run_experiment(cfg)
    # the rank-one part has eigenvalue 5; the 2x2 noise is O(1)
    med = mc.quantile([r.lambda1 for r in recs], 0.5)
    assert abs(med - 5.0) < 0.8
    for r in recs:
        # Weyl: lambda_1 >= theta - ||scaled A|| >= theta - 2 maxA at n = 2
        assert r.lambda1 >= 5.0 - 2.0 * r.maxA - 1e-9


def test_run_experiment_deterministic_across_threads():
    cfg = _config(n_list=(20, 40), trials=6, theta=1.0)
    a = mc.run_experiment(cfg, threads=1)
    b = mc.run_experiment(cfg, threads=4)
    assert [(r.n, r.trial_index, r.seed, r.lambda1, r.maxA) for r in a] == \
           [(r.n, r.trial_index, r.seed, r.lambda1, r.maxA) for r in b]
    assert [r.n for r in a] == sorted(r.n for r in a)
    csv_a = mc.trials_csv_text(a, "x", timing="zero")
    csv_b = mc.trials_csv_text(b, "x", timing="zero")
    assert csv_a == csv_b


def test_csv_shape_and_timing_modes():
    cfg = _config(trials=2)
    recs = mc.run_experiment(cfg)
    text = mc.trials_csv_text(recs, "runid", timing="measured")
    lines = text.strip().split("\n")
    assert lines[0] == "run_id,n,trial_index,seed,lambda1,maxA,wall_time_ms"
    assert len(lines) == 3
    with pytest.raises(ValueError):
        mc.trials_csv_text(recs, "runid", timing="bogus")
    # identical modulo the timing column
    z1 = mc.trials_csv_text(recs, "runid", timing="zero")
    recs2 = mc.run_experiment(cfg)
    z2 = mc.trials_csv_text(recs2, "runid", timing="zero")
    assert z1 == z2


def test_config_round_trip_and_validation():
    cfg = _config(target=LimitLaw.make("thm1", theta=0.0, alpha=2.0))
    again = mc.ExperimentConfig.from_config(cfg.as_config())
    assert again == cfg
    with pytest.raises(ValueError):
        _config(trials=0)
    with pytest.raises(ValueError):
        _config(n_list=(30, 20))
    with pytest.raises(ValueError):
        _config(statistics=("lambda1", "junk"))


# --------------------------------------------------------------------------- #
# empirical distribution machinery
# --------------------------------------------------------------------------- #

def test_ks_distance_examples():
    uniform = lambda y: min(1.0, max(0.0, y))
    assert mc.ks_distance([0.25, 0.75], uniform) == pytest.approx(0.25, abs=1e-15)
    # single sample at the median
    assert mc.ks_distance([1.0], lambda y: 0.5 if y >= 1.0 else 0.0) == pytest.approx(0.5)


def test_ks_distance_dkw():
    rng = np.random.default_rng(8)
    n = 10 ** 4
    u = 1.0 - rng.random(n)
    samples = u ** -0.5  # survival x^-2 on [1, inf)
    cdf = lambda y: max(0.0, 1.0 - y ** -2.0) if y > 0 else 0.0
    assert mc.ks_distance(samples, cdf) <= 1.63 / math.sqrt(n)


def test_empirical_distribution_cdf():
    emp = mc.EmpiricalDistribution.from_samples([3.0, 1.0, 2.0])
    assert emp.values == (1.0, 2.0, 3.0)
    assert emp.cdf(0.5) == 0.0
    assert emp.cdf(1.0) == pytest.approx(1.0 / 3.0)
    assert emp.cdf(10.0) == 1.0


def test_quantile():
    assert mc.quantile([1.0, 2.0, 3.0], 0.5) == 2.0
    assert mc.quantile([1.0, 2.0, 3.0], 1.0) == 3.0
    assert mc.quantile([1.0, 2.0, 3.0], 0.0) == 1.0
    assert mc.quantile(list(range(1, 101)), 0.34) == 34
    with pytest.raises(ValueError):
        mc.quantile([1.0], 1.5)


# --------------------------------------------------------------------------- #
# statistical invariants at desk scale
# --------------------------------------------------------------------------- #

def test_spike_monotonicity_on_trials():
    cfg = _config(theta=1.5, n_list=(60,), trials=15, master_seed=5)
    recs = mc.run_experiment(cfg)
    for r in recs:
        rng = np.random.default_rng(r.seed)
        A = build_wigner(r.n, cfg.law, rng)
        base = SpikedModel.auto(r.n, 0.0, cfg.spike, cfg.law)
        lam0 = top_eigenvalues(perturbed_matrix(A, base), 1)[0]
        assert r.lambda1 >= lam0 - 1e-12


def test_lambda1_tracks_max_entry_unperturbed():
    gaps = {}
    for n in (100, 400):
        cfg = _config(n_list=(n,), trials=60, master_seed=17)
        recs = mc.run_experiment(cfg)
        lam = [r.lambda1 for r in recs]
        maxa = [r.maxA for r in recs]
        gaps[n] = abs(mc.quantile(lam, 0.5) - mc.quantile(maxa, 0.5))
    assert gaps[400] < gaps[100]


def test_convergence_sweep_and_target():
    target = LimitLaw.make("thm1", theta=0.0, alpha=2.0)
    cfg = _config(n_list=(50, 150), trials=40, master_seed=23, target=target)
    rows = mc.convergence_sweep(cfg)
    assert [row["n"] for row in rows] == [50, 150]
    for row in rows:
        assert 0.0 <= row["ks"] <= 1.0
        assert row["trials"] == 40
        assert row["target_law"] == target.as_config()
    with pytest.raises(ValueError):
        mc.convergence_sweep(_config())


def test_ks_distance_discriminates_theta_at_small_n():
    cfg = _config(n_list=(400,), trials=60, master_seed=29)
    recs = mc.run_experiment(cfg)
    lam = [r.lambda1 for r in recs]
    right = mc.ks_distance(lam, lambda y: frechet_E_cdf(2.0, y) if y > 0 else 0.0)
    wrong = mc.ks_distance(lam, LimitLaw.make("thm1", theta=2.0, alpha=2.0).cdf)
    assert right < wrong


def test_thm3_median_at_desk_scale():
    cfg = mc.ExperimentConfig(
        law=LAW4, spike=SpikeVectorSpec.basis(1), theta=2.0,
        n_list=(300,), trials=60, master_seed=41,
        target=LimitLaw.make("thm3", theta=2.0, c=0.25))
    rows = mc.convergence_sweep(cfg)
    assert abs(rows[0]["median_lambda1"] - 2.5) < 0.5
