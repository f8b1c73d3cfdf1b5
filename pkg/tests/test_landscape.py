import numpy as np
import pytest

from wellscape import (BranchedSpec, EnergyParams, MinimizeConfig,
                       branched_seed, critical_delta, energy, fit_power_law,
                       local_minimality_probe, make_grid, minimize,
                       multistart_portfolio, random_admissible, zero_field)

FAST_CFG = MinimizeConfig(max_iters=50, w_init=0.2, w_factor=0.25, w_floor=0.04)


def test_minimize_zero_start_stays_zero(grid64):
    res = minimize(zero_field(grid64), EnergyParams(0.1, 0.0, 1), FAST_CFG)
    assert res.breakdown.total == 0.0
    assert np.abs(res.field.values).max() == 0.0


def test_minimize_below_the_quadratic_floor(grid64):
    # delta < 16 eps^2: no admissible state undercuts E(0)
    eps = 0.1
    delta = 0.9 * 16 * eps**2
    p = EnergyParams(eps, delta, 1)
    e0 = delta * grid64.L
    for name, start in multistart_portfolio(eps, grid64, seed=3):
        res = minimize(start, p, FAST_CFG)
        assert res.breakdown.total >= e0 - 1e-6 * max(e0, eps)


def test_minimize_beats_austenite_at_large_delta():
    g = make_grid(1.0, 128, 128)
    eps = 0.05
    delta = 50.0 * eps
    p = EnergyParams(eps, delta, 1)
    seed = branched_seed(BranchedSpec.from_epsilon(eps, 1.0), g)
    res = minimize(seed, p, FAST_CFG)
    assert res.breakdown.total < delta * g.L
    assert res.breakdown.area_B > 0.0


def test_minimize_monotone_stages_and_pinned_edge(grid64, rng):
    p = EnergyParams(0.08, 0.6, 1)
    start = random_admissible(grid64, rng, amplitude=1.5)
    res = minimize(start, p, FAST_CFG)
    assert res.backtrack_failures == 0
    by_stage = {}
    for rec in res.trace:
        by_stage.setdefault(rec["stage"], []).append(rec["smoothed_energy"])
    for energies in by_stage.values():
        assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))
    assert np.abs(res.field.values[0, :]).max() == 0.0
    assert res.breakdown.total <= res.start_sharp + 1e-12


def test_minimize_never_worse_than_start(grid64, rng):
    p = EnergyParams(0.05, 1.2, 2)
    for _ in range(3):
        start = random_admissible(grid64, rng, amplitude=rng.uniform(0.2, 2.0))
        res = minimize(start, p, FAST_CFG)
        assert res.breakdown.total <= energy(start, p).total + 1e-12


def test_minimize_deterministic(grid64):
    p = EnergyParams(0.07, 0.9, 1)
    start = random_admissible(grid64, np.random.default_rng(11), amplitude=1.0)
    a = minimize(start, p, FAST_CFG)
    b = minimize(start, p, FAST_CFG)
    assert np.array_equal(a.field.values, b.field.values)
    assert a.breakdown.total == b.breakdown.total


def test_critical_delta_coarse_bracket(grid64):
    res = critical_delta(0.05, 1.0, 1, grid64, FAST_CFG, tol_rel=0.5,
                         bracket=(0.05, 5.0), seed=0)
    assert res.delta_lo < res.delta_hi
    assert res.delta_hi / res.delta_lo <= 1.5 + 1e-9
    lo_recs = [r for r in res.evaluations if r.delta == res.delta_lo]
    hi_recs = [r for r in res.evaluations if r.delta == res.delta_hi]
    assert lo_recs and not lo_recs[-1].beats
    assert hi_recs and hi_recs[-1].beats


def test_critical_delta_deterministic(grid64):
    a = critical_delta(0.06, 1.0, 1, grid64, FAST_CFG, tol_rel=0.6,
                       bracket=(0.06, 6.0), seed=5)
    b = critical_delta(0.06, 1.0, 1, grid64, FAST_CFG, tol_rel=0.6,
                       bracket=(0.06, 6.0), seed=5)
    assert (a.delta_lo, a.delta_hi) == (b.delta_lo, b.delta_hi)
    assert [(r.delta, r.best_energy) for r in a.evaluations] == \
           [(r.delta, r.best_energy) for r in b.evaluations]


def test_fit_power_law_exact():
    eps = [0.002, 0.005, 0.01, 0.02, 0.05]
    fit = fit_power_law(eps, [3 * e for e in eps])
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.constant == pytest.approx(3.0, rel=1e-12)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-12)


def test_probe_zero_delta_no_violations(grid64):
    rep = local_minimality_probe(EnergyParams(0.05, 0.0, 1), grid64, 40,
                                 norm_cap=10.0, seed=1)
    assert rep.violations == 0
    assert rep.eligible == 40


def test_probe_area_mode_eligibility(grid64):
    rep = local_minimality_probe(EnergyParams(0.05, 0.2, 1), grid64, 30,
                                 area_cap=0.05, seed=2)
    assert rep.violations == 0
    assert rep.eligible > 0


def test_probe_argument_validation(grid64):
    with pytest.raises(ValueError):
        local_minimality_probe(EnergyParams(0.1), grid64, 5)
    with pytest.raises(ValueError):
        local_minimality_probe(EnergyParams(0.1), grid64, 5, norm_cap=1.0, area_cap=1.0)


def test_random_admissible_properties(grid64, rng):
    for _ in range(5):
        u = random_admissible(grid64, rng, amplitude=rng.uniform(0.1, 4.0))
        assert np.abs(u.values[0, :]).max() == 0.0
        assert np.all(np.isfinite(u.values))


def test_portfolio_contents(grid64):
    names = [name for name, _ in multistart_portfolio(0.05, grid64, seed=0)]
    assert names[0] == "zero"
    assert "branched" in names and "random" in names
    assert any(n.startswith("branched_x") for n in names)
