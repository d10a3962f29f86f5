import math
import random

import pytest

from fracgame import (
    AlphaOutOfRange,
    RBarOutOfRange,
    ScenarioError,
    beta_density,
    build_cvar_game,
    build_meanstd_game,
    check_tail_dominance,
    cvar,
    density_curve,
    default_uniform_family,
    empirical_curve,
    leq_cp,
    leq_lr,
    mixture_reward,
    quantile_curve,
    uniform_curve,
    uniform_curve_family,
    verify_prop1,
    verify_prop2,
)
from fracgame.risk import (
    MeanStdScenario,
    cvar_scenario_from_dict,
    density_from_dict,
    meanstd_from_dict,
    meanstd_value,
)


# ---------------------------------------------------------------------------
# curves and tail averages


def test_quantile_curve_validation():
    with pytest.raises(ValueError):
        quantile_curve([(0, 1)])  # needs both endpoints
    with pytest.raises(ValueError):
        quantile_curve([(0, 1), (0.5, 1)])  # does not reach beta = 1
    with pytest.raises(ValueError):
        quantile_curve([(0, 2), (1, 1)])  # decreasing
    with pytest.raises(ValueError):
        quantile_curve([(0, -1), (1, 1)])
    with pytest.raises(ValueError):
        quantile_curve([(0, 0), (0.5, 0), (1, 1)])  # flat at zero inside
    curve = quantile_curve([(0, 0), (1, 2)])  # zero only at the origin is fine
    assert curve.value(0.5) == 1.0


def test_cvar_closed_form_uniform():
    c = uniform_curve(1.0, 3.0)
    # average of the lowest (1 - alpha) mass of a uniform spread
    for alpha in (0.0, 0.25, 0.5, 0.9, 0.99):
        want = 1.0 + (3.0 - 1.0) * (1.0 - alpha) / 2.0
        assert math.isclose(cvar(c, alpha), want, rel_tol=0, abs_tol=1e-12)
    assert math.isclose(c.mean, 2.0, abs_tol=1e-15)


def test_cvar_piecewise_and_bounds():
    c = quantile_curve([(0, 0), (1, 2)])
    for alpha in (0.0, 0.3, 0.7):
        assert math.isclose(cvar(c, alpha), 1.0 - alpha, abs_tol=1e-12)
    with pytest.raises(AlphaOutOfRange):
        cvar(c, 1.0)
    with pytest.raises(AlphaOutOfRange):
        cvar(c, -0.1)


def test_cvar_monotone_nonincreasing_in_alpha():
    rng = random.Random(12)
    for _ in range(50):
        knots = sorted(rng.random() for _ in range(3))
        values = sorted(rng.uniform(0.1, 5.0) for _ in range(5))
        pts = [(0.0, values[0])] + list(zip(knots, values[1:4])) + [(1.0, values[4])]
        pts = [(b, v) for b, v in pts]
        try:
            curve = quantile_curve(pts)
        except ValueError:
            continue
        levels = [i / 20 for i in range(20)]
        avgs = [cvar(curve, a) for a in levels]
        assert all(x >= y - 1e-12 for x, y in zip(avgs, avgs[1:]))


def test_density_validation_and_normalization():
    with pytest.raises(ValueError):
        density_curve([(0, 1), (1, 3)])  # integrates to 2
    d = density_curve([(0, 1), (1, 3)], normalize=True)
    assert d.value(0.0) == 0.5 and d.value(1.0) == 1.5
    with pytest.raises(ValueError):
        density_curve([(0, 1), (0.5, 0), (1, 1)], normalize=True)  # interior zero
    # endpoint zeros are allowed
    density_curve([(0, 0), (0.5, 2), (1, 0)], normalize=True)


def test_beta_density_shapes():
    flat = beta_density(1.0)
    assert flat.value(0.1) == 1.0 and flat.value(0.9) == 1.0
    ramp = beta_density(2.0)
    for alpha in (0.0, 0.25, 0.5, 1.0):
        assert math.isclose(ramp.value(alpha), 2.0 * alpha, abs_tol=1e-12)
    with pytest.raises(ValueError):
        beta_density(0.5)


def test_mixture_closed_forms():
    c = uniform_curve(1.0, 2.0)
    assert math.isclose(mixture_reward(c, beta_density(1.0)), 1.25, abs_tol=1e-10)
    assert math.isclose(mixture_reward(c, beta_density(2.0)), 1 + 1 / 6, abs_tol=1e-10)
    ramp = quantile_curve([(0, 0), (1, 2)])
    assert math.isclose(mixture_reward(ramp, beta_density(1.0)), 0.5, abs_tol=1e-10)


def test_mixture_against_dense_riemann_oracle():
    curve = quantile_curve([(0, 0.5), (0.25, 1.0), (1, 4.0)])
    density = density_curve([(0, 0.2), (0.6, 1.8), (1, 0.6)], normalize=True)
    steps = 200_000
    total = 0.0
    for j in range(steps):
        alpha = (j + 0.5) / steps
        total += cvar(curve, alpha) * density.value(alpha)
    total /= steps
    assert math.isclose(mixture_reward(curve, density), total, abs_tol=5e-9)


# ---------------------------------------------------------------------------
# monotone ratio checks


def test_tail_dominance_of_default_family():
    fam = default_uniform_family(4)
    assert check_tail_dominance(fam).holds


def test_tail_dominance_violation_detected():
    fam = {
        1: uniform_curve(1, 2),
        2: uniform_curve(1, 2),
        3: uniform_curve(2, 6),  # outer/inner ratio increases
    }
    verdict = check_tail_dominance(fam)
    assert not verdict.holds
    assert verdict.violations


def test_leq_lr_chain_and_reversal():
    d1, d2, d3 = beta_density(1.0), beta_density(2.0), beta_density(3.0)
    assert leq_lr(d1, d2).holds
    assert leq_lr(d2, d3).holds
    assert leq_lr(d1, d3).holds
    assert not leq_lr(d2, d1).holds
    assert leq_lr(d1, d1).holds


# ---------------------------------------------------------------------------
# mean-std games


def test_meanstd_values_and_bounds():
    g = build_meanstd_game(MeanStdScenario(3, 2.0, 1.0, 0.5))
    assert math.isclose(g.values[1], 2.0 - 0.5, abs_tol=1e-12)
    assert math.isclose(g.values[3], 4.0 - 0.5 * math.sqrt(2), abs_tol=1e-12)
    assert math.isclose(g.values[7], 6.0 - 0.5 * math.sqrt(3), abs_tol=1e-12)
    with pytest.raises(RBarOutOfRange):
        build_meanstd_game(MeanStdScenario(3, 2.0, 1.0, 2.0))
    with pytest.raises(RBarOutOfRange):
        build_meanstd_game(MeanStdScenario(3, 2.0, 1.0, -0.1))
    with pytest.raises(ScenarioError):
        build_meanstd_game(MeanStdScenario(3, 0.0, 1.0, 0.0))


def test_meanstd_zero_aversion_is_additive_scaled():
    phi = {c: 1.5 if c.bit_count() > 1 else 1.0 for c in range(1, 8)}
    g = build_meanstd_game(MeanStdScenario(3, 2.0, 0.5, 0.0, phi))
    assert math.isclose(g.values[7], 1.5 * 6.0, abs_tol=1e-12)
    assert math.isclose(g.values[3], 1.5 * 4.0, abs_tol=1e-12)
    assert math.isclose(g.values[1], 2.0, abs_tol=1e-12)


def test_meanstd_homogeneous_in_scale():
    a = build_meanstd_game(MeanStdScenario(4, 1.0, 0.5, 1.0))
    b = build_meanstd_game(MeanStdScenario(4, 3.0, 1.5, 1.0))
    for c in range(1, 16):
        assert math.isclose(b.values[c], 3.0 * a.values[c], rel_tol=1e-12)
    # same aversion, scaled units: the games order both ways
    assert leq_cp(a, b).holds and leq_cp(b, a).holds


def test_prop1_on_acceptance_grid():
    report = verify_prop1(4, 1.0, 0.5, [x / 4 for x in range(8)])
    assert report.passed
    assert report.order_pairs == 28


def test_prop1_ignores_common_synergy():
    rng = random.Random(6)
    phi = {c: rng.uniform(0.5, 2.0) for c in range(1, 16)}
    report = verify_prop1(4, 1.0, 0.5, [0.0, 0.7, 1.4], phi)
    assert report.passed
    base1 = build_meanstd_game(MeanStdScenario(4, 1.0, 0.5, 0.2))
    base2 = build_meanstd_game(MeanStdScenario(4, 1.0, 0.5, 1.2))
    with1 = build_meanstd_game(MeanStdScenario(4, 1.0, 0.5, 0.2, phi))
    with2 = build_meanstd_game(MeanStdScenario(4, 1.0, 0.5, 1.2, phi))
    assert leq_cp(base1, base2).holds == leq_cp(with1, with2).holds


def test_prop1_accepts_unsorted_grid():
    report = verify_prop1(3, 1.0, 0.5, [1.5, 0.0, 0.75])
    assert report.passed


def test_meanstd_ratio_pinned():
    g = build_meanstd_game(MeanStdScenario(4, 1.0, 0.5, 1.0))
    assert abs(g.values[3] / g.values[1] - 2.585786) < 1e-6
    assert meanstd_value(2, 1.0, 0.5, 1.0) == 2 - math.sqrt(2) * 0.5


# ---------------------------------------------------------------------------
# mixture games


def test_cvar_game_closed_forms():
    fam = default_uniform_family(4)
    g1 = build_cvar_game(fam, beta_density(1.0))
    g2 = build_cvar_game(fam, beta_density(2.0))
    for mask in range(1, 16):
        s = mask.bit_count()
        assert math.isclose(g1.values[mask], s + math.sqrt(s) / 4, abs_tol=1e-8)
        assert math.isclose(g2.values[mask], s + math.sqrt(s) / 6, abs_tol=1e-8)


def test_cvar_game_values_fall_as_mixing_hardens():
    fam = default_uniform_family(3)
    games = [build_cvar_game(fam, beta_density(a)) for a in (1.0, 2.0, 3.0)]
    for c in range(1, 8):
        vals = [g.values[c] for g in games]
        assert vals[0] > vals[1] > vals[2]


def test_cvar_game_requires_full_cover():
    fam = default_uniform_family(3)
    del fam[5]
    with pytest.raises(ScenarioError):
        build_cvar_game(fam, beta_density(1.0))


def test_prop2_chain_and_reversal():
    fam = default_uniform_family(4)
    d1, d2 = beta_density(1.0), beta_density(2.0)
    forward = verify_prop2(fam, d1, d2)
    assert forward.passed
    assert forward.tail.holds and forward.likelihood.holds and forward.order.holds
    backward = verify_prop2(fam, d2, d1)
    assert not backward.passed
    assert not backward.likelihood.holds


def test_prop2_catches_family_without_tail_dominance():
    fam = {
        1: uniform_curve(1, 2),
        2: uniform_curve(1, 2),
        3: uniform_curve(2, 6),
    }
    report = verify_prop2(fam, beta_density(1.0), beta_density(2.0))
    assert not report.tail.holds


def test_custom_family_scaling_cancels():
    # multiplying every curve by the same factor rescales values linearly
    fam = uniform_curve_family(3, lambda s: 2.0 * s, lambda s: 2.0 * (s + math.sqrt(s)))
    base = default_uniform_family(3)
    g_scaled = build_cvar_game(fam, beta_density(2.0))
    g_base = build_cvar_game(base, beta_density(2.0))
    for c in range(1, 8):
        assert math.isclose(g_scaled.values[c], 2.0 * g_base.values[c], rel_tol=1e-10)
    assert leq_cp(g_base, g_scaled).holds and leq_cp(g_scaled, g_base).holds


# ---------------------------------------------------------------------------
# scenario dictionaries


def test_meanstd_from_dict_expands_phi():
    scenario, players = meanstd_from_dict(
        {
            "n": 3,
            "mu": 1.0,
            "sigma": 0.5,
            "r": 0.25,
            "phi": {"default": 2.0, "a,b": 3.0},
        }
    )
    assert players == ("a", "b", "c")
    assert scenario.phi[3] == 3.0
    assert scenario.phi[7] == 2.0
    with pytest.raises(ScenarioError):
        meanstd_from_dict({"n": 3, "mu": 1.0})


def test_density_from_dict_variants():
    d = density_from_dict({"beta_a": 2})
    assert math.isclose(d.value(0.5), 1.0, abs_tol=1e-12)
    d = density_from_dict({"knots": [[0, 1], [1, 1]]})
    assert d.value(0.3) == 1.0
    with pytest.raises(ScenarioError):
        density_from_dict({})


def test_empirical_curve_interpolates_sample_quantiles():
    curve = empirical_curve([2.0, 1.0], knot_count=3)
    assert curve.knots == ((0.0, 1.0), (0.5, 1.5), (1.0, 2.0))

    draws = list(range(1, 101))
    random.Random(7).shuffle(draws)
    curve = empirical_curve(draws, knot_count=101)
    assert math.isclose(curve.value(0.0), 1.0, abs_tol=1e-12)
    assert math.isclose(curve.value(0.5), 50.5, abs_tol=1e-9)
    assert math.isclose(curve.value(1.0), 100.0, abs_tol=1e-12)
    assert math.isclose(curve.mean, 50.5, abs_tol=1e-6)


def test_empirical_curve_rejects_bad_samples():
    with pytest.raises(ScenarioError):
        empirical_curve([])
    with pytest.raises(ScenarioError):
        empirical_curve([1.0, 0.0])
    with pytest.raises(ScenarioError):
        empirical_curve([1.0, 2.0], knot_count=1)


def test_cvar_scenario_from_dict():
    curves, density, players = cvar_scenario_from_dict(
        {
            "players": ["x", "y"],
            "curves": {
                "x": [[0, 1], [1, 2]],
                "y": [[0, 1], [1, 2]],
                "x,y": [[0, 2.5], [1, 4.5]],
            },
            "density": {"knots": [[0, 1], [1, 1]]},
        }
    )
    assert players == ("x", "y")
    game = build_cvar_game(curves, density, players=players)
    assert math.isclose(game.values[3], 3.0, abs_tol=1e-10)
    with pytest.raises(ScenarioError):
        cvar_scenario_from_dict({"density": {"beta_a": 1}})


def test_cvar_scenario_accepts_sampled_curves():
    curves, density, players = cvar_scenario_from_dict(
        {
            "players": ["x", "y"],
            "curves": {
                "x": {"samples": [1.0, 2.0], "knot_count": 3},
                "y": {"knots": [[0, 1], [1, 2]]},
                "x,y": [[0, 2.5], [1, 4.5]],
            },
            "density": {"knots": [[0, 1], [1, 1]]},
        }
    )
    game = build_cvar_game(curves, density, players=players)
    assert math.isclose(game.values[1], 1.25, abs_tol=1e-10)
    assert math.isclose(game.values[2], 1.25, abs_tol=1e-10)
    with pytest.raises(ScenarioError):
        cvar_scenario_from_dict(
            {
                "players": ["x"],
                "curves": {"x": {"mean": 2.0}},
                "density": {"beta_a": 1},
            }
        )
