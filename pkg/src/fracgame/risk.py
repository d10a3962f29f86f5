"""Games built from risky ventures.

Two constructions produce strictly positive games in float mode:

* mean-std: a coalition of s players earns s*mu - r*sqrt(s)*sigma, scaled by
  an optional per-coalition synergy factor; r is the risk-aversion weight and
  must stay in [0, mu/sigma) so every value is positive.

* tail-average mixtures: each coalition carries a nondecreasing piecewise
  linear reward-quantile curve; its value averages the lower-tail means
  (the average of k over the worst 1-alpha quantile mass) against a mixing
  density over alpha.  High alpha averages a small, bad tail, so densities
  leaning toward alpha = 1 price more conservatively.

The module also hosts the two monotonicity verifiers: rising risk aversion
in the mean-std family orders the games, and a likelihood-ratio shift of the
mixing density orders tail-average games whose curves have the dominating-
tail-ratio property.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import AlphaOutOfRange, RBarOutOfRange, ScenarioError
from .games import (
    DEFAULT_TOL,
    FLOAT,
    Game,
    coalition_from_label,
    coalitions,
    default_players,
    leq,
    geq,
    make_game,
    submasks,
)
from .centripetality import OrderVerdict, leq_cp

_raw_nodes, _raw_weights = np.polynomial.legendre.leggauss(32)
_GL_NODES = tuple(float(x) for x in _raw_nodes)
_GL_WEIGHTS = tuple(float(x) for x in _raw_weights)


# ---------------------------------------------------------------------------
# piecewise linear curves


def _interp(knots_x, knots_y, x: float) -> float:
    j = bisect.bisect_right(knots_x, x) - 1
    if j >= len(knots_x) - 1:
        return knots_y[-1]
    x0, x1 = knots_x[j], knots_x[j + 1]
    y0, y1 = knots_y[j], knots_y[j + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


@dataclass(frozen=True)
class QuantileCurve:
    """Nondecreasing piecewise linear reward-quantile curve on [0, 1],
    nonnegative, strictly positive away from 0.  ``prefix[j]`` caches the
    integral from 0 to the j-th knot."""

    knots: tuple[tuple[float, float], ...]
    prefix: tuple[float, ...]

    def value(self, beta: float) -> float:
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"quantile argument {beta!r} outside [0, 1]")
        return _interp([b for b, _ in self.knots], [v for _, v in self.knots], beta)

    def integral_to(self, x: float) -> float:
        """Integral of the curve from 0 to x, closed form per segment."""
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"integration bound {x!r} outside [0, 1]")
        betas = [b for b, _ in self.knots]
        vals = [v for _, v in self.knots]
        j = bisect.bisect_right(betas, x) - 1
        if j >= len(betas) - 1:
            return self.prefix[-1]
        dx = x - betas[j]
        slope = (vals[j + 1] - vals[j]) / (betas[j + 1] - betas[j])
        return self.prefix[j] + vals[j] * dx + 0.5 * slope * dx * dx

    @property
    def mean(self) -> float:
        return self.prefix[-1]


def quantile_curve(knots: Sequence) -> QuantileCurve:
    pts = [(float(b), float(v)) for b, v in knots]
    if len(pts) < 2 or pts[0][0] != 0.0 or pts[-1][0] != 1.0:
        raise ValueError("curve knots must run from beta=0 to beta=1")
    prev_b, prev_v = pts[0]
    if prev_v < 0:
        raise ValueError("curve values must be nonnegative")
    prefix = [0.0]
    for b, v in pts[1:]:
        if b <= prev_b:
            raise ValueError("curve knots must be strictly increasing in beta")
        if v < prev_v:
            raise ValueError("curve must be nondecreasing")
        if v <= 0:
            raise ValueError("curve must be strictly positive for beta > 0")
        prefix.append(prefix[-1] + 0.5 * (prev_v + v) * (b - prev_b))
        prev_b, prev_v = b, v
    return QuantileCurve(tuple(pts), tuple(prefix))


def uniform_curve(lo: float, hi: float) -> QuantileCurve:
    """Curve of a reward uniformly spread between lo and hi."""
    return quantile_curve([(0.0, lo), (1.0, hi)])


def empirical_curve(samples: Sequence, knot_count: int = 101) -> QuantileCurve:
    """Quantile curve estimated from raw reward draws.

    Evaluates the linearly interpolated empirical quantile function of the
    sample at knot_count evenly spaced levels.  Draws must be positive so
    the resulting curve is a valid reward curve.
    """
    if knot_count < 2:
        raise ScenarioError("need at least two knots")
    data = [float(x) for x in samples]
    if not data:
        raise ScenarioError("cannot build a curve from an empty sample")
    if min(data) <= 0:
        raise ScenarioError("sample draws must be positive")
    betas = [j / (knot_count - 1) for j in range(knot_count)]
    levels = np.quantile(np.array(data), betas)
    knots = []
    prev = None
    for b, q in zip(betas, levels):
        q = float(q)
        if prev is not None and q < prev:
            q = prev
        knots.append((b, q))
        prev = q
    return quantile_curve(knots)


@dataclass(frozen=True)
class Density:
    """Piecewise linear mixing density on [0, 1]: nonnegative, strictly
    positive strictly inside the interval, integrating to one."""

    knots: tuple[tuple[float, float], ...]

    def value(self, alpha: float) -> float:
        if not 0.0 <= alpha <= 1.0:
            raise AlphaOutOfRange(f"density argument {alpha!r} outside [0, 1]")
        return _interp([a for a, _ in self.knots], [v for _, v in self.knots], alpha)


def density_curve(knots: Sequence, *, normalize: bool = False) -> Density:
    pts = [(float(a), float(v)) for a, v in knots]
    if len(pts) < 2 or pts[0][0] != 0.0 or pts[-1][0] != 1.0:
        raise ValueError("density knots must run from alpha=0 to alpha=1")
    total = 0.0
    prev_a, prev_v = pts[0]
    if prev_v < 0:
        raise ValueError("density values must be nonnegative")
    for a, v in pts[1:]:
        if a <= prev_a:
            raise ValueError("density knots must be strictly increasing in alpha")
        if v < 0 or (v == 0 and a < 1.0):
            raise ValueError("density must be strictly positive inside (0, 1)")
        total += 0.5 * (prev_v + v) * (a - prev_a)
        prev_a, prev_v = a, v
    if normalize:
        if total <= 0:
            raise ValueError("cannot normalize a zero density")
        pts = [(a, v / total) for a, v in pts]
    elif abs(total - 1.0) > 1e-9:
        raise ValueError(f"density integrates to {total!r}, not 1; pass normalize=True")
    return Density(tuple(pts))


def beta_density(a: float, knot_count: int = 101) -> Density:
    """Discretized density proportional to alpha**(a-1); a = 1 is uniform,
    larger a shifts mass toward alpha = 1 (more conservative mixing)."""
    if a < 1:
        raise ValueError("shape parameter must be at least 1")
    if knot_count < 2:
        raise ValueError("need at least two knots")
    alphas = [j / (knot_count - 1) for j in range(knot_count)]
    return density_curve([(x, x ** (a - 1)) for x in alphas], normalize=True)


# ---------------------------------------------------------------------------
# tail averages and mixtures


def cvar(curve: QuantileCurve, alpha: float) -> float:
    """Mean of the curve over its lowest 1-alpha mass: the strict tail
    average at level alpha.  alpha = 0 gives the plain mean."""
    if not 0.0 <= alpha < 1.0:
        raise AlphaOutOfRange(f"tail level {alpha!r} outside [0, 1)")
    x = 1.0 - alpha
    return curve.integral_to(x) / x


def mixture_reward(curve: QuantileCurve, density: Density) -> float:
    """Tail averages of the curve mixed against the density, by composite
    Gauss-Legendre quadrature split at every kink of the integrand."""
    points = {0.0, 1.0}
    points.update(1.0 - b for b, _ in curve.knots)
    points.update(a for a, _ in density.knots)
    grid = sorted(x for x in points if 0.0 <= x <= 1.0)
    total = 0.0
    for a, b in zip(grid, grid[1:]):
        width = b - a
        if width <= 0:
            continue
        panels = max(1, math.ceil(width / 0.0625))
        for p in range(panels):
            lo = a + width * p / panels
            hi = a + width * (p + 1) / panels
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
                alpha = mid + half * node
                total += weight * half * cvar(curve, alpha) * density.value(alpha)
    return float(total)


# ---------------------------------------------------------------------------
# monotone ratio checks (division-free, segmentwise)


@dataclass(frozen=True)
class MonotoneVerdict:
    holds: bool
    violations: tuple = ()


def _ratio_monotone(f_knots, g_knots, nonincreasing: bool, tol: float):
    """Check that g/f is monotone on [0, 1] for piecewise linear f, g >= 0.

    On each common-refinement segment the numerator of (g/f)' is the linear
    function W = g'*f - g*f', so checking W's sign at segment endpoints is
    exact.  Returns the first offending segment or None.
    """
    xs = sorted({x for x, _ in f_knots} | {x for x, _ in g_knots})
    f_x = [x for x, _ in f_knots]
    f_y = [y for _, y in f_knots]
    g_x = [x for x, _ in g_knots]
    g_y = [y for _, y in g_knots]
    for a, b in zip(xs, xs[1:]):
        if b <= a:
            continue
        fa, fb = _interp(f_x, f_y, a), _interp(f_x, f_y, b)
        ga, gb = _interp(g_x, g_y, a), _interp(g_x, g_y, b)
        mf = (fb - fa) / (b - a)
        mg = (gb - ga) / (b - a)
        for fx, gx in ((fa, ga), (fb, gb)):
            lhs = mg * fx
            rhs = gx * mf
            ok = leq(lhs, rhs, tol) if nonincreasing else geq(lhs, rhs, tol)
            if not ok:
                return (a, b)
    return None


def check_tail_dominance(
    curves: Mapping[int, QuantileCurve], tol: float = DEFAULT_TOL
) -> MonotoneVerdict:
    """Whether for every nested coalition pair the larger coalition's curve
    dominates in relative tails: the curve ratio outer/inner is nonincreasing
    in the quantile argument."""
    violations = []
    for outer in sorted(curves):
        for inner in submasks(outer, proper=True):
            if inner not in curves:
                continue
            bad = _ratio_monotone(
                curves[inner].knots, curves[outer].knots, nonincreasing=True, tol=tol
            )
            if bad is not None:
                violations.append((inner, outer) + bad)
    return MonotoneVerdict(not violations, tuple(violations))


def leq_lr(d1: Density, d2: Density, tol: float = DEFAULT_TOL) -> MonotoneVerdict:
    """Likelihood-ratio comparison of mixing densities: d2/d1 nondecreasing,
    meaning d2 leans toward high alpha (prices tails harder) than d1."""
    bad = _ratio_monotone(d1.knots, d2.knots, nonincreasing=False, tol=tol)
    if bad is None:
        return MonotoneVerdict(True)
    return MonotoneVerdict(False, (bad,))


# ---------------------------------------------------------------------------
# game constructions


@dataclass(frozen=True)
class MeanStdScenario:
    n: int
    mu: float
    sigma: float
    r: float
    phi: Mapping[int, float] | None = None


def meanstd_value(size: int, mu: float, sigma: float, r: float) -> float:
    return size * mu - r * math.sqrt(size) * sigma


def build_meanstd_game(
    scenario: MeanStdScenario,
    *,
    players: Sequence[str] | None = None,
    tol: float = DEFAULT_TOL,
) -> Game:
    """Pooled-venture game: s pooled units earn s*mu with sqrt(s)*sigma
    spread, priced at aversion r; an optional synergy factor scales single
    coalitions.  r = 0 gives the additive game scaled by the synergy."""
    n, mu, sigma, r = scenario.n, scenario.mu, scenario.sigma, scenario.r
    if mu <= 0 or sigma <= 0:
        raise ScenarioError("mu and sigma must be positive")
    if not 0 <= r < mu / sigma:
        raise RBarOutOfRange(f"risk aversion {r!r} outside [0, {mu / sigma!r})")
    phi = scenario.phi or {}
    for c, factor in phi.items():
        if factor <= 0:
            raise ScenarioError(f"synergy factor for {c:#x} must be positive")
    values = {}
    for c in coalitions(n):
        base = meanstd_value(c.bit_count(), mu, sigma, r)
        values[c] = phi.get(c, 1.0) * base
    return make_game(n, values, mode=FLOAT, tol=tol, players=players)


def build_cvar_game(
    curves: Mapping[int, QuantileCurve],
    density: Density,
    *,
    players: Sequence[str] | None = None,
    tol: float = DEFAULT_TOL,
) -> Game:
    """Game whose coalition values are the curves' tail averages mixed
    against the density.  The curve table must cover every coalition."""
    if not curves:
        raise ScenarioError("no curves supplied")
    full = max(curves)
    n = full.bit_count()
    missing = [c for c in coalitions(n) if c not in curves]
    if missing or set(curves) - set(coalitions(n)):
        raise ScenarioError(f"curve table must cover all coalitions of {n} players")
    values = {c: float(mixture_reward(curves[c], density)) for c in coalitions(n)}
    return make_game(n, values, mode=FLOAT, tol=tol, players=players)


def uniform_curve_family(
    n: int, lo: Callable[[int], float], hi: Callable[[int], float]
) -> dict[int, QuantileCurve]:
    """One uniform-spread curve per coalition, parameterized by size."""
    out = {}
    for c in coalitions(n):
        s = c.bit_count()
        out[c] = uniform_curve(lo(s), hi(s))
    return out


def default_uniform_family(n: int) -> dict[int, QuantileCurve]:
    """Size-s coalitions rewarded uniformly between s and s + sqrt(s); the
    relative tail widens with size, so tail dominance holds."""
    return uniform_curve_family(n, lambda s: float(s), lambda s: s + math.sqrt(s))


# ---------------------------------------------------------------------------
# monotonicity verifiers


@dataclass(frozen=True)
class Prop1Report:
    r_grid: tuple[float, ...]
    order_pairs: int
    ratio_checks: int
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "r_grid": list(self.r_grid),
            "order_pairs": self.order_pairs,
            "ratio_checks": self.ratio_checks,
            "passed": self.passed,
            "violations": list(self.violations),
        }


def verify_prop1(
    n: int,
    mu: float,
    sigma: float,
    r_grid: Sequence[float],
    phi: Mapping[int, float] | None = None,
    *,
    tol: float = DEFAULT_TOL,
) -> Prop1Report:
    """Rising risk aversion orders mean-std games: for every grid pair
    r1 <= r2 the r1 game precedes the r2 game, and every size-pair value
    ratio grows with r.  The synergy factor cancels from all ratios."""
    grid = tuple(float(r) for r in r_grid)
    games = [
        build_meanstd_game(MeanStdScenario(n, mu, sigma, r, phi), tol=tol) for r in grid
    ]
    violations = []
    order_pairs = 0
    for i in range(len(grid)):
        for j in range(len(grid)):
            if grid[i] > grid[j] or i == j:
                continue
            order_pairs += 1
            verdict = leq_cp(games[i], games[j])
            if not verdict.holds:
                violations.append(f"order fails between r={grid[i]} and r={grid[j]}")
    ratio_checks = 0
    for i in range(len(grid)):
        for j in range(len(grid)):
            if grid[i] > grid[j] or i == j:
                continue
            for s1 in range(1, n + 1):
                for s2 in range(s1, n + 1):
                    ratio_checks += 1
                    lhs = meanstd_value(s2, mu, sigma, grid[i]) * meanstd_value(
                        s1, mu, sigma, grid[j]
                    )
                    rhs = meanstd_value(s2, mu, sigma, grid[j]) * meanstd_value(
                        s1, mu, sigma, grid[i]
                    )
                    if not leq(lhs, rhs, tol):
                        violations.append(
                            f"ratio not monotone for sizes ({s1},{s2}) between "
                            f"r={grid[i]} and r={grid[j]}"
                        )
    return Prop1Report(grid, order_pairs, ratio_checks, tuple(violations))


@dataclass(frozen=True)
class Prop2Report:
    tail: MonotoneVerdict
    likelihood: MonotoneVerdict
    order: OrderVerdict
    one_unit_checks: int
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return (
            self.tail.holds
            and self.likelihood.holds
            and self.order.holds
            and not self.violations
        )

    def to_dict(self) -> dict:
        return {
            "tail_dominance": self.tail.holds,
            "likelihood_ratio": self.likelihood.holds,
            "order_holds": self.order.holds,
            "one_unit_checks": self.one_unit_checks,
            "passed": self.passed,
            "violations": list(self.violations),
        }


def verify_prop2(
    curves: Mapping[int, QuantileCurve],
    d1: Density,
    d2: Density,
    *,
    grid: int = 21,
    tol: float = DEFAULT_TOL,
) -> Prop2Report:
    """Given tail dominance of the curves, a likelihood-ratio shift of the
    mixing density toward high alpha orders the mixture games.  Also checks
    the pointwise one-unit form: each nested pair's tail-average ratio is
    nondecreasing in alpha on a grid."""
    tail = check_tail_dominance(curves, tol)
    likelihood = leq_lr(d1, d2, tol)
    g1 = build_cvar_game(curves, d1, tol=tol)
    g2 = build_cvar_game(curves, d2, tol=tol)
    order = leq_cp(g1, g2)
    alphas = [j / grid for j in range(grid)]
    table = {c: [cvar(k, a) for a in alphas] for c, k in curves.items()}
    violations = []
    checks = 0
    for outer in sorted(curves):
        for inner in submasks(outer, proper=True):
            if inner not in curves:
                continue
            lo = table[inner]
            hi = table[outer]
            for t in range(len(alphas) - 1):
                checks += 1
                if not leq(hi[t] * lo[t + 1], hi[t + 1] * lo[t], tol):
                    violations.append(
                        f"tail-average ratio drops on ({inner:#x},{outer:#x}) "
                        f"at alpha={alphas[t]:.3f}"
                    )
    if not order.holds:
        violations.append("mixture games are not ordered")
    return Prop2Report(tail, likelihood, order, checks, tuple(violations))


# ---------------------------------------------------------------------------
# scenario files


def meanstd_from_dict(data: Mapping) -> tuple[MeanStdScenario, tuple[str, ...]]:
    try:
        n = int(data["n"])
        mu = float(data["mu"])
        sigma = float(data["sigma"])
        r = float(data["r"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"mean-std scenario needs n, mu, sigma, r: {exc}") from exc
    players = tuple(str(p) for p in data.get("players", default_players(n)))
    if len(players) != n:
        raise ScenarioError(f"expected {n} players, got {len(players)}")
    phi = None
    if "phi" in data:
        raw = dict(data["phi"])
        default = float(raw.pop("default", 1.0))
        table = {c: default for c in coalitions(n)}
        for label, factor in raw.items():
            table[coalition_from_label(label, players)] = float(factor)
        phi = table
    return MeanStdScenario(n, mu, sigma, r, phi), players


def density_from_dict(data: Mapping) -> Density:
    if "beta_a" in data:
        return beta_density(float(data["beta_a"]), int(data.get("knot_count", 101)))
    if "knots" in data:
        return density_curve(data["knots"], normalize=bool(data.get("normalize", False)))
    raise ScenarioError("density needs either 'beta_a' or 'knots'")


def _curve_from_entry(entry) -> QuantileCurve:
    if isinstance(entry, Mapping):
        if "samples" in entry:
            return empirical_curve(entry["samples"], int(entry.get("knot_count", 101)))
        if "knots" in entry:
            return quantile_curve(entry["knots"])
        raise ScenarioError("curve entry needs 'knots' or 'samples'")
    return quantile_curve(entry)


def cvar_scenario_from_dict(
    data: Mapping,
) -> tuple[dict[int, QuantileCurve], Density, tuple[str, ...]]:
    if "density" not in data:
        raise ScenarioError("scenario needs a 'density' entry")
    density = density_from_dict(data["density"])
    if "curves" in data:
        raw = data["curves"]
        if "players" in data:
            players = tuple(str(p) for p in data["players"])
        else:
            singles = sorted(label for label in raw if "," not in label)
            players = tuple(singles)
        if not players:
            raise ScenarioError("cannot determine the player list")
        curves = {
            coalition_from_label(label, players): _curve_from_entry(entry)
            for label, entry in raw.items()
        }
        return curves, density, players
    if "n" in data:
        n = int(data["n"])
        players = tuple(str(p) for p in data.get("players", default_players(n)))
        return default_uniform_family(n), density, players
    raise ScenarioError("scenario needs 'curves' or 'n'")
