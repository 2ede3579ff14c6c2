"""Tests for leading-order predictions, limit laws and residual profiles."""
import math
from fractions import Fraction

import pytest

from core import asymptotics, game
from core.asymptotics import Quantity
from core.errors import NumericOverflowError, WrongKindError
from core.game import (
    Classification,
    GameKind,
    acyclic_clique,
    classify,
    graph_game,
    world_game,
)


class TestPredict:
    """Closed forms by game kind."""

    def test_log_game_mean(self, ctls):
        """CTLS needs log_2 n rounds."""
        assert asymptotics.predict(ctls, "XMean", 1024).leading == pytest.approx(10.0)

    def test_log_game_hands(self, ctls):
        """n / (1 - alpha) hands, variance alpha n / (1 - alpha)^2."""
        mean = asymptotics.predict(ctls, Quantity.Y_MEAN, 100)
        var = asymptotics.predict(ctls, Quantity.Y_VAR, 100)
        assert mean.leading == pytest.approx(200.0)
        assert var.leading == pytest.approx(200.0)

    def test_log_game_variance_bounded(self, ctls):
        """Round variance has no growing term."""
        assert asymptotics.predict(ctls, Quantity.X_VAR, 64).leading == 0.0

    def test_log_game_moment_rejected(self, ctls):
        """No closed form for higher moments of log-games."""
        with pytest.raises(WrongKindError):
            asymptotics.predict(ctls, Quantity.X_MOMENT, 64, order=3)

    def test_exp_game(self, rpsls):
        """1/(nu rho^n) scaling and its moments."""
        scale = 1 / (3 * (2 / 3) ** 10)
        assert asymptotics.predict(rpsls, "XMean", 10).leading == pytest.approx(scale)
        assert asymptotics.predict(rpsls, "XVar", 10).leading == pytest.approx(scale**2)
        third = asymptotics.predict(rpsls, "XMoment", 10, order=3)
        assert third.leading == pytest.approx(6 * scale**3)
        hands = asymptotics.predict(rpsls, "YMean", 10)
        assert hands.leading == pytest.approx(10 * scale)

    def test_from_classification(self, rpsls):
        """A Classification can stand in for the game."""
        cls = classify(rpsls)
        assert asymptotics.predict(cls, "XMean", 5).leading == pytest.approx(
            asymptotics.predict(rpsls, "XMean", 5).leading
        )

    def test_tie_free(self, rpsls):
        """h_nu ln n for every game."""
        pred = asymptotics.predict(rpsls, "ZMean", 1024)
        assert pred.leading == pytest.approx(10.0)

    def test_overflow(self, rpsls):
        """The exp-game scale leaves double range past n ~ 1750."""
        with pytest.raises(NumericOverflowError):
            asymptotics.predict(rpsls, "XMean", 2000)

    def test_limit_cdf_needs_clique(self):
        """Graph IV has no closed-form limit law."""
        with pytest.raises(WrongKindError):
            asymptotics.predict(graph_game(4), Quantity.LIMIT_CDF, 100)

    def test_limit_cdf_for_ctls(self, ctls):
        """CTLS is the 2-clique."""
        pred = asymptotics.predict(ctls, Quantity.LIMIT_CDF, 1024, ell=-1)
        assert pred.leading == pytest.approx(2 / (math.e**2 - 1))

    def test_small_n(self, ctls):
        """n < 2 has no rounds to predict."""
        with pytest.raises(ValueError):
            asymptotics.predict(ctls, "XMean", 1)

    def test_to_dict(self, ctls):
        """Predictions serialize their quantity by name."""
        assert asymptotics.predict(ctls, "XMean", 8).to_dict()["quantity"] == "XMean"


class TestLimitCdf:
    """t / (e^t - 1) limit law."""

    def test_exact_power(self):
        """n = m^k: t = m^-ell."""
        value = asymptotics.limit_cdf_acyclic_clique(2, 1024, 0)
        assert value == pytest.approx(1 / (math.e - 1))
        assert asymptotics.limit_cdf_acyclic_clique(3, 729, -1) == pytest.approx(
            3 / (math.e**3 - 1)
        )

    def test_monotone_in_ell(self):
        """Higher levels have larger probability."""
        values = [
            asymptotics.limit_cdf_unbiased_ctls(3000, ell) for ell in range(-3, 5)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] < 1.0

    def test_far_tails(self):
        """Very negative levels give zero, very large ones approach one."""
        assert asymptotics.limit_cdf_acyclic_clique(2, 1024, -20) == 0.0
        assert asymptotics.limit_cdf_acyclic_clique(2, 1024, 60) == pytest.approx(1.0)

    def test_fractional_log(self):
        """Exact integer floor avoids log rounding at powers."""
        assert asymptotics.fractional_log(3, 243) == 0.0
        assert asymptotics.fractional_log(2, 1536) == pytest.approx(math.log2(1.5))

    def test_clique_base(self, ctls, graph2, rpsls):
        """Uniform cliques are detected; everything else is not."""
        assert asymptotics.clique_base(ctls) == 2
        assert asymptotics.clique_base(graph2) == 3
        assert asymptotics.clique_base(acyclic_clique(4)) == 4
        assert asymptotics.clique_base(rpsls) is None
        assert asymptotics.clique_base(game.ctls("1/3")) is None

    def test_bad_base(self):
        """Base one is meaningless."""
        with pytest.raises(ValueError):
            asymptotics.limit_cdf_acyclic_clique(1, 10, 0)


class TestFluctuationProfile:
    """Residuals against the phase."""

    def test_constant_residual(self):
        """A shifted leading term leaves a flat profile."""
        seq = [0.0] + [math.log2(n) + 0.25 for n in range(1, 65)]
        profile = asymptotics.fluctuation_profile(
            seq, Fraction(1, 2), math.log2, (8, 64)
        )
        assert profile.amplitude == pytest.approx(0.25)
        assert profile.n_range == (8, 64)
        assert len(profile.points) == 57
        assert all(0.0 <= phase < 1.0 for phase, _ in profile.points)

    def test_centering(self):
        """With centering the constant is removed."""
        seq = [0.0] + [math.log2(n) + 0.25 for n in range(1, 65)]
        profile = asymptotics.fluctuation_profile(
            seq, Fraction(1, 2), math.log2, (8, 64), center=True
        )
        assert profile.amplitude == pytest.approx(0.0, abs=1e-12)
        assert profile.offset == pytest.approx(0.25)

    def test_rows(self):
        """Rows carry n, phase and residual."""
        seq = [0.0, 0.0, 1.0, 1.5]
        profile = asymptotics.fluctuation_profile(seq, Fraction(1, 2), math.log2)
        assert [r["n"] for r in profile.rows()] == [2, 3]

    def test_range_checked(self):
        """Ranges beyond the sequence are rejected."""
        with pytest.raises(ValueError):
            asymptotics.fluctuation_profile(
                [0.0, 1.0, 2.0], Fraction(1, 2), math.log2, (1, 5)
            )


class TestTieFreeSlope:
    """Rationality of the log ratios."""

    def test_single_ratio(self, rpsls):
        """RPS: every rho/alpha equals 2."""
        slope = asymptotics.tie_free_slope(rpsls)
        assert slope.all_rational
        assert slope.base == 2
        assert slope.exponents == (1, 1, 1)
        assert slope.h_nu == pytest.approx(1 / math.log(2))

    def test_powers_of_common_base(self):
        """Ratios 2 and 4 share the base 2."""
        mixed = Classification(
            rho=Fraction(1),
            nu=2,
            kind=GameKind.LOG,
            alpha=None,
            max_wod_sets=(),
            alphas=(Fraction(1, 2), Fraction(1, 4)),
            h_nu=1.0,
        )
        slope = asymptotics.tie_free_slope(mixed)
        assert slope.all_rational
        assert slope.base == 2
        assert slope.exponents == (1, 2)

    def test_irrational_ratio(self):
        """Ratios 2 and 3 have an irrational log ratio."""
        mixed = Classification(
            rho=Fraction(1),
            nu=2,
            kind=GameKind.LOG,
            alpha=None,
            max_wod_sets=(),
            alphas=(Fraction(1, 2), Fraction(1, 3)),
            h_nu=1.0,
        )
        assert not asymptotics.tie_free_slope(mixed).all_rational

    def test_world_game(self):
        """China's three maximal WOD sets are still handled."""
        slope = asymptotics.tie_free_slope(world_game("china"))
        assert slope.h_nu == pytest.approx(classify(world_game("china")).h_nu)


class TestSemicircle:
    """Closed forms for the semicircle game."""

    def test_probability(self):
        """n points on a circle: n / 2^(n-1)."""
        assert asymptotics.semicircle_probability(6) == Fraction(6, 32)
        assert asymptotics.semicircle_probability(2) == 1

    def test_expected_rounds(self):
        """2^(n-1)/n - 1 failed repetitions."""
        assert asymptotics.semicircle_expected_rounds(6) == Fraction(13, 3)

    def test_sphere(self):
        """Four points on the 2-sphere lie in a hemisphere with 7/8."""
        assert asymptotics.semicircle_probability(4, dim=3) == Fraction(7, 8)

    def test_invalid(self):
        """n must be positive."""
        with pytest.raises(ValueError):
            asymptotics.semicircle_probability(0)
