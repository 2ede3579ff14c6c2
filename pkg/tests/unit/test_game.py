"""Tests for game construction, validation and classification."""
import math
from fractions import Fraction

import pytest

from core import game
from core.errors import (
    DuplicateSupportError,
    EmptyWinnerOrLoserSideError,
    HandLimitExceededError,
    InvalidGraphError,
    InvalidProbabilityError,
    NoBinaryWodSetError,
    ProbSumNotOneError,
    ZeroProbabilityError,
)
from core.game import DominanceGraph, GameKind, GameSpec, WodSet

THIRD = Fraction(1, 3)


def _supports(spec):
    return {w.support: w.winners for w in spec.wod_sets}


class TestValidate:
    """validate() reports the first violated invariant."""

    def test_ctls_is_valid(self, ctls):
        """Minimal two-hand game passes."""
        game.validate(ctls)

    def test_empty_winner_side(self):
        """A pair with no winners is rejected."""
        spec = GameSpec(
            m=3,
            probs=(THIRD, THIRD, THIRD),
            wod_sets=(
                WodSet.of([], [0, 1]),
                WodSet.of([1], [2]),
                WodSet.of([2], [0]),
            ),
        )
        with pytest.raises(EmptyWinnerOrLoserSideError):
            game.validate(spec)

    def test_only_full_set_is_wod(self):
        """Without a two-hand WOD set two players could never finish."""
        spec = GameSpec(m=3, probs=(THIRD,) * 3, wod_sets=(WodSet.of([0], [1, 2]),))
        with pytest.raises(NoBinaryWodSetError):
            game.validate(spec)

    def test_zero_probability(self):
        """Every hand needs positive probability."""
        spec = GameSpec(m=2, probs=(0, 1), wod_sets=(WodSet.of([0], [1]),))
        with pytest.raises(ZeroProbabilityError):
            game.validate(spec)

    def test_probabilities_must_sum_to_one(self):
        """Sum is compared exactly."""
        spec = GameSpec(m=2, probs=("1/2", "1/3"), wod_sets=(WodSet.of([0], [1]),))
        with pytest.raises(ProbSumNotOneError):
            game.validate(spec)

    def test_duplicate_support(self):
        """Two WOD sets may not share a support."""
        spec = GameSpec(
            m=2,
            probs=("1/2", "1/2"),
            wod_sets=(WodSet.of([0], [1]), WodSet.of([1], [0])),
        )
        with pytest.raises(DuplicateSupportError):
            game.validate(spec)

    def test_hand_cap(self, monkeypatch):
        """m above JANKEN_MAX_HANDS is refused before enumeration."""
        from core.settings import get_settings

        monkeypatch.setenv("JANKEN_MAX_HANDS", "4")
        get_settings(reset=True)
        with pytest.raises(HandLimitExceededError):
            game.acyclic_clique(5)

    def test_float_probabilities_read_as_decimals(self):
        """0.5 becomes exactly 1/2."""
        assert game.as_fraction(0.5) == Fraction(1, 2)
        assert game.as_fraction("1/3") == THIRD


class TestClassify:
    """rho, nu, kind and the tie-free parameters."""

    def test_rpsls(self, rpsls):
        """Uniform RPS is an exp-game with rho=2/3, nu=3."""
        cls = game.classify(rpsls)
        assert cls.rho == Fraction(2, 3)
        assert cls.nu == 3
        assert cls.kind is GameKind.EXP
        assert cls.alpha is None
        assert cls.alphas == (THIRD,) * 3
        assert cls.h_nu == pytest.approx(1 / math.log(2))

    def test_ctls(self, ctls):
        """Unbiased coin is a log-game with alpha=1/2."""
        cls = game.classify(ctls)
        assert (cls.rho, cls.nu, cls.kind) == (1, 1, GameKind.LOG)
        assert cls.alpha == Fraction(1, 2)
        assert cls.h_nu == pytest.approx(1 / math.log(2))

    @pytest.mark.parametrize(
        "name,rho,nu",
        [
            ("germany", Fraction(3, 4), 2),
            ("malaysia", Fraction(4, 5), 1),
            ("china", Fraction(4, 5), 3),
        ],
    )
    def test_world_games(self, name, rho, nu):
        """Regional variants reproduce their indices."""
        cls = game.classify(game.world_game(name))
        assert (cls.rho, cls.nu) == (rho, nu)
        assert cls.kind is GameKind.EXP

    def test_tournament_and_circulant(self):
        """Five-hand families: tournament (3/5, 5), circulant (4/5, 5)."""
        t = game.classify(game.regular_tournament(2))
        c = game.classify(game.circulant_payoff(2))
        assert (t.rho, t.nu) == (Fraction(3, 5), 5)
        assert (c.rho, c.nu) == (Fraction(4, 5), 5)

    def test_rpssl_is_regular_tournament(self):
        """Rock-paper-scissors-Spock-lizard has the 5-tournament indices."""
        cls = game.classify(game.rock_paper_scissors_spock_lizard())
        assert (cls.rho, cls.nu) == (Fraction(3, 5), 5)

    def test_clique_alpha(self):
        """Uniform 4-clique: log-game with alpha = 1/4."""
        cls = game.classify(game.acyclic_clique(4))
        assert cls.kind is GameKind.LOG
        assert cls.alpha == Fraction(1, 4)

    def test_exp_alphas_below_rho(self):
        """Every alpha_l < rho so h_nu is finite and positive."""
        for spec in (game.world_game("china"), game.circulant_payoff(2)):
            cls = game.classify(spec)
            assert all(a < cls.rho for a in cls.alphas)
            assert 0 < cls.h_nu < math.inf

    def test_invariant_under_relabeling(self, rpsls):
        """A symmetry of RPS leaves the classification unchanged."""
        rotated = rpsls.relabel([1, 2, 0])
        assert rotated.wod_structure() == rpsls.wod_structure()
        a, b = game.classify(rpsls), game.classify(rotated)
        assert (a.rho, a.nu, a.kind, a.alpha) == (b.rho, b.nu, b.kind, b.alpha)


class TestDominanceGraph:
    """WOD sets derived from dominance graphs."""

    def test_rps_cycle(self, rpsls):
        """Only the pairs are WOD sets; the full set is a tie."""
        assert {len(s) for s in _supports(rpsls)} == {2}
        assert len(rpsls.wod_sets) == 3
        assert rpsls.wod_for([0, 1, 2]) is None

    def test_graph5_chain(self):
        """Chain H1 -> H2 -> H3: {H1,H3} ties."""
        spec = game.graph_game(5)
        assert _supports(spec) == {
            frozenset({0, 1, 2}): frozenset({0}),
            frozenset({0, 1}): frozenset({0}),
            frozenset({1, 2}): frozenset({1}),
        }

    def test_isolated_hand_wins(self):
        """In {god, chicken, fox} both god and fox win."""
        spec = game.world_game("china")
        wod = spec.wod_for([0, 1, 4])
        assert wod.winners == frozenset({0, 4})
        assert wod.losers == frozenset({1})

    def test_disconnected_support_is_decisive(self):
        """Two separate duels in one support: both sources win."""
        graph = DominanceGraph(m=4, edges=frozenset({(0, 1), (2, 3)}))
        wod = game.from_dominance_graph(graph).wod_for([0, 1, 2, 3])
        assert wod.winners == frozenset({0, 2})
        assert wod.losers == frozenset({1, 3})

    def test_cycle_in_one_component_ties_the_support(self):
        """A cyclic component makes the whole support a tie."""
        edges = frozenset({(0, 1), (1, 2), (2, 0), (3, 4)})
        spec = game.from_dominance_graph(DominanceGraph(m=5, edges=edges))
        assert spec.wod_for([0, 1, 2, 3, 4]) is None
        assert spec.wod_for([0, 1, 3, 4]).winners == frozenset({0, 3})

    def test_winners_have_no_incoming_edges(self):
        """Losers are beaten inside the support; winners are not."""
        for name in game.WORLD_GAMES:
            labels, beats = game.WORLD_GAMES[name]
            spec = game.world_game(name)
            index = {label: i for i, label in enumerate(labels)}
            edges = {(index[a], index[b]) for a, bs in beats.items() for b in bs}
            for w in spec.wod_sets:
                for h in w.losers:
                    assert any((o, h) in edges for o in w.support)
                for h in w.winners:
                    assert not any((o, h) in edges for o in w.support)

    def test_tournament_triple(self):
        """{H1,H2,H3} in the 5-tournament is transitive with winner H1."""
        wod = game.regular_tournament(2).wod_for([0, 1, 2])
        assert wod is not None
        assert wod.winners == frozenset({0})

    def test_circulant_full_set_ties(self):
        """Every hand has the same total gain on the full support."""
        assert game.circulant_payoff(2).wod_for(range(5)) is None

    def test_circulant_m1_is_rps(self, rpsls):
        """The three-hand circulant game has the RPS structure."""
        assert game.circulant_payoff(1).wod_structure() == rpsls.wod_structure()

    def test_tournament_m1_matches_circulant(self):
        """Same structure up to reversing the cyclic order."""
        tournament = game.regular_tournament(1)
        circulant = game.circulant_payoff(1).relabel([0, 2, 1])
        assert tournament.wod_structure() == circulant.wod_structure()

    def test_clique_full_set_single_winner(self):
        """Transitive clique: full support has exactly one winner."""
        for m in (2, 3, 4):
            wod = game.acyclic_clique(m).wod_for(range(m))
            assert wod is not None and len(wod.winners) == 1

    def test_two_clique_is_ctls(self, ctls):
        """The 2-clique and the unbiased coin coincide."""
        assert game.acyclic_clique(2).wod_structure() == ctls.wod_structure()
        assert game.acyclic_clique(2).probs == ctls.probs

    def test_invalid_graph(self):
        """Two-way edges are rejected."""
        with pytest.raises(InvalidGraphError):
            game.from_dominance_graph(DominanceGraph(m=2, edges={(0, 1), (1, 0)}))

    def test_edgeless_graph_has_no_binary_wod(self):
        """No edges means every support ties."""
        with pytest.raises(NoBinaryWodSetError):
            game.from_dominance_graph(DominanceGraph(m=3, edges=set()))


class TestConstructors:
    """Family constructors and their parameters."""

    def test_ctls_bounds(self):
        """Head probability must lie strictly inside (0, 1)."""
        with pytest.raises(InvalidProbabilityError):
            game.ctls(1)

    def test_biased_ctls_matches_graph3(self):
        """CTLS with p=1/3 has the same alpha as graph III."""
        assert game.classify(game.ctls("1/3")).alpha == THIRD
        assert game.classify(game.graph_game(3)).alpha == THIRD

    def test_labels(self, rpsls):
        """Labelled games report hand names; others fall back to H<i>."""
        assert rpsls.label(0) == "rock"
        assert game.acyclic_clique(3).label(2) == "H3"

    def test_digest_ignores_name(self, rpsls):
        """Digest depends only on probabilities and WOD sets."""
        assert game.circulant_payoff(1).digest() == rpsls.digest()

    def test_explicit_game(self):
        """Explicit WOD lists are taken verbatim."""
        pairs = [([0], [1]), ([1], [2]), ([2], [0]), ([0], [1, 2])]
        spec = game.explicit_game(3, pairs)
        assert spec.wod_for([0, 1, 2]).winners == frozenset({0})
