"""Tests for built-in game references and JSON game-spec files."""
import json
from fractions import Fraction

import pytest
from pydantic import ValidationError

from core import registry
from core.errors import SpecFileError, UnknownBuiltinError, ZeroProbabilityError
from core.game import classify, rock_paper_scissors
from core.schemas import GameSpecFile, SimConfig


def _write(tmp_path, payload, name="game.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


class TestBuiltins:
    """builtin:<name>[?k=v] references."""

    def test_parse(self):
        """Name is lower-cased and the query split into parameters."""
        assert registry.parse_builtin("builtin:Clique?m=4&probs=1/2,1/2") == (
            "clique",
            {"m": "4", "probs": "1/2,1/2"},
        )

    @pytest.mark.parametrize(
        "name",
        [
            "ctls",
            "rpsls",
            "rpssl",
            "clique",
            "tournament",
            "circulant",
            "world-germany",
            "world-malaysia",
            "world-china",
            "graph1",
            "graph5",
        ],
    )
    def test_every_builtin_loads(self, name):
        """Every registered name builds a valid game."""
        spec = registry.load_spec(f"builtin:{name}")
        assert spec.m >= 2

    def test_parameters(self):
        """m and p are honoured."""
        assert registry.load_builtin("builtin:clique?m=5").m == 5
        assert registry.load_builtin("builtin:ctls?p=1/3").probs == (
            Fraction(1, 3),
            Fraction(2, 3),
        )
        assert registry.load_builtin("builtin:tournament?m=2").m == 5

    def test_probs(self):
        """Non-uniform probabilities via probs=."""
        spec = registry.load_builtin("builtin:rpsls?probs=1/2,1/4,1/4")
        assert spec.probs[0] == Fraction(1, 2)
        assert classify(spec).rho == Fraction(3, 4)

    def test_bad_probs(self):
        """Probabilities still go through validation."""
        with pytest.raises(ZeroProbabilityError):
            registry.load_builtin("builtin:rpsls?probs=0,1/2,1/2")

    def test_unknown(self):
        """Unknown names list the alternatives."""
        with pytest.raises(UnknownBuiltinError, match="rpsls"):
            registry.load_builtin("builtin:poker")

    def test_bad_integer(self):
        """m must be an integer."""
        with pytest.raises(UnknownBuiltinError):
            registry.load_builtin("builtin:clique?m=three")

    def test_semicircle_only_for_simulation(self):
        """The semicircle game has no GameSpec."""
        assert registry.is_semicircle("builtin:semicircle")
        assert not registry.is_semicircle("semicircle.json")
        with pytest.raises(UnknownBuiltinError):
            registry.load_spec("builtin:semicircle")

    def test_names(self):
        """Listing includes the semicircle pseudo-game."""
        names = registry.builtin_names()
        assert "semicircle" in names and "graph3" in names


class TestSpecFiles:
    """JSON game descriptions."""

    def test_graph_file(self, tmp_path):
        """A dominance graph with labels."""
        path = _write(
            tmp_path,
            {
                "m": 3,
                "family": {"kind": "graph"},
                "edges": [[0, 2], [2, 1], [1, 0]],
                "labels": ["rock", "paper", "scissors"],
                "name": "my-rps",
            },
        )
        spec = registry.load_spec(str(path))
        assert spec.name == "my-rps"
        assert spec.wod_structure() == rock_paper_scissors().wod_structure()
        assert spec.label(1) == "paper"

    def test_explicit_file(self, tmp_path):
        """Explicit WOD sets with string probabilities."""
        path = _write(
            tmp_path,
            {
                "m": 2,
                "probs": ["1/3", "2/3"],
                "family": {"kind": "explicit"},
                "wod_sets": [{"support": [0, 1], "winners": [1]}],
            },
        )
        spec = registry.load_spec(str(path))
        assert spec.wod_for([0, 1]).winners == frozenset({1})
        assert spec.probs == (Fraction(1, 3), Fraction(2, 3))

    def test_family_files(self, tmp_path):
        """Parametric families read their size from m."""
        clique = registry.load_spec(
            str(_write(tmp_path, {"m": 4, "family": {"kind": "acyclic_clique"}}))
        )
        tour_file = {"m": 5, "family": {"kind": "regular_tournament"}}
        coin_file = {"m": 2, "family": {"kind": "ctls", "p_head": "1/4"}}
        tour = registry.load_spec(str(_write(tmp_path, tour_file, "t.json")))
        coin = registry.load_spec(str(_write(tmp_path, coin_file, "c.json")))
        assert clique.m == 4
        assert classify(tour).rho == Fraction(3, 5)
        assert coin.probs[0] == Fraction(1, 4)

    def test_missing_file(self, tmp_path):
        """Nonexistent paths are SpecFileError."""
        with pytest.raises(SpecFileError):
            registry.load_spec(str(tmp_path / "absent.json"))

    def test_bad_json(self, tmp_path):
        """Syntax errors are SpecFileError."""
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(SpecFileError):
            registry.load_spec(str(path))

    def test_schema_violation(self, tmp_path):
        """Graph family without edges is rejected by the schema."""
        path = _write(tmp_path, {"m": 3, "family": {"kind": "graph"}})
        with pytest.raises(SpecFileError, match="edges"):
            registry.load_spec(str(path))

    def test_empty_reference(self):
        """No --spec given."""
        with pytest.raises(SpecFileError):
            registry.load_spec("")


class TestSchemas:
    """Pydantic models behind files and runs."""

    def test_winners_inside_support(self):
        """Winners outside the support are invalid."""
        with pytest.raises(ValidationError):
            GameSpecFile.model_validate(
                {
                    "m": 2,
                    "family": {"kind": "explicit"},
                    "wod_sets": [{"support": [0, 1], "winners": [2]}],
                }
            )

    def test_probability_count(self):
        """One probability per hand."""
        with pytest.raises(ValidationError):
            GameSpecFile.model_validate(
                {"m": 3, "probs": ["1/2", "1/2"], "family": {"kind": "acyclic_clique"}}
            )

    def test_odd_tournament(self):
        """Tournaments need an odd number of hands."""
        with pytest.raises(ValidationError):
            GameSpecFile.model_validate({"m": 4, "family": {"kind": "circulant"}})

    def test_numeric_probs_become_strings(self):
        """Numbers are read as their decimal text."""
        model = GameSpecFile.model_validate(
            {"m": 2, "probs": [0.5, 0.5], "family": {"kind": "acyclic_clique"}}
        )
        assert model.probs == ["0.5", "0.5"]

    def test_sim_config_bounds(self):
        """Seeds are 64-bit and trials positive."""
        with pytest.raises(ValidationError):
            SimConfig(n=3, trials=0)
        with pytest.raises(ValidationError):
            SimConfig(n=3, trials=1, seed=2**64)
        assert SimConfig(n=3, trials=1).measures == ("X", "Y", "Z")
