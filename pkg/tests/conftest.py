# tests/conftest.py
"""Shared fixtures: built-in games and a clean JANKEN_* environment."""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core import game  # noqa: E402
from core.settings import get_settings  # noqa: E402

JANKEN_VARS = (
    "JANKEN_BUDGET",
    "JANKEN_MAX_HANDS",
    "JANKEN_RATIONAL_HORIZON",
    "JANKEN_ROUND_CAP",
    "JANKEN_TAIL_TOLERANCE",
    "JANKEN_MAX_LEVELS",
    "JANKEN_RATIONAL_DIGITS",
    "JANKEN_LOG_LEVEL",
)


# ---------------------------------------------------------------------------
# Clean environment for each test
# ---------------------------------------------------------------------------
@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    """Run every test with default settings and no stray .env file."""
    for name in JANKEN_VARS:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    get_settings(reset=True)

    yield

    monkeypatch.undo()
    get_settings(reset=True)


# ---------------------------------------------------------------------------
# Games
# ---------------------------------------------------------------------------
@pytest.fixture
def ctls():
    """Unbiased coin-tossing leader selection."""
    return game.ctls()


@pytest.fixture
def rpsls():
    """Uniform rock-paper-scissors."""
    return game.rock_paper_scissors()


@pytest.fixture
def graph2():
    """Uniform transitive three-clique (graph II)."""
    return game.graph_game(2)


@pytest.fixture
def three_hand_games():
    """The five connected three-hand graphs plus unbiased CTLS."""
    return [game.graph_game(k) for k in range(1, 6)] + [game.ctls()]
