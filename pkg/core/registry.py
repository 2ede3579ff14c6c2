# core/registry.py
"""Built-in games addressable by name, and loading of game-spec files.

References look like ``builtin:rpsls``, ``builtin:ctls?p=1/3`` or
``builtin:clique?m=4&probs=1/2,1/4,1/8,1/8``; anything else is read as a path
to a JSON game-spec file.
"""
import json
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple
from urllib.parse import parse_qsl

from loguru import logger
from pydantic import ValidationError

from core.errors import SpecFileError, UnknownBuiltinError
from core.game import (
    DominanceGraph,
    GameSpec,
    acyclic_clique,
    as_fraction,
    circulant_payoff,
    ctls,
    explicit_game,
    from_dominance_graph,
    graph_game,
    regular_tournament,
    rock_paper_scissors,
    rock_paper_scissors_spock_lizard,
    world_game,
)
from core.schemas import FamilyKind, GameSpecFile

BUILTIN_PREFIX = "builtin:"
SEMICIRCLE = "semicircle"


def _int_param(params: Dict[str, str], key: str, default: int) -> int:
    raw = params.get(key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UnknownBuiltinError(f"Parameter {key}={raw!r} is not an integer")


def _probs_param(params: Dict[str, str]):
    raw = params.get("probs")
    return [as_fraction(p) for p in raw.split(",")] if raw else None


BuiltinFactory = Callable[[Dict[str, str]], GameSpec]

BUILTINS: Dict[str, BuiltinFactory] = {
    "ctls": lambda q: ctls(q.get("p", "1/2")),
    "rpsls": lambda q: rock_paper_scissors(_probs_param(q)),
    "rpssl": lambda q: rock_paper_scissors_spock_lizard(_probs_param(q)),
    "clique": lambda q: acyclic_clique(_int_param(q, "m", 3), _probs_param(q)),
    "tournament": lambda q: regular_tournament(_int_param(q, "m", 1), _probs_param(q)),
    "circulant": lambda q: circulant_payoff(_int_param(q, "m", 1), _probs_param(q)),
    "world-germany": lambda q: world_game("germany", _probs_param(q)),
    "world-malaysia": lambda q: world_game("malaysia", _probs_param(q)),
    "world-china": lambda q: world_game("china", _probs_param(q)),
}
BUILTINS.update(
    {f"graph{k}": (lambda q, k=k: graph_game(k, _probs_param(q))) for k in range(1, 6)}
)


def parse_builtin(ref: str) -> Tuple[str, Dict[str, str]]:
    """Split ``builtin:name?k=v&...`` into the name and its parameters."""
    body = ref[len(BUILTIN_PREFIX):] if ref.startswith(BUILTIN_PREFIX) else ref
    name, _, query = body.partition("?")
    return name.strip().lower(), dict(parse_qsl(query, keep_blank_values=False))


def is_semicircle(ref: str) -> bool:
    return ref.startswith(BUILTIN_PREFIX) and parse_builtin(ref)[0] == SEMICIRCLE


def builtin_names() -> list:
    return sorted(BUILTINS) + [SEMICIRCLE]


def load_builtin(ref: str) -> GameSpec:
    name, params = parse_builtin(ref)
    factory = BUILTINS.get(name)
    if factory is None:
        if name == SEMICIRCLE:
            raise UnknownBuiltinError(
                "builtin:semicircle has infinitely many hands; "
                "only simulate supports it"
            )
        raise UnknownBuiltinError(
            f"Unknown built-in game {name!r}; expected one of {builtin_names()}"
        )
    return factory(params)


def spec_from_file_model(model: GameSpecFile) -> GameSpec:
    """Turn a parsed game-spec file into a validated GameSpec."""
    probs = [as_fraction(p) for p in model.probs] if model.probs else None
    kind = model.family.kind
    name = model.name or kind.value

    if kind is FamilyKind.CTLS:
        p_head = model.family.p_head or (probs[0] if probs else "1/2")
        return ctls(p_head)
    if kind is FamilyKind.ACYCLIC_CLIQUE:
        return acyclic_clique(model.m, probs)
    if kind is FamilyKind.REGULAR_TOURNAMENT:
        return regular_tournament((model.m - 1) // 2, probs)
    if kind is FamilyKind.CIRCULANT:
        return circulant_payoff((model.m - 1) // 2, probs)
    if kind is FamilyKind.GRAPH:
        graph = DominanceGraph(m=model.m, edges=frozenset(map(tuple, model.edges)))
        return from_dominance_graph(graph, probs, name=name, labels=model.labels)
    # explicit
    pairs = [
        (entry.winners, [h for h in entry.support if h not in entry.winners])
        for entry in model.wod_sets
    ]
    return explicit_game(model.m, pairs, probs, name=name)


def load_spec_file(path: Path) -> GameSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise SpecFileError(f"Spec file {path} does not exist")
    except json.JSONDecodeError as e:
        raise SpecFileError(f"Spec file {path} is not valid JSON: {e}")

    try:
        model = GameSpecFile.model_validate(raw)
    except ValidationError as e:
        raise SpecFileError(f"Spec file {path} is malformed: {e}")
    return spec_from_file_model(model)


def load_spec(ref: Optional[str]) -> GameSpec:
    """Resolve a ``builtin:`` reference or a spec-file path."""
    if not ref:
        raise SpecFileError("No game given; use --spec builtin:<name> or a JSON file")
    if ref.startswith(BUILTIN_PREFIX):
        spec = load_builtin(ref)
    else:
        spec = load_spec_file(Path(ref))
    logger.debug(f"Loaded game {spec.name} (m={spec.m}, {len(spec.wod_sets)} WOD sets)")
    return spec
