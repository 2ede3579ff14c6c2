# core/game.py
"""Generalized Janken games: hands, WOD sets, validation and classification.

A game is given by m hands with exact rational probabilities and the list of
win-or-defeat (WOD) sets; every other support of thrown hands is a tie.
Games can be written down explicitly or derived from a dominance graph.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
from loguru import logger

from core.errors import (
    DuplicateSupportError,
    EmptyWinnerOrLoserSideError,
    HandLimitExceededError,
    InvalidGraphError,
    InvalidHandError,
    InvalidProbabilityError,
    NoBinaryWodSetError,
    ProbSumNotOneError,
    ZeroProbabilityError,
)
from core.settings import get_settings

Hand = int
ProbLike = Union[Fraction, int, str, float]


def as_fraction(value: ProbLike) -> Fraction:
    """Convert a probability given as Fraction, int, "a/b" string or float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # decimal reading, so 0.5 -> 1/2 and 0.1 -> 1/10
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidProbabilityError(f"Cannot read probability {value!r}: {e}")


def uniform_probs(m: int) -> Tuple[Fraction, ...]:
    return tuple(Fraction(1, m) for _ in range(m))


def mask_of(hands: Iterable[Hand]) -> int:
    mask = 0
    for h in hands:
        mask |= 1 << h
    return mask


def hands_of(mask: int) -> FrozenSet[Hand]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


class GameKind(str, Enum):
    """Log-games have rho = 1, exp-games rho < 1."""

    LOG = "log"
    EXP = "exp"


@dataclass(frozen=True)
class WodSet:
    """A support partitioned into winning and losing hands."""

    support: FrozenSet[Hand]
    winners: FrozenSet[Hand]
    losers: FrozenSet[Hand]

    @classmethod
    def of(cls, winners: Iterable[Hand], losers: Iterable[Hand]) -> "WodSet":
        w, d = frozenset(winners), frozenset(losers)
        return cls(support=w | d, winners=w, losers=d)

    @property
    def support_mask(self) -> int:
        return mask_of(self.support)

    @property
    def winner_mask(self) -> int:
        return mask_of(self.winners)

    @property
    def loser_mask(self) -> int:
        return mask_of(self.losers)

    def to_dict(self) -> dict:
        return {"support": sorted(self.support), "winners": sorted(self.winners)}


@dataclass(frozen=True)
class GameSpec:
    """Hands, their probabilities and the complete list of WOD sets."""

    m: int
    probs: Tuple[Fraction, ...]
    wod_sets: Tuple[WodSet, ...]
    labels: Tuple[str, ...] = ()
    name: str = "custom"
    _by_mask: Dict[int, WodSet] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(as_fraction(p) for p in self.probs))
        object.__setattr__(self, "wod_sets", tuple(self.wod_sets))
        object.__setattr__(self, "labels", tuple(self.labels))
        self._by_mask.update({w.support_mask: w for w in self.wod_sets})

    @property
    def full_mask(self) -> int:
        return (1 << self.m) - 1

    def mass(self, hands: Union[int, Iterable[Hand]]) -> Fraction:
        """Total probability of a set of hands (given as bitmask or iterable)."""
        if not isinstance(hands, int):
            hands = mask_of(hands)
        return sum(
            (self.probs[i] for i in range(self.m) if hands >> i & 1), Fraction(0)
        )

    def wod_for(self, support: Union[int, Iterable[Hand]]) -> Optional[WodSet]:
        """WOD set with this support, or None when the support is a tie."""
        if not isinstance(support, int):
            support = mask_of(support)
        return self._by_mask.get(support)

    def label(self, hand: Hand) -> str:
        if self.labels and hand < len(self.labels):
            return self.labels[hand]
        return f"H{hand + 1}"

    def relabel(self, perm: Sequence[Hand]) -> "GameSpec":
        """Image of the game under the hand permutation ``i -> perm[i]``."""
        if sorted(perm) != list(range(self.m)):
            raise InvalidHandError(f"Not a permutation of 0..{self.m - 1}: {perm}")
        probs = [Fraction(0)] * self.m
        for i, p in enumerate(self.probs):
            probs[perm[i]] = p
        wods = tuple(
            WodSet.of((perm[h] for h in w.winners), (perm[h] for h in w.losers))
            for w in self.wod_sets
        )
        return GameSpec(m=self.m, probs=tuple(probs), wod_sets=wods, name=self.name)

    def wod_structure(self) -> FrozenSet[Tuple[FrozenSet[Hand], FrozenSet[Hand]]]:
        return frozenset((w.support, w.winners) for w in self.wod_sets)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "m": self.m,
            "probs": [str(p) for p in self.probs],
            "labels": list(self.labels),
            "wod_sets": sorted(
                (w.to_dict() for w in self.wod_sets),
                key=lambda d: (len(d["support"]), d["support"]),
            ),
        }

    def digest(self) -> str:
        """Stable sha256 of the probabilities and WOD structure."""
        payload = self.to_dict()
        payload.pop("name")
        payload.pop("labels")
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class DominanceGraph:
    """Directed graph over hands; an edge (i, j) means hand i beats hand j."""

    m: int
    edges: FrozenSet[Tuple[Hand, Hand]]

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))

    def validate(self) -> None:
        if self.m < 1:
            raise InvalidGraphError(f"Graph needs at least one node, got {self.m}")
        for i, j in self.edges:
            if not (0 <= i < self.m and 0 <= j < self.m):
                raise InvalidGraphError(f"Edge ({i}, {j}) outside 0..{self.m - 1}")
            if i == j:
                raise InvalidGraphError(f"Self-loop on node {i}")
            if (j, i) in self.edges:
                raise InvalidGraphError(f"Both ({i}, {j}) and ({j}, {i}) present")

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.m))
        graph.add_edges_from(self.edges)
        return graph


@dataclass(frozen=True)
class Classification:
    """Game indices rho, nu and the tie-free parameters."""

    rho: Fraction
    nu: int
    kind: GameKind
    alpha: Optional[Fraction]
    max_wod_sets: Tuple[WodSet, ...]
    alphas: Tuple[Fraction, ...]
    h_nu: float

    def to_dict(self) -> dict:
        return {
            "rho": str(self.rho),
            "nu": self.nu,
            "kind": self.kind.value,
            "alpha": str(self.alpha) if self.alpha is not None else None,
            "alphas": [str(a) for a in self.alphas],
            "h_nu": self.h_nu,
            "max_wod_sets": [w.to_dict() for w in self.max_wod_sets],
        }


# -------------------------
# VALIDATION / CLASSIFICATION
# -------------------------
def validate(spec: GameSpec) -> None:
    """Check every GameSpec invariant, raising the first violated one.

    Raises:
        InvalidHandError, HandLimitExceededError, ZeroProbabilityError,
        ProbSumNotOneError, EmptyWinnerOrLoserSideError, DuplicateSupportError,
        NoBinaryWodSetError
    """
    max_hands = get_settings().max_hands
    if spec.m < 2:
        raise InvalidHandError(f"A game needs at least two hands, got m={spec.m}")
    if spec.m > max_hands:
        raise HandLimitExceededError(
            f"m={spec.m} exceeds JANKEN_MAX_HANDS={max_hands} (2^m supports)"
        )
    if len(spec.probs) != spec.m:
        raise InvalidHandError(
            f"Expected {spec.m} probabilities, got {len(spec.probs)}"
        )

    for i, p in enumerate(spec.probs):
        if p <= 0:
            raise ZeroProbabilityError(f"Hand {spec.label(i)} has probability {p}")
    total = sum(spec.probs, Fraction(0))
    if total != 1:
        raise ProbSumNotOneError(f"Probabilities sum to {total}, not 1")

    seen = set()
    for w in spec.wod_sets:
        for h in w.support | w.winners | w.losers:
            if not 0 <= h < spec.m:
                raise InvalidHandError(f"Hand index {h} outside 0..{spec.m - 1}")
        if not w.winners or not w.losers:
            raise EmptyWinnerOrLoserSideError(
                f"WOD set {sorted(w.support)} has winners={sorted(w.winners)} "
                f"losers={sorted(w.losers)}"
            )
        if w.winners & w.losers or (w.winners | w.losers) != w.support:
            raise EmptyWinnerOrLoserSideError(
                f"Winners/losers of {sorted(w.support)} do not partition the support"
            )
        if w.support in seen:
            raise DuplicateSupportError(f"Support {sorted(w.support)} listed twice")
        seen.add(w.support)

    if not any(len(w.support) == 2 for w in spec.wod_sets):
        raise NoBinaryWodSetError(
            "No WOD set of cardinality two; two remaining players could never finish"
        )


def classify(spec: GameSpec) -> Classification:
    """Compute rho, nu, the game kind, alpha, the alphas and h_nu."""
    validate(spec)

    masses = [(spec.mass(w.support_mask), w) for w in spec.wod_sets]
    rho = max(mass for mass, _ in masses)
    maximizers = tuple(w for mass, w in masses if mass == rho)
    nu = len(maximizers)
    kind = GameKind.LOG if rho == 1 else GameKind.EXP

    alphas = tuple(spec.mass(w.winner_mask) for w in maximizers)
    alpha = alphas[0] if kind is GameKind.LOG else None

    mean_log = sum(math.log(rho / a) for a in alphas) / nu
    h_nu = 1.0 / mean_log

    logger.debug(f"Classified {spec.name}: rho={rho} nu={nu} kind={kind.value}")
    return Classification(
        rho=rho,
        nu=nu,
        kind=kind,
        alpha=alpha,
        max_wod_sets=maximizers,
        alphas=alphas,
        h_nu=h_nu,
    )


# -------------------------
# CONSTRUCTIONS
# -------------------------
def _resolve_probs(m: int, probs: Optional[Sequence[ProbLike]]) -> Tuple[Fraction, ...]:
    if probs is None:
        return uniform_probs(m)
    return tuple(as_fraction(p) for p in probs)


def from_dominance_graph(
    graph: DominanceGraph,
    probs: Optional[Sequence[ProbLike]] = None,
    name: str = "graph",
    labels: Sequence[str] = (),
) -> GameSpec:
    """Derive the WOD sets of a dominance graph.

    A support is a tie when its induced subgraph has no edges or contains a
    directed cycle (in any weakly connected component). Otherwise its winners
    are the hands without an incoming edge inside the support, which includes
    isolated hands.
    """
    graph.validate()
    max_hands = get_settings().max_hands
    if graph.m > max_hands:
        raise HandLimitExceededError(
            f"m={graph.m} exceeds JANKEN_MAX_HANDS={max_hands} (2^m supports)"
        )

    digraph = graph.to_networkx()
    wods: List[WodSet] = []
    for size in range(2, graph.m + 1):
        for support in combinations(range(graph.m), size):
            sub = digraph.subgraph(support)
            if sub.number_of_edges() == 0:
                continue
            if not nx.is_directed_acyclic_graph(sub):
                continue
            winners = [h for h in support if sub.in_degree(h) == 0]
            losers = [h for h in support if sub.in_degree(h) > 0]
            wods.append(WodSet.of(winners, losers))

    spec = GameSpec(
        m=graph.m,
        probs=_resolve_probs(graph.m, probs),
        wod_sets=tuple(wods),
        labels=tuple(labels),
        name=name,
    )
    validate(spec)
    logger.debug(f"Derived {len(wods)} WOD sets for {name} (m={graph.m})")
    return spec


def ctls(p_head: ProbLike = Fraction(1, 2)) -> GameSpec:
    """Coin-tossing leader selection: heads go on, tails are eliminated."""
    p = as_fraction(p_head)
    if not 0 < p < 1:
        raise InvalidProbabilityError(f"Head probability must lie in (0, 1), got {p}")
    spec = GameSpec(
        m=2,
        probs=(p, 1 - p),
        wod_sets=(WodSet.of([0], [1]),),
        labels=("head", "tail"),
        name=f"ctls(p={p})",
    )
    validate(spec)
    return spec


def acyclic_clique(m: int, probs: Optional[Sequence[ProbLike]] = None) -> GameSpec:
    """Transitive tournament: hand i beats hand j whenever i < j."""
    if m < 2:
        raise InvalidHandError(f"acyclic_clique needs m >= 2, got {m}")
    edges = frozenset((i, j) for i in range(m) for j in range(i + 1, m))
    return from_dominance_graph(
        DominanceGraph(m=m, edges=edges), probs, name=f"clique(m={m})"
    )


def regular_tournament(m: int, probs: Optional[Sequence[ProbLike]] = None) -> GameSpec:
    """Cyclic regular tournament on 2m+1 hands.

    H_i beats H_j iff j - i is congruent to 1..m modulo 2m+1.
    """
    if m < 1:
        raise InvalidHandError(f"regular_tournament needs m >= 1, got {m}")
    size = 2 * m + 1
    edges = frozenset(
        (i, j) for i in range(size) for j in range(size) if 1 <= (j - i) % size <= m
    )
    return from_dominance_graph(
        DominanceGraph(m=size, edges=edges), probs, name=f"tournament(m={m})"
    )


def _circulant_offset(i: int, j: int, m: int) -> int:
    """Signed residue g(i, j) of i - j modulo 2m+1, in [-m, m]."""
    return (i - j + m) % (2 * m + 1) - m


def circulant_payoff(m: int, probs: Optional[Sequence[ProbLike]] = None) -> GameSpec:
    """Games on a circulant payoff matrix with 2m+1 hands.

    Hand i collects 2^(m + g(i, j)) from every hand j in the support; the
    hands with maximal total gain win unless every hand attains the maximum.
    """
    if m < 1:
        raise InvalidHandError(f"circulant_payoff needs m >= 1, got {m}")
    size = 2 * m + 1
    max_hands = get_settings().max_hands
    if size > max_hands:
        raise HandLimitExceededError(
            f"m={size} exceeds JANKEN_MAX_HANDS={max_hands} (2^m supports)"
        )

    wods: List[WodSet] = []
    for k in range(2, size + 1):
        for support in combinations(range(size), k):
            gains = {
                i: sum(2 ** (m + _circulant_offset(i, j, m)) for j in support)
                for i in support
            }
            best = max(gains.values())
            winners = [i for i in support if gains[i] == best]
            if len(winners) < len(support):
                wods.append(
                    WodSet.of(winners, [i for i in support if gains[i] != best])
                )

    spec = GameSpec(
        m=size,
        probs=_resolve_probs(size, probs),
        wod_sets=tuple(wods),
        name=f"circulant(m={m})",
    )
    validate(spec)
    return spec


# Three-hand connected dominance graphs (edge (i, j): i beats j).
GRAPH_EDGES: Dict[int, FrozenSet[Tuple[int, int]]] = {
    1: frozenset({(0, 2), (2, 1), (1, 0)}),
    2: frozenset({(1, 0), (1, 2), (0, 2)}),
    3: frozenset({(1, 0), (1, 2)}),
    4: frozenset({(0, 1), (2, 1)}),
    5: frozenset({(0, 1), (1, 2)}),
}


def graph_game(k: int, probs: Optional[Sequence[ProbLike]] = None) -> GameSpec:
    """One of the five connected three-hand dominance graphs (I..V)."""
    if k not in GRAPH_EDGES:
        raise InvalidGraphError(f"Graph number must be 1..5, got {k}")
    return from_dominance_graph(
        DominanceGraph(m=3, edges=GRAPH_EDGES[k]), probs, name=f"graph{k}"
    )


def rock_paper_scissors(probs: Optional[Sequence[ProbLike]] = None) -> GameSpec:
    """Classic three-hand game (graph I) with hand labels."""
    return from_dominance_graph(
        DominanceGraph(m=3, edges=frozenset({(0, 2), (2, 1), (1, 0)})),
        probs,
        name="rpsls",
        labels=("rock", "paper", "scissors"),
    )


def _labelled_graph(
    labels: Sequence[str], beats: Dict[str, Sequence[str]]
) -> DominanceGraph:
    index = {name: i for i, name in enumerate(labels)}
    edges = frozenset(
        (index[a], index[b]) for a, losers in beats.items() for b in losers
    )
    return DominanceGraph(m=len(labels), edges=edges)


def rock_paper_scissors_spock_lizard(
    probs: Optional[Sequence[ProbLike]] = None,
) -> GameSpec:
    """Five-hand variant; its dominance graph is a regular tournament."""
    labels = ("rock", "paper", "scissors", "spock", "lizard")
    beats = {
        "rock": ("scissors", "lizard"),
        "paper": ("rock", "spock"),
        "scissors": ("paper", "lizard"),
        "spock": ("rock", "scissors"),
        "lizard": ("paper", "spock"),
    }
    return from_dominance_graph(
        _labelled_graph(labels, beats), probs, name="rpssl", labels=labels
    )


WORLD_GAMES: Dict[str, Tuple[Tuple[str, ...], Dict[str, Tuple[str, ...]]]] = {
    "germany": (
        ("rock", "paper", "scissors", "well"),
        {
            "rock": ("scissors",),
            "paper": ("rock", "well"),
            "scissors": ("paper",),
            "well": ("rock", "scissors"),
        },
    ),
    "malaysia": (
        ("bird", "stone", "revolver", "plank", "water"),
        {
            "bird": ("water",),
            "stone": ("bird", "plank"),
            "revolver": ("bird", "stone", "plank"),
            "plank": ("bird", "water"),
            "water": ("stone", "revolver"),
        },
    ),
    "china": (
        ("god", "chicken", "rifle", "termite", "fox"),
        {
            "god": ("chicken", "rifle"),
            "chicken": ("termite",),
            "rifle": ("chicken", "fox"),
            "termite": ("god",),
            "fox": ("chicken",),
        },
    ),
}


def world_game(name: str, probs: Optional[Sequence[ProbLike]] = None) -> GameSpec:
    """Regional variants: germany, malaysia or china."""
    key = name.lower()
    if key not in WORLD_GAMES:
        raise InvalidGraphError(
            f"Unknown world game {name!r}; expected one of {sorted(WORLD_GAMES)}"
        )
    labels, beats = WORLD_GAMES[key]
    return from_dominance_graph(
        _labelled_graph(labels, beats), probs, name=f"world-{key}", labels=labels
    )


def explicit_game(
    m: int,
    wod_sets: Iterable[Tuple[Iterable[Hand], Iterable[Hand]]],
    probs: Optional[Sequence[ProbLike]] = None,
    name: str = "explicit",
) -> GameSpec:
    """Game from a user-supplied list of (winners, losers) pairs, taken verbatim."""
    spec = GameSpec(
        m=m,
        probs=_resolve_probs(m, probs),
        wod_sets=tuple(WodSet.of(w, d) for w, d in wod_sets),
        name=name,
    )
    validate(spec)
    return spec
