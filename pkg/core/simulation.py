# core/simulation.py
"""Monte Carlo simulation of leader selection.

Each trial draws from its own Philox stream keyed by (seed, trial index), so
a trial's outcome does not depend on how many trials ran before it or on the
order in which they are executed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy import stats

from core.errors import NonTerminatingError
from core.exact import ExactEngine, NumericMode
from core.game import GameKind, GameSpec, classify, validate
from core.metrics import ROUNDS_COUNTER, TRIALS_COUNTER
from core.schemas import SimConfig, SimMode
from core.settings import get_settings


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator for one trial: Philox keyed by seed and trial index."""
    return np.random.Generator(np.random.Philox(key=(trial << 64) | seed))


@dataclass(frozen=True)
class TrialResult:
    x: int
    y: int
    z: int
    ties: int
    live_counts: Tuple[int, ...] = ()


@dataclass
class MeasureStats:
    count: int
    mean: float
    variance: float
    stderr: float

    @classmethod
    def of(cls, samples: np.ndarray) -> "MeasureStats":
        count = len(samples)
        values = samples.astype(float)
        var = float(values.var(ddof=1)) if count > 1 else 0.0
        return cls(
            count=count,
            mean=float(values.mean()),
            variance=var,
            stderr=math.sqrt(var / count),
        )

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "stderr": self.stderr,
        }


@dataclass
class SimSummary:
    config: SimConfig
    samples: Dict[str, np.ndarray]
    stats: Dict[str, MeasureStats]
    tie_rounds_total: int
    ks: Dict[str, float] = field(default_factory=dict)
    extras: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config.model_dump(mode="json"),
            "stats": {k: v.to_dict() for k, v in self.stats.items()},
            "tie_rounds_total": self.tie_rounds_total,
            "ks": dict(self.ks),
            "extras": dict(self.extras),
        }

    def sample_rows(self) -> List[dict]:
        measures = list(self.samples)
        return [
            {"trial_index": i, **{m: int(self.samples[m][i]) for m in measures}}
            for i in range(self.config.trials)
        ]


# -------------------------
# ROUNDS
# -------------------------
class RoundPlayer:
    """Per-round replay with cached winner lookups for one game."""

    def __init__(self, spec: GameSpec):
        validate(spec)
        self.spec = spec
        self.probs = np.array([float(p) for p in spec.probs])
        self.probs /= self.probs.sum()
        self._winners: Dict[int, Optional[np.ndarray]] = {}

    def winners(self, support: int) -> Optional[np.ndarray]:
        if support not in self._winners:
            wod = self.spec.wod_for(support)
            self._winners[support] = (
                None if wod is None else np.array(sorted(wod.winners), dtype=int)
            )
        return self._winners[support]

    def play(
        self, counts: np.ndarray, rng: np.random.Generator
    ) -> Tuple[np.ndarray, bool]:
        total = int(counts.sum())
        if total < 2:
            raise ValueError(f"A round needs at least two players, got {total}")
        drawn = rng.multinomial(total, self.probs)
        support = 0
        for h in np.flatnonzero(drawn):
            support |= 1 << int(h)
        winners = self.winners(support)
        if winners is None:
            return counts, False
        survivors = np.zeros_like(drawn)
        survivors[winners] = drawn[winners]
        return survivors, True


def play_round(
    spec: GameSpec, counts: np.ndarray, rng: np.random.Generator
) -> Tuple[np.ndarray, bool]:
    """One round: every live player rethrows; only winner hands continue.

    Returns the new per-hand counts and whether the round was conclusive;
    on a tie the input counts are returned unchanged.
    """
    return RoundPlayer(spec).play(np.asarray(counts), rng)


def _per_round_trial(
    player: RoundPlayer, n: int, rng: np.random.Generator, cap: int, trace: bool
) -> TrialResult:
    x = y = z = ties = 0
    live = n
    counts = np.zeros(player.spec.m, dtype=np.int64)
    counts[0] = n
    seen: List[int] = []
    while live > 1:
        if x >= cap:
            raise NonTerminatingError(
                f"Trial exceeded {cap} rounds with {live} players left "
                "(JANKEN_ROUND_CAP)"
            )
        if trace:
            seen.append(live)
        x += 1
        y += live
        counts, conclusive = player.play(counts, rng)
        if conclusive:
            z += 1
            live = int(counts.sum())
        else:
            ties += 1
    return TrialResult(x=x, y=y, z=z, ties=ties, live_counts=tuple(seen))


class FastForward:
    """Geometric tie runs and inverse-CDF survivor draws from the exact kernel."""

    def __init__(self, spec: GameSpec):
        self.engine = ExactEngine(spec, NumericMode.FLOAT)
        self._cache: Dict[int, Tuple[float, np.ndarray]] = {}

    def stage(self, n: int) -> Tuple[float, np.ndarray]:
        if n not in self._cache:
            k = self.engine.kernel(n)
            if k.no_tie <= 0.0:
                raise NonTerminatingError(
                    f"No conclusive round representable with {n} players "
                    "(varpi_n underflows)"
                )
            cum = np.cumsum(k.survivor_law())
            cum /= cum[-1]
            self._cache[n] = (float(k.no_tie), cum)
        return self._cache[n]

    def trial(self, n: int, rng: np.random.Generator, cap: int) -> TrialResult:
        x = y = z = ties = 0
        live = n
        while live > 1:
            q, cum = self.stage(live)
            if q >= 1.0:
                t = 1
            else:
                u = 1.0 - rng.random()
                t = max(1, math.ceil(math.log(u) / math.log1p(-q)))
            x += t
            if x > cap:
                raise NonTerminatingError(
                    f"Trial exceeded {cap} rounds with {live} players left "
                    "(JANKEN_ROUND_CAP)"
                )
            y += live * t
            z += 1
            ties += t - 1
            j = int(np.searchsorted(cum, rng.random(), side="right"))
            live = min(max(j, 1), live - 1)
        return TrialResult(x=x, y=y, z=z, ties=ties)


# -------------------------
# SIMULATE
# -------------------------
def _ks_statistics(
    spec: GameSpec, n: int, samples: Dict[str, np.ndarray]
) -> Dict[str, float]:
    if n < 2:
        return {}
    cls = classify(spec)
    if cls.kind is GameKind.EXP:
        scale = cls.nu * float(cls.rho) ** n
        return {
            "x_scaled_vs_exp1": ks_exp1(samples["X"] * scale),
            "y_scaled_vs_exp1": ks_exp1(samples["Y"] * scale / n),
        }
    return {"y_standardized_vs_normal": ks_normal(samples["Y"])}


def simulate(spec: GameSpec, config: SimConfig, with_ks: bool = True) -> SimSummary:
    """Run ``config.trials`` independent trials and summarize X, Y and Z."""
    validate(spec)
    cap = get_settings().round_cap
    logger.info(
        f"Simulating {spec.name}: n={config.n} trials={config.trials} "
        f"mode={config.mode.value} seed={config.seed}"
    )
    if config.mode is SimMode.FAST_FORWARD:
        ff = FastForward(spec)
        results = [
            ff.trial(config.n, trial_rng(config.seed, i), cap)
            for i in range(config.trials)
        ]
    else:
        player = RoundPlayer(spec)
        results = [
            _per_round_trial(player, config.n, trial_rng(config.seed, i), cap, False)
            for i in range(config.trials)
        ]

    columns = {
        "X": np.array([r.x for r in results], dtype=np.int64),
        "Y": np.array([r.y for r in results], dtype=np.int64),
        "Z": np.array([r.z for r in results], dtype=np.int64),
    }
    samples = {m: columns[m] for m in config.measures}
    ties = sum(r.ties for r in results)

    TRIALS_COUNTER.labels(mode=config.mode.value).inc(config.trials)
    ROUNDS_COUNTER.inc(int(columns["X"].sum()))

    summary = SimSummary(
        config=config,
        samples=samples,
        stats={m: MeasureStats.of(v) for m, v in samples.items()},
        tie_rounds_total=ties,
    )
    if with_ks and config.trials > 1 and {"X", "Y"} <= set(samples):
        summary.ks = _ks_statistics(spec, config.n, samples)
    logger.info(
        f"Simulation done: mean X={summary.stats[config.measures[0]].mean:.4g}, "
        f"{ties} tie rounds"
    )
    return summary


def simulate_trial(
    spec: GameSpec, n: int, seed: int, trial: int = 0, trace: bool = False
) -> TrialResult:
    """Single per-round trial; with ``trace`` the live count of every round is kept."""
    return _per_round_trial(
        RoundPlayer(spec), n, trial_rng(seed, trial), get_settings().round_cap, trace
    )


# -------------------------
# GOODNESS OF FIT
# -------------------------
def ks_exp1(samples) -> float:
    """Kolmogorov-Smirnov distance of the samples to Exp(1)."""
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise ValueError("ks_exp1 needs at least one sample")
    return float(stats.kstest(values, "expon").statistic)


def ks_normal(samples) -> float:
    """KS distance to N(0, 1) after standardizing by sample mean and deviation."""
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise ValueError("ks_normal needs at least one sample")
    sd = values.std(ddof=1) if values.size > 1 else 0.0
    standardized = (values - values.mean()) / sd if sd > 0 else np.zeros_like(values)
    return float(stats.kstest(standardized, "norm").statistic)


# -------------------------
# SEMICIRCLE GAME
# -------------------------
def on_semicircle(angles: np.ndarray) -> bool:
    """True when some closed half circle holds every angle (max gap >= pi)."""
    ordered = np.sort(np.mod(angles, 2 * math.pi))
    gaps = np.diff(ordered)
    wrap = 2 * math.pi - (ordered[-1] - ordered[0])
    return max(float(gaps.max(initial=0.0)), wrap) >= math.pi


def semicircle_game(n: int, trials: int, seed: int = 0) -> SimSummary:
    """Repetitions before n uniform points first fit in a semicircle."""
    if n < 2:
        raise ValueError(f"The semicircle game needs n >= 2, got {n}")
    config = SimConfig(
        n=n, trials=trials, seed=seed, mode=SimMode.PER_ROUND, measures=("X",)
    )
    cap = get_settings().round_cap
    reps = np.zeros(trials, dtype=np.int64)
    for i in range(trials):
        rng = trial_rng(seed, i)
        count = 0
        while not on_semicircle(rng.uniform(0.0, 2 * math.pi, n)):
            count += 1
            if count >= cap:
                raise NonTerminatingError(
                    f"Semicircle trial exceeded {cap} repetitions"
                )
        reps[i] = count

    TRIALS_COUNTER.labels(mode="semicircle").inc(trials)
    ROUNDS_COUNTER.inc(int(reps.sum()) + trials)
    draws = int(reps.sum()) + trials
    return SimSummary(
        config=config,
        samples={"X": reps},
        stats={"X": MeasureStats.of(reps)},
        tie_rounds_total=int(reps.sum()),
        extras={"success_rate": trials / draws},
    )
