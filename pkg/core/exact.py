# core/exact.py
"""Exact distributions and moments of the leader-selection cost measures.

Everything is driven by the one-round kernel: for n players, the weight of a
conclusive round leaving j survivors is

    w_n(j) = sum over WOD sets S = W u D of C(n, j) pi_j(W) pi_{n-j}(D)

and a round is a tie with probability 1 - varpi_n. The self-referential tie
term of every recurrence is solved algebraically (divide by varpi_n).

Two numeric modes are supported: exact rationals (``Fraction`` objects in
numpy object arrays) and double precision, where support probabilities and
binomials are combined in the log domain so that large n neither overflows
the binomials nor underflows the support probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.special import gammaln, logsumexp, stirling2
from scipy.stats import poisson

from core.errors import (
    BudgetExceededError,
    EmptySupportError,
    NegativeVarianceError,
    NumericOverflowError,
    WindowExceedsHorizonError,
)
from core.game import GameKind, GameSpec, Hand, classify, hands_of, mask_of, validate
from core.metrics import HORIZON_GAUGE, TABLES_COUNTER
from core.settings import get_settings

Number = Union[Fraction, float]


class NumericMode(str, Enum):
    """Arithmetic used by the dynamic programs."""

    RATIONAL = "rational"
    FLOAT = "float"


def choose_mode(
    horizon: int, mode: Optional[Union[NumericMode, str]] = None
) -> NumericMode:
    """Explicit mode, or rational up to the configured horizon and float above."""
    if mode is not None:
        return NumericMode(mode)
    if horizon <= get_settings().rational_horizon:
        return NumericMode.RATIONAL
    return NumericMode.FLOAT


def _check_budget(cost: float, what: str) -> None:
    budget = get_settings().budget
    if cost > budget:
        raise BudgetExceededError(
            f"{what} needs ~{cost:.3g} operations, above JANKEN_BUDGET={budget:.3g}"
        )


# -------------------------
# SUPPORT PROBABILITIES
# -------------------------
def _signed_subset_masses(spec: GameSpec, mask: int) -> List[Tuple[int, Fraction]]:
    hands = sorted(hands_of(mask))
    size = len(hands)
    out = []
    for r in range(size + 1):
        for subset in combinations(hands, r):
            out.append(((-1) ** (size - r), spec.mass(mask_of(subset))))
    return out


def _support_mask(spec: GameSpec, support: Union[int, Iterable[Hand]]) -> int:
    mask = support if isinstance(support, int) else mask_of(support)
    if mask == 0:
        raise EmptySupportError("Support probability of the empty set is undefined")
    if mask >> spec.m:
        raise EmptySupportError(f"Support {sorted(hands_of(mask))} uses unknown hands")
    return mask


def support_prob(
    spec: GameSpec,
    support: Union[int, Iterable[Hand]],
    n: int,
    mode: Union[NumericMode, str] = NumericMode.RATIONAL,
) -> Number:
    """Probability that n players throw exactly the hands of ``support``.

    Inclusion-exclusion: sum over T subset of S of (-1)^(|S|-|T|) P(T)^n.
    """
    mask = _support_mask(spec, support)
    if NumericMode(mode) is NumericMode.RATIONAL:
        return sum(
            (sign * mass**n for sign, mass in _signed_subset_masses(spec, mask)),
            Fraction(0),
        )
    return float(np.exp(_log_support_table(spec, mask, n)[n]))


def _log_support_table(spec: GameSpec, mask: int, horizon: int) -> np.ndarray:
    """log pi_k(S) for k = 0..horizon, -inf where the probability is zero."""
    signed = _signed_subset_masses(spec, mask)
    size = bin(mask).count("1")
    total = float(spec.mass(mask))
    signs = np.array([s for s, _ in signed], dtype=float)
    ratios = np.array([float(m) for _, m in signed]) / total
    k = np.arange(horizon + 1)

    factor = (signs[:, None] * ratios[:, None] ** k[None, :]).sum(axis=0)
    factor[k < size] = 0.0
    factor = np.clip(factor, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return k * math.log(total) + np.log(factor)


def _rational_support_table(spec: GameSpec, mask: int, horizon: int) -> List[Fraction]:
    signed = _signed_subset_masses(spec, mask)
    powers = [Fraction(1)] * len(signed)
    table = []
    for _ in range(horizon + 1):
        table.append(sum((s * p for (s, _), p in zip(signed, powers)), Fraction(0)))
        powers = [p * m for (_, m), p in zip(signed, powers)]
    return table


# -------------------------
# KERNEL
# -------------------------
@dataclass(frozen=True)
class Kernel:
    """Survivor-count law of one round with n players.

    ``win_weight[j]`` (1 <= j < n) is the probability that the round is
    conclusive and leaves j players; index 0 is always zero.
    """

    n: int
    win_weight: np.ndarray
    tie_prob: Number
    no_tie: Number
    mode: NumericMode
    log_win_weight: Optional[np.ndarray] = field(default=None, repr=False)
    log_no_tie: Optional[float] = None

    def survivor_law(self) -> np.ndarray:
        """Law of J_n, the survivor count conditioned on a conclusive round."""
        if self.mode is NumericMode.RATIONAL:
            return self.win_weight / self.no_tie
        with np.errstate(invalid="ignore"):
            law = np.exp(self.log_win_weight - self.log_no_tie)
        law[0] = 0.0
        return law

    def normalization_gap(self) -> Number:
        """sum_j win_weight[j] - varpi_n (zero up to the mode's precision)."""
        return sum(self.win_weight[1:], self.win_weight[0]) - self.no_tie


@lru_cache(maxsize=64)
def _stirling_row(k: int) -> Tuple[int, ...]:
    return tuple(int(stirling2(k, r, exact=True)) for r in range(k + 1))


def geometric_raw_moment(q: Number, k: int) -> Number:
    """E(T^k) for T geometric on {1, 2, ...} with success probability q.

    Uses the factorial moments r! (1-q)^(r-1) / q^r and Stirling numbers of
    the second kind.
    """
    if k == 0:
        return Fraction(1) if isinstance(q, Fraction) else 1.0
    total = Fraction(0) if isinstance(q, Fraction) else 0.0
    row = _stirling_row(k)
    for r in range(1, k + 1):
        if row[r]:
            total += row[r] * math.factorial(r) * (1 - q) ** (r - 1) / q**r
    return total


def geometric_raw_moments(q: Number, order: int) -> List[Number]:
    return [geometric_raw_moment(q, k) for k in range(order + 1)]


# -------------------------
# TABLES
# -------------------------
@dataclass
class ExactTables:
    """Exact sequences up to a horizon N (index n = 1..N; index 0 unused)."""

    horizon: int
    numeric_mode: NumericMode
    mu: List[Number]
    var: List[Number]
    moments: List[List[Number]]
    cdf: List[List[Number]]
    y_mean: List[Number]
    y_var: List[Number]
    z_mean: List[Number]
    levels: int = 0

    def rows(self) -> List[Dict[str, Number]]:
        return [
            {
                "n": n,
                "mu": self.mu[n],
                "var": self.var[n],
                "y_mean": self.y_mean[n],
                "y_var": self.y_var[n],
                "z_mean": self.z_mean[n],
            }
            for n in range(1, self.horizon + 1)
        ]

    def cdf_rows(self) -> List[Dict[str, Number]]:
        return [
            {"n": n, "ell": ell, "cdf": self.cdf[ell][n]}
            for n in range(1, self.horizon + 1)
            for ell in range(len(self.cdf))
        ]


class ExactEngine:
    """Cached kernels and dynamic programs for one game in one numeric mode."""

    def __init__(
        self, spec: GameSpec, mode: Union[NumericMode, str] = NumericMode.RATIONAL
    ):
        validate(spec)
        self.spec = spec
        self.mode = NumericMode(mode)
        self.classification = classify(spec)
        self._horizon = 0
        self._tables: Dict[int, Union[np.ndarray, List[Fraction]]] = {}
        self._kernels: Dict[int, Kernel] = {}
        self._masks = sorted(
            {w.support_mask for w in spec.wod_sets}
            | {w.winner_mask for w in spec.wod_sets}
            | {w.loser_mask for w in spec.wod_sets}
        )

    # numeric helpers
    @property
    def zero(self) -> Number:
        return Fraction(0) if self.mode is NumericMode.RATIONAL else 0.0

    @property
    def one(self) -> Number:
        return Fraction(1) if self.mode is NumericMode.RATIONAL else 1.0

    def _array(self, size: int) -> np.ndarray:
        if self.mode is NumericMode.RATIONAL:
            return np.array([Fraction(0)] * size, dtype=object)
        return np.zeros(size)

    def _ensure_horizon(self, horizon: int) -> None:
        if horizon <= self._horizon:
            return
        horizon = max(horizon, 2 * self._horizon)
        build = (
            _rational_support_table
            if self.mode is NumericMode.RATIONAL
            else _log_support_table
        )
        self._tables = {mask: build(self.spec, mask, horizon) for mask in self._masks}
        self._horizon = horizon
        logger.debug(
            f"Support tables for {self.spec.name} extended to n={horizon} "
            f"({len(self._masks)} masks, {self.mode.value})"
        )

    def _prepare(self, horizon: int, cost: float, what: str) -> None:
        _check_budget(cost, what)
        self._ensure_horizon(max(horizon, 2))

    def no_tie(self, n: int) -> Number:
        """varpi_n: probability that a round with n players is conclusive."""
        return self.kernel(n).no_tie

    def kernel(self, n: int) -> Kernel:
        if n < 2:
            raise ValueError(f"Kernel needs n >= 2 players, got {n}")
        cached = self._kernels.get(n)
        if cached is not None:
            return cached
        self._ensure_horizon(n)
        if self.mode is NumericMode.RATIONAL:
            result = self._rational_kernel(n)
        else:
            result = self._float_kernel(n)
        # only exact kernels are cached
        if self.mode is NumericMode.RATIONAL:
            self._kernels[n] = result
        return result

    def _rational_kernel(self, n: int) -> Kernel:
        pi = self._tables
        weights = self._array(n)
        for j in range(1, n):
            binom = math.comb(n, j)
            weights[j] = sum(
                (
                    binom * pi[w.winner_mask][j] * pi[w.loser_mask][n - j]
                    for w in self.spec.wod_sets
                ),
                Fraction(0),
            )
        no_tie = sum((pi[w.support_mask][n] for w in self.spec.wod_sets), Fraction(0))
        return Kernel(
            n=n,
            win_weight=weights,
            tie_prob=1 - no_tie,
            no_tie=no_tie,
            mode=self.mode,
        )

    def _float_kernel(self, n: int) -> Kernel:
        lpi = self._tables
        j = np.arange(1, n)
        log_binom = gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
        terms = np.vstack(
            [
                log_binom + lpi[w.winner_mask][j] + lpi[w.loser_mask][n - j]
                for w in self.spec.wod_sets
            ]
        )
        log_w = np.full(n, -np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_w[1:] = logsumexp(terms, axis=0)
            log_no_tie = float(
                logsumexp([lpi[w.support_mask][n] for w in self.spec.wod_sets])
            )
        weights = np.exp(log_w)
        no_tie = np.float64(math.exp(log_no_tie))
        return Kernel(
            n=n,
            win_weight=weights,
            tie_prob=1.0 - no_tie,
            no_tie=no_tie,
            mode=self.mode,
            log_win_weight=log_w,
            log_no_tie=log_no_tie,
        )

    def survivor_law(self, n: int) -> np.ndarray:
        return self.kernel(n).survivor_law()

    # -------------------------
    # RECURRENCES
    # -------------------------
    def _finite(self, values: np.ndarray, what: str) -> np.ndarray:
        if self.mode is NumericMode.FLOAT and not np.all(np.isfinite(values)):
            bad = int(np.argmax(~np.isfinite(values)))
            raise NumericOverflowError(
                f"{what} overflows in float mode at n={bad} for {self.spec.name}; "
                "use rational mode or a smaller horizon"
            )
        return values

    def mean_rounds(self, horizon: int) -> np.ndarray:
        """mu[n] = E(X_n) for n = 1..horizon (mu[0] unused)."""
        self._prepare(horizon, horizon**2 / 2, "mean_rounds")
        mu = self._array(horizon + 1)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            for n in range(2, horizon + 1):
                k = self.kernel(n)
                mu[n] = self.one / k.no_tie + k.survivor_law() @ mu[:n]
        return self._finite(mu, "E(X_n)")

    def moments(self, horizon: int, order: int) -> np.ndarray:
        """Raw moments mom[n][k] = E(X_n^k), k = 0..order."""
        if order < 1:
            raise ValueError(f"Moment order must be >= 1, got {order}")
        self._prepare(horizon, horizon**2 * order / 2, "moments")
        dtype = object if self.mode is NumericMode.RATIONAL else float
        mom = np.empty((horizon + 1, order + 1), dtype=dtype)
        mom[:, :] = self.zero
        mom[1:, 0] = self.one
        binoms = [[math.comb(r, k) for k in range(r + 1)] for r in range(order + 1)]

        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            for n in range(2, horizon + 1):
                k_n = self.kernel(n)
                law = k_n.survivor_law()
                geo = geometric_raw_moments(k_n.no_tie, order)
                # E(X_{J_n}^k) for k = 0..order
                shifted = [law @ mom[:n, k] for k in range(order + 1)]
                for r in range(1, order + 1):
                    mom[n, r] = sum(
                        (binoms[r][k] * geo[r - k] * shifted[k] for k in range(r + 1)),
                        self.zero,
                    )
        return self._finite(mom, "E(X_n^k)")

    def variance_rounds(self, horizon: int) -> np.ndarray:
        mom = self.moments(horizon, 2)
        return self._variance(mom[:, 2] - mom[:, 1] ** 2, mom[:, 2], "V(X_n)")

    def _variance(self, var: np.ndarray, second: np.ndarray, what: str) -> np.ndarray:
        if self.mode is NumericMode.RATIONAL:
            if any(v < 0 for v in var):
                raise NegativeVarianceError(f"{what} negative in rational mode")
            return var
        tol = 1e-9 * np.maximum(np.abs(second.astype(float)), 1.0)
        if np.any(var < -tol):
            bad = int(np.argmax(var < -tol))
            raise NegativeVarianceError(
                f"{what} = {var[bad]:.3g} at n={bad}: catastrophic cancellation, "
                "switch to rational mode"
            )
        if np.any(var < 0):
            logger.warning(f"Clipping tiny negative {what} values to zero")
        return np.maximum(var, 0.0)

    def default_levels(self, horizon: int) -> Optional[int]:
        """Distribution depth for log-games; None means "until the tail is small"."""
        cls = self.classification
        if cls.kind is GameKind.LOG:
            base = 1 / float(cls.alpha)
            return math.ceil(math.log(max(horizon, 2)) / math.log(base)) + 40
        return None

    def _transition_matrix(self, horizon: int) -> np.ndarray:
        size = horizon + 1
        if self.mode is NumericMode.RATIONAL:
            mat = np.array([[Fraction(0)] * size for _ in range(size)], dtype=object)
        else:
            mat = np.zeros((size, size))
        if horizon >= 1:
            mat[1, 1] = self.one
        for n in range(2, horizon + 1):
            k = self.kernel(n)
            mat[n, :n] = k.win_weight
            mat[n, n] = k.tie_prob
        return mat

    def _digits_per_level(self, horizon: int) -> float:
        """Decimal digits one transition step can add to a CDF denominator."""
        bits = 0
        for n in range(2, horizon + 1):
            k = self.kernel(n)
            dens = [k.tie_prob.denominator] + [w.denominator for w in k.win_weight]
            bits = max(bits, math.lcm(*dens).bit_length())
        return bits * math.log10(2)

    def round_distribution(
        self, horizon: int, levels: Optional[int] = None
    ) -> np.ndarray:
        """cdf[ell][n] = P(X_n <= ell) for ell = 0..levels, n = 1..horizon.

        When ``levels`` is None, log-games use ceil(log_{1/alpha} N) + 40 and
        exp-games iterate until every tail 1 - F_ell(n) is below the configured
        tolerance. In rational mode that level count is taken from a float pass,
        and runs whose fractions would outgrow JANKEN_RATIONAL_DIGITS raise
        BudgetExceededError before iterating.
        """
        settings = get_settings()
        levels = levels if levels is not None else self.default_levels(horizon)
        cost = float(horizon**2 * (levels or 1))
        if self.mode is NumericMode.RATIONAL:
            if levels is None:
                float_engine = ExactEngine(self.spec, NumericMode.FLOAT)
                levels = len(float_engine.round_distribution(horizon)) - 1
            digits = levels * self._digits_per_level(horizon)
            if digits > settings.rational_digits:
                raise BudgetExceededError(
                    f"Exact CDF with {levels} levels needs ~{digits:.0f}-digit "
                    f"fractions, above JANKEN_RATIONAL_DIGITS="
                    f"{settings.rational_digits}; use --mode float or a smaller --L"
                )
            # bignum operands: one word per 19 decimal digits
            cost = horizon**2 * levels * max(1.0, digits / 19)
        cap = levels if levels is not None else settings.max_levels
        self._prepare(horizon, cost, "round_distribution")

        mat = self._transition_matrix(horizon)
        current = self._array(horizon + 1)
        if horizon >= 1:
            current[1] = self.one
        rows = [current]
        while len(rows) <= cap:
            if levels is None:
                tail = max((1 - v for v in rows[-1][1:]), default=0)
                if tail < settings.tail_tolerance:
                    break
                if len(rows) % 1000 == 0:
                    _check_budget(horizon**2 * len(rows), "round_distribution")
            rows.append(mat @ rows[-1])
        else:
            if levels is None:
                raise BudgetExceededError(
                    f"CDF tail still above {settings.tail_tolerance} after "
                    f"{settings.max_levels} levels (JANKEN_MAX_LEVELS)"
                )
        logger.debug(f"round_distribution: {len(rows) - 1} levels for N={horizon}")
        return np.vstack(rows)

    def total_hands_mean(self, horizon: int) -> np.ndarray:
        """ybar[n] = E(Y_n), from Y_n = Y_{I_n} + n."""
        self._prepare(horizon, horizon**2 / 2, "total_hands_mean")
        y = self._array(horizon + 1)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            for n in range(2, horizon + 1):
                k = self.kernel(n)
                y[n] = n / k.no_tie + k.survivor_law() @ y[:n]
        return self._finite(y, "E(Y_n)")

    def total_hands_second_moment(self, horizon: int) -> Tuple[np.ndarray, np.ndarray]:
        y = self.total_hands_mean(horizon)
        s = self._array(horizon + 1)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            for n in range(2, horizon + 1):
                k = self.kernel(n)
                law = k.survivor_law()
                # E(Y_n^2) = E((Y_{I_n} + n)^2), tie term solved for s[n]
                s[n] = (n * n + 2 * n * k.tie_prob * y[n]) / k.no_tie + law @ (
                    s[:n] + 2 * n * y[:n]
                )
        return y, self._finite(s, "E(Y_n^2)")

    def total_hands_variance(self, horizon: int) -> np.ndarray:
        y, s = self.total_hands_second_moment(horizon)
        return self._variance(s - y**2, s, "V(Y_n)")

    def tie_free_mean(self, horizon: int) -> np.ndarray:
        """z[n] = E(Z_n), rounds counted without ties."""
        self._prepare(horizon, horizon**2 / 2, "tie_free_mean")
        z = self._array(horizon + 1)
        for n in range(2, horizon + 1):
            z[n] = self.one + self.survivor_law(n) @ z[:n]
        return z

    def build_tables(
        self, horizon: int, levels: Optional[int] = None, order: int = 2
    ) -> ExactTables:
        """All exact sequences up to ``horizon`` in one pass."""
        if horizon < 1:
            raise ValueError(f"Horizon must be >= 1, got {horizon}")
        logger.info(
            f"Building exact tables for {self.spec.name}: N={horizon} "
            f"K={order} mode={self.mode.value}"
        )
        mom = self.moments(horizon, max(order, 2))
        var = self._variance(mom[:, 2] - mom[:, 1] ** 2, mom[:, 2], "V(X_n)")
        cdf = self.round_distribution(horizon, levels)
        y, s = self.total_hands_second_moment(horizon)
        y_var = self._variance(s - y**2, s, "V(Y_n)")
        z = self.tie_free_mean(horizon)

        TABLES_COUNTER.labels(numeric_mode=self.mode.value).inc()
        HORIZON_GAUGE.set(horizon)
        return ExactTables(
            horizon=horizon,
            numeric_mode=self.mode,
            mu=list(mom[:, 1]),
            var=list(var),
            moments=[list(row[: order + 1]) for row in mom],
            cdf=[list(row) for row in cdf],
            y_mean=list(y),
            y_var=list(y_var),
            z_mean=list(z),
            levels=len(cdf) - 1,
        )


# -------------------------
# FUNCTIONAL FRONT END
# -------------------------
def _engine(spec: GameSpec, horizon: int, mode) -> ExactEngine:
    return ExactEngine(spec, choose_mode(horizon, mode))


def no_tie_prob(spec: GameSpec, n: int, mode=NumericMode.RATIONAL) -> Number:
    """varpi_n = sum over WOD sets S of pi_n(S)."""
    if n < 2:
        raise ValueError(f"no_tie_prob needs n >= 2, got {n}")
    return _engine(spec, n, mode).no_tie(n)


def kernel(spec: GameSpec, n: int, mode=NumericMode.RATIONAL) -> Kernel:
    return _engine(spec, n, mode).kernel(n)


def mean_rounds(spec: GameSpec, horizon: int, mode=None) -> np.ndarray:
    return _engine(spec, horizon, mode).mean_rounds(horizon)


def moments(spec: GameSpec, horizon: int, order: int, mode=None) -> np.ndarray:
    return _engine(spec, horizon, mode).moments(horizon, order)


def variance_rounds(spec: GameSpec, horizon: int, mode=None) -> np.ndarray:
    return _engine(spec, horizon, mode).variance_rounds(horizon)


def round_distribution(
    spec: GameSpec, horizon: int, levels: Optional[int] = None, mode=None
) -> np.ndarray:
    return _engine(spec, horizon, mode).round_distribution(horizon, levels)


def total_hands_mean(spec: GameSpec, horizon: int, mode=None) -> np.ndarray:
    return _engine(spec, horizon, mode).total_hands_mean(horizon)


def total_hands_variance(spec: GameSpec, horizon: int, mode=None) -> np.ndarray:
    return _engine(spec, horizon, mode).total_hands_variance(horizon)


def tie_free_mean(spec: GameSpec, horizon: int, mode=None) -> np.ndarray:
    return _engine(spec, horizon, mode).tie_free_mean(horizon)


def survivor_law(spec: GameSpec, n: int, mode=None) -> np.ndarray:
    return _engine(spec, n, mode).survivor_law(n)


def build_tables(
    spec: GameSpec,
    horizon: int,
    levels: Optional[int] = None,
    order: int = 2,
    mode=None,
) -> ExactTables:
    return _engine(spec, horizon, mode).build_tables(horizon, levels, order)


# -------------------------
# POISSONIZATION
# -------------------------
@dataclass(frozen=True)
class PoissonizedValue:
    value: float
    error_bound: float
    window: Tuple[int, int]


def poissonize(sequence: Sequence[Number], x: float) -> PoissonizedValue:
    """e^{-x} sum_n a_n x^n / n! over the window [x - 10 sqrt x, x + 10 sqrt x].

    ``sequence[n]`` holds a_n for n = 1..N (index 0 is ignored). The error
    bound is the Poisson mass outside the window times max |a_n| over the
    horizon, which is valid when the sequence does not grow beyond that
    maximum past N.
    """
    horizon = len(sequence) - 1
    if x <= 0:
        raise ValueError(f"Poisson parameter must be positive, got {x}")
    spread = 10.0 * math.sqrt(x)
    lo = max(1, math.floor(x - spread))
    hi = math.ceil(x + spread)
    if hi > horizon:
        raise WindowExceedsHorizonError(
            f"Window [{lo}, {hi}] for x={x} exceeds the horizon N={horizon}"
        )
    n = np.arange(lo, hi + 1)
    weights = poisson.pmf(n, x)
    values = np.array([float(sequence[i]) for i in n])
    outside = max(0.0, 1.0 - float(weights.sum()))
    scale = max((abs(float(a)) for a in sequence[1:]), default=0.0)
    return PoissonizedValue(
        value=float(weights @ values),
        error_bound=outside * scale,
        window=(lo, hi),
    )
