# core/asymptotics.py
"""Leading-order predictions for the cost measures and residual extraction.

Log-games (rho = 1) need log_{1/alpha} n rounds and linearly many hands;
exp-games need about 1/(nu rho^n) rounds, with the scaled round count
approaching Exp(1) in distribution and in all moments. Ignoring ties, every
game needs about h_nu ln n conclusive rounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from core.errors import NumericOverflowError, WrongKindError
from core.exact import ExactEngine, NumericMode
from core.game import Classification, GameKind, GameSpec, classify


class Quantity(str, Enum):
    X_MEAN = "XMean"
    X_VAR = "XVar"
    X_MOMENT = "XMoment"
    Y_MEAN = "YMean"
    Y_VAR = "YVar"
    Z_MEAN = "ZMean"
    LIMIT_CDF = "LimitCdf"


@dataclass(frozen=True)
class Prediction:
    quantity: Quantity
    leading: float
    correction: Optional[float] = None
    validity: str = ""

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity.value,
            "leading": self.leading,
            "correction": self.correction,
            "validity": self.validity,
        }


@dataclass
class FluctuationProfile:
    """Residuals of an exact sequence against a leading term, by phase."""

    points: List[Tuple[float, float]]
    amplitude: float
    n_range: Tuple[int, int]
    offset: float = 0.0
    ns: List[int] = field(default_factory=list, repr=False)

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"n": n, "phase": phase, "residual": residual}
            for n, (phase, residual) in zip(self.ns, self.points)
        ]


@dataclass(frozen=True)
class TieFreeSlope:
    h_nu: float
    all_rational: bool
    base: Optional[Fraction] = None
    exponents: Tuple[Fraction, ...] = ()


# -------------------------
# PREDICTIONS
# -------------------------
def _log_base(x: float, base: float) -> float:
    return math.log(x) / math.log(base)


def _exp_scale(cls: Classification, n: int) -> float:
    """1 / (nu rho^n), computed in the log domain."""
    log_value = -math.log(cls.nu) - n * math.log(cls.rho)
    if log_value > 709:
        raise NumericOverflowError(f"1/(nu rho^n) overflows a double at n={n}")
    return math.exp(log_value)


def predict(
    target: Union[GameSpec, Classification],
    quantity: Union[Quantity, str],
    n: int,
    ell: int = 0,
    order: int = 2,
) -> Prediction:
    """Leading term of ``quantity`` at n players for the game's kind.

    ``ell`` is the level offset for LimitCdf (evaluated at floor(log n) + ell)
    and ``order`` the moment order for XMoment.

    Raises:
        WrongKindError: If no closed form applies to this kind of game
    """
    quantity = Quantity(quantity)
    if n < 2:
        raise ValueError(f"Predictions need n >= 2, got {n}")
    spec = target if isinstance(target, GameSpec) else None
    cls = classify(spec) if spec is not None else target

    if quantity is Quantity.Z_MEAN:
        return Prediction(
            quantity, cls.h_nu * math.log(n), validity="tie-free rounds: h_nu ln n"
        )

    if quantity is Quantity.LIMIT_CDF:
        base = clique_base(spec) if spec is not None else None
        if base is None:
            raise WrongKindError(
                "Closed-form limit law t/(e^t-1) is only known for "
                "uniform acyclic cliques"
            )
        return Prediction(
            quantity,
            limit_cdf_acyclic_clique(base, n, ell),
            validity=f"F at level floor(log_{base} n)+{ell}: t/(e^t-1)",
        )

    if cls.kind is GameKind.LOG:
        alpha = float(cls.alpha)
        if quantity is Quantity.X_MEAN:
            return Prediction(
                quantity,
                _log_base(n, 1 / alpha),
                validity="log-game: log_{1/alpha} n plus a bounded periodic term",
            )
        if quantity is Quantity.X_VAR:
            return Prediction(
                quantity, 0.0, validity="log-game: variance stays bounded"
            )
        if quantity is Quantity.Y_MEAN:
            return Prediction(
                quantity, n / (1 - alpha), validity="log-game: n/(1-alpha)"
            )
        if quantity is Quantity.Y_VAR:
            return Prediction(
                quantity,
                alpha * n / (1 - alpha) ** 2,
                validity="log-game: alpha n/(1-alpha)^2 times a periodic factor",
            )
        raise WrongKindError(f"{quantity.value} has no log-game closed form")

    scale = _exp_scale(cls, n)
    if quantity is Quantity.X_MEAN:
        return Prediction(quantity, scale, validity="exp-game: 1/(nu rho^n)")
    if quantity is Quantity.X_VAR:
        return Prediction(
            quantity, scale**2, validity="exp-game: Exp(1) variance scaled"
        )
    if quantity is Quantity.X_MOMENT:
        return Prediction(
            quantity,
            math.factorial(order) * scale**order,
            validity=f"exp-game: {order}! / (nu rho^n)^{order}",
        )
    if quantity is Quantity.Y_MEAN:
        return Prediction(quantity, n * scale, validity="exp-game: n/(nu rho^n)")
    # Y_VAR
    return Prediction(quantity, (n * scale) ** 2, validity="exp-game: n^2/(nu rho^n)^2")


# -------------------------
# LIMIT LAWS
# -------------------------
def _floor_log(base: int, n: int) -> int:
    k, power = 0, base
    while power <= n:
        k += 1
        power *= base
    return k


def fractional_log(base: int, n: int) -> float:
    """{log_base n} computed against the exact integer floor."""
    k = _floor_log(base, n)
    return math.log(n / base**k) / math.log(base)


def limit_cdf_acyclic_clique(m: int, n: int, ell: int) -> float:
    """t/(e^t - 1) with t = m^({log_m n} - ell).

    Limit of P(X_n <= floor(log_m n) + ell) for the uniform m-clique.
    """
    if m < 2:
        raise ValueError(f"Clique base must be >= 2, got {m}")
    exponent = (fractional_log(m, n) - ell) * math.log(m)
    if exponent > 6.5:  # t > 665, value below 1e-280
        return 0.0
    t = math.exp(exponent)
    if t == 0.0:
        return 1.0
    return t / math.expm1(t)


def limit_cdf_unbiased_ctls(n: int, ell: int) -> float:
    return limit_cdf_acyclic_clique(2, n, ell)


def clique_base(spec: GameSpec) -> Optional[int]:
    """m when the conclusive-round kernel is that of the uniform m-clique.

    That kernel is C(n,j) m^-n sum_{1<=r<m} r^(n-j); it is checked exactly
    for every n <= 2m+4.
    """
    m = spec.m
    engine = ExactEngine(spec, NumericMode.RATIONAL)
    for n in range(2, 2 * m + 5):
        weights = engine.kernel(n).win_weight
        for j in range(1, n):
            expected = Fraction(
                math.comb(n, j) * sum(r ** (n - j) for r in range(1, m)), m**n
            )
            if weights[j] != expected:
                return None
    return m


# -------------------------
# RESIDUALS
# -------------------------
def fluctuation_profile(
    sequence: Sequence,
    alpha: Union[Fraction, float],
    leading: Callable[[int], float],
    n_range: Optional[Tuple[int, int]] = None,
    center: bool = False,
) -> FluctuationProfile:
    """Residuals sequence[n] - leading(n) against the phase {log_{1/alpha} n}.

    With ``center`` the mean residual over the range is subtracted first
    (an estimated additive constant).
    """
    lo, hi = n_range or (2, len(sequence) - 1)
    if lo < 1 or hi >= len(sequence) or lo > hi:
        raise ValueError(f"n range [{lo}, {hi}] outside 1..{len(sequence) - 1}")
    base = 1 / float(alpha)
    ns = list(range(lo, hi + 1))
    residuals = [float(sequence[n]) - leading(n) for n in ns]
    offset = sum(residuals) / len(residuals) if center else 0.0
    residuals = [r - offset for r in residuals]

    points = []
    for n, r in zip(ns, residuals):
        x = _log_base(n, base)
        phase = x - math.floor(x)
        points.append((phase if phase < 1.0 else 0.0, r))
    amplitude = max(abs(r) for r in residuals)
    logger.debug(f"Fluctuation amplitude {amplitude:.3g} over n in [{lo}, {hi}]")
    return FluctuationProfile(
        points=points, amplitude=amplitude, n_range=(lo, hi), offset=offset, ns=ns
    )


# -------------------------
# TIE-FREE SLOPE
# -------------------------
def _coprime_base(values: Sequence[int]) -> List[int]:
    """Pairwise coprime integers > 1 over which every value factors."""
    base = {v for v in values if v > 1}
    changed = True
    while changed:
        changed = False
        items = sorted(base)
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                g = math.gcd(a, b)
                if g > 1:
                    base -= {a, b}
                    base |= {x for x in (g, a // g, b // g) if x > 1}
                    changed = True
                    break
            if changed:
                break
    return sorted(base)


def _valuation(x: int, b: int) -> int:
    count = 0
    while x % b == 0:
        x //= b
        count += 1
    return count


def tie_free_slope(target: Union[GameSpec, Classification]) -> TieFreeSlope:
    """h_nu and whether all ln(rho/alpha_j)/ln(rho/alpha_k) are rational.

    The ratios rho/alpha_l are exact rationals; they are all powers of one
    rational r > 1 exactly when their exponent vectors over a coprime base of
    the numerators and denominators are pairwise proportional.
    """
    cls = classify(target) if isinstance(target, GameSpec) else target
    ratios = [cls.rho / a for a in cls.alphas]
    parts = [r.numerator for r in ratios] + [r.denominator for r in ratios]
    base = _coprime_base(parts)
    vectors = [
        [_valuation(r.numerator, b) - _valuation(r.denominator, b) for b in base]
        for r in ratios
    ]

    first = vectors[0]
    pivot = next(i for i, e in enumerate(first) if e != 0)
    for vec in vectors[1:]:
        # proportional to the first vector: vec * first[pivot] == first * vec[pivot]
        if any(v * first[pivot] != f * vec[pivot] for v, f in zip(vec, first)):
            return TieFreeSlope(h_nu=cls.h_nu, all_rational=False)

    g = 0
    for e in first:
        g = math.gcd(g, e)
    primitive = [e // g for e in first]
    r = Fraction(1)
    for b, e in zip(base, primitive):
        r *= Fraction(b) ** e
    exponents = tuple(Fraction(vec[pivot], primitive[pivot]) for vec in vectors)
    return TieFreeSlope(h_nu=cls.h_nu, all_rational=True, base=r, exponents=exponents)


# -------------------------
# SEMICIRCLE GAME
# -------------------------
def semicircle_probability(n: int, dim: int = 2) -> Fraction:
    """P(n uniform points on the sphere in R^dim lie in a common closed hemisphere)."""
    if n < 1 or dim < 1:
        raise ValueError(f"Need n >= 1 and dim >= 1, got n={n}, dim={dim}")
    return Fraction(sum(math.comb(n - 1, j) for j in range(dim)), 2 ** (n - 1))


def semicircle_expected_rounds(n: int, dim: int = 2) -> Fraction:
    """Expected failed repetitions before success: 1/p - 1, or 2^(n-1)/n - 1."""
    return 1 / semicircle_probability(n, dim) - 1
