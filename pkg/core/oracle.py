# core/oracle.py
"""Brute-force absorbing Markov chain over player counts.

States are the player counts 1..N, state 1 absorbing. The transition law of
state k is obtained by enumerating all m^k hand assignments, independently of
the inclusion-exclusion kernel, so it serves as a cross-check for the exact
engine on small games.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List

import numpy as np
from loguru import logger
from scipy.linalg import solve

from core.errors import BudgetExceededError
from core.game import GameSpec, validate
from core.settings import get_settings


@dataclass
class OracleTables:
    horizon: int
    transition: List[List[Fraction]]
    mu: List[Fraction]
    second: List[Fraction]
    var: List[Fraction]
    cdf: List[List[Fraction]]


def transition_row(spec: GameSpec, k: int) -> List[Fraction]:
    """P(next count = j | k players) for j = 0..k, by enumeration."""
    row = [Fraction(0)] * (k + 1)
    for hands in product(range(spec.m), repeat=k):
        weight = Fraction(1)
        for h in hands:
            weight *= spec.probs[h]
        support = 0
        for h in hands:
            support |= 1 << h
        wod = spec.wod_for(support)
        if wod is None:
            row[k] += weight
        else:
            row[sum(1 for h in hands if h in wod.winners)] += weight
    return row


def transition_matrix(spec: GameSpec, horizon: int) -> List[List[Fraction]]:
    validate(spec)
    cost = sum(spec.m**k for k in range(2, horizon + 1))
    if cost > get_settings().budget:
        raise BudgetExceededError(
            f"Oracle enumeration of {cost:.3g} assignments is over budget"
        )

    matrix = [[Fraction(0)] * (horizon + 1) for _ in range(horizon + 1)]
    if horizon >= 1:
        matrix[1][1] = Fraction(1)
    for k in range(2, horizon + 1):
        matrix[k][: k + 1] = transition_row(spec, k)
    return matrix


def oracle_tables(spec: GameSpec, horizon: int, levels: int = 20) -> OracleTables:
    """Absorption-time mean, second moment and CDF by exact forward substitution.

    The chain only moves to smaller counts or stays, so (I - Q) is lower
    triangular on the transient states.
    """
    P = transition_matrix(spec, horizon)
    mu = [Fraction(0)] * (horizon + 1)
    second = [Fraction(0)] * (horizon + 1)
    for k in range(2, horizon + 1):
        stay = 1 - P[k][k]
        mu[k] = (1 + sum(P[k][j] * mu[j] for j in range(1, k))) / stay
        # X_k = 1 + X_next, so E(X_k^2) = 1 + 2 E(X_next) + E(X_next^2)
        second[k] = (
            1
            + 2 * sum(P[k][j] * mu[j] for j in range(1, k + 1))
            + sum(P[k][j] * second[j] for j in range(1, k))
        ) / stay
    var = [second[k] - mu[k] ** 2 for k in range(horizon + 1)]

    cdf = [[Fraction(0)] * (horizon + 1)]
    if horizon >= 1:
        cdf[0][1] = Fraction(1)
    for _ in range(levels):
        prev = cdf[-1]
        cdf.append(
            [
                sum((P[k][j] * prev[j] for j in range(1, k + 1)), Fraction(0))
                for k in range(horizon + 1)
            ]
        )

    logger.debug(f"Oracle for {spec.name}: N={horizon}, {levels} CDF levels")
    return OracleTables(
        horizon=horizon, transition=P, mu=mu, second=second, var=var, cdf=cdf
    )


def oracle_mean_float(spec: GameSpec, horizon: int) -> np.ndarray:
    """Mean absorption times from a dense linear solve (first-passage form).

    Solves m[1] = 0, m[k] = 1 + sum_j P[k][j] m[j] on the float transition
    matrix; index 0 of the result is unused.
    """
    P = np.array(transition_matrix(spec, horizon), dtype=float)[1:, 1:]
    A = np.eye(horizon) - P
    A[0, :] = 0.0
    A[0, 0] = 1.0
    b = np.ones(horizon)
    b[0] = 0.0
    return np.concatenate(([0.0], solve(A, b)))
