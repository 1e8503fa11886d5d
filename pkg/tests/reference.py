"""Slow reference implementations, independent of the package internals.

Everything here recomputes quantities from first principles: permutation
enumeration for index vectors, explicit rational pmf construction for the
slice distribution, and direct summation for correlations.  Test modules
compare package output against these oracles, so keep this file free of
shapley_forge imports.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def perm_shapley(fn1, n: int) -> np.ndarray:
    """Index vector straight from the definition: average over all n! orders
    of the jump fn1(prefix with i) - fn1(prefix without i).  fn1 takes one
    +-1 vector.  O(n! * n); keep n <= 7."""
    out = [Fraction(0)] * n
    for perm in itertools.permutations(range(n)):
        x = -np.ones(n, dtype=np.int8)
        for i in perm:
            before = fn1(x)
            x[i] = 1
            out[i] += Fraction(fn1(x)) - Fraction(before)
    total = math.factorial(n)
    return np.array([float(v / total) for v in out])


def classical_shapley_shubik(int_weights, quota: int) -> np.ndarray:
    """Pivot probability per voter over all orders of a quota game."""
    n = len(int_weights)
    counts = [0] * n
    for perm in itertools.permutations(range(n)):
        acc = 0
        for i in perm:
            acc += int_weights[i]
            if acc >= quota:
                counts[i] += 1
                break
    total = math.factorial(n)
    return np.array([c / total for c in counts])


def mu_pmf_fraction(n: int, wt: int) -> Fraction:
    """Point mass of the slice distribution, exact rationals throughout."""
    if not 1 <= wt <= n - 1:
        return Fraction(0)
    lam = sum(Fraction(1, k) + Fraction(1, n - k) for k in range(1, n))
    slice_mass = (Fraction(1, wt) + Fraction(1, n - wt)) / lam
    return slice_mass / math.comb(n, wt)


def mu_correlations(fn1, n: int) -> np.ndarray:
    """(n+1)-vector (E f, E f x_1, ..., E f x_n) under the slice law."""
    acc = np.zeros(n + 1)
    for bits in itertools.product((-1, 1), repeat=n):
        x = np.array(bits, dtype=np.int8)
        wt = int(np.count_nonzero(x == 1))
        p = float(mu_pmf_fraction(n, wt))
        if p == 0.0:
            continue
        v = float(fn1(x))
        acc[0] += p * v
        acc[1:] += p * v * x
    return acc


def mu_expectation(fn1, n: int) -> float:
    return float(mu_correlations(fn1, n)[0])


def balanced_split_fraction(w0: float, weights, i: int, r: float) -> float:
    """Fraction of size-i subsets T with |w0 + w(T) - w(complement)| <= r."""
    weights = list(weights)
    n = len(weights)
    total = sum(weights)
    hits = 0
    count = 0
    for T in itertools.combinations(range(n), i):
        wT = sum(weights[j] for j in T)
        count += 1
        if abs(w0 + wT - (total - wT)) <= r:
            hits += 1
    return hits / count


def anticonc_mass(weights, theta: float, r: float) -> float:
    """P(|w.x - theta| < r) by enumeration of the slice support."""
    n = len(weights)
    w = np.asarray(weights, dtype=np.float64)
    mass = 0.0
    for bits in itertools.product((-1, 1), repeat=n):
        x = np.array(bits, dtype=np.int8)
        wt = int(np.count_nonzero(x == 1))
        p = float(mu_pmf_fraction(n, wt))
        if p and abs(float(w @ x) - theta) < r:
            mass += p
    return mass


def ltf1(weights, theta: float):
    """Scalar sign evaluator with the tie convention sign(0) = +1."""
    w = np.asarray(weights, dtype=np.float64)

    def fn1(x) -> float:
        return 1.0 if float(w @ np.asarray(x, dtype=np.float64)) - theta >= 0 else -1.0

    return fn1


def table_fn1(values: np.ndarray, n: int):
    """Scalar evaluator for a truth table indexed LSB-first (bit i of the row
    index is +1 at coordinate i)."""

    def fn1(x) -> float:
        idx = 0
        for i, b in enumerate(x):
            if b == 1:
                idx |= 1 << i
        return float(values[idx])

    return fn1
