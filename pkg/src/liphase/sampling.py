"""Seeded random samplers for matrices, group elements and Siegel points."""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from .exact import RatMatrix, det_exact
from .siegel import J, SiegelPoint, SpElement, identity, n_minus, n_plus, torus


def rng_for(seed: int, *tags) -> random.Random:
    """Independent deterministic stream for a (seed, tag...) pair."""
    return random.Random(repr((seed,) + tags))


def rand_rat(rng: random.Random, bound: int = 3, denom: int = 1) -> Fraction:
    return Fraction(rng.randint(-bound * denom, bound * denom), rng.randint(1, denom))


def rand_symmetric(rng: random.Random, n: int, bound: int = 3, denom: int = 1) -> RatMatrix:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = rand_rat(rng, bound, denom)
    return RatMatrix(rows)


def rand_nondegenerate_symmetric(rng: random.Random, n: int, bound: int = 3, denom: int = 1) -> RatMatrix:
    while True:
        S = rand_symmetric(rng, n, bound, denom)
        if det_exact(S) != 0:
            return S


def rand_positive_definite(rng: random.Random, n: int, bound: int = 2, denom: int = 1) -> RatMatrix:
    while True:
        A = RatMatrix([[rand_rat(rng, bound, denom) for _ in range(n)] for _ in range(n)])
        S = A.T @ A + RatMatrix.scalar(n, Fraction(1, 2))
        return S


def rand_unimodular(rng: random.Random, n: int, steps: int = 3) -> RatMatrix:
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n == 1:
            break
        i, j = rng.sample(range(n), 2)
        k = rng.choice([-1, 1])
        for r in range(n):
            M[r][i] += k * M[r][j]
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice([-1, 1]) for _ in range(n)]
    return RatMatrix([[signs[i] * M[perm[i]][j] for j in range(n)] for i in range(n)])


def rand_invertible(rng: random.Random, n: int, bound: int = 2, denom: int = 2) -> RatMatrix:
    while True:
        A = RatMatrix([[rand_rat(rng, bound, denom) for _ in range(n)] for _ in range(n)])
        if det_exact(A) != 0:
            return A


def rand_generator(rng: random.Random, n: int, integral: bool = True, bound: int = 2) -> SpElement:
    kind = rng.choice(["plus", "minus", "torus", "J"])
    denom = 1 if integral else 2
    if kind == "plus":
        return n_plus(rand_symmetric(rng, n, bound, denom))
    if kind == "minus":
        return n_minus(rand_symmetric(rng, n, bound, denom))
    if kind == "torus":
        return torus(rand_unimodular(rng, n) if integral else rand_invertible(rng, n, bound, 2))
    return J(n)


def rand_sp(rng: random.Random, n: int, length: int = 3, integral: bool = True, bound: int = 2) -> SpElement:
    g = identity(n)
    for _ in range(length):
        g = g @ rand_generator(rng, n, integral, bound)
    return g


def rand_u0(rng: random.Random, n: int, length: int = 3, integral: bool = False, bound: int = 2) -> SpElement:
    while True:
        g = rand_sp(rng, n, length, integral, bound)
        if g.in_u0:
            return g


def rand_siegel(rng: random.Random, n: int, spread: float = 1.5) -> SiegelPoint:
    """Random point with moderate real part and well-conditioned imaginary part."""
    X = np.array([[rng.uniform(-spread, spread) for _ in range(n)] for _ in range(n)])
    Y = np.array([[rng.uniform(-1, 1) for _ in range(n)] for _ in range(n)])
    im = Y @ Y.T + rng.uniform(0.2, 1.5) * np.eye(n)
    return SiegelPoint(0.5 * (X + X.T) + 1j * im)


def rand_siegel_exact(rng: random.Random, n: int, bound: int = 2, denom: int = 3) -> SiegelPoint:
    re = rand_symmetric(rng, n, bound, denom)
    A = RatMatrix([[rand_rat(rng, 1, denom) for _ in range(n)] for _ in range(n)])
    im = A.T @ A + RatMatrix.scalar(n, Fraction(1, 3))
    return SiegelPoint.exact(re, im)
