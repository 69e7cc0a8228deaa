"""Random exact geometries shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from skewtwistor import _num
from skewtwistor.lie import InvariantGeometry, LieAlgebra4


def rand_q(rng: random.Random, lo=-3, hi=3, den=4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def rand_invertible(rng: random.Random, n=4) -> np.ndarray:
    while True:
        P = _num.array([[rand_q(rng, -2, 2, 2) for _ in range(n)] for _ in range(n)])
        if _num.det(P) != 0:
            return P


def rebase(c: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Structure constants in the basis f_i = sum_j P[i, j] e_j."""
    return np.einsum("ia,jb,abk,kl->ijl", P, P, c, _num.inv(P))


def semidirect_algebra(rng: random.Random) -> LieAlgebra4:
    """R ⋉_A R^3 with a random rational A, seen in a random rational basis."""
    c = _num.zeros((4, 4, 4), True)
    for j in range(1, 4):
        for k in range(1, 4):
            v = rand_q(rng, -2, 2, 3)
            c[0, j, k], c[j, 0, k] = v, -v
    return LieAlgebra4(rebase(c, rand_invertible(rng)))


def su2_algebra(rng: random.Random) -> LieAlgebra4:
    c = _num.zeros((4, 4, 4), True)
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k], c[j, i, k] = Fraction(1), Fraction(-1)
    return LieAlgebra4(rebase(c, rand_invertible(rng)))


def exact_gram(rng: random.Random) -> np.ndarray:
    """U^T U with U upper triangular rational, so the frame stays rational."""
    U = _num.zeros((4, 4), True)
    for i in range(4):
        U[i, i] = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        for j in range(i + 1, 4):
            U[i, j] = rand_q(rng, -1, 1, 3)
    return U.T @ U


def rand_tau(rng: random.Random) -> np.ndarray:
    return _num.array([rand_q(rng) for _ in range(4)])


def random_geometry(seed: int, tau=True) -> InvariantGeometry:
    rng = random.Random(seed)
    alg = su2_algebra(rng) if rng.random() < 0.25 else semidirect_algebra(rng)
    t = rand_tau(rng) if tau else _num.zeros(4, True)
    return InvariantGeometry(alg, exact_gram(rng), rng.choice((1, -1)), t, name=f"random{seed}")


def random_triples(n=10, start=100) -> list[InvariantGeometry]:
    return [random_geometry(start + i) for i in range(n)]
