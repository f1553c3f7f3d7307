"""Shared helpers: seeded generators, cached quorums and random operators."""

import dataclasses
from functools import lru_cache

import numpy as np
import pytest

from packages.evrep.src.core.types import Direction, HermitianOperator
from packages.evrep.src.frames.quorum import Quorum, build_quorum, standard_directions

# 2s for s = 1/2, 1, 3/2, 2, 3, 5
ACCEPTANCE_TWO_S = (1, 2, 3, 4, 6, 10)


@lru_cache(maxsize=None)
def standard_quorum(two_s: int) -> Quorum:
    return build_quorum(standard_directions(two_s))


def perturbed_quorum(two_s: int, eps: float, rng: np.random.Generator) -> Quorum:
    """Standard quorum with eps times a random Hermitian matrix added to every dual."""
    q = standard_quorum(two_s)
    noise = rng.standard_normal(q.duals.shape) + 1j * rng.standard_normal(q.duals.shape)
    noise = 0.5 * (noise + np.conj(np.swapaxes(noise, 1, 2)))
    return dataclasses.replace(q, duals=q.duals + eps * noise)


def random_direction(rng: np.random.Generator) -> Direction:
    return Direction.from_vector(rng.standard_normal(3))


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    return HermitianOperator.random(dim, rng)


def unit_norm(op: HermitianOperator) -> HermitianOperator:
    return op.scaled(1.0 / np.linalg.norm(op.matrix, 2))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
