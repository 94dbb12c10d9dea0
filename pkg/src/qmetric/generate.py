"""Deterministic example builders: circle and interval nets, random planar
spaces, and random algebra data, all driven by a caller-supplied Generator."""

from __future__ import annotations

import math

import numpy as np

from .algebra import Algebra, AlgElement, AlgState, vector_state
from .errors import InputError
from .funcspace import MatrixFunction
from .metric import FiniteMetricSpace, diameter, scale
from .states import FunctionalState, delta_embed


def circle_net(n: int, metric: str = "chord", radius: float = 1.0) -> FiniteMetricSpace:
    """n equally spaced points on a circle, chord or arc distances."""
    if n < 1:
        raise InputError("a circle net needs at least one point")
    if metric not in ("chord", "arc"):
        raise InputError("circle metric must be 'chord' or 'arc'")
    if radius <= 0:
        raise InputError("the radius must be positive")
    angles = 2.0 * math.pi * np.arange(n) / n
    gap = np.abs(angles[:, None] - angles[None, :])
    gap = np.minimum(gap, 2.0 * math.pi - gap)
    if metric == "chord":
        dist = 2.0 * radius * np.sin(gap / 2.0)
    else:
        dist = radius * gap
    labels = tuple("c%d" % i for i in range(n))
    return FiniteMetricSpace(labels, dist)


def interval_net(n: int, length: float = 1.0) -> FiniteMetricSpace:
    """n equally spaced points on a segment of the given length."""
    if n < 1:
        raise InputError("an interval net needs at least one point")
    if length <= 0:
        raise InputError("the length must be positive")
    xs = np.linspace(0.0, length, n) if n > 1 else np.zeros(1)
    dist = np.abs(xs[:, None] - xs[None, :])
    labels = tuple("t%d" % i for i in range(n))
    return FiniteMetricSpace(labels, dist)


def random_planar_space(n: int, rng: np.random.Generator,
                        box: float = 1.0) -> FiniteMetricSpace:
    """n random points in a square with Euclidean distances.

    Resamples until all pairwise distances clear a small floor, so the
    result always validates as a metric space.
    """
    if n < 1:
        raise InputError("need at least one point")
    floor = 1e-3 * box
    for _ in range(100):
        pts = rng.uniform(0.0, box, size=(n, 2))
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        off = dist[~np.eye(n, dtype=bool)]
        if n == 1 or off.min() > floor:
            labels = tuple("p%d" % i for i in range(n))
            return FiniteMetricSpace(labels, dist)
    raise ArithmeticError("could not place %d sufficiently separated points" % n)


def scaled_to_diameter(space: FiniteMetricSpace, target: float) -> FiniteMetricSpace:
    """Rescale so the largest distance equals target."""
    diam = diameter(space)
    if diam <= 0:
        raise InputError("cannot rescale a single-point space")
    return scale(space, target / diam)


def random_algebra(rng: np.random.Generator, max_blocks: int = 3,
                   max_block: int = 5) -> Algebra:
    n_blocks = int(rng.integers(1, max_blocks + 1))
    sizes = tuple(int(rng.integers(1, max_block + 1)) for _ in range(n_blocks))
    return Algebra(sizes)


def random_sa_element(algebra: Algebra, rng: np.random.Generator,
                      scale_: float = 1.0) -> AlgElement:
    blocks = []
    for m in algebra.block_sizes:
        z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        blocks.append(scale_ * (z + z.conj().T) / 2.0)
    return AlgElement(algebra, tuple(blocks))


def random_element(algebra: Algebra, rng: np.random.Generator,
                   scale_: float = 1.0) -> AlgElement:
    blocks = []
    for m in algebra.block_sizes:
        z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        blocks.append(scale_ * z)
    return AlgElement(algebra, tuple(blocks))


def random_sa_function(space: FiniteMetricSpace, algebra: Algebra,
                       rng: np.random.Generator) -> MatrixFunction:
    values = tuple(random_sa_element(algebra, rng) for _ in range(space.size))
    return MatrixFunction(space, algebra, values)


def random_alg_state(algebra: Algebra, rng: np.random.Generator) -> AlgState:
    """Random block weights and random full-rank-ish density matrices."""
    weights = rng.dirichlet(np.ones(algebra.n_blocks))
    densities = []
    for m in algebra.block_sizes:
        g = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        rho = g @ g.conj().T
        densities.append(rho / np.trace(rho).real)
    return AlgState(tuple(float(w) for w in weights), tuple(densities))


def random_product_state(space: FiniteMetricSpace, algebra: Algebra,
                         rng: np.random.Generator) -> FunctionalState:
    x = int(rng.integers(0, space.size))
    return delta_embed(random_alg_state(algebra, rng), x)


def random_pure_state(space: FiniteMetricSpace, algebra: Algebra,
                      rng: np.random.Generator) -> FunctionalState:
    """A vector state at a random block, composed with a point evaluation."""
    x = int(rng.integers(0, space.size))
    k = int(rng.integers(0, algebra.n_blocks))
    m = algebra.block_sizes[k]
    vec = rng.normal(size=m) + 1j * rng.normal(size=m)
    vec = vec / np.linalg.norm(vec)
    return delta_embed(vector_state(algebra, k, vec), x)
