"""Finite direct sums of complex matrix blocks: elements, norms, and states.

An algebra here is always a finite direct sum of full matrix algebras over
the complex numbers, described by its list of block sizes.  Elements carry
one square complex matrix per block.  Three norms are provided: the C*-norm
(largest singular value), the entrywise max-modulus norm, and the entrywise
real/imaginary max norm on self-adjoint elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

TAU_EIG = 1e-11   # Jacobi stops once relative off-diagonal mass falls below this
TAU_SA = 1e-9     # self-adjointness slack
TAU_STATE = 1e-8  # state validity slack

NORM_KINDS = ("operator", "max", "real_max")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Algebra:
    """A direct sum of full complex matrix algebras, one block per size."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        if any(m != int(m) for m in self.block_sizes):
            raise InputError("block sizes must be integers, got %r"
                             % (self.block_sizes,))
        sizes = tuple(int(m) for m in self.block_sizes)
        if not sizes:
            raise InputError("an algebra needs at least one block")
        if min(sizes) < 1:
            raise InputError("block sizes must be positive, got %r" % (sizes,))
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def max_block(self) -> int:
        """Largest block size; controls every norm-equivalence constant."""
        return max(self.block_sizes)

    def identity(self) -> "AlgElement":
        return AlgElement(self, tuple(np.eye(m, dtype=complex) for m in self.block_sizes))

    def zero(self) -> "AlgElement":
        return AlgElement(self, tuple(np.zeros((m, m), dtype=complex) for m in self.block_sizes))

    def scalar(self, lam: complex) -> "AlgElement":
        """The element lam times the identity in every block."""
        return AlgElement(self, tuple(lam * np.eye(m, dtype=complex) for m in self.block_sizes))

    def to_json_dict(self) -> dict:
        return {"blocks": list(self.block_sizes)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Algebra":
        if not isinstance(data, dict) or "blocks" not in data:
            raise InputError("algebra JSON must be an object with a 'blocks' list")
        return cls(tuple(data["blocks"]))


def _matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat, dtype=complex)]


def _matrix_from_json(rows) -> np.ndarray:
    try:
        arr = np.array([[complex(entry[0], entry[1]) for entry in row] for row in rows])
    except (TypeError, IndexError) as exc:
        raise InputError("matrix JSON must be rows of [re, im] pairs") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError("matrix JSON must be square, got shape %r" % (arr.shape,))
    return arr


@dataclass(frozen=True, eq=False)
class AlgElement:
    """One square complex matrix per block of an Algebra."""

    algebra: Algebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        sizes = self.algebra.block_sizes
        if len(self.blocks) != len(sizes):
            raise InputError(
                "element has %d blocks, algebra has %d" % (len(self.blocks), len(sizes)))
        mats = []
        for m, blk in zip(sizes, self.blocks):
            arr = np.array(blk, dtype=complex)
            if arr.shape != (m, m):
                raise InputError("block must be %dx%d, got %r" % (m, m, arr.shape))
            mats.append(_frozen(arr))
        object.__setattr__(self, "blocks", tuple(mats))

    def adjoint(self) -> "AlgElement":
        return AlgElement(self.algebra, tuple(b.conj().T for b in self.blocks))

    def is_self_adjoint(self, tol: float = TAU_SA) -> bool:
        return all(np.abs(b - b.conj().T).max() <= tol for b in self.blocks)

    def __add__(self, other: "AlgElement") -> "AlgElement":
        _check_same_algebra(self, other)
        return AlgElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        _check_same_algebra(self, other)
        return AlgElement(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self) -> "AlgElement":
        return AlgElement(self.algebra, tuple(-b for b in self.blocks))

    def __matmul__(self, other: "AlgElement") -> "AlgElement":
        _check_same_algebra(self, other)
        return AlgElement(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def scaled(self, lam: complex) -> "AlgElement":
        return AlgElement(self.algebra, tuple(lam * b for b in self.blocks))

    def to_json_dict(self) -> list:
        return [_matrix_to_json(b) for b in self.blocks]

    @classmethod
    def from_json_dict(cls, algebra: Algebra, data) -> "AlgElement":
        if not isinstance(data, list):
            raise InputError("element JSON must be a list of block matrices")
        return cls(algebra, tuple(_matrix_from_json(b) for b in data))


def _check_same_algebra(a: AlgElement, b: AlgElement) -> None:
    if a.algebra.block_sizes != b.algebra.block_sizes:
        raise InputError("elements belong to different algebras")


def require_self_adjoint(a: AlgElement, tol: float = TAU_SA) -> None:
    if not a.is_self_adjoint(tol):
        raise InputError("operation needs a self-adjoint element")


def jordan(a: AlgElement, b: AlgElement) -> AlgElement:
    """Jordan product (ab + ba)/2; self-adjoint whenever a and b are."""
    return (a @ b + b @ a).scaled(0.5)


def lie(a: AlgElement, b: AlgElement) -> AlgElement:
    """Lie product (ab - ba)/(2i); self-adjoint whenever a and b are."""
    return (a @ b - b @ a).scaled(-0.5j)


def matrix_unit(algebra: Algebra, k: int, p: int, q: int) -> AlgElement:
    """The element with a single 1 at row p, column q of block k.

    Blocks are indexed from 0 and entries from 1, so p and q run from 1 to
    the size of block k.
    """
    if not 0 <= k < algebra.n_blocks:
        raise InputError("block index %d out of range" % k)
    m = algebra.block_sizes[k]
    if not (1 <= p <= m and 1 <= q <= m):
        raise InputError("entry (%d,%d) out of range for a %dx%d block" % (p, q, m, m))
    blocks = [np.zeros((s, s), dtype=complex) for s in algebra.block_sizes]
    blocks[k][p - 1, q - 1] = 1.0
    return AlgElement(algebra, tuple(blocks))


def hermitian_eigenvalues(mat: np.ndarray, tol: float = TAU_EIG) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation conjugates by the exact eigenbasis of the 2x2 pivot
    block, which annihilates that entry.  Sweeps continue until the
    off-diagonal Frobenius mass is at most tol times the total mass.

    Args:
      mat: square Hermitian ndarray, up to roundoff; the sweep
        re-symmetrises to contain drift.
      tol: relative off-diagonal mass at which the iteration stops.

    Returns:
      Eigenvalues in ascending order.
    """
    a = np.array(mat, dtype=complex)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise InputError("eigenvalue iteration needs a square matrix")
    drift = np.abs(a - a.conj().T).max()
    if drift > 1e-8 * max(1.0, np.abs(a).max()):
        raise InputError("eigenvalue iteration needs a Hermitian matrix")
    if n == 1:
        return np.array([a[0, 0].real])
    # work at unit scale so squared entries can neither under- nor overflow
    scale = float(np.abs(a).max())
    if scale == 0.0 or not math.isfinite(scale):
        if scale == 0.0:
            return np.zeros(n)
        raise InputError("eigenvalue iteration needs finite entries")
    a = a / scale
    total = np.linalg.norm(a)
    for _ in range(100):
        stripped = a.copy()
        np.fill_diagonal(stripped, 0.0)
        if np.linalg.norm(stripped) <= tol * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                if abs(g) <= 1e-18 * total:
                    continue
                # Eigenvectors of [[alpha, g], [conj(g), beta]]: the plus
                # eigenvector is (g, rho - delta); the stable form of
                # rho - delta avoids cancellation when delta > 0.
                delta = (a[p, p].real - a[q, q].real) / 2.0
                rho = math.hypot(delta, abs(g))
                u2 = abs(g) ** 2 / (rho + delta) if delta >= 0.0 else rho - delta
                nrm = math.sqrt(abs(g) ** 2 + u2 * u2)
                jpp, jpq = g / nrm, -u2 / nrm
                jqp, jqq = u2 / nrm, np.conj(g) / nrm
                colp = a[:, p] * jpp + a[:, q] * jqp
                colq = a[:, p] * jpq + a[:, q] * jqq
                a[:, p], a[:, q] = colp, colq
                rowp = np.conj(jpp) * a[p, :] + np.conj(jqp) * a[q, :]
                rowq = np.conj(jpq) * a[p, :] + np.conj(jqq) * a[q, :]
                a[p, :], a[q, :] = rowp, rowq
        a = 0.5 * (a + a.conj().T)
    else:
        raise ArithmeticError("Jacobi iteration did not converge in 100 sweeps")
    return np.sort(np.diag(a).real) * scale


def op_norm(a: AlgElement, tol: float = TAU_EIG) -> float:
    """C*-norm: the largest singular value over all blocks."""
    best = 0.0
    for blk in a.blocks:
        evs = hermitian_eigenvalues(blk.conj().T @ blk, tol)
        best = max(best, math.sqrt(max(float(evs[-1]), 0.0)))
    return best


def max_norm(a: AlgElement) -> float:
    """Largest modulus of any entry in any block."""
    return max(float(np.abs(blk).max()) for blk in a.blocks)


def real_max_norm(a: AlgElement, tol: float = TAU_SA) -> float:
    """Largest of |Re| and |Im| over all entries; a norm on self-adjoint elements only."""
    require_self_adjoint(a, tol)
    best = 0.0
    for blk in a.blocks:
        best = max(best, float(np.abs(blk.real).max()), float(np.abs(blk.imag).max()))
    return best


def diag_entries(a: AlgElement) -> np.ndarray:
    """Diagonal entries of all blocks, concatenated."""
    return np.concatenate([np.diag(blk) for blk in a.blocks])


def offdiag_max_modulus(a: AlgElement) -> float:
    """Largest modulus among strictly off-diagonal entries; 0 when there are none."""
    best = 0.0
    for blk in a.blocks:
        m = blk.shape[0]
        if m < 2:
            continue
        mask = ~np.eye(m, dtype=bool)
        best = max(best, float(np.abs(blk[mask]).max()))
    return best


def offdiag_real_max(a: AlgElement) -> float:
    """Entrywise real/imaginary max over off-diagonal entries plus diagonal imaginary parts.

    This is exactly the part of the real max norm that a real multiple of
    the identity cannot move.
    """
    best = 0.0
    for blk in a.blocks:
        m = blk.shape[0]
        best = max(best, float(np.abs(np.diag(blk).imag).max()))
        if m < 2:
            continue
        mask = ~np.eye(m, dtype=bool)
        off = blk[mask]
        best = max(best, float(np.abs(off.real).max()), float(np.abs(off.imag).max()))
    return best


def _circumcentre(z1: complex, z2: complex, z3: complex):
    ax, ay = (z2 - z1).real, (z2 - z1).imag
    bx, by = (z3 - z1).real, (z3 - z1).imag
    det = 2.0 * (ax * by - ay * bx)
    scale = max(abs(ax) + abs(ay), abs(bx) + abs(by), 1e-300)
    if abs(det) <= 1e-14 * scale * scale:
        return None
    r1 = ax * ax + ay * ay
    r2 = bx * bx + by * by
    cx = (by * r1 - ay * r2) / det
    cy = (ax * r2 - bx * r1) / det
    return z1 + complex(cx, cy)


def min_enclosing_radius(points) -> tuple[float, complex]:
    """Radius and centre of the smallest circle containing the given points.

    The optimal centre is a midpoint of two points or the circumcentre of
    three, so all such candidates are enumerated and the one whose maximal
    distance to the set is smallest wins.  Point counts here are tiny.
    """
    zs = np.unique(np.asarray(points, dtype=complex).ravel())
    if zs.size == 0:
        raise InputError("enclosing circle of an empty point set")
    if zs.size == 1:
        return 0.0, complex(zs[0])
    cands = []
    n = zs.size
    for i in range(n):
        for j in range(i + 1, n):
            cands.append(0.5 * (zs[i] + zs[j]))
            for k in range(j + 1, n):
                c = _circumcentre(zs[i], zs[j], zs[k])
                if c is not None:
                    cands.append(c)
    best_r, best_c = math.inf, 0j
    for c in cands:
        r = float(np.abs(zs - c).max())
        if r < best_r:
            best_r, best_c = r, c
    return best_r, complex(best_c)


def dist_to_scalars(a: AlgElement, norm_kind: str, tol: float = TAU_SA) -> float:
    """Distance from an element to the scalar multiples of the identity.

    Kind "operator" uses the closed spectral form (max - min)/2 over the
    joint spectrum and needs a self-adjoint input; "max" solves a smallest
    enclosing circle over the pooled diagonal entries; "real_max" uses the
    diagonal spread closed form and also needs a self-adjoint input.
    """
    if norm_kind not in NORM_KINDS:
        raise InputError("unknown norm kind %r" % (norm_kind,))
    if norm_kind == "operator":
        require_self_adjoint(a, tol)
        evs = np.concatenate([hermitian_eigenvalues(blk) for blk in a.blocks])
        return 0.5 * (float(evs.max()) - float(evs.min()))
    if norm_kind == "max":
        radius, _ = min_enclosing_radius(diag_entries(a))
        return max(offdiag_max_modulus(a), radius)
    require_self_adjoint(a, tol)
    re_diag = diag_entries(a).real
    spread = 0.5 * (float(re_diag.max()) - float(re_diag.min()))
    return max(offdiag_real_max(a), spread)


@dataclass(frozen=True, eq=False)
class AlgState:
    """A state given by block weights plus one density matrix per block."""

    weights: tuple[float, ...]
    densities: tuple[np.ndarray, ...]
    tol: float = field(default=TAU_STATE, compare=False)

    def __post_init__(self):
        w = tuple(float(t) for t in self.weights)
        if len(w) != len(self.densities):
            raise InputError("need one density per block weight")
        if min(w) < -self.tol:
            raise InputError("block weights must be nonnegative")
        if abs(sum(w) - 1.0) > self.tol:
            raise InputError("block weights must sum to 1, got %.12g" % sum(w))
        mats = []
        for rho in self.densities:
            arr = np.array(rho, dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise InputError("densities must be square matrices")
            if np.abs(arr - arr.conj().T).max() > self.tol:
                raise InputError("densities must be Hermitian")
            if abs(np.trace(arr) - 1.0) > self.tol:
                raise InputError("densities must have trace 1")
            if float(hermitian_eigenvalues(arr)[0]) < -self.tol:
                raise InputError("densities must be positive semidefinite")
            mats.append(_frozen(arr))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "densities", tuple(mats))

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(rho.shape[0] for rho in self.densities)

    def to_json_dict(self) -> dict:
        return {
            "weights": [float(t) for t in self.weights],
            "densities": [_matrix_to_json(rho) for rho in self.densities],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AlgState":
        if not isinstance(data, dict) or "weights" not in data or "densities" not in data:
            raise InputError("state JSON must carry 'weights' and 'densities'")
        return cls(tuple(data["weights"]), tuple(_matrix_from_json(m) for m in data["densities"]))


def tracial_state(algebra: Algebra, v) -> AlgState:
    """The block-weighted normalised trace with weight vector v."""
    w = tuple(float(t) for t in v)
    if len(w) != algebra.n_blocks:
        raise InputError("weight vector length must match the block count")
    densities = tuple(np.eye(m, dtype=complex) / m for m in algebra.block_sizes)
    return AlgState(w, densities)


def vector_state(algebra: Algebra, k: int, vec) -> AlgState:
    """The pure state living on block k given by a unit vector."""
    if not 0 <= k < algebra.n_blocks:
        raise InputError("block index %d out of range" % k)
    v = np.asarray(vec, dtype=complex).ravel()
    m = algebra.block_sizes[k]
    if v.size != m:
        raise InputError("vector length %d does not match block size %d" % (v.size, m))
    nrm = float(np.linalg.norm(v))
    if nrm <= 0.0:
        raise InputError("vector state needs a nonzero vector")
    v = v / nrm
    weights = tuple(1.0 if i == k else 0.0 for i in range(algebra.n_blocks))
    densities = []
    for i, m_i in enumerate(algebra.block_sizes):
        if i == k:
            densities.append(np.outer(v, v.conj()))
        else:
            densities.append(np.eye(m_i, dtype=complex) / m_i)
    return AlgState(weights, tuple(densities))


def check_state_shapes(phi: AlgState, algebra: Algebra) -> None:
    if phi.block_sizes() != algebra.block_sizes:
        raise InputError("state block sizes %r do not match algebra %r"
                         % (phi.block_sizes(), algebra.block_sizes))


def apply_state(phi: AlgState, a: AlgElement) -> complex:
    """Evaluate a state on an element by the weighted trace pairing."""
    check_state_shapes(phi, a.algebra)
    total = 0j
    for t, rho, blk in zip(phi.weights, phi.densities, a.blocks):
        total += t * np.trace(rho @ blk)
    return complex(total)


def matrix_unit_l1(phi: AlgState) -> float:
    """Sum of the moduli of the state's values on every matrix unit.

    Evaluating on the unit at (p, q) of block k reads the (q, p) entry of
    that block's density, so the sum is the weighted entrywise l1 mass of
    the densities.  It is exactly 1 for every tracial state.
    """
    return float(sum(t * np.abs(rho).sum() for t, rho in zip(phi.weights, phi.densities)))
