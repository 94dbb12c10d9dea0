"""Matrix-valued functions on finite metric spaces and their seminorm family.

Every seminorm is a max of two parts: a Lipschitz part, the worst normed
difference quotient over point pairs, and a quotient-type part selected by
the spec's q kind, which measures how far the function is from scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import algebra as alg
from .algebra import Algebra, AlgElement, TAU_SA
from .errors import InputError, UnsupportedSpec
from .metric import FiniteMetricSpace
from .states import FunctionalState, evaluate

Q_KINDS = ("quotient_CX", "quotient_C", "state", "conv", "conv_K")

# q kinds whose unit ball is a polytope in the real entry coordinates
LP_EXACT_Q_KINDS = ("quotient_C", "state", "conv", "conv_K")


@dataclass(frozen=True, eq=False)
class MatrixFunction:
    """One algebra element per point of a finite metric space."""

    space: FiniteMetricSpace
    algebra: Algebra
    values: tuple[AlgElement, ...]

    def __post_init__(self):
        if len(self.values) != self.space.size:
            raise InputError("need one value per point, got %d for %d points"
                             % (len(self.values), self.space.size))
        for val in self.values:
            if val.algebra.block_sizes != self.algebra.block_sizes:
                raise InputError("value block sizes do not match the algebra")
        object.__setattr__(self, "values", tuple(self.values))

    def is_self_adjoint(self, tol: float = TAU_SA) -> bool:
        return all(v.is_self_adjoint(tol) for v in self.values)

    def entry_values(self, block: int, j: int, k: int) -> np.ndarray:
        """The complex entry (j, k) of one block, sampled over all points (0-based)."""
        return np.array([v.blocks[block][j, k] for v in self.values])

    def to_json_dict(self) -> dict:
        return {
            "space": self.space.to_json_dict(),
            "algebra": self.algebra.to_json_dict(),
            "values": [v.to_json_dict() for v in self.values],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MatrixFunction":
        if not isinstance(data, dict):
            raise InputError("matrix function JSON must be an object")
        for key in ("space", "algebra", "values"):
            if key not in data:
                raise InputError("matrix function JSON is missing %r" % key)
        space = FiniteMetricSpace.from_json_dict(data["space"])
        algebra = Algebra.from_json_dict(data["algebra"])
        values = tuple(AlgElement.from_json_dict(algebra, v) for v in data["values"])
        return cls(space, algebra, values)


@dataclass(frozen=True, eq=False)
class SeminormSpec:
    """Choice of norm kind and quotient-type term for the seminorm family.

    norm_kind is one of "operator", "max", "real_max".  q_kind is one of
    "quotient_CX" (pointwise distance to scalars), "quotient_C" (one global
    scalar), "state" (recentre by a reference state), "conv" (one global
    real scalar under the real max norm), or "conv_K" (the same scaled by
    2/K).  The "real_max" and "conv"/"conv_K" choices apply to self-adjoint
    functions only.
    """

    norm_kind: str
    q_kind: str
    K: Optional[float] = None
    state: Optional[FunctionalState] = None

    def __post_init__(self):
        if self.norm_kind not in alg.NORM_KINDS:
            raise InputError("unknown norm kind %r" % (self.norm_kind,))
        if self.q_kind not in Q_KINDS:
            raise InputError("unknown q kind %r" % (self.q_kind,))
        if self.q_kind == "conv_K":
            if self.K is None or not float(self.K) > 0:
                raise InputError("conv_K needs a positive K")
            object.__setattr__(self, "K", float(self.K))
        elif self.K is not None:
            raise InputError("K only applies to the conv_K q kind")
        if self.q_kind == "state":
            if not isinstance(self.state, FunctionalState):
                raise InputError("the state q kind needs a reference state "
                                 "on the function space")
        elif self.state is not None:
            raise InputError("a reference state only applies to the state q kind")

    def lp_exact(self) -> bool:
        """Whether this spec's unit ball is an exactly LP-representable polytope."""
        return self.norm_kind == "real_max" and self.q_kind in LP_EXACT_Q_KINDS

    def describe(self) -> str:
        extra = ""
        if self.q_kind == "conv_K":
            extra = ", K=%.12g" % self.K
        if self.q_kind == "state":
            extra = ", reference state with %d terms" % len(self.state.terms)
        return "%s / %s%s" % (self.norm_kind, self.q_kind, extra)


def conv_spec() -> SeminormSpec:
    """The seminorm used throughout the approximation pipeline."""
    return SeminormSpec("real_max", "conv")


def _norm_of(elem: AlgElement, norm_kind: str, tol: float) -> float:
    if norm_kind == "operator":
        return alg.op_norm(elem)
    if norm_kind == "max":
        return alg.max_norm(elem)
    return alg.real_max_norm(elem, tol)


def sup_norm(fn: MatrixFunction, norm_kind: str = "operator", tol: float = TAU_SA) -> float:
    """Largest norm of any value; the C*-norm of the function when norm_kind is operator."""
    return max(_norm_of(v, norm_kind, tol) for v in fn.values)


def lip_part(fn: MatrixFunction, norm_kind: str, tol: float = TAU_SA) -> float:
    """Worst normed difference quotient over unordered point pairs; 0 on one point."""
    if norm_kind not in alg.NORM_KINDS:
        raise InputError("unknown norm kind %r" % (norm_kind,))
    if norm_kind == "real_max" and not fn.is_self_adjoint(tol):
        raise InputError("the real max norm applies to self-adjoint functions only")
    n = fn.space.size
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            diff = fn.values[i] - fn.values[j]
            best = max(best, _norm_of(diff, norm_kind, tol) / fn.space.dist[i, j])
    return best


def _pooled_real_max_quotient(fn: MatrixFunction, tol: float) -> float:
    """Distance to real scalars under the real max norm, pooled over all points."""
    if not fn.is_self_adjoint(tol):
        raise InputError("this quotient term applies to self-adjoint functions only")
    off = max(alg.offdiag_real_max(v) for v in fn.values)
    diags = np.concatenate([alg.diag_entries(v).real for v in fn.values])
    return max(off, 0.5 * (float(diags.max()) - float(diags.min())))


def q_term(fn: MatrixFunction, spec: SeminormSpec, tol: float = TAU_SA) -> float:
    """The quotient-type part of the seminorm selected by the spec."""
    if spec.q_kind == "quotient_CX":
        return max(alg.dist_to_scalars(v, spec.norm_kind, tol) for v in fn.values)

    if spec.q_kind == "quotient_C":
        if spec.norm_kind == "operator":
            if not fn.is_self_adjoint(tol):
                raise InputError(
                    "the one-scalar quotient under the operator norm needs a self-adjoint function")
            evs = np.concatenate([alg.hermitian_eigenvalues(blk)
                                  for v in fn.values for blk in v.blocks])
            return 0.5 * (float(evs.max()) - float(evs.min()))
        if spec.norm_kind == "max":
            off = max(alg.offdiag_max_modulus(v) for v in fn.values)
            diags = np.concatenate([alg.diag_entries(v) for v in fn.values])
            radius, _ = alg.min_enclosing_radius(diags)
            return max(off, radius)
        return _pooled_real_max_quotient(fn, tol)

    if spec.q_kind == "state":
        m = evaluate(spec.state, fn)
        if spec.norm_kind == "real_max":
            if abs(m.imag) > tol:
                raise InputError("reference state value is not real; function must be self-adjoint")
            m = m.real
        return max(_norm_of(v - fn.algebra.scalar(m), spec.norm_kind, tol) for v in fn.values)

    base = _pooled_real_max_quotient(fn, tol)
    if spec.q_kind == "conv":
        return base
    return (2.0 / spec.K) * base


def lipnorm(fn: MatrixFunction, spec: SeminormSpec, tol: float = TAU_SA) -> float:
    """Max of the Lipschitz part and the quotient-type part."""
    return max(lip_part(fn, spec.norm_kind, tol), q_term(fn, spec, tol))


def optimal_conv_shift(fn: MatrixFunction) -> float:
    """The real scalar attaining the pooled real max quotient term."""
    diags = np.concatenate([alg.diag_entries(v).real for v in fn.values])
    return 0.5 * (float(diags.max()) + float(diags.min()))


def classical_embed(space: FiniteMetricSpace, values, algebra: Algebra) -> MatrixFunction:
    """Embed a scalar function as scalar multiples of the identity."""
    vals = list(values)
    if len(vals) != space.size:
        raise InputError("need one scalar per point")
    return MatrixFunction(space, algebra, tuple(algebra.scalar(complex(v)) for v in vals))


def jordan_product(a: MatrixFunction, b: MatrixFunction) -> MatrixFunction:
    _check_compatible(a, b)
    return MatrixFunction(a.space, a.algebra,
                          tuple(alg.jordan(u, v) for u, v in zip(a.values, b.values)))


def lie_product(a: MatrixFunction, b: MatrixFunction) -> MatrixFunction:
    _check_compatible(a, b)
    return MatrixFunction(a.space, a.algebra,
                          tuple(alg.lie(u, v) for u, v in zip(a.values, b.values)))


def _check_compatible(a: MatrixFunction, b: MatrixFunction) -> None:
    if a.space.labels != b.space.labels or a.algebra.block_sizes != b.algebra.block_sizes:
        raise InputError("functions live on different spaces or algebras")


def default_leibniz_constants(spec: SeminormSpec, algebra: Algebra) -> tuple[float, float]:
    """The proven (C, D) pair for the spec's seminorm on this algebra."""
    ratio = {"operator": 1.0, "max": float(algebra.max_block),
             "real_max": math.sqrt(2.0) * algebra.max_block}[spec.norm_kind]
    if spec.q_kind in ("quotient_CX", "quotient_C"):
        return ratio, 0.0
    if spec.q_kind == "state":
        return max(ratio, 2.0), 0.0
    return math.sqrt(2.0) * algebra.max_block, 0.0


@dataclass(frozen=True)
class LeibnizReport:
    """Both sides of one product inequality check."""

    lhs: float
    rhs: float
    c_const: float
    d_const: float
    slack: float
    violated: bool


def quasi_leibniz_check(a: MatrixFunction, b: MatrixFunction, spec: SeminormSpec,
                        c_const: Optional[float] = None, d_const: Optional[float] = None,
                        slack_tol: float = 1e-9, tol: float = TAU_SA) -> LeibnizReport:
    """Check the product inequality for the Jordan and Lie products of a pair.

    Both products are formed pointwise, the seminorm of each is compared to
    C (|a| L(b) + |b| L(a)) + D L(a) L(b) with the C*-norm for the sizes,
    and the worst slack is reported.  Inputs must be self-adjoint.
    """
    if not (a.is_self_adjoint(tol) and b.is_self_adjoint(tol)):
        raise InputError("the product check applies to self-adjoint pairs")
    if c_const is None or d_const is None:
        c_default, d_default = default_leibniz_constants(spec, a.algebra)
        c_const = c_default if c_const is None else float(c_const)
        d_const = d_default if d_const is None else float(d_const)
    la, lb = lipnorm(a, spec, tol), lipnorm(b, spec, tol)
    na, nb = sup_norm(a, "operator"), sup_norm(b, "operator")
    lhs = max(lipnorm(jordan_product(a, b), spec, tol),
              lipnorm(lie_product(a, b), spec, tol))
    rhs = c_const * (na * lb + nb * la) + d_const * la * lb
    slack = rhs - lhs
    return LeibnizReport(lhs=lhs, rhs=rhs, c_const=c_const, d_const=d_const,
                         slack=slack, violated=slack < -slack_tol)
