"""States on matrix-valued function spaces as weighted point evaluations."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Algebra, AlgState, apply_state, tracial_state, TAU_STATE
from .errors import InputError


@dataclass(frozen=True, eq=False)
class FunctionalState:
    """A convex combination of algebra states composed with point evaluations.

    Every pure state of the function space has this shape with a single
    term, so convex combinations of terms cover everything this library
    needs to evaluate or transport.
    """

    terms: tuple[tuple[float, int, AlgState], ...]

    def __post_init__(self):
        if not self.terms:
            raise InputError("a functional state needs at least one term")
        cleaned = []
        total = 0.0
        for w, x, phi in self.terms:
            w = float(w)
            x = int(x)
            if w < -TAU_STATE or w > 1.0 + TAU_STATE:
                raise InputError("term weights must lie in [0, 1]")
            if x < 0:
                raise InputError("point indices must be nonnegative")
            if not isinstance(phi, AlgState):
                raise InputError("each term needs an AlgState")
            total += w
            cleaned.append((w, x, phi))
        if abs(total - 1.0) > TAU_STATE:
            raise InputError("term weights must sum to 1, got %.12g" % total)
        object.__setattr__(self, "terms", tuple(cleaned))

    def support(self) -> list[int]:
        """Sorted point indices carrying nonzero weight."""
        return sorted({x for w, x, _ in self.terms if w > 0.0})

    def max_point(self) -> int:
        return max(x for _, x, _ in self.terms)

    def to_json_dict(self, labels) -> dict:
        return {"terms": [{"w": w, "x": str(labels[x]), "phi": phi.to_json_dict()}
                          for w, x, phi in self.terms]}

    @classmethod
    def from_json_dict(cls, data: dict, labels) -> "FunctionalState":
        if not isinstance(data, dict) or "terms" not in data:
            raise InputError("functional state JSON must carry 'terms'")
        index = {str(lab): i for i, lab in enumerate(labels)}
        terms = []
        for term in data["terms"]:
            try:
                w, x, phi = term["w"], term["x"], term["phi"]
            except (TypeError, KeyError) as exc:
                raise InputError("each term needs 'w', 'x', and 'phi'") from exc
            if str(x) not in index:
                raise InputError("term point %r is not a label of the space" % (x,))
            terms.append((float(w), index[str(x)], AlgState.from_json_dict(phi)))
        return cls(tuple(terms))


def delta_embed(phi: AlgState, x: int) -> FunctionalState:
    """The state reading phi at the single point x."""
    return FunctionalState(((1.0, int(x), phi),))


def tracial_functional(algebra: Algebra, v, x: int) -> FunctionalState:
    """The block-weighted trace at a point, as a functional state."""
    return delta_embed(tracial_state(algebra, v), x)


def mix(weighted_states) -> FunctionalState:
    """Convex combination of functional states; weights must sum to 1."""
    terms = []
    for weight, state in weighted_states:
        for w, x, phi in state.terms:
            terms.append((float(weight) * w, x, phi))
    return FunctionalState(tuple(terms))


def evaluate(state: FunctionalState, fn) -> complex:
    """Apply a functional state to a matrix function.

    The value is the weighted sum over terms of the algebra state applied
    to the function's value at the term's point.
    """
    n = len(fn.values)
    total = 0j
    for w, x, phi in state.terms:
        if x >= n:
            raise InputError("state point index %d beyond the function's space" % x)
        total += w * apply_state(phi, fn.values[x])
    return complex(total)
