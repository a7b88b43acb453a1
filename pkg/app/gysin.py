"""
Homology of principal circle bundles over tori via the Gysin sequence.

In homology the sequence reads

    H_3(B) --e--> H_1(B) --> H_2(P) --> H_2(B) --e--> H_0(B)

so H_2(P) is the annihilator of e in H_2(B) (lifted tori) plus H_1(B) modulo
the image of capping with e (fiber classes L_iF). That image is the
annihilator of ker(e ^ : H^1 -> H^3).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

from app.errors import (
    DegreeMismatchError,
    DimensionMismatchError,
    InconsistentModelError,
    InconsistentScenarioError,
    UnsupportedDegreeError,
)
from app.exact_linalg import ZERO, RationalMatrix, as_fraction, kernel_basis, rank, solve
from app.labels import (
    LabelKind,
    LabeledSpace,
    combination_lift,
    fiber_class,
    format_level,
    level_torus,
    point,
    sphere_fiber,
    sphere_section,
)
from app.torus_forms import (
    Cycle,
    Form,
    annihilator,
    annihilator_cycles,
    basis_tuples,
    forms_from_subspace,
    pair,
    pairing_matrix,
    sigma,
    wedge_map_matrix,
)

logger = logging.getLogger(__name__)

MAX_DEGREE = 2


@dataclass(frozen=True)
class CircleBundle:
    n: int
    euler: Form
    level: Fraction = Fraction(0)

    def __post_init__(self):
        if self.euler.degree != 2:
            raise DegreeMismatchError("the Euler class of a circle bundle has degree 2")
        if self.euler.n != self.n:
            raise DimensionMismatchError(
                f"Euler class lives on T^{self.euler.n}, base is T^{self.n}"
            )
        if any(c.denominator != 1 for _, c in self.euler.terms):
            raise InconsistentScenarioError(
                f"Euler class {self.euler.render()} is not integral"
            )
        object.__setattr__(self, "level", as_fraction(self.level))

    @property
    def level_label(self):
        return f"s={format_level(self.level)}"

    @property
    def is_trivial(self):
        return self.euler.is_zero()


def _check_degree(degree):
    if degree < 0 or degree > MAX_DEGREE:
        raise UnsupportedDegreeError(f"H_{degree} of a level set is not computed")


def liftable_tori(bundle):
    """Index pairs (i, j) over which the bundle is trivial."""
    return [
        indices
        for indices in basis_tuples(bundle.n, 2)
        if pair(bundle.euler, Cycle.basis(bundle.n, *indices)) == 0
    ]


def lifted_cycles(bundle):
    """Echelon basis of the 2-cycles of the base that lift to the total space."""
    return annihilator_cycles([bundle.euler], 2, bundle.n)


def fiber_relations(bundle):
    """1-cycles L with L x fiber = 0 in H_2(P), as a list of Cycles."""
    kernel = kernel_basis(wedge_map_matrix(bundle.euler, 1))
    forms = forms_from_subspace(kernel, bundle.n, 1)
    if not forms:
        return [Cycle.basis(bundle.n, i) for i in range(1, bundle.n + 1)]
    return annihilator_cycles(forms, 1, bundle.n)


def _lift_label(cycle, level):
    if len(cycle.terms) == 1 and cycle.terms[0][1] == 1:
        return level_torus(cycle.terms[0][0], level)
    return combination_lift(cycle, level)


def bundle_homology(bundle, degree):
    """H_degree of the total space, presented by named generators."""
    _check_degree(degree)
    n, s = bundle.n, bundle.level
    if degree == 0:
        return LabeledSpace.build(0, [point(s)])

    if degree == 1:
        labels = [level_torus((i,), s) for i in range(1, n + 1)]
        labels.append(fiber_class(None, s))
        relations = []
        if not bundle.is_trivial:
            relations.append(tuple(ZERO if k < n else Fraction(1) for k in range(n + 1)))
        space = LabeledSpace.build(1, labels, relations)
    else:
        lifts = [_lift_label(c, s) for c in lifted_cycles(bundle)]
        fibers = [fiber_class(i, s) for i in range(1, n + 1)]
        offset = len(lifts)
        relations = []
        for cycle in fiber_relations(bundle):
            row = [ZERO] * (offset + n)
            for k, c in enumerate(cycle.to_vector()):
                row[offset + k] = c
            relations.append(tuple(row))
        space = LabeledSpace.build(2, lifts + fibers, relations)

    logger.debug(
        "level %s: H_%d has %d labels, rank %d",
        bundle.level_label,
        degree,
        len(space.labels),
        space.rank,
    )
    return space


def fiber_class_image(bundle, index, space=None):
    """Image of L_index x fiber in H_2, as a coordinate vector (zero when it dies)."""
    if index < 1 or index > bundle.n:
        raise DimensionMismatchError(f"index {index} outside 1..{bundle.n}")
    space = space or bundle_homology(bundle, 2)
    vector = space.vector(fiber_class(index, bundle.level))
    if space.is_zero(vector):
        return tuple(ZERO for _ in vector)
    return vector


class LevelHomology:
    """H_0, H_1, H_2 of one regular level set, with lookups by base cycle."""

    def __init__(self, bundle):
        self.bundle = bundle
        self.spaces = {d: bundle_homology(bundle, d) for d in range(MAX_DEGREE + 1)}

    @property
    def level(self):
        return self.bundle.level

    @property
    def n(self):
        return self.bundle.n

    def space(self, degree):
        _check_degree(degree)
        return self.spaces[degree]

    def ranks(self):
        return tuple(self.spaces[d].rank for d in range(MAX_DEGREE + 1))

    def lift_labels(self):
        return [
            label
            for label in self.spaces[2].labels
            if label.kind in (LabelKind.LEVEL_TORUS, LabelKind.COMBINATION_LIFT)
        ]

    def vector_for_cycle(self, cycle):
        """Coordinates of the lift of a base cycle, in this level's labels."""
        space = self.space(cycle.degree)
        if cycle.degree == 0:
            return space.vector(space.labels[0], cycle.coefficient(()))
        if cycle.degree == 1:
            coords = list(cycle.to_vector()) + [ZERO]
            return tuple(coords)
        lifts = self.lift_labels()
        columns = [label.base_cycle(self.n).to_vector() for label in lifts]
        matrix = RationalMatrix.from_columns(columns, len(basis_tuples(self.n, 2)))
        solution = solve(matrix, cycle.to_vector())
        if solution is None:
            raise InconsistentModelError(
                f"{cycle.render()} does not lift to the level {self.bundle.level_label}"
            )
        return tuple(solution) + (ZERO,) * (len(space.labels) - len(lifts))

    def exactness_audit(self, degree):
        """Rank of H_degree against the rank the Gysin sequence forces."""
        n, euler = self.n, self.bundle.euler
        if degree == 0:
            expected = 1
        elif degree == 1:
            expected = n + (1 if self.bundle.is_trivial else 0)
        else:
            lifted = len(basis_tuples(n, 2)) - rank(pairing_matrix([euler], n, 2))
            expected = lifted + n - rank(wedge_map_matrix(euler, 1))
        actual = self.space(degree).rank
        return (
            f"level@{format_level(self.level)} exactness H_{degree}",
            actual == expected,
            f"rank {actual}, Gysin sequence gives {expected}",
        )

    def lifts(self, cycle):
        return bool(
            cycle.degree != 2
            or annihilator([self.bundle.euler], 2, self.n).contains(cycle.to_vector())
        )


def base_projection(space, n):
    """Matrix of the projection H_d(space) -> H_d(T^n) in label coordinates."""
    width = len(basis_tuples(n, space.degree))
    columns = []
    for label in space.labels:
        cycle = label.base_cycle(n)
        if cycle is None or cycle.degree != space.degree:
            columns.append((ZERO,) * width)
        else:
            columns.append(cycle.to_vector())
    return RationalMatrix.from_columns(columns, width)


def sphere_bundle_homology(c1, degree, side, level, indices):
    """Homology of the unit normal circle bundle over a fixed 2-torus.

    The base is the fixed torus with coordinates ``indices = (k, l)``; the
    Euler class is c1 times its area form.
    """
    _check_degree(degree)
    k, l = indices
    bundle = CircleBundle(2, Fraction(c1) * sigma(2, 1, 2), level)
    raw = bundle_homology(bundle, degree)
    rename = {1: k, 2: l}
    labels = []
    for label in raw.labels:
        if label.kind is LabelKind.POINT:
            labels.append(point(level, "ptS", side))
        elif label.kind is LabelKind.LEVEL_TORUS:
            labels.append(
                sphere_section(tuple(rename[i] for i in label.indices), level, side)
            )
        elif label.kind is LabelKind.FIBER_CLASS:
            index = rename[label.indices[0]] if label.indices else None
            labels.append(sphere_fiber(index, level, side))
        else:
            raise InconsistentModelError(f"unexpected label {label.display} over T^2")
    return LabeledSpace(degree, tuple(labels), raw.relations)
