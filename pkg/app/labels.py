"""
Named generators and the homology groups presented by them.

A ``GeneratorLabel`` names a concrete submanifold used as a homology class
(a lifted torus in a level set, a fixed torus, a sphere-bundle section, ...).
A ``LabeledSpace`` is a homology group in one degree presented as the formal
span of its labels modulo a subspace of relations.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Optional

from app.errors import DimensionMismatchError
from app.exact_linalg import (
    ONE,
    ZERO,
    RationalMatrix,
    Subspace,
    as_fraction,
    cokernel,
    member,
    unit_positions,
)
from app.torus_forms import Cycle, permutation_sign


class LabelKind(str, Enum):
    LEVEL_TORUS = "LevelTorus"
    FIBER_CLASS = "FiberClass"
    COMBINATION_LIFT = "CombinationLift"
    FIXED_TORUS = "FixedTorus"
    SPHERE_SECTION = "SphereSection"
    SPHERE_FIBER = "SphereFiber"
    GRADIENT_TORUS = "GradientTorus"
    INVARIANT_SPHERE = "InvariantSphere"
    LOOP = "Loop"
    POINT = "Point"


_KIND_ORDER = {kind: position for position, kind in enumerate(LabelKind)}

LEVEL_RESIDENT = frozenset(
    {LabelKind.LEVEL_TORUS, LabelKind.FIBER_CLASS, LabelKind.COMBINATION_LIFT}
)


def format_level(value):
    """Render an exact level: 3/2 -> '1.5', 7 -> '7', 1/3 -> '1/3'."""
    if value is None:
        return ""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    denominator = value.denominator
    twos = fives = 0
    while denominator % 2 == 0:
        denominator //= 2
        twos += 1
    while denominator % 5 == 0:
        denominator //= 5
        fives += 1
    if denominator != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    scaled = abs(value) * 10**places
    whole, frac = divmod(int(scaled), 10**places)
    sign = "-" if value < 0 else ""
    return f"{sign}{whole}.{str(frac).rjust(places, '0').rstrip('0')}"


def _digits(indices):
    return "".join(str(i) for i in indices)


def _side(side):
    return {1: "+", -1: "-"}.get(side, "")


@dataclass(frozen=True)
class GeneratorLabel:
    kind: LabelKind
    indices: tuple = ()
    level: Optional[Fraction] = None
    side: int = 0
    name: str = ""
    cycle: Optional[Cycle] = None
    level_to: Optional[Fraction] = None

    @property
    def display(self):
        level = format_level(self.level)
        if self.kind is LabelKind.LEVEL_TORUS:
            return f"L{_digits(self.indices)}^{level}"
        if self.kind is LabelKind.FIBER_CLASS:
            return f"L{_digits(self.indices)}F^{level}"
        if self.kind is LabelKind.COMBINATION_LIFT:
            return f"({self.cycle.render()})^{level}"
        if self.kind is LabelKind.FIXED_TORUS:
            return f"Z{_digits(self.indices)}^{level}"
        if self.kind is LabelKind.SPHERE_SECTION:
            return f"Z{_digits(self.indices)}^{level}{_side(self.side)}"
        if self.kind is LabelKind.SPHERE_FIBER:
            return f"Z{_digits(self.indices)}F^{level}{_side(self.side)}"
        if self.kind is LabelKind.GRADIENT_TORUS:
            if not self.indices:
                return "TF"
            return "T" + "+".join(str(i) for i in self.indices)
        if self.kind is LabelKind.INVARIANT_SPHERE:
            upper = format_level(self.level_to)
            if len(level) == 1 and len(upper) == 1:
                return f"G{level}{upper}"
            return f"G[{level},{upper}]"
        if self.kind is LabelKind.POINT:
            return f"{self.name}^{level}{_side(self.side)}"
        return self.name

    def __str__(self):
        return self.display

    @property
    def degree(self):
        if self.kind in (LabelKind.FIBER_CLASS, LabelKind.SPHERE_FIBER):
            return len(self.indices) + 1
        if self.kind in (LabelKind.GRADIENT_TORUS, LabelKind.INVARIANT_SPHERE):
            return 2
        if self.kind is LabelKind.COMBINATION_LIFT:
            return self.cycle.degree
        if self.kind is LabelKind.LOOP:
            return 1
        if self.kind is LabelKind.POINT:
            return 0
        return len(self.indices)

    def base_cycle(self, n):
        """Image under the projection to the base torus, None if undefined."""
        if self.kind in (
            LabelKind.LEVEL_TORUS,
            LabelKind.FIXED_TORUS,
            LabelKind.SPHERE_SECTION,
        ):
            return Cycle.basis(n, *self.indices)
        if self.kind is LabelKind.COMBINATION_LIFT:
            return self.cycle
        if self.kind in (LabelKind.FIBER_CLASS, LabelKind.SPHERE_FIBER):
            return Cycle(n, self.degree)
        if self.kind is LabelKind.POINT:
            return Cycle(n, 0, [((), 1)])
        return None

    def sort_key(self):
        return (
            _KIND_ORDER[self.kind],
            self.level if self.level is not None else Fraction(-1),
            self.indices,
            self.side,
            self.display,
        )


def _oriented(factory, indices, **fields):
    indices = tuple(indices)
    sign = permutation_sign(indices)
    return sign, factory(tuple(sorted(indices)), **fields)


def level_torus(indices, level):
    return GeneratorLabel(LabelKind.LEVEL_TORUS, tuple(indices), as_fraction(level))


def fiber_class(index, level):
    indices = () if index is None else (index,)
    return GeneratorLabel(LabelKind.FIBER_CLASS, indices, as_fraction(level))


def combination_lift(cycle, level):
    return GeneratorLabel(
        LabelKind.COMBINATION_LIFT, (), as_fraction(level), cycle=cycle
    )


def fixed_torus(indices, level):
    return GeneratorLabel(LabelKind.FIXED_TORUS, tuple(indices), as_fraction(level))


def sphere_section(indices, level, side):
    return GeneratorLabel(
        LabelKind.SPHERE_SECTION, tuple(indices), as_fraction(level), side
    )


def sphere_fiber(index, level, side):
    indices = () if index is None else (index,)
    return GeneratorLabel(LabelKind.SPHERE_FIBER, indices, as_fraction(level), side)


def gradient_torus(indices):
    return GeneratorLabel(LabelKind.GRADIENT_TORUS, tuple(indices))


def invariant_sphere(level_from, level_to):
    return GeneratorLabel(
        LabelKind.INVARIANT_SPHERE,
        level=as_fraction(level_from),
        level_to=as_fraction(level_to),
    )


def loop(name):
    return GeneratorLabel(LabelKind.LOOP, name=name)


def point(level, name="pt", side=0):
    return GeneratorLabel(LabelKind.POINT, (), as_fraction(level), side, name)


def oriented_level_torus(indices, level):
    """(sign, label) for a possibly unsorted torus such as L42 = -L24."""
    return _oriented(level_torus, indices, level=level)


def oriented_fixed_torus(indices, level):
    return _oriented(fixed_torus, indices, level=level)


@dataclass(frozen=True)
class Combination:
    """A finite rational combination of labels."""

    terms: tuple = ()

    @classmethod
    def from_pairs(cls, pairs):
        merged = {}
        order = []
        for label, coefficient in pairs:
            if label not in merged:
                order.append(label)
                merged[label] = ZERO
            merged[label] += as_fraction(coefficient)
        return cls(tuple((label, merged[label]) for label in order if merged[label] != 0))

    @classmethod
    def single(cls, label, coefficient=1):
        return cls.from_pairs([(label, coefficient)])

    def __add__(self, other):
        return Combination.from_pairs(self.terms + other.terms)

    def __neg__(self):
        return Combination(tuple((label, -c) for label, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        return Combination.from_pairs((label, factor * c) for label, c in self.terms)

    def is_zero(self):
        return not self.terms

    def labels(self):
        return [label for label, _ in self.terms]

    def render(self):
        if not self.terms:
            return "0"
        text = ""
        for position, (label, coefficient) in enumerate(self.terms):
            magnitude = abs(coefficient)
            body = label.display if magnitude == 1 else f"{magnitude}*{label.display}"
            if position == 0:
                text = ("-" if coefficient < 0 else "") + body
            else:
                text += (" - " if coefficient < 0 else " + ") + body
        return text

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class LabeledSpace:
    """H_degree presented as span(labels) / relations."""

    degree: int
    labels: tuple
    relations: Subspace = field(default=None)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise DimensionMismatchError("duplicate labels in a presentation")
        if self.relations is None:
            object.__setattr__(self, "relations", Subspace.zero(len(self.labels)))
        if self.relations.ambient_dim != len(self.labels):
            raise DimensionMismatchError(
                "relations do not live in the formal span of the labels"
            )

    @classmethod
    def build(cls, degree, labels, relation_vectors=()):
        labels = tuple(labels)
        return cls(degree, labels, Subspace.span(list(relation_vectors), len(labels)))

    @classmethod
    def from_combinations(cls, degree, labels, relations=()):
        labels = tuple(labels)
        space = cls(degree, labels)
        vectors = [space.vector(r) for r in relations]
        return cls(degree, labels, Subspace.span(vectors, len(labels)))

    @property
    def rank(self):
        return len(self.labels) - self.relations.dim

    @cached_property
    def _positions(self):
        return {label: position for position, label in enumerate(self.labels)}

    def __contains__(self, label):
        return label in self._positions

    def __len__(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self._positions[label]
        except KeyError:
            raise DimensionMismatchError(
                f"{label.display} is not a generator of this H_{self.degree}"
            ) from None

    def vector(self, item, coefficient=1):
        """Coordinates of a label or Combination in the formal span."""
        coords = [ZERO] * len(self.labels)
        if isinstance(item, GeneratorLabel):
            item = Combination.single(item, coefficient)
        for label, c in item.terms:
            coords[self.index(label)] += c
        return tuple(coords)

    def combination(self, vector):
        return Combination.from_pairs(
            (label, c) for label, c in zip(self.labels, vector) if c != 0
        )

    def is_zero(self, item):
        vector = item if isinstance(item, tuple) else self.vector(item)
        return member(self.relations, vector)

    def equal(self, left, right):
        return self.is_zero(
            tuple(a - b for a, b in zip(self.vector(left), self.vector(right)))
        )

    @cached_property
    def _quotient(self):
        relation_matrix = RationalMatrix.from_columns(
            self.relations.basis, len(self.labels)
        )
        return cokernel(relation_matrix, prefer_first=True)

    @property
    def projection(self):
        """Matrix sending formal coordinates to coordinates on generators()."""
        return self._quotient[1]

    def generators(self):
        """Surviving labels; earlier labels are kept in preference to later ones."""
        return [self.labels[k] for k in unit_positions(self._quotient[0])]

    def section(self):
        """Matrix sending generator coordinates back to formal coordinates."""
        kept = unit_positions(self._quotient[0])
        columns = [
            tuple(ONE if i == k else ZERO for i in range(len(self.labels))) for k in kept
        ]
        return RationalMatrix.from_columns(columns, len(self.labels))

    def relation_combinations(self):
        return [self.combination(v) for v in self.relations.basis]

    @classmethod
    def direct_sum(cls, *spaces):
        labels, vectors, offset = [], [], 0
        width = sum(len(space) for space in spaces)
        for space in spaces:
            labels.extend(space.labels)
            for v in space.relations.basis:
                vectors.append((ZERO,) * offset + v + (ZERO,) * (width - offset - len(v)))
            offset += len(space)
        return cls.build(spaces[0].degree, labels, vectors)

    def relabeled(self, mapping):
        """Rename labels by ``mapping`` (label -> (sign, label)), carrying relations."""
        signs = [mapping[label][0] for label in self.labels]
        labels = [mapping[label][1] for label in self.labels]
        vectors = [tuple(s * c for s, c in zip(signs, v)) for v in self.relations.basis]
        return LabeledSpace.build(self.degree, labels, vectors)

    def reordered(self, labels):
        """Same presentation over ``labels``, a permutation of this space's labels."""
        order = [self.index(label) for label in labels]
        vectors = [tuple(v[k] for k in order) for v in self.relations.basis]
        return LabeledSpace.build(self.degree, labels, vectors)

    def with_relations(self, vectors):
        return LabeledSpace(
            self.degree,
            self.labels,
            self.relations.join(Subspace.span(list(vectors), len(self.labels))),
        )

    def embedding(self, labels):
        """Matrix carrying this space's formal coordinates into a wider label list."""
        target = {label: position for position, label in enumerate(labels)}
        columns = []
        for label in self.labels:
            column = [ZERO] * len(labels)
            column[target[label]] = ONE
            columns.append(tuple(column))
        return RationalMatrix.from_columns(columns, len(labels))

    def describe(self):
        return {
            "degree": self.degree,
            "rank": self.rank,
            "generators": [label.display for label in self.generators()],
            "relations": [
                f"{c.render()} = 0" for c in self.relation_combinations()
            ],
        }
