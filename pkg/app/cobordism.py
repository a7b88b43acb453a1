"""
Pieces of the moment-map decomposition: elementary cobordisms across one
critical level, and product cylinders between regular levels.

An elementary cobordism mu^-1[a, b] around a critical torus Z is modelled
twice: as the level a with the disc bundle D(nu-) attached along S(nu-)
("attach1"), and as the level b with D(nu+) attached along S(nu+)
("attach2"). Both presentations are solved by Mayer-Vietoris and then
reconciled into one labelled homology group with one relation ledger.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction

from app.errors import InconsistentModelError, InconsistentScenarioError
from app.exact_linalg import ZERO, RationalMatrix, kernel_basis, rank, solve
from app.gysin import MAX_DEGREE, base_projection, sphere_bundle_homology
from app.labels import (
    LEVEL_RESIDENT,
    Combination,
    LabelKind,
    LabeledSpace,
    fiber_class,
    fixed_torus,
    format_level,
    point,
)
from app.mayer_vietoris import MVProblem, Relation, solve_mv
from app.torus_forms import Cycle, displaceable, pair, poincare_dual

logger = logging.getLogger(__name__)

TANGENT_SIZE = 6


@dataclass(frozen=True)
class FixedTorusDatum:
    level: Fraction
    image_indices: tuple
    c1_minus: int
    c1_plus: int

    def __post_init__(self):
        if self.c1_minus != -self.c1_plus:
            raise InconsistentScenarioError(
                f"normal Chern numbers ({self.c1_minus}, {self.c1_plus}) at level "
                f"{format_level(self.level)} are not antisymmetric"
            )

    def image_cycle(self, n):
        return Cycle.basis(n, *self.image_indices)

    @property
    def label(self):
        return fixed_torus(self.image_indices, self.level)

    def tangent_weights(self, size=TANGENT_SIZE):
        """Isotropy weights at a point of Z: TZ, then nu- and nu+."""
        weights = [0] * len(self.image_indices) + [-1, 1]
        return tuple(weights + [0] * (size - len(weights)))


def normal_chern(below, above, image_indices):
    """(c1(nu-), c1(nu+)) from the Euler classes of the adjacent levels.

    nu- carries isotropy weight -1, so its Chern number is minus the pairing
    of the lower Euler class with the image torus.
    """
    image = Cycle.basis(below.n, *image_indices)
    c1_minus = -pair(below, image)
    c1_plus = pair(above, image)
    if c1_minus != -c1_plus:
        raise InconsistentScenarioError(
            f"c1(nu-) = {c1_minus} and c1(nu+) = {c1_plus} over L"
            f"{''.join(map(str, image_indices))} are not antisymmetric"
        )
    return int(c1_minus), int(c1_plus)


def euler_jump_matches(below, above, image_indices):
    """True when the Euler classes differ by +-PD of the image torus."""
    jump = above - below
    dual = poincare_dual(Cycle.basis(below.n, *image_indices))
    return jump == dual or jump == -dual


def fixed_torus_homology(indices, level, degree):
    if degree == 0:
        labels = [point(level, "ptZ")]
    elif degree == 1:
        labels = [fixed_torus((i,), level) for i in indices]
    else:
        labels = [fixed_torus(tuple(indices), level)]
    return LabeledSpace.build(degree, labels)


def _sphere_images(sphere, level_homology, fixed, n):
    """(level vector, fixed vector) for every label of the sphere bundle."""
    level_space = level_homology.space(sphere.degree)
    images = []
    for label in sphere.labels:
        if label.kind is LabelKind.POINT:
            upper = level_space.vector(point(level_homology.level))
            lower = fixed.vector(fixed.labels[0])
        elif label.kind is LabelKind.SPHERE_SECTION:
            upper = level_homology.vector_for_cycle(Cycle.basis(n, *label.indices))
            lower = fixed.vector(fixed_torus(label.indices, label.level))
        else:
            index = label.indices[0] if label.indices else None
            upper = level_space.vector(fiber_class(index, level_homology.level))
            lower = tuple(ZERO for _ in fixed.labels)
        images.append((upper, lower))
    return images


def _attach_spaces(degree, level_homology, datum, side, n):
    """Intersection, A, A' and the inclusion matrix of one attaching model."""
    c1 = datum.c1_minus if side < 0 else datum.c1_plus
    sphere = sphere_bundle_homology(
        c1, degree, side, datum.level, datum.image_indices
    )
    fixed = fixed_torus_homology(datum.image_indices, datum.level, degree)
    level_space = level_homology.space(degree)
    columns = []
    for upper, lower in _sphere_images(sphere, level_homology, fixed, n):
        columns.append(upper + lower if side < 0 else lower + upper)
    left, right = (level_space, fixed) if side < 0 else (fixed, level_space)
    matrix = RationalMatrix.from_columns(columns, len(left) + len(right))
    return sphere, left, right, matrix


def attach_problem(stage, degree, level_homology, datum, side, lifts=()):
    n = level_homology.n
    sphere, left, right, matrix = _attach_spaces(degree, level_homology, datum, side, n)
    prev = {}
    if degree > 0:
        p_sphere, p_left, p_right, p_matrix = _attach_spaces(
            degree - 1, level_homology, datum, side, n
        )
        prev = dict(
            intersection_prev=p_sphere,
            left_prev=p_left,
            right_prev=p_right,
            inclusions_prev=p_matrix,
        )
    return MVProblem(
        stage=stage,
        degree=degree,
        intersection=sphere,
        left=left,
        right=right,
        inclusions=matrix,
        lifts=tuple(lifts),
        **prev,
    )


def _counterpart(label, level):
    return replace(label, level=level)


def flow_relations(stage, below, above, level, obstacle, n):
    """l^a = l^b for level classes that can be swept across [a, b]."""
    relations = []
    for label in below.labels:
        if label.kind not in LEVEL_RESIDENT and label.kind is not LabelKind.POINT:
            continue
        partner = _counterpart(label, level)
        if partner not in above:
            continue
        if obstacle is not None and not displaceable(label.base_cycle(n), obstacle):
            continue
        relations.append(
            Relation(stage, Combination.single(label), Combination.single(partner))
        )
    return relations


def _embed(space, target, vector):
    coords = [ZERO] * len(target.labels)
    for label, c in zip(space.labels, vector):
        coords[target.index(label)] += c
    return tuple(coords)


def _kernel_labels(generators, matrix):
    kernel = kernel_basis(matrix)
    labels = []
    for vector in kernel.basis:
        for label, c in zip(generators, vector):
            if c != 0 and label not in labels:
                labels.append(label)
    return tuple(labels)


class Piece:
    """One piece mu^-1[a, b] with homology in degrees 0..2."""

    kind = "piece"

    def __init__(self, a, b, below, above):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.below = below
        self.above = above
        self.n = below.n
        self.homology = {}
        self.ledger = []
        self.audits = []
        self.inclusions = {}

    @property
    def stage(self):
        return f"{self.kind}[{format_level(self.a)},{format_level(self.b)}]"

    def space(self, degree):
        return self.homology[degree]

    def ranks(self):
        return tuple(self.homology[d].rank for d in range(MAX_DEGREE + 1))

    def _record_inclusions(self):
        for degree, space in self.homology.items():
            for end, level in (("below", self.below), ("above", self.above)):
                self.inclusions[(end, degree)] = level.space(degree).embedding(
                    space.labels
                )
        space = self.homology[1]
        projection = base_projection(space, self.n)
        for end, level in (("below", self.below), ("above", self.above)):
            composite = projection @ self.inclusions[(end, 1)]
            ok = composite == base_projection(level.space(1), self.n)
            self.audits.append(
                (f"{self.stage} H1 inclusion {end}", ok, "L_i^s -> L_i on the base")
            )


class ElementaryCobordism(Piece):
    kind = "cobordism"

    def __init__(self, a, b, datum, below, above):
        super().__init__(a, b, below, above)
        self.datum = datum
        self.attach1 = {}
        self.attach2 = {}

    @property
    def attach_stages(self):
        level = format_level(self.datum.level)
        return f"attach1@{level}", f"attach2@{level}"

    def _record_inclusions(self):
        super()._record_inclusions()
        space = self.homology[1]
        projection = base_projection(space, self.n)
        image_rank = rank(projection @ space.section())
        self.audits.append(
            (
                f"{self.stage} H1 projection",
                image_rank == space.rank == self.n,
                f"rank {image_rank} onto H1(T^{self.n})",
            )
        )


class Cylinder(Piece):
    kind = "cylinder"


def cylinder(below, above):
    """Product piece between two regular levels with the same Euler class."""
    if below.bundle.euler != above.bundle.euler:
        raise InconsistentScenarioError(
            f"levels {below.bundle.level_label} and {above.bundle.level_label} "
            "have different Euler classes but no critical level between them"
        )
    piece = Cylinder(below.level, above.level, below, above)
    for degree in range(MAX_DEGREE + 1):
        lower, upper = below.space(degree), above.space(degree)
        labels = list(lower.labels) + [l for l in upper.labels if l not in lower]
        scratch = LabeledSpace(degree, tuple(labels))
        flows = flow_relations(piece.stage, lower, upper, above.level, None, piece.n)
        vectors = [_embed(lower, scratch, v) for v in lower.relations.basis]
        vectors += [_embed(upper, scratch, v) for v in upper.relations.basis]
        vectors += [scratch.vector(r.difference()) for r in flows]
        space = LabeledSpace.build(degree, labels, vectors)
        if space.rank != lower.rank:
            raise InconsistentModelError(
                f"H_{degree} has rank {space.rank}, the level has {lower.rank}",
                piece.stage,
            )
        piece.homology[degree] = space
        piece.ledger.extend(flows)
    piece._record_inclusions()
    logger.debug("%s: ranks %s", piece.stage, piece.ranks())
    return piece


def elementary_cobordism(a, b, datum, below, above, lifts=None, toward=1):
    """Build mu^-1[a, b] from both attaching models and reconcile them.

    ``lifts`` maps a stage name ("attach2@1") and degree to BoundaryLift
    declarations for that Mayer-Vietoris problem. ``toward`` is +1 when the
    cut lies above the piece and -1 when it lies below; the end nearer the
    cut is expressed in terms of the far end.
    """
    if toward not in (-1, 1):
        raise ValueError(f"toward must be +1 or -1, got {toward!r}")
    lifts = lifts or {}
    if not Fraction(a) < datum.level < Fraction(b):
        raise InconsistentScenarioError(
            f"critical level {format_level(datum.level)} is not inside "
            f"[{format_level(a)}, {format_level(b)}]"
        )
    cobordism = ElementaryCobordism(a, b, datum, below, above)
    first_stage, second_stage = cobordism.attach_stages
    for degree in range(MAX_DEGREE + 1):
        first = solve_mv(
            attach_problem(
                first_stage, degree, below, datum, -1, lifts.get((first_stage, degree), ())
            )
        )
        second = solve_mv(
            attach_problem(
                second_stage, degree, above, datum, 1, lifts.get((second_stage, degree), ())
            )
        )
        cobordism.attach1[degree] = first
        cobordism.attach2[degree] = second
        cobordism.audits.extend(first.audits + second.audits)
        cobordism.ledger.extend(first.relation_ledger + second.relation_ledger)
        cobordism.homology[degree] = _reconcile(cobordism, degree, first, second, toward)
    cobordism._record_inclusions()
    logger.info("%s: ranks %s", cobordism.stage, cobordism.ranks())
    return cobordism


def _reconcile(cobordism, degree, first, second, toward=1):
    """Merge the attach1 and attach2 presentations of H_degree.

    Generators of the near side are matched against those of the far side,
    so a reflected piece yields the reflected relations.
    """
    stage, n = cobordism.stage, cobordism.n
    left, right = first.homology, second.homology
    labels = list(left.labels) + [l for l in right.labels if l not in left]
    scratch = LabeledSpace(degree, tuple(labels))

    vectors = [_embed(left, scratch, v) for v in left.relations.basis]
    vectors += [_embed(right, scratch, v) for v in right.relations.basis]
    flows = flow_relations(
        stage,
        cobordism.below.space(degree),
        cobordism.above.space(degree),
        cobordism.b,
        cobordism.datum.image_cycle(n),
        n,
    )
    vectors += [scratch.vector(r.difference()) for r in flows]
    cobordism.ledger.extend(flows)
    combined = LabeledSpace.build(degree, labels, vectors)

    projection = base_projection(combined, n)
    anchor, moving = (first, second) if toward > 0 else (second, first)
    generators = anchor.homology.generators()
    columns = [projection.apply(combined.vector(g)) for g in generators]
    on_anchor = RationalMatrix.from_columns(columns, projection.rows)
    injective = rank(on_anchor) == len(generators)
    modulus = () if injective else _kernel_labels(generators, on_anchor)

    extra = []
    for label in moving.homology.generators():
        solution = solve(on_anchor, projection.apply(combined.vector(label)))
        if solution is None:
            raise InconsistentModelError(
                f"{label.display} projects outside the image of the {anchor.stage} "
                "generators",
                stage,
            )
        match = Combination.from_pairs(zip(generators, solution))
        difference = combined.vector(Combination.single(label) - match)
        if combined.is_zero(difference):
            continue
        relation = Relation(stage, Combination.single(label), match, modulus)
        cobordism.ledger.append(relation)
        if injective:
            extra.append(difference)
    if extra:
        combined = combined.with_relations(extra)

    kills = all(not any(projection.apply(v)) for v in combined.relations.basis)
    cobordism.audits.append(
        (f"{stage} projection H_{degree}", kills, "projection kills every relation")
    )
    consistent = combined.rank == left.rank == right.rank
    cobordism.audits.append(
        (
            f"{stage} reconciliation H_{degree}",
            consistent,
            f"{first.stage} {left.rank}, {second.stage} {right.rank}, merged {combined.rank}",
        )
    )
    if not consistent or not kills:
        raise InconsistentModelError(
            f"H_{degree}: {first.stage} gives rank {left.rank}, {second.stage} "
            f"gives {right.rank}, merged presentation {combined.rank}",
            stage,
        )
    return combined
