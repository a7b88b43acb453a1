"""
The staged computation of H_*(W) for a scenario.

levels -> pieces (elementary cobordisms and cylinders) -> the two unions
meeting at the cut -> the glued manifold W -> Betti numbers, Euler
characteristic and the c1 table.
"""

import logging
from dataclasses import dataclass, field, replace

from app.chern import ClutchingSpec, c1_table
from app.cobordism import (
    FixedTorusDatum,
    cylinder,
    elementary_cobordism,
    euler_jump_matches,
    normal_chern,
)
from app.errors import HomologyError, InconsistentModelError, InconsistentScenarioError
from app.exact_linalg import ZERO, RationalMatrix, Subspace
from app.gysin import MAX_DEGREE, CircleBundle, LevelHomology
from app.labels import (
    Combination,
    LabelKind,
    LabeledSpace,
    combination_lift,
    fiber_class,
    fixed_torus,
    format_level,
    gradient_torus,
    invariant_sphere,
    level_torus,
    point,
    sphere_fiber,
    sphere_section,
)
from app.mayer_vietoris import (
    BoundaryLift,
    MVProblem,
    Relation,
    relation_closure,
    retire,
    solve_mv,
)
from app.torus_forms import permutation_sign, permute_indices
from app.utils import parse_cycle, parse_form, parse_level, parse_lift

logger = logging.getLogger(__name__)


class Union:
    """mu^-1[a, b] assembled from consecutive pieces."""

    def __init__(self, stage, pieces):
        self.stage = stage
        self.pieces = list(pieces)
        self.a = self.pieces[0].a
        self.b = self.pieces[-1].b
        self.homology = dict(self.pieces[0].homology)
        self.ledger = []
        self.audits = []
        self.solutions = {}
        for piece in self.pieces:
            self.ledger.extend(piece.ledger)
            self.audits.extend(piece.audits)

    def space(self, degree):
        return self.homology[degree]

    def ranks(self):
        return tuple(self.homology[d].rank for d in range(MAX_DEGREE + 1))


def _inclusion_columns(intersection, left, right):
    """Identity label maps of a shared level into both sides."""
    return intersection.embedding(left.labels).stack(intersection.embedding(right.labels))


def union_of(stage, pieces, levels, lifts):
    """Iterated Mayer-Vietoris over the levels shared by consecutive pieces."""
    union = Union(stage, pieces)
    for piece in union.pieces[1:]:
        shared = levels[piece.a]
        local = f"{stage}@{format_level(piece.a)}"
        homology = {}
        for degree in range(MAX_DEGREE + 1):
            left, right = union.homology[degree], piece.space(degree)
            extra = {}
            if degree > 0:
                p_left, p_right = union.homology[degree - 1], piece.space(degree - 1)
                p_shared = shared.space(degree - 1)
                extra = dict(
                    intersection_prev=p_shared,
                    left_prev=p_left,
                    right_prev=p_right,
                    inclusions_prev=_inclusion_columns(p_shared, p_left, p_right),
                )
            problem = MVProblem(
                stage=local,
                degree=degree,
                intersection=shared.space(degree),
                left=left,
                right=right,
                inclusions=_inclusion_columns(shared.space(degree), left, right),
                lifts=lifts.get((local, degree), ()),
                **extra,
            )
            solution = solve_mv(problem)
            union.solutions[(local, degree)] = solution
            union.audits.extend(solution.audits)
            union.ledger.extend(solution.relation_ledger)
            homology[degree] = solution.homology
        union.homology = homology
    union.b = union.pieces[-1].b
    logger.info("%s: ranks %s", stage, union.ranks())
    return union


def transport(label, mapping, target):
    """Image of a start-level label in the end level under the gluing."""
    n = target.n
    if label.kind is LabelKind.POINT:
        return target.space(0).vector(point(target.level))
    if label.kind is LabelKind.FIBER_CLASS:
        index = mapping[label.indices[0]] if label.indices else None
        return target.space(label.degree).vector(fiber_class(index, target.level))
    if label.kind in (LabelKind.LEVEL_TORUS, LabelKind.COMBINATION_LIFT):
        return target.vector_for_cycle(permute_indices(label.base_cycle(n), mapping))
    raise InconsistentModelError(f"{label.display} does not live in a level set")


def _embed(space, target, vector):
    coords = [ZERO] * len(target.labels)
    for label, c in zip(space.labels, vector):
        coords[target.index(label)] += c
    return tuple(coords)


def cut_expression(piece, label):
    """``label`` at the cut as the piece next to the cut writes it, or itself."""
    expression = Combination.single(label)
    for relation in piece.ledger:
        if relation.modulus or relation.lhs != Combination.single(label):
            continue
        if label not in relation.rhs.labels():
            expression = relation.rhs
    return expression


def cut_relations(cut_space, lower, upper):
    """W relations equating the two union-side expressions of each cut label."""
    relations = []
    for label in cut_space.labels:
        below = cut_expression(lower.pieces[-1], label)
        above = cut_expression(upper.pieces[0], label)
        if below != above:
            relations.append(Relation("W", below, above))
    return relations


def glue(scenario, lower, upper, levels, lifts):
    """Mayer-Vietoris for W = lower u upper, meeting along the cut and the gluing."""
    start, cut, end = levels[scenario.start], levels[scenario.cut], levels[scenario.end]
    mapping = scenario.gluing_map()
    solutions = {}

    def spaces(degree):
        intersection = LabeledSpace.direct_sum(start.space(degree), cut.space(degree))
        left, right = lower.space(degree), upper.space(degree)
        columns = []
        for label in start.space(degree).labels:
            image = _embed(end.space(degree), right, transport(label, mapping, end))
            columns.append(left.vector(label) + image)
        for label in cut.space(degree).labels:
            columns.append(left.vector(label) + right.vector(label))
        matrix = RationalMatrix.from_columns(columns, len(left) + len(right))
        return intersection, left, right, matrix

    for degree in range(MAX_DEGREE + 1):
        intersection, left, right, matrix = spaces(degree)
        extra = {}
        if degree > 0:
            p_int, p_left, p_right, p_matrix = spaces(degree - 1)
            extra = dict(
                intersection_prev=p_int,
                left_prev=p_left,
                right_prev=p_right,
                inclusions_prev=p_matrix,
            )
        solution = solve_mv(
            MVProblem(
                stage="W",
                degree=degree,
                intersection=intersection,
                left=left,
                right=right,
                inclusions=matrix,
                lifts=lifts.get(("W", degree), ()),
                **extra,
            )
        )
        bridging = cut_relations(cut.space(degree), lower, upper)
        if bridging:
            logger.debug("W: %d cut relations in degree %d", len(bridging), degree)
            solution = replace(
                solution, relation_ledger=solution.relation_ledger + tuple(bridging)
            )
        solutions[degree] = solution
    return solutions


def reflect_label(label, scenario):
    """(sign, label) under i -> n+1-i, s -> end-s."""
    mapping = {i: scenario.reflect_index(i) for i in range(1, scenario.base_dim + 1)}
    level = None if label.level is None else scenario.reflect_level(label.level)

    def oriented(indices):
        mapped = tuple(mapping[i] for i in indices)
        return permutation_sign(mapped), tuple(sorted(mapped))

    kind = label.kind
    if kind is LabelKind.LEVEL_TORUS:
        sign, indices = oriented(label.indices)
        return sign, level_torus(indices, level)
    if kind is LabelKind.FIXED_TORUS:
        sign, indices = oriented(label.indices)
        return sign, fixed_torus(indices, level)
    if kind is LabelKind.SPHERE_SECTION:
        sign, indices = oriented(label.indices)
        return sign, sphere_section(indices, level, -label.side)
    if kind is LabelKind.FIBER_CLASS:
        index = mapping[label.indices[0]] if label.indices else None
        return 1, fiber_class(index, level)
    if kind is LabelKind.SPHERE_FIBER:
        index = mapping[label.indices[0]] if label.indices else None
        return 1, sphere_fiber(index, level, -label.side)
    if kind is LabelKind.COMBINATION_LIFT:
        cycle = permute_indices(label.cycle, mapping)
        lead = cycle.terms[0][1]
        return lead, combination_lift(cycle.scale(1 / lead), level)
    if kind is LabelKind.POINT:
        return 1, point(level, label.name, -label.side)
    if kind is LabelKind.GRADIENT_TORUS:
        return 1, gradient_torus(tuple(sorted(mapping[i] for i in label.indices)))
    if kind is LabelKind.INVARIANT_SPHERE:
        return 1, invariant_sphere(
            scenario.reflect_level(label.level), scenario.reflect_level(label.level_to)
        )
    return 1, label


@dataclass
class Reflected:
    homology: dict
    ledger: list


def apply_index_symmetry(union, scenario):
    """Relabel every generator and relation of ``union`` by the reflection."""
    homology = {}
    for degree, space in union.homology.items():
        mapping = {label: reflect_label(label, scenario) for label in space.labels}
        homology[degree] = space.relabeled(mapping)
    ledger = []
    for relation in union.ledger:
        ledger.append(
            Relation(
                relation.stage,
                _reflect_combination(relation.lhs, scenario),
                _reflect_combination(relation.rhs, scenario),
                tuple(reflect_label(l, scenario)[1] for l in relation.modulus),
                relation.retired,
            )
        )
    return Reflected(homology, ledger)


def _reflect_combination(combination, scenario):
    pairs = []
    for label, c in combination.terms:
        sign, image = reflect_label(label, scenario)
        pairs.append((image, sign * c))
    return type(combination).from_pairs(pairs)


def same_presentation(mapped, direct):
    """Equal label sets, ranks and relation subspaces."""
    if set(mapped.labels) != set(direct.labels) or mapped.rank != direct.rank:
        return False
    aligned = mapped.reordered(direct.labels)
    return aligned.relations == direct.relations


def same_ledger(mirrored, direct, background=()):
    """Equal relation subspaces of two ledgers, read modulo ``background`` spaces.

    Plain relations are compared as one span. Relations taken modulo some
    labels are grouped by the span of those labels and compared group by
    group.
    """
    index = {}
    for relation in list(mirrored) + list(direct):
        for label in relation.labels() + list(relation.modulus):
            index.setdefault(label, len(index))
    for space in background:
        for label in space.labels:
            index.setdefault(label, len(index))
    width = len(index)

    def coordinates(pairs):
        coords = [ZERO] * width
        for label, c in pairs:
            coords[index[label]] += c
        return tuple(coords)

    base = [
        coordinates(zip(space.labels, vector))
        for space in background
        for vector in space.relations.basis
    ]

    def summary(ledger):
        plain = Subspace.span(
            base + [coordinates(r.difference().terms) for r in ledger if not r.modulus],
            width,
        )
        groups = {}
        for relation in ledger:
            if not relation.modulus:
                continue
            units = [coordinates([(label, 1)]) for label in relation.modulus]
            key = Subspace.span(list(plain.basis) + units, width)
            groups.setdefault(key, list(key.basis)).append(
                coordinates(relation.difference().terms)
            )
        return plain, {key: Subspace.span(vectors, width) for key, vectors in groups.items()}

    return summary(mirrored) == summary(direct)


def attach_presentations(union):
    """Attaching-model presentations of the elementary cobordisms in ``union``."""
    spaces = []
    for piece in union.pieces:
        for model in (getattr(piece, "attach1", {}), getattr(piece, "attach2", {})):
            spaces.extend(solution.homology for solution in model.values())
    return spaces


def euler_and_duality(b0, b1, b2, fixed_components=()):
    """Betti numbers b0..b6 of a closed oriented 6-manifold and its Euler characteristic.

    ``fixed_components`` lists the Euler characteristics of the fixed
    components, whose sum is chi(W).
    """
    chi = sum(fixed_components)
    b3 = 2 * (b0 - b1 + b2) - chi
    if b3 < 0:
        raise InconsistentModelError(f"duality forces b3 = {b3}", "betti")
    betti = (b0, b1, b2, b3, b2, b1, b0)
    return betti, chi, chi != 0


def kaehler_obstruction(b1):
    if b1 % 2:
        return True, f"b1 = {b1} is odd: W admits no Kaehler structure"
    return False, f"b1 = {b1} is even: no conclusion about Kaehler structures"


def or_slots(space):
    """Other fixed-torus labels that can replace a fixed-torus generator in the basis."""
    generators = space.generators()
    candidates = [l for l in space.labels if l.kind is LabelKind.FIXED_TORUS]
    slots = {}
    for position, label in enumerate(generators):
        if label.kind is not LabelKind.FIXED_TORUS:
            continue
        alternatives = []
        for candidate in candidates:
            if candidate == label or candidate in generators:
                continue
            trial = generators[:position] + [candidate] + generators[position + 1 :]
            vectors = [space.projection @ space.vector(l) for l in trial]
            if Subspace.span(vectors, space.rank).dim == len(trial):
                alternatives.append(candidate)
        slots[label] = alternatives
    return slots


@dataclass
class PipelineResult:
    scenario: object
    levels: dict
    pieces: list
    lower: Union
    upper: Union
    W: dict
    betti: tuple
    euler_characteristic: int
    euler_flagged: bool
    kaehler: tuple
    c1_rows: list
    ledger: list
    closure: object
    or_slots: dict
    audits: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def homology(self, degree):
        return self.W[degree].homology

    def generators(self, degree):
        return self.homology(degree).generators()

    def or_relations(self, label):
        """W relations tying ``label`` to one of its or-slot alternatives."""
        alternatives = set(self.or_slots.get(label, ()))
        found = []
        for relation in self.ledger:
            names = set(relation.labels())
            if relation.stage == "W" and label in names and names & alternatives:
                found.append(relation)
        return found


def build_levels(scenario):
    levels = {}
    for sample in scenario.samples:
        bundle = CircleBundle(scenario.base_dim, scenario.euler_at(sample), sample)
        levels[sample] = LevelHomology(bundle)
        logger.debug("level %s: ranks %s", bundle.level_label, levels[sample].ranks())
    return levels


def build_pieces(scenario, levels, lifts):
    pieces = []
    for a, b in zip(scenario.samples, scenario.samples[1:]):
        inside = scenario.critical_between(a, b)
        if inside:
            datum = scenario.datum(inside[0].level)
            toward = 1 if b <= scenario.cut else -1
            pieces.append(
                elementary_cobordism(a, b, datum, levels[a], levels[b], lifts, toward)
            )
        else:
            pieces.append(cylinder(levels[a], levels[b]))
    return pieces


def _label_audit(solutions, lower, upper, levels):
    known = set()
    for space_source in (lower.homology, upper.homology):
        for space in space_source.values():
            known.update(space.labels)
    for level in levels.values():
        for space in level.spaces.values():
            known.update(space.labels)
    lifts = {label for s in solutions.values() for label, _ in s.boundary_generators}
    unknown = [
        label.display
        for s in solutions.values()
        for label in s.homology.labels
        if label not in known and label not in lifts
    ]
    return ("W labels resolve", not unknown, ", ".join(unknown) or "all defined earlier")


def run(scenario, checks=True):
    """Compute H_*(W) of a validated scenario."""
    lifts = scenario.lifts_by_stage()
    levels = build_levels(scenario)
    try:
        pieces = build_pieces(scenario, levels, lifts)
        lower = union_of(
            f"union[{format_level(scenario.start)},{format_level(scenario.cut)}]",
            [p for p in pieces if p.b <= scenario.cut],
            levels,
            lifts,
        )
        upper = union_of(
            f"union[{format_level(scenario.cut)},{format_level(scenario.end)}]",
            [p for p in pieces if p.a >= scenario.cut],
            levels,
            lifts,
        )
        solutions = glue(scenario, lower, upper, levels, lifts)
    except HomologyError as exc:
        logger.error("scenario %s failed: %s", scenario.name, exc)
        raise

    audits = list(lower.audits) + list(upper.audits)
    for solution in solutions.values():
        audits.extend(solution.audits)
    audits.append(_label_audit(solutions, lower, upper, levels))

    if checks and scenario.symmetry == "reflect":
        mirrored = apply_index_symmetry(lower, scenario)
        for degree in range(MAX_DEGREE + 1):
            ok = same_presentation(mirrored.homology[degree], upper.space(degree))
            audits.append(
                (
                    f"index symmetry H_{degree}",
                    ok,
                    f"{lower.stage} reflected vs {upper.stage} computed",
                )
            )
            if not ok:
                raise InconsistentModelError(
                    f"reflected H_{degree} differs from the direct computation",
                    upper.stage,
                )
        ok = same_ledger(mirrored.ledger, upper.ledger, attach_presentations(upper))
        audits.append(
            (
                "index symmetry ledger",
                ok,
                f"{lower.stage} relations reflected vs {upper.stage} relations",
            )
        )
        if not ok:
            raise InconsistentModelError(
                "reflected relation ledger differs from the direct computation",
                upper.stage,
            )

    b0, b1, b2 = (solutions[d].homology.rank for d in range(MAX_DEGREE + 1))
    fixed = [0 for _ in scenario.critical]
    betti, chi, flagged = euler_and_duality(b0, b1, b2, fixed)

    ledger = list(lower.ledger) + list(upper.ledger)
    for solution in solutions.values():
        ledger.extend(solution.relation_ledger)
    for degree in range(MAX_DEGREE + 1):
        ledger = retire(ledger, solutions[degree].homology)
    surviving = [l for s in solutions.values() for l in s.homology.generators()]
    closure = relation_closure([r for r in ledger if not r.modulus], surviving)

    h2 = solutions[2].homology
    spec = ClutchingSpec.from_gluing(scenario.gluing, scenario.end - scenario.start)
    rows = c1_table(h2.generators(), scenario.data(), spec)
    if checks:
        audits.append(
            ("c1 vanishes", all(row.value == 0 for row in rows), "all H2(W) generators")
        )
        audits.append(
            (
                "betti duality",
                sum((-1) ** k * b for k, b in enumerate(betti)) == chi,
                f"chi = {chi}",
            )
        )

    notes = [
        "sign convention: s_I for unsorted I is the sorting-permutation sign times "
        "s_sorted(I), so s42 = -s24",
        "c1(nu-) = -<e_below, L_image>, c1(nu+) = <e_above, L_image>; the orientation "
        "of Z is fixed by the index order of its image torus",
        "LevelSplitting and InvariantSphereWeights are reconstructed rules",
        "the generator list is reported for H_2(W); over R it is dual to H^2(W)",
    ]
    failed = [name for name, passed, _ in audits if not passed]
    if failed:
        logger.warning("scenario %s: failed audits %s", scenario.name, failed)
    logger.info("scenario %s: betti %s", scenario.name, betti)
    return PipelineResult(
        scenario=scenario,
        levels=levels,
        pieces=pieces,
        lower=lower,
        upper=upper,
        W=solutions,
        betti=betti,
        euler_characteristic=chi,
        euler_flagged=flagged,
        kaehler=kaehler_obstruction(b1),
        c1_rows=rows,
        ledger=ledger,
        closure=closure,
        or_slots=or_slots(h2),
        audits=audits,
        notes=notes,
    )


def single_level(base_dim, euler, level=0):
    """LevelHomology of one circle bundle given as text, e.g. '-s31 - s42'."""
    bundle = CircleBundle(base_dim, parse_form(euler, base_dim), parse_level(str(level)))
    return LevelHomology(bundle)


def single_cobordism(a, b, critical, image, below, above, lifts=(), base_dim=4):
    """Elementary cobordism over [a, b] from textual data; ``lifts`` are lift lines."""
    a, b, critical = (parse_level(str(x)) for x in (a, b, critical))
    cycle = parse_cycle(image, base_dim, 2)
    if len(cycle.terms) != 1 or cycle.terms[0][1] != 1:
        raise InconsistentScenarioError(f"image {image!r} is not a coordinate torus")
    indices = cycle.terms[0][0]
    lower, upper = single_level(base_dim, below, a), single_level(base_dim, above, b)
    if not euler_jump_matches(lower.bundle.euler, upper.bundle.euler, indices):
        raise InconsistentScenarioError(
            f"Euler class jump at {format_level(critical)} is not +-PD({image})"
        )
    c1_minus, c1_plus = normal_chern(lower.bundle.euler, upper.bundle.euler, indices)
    datum = FixedTorusDatum(critical, indices, c1_minus, c1_plus)
    grouped = {}
    for text in lifts:
        stage, label, degree, boundary = parse_lift(text, base_dim)
        grouped.setdefault((stage, degree), []).append(BoundaryLift(label, boundary))
    grouped = {key: tuple(value) for key, value in grouped.items()}
    return elementary_cobordism(a, b, datum, lower, upper, grouped)
