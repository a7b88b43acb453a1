"""
Mayer-Vietoris in one degree with generator tracking.

For Y = A u A' the sequence

    H_n(A n A') --(i,j)--> H_n(A) + H_n(A') --> H_n(Y) --d--> H_{n-1}(A n A') --(i,j)--> ...

gives H_n(Y) = coker(i,j)_n + ker(i,j)_{n-1}. The cokernel is presented by
the labels of A and A' modulo i(x) = j(x); the kernel is covered by lift
generators the caller declares together with their boundaries.
"""

import logging
from dataclasses import dataclass, field, replace

from app.errors import (
    ContradictionError,
    DimensionMismatchError,
    InconsistentModelError,
    UnderdeterminedBoundaryError,
)
from app.exact_linalg import ZERO, RationalMatrix, Subspace, kernel_basis, rank
from app.labels import Combination, LabeledSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryLift:
    """A generator of H_n(Y) whose boundary is ``boundary`` in H_{n-1}(A n A')."""

    label: object
    boundary: Combination


@dataclass(frozen=True)
class Relation:
    stage: str
    lhs: Combination
    rhs: Combination
    modulus: tuple = ()
    retired: bool = False

    def render(self):
        text = f"{self.lhs.render()} = {self.rhs.render()}"
        if self.modulus:
            text += " mod <" + ", ".join(label.display for label in self.modulus) + ">"
        if self.retired:
            text += " (retired)"
        return text

    def difference(self):
        return self.lhs - self.rhs

    def labels(self):
        return self.lhs.labels() + self.rhs.labels()


@dataclass(frozen=True)
class MVProblem:
    stage: str
    degree: int
    intersection: LabeledSpace
    left: LabeledSpace
    right: LabeledSpace
    inclusions: RationalMatrix
    intersection_prev: LabeledSpace = None
    left_prev: LabeledSpace = None
    right_prev: LabeledSpace = None
    inclusions_prev: RationalMatrix = None
    lifts: tuple = ()

    def __post_init__(self):
        _check_shape(self.inclusions, self.intersection, self.left, self.right)
        if self.intersection_prev is not None:
            _check_shape(
                self.inclusions_prev,
                self.intersection_prev,
                self.left_prev,
                self.right_prev,
            )


def _check_shape(matrix, intersection, left, right):
    expected = (len(left) + len(right), len(intersection))
    if (matrix.rows, matrix.cols) != expected:
        raise DimensionMismatchError(
            f"inclusion matrix is {matrix.rows}x{matrix.cols}, labels need "
            f"{expected[0]}x{expected[1]}"
        )


@dataclass(frozen=True)
class MVSolution:
    stage: str
    homology: LabeledSpace
    relation_ledger: tuple
    boundary_generators: tuple
    rank_map: int
    kernel_prev_rank: int
    coker_rank: int
    audits: tuple = field(default=())


def _block_diagonal(first, second):
    rows = []
    for row in first.entries:
        rows.append(row + (ZERO,) * second.cols)
    for row in second.entries:
        rows.append((ZERO,) * first.cols + row)
    return RationalMatrix(first.rows + second.rows, first.cols + second.cols, tuple(rows))


def quotient_map(matrix, source, left, right):
    """The inclusion map read on generators, modulo every relation."""
    target = _block_diagonal(left.projection, right.projection)
    return target @ matrix @ source.section()


def _split(column, left):
    return column[: len(left)], column[len(left) :]


def solve_mv(problem):
    """Solve one degree of a Mayer-Vietoris sequence."""
    stage, n = problem.stage, problem.degree
    left, right = problem.left, problem.right

    reduced = quotient_map(problem.inclusions, problem.intersection, left, right)
    rank_map = rank(reduced)
    ambient = left.rank + right.rank

    if problem.intersection_prev is None:
        kernel = Subspace.zero(0)
        prev = None
    else:
        prev = quotient_map(
            problem.inclusions_prev,
            problem.intersection_prev,
            problem.left_prev,
            problem.right_prev,
        )
        kernel = kernel_basis(prev)

    boundaries = _check_lifts(problem, prev, kernel)

    labels = list(left.labels)
    labels += [label for label in right.labels if label not in left]
    labels += [lift.label for lift in problem.lifts]
    scratch = LabeledSpace(n, tuple(labels))

    def embed(space, vector):
        coords = [ZERO] * len(labels)
        for label, c in zip(space.labels, vector):
            coords[scratch.index(label)] += c
        return tuple(coords)

    relation_vectors = [embed(left, v) for v in left.relations.basis]
    relation_vectors += [embed(right, v) for v in right.relations.basis]
    ledger = []
    for column in problem.inclusions.columns():
        u, v = _split(column, left)
        image = tuple(a - b for a, b in zip(embed(left, u), embed(right, v)))
        relation_vectors.append(image)
        lhs, rhs = left.combination(u), right.combination(v)
        if lhs != rhs and any(c != 0 for c in image):
            ledger.append(Relation(stage, lhs, rhs))

    homology = LabeledSpace.build(n, labels, relation_vectors)
    coker_rank = ambient - rank_map
    expected = coker_rank + kernel.dim
    audits = [
        (
            f"{stage} exactness H_{n}",
            homology.rank == expected,
            f"rank {homology.rank} vs coker {coker_rank} + ker {kernel.dim}",
        )
    ]
    if homology.rank != expected:
        raise InconsistentModelError(
            f"H_{n} presentation has rank {homology.rank}, exactness demands "
            f"{coker_rank} + {kernel.dim}",
            stage,
        )
    if kernel.dim == 0:
        audits.append((f"{stage} boundary H_{n}", not boundaries, "d is the zero map"))

    logger.info(
        "%s: H_%d rank %d (map rank %d, kernel below %d)",
        stage,
        n,
        homology.rank,
        rank_map,
        kernel.dim,
    )
    return MVSolution(
        stage=stage,
        homology=homology,
        relation_ledger=tuple(ledger),
        boundary_generators=tuple(boundaries),
        rank_map=rank_map,
        kernel_prev_rank=kernel.dim,
        coker_rank=coker_rank,
        audits=tuple(audits),
    )


def _check_lifts(problem, prev, kernel):
    stage = problem.stage
    if not problem.lifts:
        if kernel.dim:
            raise UnderdeterminedBoundaryError(
                f"kernel of (i,j) in degree {problem.degree - 1} has dimension "
                f"{kernel.dim} but no lifts were declared",
                stage,
            )
        return []
    if prev is None or kernel.dim == 0:
        raise UnderdeterminedBoundaryError(
            "lifts declared but d is the zero map in degree " f"{problem.degree}", stage
        )
    source = problem.intersection_prev
    projected = []
    for lift in problem.lifts:
        vector = source.projection @ source.vector(lift.boundary)
        if not kernel.contains(vector):
            raise UnderdeterminedBoundaryError(
                f"boundary {lift.boundary.render()} of {lift.label.display} is not a "
                "cycle of both pieces",
                stage,
            )
        projected.append(vector)
    if Subspace.span(projected, kernel.ambient_dim).dim != len(projected):
        raise UnderdeterminedBoundaryError("declared boundaries are dependent", stage)
    if len(projected) != kernel.dim:
        raise UnderdeterminedBoundaryError(
            f"{len(projected)} lifts declared for a kernel of dimension {kernel.dim}",
            stage,
        )
    return [(lift.label, lift.boundary) for lift in problem.lifts]


def retire(ledger, space):
    """Mark relations mentioning a label that vanishes in ``space``."""
    result = []
    for relation in ledger:
        dead = any(label in space and space.is_zero(label) for label in relation.labels())
        result.append(replace(relation, retired=True) if dead else relation)
    return result


class SignedUnionFind:
    """Union-find over labels where each element is +-1 times its root."""

    ZERO_NODE = "0"

    def __init__(self):
        self.parent = {}
        self.sign = {}
        self.rank = {}

    def add(self, item):
        if item not in self.parent:
            self.parent[item] = item
            self.sign[item] = 1
            self.rank[item] = 0

    def find(self, item):
        """(root, s) with item = s * root; compresses the path."""
        self.add(item)
        path = []
        while self.parent[item] != item:
            path.append(item)
            item = self.parent[item]
        root = item
        for node in reversed(path):
            parent = self.parent[node]
            if parent != root:
                self.sign[node] *= self.sign[parent]
            self.parent[node] = root
        return root, (self.sign[path[0]] if path else 1)

    def union(self, a, b, s):
        """Record a = s * b. Returns False when the class collapses to zero."""
        root_a, sa = self.find(a)
        root_b, sb = self.find(b)
        relative = sa * s * sb
        if root_a == root_b:
            if relative == 1:
                return True
            self._attach(root_a, self.ZERO_NODE, 1)
            return False
        self._attach(root_a, root_b, relative)
        return True

    def _attach(self, root_a, root_b, relative):
        root_b, sb = self.find(root_b)
        root_a, sa = self.find(root_a)
        if root_a == root_b:
            return
        if self.ZERO_NODE in (root_a, root_b):
            zero, other = (root_a, root_b) if root_a == self.ZERO_NODE else (root_b, root_a)
            self.parent[other] = zero
            self.sign[other] = 1
            return
        if self.rank[root_a] < self.rank[root_b]:
            self.parent[root_a] = root_b
            self.sign[root_a] = relative * sa * sb
        else:
            self.parent[root_b] = root_a
            self.sign[root_b] = relative * sa * sb
            if self.rank[root_a] == self.rank[root_b]:
                self.rank[root_a] += 1

    def is_zero(self, item):
        return self.find(item)[0] == self.ZERO_NODE


@dataclass(frozen=True)
class EqualityClass:
    representative: object
    members: tuple
    is_zero: bool = False

    def render(self):
        names = []
        for sign, label in self.members:
            names.append(("-" if sign < 0 else "") + label.display)
        return " = ".join(names) + (" = 0" if self.is_zero else "")


@dataclass(frozen=True)
class Closure:
    classes: tuple
    affine: tuple

    def class_of(self, label):
        for equality in self.classes:
            if any(member == label for _, member in equality.members):
                return equality
        return None


def _simple(relation):
    """(a, s, b) for a = s*b, (a, 0, None) for a = 0, None otherwise."""
    terms = relation.difference().terms
    if len(terms) == 1:
        return terms[0][0], 0, None
    if len(terms) == 2:
        (a, ca), (b, cb) = terms
        if abs(ca) == abs(cb):
            return a, -1 if ca == cb else 1, b
    return None


def relation_closure(ledger, surviving=()):
    """Equality classes of the simple relations, multi-term ones kept as affine."""
    forest = SignedUnionFind()
    affine = []
    surviving = set(surviving)
    for relation in ledger:
        for label in relation.labels():
            forest.add(label)
        simple = _simple(relation)
        if simple is None:
            if not relation.difference().is_zero():
                affine.append(relation)
            continue
        a, s, b = simple
        if b is None:
            forest.union(a, forest.ZERO_NODE, 1)
        elif not forest.union(a, b, s):
            logger.debug("%s forces %s to vanish", relation.render(), a.display)

    for label in surviving:
        if label in forest.parent and forest.is_zero(label):
            raise ContradictionError(
                f"ledger forces the surviving generator {label.display} to vanish"
            )

    groups = {}
    for label in forest.parent:
        if label == forest.ZERO_NODE:
            continue
        root, sign = forest.find(label)
        groups.setdefault(root, []).append((sign, label))

    classes = []
    for root, members in groups.items():
        if len(members) == 1 and root != forest.ZERO_NODE:
            continue
        members.sort(key=lambda item: item[1].sort_key())
        lead_sign, representative = members[0]
        normalized = tuple((sign * lead_sign, label) for sign, label in members)
        classes.append(
            EqualityClass(representative, normalized, root == forest.ZERO_NODE)
        )
    classes.sort(key=lambda c: c.representative.sort_key())
    return Closure(tuple(classes), tuple(affine))
