"""
Pairings of the first Chern class of the tangent bundle with H_2 generators.

Each generator kind has exactly one rule:

- LevelSplitting: classes living in a regular level set pair to zero.
- FixedTorusSum: c1(TZ) + c1(nu-) + c1(nu+) over a fixed torus.
- ClutchingWinding: gradient tori are mapping tori of the gluing; the
  tangent bundle splits into eigenlines of the gluing action and the pairing
  is the sum of the clutching degrees.
- InvariantSphereWeights: difference of the isotropy weight sums at the two
  fixed ends, divided by the rotation weight of the sphere.
"""

import cmath
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from app.errors import (
    InconsistentScenarioError,
    UnsupportedWeightError,
    WrongRuleError,
)
from app.exact_linalg import ONE, ZERO, RationalMatrix, kernel_basis
from app.labels import LEVEL_RESIDENT, LabelKind

logger = logging.getLogger(__name__)

WINDING_SAMPLES = 720


class C1Rule(str, Enum):
    LEVEL_SPLITTING = "LevelSplitting"
    FIXED_TORUS_SUM = "FixedTorusSum"
    CLUTCHING_WINDING = "ClutchingWinding"
    INVARIANT_SPHERE_WEIGHTS = "InvariantSphereWeights"


RULES = {
    LabelKind.LEVEL_TORUS: C1Rule.LEVEL_SPLITTING,
    LabelKind.COMBINATION_LIFT: C1Rule.LEVEL_SPLITTING,
    LabelKind.FIBER_CLASS: C1Rule.LEVEL_SPLITTING,
    LabelKind.FIXED_TORUS: C1Rule.FIXED_TORUS_SUM,
    LabelKind.GRADIENT_TORUS: C1Rule.CLUTCHING_WINDING,
    LabelKind.INVARIANT_SPHERE: C1Rule.INVARIANT_SPHERE_WEIGHTS,
}

RECONSTRUCTED = frozenset({C1Rule.LEVEL_SPLITTING, C1Rule.INVARIANT_SPHERE_WEIGHTS})


def rule_for(label):
    try:
        return RULES[label.kind]
    except KeyError:
        raise WrongRuleError(f"no c1 rule for {label.kind.value} {label.display}") from None


@dataclass(frozen=True)
class EigenLine:
    vector: tuple
    eigenvalue: int


@dataclass(frozen=True)
class ClutchingSpec:
    """Gluing action on the complexified tangent fibre of a mapping torus.

    ``weights`` are the orbit weights the gluing picks up on each complex
    coordinate: going once around an orbit multiplies z_k by
    exp(2 pi i w_k t) before the permutation acts.
    """

    action: RationalMatrix
    lines: tuple
    length: Fraction = Fraction(7)
    weights: tuple = ()

    @classmethod
    def from_gluing(cls, gluing, length=7, weights=None):
        """Complex-linear action of a coordinate permutation.

        Base coordinates (2k-1, 2k) form the complex coordinate z_k; one
        extra coordinate for the moment and orbit directions is fixed.
        ``weights`` maps complex coordinates (1-based) to orbit weights.
        """
        n = len(gluing)
        if n % 2:
            raise WrongRuleError("base coordinates do not pair into complex lines")
        size = n // 2 + 1
        rows = [[ZERO] * size for _ in range(size)]
        for k in range(n // 2):
            first, second = gluing[2 * k], gluing[2 * k + 1]
            if first % 2 != 1 or second != first + 1:
                raise WrongRuleError(
                    f"gluing {list(gluing)} does not act complex-linearly on "
                    f"z{k + 1}"
                )
            rows[(first - 1) // 2][k] = ONE
        rows[size - 1][size - 1] = ONE
        action = RationalMatrix.from_rows(rows)
        weights = weights or {}
        unknown = [k for k in weights if not 1 <= k <= size]
        if unknown:
            raise WrongRuleError(f"no complex coordinate z{unknown[0]}")
        per_coordinate = tuple(int(weights.get(k + 1, 0)) for k in range(size))
        for i, row in enumerate(action.entries):
            for j, entry in enumerate(row):
                if entry and per_coordinate[i] != per_coordinate[j]:
                    raise WrongRuleError(
                        f"orbit weights of z{j + 1} and z{i + 1} differ across the gluing"
                    )
        return cls(action, eigenlines(action), Fraction(length), per_coordinate)

    def transition(self, t):
        """Complex gluing matrix after travelling the fraction ``t`` of an orbit."""
        action = np.array(
            [[float(x) for x in row] for row in self.action.entries], dtype=complex
        )
        weights = self.weights or (0,) * self.action.rows
        phases = np.exp(2j * np.pi * np.array(weights, dtype=float) * t)
        return action @ np.diag(phases)


def eigenlines(action):
    """Split the action into +1 and -1 eigenlines."""
    size = action.rows
    identity = RationalMatrix.identity(size)
    lines = []
    for eigenvalue in (1, -1):
        shifted = RationalMatrix.from_rows(
            [
                [a - eigenvalue * b for a, b in zip(row, base)]
                for row, base in zip(action.entries, identity.entries)
            ]
        )
        for vector in kernel_basis(shifted).basis:
            lines.append(EigenLine(vector, eigenvalue))
    if len(lines) != size:
        raise WrongRuleError("gluing action is not an involution")
    return tuple(lines)


def winding_number(loop, samples=WINDING_SAMPLES):
    """Degree of a loop [0, 1] -> C* sampled at ``samples`` points."""
    grid = np.linspace(0.0, 1.0, samples + 1)
    values = np.array([loop(t) for t in grid], dtype=complex)
    if np.any(np.abs(values) < 1e-12):
        raise WrongRuleError("clutching loop passes through zero")
    phases = np.unwrap(np.angle(values))
    return int(np.rint((phases[-1] - phases[0]) / (2 * np.pi)))


def concatenate(first, second):
    """Loop product, the second loop rescaled to start where the first ends."""
    end, start = first(1.0), second(0.0)

    def loop(t):
        if t <= 0.5:
            return first(2 * t)
        return second(2 * t - 1) * end / start

    return loop


def section(line, length):
    """Frame of the eigenline along the mapping circle; a half turn for -1 lines."""
    turns = 0 if line.eigenvalue == 1 else 1
    return lambda s: cmath.exp(1j * cmath.pi * turns * s / float(length))


def clutching_loop(spec, line):
    """Transition of the eigenline around an orbit, read in the section's frame.

    At the end of the mapping circle the section has turned to the
    eigenvalue, so dividing by it closes the frame up.
    """
    vector = np.array([float(x) for x in line.vector])
    norm = float(vector @ vector)
    end = section(line, spec.length)(float(spec.length))
    if abs(end - line.eigenvalue) > 1e-9:
        raise WrongRuleError(f"section of {line.vector} does not reach its eigenvalue")

    def loop(t):
        return complex(vector @ spec.transition(t) @ vector) / norm / end

    if abs(loop(0.0) - 1) > 1e-9:
        raise WrongRuleError(f"section of {line.vector} does not close over the gluing")
    return loop


def clutching_winding(spec, line):
    """Degree of the eigenline subbundle over the mapping torus."""
    image = spec.action.apply(line.vector)
    if image != tuple(line.eigenvalue * x for x in line.vector):
        raise WrongRuleError(f"{line.vector} is not an eigenline of the gluing")
    return winding_number(clutching_loop(spec, line))


def pair_c1_level_class(label):
    if label.kind not in LEVEL_RESIDENT:
        raise WrongRuleError(f"{label.display} does not lie in a regular level")
    return 0


def pair_c1_fixed_torus(datum, tangent_c1=0):
    total = tangent_c1 + datum.c1_minus + datum.c1_plus
    if datum.c1_minus != -datum.c1_plus:
        raise InconsistentScenarioError(
            f"normal Chern numbers of Z at {datum.level} do not cancel"
        )
    return total


def pair_c1_gradient_torus(label, spec):
    if label.kind is not LabelKind.GRADIENT_TORUS:
        raise WrongRuleError(f"{label.display} is not a gradient torus")
    return sum(clutching_winding(spec, line) for line in spec.lines)


def _check_weights(weights, size):
    if len(weights) != size:
        raise UnsupportedWeightError(f"expected {size} weights, got {len(weights)}")
    for w in weights:
        if w not in (-1, 0, 1):
            raise UnsupportedWeightError(f"weight {w} is not semifree")


def pair_c1_invariant_sphere(label, bottom, top, sphere_weight=1, size=6):
    if label.kind is not LabelKind.INVARIANT_SPHERE:
        raise WrongRuleError(f"{label.display} is not an invariant sphere")
    _check_weights(bottom, size)
    _check_weights(top, size)
    if sphere_weight not in (-1, 1):
        raise UnsupportedWeightError(f"sphere weight {sphere_weight} is not semifree")
    value = Fraction(sum(top) - sum(bottom), sphere_weight)
    return int(value) if value.denominator == 1 else value


@dataclass(frozen=True)
class C1Row:
    name: str
    rule: C1Rule
    value: object

    @property
    def reconstructed(self):
        return self.rule in RECONSTRUCTED


def c1_table(generators, data, spec):
    """One row per generator; ``data`` maps critical levels to their FixedTorusDatum."""
    rows = []
    for label in generators:
        rule = rule_for(label)
        if rule is C1Rule.LEVEL_SPLITTING:
            value = pair_c1_level_class(label)
        elif rule is C1Rule.FIXED_TORUS_SUM:
            value = pair_c1_fixed_torus(data[label.level])
        elif rule is C1Rule.CLUTCHING_WINDING:
            value = pair_c1_gradient_torus(label, spec)
        else:
            value = pair_c1_invariant_sphere(
                label,
                data[label.level_to].tangent_weights(),
                data[label.level].tangent_weights(),
            )
        logger.debug("c1 on %s by %s: %s", label.display, rule.value, value)
        rows.append(C1Row(label.display, rule, value))
    return rows
