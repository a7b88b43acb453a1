"""
Scenario files describing an S^1-manifold glued from moment-map pieces.

A scenario is a line-oriented ``key = value`` text::

    name = mcduff
    base_dim = 4
    range = 0 7
    interval = 1 2 : -s42          # Euler class of every level in (1, 2)
    critical = 1 : L13             # fixed torus at level 1 over L13
    gluing = 3 4 1 2               # coordinate i of level end goes to gluing[i]
    samples = 0 1.5 3.5 5.5 7      # regular levels used as piece boundaries
    cut = 3.5                      # the two unions meet here
    symmetry = reflect             # i -> n+1-i, s -> end-s maps the scenario to itself
    lift = attach2@1 : L24^0 : 2 : ZF^1+

Forms use ``s<indices>``, cycles ``L<indices>``; levels are exact decimal or
p/q literals. Lines starting with ``#`` and trailing comments are ignored.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from app.cobordism import FixedTorusDatum, euler_jump_matches, normal_chern
from app.errors import InconsistentScenarioError, ScenarioParseError
from app.labels import format_level
from app.mayer_vietoris import BoundaryLift
from app.torus_forms import permute_indices
from app.utils import parse_cycle, parse_form, parse_level, parse_lift

logger = logging.getLogger(__name__)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
SYMMETRIES = ("reflect", "none")


@dataclass(frozen=True)
class RegularInterval:
    start: Fraction
    end: Fraction
    euler: object

    def contains(self, value):
        return self.start <= value <= self.end


@dataclass(frozen=True)
class CriticalLevel:
    level: Fraction
    image_indices: tuple


@dataclass(frozen=True)
class LiftDeclaration:
    stage: str
    label: object
    degree: int
    boundary: object

    def as_boundary_lift(self):
        return BoundaryLift(self.label, self.boundary)

    def render(self):
        return (
            f"{self.stage} : {self.label.display} : {self.degree} : "
            f"{self.boundary.render()}"
        )


@dataclass
class Scenario:
    name: str
    base_dim: int
    circle_range: tuple
    intervals: list
    critical: list
    gluing: tuple
    samples: list
    cut: Fraction
    symmetry: str = "none"
    lifts: list = field(default_factory=list)
    source_text: str = ""

    @property
    def start(self):
        return self.circle_range[0]

    @property
    def end(self):
        return self.circle_range[1]

    @property
    def critical_values(self):
        return [c.level for c in self.critical]

    def gluing_map(self):
        return {i + 1: target for i, target in enumerate(self.gluing)}

    def euler_at(self, value):
        value = Fraction(value)
        if value in self.critical_values:
            raise InconsistentScenarioError(
                f"level {format_level(value)} is critical and has no Euler class"
            )
        for interval in self.intervals:
            if interval.contains(value):
                return interval.euler
        raise InconsistentScenarioError(
            f"level {format_level(value)} is outside {self.circle_range}"
        )

    def _neighbours(self, level):
        below = [i for i in self.intervals if i.end == level]
        above = [i for i in self.intervals if i.start == level]
        if len(below) != 1 or len(above) != 1:
            raise InconsistentScenarioError(
                f"critical level {format_level(level)} is not between two intervals"
            )
        return below[0], above[0]

    def datum(self, level):
        for critical in self.critical:
            if critical.level == level:
                below, above = self._neighbours(level)
                c1_minus, c1_plus = normal_chern(
                    below.euler, above.euler, critical.image_indices
                )
                return FixedTorusDatum(level, critical.image_indices, c1_minus, c1_plus)
        raise InconsistentScenarioError(f"no critical level at {format_level(level)}")

    def data(self):
        return {c.level: self.datum(c.level) for c in self.critical}

    def lifts_by_stage(self):
        """{(stage, degree): (BoundaryLift, ...)} for the Mayer-Vietoris solver."""
        grouped = {}
        for lift in self.lifts:
            grouped.setdefault((lift.stage, lift.degree), []).append(
                lift.as_boundary_lift()
            )
        return {key: tuple(value) for key, value in grouped.items()}

    def critical_between(self, a, b):
        return [c for c in self.critical if a < c.level < b]

    def reflect_level(self, value):
        return self.end - (Fraction(value) - self.start)

    def reflect_index(self, index):
        return self.base_dim + 1 - index

    def validate(self):
        """Raise InconsistentScenarioError on the first violated constraint."""
        n = self.base_dim
        if self.start >= self.end:
            raise InconsistentScenarioError("empty circle range")
        ordered = sorted(self.intervals, key=lambda i: i.start)
        if not ordered or ordered[0].start != self.start or ordered[-1].end != self.end:
            raise InconsistentScenarioError("intervals do not cover the range")
        for first, second in zip(ordered, ordered[1:]):
            if first.end != second.start:
                raise InconsistentScenarioError(
                    f"gap or overlap at {format_level(first.end)}"
                )
            if first.end not in self.critical_values:
                raise InconsistentScenarioError(
                    f"interval boundary {format_level(first.end)} is not critical"
                )
        for interval in ordered:
            if interval.euler.n != n or interval.euler.degree != 2:
                raise InconsistentScenarioError(
                    f"Euler class {interval.euler.render()} is not a 2-form on T^{n}"
                )
        for critical in self.critical:
            below, above = self._neighbours(critical.level)
            if not euler_jump_matches(below.euler, above.euler, critical.image_indices):
                raise InconsistentScenarioError(
                    f"Euler class jump at {format_level(critical.level)} is not "
                    f"+-PD(L{''.join(map(str, critical.image_indices))})"
                )
            self.datum(critical.level)

        if sorted(self.gluing) != list(range(1, n + 1)):
            raise InconsistentScenarioError(f"gluing {self.gluing} is not a permutation")
        mapping = self.gluing_map()
        if any(mapping[mapping[i]] != i for i in mapping):
            raise InconsistentScenarioError("gluing is not an involution")
        if permute_indices(self.euler_at(self.end), mapping) != self.euler_at(self.start):
            raise InconsistentScenarioError(
                "gluing does not carry the Euler class of the end level to the start"
            )

        samples = self.samples
        if samples != sorted(set(samples)):
            raise InconsistentScenarioError("samples must be strictly increasing")
        if samples[0] != self.start or samples[-1] != self.end:
            raise InconsistentScenarioError("samples must include both ends of the range")
        for a, b in zip(samples, samples[1:]):
            if a in self.critical_values:
                raise InconsistentScenarioError(f"sample {format_level(a)} is critical")
            if len(self.critical_between(a, b)) > 1:
                raise InconsistentScenarioError(
                    f"more than one critical level in [{format_level(a)}, {format_level(b)}]"
                )
        if self.cut not in samples[1:-1]:
            raise InconsistentScenarioError("the cut must be an interior sample")
        if self.symmetry not in SYMMETRIES:
            raise InconsistentScenarioError(f"unknown symmetry {self.symmetry!r}")
        if self.symmetry == "reflect" and not self.is_reflection_symmetric():
            raise InconsistentScenarioError("scenario is not symmetric under reflection")
        logger.debug("scenario %s validated", self.name)
        return self

    def is_reflection_symmetric(self):
        """Reflection reverses the circle action, so Euler classes change sign."""
        n = self.base_dim
        mapping = {i: self.reflect_index(i) for i in range(1, n + 1)}
        for interval in self.intervals:
            middle = (interval.start + interval.end) / 2
            mirrored = self.euler_at(self.reflect_level(middle))
            if permute_indices(interval.euler, mapping) != -mirrored:
                return False
        for critical in self.critical:
            image = tuple(sorted(mapping[i] for i in critical.image_indices))
            partner = [
                c
                for c in self.critical
                if c.level == self.reflect_level(critical.level)
                and c.image_indices == image
            ]
            if not partner:
                return False
        if [self.reflect_level(s) for s in reversed(self.samples)] != self.samples:
            return False
        return self.reflect_level(self.cut) == self.cut


def _numbers(text, key):
    try:
        return [parse_level(token) for token in text.split()]
    except ScenarioParseError as exc:
        raise ScenarioParseError(f"{key}: {exc.message}") from exc


def parse_scenario(text):
    """Parse scenario text; the result is validated before it is returned."""
    values = {}
    intervals, critical, lifts = [], [], []
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(f"line {number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        lines.append((number, key, value))
        if key in ("name", "base_dim", "range", "gluing", "samples", "cut", "symmetry"):
            values[key] = value

    for key in ("base_dim", "range", "gluing", "samples", "cut"):
        if key not in values:
            raise ScenarioParseError(f"missing '{key}'")
    if not values["base_dim"].isdigit():
        raise ScenarioParseError("base_dim must be a natural number")
    n = int(values["base_dim"])

    for number, key, value in lines:
        try:
            if key == "interval":
                bounds, _, form = value.partition(":")
                start, end = _numbers(bounds, key)
                intervals.append(RegularInterval(start, end, parse_form(form, n)))
            elif key == "critical":
                level, _, image = value.partition(":")
                cycle = parse_cycle(image.strip(), n, 2)
                if len(cycle.terms) != 1 or cycle.terms[0][1] != 1:
                    raise ScenarioParseError(f"image {image.strip()!r} is not a coordinate torus")
                critical.append(CriticalLevel(parse_level(level), cycle.terms[0][0]))
            elif key == "lift":
                stage, label, degree, boundary = parse_lift(value, n)
                lifts.append(LiftDeclaration(stage, label, degree, boundary))
            elif key not in values:
                raise ScenarioParseError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ScenarioParseError(f"line {number}: {exc}") from exc
        except ScenarioParseError as exc:
            raise ScenarioParseError(f"line {number}: {exc.message}") from exc

    circle_range = _numbers(values["range"], "range")
    if len(circle_range) != 2:
        raise ScenarioParseError("range needs two levels")
    gluing = values["gluing"].split()
    if not all(token.isdigit() for token in gluing):
        raise ScenarioParseError("gluing must list coordinate indices")
    cut = _numbers(values["cut"], "cut")
    if len(cut) != 1:
        raise ScenarioParseError("cut needs exactly one level")

    scenario = Scenario(
        name=values.get("name", "scenario"),
        base_dim=n,
        circle_range=tuple(circle_range),
        intervals=intervals,
        critical=sorted(critical, key=lambda c: c.level),
        gluing=tuple(int(token) for token in gluing),
        samples=_numbers(values["samples"], "samples"),
        cut=cut[0],
        symmetry=values.get("symmetry", "none"),
        lifts=lifts,
        source_text=text,
    )
    return scenario.validate()


def load_scenario(path):
    return parse_scenario(Path(path).read_text())


def builtin_scenario(name, directory=None):
    """Load scenarios/<name>.scn; a relative ``directory`` is taken from the repository root."""
    directory = SCENARIO_DIR if directory is None else Path(directory)
    if not directory.is_absolute():
        directory = SCENARIO_DIR.parent / directory
    if not name.isidentifier():
        raise ScenarioParseError(f"invalid scenario name {name!r}")
    path = directory / f"{name}.scn"
    if not path.exists():
        raise ScenarioParseError(f"no built-in scenario named {name!r}")
    return load_scenario(path)


def mcduff_scenario():
    return builtin_scenario("mcduff")


def trivial_scenario():
    return builtin_scenario("trivial")
