import re
from fractions import Fraction

from app.errors import HomologyError, ScenarioParseError
from app.labels import (
    Combination,
    LabelKind,
    combination_lift,
    fiber_class,
    fixed_torus,
    gradient_torus,
    invariant_sphere,
    level_torus,
    loop,
    point,
    sphere_fiber,
    sphere_section,
)
from app.torus_forms import Cycle, Form, permutation_sign

LEVEL = r"-?\d+(?:\.\d+)?(?:/\d+)?"
_LEVEL_RE = re.compile(rf"^{LEVEL}$")
_COEFFICIENT = r"(?:(\d+(?:/\d+)?)\*)?"

_LABEL_PATTERNS = [
    ("fiber", re.compile(rf"^L(\d?)F\^({LEVEL})$")),
    ("level", re.compile(rf"^L(\d+)\^({LEVEL})$")),
    ("combination", re.compile(rf"^\(([^()]+)\)\^({LEVEL})$")),
    ("sphere_fiber", re.compile(rf"^Z(\d?)F\^({LEVEL})([+-])$")),
    ("sphere_section", re.compile(rf"^Z(\d+)\^({LEVEL})([+-])$")),
    ("fixed", re.compile(rf"^Z(\d+)\^({LEVEL})$")),
    ("gradient_fiber", re.compile(r"^TF$")),
    ("gradient", re.compile(r"^T(\d(?:\+\d)*)$")),
    ("sphere", re.compile(r"^G(\d)(\d)$")),
    ("sphere_long", re.compile(rf"^G\[({LEVEL}),({LEVEL})\]$")),
    ("point", re.compile(rf"^(pt|ptZ|ptS)\^({LEVEL})([+-]?)$")),
    ("loop", re.compile(r"^[a-z][a-z0-9_]*$")),
]


def validate_level(text):
    """
    Validate an exact level literal such as 3, 1.5 or 7/2.
    Exponents, inf and nan are not levels.
    """
    if not text or not isinstance(text, str):
        return False
    return bool(_LEVEL_RE.match(text.strip()))


def parse_level(text):
    """Parse a level literal into a Fraction without passing through a float."""
    if not validate_level(text):
        raise ScenarioParseError(f"not an exact level: {text!r}")
    return Fraction(text.strip())


def parse_indices(text):
    if not text.isdigit():
        raise ScenarioParseError(f"indices must be digits: {text!r}")
    return tuple(int(ch) for ch in text)


def _parse_graded(text, n, degree, symbol, cls):
    body = re.sub(r"\s+", "", text or "")
    if body in ("", "0"):
        if degree is None:
            raise ScenarioParseError("the degree of a zero class is needed")
        return cls(n, degree)
    term = re.compile(rf"([+-]?){_COEFFICIENT}{symbol}(\d+)")
    position, terms = 0, []
    for match in term.finditer(body):
        if match.start() != position:
            break
        sign, coefficient, digits = match.groups()
        value = Fraction(coefficient) if coefficient else Fraction(1)
        if sign == "-":
            value = -value
        terms.append((parse_indices(digits), value))
        position = match.end()
    if position != len(body) or not terms:
        raise ScenarioParseError(f"cannot parse {text!r} over {symbol}<indices>")
    degrees = {len(indices) for indices, _ in terms}
    if len(degrees) != 1 or (degree is not None and degrees != {degree}):
        raise ScenarioParseError(f"{text!r} is not homogeneous of degree {degree}")
    try:
        return cls(n, degrees.pop(), terms)
    except (ValueError, HomologyError) as exc:
        raise ScenarioParseError(str(exc)) from exc


def parse_form(text, n, degree=2):
    """Forms such as '-s31 - s42', '2*s13' or '0'."""
    return _parse_graded(text, n, degree, "s", Form)


def parse_cycle(text, n, degree=None):
    """Cycles such as 'L13-L24' or 'L1'."""
    return _parse_graded(text, n, degree, "L", Cycle)


def _oriented(indices):
    sign = permutation_sign(indices)
    if sign == 0:
        raise ScenarioParseError(f"repeated index in {indices}")
    return sign, tuple(sorted(indices))


def _side(text):
    return 1 if text == "+" else -1


def parse_label(text, n=4):
    """Parse a generator name into (sign, GeneratorLabel); L42^0 gives (-1, L24^0)."""
    text = (text or "").strip()
    for kind, pattern in _LABEL_PATTERNS:
        match = pattern.match(text)
        if not match:
            continue
        groups = match.groups()
        if kind == "fiber":
            index = int(groups[0]) if groups[0] else None
            return 1, fiber_class(index, parse_level(groups[1]))
        if kind == "level":
            sign, indices = _oriented(parse_indices(groups[0]))
            return sign, level_torus(indices, parse_level(groups[1]))
        if kind == "combination":
            cycle = parse_cycle(groups[0], n)
            lead = cycle.terms[0][1]
            return lead, combination_lift(cycle.scale(1 / lead), parse_level(groups[1]))
        if kind == "sphere_fiber":
            index = int(groups[0]) if groups[0] else None
            return 1, sphere_fiber(index, parse_level(groups[1]), _side(groups[2]))
        if kind == "sphere_section":
            sign, indices = _oriented(parse_indices(groups[0]))
            return sign, sphere_section(indices, parse_level(groups[1]), _side(groups[2]))
        if kind == "fixed":
            sign, indices = _oriented(parse_indices(groups[0]))
            return sign, fixed_torus(indices, parse_level(groups[1]))
        if kind == "gradient_fiber":
            return 1, gradient_torus(())
        if kind == "gradient":
            indices = tuple(sorted(int(i) for i in groups[0].split("+")))
            return 1, gradient_torus(indices)
        if kind in ("sphere", "sphere_long"):
            return 1, invariant_sphere(parse_level(groups[0]), parse_level(groups[1]))
        if kind == "point":
            side = _side(groups[2]) if groups[2] else 0
            return 1, point(parse_level(groups[1]), groups[0], side)
        return 1, loop(text)
    raise ScenarioParseError(f"unknown generator name {text!r}")


def parse_combination(text, n=4):
    """Signed sums of generator names: '-pt^0 + pt^3.5', 'L1^0 - 2*L1^3.5'.

    Operators between terms must be surrounded by spaces, since '+' and '-'
    also end sphere-bundle names such as 'ZF^1+'.
    """
    text = (text or "").strip()
    if text == "0":
        return Combination()
    pieces = re.split(r"\s+([+-])\s+", text)
    signs, terms = ["+"] + pieces[1::2], pieces[0::2]
    pairs = []
    for sign, term in zip(signs, terms):
        factor = Fraction(-1 if sign == "-" else 1)
        if term.startswith("-"):
            factor, term = -factor, term[1:]
        match = re.match(r"^(\d+(?:/\d+)?)\*(.+)$", term)
        if match:
            factor *= Fraction(match.group(1))
            term = match.group(2)
        orientation, label = parse_label(term, n)
        pairs.append((label, factor * orientation))
    return Combination.from_pairs(pairs)


def parse_lift(text, n=4):
    """'stage : label : degree : boundary' into its four parts."""
    parts = [part.strip() for part in (text or "").split(":")]
    if len(parts) != 4:
        raise ScenarioParseError(
            f"lift {text!r} needs 'stage : label : degree : boundary'"
        )
    stage, name, degree, boundary = parts
    if not degree.isdigit():
        raise ScenarioParseError(f"lift degree {degree!r} is not a natural number")
    sign, label = parse_label(name, n)
    if sign != 1:
        raise ScenarioParseError(f"lift name {name!r} must be written in sorted order")
    return stage, label, int(degree), parse_combination(boundary, n)


def is_label_name(text):
    try:
        parse_label(text)
    except ScenarioParseError:
        return False
    return True


def describe_label(label):
    """Flat dictionary of a label for JSON responses."""
    payload = {"name": label.display, "kind": label.kind.value}
    if label.indices:
        payload["indices"] = list(label.indices)
    if label.level is not None:
        payload["level"] = str(label.level)
    if label.kind is LabelKind.INVARIANT_SPHERE:
        payload["level_to"] = str(label.level_to)
    return payload
