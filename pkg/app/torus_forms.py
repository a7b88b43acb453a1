"""
Cohomology and homology of the n-torus.

H*(T^n) is the exterior algebra on dx^1..dx^n. Forms and cycles are keyed by
strictly increasing index tuples; an unsorted tuple such as (4, 2) is folded
into its sorted form with the sign of the sorting permutation, so
sigma_42 = -sigma_24 and sigma_31 = -sigma_13.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from app.errors import DegreeMismatchError, DimensionMismatchError
from app.exact_linalg import ZERO, RationalMatrix, Subspace, as_fraction, kernel_basis


def permutation_sign(indices):
    """Sign of the permutation sorting ``indices``, 0 when an index repeats."""
    if len(set(indices)) != len(indices):
        return 0
    inversions = sum(
        1
        for a in range(len(indices))
        for b in range(a + 1, len(indices))
        if indices[a] > indices[b]
    )
    return -1 if inversions % 2 else 1


def basis_tuples(n, degree):
    """Sorted index tuples of degree ``degree`` in lexicographic order."""
    return list(combinations(range(1, n + 1), degree))


def _normalize(n, degree, terms):
    collected = {}
    for indices, coefficient in terms:
        indices = tuple(indices)
        if len(indices) != degree:
            raise DegreeMismatchError(
                f"term {indices} does not have degree {degree}"
            )
        if any(i < 1 or i > n for i in indices):
            raise DimensionMismatchError(f"index out of range 1..{n} in {indices}")
        sign = permutation_sign(indices)
        if sign == 0:
            continue
        key = tuple(sorted(indices))
        collected[key] = collected.get(key, ZERO) + sign * as_fraction(coefficient)
    return tuple(sorted((k, c) for k, c in collected.items() if c != 0))


class _Graded:
    """Shared storage for forms and cycles on T^n."""

    symbol = "?"

    def __init__(self, n, degree, terms=()):
        if degree < 0 or degree > n:
            raise DegreeMismatchError(f"degree {degree} is outside 0..{n}")
        self.n = n
        self.degree = degree
        if isinstance(terms, dict):
            terms = terms.items()
        self.terms = _normalize(n, degree, terms)

    @classmethod
    def basis(cls, n, *indices):
        return cls(n, len(indices), [(indices, 1)])

    @classmethod
    def from_vector(cls, n, degree, vector):
        return cls(n, degree, zip(basis_tuples(n, degree), vector))

    def as_dict(self):
        return dict(self.terms)

    def coefficient(self, indices):
        sign = permutation_sign(tuple(indices))
        return sign * self.as_dict().get(tuple(sorted(indices)), ZERO)

    def to_vector(self):
        table = self.as_dict()
        return tuple(table.get(k, ZERO) for k in basis_tuples(self.n, self.degree))

    def is_zero(self):
        return not self.terms

    def _check_compatible(self, other):
        if self.n != other.n:
            raise DimensionMismatchError(f"tori of dimension {self.n} and {other.n}")

    def __add__(self, other):
        self._check_compatible(other)
        if self.degree != other.degree:
            raise DegreeMismatchError("cannot add classes of different degree")
        return type(self)(self.n, self.degree, self.terms + other.terms)

    def __neg__(self):
        return type(self)(self.n, self.degree, [(k, -c) for k, c in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = as_fraction(factor)
        return type(self)(self.n, self.degree, [(k, factor * c) for k, c in self.terms])

    def __rmul__(self, factor):
        return self.scale(factor)

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and (self.n, self.degree, self.terms) == (other.n, other.degree, other.terms)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.n, self.degree, self.terms))

    def render(self):
        if not self.terms:
            return "0"
        parts = []
        for indices, coefficient in self.terms:
            magnitude = abs(coefficient)
            name = self.symbol + "".join(str(i) for i in indices)
            if magnitude != 1:
                name = f"{magnitude}*{name}"
            sign = "-" if coefficient < 0 else "+"
            parts.append((sign, name))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, name in parts[1:]:
            text += f"{sign}{name}"
        return text

    def __repr__(self):
        return f"{type(self).__name__}({self.render()!r}, n={self.n})"


class Form(_Graded):
    """A class in H^degree(T^n), written over sigma_I = dx^I."""

    symbol = "s"


class Cycle(_Graded):
    """A class in H_degree(T^n), written over the coordinate tori L_I."""

    symbol = "L"


def sigma(n, *indices):
    return Form.basis(n, *indices)


def torus(n, *indices):
    return Cycle.basis(n, *indices)


def zero_form(n, degree):
    return Form(n, degree)


def wedge(a, b):
    a._check_compatible(b)
    degree = a.degree + b.degree
    if degree > a.n:
        raise DegreeMismatchError(
            f"wedge of degrees {a.degree} and {b.degree} exceeds the torus dimension {a.n}"
        )
    terms = [(ia + ib, ca * cb) for ia, ca in a.terms for ib, cb in b.terms]
    return Form(a.n, degree, terms)


def pair(form, cycle):
    """Kronecker pairing: the dual bases satisfy <sigma_I, L_J> = delta_IJ."""
    form._check_compatible(cycle)
    if form.degree != cycle.degree:
        raise DegreeMismatchError(
            f"cannot pair a degree-{form.degree} form with a degree-{cycle.degree} cycle"
        )
    table = cycle.as_dict()
    return sum((c * table.get(k, ZERO) for k, c in form.terms), Fraction(0))


def pairing_matrix(forms, n, degree):
    for f in forms:
        if f.degree != degree:
            raise DegreeMismatchError(f"form {f.render()} is not of degree {degree}")
    return RationalMatrix(
        len(forms), comb(n, degree), tuple(f.to_vector() for f in forms)
    )


def annihilator(forms, degree, n=None):
    """All degree-k cycles pairing to zero with every listed form."""
    forms = list(forms)
    if n is None:
        if not forms:
            raise DimensionMismatchError("torus dimension needed for an empty form list")
        n = forms[0].n
    return kernel_basis(pairing_matrix(forms, n, degree))


def annihilator_cycles(forms, degree, n=None):
    forms = list(forms)
    space = annihilator(forms, degree, n)
    n = forms[0].n if n is None else n
    return [Cycle.from_vector(n, degree, v) for v in space.basis]


def wedge_map_matrix(euler, k):
    """Matrix of e ^ : Lambda^k -> Lambda^(k+2) in the sorted-tuple bases."""
    n = euler.n
    sources = basis_tuples(n, k)
    target_degree = k + euler.degree
    if target_degree > n:
        return RationalMatrix.zeros(0, len(sources))
    columns = [wedge(euler, Form.basis(n, *idx)).to_vector() for idx in sources]
    return RationalMatrix.from_columns(columns, comb(n, target_degree))


def forms_from_subspace(space, n, degree):
    return [Form.from_vector(n, degree, v) for v in space.basis]


def complement(n, indices):
    return tuple(i for i in range(1, n + 1) if i not in indices)


def poincare_dual(cycle):
    """Poincare dual form: PD(L_I) = sign * sigma_{I^c} with L_I . L_{I^c} oriented."""
    n = cycle.n
    terms = []
    for indices, coefficient in cycle.terms:
        rest = complement(n, indices)
        terms.append((rest, permutation_sign(rest + indices) * coefficient))
    return Form(n, n - cycle.degree, terms)


def intersection_number(a, b):
    """Oriented intersection number of complementary-degree cycles on T^n."""
    a._check_compatible(b)
    if a.degree + b.degree != a.n:
        return Fraction(0)
    table = b.as_dict()
    total = Fraction(0)
    for ia, ca in a.terms:
        for ib, cb in table.items():
            total += ca * cb * permutation_sign(ia + ib)
    return total


def displaceable(cycle, obstacle):
    """True when every torus of ``cycle`` can be pushed off ``obstacle``.

    Circles always miss a codimension-two torus in general position; a
    coordinate 2-torus misses another exactly when their intersection number
    vanishes.
    """
    if cycle.degree + obstacle.degree < cycle.n:
        return True
    for indices, _ in cycle.terms:
        if intersection_number(Cycle.basis(cycle.n, *indices), obstacle) != 0:
            return False
    return True


def permute_indices(graded, mapping):
    """Relabel coordinates by ``mapping`` (dict i -> j), keeping parity signs."""
    return type(graded)(
        graded.n,
        graded.degree,
        [(tuple(mapping[i] for i in indices), c) for indices, c in graded.terms],
    )
