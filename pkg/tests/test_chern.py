import cmath
import unittest
from fractions import Fraction

from app.chern import (
    C1Rule,
    ClutchingSpec,
    EigenLine,
    c1_table,
    clutching_loop,
    clutching_winding,
    concatenate,
    pair_c1_fixed_torus,
    pair_c1_gradient_torus,
    pair_c1_invariant_sphere,
    pair_c1_level_class,
    rule_for,
    section,
    winding_number,
)
from app.cobordism import FixedTorusDatum
from app.errors import UnsupportedWeightError, WrongRuleError
from app.utils import parse_label


def label(name):
    return parse_label(name)[1]


def circle(degree):
    return lambda t: cmath.exp(2j * cmath.pi * degree * t)


DATA = {
    Fraction(1): FixedTorusDatum(Fraction(1), (1, 3), 0, 0),
    Fraction(2): FixedTorusDatum(Fraction(2), (2, 4), -1, 1),
    Fraction(5): FixedTorusDatum(Fraction(5), (1, 3), -1, 1),
    Fraction(6): FixedTorusDatum(Fraction(6), (2, 4), 0, 0),
}


class TestRules(unittest.TestCase):
    def test_rule_per_kind(self):
        expected = {
            "L12^0": C1Rule.LEVEL_SPLITTING,
            "(L13-L24)^3.5": C1Rule.LEVEL_SPLITTING,
            "Z24^2": C1Rule.FIXED_TORUS_SUM,
            "T1+3": C1Rule.CLUTCHING_WINDING,
            "G61": C1Rule.INVARIANT_SPHERE_WEIGHTS,
        }
        for name, rule in expected.items():
            self.assertIs(rule_for(label(name)), rule, name)

    def test_no_rule(self):
        for name in ("ZF^1+", "gamma", "pt^0"):
            with self.assertRaises(WrongRuleError):
                rule_for(label(name))

    def test_wrong_rule_applied(self):
        spec = ClutchingSpec.from_gluing((3, 4, 1, 2))
        with self.assertRaises(WrongRuleError):
            pair_c1_level_class(label("Z24^2"))
        with self.assertRaises(WrongRuleError):
            pair_c1_gradient_torus(label("L12^0"), spec)
        with self.assertRaises(WrongRuleError):
            pair_c1_invariant_sphere(label("T1+3"), (0,) * 6, (0,) * 6)


class TestPairings(unittest.TestCase):
    def test_fixed_torus(self):
        for datum in DATA.values():
            self.assertEqual(pair_c1_fixed_torus(datum), 0)

    def test_invariant_sphere(self):
        bottom, top = DATA[Fraction(1)].tangent_weights(), DATA[Fraction(6)].tangent_weights()
        self.assertEqual(pair_c1_invariant_sphere(label("G61"), bottom, top), 0)
        self.assertEqual(
            pair_c1_invariant_sphere(label("G61"), (0, 0, -1, 0, 0, 0), (0, 0, 0, 1, 0, 0)), 2
        )

    def test_weight_errors(self):
        with self.assertRaises(UnsupportedWeightError):
            pair_c1_invariant_sphere(label("G61"), (0, 0, -2, 1, 0, 0), (0,) * 6)
        with self.assertRaises(UnsupportedWeightError):
            pair_c1_invariant_sphere(label("G61"), (0, 0, -1, 1), (0,) * 6)
        with self.assertRaises(UnsupportedWeightError):
            pair_c1_invariant_sphere(label("G61"), (0,) * 6, (0,) * 6, sphere_weight=2)

    def test_gradient_tori(self):
        spec = ClutchingSpec.from_gluing((3, 4, 1, 2))
        self.assertEqual([line.eigenvalue for line in spec.lines], [1, 1, -1])
        self.assertEqual(spec.weights, (0, 0, 0))
        for name in ("T1+3", "T2+4"):
            self.assertEqual(pair_c1_gradient_torus(label(name), spec), 0)

    def test_twisted_control(self):
        spec = ClutchingSpec.from_gluing((3, 4, 1, 2), weights={3: 1})
        self.assertEqual(pair_c1_gradient_torus(label("T1+3"), spec), 1)
        self.assertEqual([clutching_winding(spec, line) for line in spec.lines], [0, 1, 0])

    def test_negative_eigenline_degree_is_derived(self):
        spec = ClutchingSpec.from_gluing((3, 4, 1, 2), weights={1: -1, 2: -1})
        (negative,) = [line for line in spec.lines if line.eigenvalue == -1]
        loop = clutching_loop(spec, negative)
        self.assertAlmostEqual(loop(0.0), 1)
        self.assertAlmostEqual(loop(0.25), -1j)
        self.assertEqual(clutching_winding(spec, negative), -1)
        self.assertEqual(pair_c1_gradient_torus(label("T2+4"), spec), -2)

    def test_section_turns_to_the_eigenvalue(self):
        spec = ClutchingSpec.from_gluing((3, 4, 1, 2))
        for line in spec.lines:
            frame = section(line, spec.length)
            self.assertAlmostEqual(frame(0.0), 1)
            self.assertAlmostEqual(frame(float(spec.length)), line.eigenvalue)
        (negative,) = [line for line in spec.lines if line.eigenvalue == -1]
        self.assertAlmostEqual(section(negative, spec.length)(3.5), 1j)

    def test_weights_must_respect_the_gluing(self):
        with self.assertRaises(WrongRuleError):
            ClutchingSpec.from_gluing((3, 4, 1, 2), weights={1: 1})
        with self.assertRaises(WrongRuleError):
            ClutchingSpec.from_gluing((3, 4, 1, 2), weights={4: 1})

    def test_non_eigenline_rejected(self):
        spec = ClutchingSpec.from_gluing((3, 4, 1, 2))
        with self.assertRaises(WrongRuleError):
            clutching_winding(spec, EigenLine((Fraction(1), Fraction(0), Fraction(0)), 1))

    def test_gluing_must_be_complex_linear(self):
        with self.assertRaises(WrongRuleError):
            ClutchingSpec.from_gluing((2, 1, 3, 4))
        with self.assertRaises(WrongRuleError):
            ClutchingSpec.from_gluing((1, 2, 3))


class TestWinding(unittest.TestCase):
    def test_degrees(self):
        for degree in (-3, -1, 0, 1, 2, 5):
            self.assertEqual(winding_number(circle(degree)), degree)

    def test_additivity(self):
        for first in (-2, 0, 1, 3):
            for second in (-1, 0, 2):
                loop = concatenate(circle(first), circle(second))
                self.assertEqual(winding_number(loop), first + second)

    def test_loop_through_zero(self):
        with self.assertRaises(WrongRuleError):
            winding_number(lambda t: t - 0.5)


class TestTable(unittest.TestCase):
    def test_mcduff_generators(self):
        names = ["L12^0", "L13^0", "L14^0", "L24^0", "Z24^2", "T1+3", "T2+4", "G61"]
        rows = c1_table([label(n) for n in names], DATA, ClutchingSpec.from_gluing((3, 4, 1, 2)))
        self.assertEqual([row.name for row in rows], names)
        self.assertTrue(all(row.value == 0 for row in rows))
        reconstructed = {row.name for row in rows if row.reconstructed}
        self.assertEqual(reconstructed, {"L12^0", "L13^0", "L14^0", "L24^0", "G61"})


if __name__ == "__main__":
    unittest.main()
