import unittest
from fractions import Fraction

from app.errors import InconsistentScenarioError, UnderdeterminedBoundaryError
from app.cobordism import (
    FixedTorusDatum,
    cylinder,
    elementary_cobordism,
    euler_jump_matches,
    fixed_torus_homology,
    flow_relations,
    normal_chern,
)
from app.gysin import CircleBundle, LevelHomology
from app.mayer_vietoris import BoundaryLift
from app.torus_forms import torus
from app.utils import parse_combination, parse_form, parse_label

EULER = {
    "0": parse_form("0", 4),
    "-s42": parse_form("-s42", 4),
    "-s31 - s42": parse_form("-s31 - s42", 4),
    "-s31": parse_form("-s31", 4),
}


def level(euler, value):
    return LevelHomology(CircleBundle(4, EULER[euler], Fraction(value)))


def datum(value, below, above, indices):
    c1_minus, c1_plus = normal_chern(EULER[below], EULER[above], indices)
    return FixedTorusDatum(Fraction(value), indices, c1_minus, c1_plus)


def first_cobordism(lifts=None, toward=1):
    if lifts is None:
        lift = BoundaryLift(parse_label("L24^0")[1], parse_combination("ZF^1+"))
        lifts = {("attach2@1", 2): (lift,)}
    return elementary_cobordism(
        0,
        Fraction(3, 2),
        datum(1, "0", "-s42", (1, 3)),
        level("0", 0),
        level("-s42", Fraction(3, 2)),
        lifts,
        toward,
    )


class TestFixedTorusData(unittest.TestCase):
    def test_normal_chern_numbers(self):
        cases = [
            ("0", "-s42", (1, 3), (0, 0)),
            ("-s42", "-s31 - s42", (2, 4), (-1, 1)),
            ("-s31 - s42", "-s31", (1, 3), (-1, 1)),
            ("-s31", "0", (2, 4), (0, 0)),
        ]
        for below, above, indices, expected in cases:
            self.assertEqual(normal_chern(EULER[below], EULER[above], indices), expected)
            self.assertTrue(euler_jump_matches(EULER[below], EULER[above], indices))

    def test_wrong_jump(self):
        self.assertFalse(euler_jump_matches(EULER["0"], EULER["-s31"], (1, 3)))

    def test_antisymmetry(self):
        with self.assertRaises(InconsistentScenarioError):
            FixedTorusDatum(Fraction(1), (1, 3), 1, 1)

    def test_tangent_weights(self):
        self.assertEqual(datum(2, "-s42", "-s31 - s42", (2, 4)).tangent_weights(), (0, 0, -1, 1, 0, 0))

    def test_fixed_torus_homology(self):
        names = [
            [l.display for l in fixed_torus_homology((2, 4), Fraction(2), d).labels]
            for d in range(3)
        ]
        self.assertEqual(names, [["ptZ^2"], ["Z2^2", "Z4^2"], ["Z24^2"]])


class TestElementaryCobordism(unittest.TestCase):
    def test_first_cobordism(self):
        piece = first_cobordism()
        self.assertEqual(piece.ranks(), (1, 4, 8))
        self.assertEqual(piece.stage, "cobordism[0,1.5]")
        rendered = [relation.render() for relation in piece.ledger]
        self.assertIn("L13^0 = Z13^1", rendered)
        self.assertIn("L1^0 = Z1^1", rendered)
        self.assertTrue(all(passed for _, passed, _ in piece.audits))

    def test_missing_lift(self):
        with self.assertRaises(UnderdeterminedBoundaryError) as caught:
            first_cobordism(lifts={})
        self.assertEqual(caught.exception.stage, "attach2@1")

    def test_second_cobordism(self):
        piece = elementary_cobordism(
            Fraction(3, 2),
            Fraction(7, 2),
            datum(2, "-s42", "-s31 - s42", (2, 4)),
            level("-s42", Fraction(3, 2)),
            level("-s31 - s42", Fraction(7, 2)),
        )
        self.assertEqual(piece.ranks(), (1, 4, 6))
        relations = [r for r in piece.ledger if r.stage == "cobordism[1.5,3.5]"]
        self.assertIn(
            "(L13-L24)^3.5 = L13^1.5 - Z24^2", [r.render() for r in relations]
        )
        self.assertTrue(all(passed for _, passed, _ in piece.audits))

    def test_orientation_picks_the_modulus_side(self):
        lift = BoundaryLift(parse_label("L13^7")[1], parse_combination("ZF^6-"))
        last = elementary_cobordism(
            Fraction(11, 2),
            7,
            datum(6, "-s31", "0", (2, 4)),
            level("-s31", Fraction(11, 2)),
            level("0", 7),
            {("attach1@6", 2): (lift,)},
            toward=-1,
        )
        oriented = ((first_cobordism(), Fraction(3, 2), 0), (last, Fraction(11, 2), 7))
        for piece, near, far in oriented:
            self.assertTrue(all(passed for _, passed, _ in piece.audits))
            for relation in piece.ledger:
                if relation.modulus:
                    self.assertNotIn(near, {l.level for l in relation.modulus})
                    self.assertNotIn(far, {l.level for l in relation.lhs.labels()})
        self.assertEqual(last.ranks(), first_cobordism().ranks())
        with self.assertRaises(ValueError):
            first_cobordism(toward=0)

    def test_critical_level_outside_interval(self):
        with self.assertRaises(InconsistentScenarioError):
            elementary_cobordism(
                0,
                Fraction(1, 2),
                datum(1, "0", "-s42", (1, 3)),
                level("0", 0),
                level("-s42", Fraction(1, 2)),
            )


class TestFlow(unittest.TestCase):
    def test_flow_skips_obstructed_tori(self):
        below, above = level("0", 0).space(2), level("-s42", Fraction(3, 2)).space(2)
        flows = flow_relations("s", below, above, Fraction(3, 2), torus(4, 1, 3), 4)
        rendered = [r.render() for r in flows]
        self.assertIn("L12^0 = L12^1.5", rendered)
        self.assertIn("L1F^0 = L1F^1.5", rendered)
        self.assertFalse(any("L24^0" in text for text in rendered))

    def test_cylinder(self):
        piece = cylinder(level("0", 0), level("0", Fraction(7, 2)))
        self.assertEqual(piece.ranks(), (1, 5, 10))
        self.assertEqual(piece.stage, "cylinder[0,3.5]")
        self.assertIn("L24^0 = L24^3.5", [r.render() for r in piece.ledger])

    def test_cylinder_needs_equal_euler_classes(self):
        with self.assertRaises(InconsistentScenarioError):
            cylinder(level("0", 0), level("-s42", Fraction(3, 2)))


if __name__ == "__main__":
    unittest.main()
