import unittest
from fractions import Fraction

from app.errors import ScenarioParseError
from app.labels import LabelKind, format_level
from app.torus_forms import sigma, torus
from app.utils import (
    describe_label,
    is_label_name,
    parse_combination,
    parse_cycle,
    parse_form,
    parse_label,
    parse_level,
    parse_lift,
    validate_level,
)


class TestLevels(unittest.TestCase):
    def test_validate_level(self):
        for text in ("0", "1.5", "7/2", "-2", " 3 "):
            self.assertTrue(validate_level(text), text)
        for text in ("", "1e3", "inf", "nan", "1.5.2", "abc", None):
            self.assertFalse(validate_level(text), text)

    def test_parse_level_is_exact(self):
        self.assertEqual(parse_level("1.5"), Fraction(3, 2))
        self.assertEqual(parse_level("0.1"), Fraction(1, 10))
        with self.assertRaises(ScenarioParseError):
            parse_level("1e-1")

    def test_format_level(self):
        self.assertEqual(format_level(Fraction(3, 2)), "1.5")
        self.assertEqual(format_level(Fraction(7)), "7")
        self.assertEqual(format_level(Fraction(1, 3)), "1/3")
        self.assertEqual(format_level(Fraction(-1, 4)), "-0.25")


class TestForms(unittest.TestCase):
    def test_parse_form(self):
        self.assertEqual(parse_form("-s31 - s42", 4), sigma(4, 1, 3) + sigma(4, 2, 4))
        self.assertEqual(parse_form("2*s13", 4), sigma(4, 1, 3).scale(2))
        self.assertTrue(parse_form("0", 4).is_zero())

    def test_parse_form_errors(self):
        for text in ("s1", "s13 + x", "s15", "s13 + s1"):
            with self.assertRaises(ScenarioParseError, msg=text):
                parse_form(text, 4)

    def test_parse_cycle(self):
        self.assertEqual(parse_cycle("L13-L24", 4), torus(4, 1, 3) - torus(4, 2, 4))
        self.assertEqual(parse_cycle("L1", 4).degree, 1)
        with self.assertRaises(ScenarioParseError):
            parse_cycle("0", 4)


class TestLabels(unittest.TestCase):
    def test_round_trip_names(self):
        names = [
            "L13^1.5",
            "L2F^1.5",
            "LF^0",
            "(L13-L24)^3.5",
            "Z13^1",
            "Z1^1-",
            "ZF^1+",
            "Z24^2-",
            "T1+3",
            "TF",
            "G61",
            "pt^0",
            "ptZ^1",
            "ptS^1-",
            "gamma",
        ]
        for name in names:
            sign, label = parse_label(name)
            self.assertEqual(sign, 1, name)
            self.assertEqual(label.display, name)

    def test_orientation_sign(self):
        sign, label = parse_label("L42^0")
        self.assertEqual((sign, label.display), (-1, "L24^0"))
        sign, label = parse_label("Z31^5")
        self.assertEqual((sign, label.kind), (-1, LabelKind.FIXED_TORUS))
        sign, label = parse_label("(L24-L13)^3.5")
        self.assertEqual((sign, label.display), (-1, "(L13-L24)^3.5"))

    def test_unknown_names(self):
        for name in ("X13^0", "L11^0", "Gamma", "L13", ""):
            self.assertFalse(is_label_name(name), name)
        with self.assertRaises(ScenarioParseError):
            parse_label("L11^0")

    def test_degrees(self):
        degrees = {"L13^0": 2, "L2F^0": 2, "LF^0": 1, "G61": 2, "gamma": 1, "pt^0": 0}
        for name, degree in degrees.items():
            self.assertEqual(parse_label(name)[1].degree, degree, name)

    def test_parse_combination(self):
        combination = parse_combination("L1^0 + L3^0 - L1^3.5 - 2*L3^3.5")
        self.assertEqual(
            [(label.display, c) for label, c in combination.terms],
            [("L1^0", 1), ("L3^0", 1), ("L1^3.5", -1), ("L3^3.5", -2)],
        )
        self.assertEqual(parse_combination("-pt^0 + pt^3.5").render(), "-pt^0 + pt^3.5")
        self.assertEqual(parse_combination("ZF^1+").render(), "ZF^1+")
        self.assertEqual(parse_combination("L42^0").render(), "-L24^0")
        self.assertTrue(parse_combination("0").is_zero())

    def test_parse_lift(self):
        stage, label, degree, boundary = parse_lift("attach2@1 : L24^0 : 2 : ZF^1+")
        self.assertEqual((stage, label.display, degree), ("attach2@1", "L24^0", 2))
        self.assertEqual(boundary.render(), "ZF^1+")
        for text in ("W : T1+3 : 2", "W : L42^0 : 2 : LF^0", "W : T1+3 : two : LF^0"):
            with self.assertRaises(ScenarioParseError, msg=text):
                parse_lift(text)

    def test_describe_label(self):
        payload = describe_label(parse_label("G61")[1])
        self.assertEqual(payload["kind"], "InvariantSphere")
        self.assertEqual((payload["level"], payload["level_to"]), ("6", "1"))
        payload = describe_label(parse_label("Z24^2")[1])
        self.assertEqual(payload["indices"], [2, 4])


if __name__ == "__main__":
    unittest.main()
