import unittest

from app.pipeline import run
from app.report import Report
from app.scenario import trivial_scenario


class TestReport(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.report = Report(run(trivial_scenario()))

    def test_machine_lines(self):
        lines = self.report.render("machine").splitlines()
        self.assertEqual(lines[:4], ["BETTI 0 1", "BETTI 1 6", "BETTI 2 15", "BETTI 3 20"])
        self.assertIn("CHI 0", lines)
        self.assertIn("GEN W 1 gamma", lines)
        audits = [line for line in lines if line.startswith("AUDIT")]
        self.assertTrue(audits)
        self.assertTrue(all(line.startswith("AUDIT ok") for line in audits))

    def test_text_sections(self):
        text = self.report.render()
        for heading in ("Betti numbers", "H_*(W) generators", "c1 pairings", "Audits", "Notes"):
            self.assertIn(heading, text)
        self.assertIn("b3 = 20", text)
        self.assertIn("d(gamma) = -pt^0 + pt^3.5", text)
        self.assertNotIn("[FAIL]", text)

    def test_to_dict(self):
        payload = self.report.to_dict()
        self.assertEqual(payload["scenario"], "trivial")
        self.assertEqual(payload["betti"], [1, 6, 15, 20, 15, 6, 1])
        self.assertFalse(payload["kaehler_obstructed"])
        self.assertEqual(payload["homology"]["1"]["rank"], 6)
        self.assertEqual(payload["homology"]["1"]["boundaries"], {"gamma": "-pt^0 + pt^3.5"})
        self.assertEqual(len(payload["generators"]), 15)

    def test_stages_and_ledger(self):
        stages = {stage for stage, _, _ in self.report.stages()}
        self.assertIn("level@0", stages)
        self.assertIn("cylinder[0,3.5]", stages)
        self.assertIn("W", stages)
        self.assertEqual(self.report.failed_audits(), [])
        self.assertTrue(all(line.startswith("[") for line in self.report.ledger_lines()))


if __name__ == "__main__":
    unittest.main()
