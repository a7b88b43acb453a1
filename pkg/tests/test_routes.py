import json
import unittest

from app import create_app, db
from app.models import Run
from app.scenario import SCENARIO_DIR
from config import Config


class TestConfig(Config):
    TESTING = True
    SQLALCHEMY_DATABASE_URI = "sqlite:///:memory:"
    LOG_LEVEL = "WARNING"


class TestRoutes(unittest.TestCase):
    def setUp(self):
        self.app = create_app(TestConfig)
        self.client = self.app.test_client()
        self.app_context = self.app.app_context()
        self.app_context.push()
        db.create_all()

        self.trivial_text = (SCENARIO_DIR / "trivial.scn").read_text()

    def tearDown(self):
        db.session.remove()
        db.drop_all()
        self.app_context.pop()

    def post(self, url, payload):
        response = self.client.post(url, json=payload)
        return response, json.loads(response.data)

    def test_gysin_ranks(self):
        cases = [
            ("0", 1, 5),
            ("0", 2, 10),
            ("-s42", 1, 4),
            ("-s42", 2, 7),
            ("-s31 - s42", 2, 5),
        ]
        for euler, degree, expected in cases:
            response, data = self.post(
                "/api/gysin",
                {"base_dim": 4, "euler": euler, "degree": degree, "level": "1.5"},
            )
            self.assertEqual(response.status_code, 200)
            self.assertEqual(data["status"], "success")
            self.assertEqual(data["data"]["rank"], expected, euler)

    def test_gysin_generator_names(self):
        response, data = self.post(
            "/api/gysin", {"base_dim": 4, "euler": "-s31 - s42", "degree": 2, "level": "3.5"}
        )
        self.assertEqual(response.status_code, 200)
        self.assertIn("(L13-L24)^3.5", data["data"]["generators"])
        self.assertIn("L12^3.5", data["data"]["generators"])

    def test_gysin_missing_fields(self):
        response, data = self.post("/api/gysin", {"euler": "0"})
        self.assertEqual(response.status_code, 400)
        self.assertEqual(data["status"], "error")
        self.assertIn("base_dim", data["message"])

    def test_gysin_rejects_float_level(self):
        response, data = self.post(
            "/api/gysin", {"base_dim": 4, "euler": "0", "degree": 1, "level": 1.5}
        )
        self.assertEqual(response.status_code, 400)
        self.assertIn("level", data["message"])

    def test_gysin_unsupported_degree(self):
        response, data = self.post(
            "/api/gysin", {"base_dim": 4, "euler": "0", "degree": 3}
        )
        self.assertEqual(response.status_code, 400)
        self.assertEqual(data["status"], "error")

    def test_gysin_bad_form(self):
        response, data = self.post(
            "/api/gysin", {"base_dim": 4, "euler": "s1", "degree": 1}
        )
        self.assertEqual(response.status_code, 400)
        self.assertEqual(data["status"], "error")

    def test_cobordism(self):
        response, data = self.post(
            "/api/cobordisms",
            {
                "a": "0",
                "b": "1.5",
                "critical": "1",
                "image": "L13",
                "below": "0",
                "above": "-s42",
                "lifts": ["attach2@1 : L24^0 : 2 : ZF^1+"],
            },
        )
        self.assertEqual(response.status_code, 200)
        self.assertEqual(data["data"]["ranks"], [1, 4, 8])
        self.assertIn("L13^0 = Z13^1", data["data"]["relations"])
        self.assertTrue(all(audit["passed"] for audit in data["data"]["audits"]))

    def test_cobordism_without_lift(self):
        response, data = self.post(
            "/api/cobordisms",
            {
                "a": "0",
                "b": "1.5",
                "critical": "1",
                "image": "L13",
                "below": "0",
                "above": "-s42",
            },
        )
        self.assertEqual(response.status_code, 400)
        self.assertIn("attach2@1", data["message"])

    def test_cobordism_wrong_jump(self):
        response, data = self.post(
            "/api/cobordisms",
            {
                "a": "0",
                "b": "1.5",
                "critical": "1",
                "image": "L13",
                "below": "0",
                "above": "-s31",
            },
        )
        self.assertEqual(response.status_code, 400)
        self.assertIn("PD", data["message"])

    def test_mcduff(self):
        response = self.client.get("/api/mcduff")
        data = json.loads(response.data)

        self.assertEqual(response.status_code, 200)
        self.assertEqual(data["data"]["betti"], [1, 3, 8, 12, 8, 3, 1])
        self.assertEqual(data["data"]["euler_characteristic"], 0)
        self.assertTrue(data["data"]["kaehler_obstructed"])
        self.assertEqual(
            [g["name"] for g in data["data"]["generators"]],
            ["L12^0", "L13^0", "L14^0", "L24^0", "Z24^2", "T1+3", "T2+4", "G61"],
        )
        self.assertTrue(all(row["value"] == "0" for row in data["data"]["c1"]))
        self.assertEqual(Run.query.count(), 0)

    def test_create_and_get_run(self):
        response, data = self.post("/api/runs", {"scenario": self.trivial_text})
        self.assertEqual(response.status_code, 201)
        self.assertEqual(data["data"]["betti"], [1, 6, 15, 20, 15, 6, 1])
        run_id = data["data"]["id"]

        response = self.client.get(f"/api/runs/{run_id}")
        data = json.loads(response.data)
        self.assertEqual(response.status_code, 200)
        self.assertEqual(data["data"]["name"], "trivial")
        self.assertIn("BETTI 1 6", data["data"]["report"])

        response = self.client.get("/api/runs")
        data = json.loads(response.data)
        self.assertEqual(len(data["data"]), 1)

    def test_create_run_invalid_scenario(self):
        response, data = self.post("/api/runs", {"scenario": "base_dim = 4\n"})
        self.assertEqual(response.status_code, 400)
        self.assertIn("range", data["message"])

        response, data = self.post("/api/runs", {})
        self.assertEqual(response.status_code, 400)
        self.assertEqual(Run.query.count(), 0)

    def test_delete_run(self):
        response, data = self.post("/api/runs", {"scenario": self.trivial_text})
        run_id = data["data"]["id"]

        response = self.client.delete(f"/api/runs/{run_id}")
        self.assertEqual(response.status_code, 200)
        self.assertEqual(Run.query.count(), 0)

        response = self.client.get(f"/api/runs/{run_id}")
        self.assertEqual(response.status_code, 404)


if __name__ == "__main__":
    unittest.main()
