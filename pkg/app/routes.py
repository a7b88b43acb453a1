from flask import Blueprint, current_app, jsonify, request

from app import db
from app.errors import HomologyError
from app.models import Run
from app.pipeline import run as run_pipeline
from app.pipeline import single_cobordism, single_level
from app.report import Report
from app.scenario import builtin_scenario, parse_scenario
from app.utils import describe_label

api_bp = Blueprint("api", __name__, url_prefix="/api")


@api_bp.errorhandler(HomologyError)
def handle_homology_error(error):
    current_app.logger.warning("request failed: %s", error)
    return jsonify({"status": "error", "message": str(error)}), 400


def _missing(data, fields):
    absent = [name for name in fields if name not in data]
    if not absent:
        return None
    return (
        jsonify(
            {
                "status": "error",
                "message": f"Missing required fields: {', '.join(absent)}",
            }
        ),
        400,
    )


def _float_fields(data, fields):
    """Levels must arrive as strings or integers, never as binary floats."""
    floats = [name for name in fields if isinstance(data.get(name), float)]
    if not floats:
        return None
    return (
        jsonify(
            {
                "status": "error",
                "message": f"Levels must be strings or integers: {', '.join(floats)}",
            }
        ),
        400,
    )


def _space_payload(space):
    payload = space.describe()
    payload["labels"] = [describe_label(label) for label in space.labels]
    return payload


# ----- Single computations -----


@api_bp.route("/gysin", methods=["POST"])
def gysin():
    """Labeled homology of one regular level set."""
    data = request.get_json() or {}
    error = _missing(data, ("base_dim", "euler", "degree")) or _float_fields(
        data, ("level",)
    )
    if error:
        return error
    if not isinstance(data["base_dim"], int) or not isinstance(data["degree"], int):
        return (
            jsonify({"status": "error", "message": "base_dim and degree must be integers"}),
            400,
        )
    if not isinstance(data["euler"], str):
        return (
            jsonify({"status": "error", "message": "euler must be a form such as '-s31 - s42'"}),
            400,
        )

    level = single_level(data["base_dim"], data["euler"], data.get("level", 0))
    space = level.space(data["degree"])
    current_app.logger.info(
        "gysin %s degree %d: rank %d", data["euler"], data["degree"], space.rank
    )
    return jsonify({"status": "success", "data": _space_payload(space)}), 200


@api_bp.route("/cobordisms", methods=["POST"])
def cobordism():
    """Homology and relation ledger of one elementary cobordism."""
    data = request.get_json() or {}
    error = _missing(
        data, ("a", "b", "critical", "image", "below", "above")
    ) or _float_fields(data, ("a", "b", "critical"))
    if error:
        return error

    piece = single_cobordism(
        data["a"],
        data["b"],
        data["critical"],
        data["image"],
        data["below"],
        data["above"],
        lifts=data.get("lifts", []),
        base_dim=data.get("base_dim", 4),
    )
    result = {
        "stage": piece.stage,
        "ranks": list(piece.ranks()),
        "homology": {
            str(degree): _space_payload(space) for degree, space in piece.homology.items()
        },
        "relations": [relation.render() for relation in piece.ledger],
        "audits": [
            {"name": name, "passed": passed, "detail": detail}
            for name, passed, detail in piece.audits
        ],
    }
    return jsonify({"status": "success", "data": result}), 200


@api_bp.route("/mcduff", methods=["GET"])
def mcduff():
    """Run the built-in McDuff scenario without storing it."""
    scenario = builtin_scenario("mcduff", current_app.config["SCENARIO_DIR"])
    report = Report(run_pipeline(scenario, checks=current_app.config["RUN_CHECKS"]))
    return jsonify({"status": "success", "data": report.to_dict()}), 200


# ----- Stored runs -----


@api_bp.route("/runs", methods=["GET"])
def get_runs():
    """Get all stored runs."""
    runs = Run.query.order_by(Run.created_at.desc()).all()
    return jsonify({"status": "success", "data": [r.to_dict() for r in runs]}), 200


@api_bp.route("/runs/<int:run_id>", methods=["GET"])
def get_run(run_id):
    """Get a stored run with its report."""
    stored = Run.query.get_or_404(run_id)
    return (
        jsonify({"status": "success", "data": stored.to_dict(include_report=True)}),
        200,
    )


@api_bp.route("/runs", methods=["POST"])
def create_run():
    """Run a scenario given as scenario-file text and store the result."""
    data = request.get_json() or {}
    error = _missing(data, ("scenario",))
    if error:
        return error
    if not isinstance(data["scenario"], str):
        return (
            jsonify({"status": "error", "message": "scenario must be scenario-file text"}),
            400,
        )

    scenario = parse_scenario(data["scenario"])
    report = Report(run_pipeline(scenario, checks=current_app.config["RUN_CHECKS"]))
    stored = Run.from_report(report)
    db.session.add(stored)
    db.session.commit()
    current_app.logger.info("stored run %d of %s", stored.id, scenario.name)

    payload = stored.to_dict()
    payload["report"] = report.to_dict()
    return (
        jsonify(
            {
                "status": "success",
                "message": "Run completed successfully",
                "data": payload,
            }
        ),
        201,
    )


@api_bp.route("/runs/<int:run_id>", methods=["DELETE"])
def delete_run(run_id):
    """Delete a stored run by ID."""
    stored = Run.query.get_or_404(run_id)
    db.session.delete(stored)
    db.session.commit()

    return (
        jsonify({"status": "success", "message": "Run deleted successfully"}),
        200,
    )
