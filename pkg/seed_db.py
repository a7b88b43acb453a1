"""
Database seeding script for the homology engine.
This script runs the built-in scenarios and stores their reports as runs.
"""

import sys

from app import create_app, db
from app.errors import HomologyError
from app.models import Run
from app.pipeline import run as run_pipeline
from app.report import Report
from app.scenario import builtin_scenario

BUILTIN_SCENARIOS = ["mcduff", "trivial"]


def seed_database(names=BUILTIN_SCENARIOS):
    """Run and store every built-in scenario."""
    print("Starting database seeding...")

    existing = Run.query.count()
    if existing > 0:
        confirm = input(
            f"Database already contains {existing} runs. Do you want to proceed and add more? (y/n): "
        )
        if confirm.lower() != "y":
            print("Database seeding cancelled.")
            return

    try:
        for name in names:
            report = Report(run_pipeline(builtin_scenario(name)))
            db.session.add(Run.from_report(report))
            print(f"Stored {name}: betti {' '.join(map(str, report.betti))}")
        db.session.commit()
        print("Database seeding completed successfully!")

    except HomologyError as e:
        db.session.rollback()
        print(f"Error seeding database: {str(e)}")
        return


def clear_database():
    """Clear all runs from the database."""
    print("Clearing database...")
    try:
        Run.query.delete()
        db.session.commit()
        print("Database cleared successfully!")
    except Exception as e:
        db.session.rollback()
        print(f"Error clearing database: {str(e)}")


if __name__ == "__main__":
    app = create_app()
    with app.app_context():
        if len(sys.argv) > 1 and sys.argv[1] == "--clear":
            clear_database()
            if len(sys.argv) <= 2 or sys.argv[2] != "--only-clear":
                seed_database()
        else:
            seed_database()
