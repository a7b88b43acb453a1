from datetime import datetime

from app import db


class Run(db.Model):
    """A stored pipeline run of one scenario."""

    id = db.Column(db.Integer, primary_key=True)
    name = db.Column(db.String(64), nullable=False)
    scenario_text = db.Column(db.Text, nullable=False)
    betti = db.Column(db.String(64), nullable=False)  # "b0 b1 ... b6"
    euler_characteristic = db.Column(db.Integer, nullable=False)
    report_text = db.Column(db.Text, nullable=False)  # machine format
    created_at = db.Column(db.DateTime, nullable=False, default=datetime.utcnow)

    @classmethod
    def from_report(cls, report):
        return cls(
            name=report.scenario.name,
            scenario_text=report.scenario.source_text,
            betti=" ".join(str(b) for b in report.betti),
            euler_characteristic=report.result.euler_characteristic,
            report_text=report.render_machine(),
        )

    @property
    def betti_numbers(self):
        return [int(b) for b in self.betti.split()]

    def to_dict(self, include_report=False):
        """Convert object to dictionary for API responses."""
        payload = {
            "id": self.id,
            "name": self.name,
            "betti": self.betti_numbers,
            "euler_characteristic": self.euler_characteristic,
            "created_at": self.created_at.isoformat(),
        }
        if include_report:
            payload["scenario"] = self.scenario_text
            payload["report"] = self.report_text
        return payload
