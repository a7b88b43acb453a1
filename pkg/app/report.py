"""Human-readable, line-oriented and JSON renderings of a pipeline result."""

from app.labels import format_level
from app.utils import describe_label

FORMATS = ("text", "machine")


class Report:
    def __init__(self, result):
        self.result = result
        self.scenario = result.scenario

    @property
    def betti(self):
        return self.result.betti

    def stages(self):
        """(stage, degree, LabeledSpace) for every stage with a presentation."""
        entries = []
        for sample, level in self.result.levels.items():
            for degree, space in level.spaces.items():
                entries.append((f"level@{format_level(sample)}", degree, space))
        for piece in self.result.pieces:
            for degree, space in piece.homology.items():
                entries.append((piece.stage, degree, space))
        for union in (self.result.lower, self.result.upper):
            for degree, space in union.homology.items():
                entries.append((union.stage, degree, space))
        for degree, solution in self.result.W.items():
            entries.append(("W", degree, solution.homology))
        return entries

    def failed_audits(self):
        return [audit for audit in self.result.audits if not audit[1]]

    def render_text(self):
        result = self.result
        lines = [f"Scenario {self.scenario.name} (T^{self.scenario.base_dim} base)", ""]
        lines.append("Betti numbers")
        for k, value in enumerate(result.betti):
            lines.append(f"  b{k} = {value}")
        flag = " (nonzero: fixed components with chi != 0)" if result.euler_flagged else ""
        lines.append(f"  chi = {result.euler_characteristic}{flag}")
        lines.append(f"  {result.kaehler[1]}")
        lines.append("")

        lines.append("H_*(W) generators")
        for degree, solution in result.W.items():
            names = [label.display for label in solution.homology.generators()]
            lines.append(f"  H{degree} ({len(names)}): {', '.join(names)}")
            for label, boundary in solution.boundary_generators:
                lines.append(f"    d({label.display}) = {boundary.render()}")
        for label, alternatives in result.or_slots.items():
            if alternatives:
                others = " or ".join(a.display for a in alternatives)
                lines.append(f"  {label.display} may be replaced by {others}")
                for relation in result.or_relations(label):
                    lines.append(f"    since {relation.render()}")
        lines.append("")

        lines.append("c1 pairings")
        for row in result.c1_rows:
            mark = " *" if row.reconstructed else ""
            lines.append(f"  {row.name:<12} {row.rule.value:<24} {row.value}{mark}")
        lines.append("  * reconstructed rule")
        lines.append("")

        lines.append("Relations")
        for relation in result.ledger:
            lines.append(f"  [{relation.stage}] {relation.render()}")
        lines.append("")
        lines.append("Equality classes")
        for equality in result.closure.classes:
            lines.append(f"  {equality.render()}")
        for relation in result.closure.affine:
            lines.append(f"  affine: {relation.render()}")
        lines.append("")

        lines.append("Audits")
        for name, passed, detail in result.audits:
            lines.append(f"  [{'ok' if passed else 'FAIL'}] {name}: {detail}")
        lines.append("")
        lines.append("Notes")
        for note in result.notes:
            lines.append(f"  - {note}")
        return "\n".join(lines) + "\n"

    def render_machine(self):
        result = self.result
        lines = [f"BETTI {k} {value}" for k, value in enumerate(result.betti)]
        lines.append(f"CHI {result.euler_characteristic}")
        for stage, degree, space in self.stages():
            for label in space.generators():
                lines.append(f"GEN {stage} {degree} {label.display}")
        for label, alternatives in result.or_slots.items():
            if alternatives:
                others = " ".join(a.display for a in alternatives)
                lines.append(f"OR {label.display} {others}")
        for relation in result.ledger:
            line = f"REL {relation.stage} {relation.lhs.render()} = {relation.rhs.render()}"
            if relation.modulus:
                line += " mod " + ",".join(label.display for label in relation.modulus)
            lines.append(line)
        for row in result.c1_rows:
            lines.append(f"C1 {row.name} {row.rule.value} {row.value}")
        for name, passed, _ in result.audits:
            lines.append(f"AUDIT {'ok' if passed else 'FAIL'} {name}")
        return "\n".join(lines) + "\n"

    def render(self, fmt="text"):
        if fmt == "machine":
            return self.render_machine()
        return self.render_text()

    def ledger_lines(self):
        return [f"[{r.stage}] {r.render()}" for r in self.result.ledger]

    def to_dict(self):
        result = self.result
        return {
            "scenario": self.scenario.name,
            "betti": list(result.betti),
            "euler_characteristic": result.euler_characteristic,
            "euler_flagged": result.euler_flagged,
            "kaehler_obstructed": result.kaehler[0],
            "homology": {
                str(degree): {
                    **solution.homology.describe(),
                    "boundaries": {
                        label.display: boundary.render()
                        for label, boundary in solution.boundary_generators
                    },
                }
                for degree, solution in result.W.items()
            },
            "generators": [
                describe_label(label) for label in result.generators(2)
            ],
            "or_slots": {
                label.display: {
                    "alternatives": [a.display for a in alternatives],
                    "relations": [r.render() for r in result.or_relations(label)],
                }
                for label, alternatives in result.or_slots.items()
            },
            "c1": [
                {
                    "generator": row.name,
                    "rule": row.rule.value,
                    "value": str(row.value),
                    "reconstructed": row.reconstructed,
                }
                for row in result.c1_rows
            ],
            "relations": [r.render() for r in result.ledger],
            "audits": [
                {"name": name, "passed": passed, "detail": detail}
                for name, passed, detail in result.audits
            ],
            "notes": list(result.notes),
        }
