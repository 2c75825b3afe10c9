"""Row tables rendered as commented CSV or aligned text."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x + 0.0:.12g}"
    return str(x)


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(list(values))

    def column(self, name: str) -> list:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def to_csv(self) -> str:
        lines = [f"# {c}" for c in self.comments]
        lines.append(",".join(self.columns))
        lines += [",".join(fmt(v) for v in r) for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        cells = [self.columns] + [[fmt(v) for v in r] for r in self.rows]
        widths = [max(len(row[j]) for row in cells) for j in range(len(self.columns))]
        lines = [f"# {c}" for c in self.comments]
        lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
        return "\n".join(lines) + "\n"


def parse_csv(text: str) -> Table:
    """Inverse of :meth:`Table.to_csv`; numeric cells come back as floats."""
    comments, body = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line:
            body.append(line.split(","))
    t = Table(body[0], comments=comments)
    for r in body[1:]:
        t.rows.append([_maybe_float(c) for c in r])
    return t


def _maybe_float(s: str):
    try:
        return float(s)
    except ValueError:
        return s
