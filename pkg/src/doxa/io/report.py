"""Line-keyed reports.

Every line is ``key: value``; repeated keys are allowed and keep their order.
The body never holds timings, so identical inputs render identical bytes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

EXIT_YES, EXIT_NO, EXIT_CONDITIONAL, EXIT_INPUT = 0, 1, 2, 3


def exit_code(verdict: bool, definitive: bool = True) -> int:
    if not definitive:
        return EXIT_CONDITIONAL
    return EXIT_YES if verdict else EXIT_NO


@dataclass
class Report:
    command: str
    lines: list = field(default_factory=list)
    code: int = EXIT_YES
    files: list = field(default_factory=list)

    def add(self, key, value=""):
        if isinstance(value, bool):
            value = "yes" if value else "no"
        elif isinstance(value, (list, tuple)):
            value = " ".join(str(v) for v in value)
        value = str(value).replace("\n", " ")
        self.lines.append((key, value))
        return self

    def file(self, path):
        self.files.append(path)
        self.lines.append(("file", path))

    def verdict(self, value, definitive=True):
        self.add("verdict", value if isinstance(value, str) else ("yes" if value else "no"))
        self.add("definitive", definitive)

    def render(self) -> str:
        out = [f"command: {self.command}"]
        out += [f"{k}: {v}".rstrip() for k, v in self.lines]
        out.append(f"exit: {self.code}")
        return "\n".join(out) + "\n"


def parse_report(text: str) -> list:
    """Inverse of :meth:`Report.render` as a list of ``(key, value)`` pairs."""
    pairs = []
    for line in text.splitlines():
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"not a report line: {line!r}")
        pairs.append((key, value.strip()))
    return pairs
