"""Trace event stream.

One event per line, `cycle=<u64> kind=<ident> key=value ...`, with stable
field order (insertion order of the kwargs). The analyzer parses this text
back rather than peeking at simulator internals, so the format is the
contract between the engine and the measurement harness.
"""

from __future__ import annotations

# Kinds emitted when trace level is "events"; "full" adds the rest.
EVENT_KINDS = frozenset({
    "irq_set", "irq_clear", "pend", "present", "kill", "accept",
    "trap_enter", "trap_return", "emret", "marker", "bank_switch",
    "drain_start", "drain_done", "nested_wait", "stall", "fault", "halt",
})

FULL_ONLY_KINDS = frozenset({
    "fetch", "retire", "load", "store", "mmio", "drain_store", "vector_load",
})


class TraceEvent:
    __slots__ = ("cycle", "kind", "fields")

    def __init__(self, cycle: int, kind: str, fields):
        self.cycle = cycle
        self.kind = kind
        self.fields = fields  # list of (key, value) pairs, order preserved

    def format(self) -> str:
        parts = [f"cycle={self.cycle}", f"kind={self.kind}"]
        parts.extend(f"{k}={_fmt(v)}" for k, v in self.fields)
        return " ".join(parts)

    def get(self, key, default=None):
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def __repr__(self):
        return f"<{self.format()}>"


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    return str(v)


class Tracer:
    """Collects events for one run; level filters what is kept."""

    __slots__ = ("level", "events")

    def __init__(self, level: str = "events"):
        if level not in ("off", "events", "full"):
            raise ValueError(f"bad trace level {level!r}")
        self.level = level
        self.events: list[TraceEvent] = []

    def emit(self, cycle: int, kind: str, **fields):
        if self.level == "off":
            return
        if self.level == "events" and kind in FULL_ONLY_KINDS:
            return
        self.events.append(TraceEvent(cycle, kind, list(fields.items())))

    def render(self) -> str:
        return "\n".join(ev.format() for ev in self.events) + ("\n" if self.events else "")


def parse_line(line: str) -> TraceEvent:
    """Parse one trace line back into an event. Values stay strings unless
    they look like integers."""
    fields = []
    cycle = None
    kind = None
    for tok in line.split():
        key, _, val = tok.partition("=")
        if key == "cycle":
            cycle = int(val)
        elif key == "kind":
            kind = val
        else:
            fields.append((key, int(val) if _is_int(val) else val))
    if cycle is None or kind is None:
        raise ValueError(f"malformed trace line: {line!r}")
    return TraceEvent(cycle, kind, fields)


def _is_int(s: str) -> bool:
    if s and (s[0] == "-" or s[0].isdigit()):
        try:
            int(s)
            return True
        except ValueError:
            return False
    return False


def parse(text: str):
    return [parse_line(ln) for ln in text.splitlines() if ln.strip()]
