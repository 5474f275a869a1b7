"""Measurement extraction.

The analyzer works from trace text (or parsed events), not from simulator
internals: anything it reports must be visible in the trace a user can
dump, which keeps the measurement honest and replayable. Tags >= 100 are
infrastructure markers (boot) and never count as observation points.
"""

from __future__ import annotations

from .trace import parse

BOOT_TAG = 100


class Measurement:
    """One scenario's extracted numbers."""

    __slots__ = ("cycles", "sync", "handshake", "entry", "software")

    def __init__(self, cycles, sync=None, handshake=None, entry=None,
                 software=None):
        self.cycles = cycles
        self.sync = sync
        self.handshake = handshake
        self.entry = entry
        self.software = software

    @property
    def has_breakdown(self):
        return self.sync is not None

    def as_row(self):
        blank = ""
        return {
            "cycles": self.cycles,
            "sync": self.sync if self.sync is not None else blank,
            "handshake": self.handshake if self.handshake is not None else blank,
            "entry": self.entry if self.entry is not None else blank,
            "software": self.software if self.software is not None else blank,
        }


def _markers(events):
    return [ev for ev in events
            if ev.kind == "marker" and ev.get("tag", BOOT_TAG) < BOOT_TAG]


def measure(events, measurement: str) -> Measurement:
    """Extract the scenario's headline number (and the latency breakdown
    when the trace carries fetch events)."""
    if isinstance(events, str):
        events = parse(events)
    marks = _markers(events)
    if measurement == "latency":
        if not marks:
            raise ValueError("no observation marker in trace")
        asserts = [ev for ev in events if ev.kind == "irq_set"]
        if not asserts:
            raise ValueError("no irq_set in trace")
        m = Measurement(marks[0].cycle - asserts[0].cycle)
        _fill_breakdown(m, events, asserts[0], marks[0])
        return m
    if measurement == "back2back":
        if len(marks) < 2:
            raise ValueError("need two observation markers for back2back")
        return Measurement(marks[1].cycle - marks[0].cycle)
    if measurement == "ctxswitch":
        first = {}
        for ev in marks:
            first.setdefault(ev.get("tag"), ev)
        if 1 not in first or 2 not in first:
            raise ValueError("ctxswitch trace missing tag 1 or tag 2 marker")
        return Measurement(first[2].cycle - first[1].cycle)
    raise ValueError(f"unknown measurement {measurement!r}")


def _fill_breakdown(m: Measurement, events, assert_ev, marker_ev):
    """Split latency into sync / handshake / entry / software phases.
    The phases telescope (they share endpoints), so they always sum to the
    headline number. Needs a full-level trace for the fetch events; on an
    events-level trace the breakdown stays empty."""
    present = accept = fetch = None
    for ev in events:
        if ev.cycle < assert_ev.cycle:
            continue
        if present is None and ev.kind == "present":
            present = ev
        elif accept is None and ev.kind == "accept":
            accept = ev
        elif accept is not None and ev.kind == "fetch" \
                and ev.cycle > accept.cycle:
            fetch = ev
            break
    if present is None or accept is None or fetch is None:
        return
    if fetch.cycle > marker_ev.cycle:
        return
    m.sync = present.cycle - assert_ev.cycle
    m.handshake = accept.cycle - present.cycle
    m.entry = fetch.cycle - accept.cycle
    m.software = marker_ev.cycle - fetch.cycle
