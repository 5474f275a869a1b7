"""Core-local interrupt controller model.

Per-line gateways (edge latch / level follow), an 8-bit control byte split
into level and priority by `nlbits`, max-selection arbitration implemented
as a binary tournament tree, threshold qualification, and a presentation
handshake with a kill signal. A compatibility mode reduces the whole block
to the legacy fixed-priority interruptor semantics.
"""

from __future__ import annotations

from .memory import BusFault
from . import layout

# Fixed service order in legacy mode: external > software > timer > the
# supervisor bits > platform lines 31..16 (highest id first) > leftovers.
CLINT_RANK_ORDER = (11, 3, 7, 9, 1, 5) + tuple(range(31, 15, -1)) \
    + (15, 14, 13, 12, 10, 8, 6, 4, 2, 0)
CLINT_RANK = {line: rank for rank, line in enumerate(CLINT_RANK_ORDER)}


def split_ctl(ctl: int, nlbits: int):
    """Split the 8-bit control byte into (level, priority).

    The level keeps the upper nlbits; the bits it does not implement read
    as ones, so levels always span the full 8-bit scale. The remaining low
    bits are the tie-break priority.
    """
    ctl &= 0xFF
    if nlbits >= 8:
        return ctl, 0
    low = 8 - nlbits
    level = (ctl >> low) << low | ((1 << low) - 1)
    prio = ctl & ((1 << low) - 1)
    return level, prio


def qualify(level: int, thresh: int, mil: int,
            priv_in: int = 3, priv_cur: int = 3) -> bool:
    """Preemption predicate: a higher-privilege interrupt always wins;
    within one privilege the level must clear both the threshold and the
    running level."""
    if priv_in > priv_cur:
        return True
    if priv_in < priv_cur:
        return False
    return level > thresh and level > mil


class IrqLine:
    __slots__ = ("id", "enabled", "pending", "shv", "edge", "ctl", "input")

    def __init__(self, id):
        self.id = id
        self.enabled = False
        self.pending = False
        self.shv = False
        self.edge = True
        self.ctl = 0
        self.input = 0

    def split(self, nlbits):
        return split_ctl(self.ctl, nlbits)


class Selection:
    __slots__ = ("id", "level", "prio")

    def __init__(self, id, level, prio):
        self.id = id
        self.level = level
        self.prio = prio

    @property
    def key(self):
        return (self.level, self.prio, self.id)

    def __repr__(self):
        return f"Selection(id={self.id}, level={self.level}, prio={self.prio})"


class Clic:
    """One controller instance; `clint_mode` flips to the legacy scheme."""

    def __init__(self, config, tracer):
        self.config = config
        self.tracer = tracer
        self.clint_mode = config.controller == "clint"
        self.n = min(config.n_lines, 32) if self.clint_mode else config.n_lines
        self.nlbits = config.nlbits
        self.lines = [IrqLine(i) for i in range(self.n)]
        self.presented: Selection | None = None
        self.valid_since = -1
        # optional extra arbitration latency (a shift register of results)
        self._stage_queue = [None] * config.arb_stages

    # ------------------------------------------------------------ inputs

    def set_input(self, line_id: int, wire: int, cycle: int = 0):
        if not 0 <= line_id < self.n:
            raise ValueError(f"interrupt line {line_id} out of range")
        line = self.lines[line_id]
        rising = wire and not line.input
        line.input = 1 if wire else 0
        if line.edge:
            if rising:
                line.pending = True
                if self.tracer:
                    self.tracer.emit(cycle, "pend", line=line_id)
        else:
            line.pending = bool(wire)

    # -------------------------------------------------------- arbitration

    def arbitrate(self) -> Selection | None:
        """Lexicographic max over pending-and-enabled lines, computed with
        a binary tournament so wide configurations stay O(n) with the same
        comparator the hardware tree would use."""
        if self.clint_mode:
            return self._clint_select()
        entries = [
            (*line.split(self.nlbits), line.id)
            for line in self.lines
            if line.pending and line.enabled
        ]
        best = _tournament(entries)
        if best is None:
            return None
        level, prio, id_ = best
        return Selection(id_, level, prio)

    def _clint_select(self):
        best = None
        for line in self.lines:
            if line.pending and line.enabled:
                rank = CLINT_RANK.get(line.id, 99)
                if best is None or rank < best[0]:
                    best = (rank, line.id)
        if best is None:
            return None
        return Selection(best[1], 0, 0)

    # -------------------------------------------------------- handshake

    def tick(self, cycle: int, csrs):
        """Advance one cycle: re-arbitrate against the state left by the
        previous cycle and manage the presentation handshake."""
        sel = self.arbitrate()
        if self._stage_queue:
            self._stage_queue.append(sel)
            sel = self._stage_queue.pop(0)
        if sel is not None and not self._qualified(sel, csrs):
            sel = None

        cur = self.presented
        if sel is None:
            self.presented = None
            return
        if cur is not None and sel.id == cur.id and sel.key == cur.key:
            return  # unchanged presentation keeps its age
        if cur is not None and (self.clint_mode or sel.key > cur.key):
            self.tracer.emit(cycle, "kill", old=cur.id, new=sel.id)
        self.presented = sel
        self.valid_since = cycle
        self.tracer.emit(cycle, "present", id=sel.id, level=sel.level,
                         prio=sel.prio)

    def _qualified(self, sel: Selection, csrs) -> bool:
        if not csrs.mie_enabled():
            return False
        if self.clint_mode:
            return True
        return qualify(sel.level, csrs.mintthresh, csrs.mil)

    def acceptable(self, cycle: int) -> Selection | None:
        """A presentation must have been stable for one full cycle before
        the core may accept it."""
        if self.presented is not None and cycle - self.valid_since >= 1:
            return self.presented
        return None

    def accept(self, sel: Selection, cycle: int):
        # Vectored (and legacy-mode) acceptance retires the gateway; a
        # non-vectored line stays pending so the software claim protocols
        # can find it, which is what makes the common-entry dispatch work.
        line = self.lines[sel.id]
        if line.edge and (self.clint_mode or line.shv
                          or self.config.controller == "fastirq"):
            line.pending = False
        self.presented = None
        self.valid_since = -1

    # ----------------------------------------------- software claim paths

    def claim_scan(self, floor: int, ceiling: int | None = None,
                   require_non_shv: bool = False) -> Selection | None:
        """Shared scan for the software claim protocols: best pending and
        enabled line with level > floor (and level <= ceiling for the
        tail-chain case). Vectored lines are excluded when the claim hands
        back an address for software dispatch."""
        entries = []
        for line in self.lines:
            if not (line.pending and line.enabled):
                continue
            if require_non_shv and line.shv:
                continue
            level, prio = line.split(self.nlbits)
            if level <= floor:
                continue
            if ceiling is not None and level > ceiling:
                continue
            entries.append((level, prio, line.id))
        best = _tournament(entries)
        if best is None:
            return None
        return Selection(best[2], best[0], best[1])

    def claim(self, sel: Selection):
        line = self.lines[sel.id]
        if line.edge:
            line.pending = False
        if self.presented is not None and self.presented.id == sel.id:
            self.presented = None
            self.valid_since = -1

    # ------------------------------------------------------------- views

    def mip_view(self) -> int:
        word = 0
        for line in self.lines:
            if line.pending:
                word |= 1 << line.id
        return word

    # -------------------------------------------------------------- MMIO

    def mmio(self, offset: int, op: str, value: int, width: int):
        if self.clint_mode:
            raise BusFault(layout.CLIC_BASE + offset, op)
        if offset == layout.CLIC_CFG_OFF:
            if op == "store":
                self.nlbits = value & 0xF
                if self.nlbits > 8:
                    self.nlbits = 8
                return 0
            return self.nlbits
        rel = offset - layout.CLIC_LINE_OFF
        if 0 <= rel < 4 * self.n:
            line = self.lines[rel // 4]
            byte = rel % 4
            if width == 4:
                if byte != 0:
                    raise BusFault(layout.CLIC_BASE + offset, op)
                if op == "store":
                    self._write_byte(line, 0, value & 0xFF)
                    self._write_byte(line, 1, (value >> 8) & 0xFF)
                    self._write_byte(line, 2, (value >> 16) & 0xFF)
                    self._write_byte(line, 3, (value >> 24) & 0xFF)
                    return 0
                return (self._read_byte(line, 0)
                        | self._read_byte(line, 1) << 8
                        | self._read_byte(line, 2) << 16
                        | self._read_byte(line, 3) << 24)
            if op == "store":
                self._write_byte(line, byte, value & 0xFF)
                return 0
            return self._read_byte(line, byte)
        raise BusFault(layout.CLIC_BASE + offset, op)

    @staticmethod
    def _read_byte(line: IrqLine, byte: int) -> int:
        if byte == 0:
            return 1 if line.pending else 0
        if byte == 1:
            return 1 if line.enabled else 0
        if byte == 2:
            return (layout.CLIC_ATTR_SHV if line.shv else 0) \
                | (layout.CLIC_ATTR_EDGE if line.edge else 0)
        return line.ctl

    @staticmethod
    def _write_byte(line: IrqLine, byte: int, value: int):
        if byte == 0:
            # software set/clear; a level-sensed line keeps following its
            # wire, so stores to its pending bit are ignored
            if line.edge:
                line.pending = bool(value & 1)
        elif byte == 1:
            line.enabled = bool(value & 1)
        elif byte == 2:
            line.shv = bool(value & layout.CLIC_ATTR_SHV)
            line.edge = bool(value & layout.CLIC_ATTR_EDGE)
        else:
            line.ctl = value & 0xFF


def _tournament(entries):
    """Pairwise max-reduction over (level, prio, id) keys."""
    if not entries:
        return None
    nodes = list(entries)
    while len(nodes) > 1:
        nxt = []
        for i in range(0, len(nodes) - 1, 2):
            a, b = nodes[i], nodes[i + 1]
            nxt.append(a if a >= b else b)
        if len(nodes) % 2:
            nxt.append(nodes[-1])
        nodes = nxt
    return nodes[0]
