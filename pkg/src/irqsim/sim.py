"""Top-level simulator: wires the core, controller, memory, and save engine
together and owns the cycle loop.

Per-cycle ordering is fixed and is part of the timing contract:

1. queued retire events for this cycle are flushed,
2. the controller re-arbitrates against last cycle's state,
3. external stimulus scheduled for this cycle is applied (so a wire
   asserted "during" cycle T is first seen by the arbiter at T+1),
4. the core runs (issue / charge countdown / trap sequencing),
5. the background drain engine runs,
6. per-cycle bus bookkeeping resets.
"""

from __future__ import annotations

from .clic import Clic
from .core import Core
from .config import SimConfig
from .fastirq import FastIrq
from .memory import Memory
from .trace import Tracer


class Simulator:
    def __init__(self, config: SimConfig, tracer: Tracer | None = None):
        config.validate()
        self.config = config
        self.tracer = tracer if tracer is not None else Tracer(config.trace)
        self.clic = Clic(config, self.tracer)
        self.mem = Memory(config, clic=self.clic, tracer=self.tracer)
        self.fast = FastIrq(config, self.mem, self.tracer) \
            if config.controller == "fastirq" else None
        self.core = Core(config, self.mem, self.clic, self.fast, self.tracer)
        self.cycle = 0
        self._schedule: dict[int, list[tuple[int, int]]] = {}

    # ----------------------------------------------------------- stimulus

    def at(self, cycle: int, line: int, wire: int = 1):
        """Drive `line` to `wire` during `cycle`."""
        self._schedule.setdefault(cycle, []).append((line, wire))

    # --------------------------------------------------------------- run

    def step(self):
        cycle = self.cycle
        self.core.flush_retires(cycle)
        self.clic.tick(cycle, self.core.csrs)
        for line, wire in self._schedule.pop(cycle, ()):
            self.tracer.emit(cycle, "irq_set" if wire else "irq_clear",
                             line=line)
            self.clic.set_input(line, wire, cycle)
        self.core.tick(cycle)
        if self.fast is not None:
            self.fast.tick(cycle)
        self.mem.end_cycle()
        self.cycle += 1

    def run(self, max_cycles: int | None = None):
        limit = max_cycles if max_cycles is not None else \
            self.config.max_cycles
        while not self.core.halted and self.cycle < limit:
            self.step()
        # drain the retire queue so the trace stays complete
        self.core.flush_retires(self.cycle + 2)
        return self

    @property
    def halted(self) -> bool:
        return self.core.halted

    @property
    def fault(self):
        return self.core.fault
