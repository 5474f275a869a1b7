"""Simulator configuration: the timing calibration table and the knobs a
scenario can turn.

All per-phase cycle costs live in one place (Timing) so the end-to-end
numbers are auditable: docs/calibration.md walks through how each constant
combines with the kernel listings to produce the measured figures.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Timing:
    """Cycle costs of the core's timing model.

    The execute stage charges each instruction a whole number of cycles;
    one instruction is in flight at a time (in-order, no overlap beyond
    the implicit fetch/decode pipelining the charges already account for).
    """

    base: int = 1            # simple ALU / lui / auipc / fence / marker
    load: int = 1            # plus region wait states
    store: int = 1           # plus region wait states
    branch_taken: int = 2    # front-end refill after a taken branch
    branch_not_taken: int = 1
    jump: int = 2            # jal / jalr
    csr: int = 2             # every Zicsr op serializes on the CSR file
    mret: int = 2            # redirect; architectural effects at retirement
    trap_sync: int = 1       # controller sees a new input one cycle late
    trap_entry_direct: int = 3   # flush (2) + target fetch (1)
    trap_entry_vectored: int = 4  # flush (2) + table read (1) + fetch (1)
    emret_query: int = 3     # pending-scan before the bank/chain decision
    load_use_delay: int = 2  # loaded value usable two cycles after issue

    def entry_cost(self, vectored: bool) -> int:
        return self.trap_entry_vectored if vectored else self.trap_entry_direct


#: Controllers the simulator knows how to instantiate.
CONTROLLERS = ("clint", "clic", "fastirq")

ABIS = ("I", "E")

STALL_MODES = ("watermark", "block_all")
DRAIN_PORTS = ("dedicated", "shared")


@dataclass
class SimConfig:
    controller: str = "clic"
    abi: str = "I"
    nlbits: int = 4
    n_lines: int = 32
    timing: Timing = field(default_factory=Timing)
    wait_states: int = 0            # data-SPM extra cycles per access
    drain_port: str = "dedicated"   # or "shared" (yields to the LSU)
    stall_mode: str = "watermark"   # or "block_all" (reference semantics)
    restore_from_memory: bool = False  # conservative bank-return reload
    arb_stages: int = 0             # extra arbitration pipeline stages
    max_cycles: int = 200_000
    trace: str = "events"           # off | events | full

    def validate(self):
        if self.controller not in CONTROLLERS:
            raise ValueError(f"unknown controller {self.controller!r}")
        if self.abi not in ABIS:
            raise ValueError(f"unknown abi {self.abi!r}")
        if not 0 <= self.nlbits <= 8:
            raise ValueError("nlbits must be 0..8")
        if not 1 <= self.n_lines <= 4096:
            raise ValueError("n_lines must be 1..4096")
        if self.stall_mode not in STALL_MODES:
            raise ValueError(f"unknown stall_mode {self.stall_mode!r}")
        if self.drain_port not in DRAIN_PORTS:
            raise ValueError(f"unknown drain_port {self.drain_port!r}")
        if self.wait_states < 0 or self.arb_stages < 0:
            raise ValueError("wait_states/arb_stages must be >= 0")
        return self

    def with_timing(self, **overrides) -> "SimConfig":
        return replace(self, timing=replace(self.timing, **overrides))
