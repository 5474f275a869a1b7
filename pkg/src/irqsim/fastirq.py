"""Dual register banks with a background save engine.

On trap entry the core flips to the other bank and keeps executing while a
word-per-cycle FSM drains the interrupted bank's caller-save state (plus
mepc/mcause/mstatus) to the stack through its own memory port. A watermark
gate stalls handler accesses into the not-yet-written part of that frame.
Only the ABI's volatile registers and sp are physically banked; the
preserved registers are shared, which is what lets a context-switch handler
read the suspended task's callee-save state directly.
"""

from __future__ import annotations

from . import layout
from .isa import caller_saved, num_regs

IDLE = "idle"
ADJUST_SP = "adjust_sp"
DRAINING = "draining"
DONE = "done"


class Regfile:
    """Plain register file for the non-banked configurations."""

    __slots__ = ("n", "regs")

    banked = False

    def __init__(self, abi: str):
        self.n = num_regs(abi)
        self.regs = [0] * self.n

    def read(self, i: int) -> int:
        return self.regs[i] if i else 0

    def write(self, i: int, value: int):
        if i:
            self.regs[i] = value & 0xFFFF_FFFF

    def snapshot(self):
        return list(self.regs)


class BankedRegfile:
    """Two-bank register file. `banked_set` registers (caller-save + sp)
    exist twice; everything else lives in shared storage."""

    banked = True

    def __init__(self, abi: str):
        self.n = num_regs(abi)
        self.abi = abi
        self.banked_set = frozenset(caller_saved(abi)) | {2}
        self.shared = [0] * self.n
        self.banks = [[0] * self.n, [0] * self.n]
        self.active = 0
        # per-bank latched {mepc, mcause, mstatus}, captured at switch time
        self.shadows = [None, None]

    def read(self, i: int) -> int:
        if i == 0:
            return 0
        if i in self.banked_set:
            return self.banks[self.active][i]
        return self.shared[i]

    def write(self, i: int, value: int):
        if i == 0:
            return
        value &= 0xFFFF_FFFF
        if i in self.banked_set:
            self.banks[self.active][i] = value
        else:
            self.shared[i] = value

    def read_bank(self, bank: int, i: int) -> int:
        if i == 0:
            return 0
        if i in self.banked_set:
            return self.banks[bank][i]
        return self.shared[i]

    def write_bank(self, bank: int, i: int, value: int):
        if i == 0:
            return
        value &= 0xFFFF_FFFF
        if i in self.banked_set:
            self.banks[bank][i] = value
        else:
            self.shared[i] = value

    def snapshot(self):
        return [self.read(i) for i in range(self.n)]


class SaveFsm:
    __slots__ = ("state", "src_bank", "cursor", "base", "frame_len")

    def __init__(self):
        self.state = IDLE
        self.src_bank = 0
        self.cursor = 0
        self.base = 0
        self.frame_len = 0

    @property
    def active(self) -> bool:
        return self.state in (ADJUST_SP, DRAINING)

    def remaining(self) -> int:
        if self.state == ADJUST_SP:
            return self.frame_len
        if self.state == DRAINING:
            return self.frame_len - self.cursor
        return 0


class FastIrq:
    """Facade the core drives: bank switching, the drain FSM, the stall
    gate, and the swap-back used by the bank-return path."""

    def __init__(self, config, memory, tracer):
        self.config = config
        self.mem = memory
        self.tracer = tracer
        self.abi = config.abi
        self.regs = BankedRegfile(config.abi)
        self.fsm = SaveFsm()
        self.frame_regs = caller_saved(config.abi)
        self.frame_len = layout.frame_len(config.abi)

    # ------------------------------------------------------------ switch

    def bank_switch(self, csr_snapshot, cycle: int) -> int:
        """Swap banks at trap entry. The outgoing bank's sp seeds the
        incoming one, pre-decremented by the frame size, and the save FSM
        is armed against the outgoing bank. Returns the new sp."""
        assert not self.fsm.active, "bank_switch while a drain is in flight"
        old = self.regs.active
        new = 1 - old
        sp_before = self.regs.banks[old][2]
        base = (sp_before - 4 * self.frame_len) & 0xFFFF_FFFF
        self.regs.shadows[old] = csr_snapshot
        self.regs.banks[new][2] = base
        self.regs.active = new
        fsm = self.fsm
        fsm.state = ADJUST_SP
        fsm.src_bank = old
        fsm.cursor = 0
        fsm.base = base
        fsm.frame_len = self.frame_len
        self.tracer.emit(cycle, "bank_switch", frm=old, to=new)
        self.tracer.emit(cycle, "drain_start", base=base,
                         words=self.frame_len)
        return base

    def swap_back(self, cycle: int):
        """Return path: reactivate the drained bank and hand back its
        latched CSR snapshot. Register contents were never destroyed, so
        no memory traffic is needed unless the conservative reload mode is
        on (the caller charges its cycles)."""
        assert not self.fsm.active, "swap_back while a drain is in flight"
        back = 1 - self.regs.active
        self.regs.active = back
        snapshot = self.regs.shadows[back]
        self.regs.shadows[back] = None
        if self.config.restore_from_memory:
            self._reload_frame(back)
            snapshot = self._reload_csrs()
        self.tracer.emit(cycle, "bank_switch", frm=1 - back, to=back)
        return snapshot

    def _reload_frame(self, bank: int):
        base = self.fsm.base
        for i, reg in enumerate(self.frame_regs):
            word, _ = self.mem.access(base + 4 * i, "load", 4, port="drain")
            self.regs.banks[bank][reg] = word
        self.regs.banks[bank][2] = (base + 4 * self.frame_len) & 0xFFFF_FFFF

    def _reload_csrs(self):
        base = self.fsm.base + 4 * len(self.frame_regs)
        mepc, _ = self.mem.access(base, "load", 4, port="drain")
        mcause, _ = self.mem.access(base + 4, "load", 4, port="drain")
        mstatus, _ = self.mem.access(base + 8, "load", 4, port="drain")
        return (mepc, mcause, mstatus)

    # ------------------------------------------------------------- drain

    def tick(self, cycle: int):
        fsm = self.fsm
        if fsm.state == ADJUST_SP:
            # address-setup cycle; the first store lands next cycle
            fsm.state = DRAINING
            return
        if fsm.state != DRAINING:
            return
        if not self.mem.drain_may_proceed():
            return  # shared port, LSU had it this cycle
        idx = fsm.cursor
        value = self._frame_word(fsm.src_bank, idx)
        addr = fsm.base + 4 * idx
        self.mem.access(addr, "store", 4, value, port="drain")
        self.tracer.emit(cycle, "drain_store", idx=idx, addr=addr)
        fsm.cursor += 1
        if fsm.cursor == fsm.frame_len:
            fsm.state = DONE
            self.tracer.emit(cycle, "drain_done", words=fsm.frame_len)

    def _frame_word(self, bank: int, idx: int) -> int:
        nregs = len(self.frame_regs)
        if idx < nregs:
            return self.regs.read_bank(bank, self.frame_regs[idx])
        return self.regs.shadows[bank][idx - nregs]

    # -------------------------------------------------------------- gate

    def gate_access(self, addr: int) -> bool:
        """True while `addr` points into the undrained part of the frame."""
        fsm = self.fsm
        if not fsm.active:
            return False
        if not fsm.base <= addr < fsm.base + 4 * fsm.frame_len:
            return False
        written = 0 if fsm.state == ADJUST_SP else fsm.cursor
        return (addr - fsm.base) // 4 >= written

    @property
    def draining(self) -> bool:
        return self.fsm.active

    def drain_remaining(self) -> int:
        return self.fsm.remaining()
