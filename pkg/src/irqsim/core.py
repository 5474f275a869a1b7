"""RV32 in-order core model.

The four-stage pipeline is folded into a charge model: one instruction is
in flight at a time, issued at an execute-boundary and charged a whole
number of cycles (the calibration table in config). Architectural effects
land at the end of the last charged cycle, which is what makes the
return-redirect and back-to-back entry accounting come out right. Interrupt
acceptance, trap-entry countdowns, load-use stalls, and the banked-regfile
gates all hang off the issue boundary.
"""

from __future__ import annotations

from . import isa, layout
from .isa import (
    MSTATUS_MIE, MSTATUS_MPIE, MSTATUS_MPP_M, MCAUSE_IRQ,
    MCAUSE_MPIL_SHIFT, MCAUSE_ID_MASK,
)
from .memory import BusFault
from .fastirq import Regfile

MASK32 = 0xFFFF_FFFF


class CsrFile:
    """Machine-mode CSR state. mnxti/jalmnxti have no storage here; their
    protocol lives in the core's CSR commit path."""

    __slots__ = ("mode", "mstatus", "mepc", "mcause", "mtvec", "mtvt",
                 "mscratch", "mtval", "mie_reg", "mintthresh", "mil", "abi")

    def __init__(self, controller: str, abi: str):
        self.mode = controller           # clint | clic | fastirq
        self.abi = abi
        self.mstatus = 0
        self.mepc = 0
        self.mcause = 0
        self.mtvec = 0
        self.mtvt = 0
        self.mscratch = 0
        self.mtval = 0
        self.mie_reg = 0                 # legacy interrupt-enable mask
        self.mintthresh = 0
        self.mil = 0                     # running interrupt level

    def mie_enabled(self) -> bool:
        return bool(self.mstatus & MSTATUS_MIE)

    @property
    def mpil(self) -> int:
        return (self.mcause >> MCAUSE_MPIL_SHIFT) & 0xFF

    def read(self, addr: int, clic=None):
        c = isa
        if addr == c.CSR_MSTATUS:
            return self.mstatus
        if addr == c.CSR_MEPC:
            return self.mepc
        if addr == c.CSR_MCAUSE:
            return self.mcause
        if addr == c.CSR_MTVEC:
            return self.mtvec
        if addr == c.CSR_MTVT:
            return self.mtvt
        if addr == c.CSR_MSCRATCH:
            return self.mscratch
        if addr == c.CSR_MTVAL:
            return self.mtval
        if addr == c.CSR_MIE:
            return self.mie_reg if self.mode == "clint" else 0
        if addr == c.CSR_MIP:
            if self.mode == "clint" and clic is not None:
                return clic.mip_view()
            return 0
        if addr == c.CSR_MINTSTATUS:
            return self.mil << isa.MINTSTATUS_MIL_SHIFT
        if addr == c.CSR_MINTTHRESH:
            return self.mintthresh
        if addr == c.CSR_MISA:
            base = 1 << 30
            return base | (1 << 8) if self.abi == "I" else base | (1 << 4)
        if addr == c.CSR_MHARTID:
            return 0
        return None

    def write(self, addr: int, value: int) -> bool:
        c = isa
        value &= MASK32
        if addr == c.CSR_MSTATUS:
            self.mstatus = value & (MSTATUS_MIE | MSTATUS_MPIE | MSTATUS_MPP_M)
            return True
        if addr == c.CSR_MEPC:
            self.mepc = value & ~3
            return True
        if addr == c.CSR_MCAUSE:
            self.mcause = value
            return True
        if addr == c.CSR_MTVEC:
            self.mtvec = value
            return True
        if addr == c.CSR_MTVT:
            self.mtvt = value & ~0x3F
            return True
        if addr == c.CSR_MSCRATCH:
            self.mscratch = value
            return True
        if addr == c.CSR_MTVAL:
            self.mtval = value
            return True
        if addr == c.CSR_MIE:
            if self.mode == "clint":
                self.mie_reg = value
            return True
        if addr == c.CSR_MIP:
            return True   # read-only view, writes dropped
        if addr == c.CSR_MINTSTATUS:
            return True   # read-only
        if addr == c.CSR_MINTTHRESH:
            self.mintthresh = value & 0xFF
            return True
        if addr in (c.CSR_MISA, c.CSR_MHARTID):
            return True
        return False


class _Inflight:
    __slots__ = ("instr", "pc", "remaining", "first_cycle")

    def __init__(self, instr, pc, remaining, first_cycle):
        self.instr = instr
        self.pc = pc
        self.remaining = remaining
        self.first_cycle = first_cycle


def _sources(instr):
    """Register numbers read at issue (for the load-use interlock)."""
    op = instr.op
    if op in (isa.OP_ALU, isa.OP_BRANCH, isa.OP_STORE):
        return (instr.rs1, instr.rs2)
    if op in (isa.OP_ALU_IMM, isa.OP_LOAD, isa.OP_JALR):
        return (instr.rs1,)
    if op == isa.OP_CSR and instr.f3 <= 3:
        return (instr.rs1,)
    return ()


class Core:
    def __init__(self, config, mem, clic, fast, tracer):
        self.config = config
        self.timing = config.timing
        self.mem = mem
        self.clic = clic
        self.fast = fast                      # None outside fastirq configs
        self.tracer = tracer
        self.csrs = CsrFile(config.controller, config.abi)
        self.regs = fast.regs if fast is not None else Regfile(config.abi)
        self.pc = layout.RESET_PC
        self.halted = False
        self.fault = None
        self.cycle = 0
        self.retired = 0
        self._inflight: _Inflight | None = None
        self._trapseq = 0
        self._trapseq_pc = None
        self._trapseq_action = None
        # load-use interlock: destination and the cycle it becomes usable
        self._ld_rd = 0
        self._ld_ready = 0
        self._stall_accum = 0
        self._nested_wait = 0
        self._retire_queue = []

    # ------------------------------------------------------------ helpers

    def flush_retires(self, cycle: int):
        while self._retire_queue and self._retire_queue[0][0] <= cycle:
            when, pc = self._retire_queue.pop(0)
            self.tracer.emit(when, "retire", pc=pc)

    def _emit_retire(self, cycle: int, pc: int):
        self.retired += 1
        self._retire_queue.append((cycle + 1, pc))

    # --------------------------------------------------------------- tick

    def tick(self, cycle: int):
        self.cycle = cycle
        if self.halted:
            return

        if self._trapseq > 0:
            self._trapseq -= 1
            if self._trapseq == 0:
                self._finish_trapseq(cycle)
            return

        fl = self._inflight
        if fl is not None:
            fl.remaining -= 1
            if fl.remaining == 0:
                self._commit(fl, cycle)
                self._inflight = None
            return

        # issue boundary: interrupts first, then the next instruction
        if self._try_accept(cycle):
            return
        self._issue(cycle)

    # ------------------------------------------------------------ accept

    def _try_accept(self, cycle: int) -> bool:
        sel = self.clic.acceptable(cycle)
        if sel is None:
            return False
        if self.fast is not None and self.fast.draining:
            # entry must wait for the in-flight drain: both banks are busy
            self._nested_wait += 1
            return True
        if self._nested_wait:
            self.tracer.emit(cycle, "nested_wait", cycles=self._nested_wait)
            self._nested_wait = 0
        self.clic.accept(sel, cycle)
        self.tracer.emit(cycle, "accept", id=sel.id, level=sel.level)
        self._enter_trap_irq(sel, cycle)
        return True

    def _enter_trap_irq(self, sel, cycle: int):
        csrs = self.csrs
        line = self.clic.lines[sel.id]
        if self.clic.clint_mode:
            vectored = bool(csrs.mtvec & 1)
            target = ((csrs.mtvec & ~3) + 4 * sel.id) if vectored \
                else (csrs.mtvec & ~3)
            shv = False
        else:
            shv = line.shv or self.fast is not None
            vectored = shv
            # non-vectored lines funnel into the common entry; vectored
            # targets come from the handler table below
            target = None if vectored else (csrs.mtvec & ~3)

        csrs.mepc = self.pc
        csrs.mcause = MCAUSE_IRQ | (sel.id & MCAUSE_ID_MASK) \
            | (csrs.mil << MCAUSE_MPIL_SHIFT)
        old_mie = csrs.mstatus & MSTATUS_MIE
        csrs.mstatus = MSTATUS_MPP_M | (MSTATUS_MPIE if old_mie else 0)
        if self.fast is not None:
            # banked entry keeps interrupts enabled: the fresh bank makes
            # same-mode reentry safe and levels do the gating
            csrs.mstatus |= MSTATUS_MIE
        if not self.clic.clint_mode:
            csrs.mil = sel.level

        if self.fast is not None:
            snapshot = (csrs.mepc, csrs.mcause, csrs.mstatus)
            self.fast.bank_switch(snapshot, cycle)

        if vectored and not self.clic.clint_mode:
            target = self._vector_load(sel.id, cycle)
            if target is None:
                return
        self.tracer.emit(cycle, "trap_enter", id=sel.id, shv=vectored,
                         mpil=csrs.mpil, target=target)
        cost = self.timing.entry_cost(vectored and not self.clic.clint_mode)
        # the accept cycle is the first entry cycle
        self._start_trapseq(cost - 1, target, cycle)

    def _enter_trap_exc(self, code: int, epc: int, cycle: int, tval: int = 0):
        csrs = self.csrs
        csrs.mepc = epc
        csrs.mcause = code & MCAUSE_ID_MASK
        csrs.mtval = tval & MASK32
        old_mie = csrs.mstatus & MSTATUS_MIE
        csrs.mstatus = MSTATUS_MPP_M | (MSTATUS_MPIE if old_mie else 0)
        target = csrs.mtvec & ~3
        self.tracer.emit(cycle, "trap_enter", id=code, shv=False,
                         mpil=csrs.mpil, target=target, exc=1)
        self._start_trapseq(self.timing.trap_entry_direct, target, cycle)

    def _start_trapseq(self, cycles: int, target, cycle: int):
        if cycles <= 0:
            self.pc = target
            return
        self._trapseq = cycles
        self._trapseq_pc = target
        self._trapseq_action = None

    def _finish_trapseq(self, cycle: int):
        if self._trapseq_action is not None:
            action = self._trapseq_action
            self._trapseq_action = None
            action(cycle)
        if self._trapseq_pc is not None:
            self.pc = self._trapseq_pc
            self._trapseq_pc = None

    def _vector_load(self, line_id: int, cycle: int):
        addr = (self.csrs.mtvt & MASK32) + 4 * line_id
        try:
            target, lat = self.mem.access(addr, "load", 4, port="vector")
        except BusFault as e:
            self._raise_fault(cycle, e)
            return None
        self.tracer.emit(cycle, "vector_load", addr=addr, target=target,
                         lat=lat)
        return target

    # ------------------------------------------------------------- issue

    def _issue(self, cycle: int):
        try:
            word = self.mem.fetch_word(self.pc)
        except BusFault as e:
            self._raise_fault(cycle, e)
            return
        instr = isa.decode(word, self.config.abi)

        if self.fast is not None and self.config.stall_mode == "block_all" \
                and self.fast.draining:
            self._stall_accum += 1
            return
        if self._needs_interlock(instr, cycle):
            self._stall_accum += 1
            return
        if instr.op in (isa.OP_LOAD, isa.OP_STORE) and self.fast is not None:
            addr = (self.regs.read(instr.rs1) + instr.imm) & MASK32
            if self.config.stall_mode == "watermark" \
                    and self.fast.gate_access(addr):
                self._stall_accum += 1
                return

        if self._stall_accum:
            self.tracer.emit(cycle, "stall", pc=self.pc,
                             cycles=self._stall_accum)
            self._stall_accum = 0

        self.tracer.emit(cycle, "fetch", pc=self.pc)
        if instr.op == isa.OP_MARKER:
            self.tracer.emit(cycle, "marker", tag=instr.imm, pc=self.pc)

        # remaining counts ticks after the issue cycle: an instruction
        # charged k cycles commits at issue+k-1 and the next issues at +k
        charge = self._charge(instr)
        fl = _Inflight(instr, self.pc, charge - 1, cycle)
        if charge == 1:
            self._commit(fl, cycle)
        else:
            self._inflight = fl

    def _needs_interlock(self, instr, cycle: int) -> bool:
        if self._ld_rd == 0 or cycle >= self._ld_ready:
            return False
        srcs = _sources(instr)
        return self._ld_rd in srcs

    def _charge(self, instr) -> int:
        t = self.timing
        op = instr.op
        if op == isa.OP_BRANCH:
            return t.branch_taken if self._branch_taken(instr) \
                else t.branch_not_taken
        if op in (isa.OP_JAL, isa.OP_JALR):
            return t.jump
        if op == isa.OP_LOAD:
            addr = (self.regs.read(instr.rs1) + instr.imm) & MASK32
            return t.load + self.mem.wait_states_for(addr)
        if op == isa.OP_STORE:
            addr = (self.regs.read(instr.rs1) + instr.imm) & MASK32
            return t.store + self.mem.wait_states_for(addr)
        if op == isa.OP_CSR:
            return t.csr
        if op == isa.OP_MRET:
            return t.mret
        if op == isa.OP_EMRET:
            return t.emret_query
        return t.base

    def _branch_taken(self, instr) -> bool:
        a = self.regs.read(instr.rs1)
        b = self.regs.read(instr.rs2)
        f3 = instr.f3
        if f3 == 0:
            return a == b
        if f3 == 1:
            return a != b
        sa, sb = isa.sext(a, 32), isa.sext(b, 32)
        if f3 == 4:
            return sa < sb
        if f3 == 5:
            return sa >= sb
        if f3 == 6:
            return a < b
        return a >= b

    # ------------------------------------------------------------ commit

    def _commit(self, fl: _Inflight, cycle: int):
        handler = _COMMIT_HANDLERS[fl.instr.op]
        next_pc = handler(self, fl.instr, fl.pc, cycle)
        if next_pc is not None:
            self.pc = next_pc
        if not self.halted:
            self._emit_retire(cycle, fl.pc)

    # ---- commit handlers (dispatch table at module bottom) ----

    def _c_lui(self, i, pc, cycle):
        self._write_rd(i.rd, i.imm)
        return pc + 4

    def _c_auipc(self, i, pc, cycle):
        self._write_rd(i.rd, (pc + i.imm) & MASK32)
        return pc + 4

    def _c_jal(self, i, pc, cycle):
        self._write_rd(i.rd, pc + 4)
        return (pc + i.imm) & MASK32

    def _c_jalr(self, i, pc, cycle):
        target = (self.regs.read(i.rs1) + i.imm) & ~1 & MASK32
        self._write_rd(i.rd, pc + 4)
        return target

    def _c_branch(self, i, pc, cycle):
        if self._branch_taken(i):
            return (pc + i.imm) & MASK32
        return pc + 4

    def _c_load(self, i, pc, cycle):
        addr = (self.regs.read(i.rs1) + i.imm) & MASK32
        width = (1, 2, 4, 0, 1, 2)[i.f3]
        try:
            data, lat = self.mem.access(addr, "load", width)
        except BusFault as e:
            self._raise_fault(cycle, e)
            return None
        if i.f3 == 0:
            data = isa.sext(data, 8) & MASK32
        elif i.f3 == 1:
            data = isa.sext(data, 16) & MASK32
        self.tracer.emit(cycle, "load", addr=addr, data=data, lat=lat)
        self._write_rd(i.rd, data)
        if i.rd:
            self._ld_rd = i.rd
            self._ld_ready = cycle + self.timing.load_use_delay
        return pc + 4

    def _c_store(self, i, pc, cycle):
        addr = (self.regs.read(i.rs1) + i.imm) & MASK32
        width = (1, 2, 4)[i.f3]
        value = self.regs.read(i.rs2)
        try:
            _, lat = self.mem.access(addr, "store", width, value)
        except BusFault as e:
            self._raise_fault(cycle, e)
            return None
        self.tracer.emit(cycle, "store", addr=addr, data=value, lat=lat)
        return pc + 4

    def _c_alu_imm(self, i, pc, cycle):
        self._write_rd(i.rd, _alu(i.f3, i.f7, self.regs.read(i.rs1), i.imm,
                                  imm_mode=True))
        return pc + 4

    def _c_alu(self, i, pc, cycle):
        self._write_rd(i.rd, _alu(i.f3, i.f7, self.regs.read(i.rs1),
                                  self.regs.read(i.rs2), imm_mode=False))
        return pc + 4

    def _c_fence(self, i, pc, cycle):
        return pc + 4

    def _c_wfi(self, i, pc, cycle):
        return pc + 4

    def _c_marker(self, i, pc, cycle):
        return pc + 4

    def _c_halt(self, i, pc, cycle):
        self.halted = True
        self.tracer.emit(cycle, "halt", pc=pc, tag=i.imm)
        return pc

    def _c_ecall(self, i, pc, cycle):
        self._enter_trap_exc(isa.EXC_ECALL_M, pc, cycle)
        return None

    def _c_ebreak(self, i, pc, cycle):
        self._enter_trap_exc(isa.EXC_BREAKPOINT, pc, cycle)
        return None

    def _c_illegal(self, i, pc, cycle):
        self._enter_trap_exc(isa.EXC_ILLEGAL, pc, cycle, tval=i.raw)
        return None

    def _c_mret(self, i, pc, cycle):
        return self._mret_semantics(cycle)

    def _mret_semantics(self, cycle: int):
        csrs = self.csrs
        mpie = bool(csrs.mstatus & MSTATUS_MPIE)
        csrs.mstatus = MSTATUS_MPP_M | MSTATUS_MPIE \
            | (MSTATUS_MIE if mpie else 0)
        if not self.clic.clint_mode:
            csrs.mil = csrs.mpil
        self.tracer.emit(cycle, "trap_return", to=csrs.mepc)
        return csrs.mepc

    def _c_emret(self, i, pc, cycle):
        if self.fast is None:
            self._enter_trap_exc(isa.EXC_ILLEGAL, pc, cycle, tval=i.raw)
            return None
        csrs = self.csrs
        floor = max(csrs.mintthresh, csrs.mpil)
        sel = self.clic.claim_scan(floor, ceiling=csrs.mil)
        if sel is not None:
            # tail-chain: same bank, same frame, straight to the next body
            self.clic.claim(sel)
            csrs.mcause = MCAUSE_IRQ | (sel.id & MCAUSE_ID_MASK) \
                | (csrs.mpil << MCAUSE_MPIL_SHIFT)
            csrs.mil = sel.level
            self.tracer.emit(cycle, "emret", chain=1, id=sel.id,
                             level=sel.level)
            target = self._vector_load(sel.id, cycle)
            if target is None:
                return None
            self.tracer.emit(cycle, "trap_enter", id=sel.id, shv=True,
                             mpil=csrs.mpil, target=target, chained=1)
            self._trapseq = self.timing.trap_entry_vectored
            self._trapseq_pc = target
            self._trapseq_action = None
            return None
        wait = self.fast.drain_remaining()
        reload = self.fast.frame_len + 3 if self.config.restore_from_memory \
            else 0
        self.tracer.emit(cycle, "emret", chain=0, wait=wait)
        self._trapseq = wait + reload + self.timing.mret
        self._trapseq_pc = None
        self._trapseq_action = self._emret_return
        return None

    def _emret_return(self, cycle: int):
        snapshot = self.fast.swap_back(cycle)
        csrs = self.csrs
        csrs.mepc, csrs.mcause, csrs.mstatus = snapshot
        self.pc = self._mret_semantics(cycle)

    def _c_csr(self, i, pc, cycle):
        csrs = self.csrs
        addr = i.csr
        f3 = i.f3
        imm_mode = f3 >= 5
        src = i.rs1 if imm_mode else self.regs.read(i.rs1)
        kind = f3 & 3   # 1 write, 2 set, 3 clear

        if addr == isa.CSR_MNXTI:
            return self._csr_mnxti(i, pc, cycle, kind, src)
        if addr == isa.CSR_JALMNXTI:
            return self._csr_jalmnxti(i, pc, cycle)

        old = csrs.read(addr, self.clic)
        if old is None:
            self._enter_trap_exc(isa.EXC_ILLEGAL, pc, cycle, tval=i.raw)
            return None
        if kind == 1:
            csrs.write(addr, src)
        elif kind == 2 and i.rs1:
            csrs.write(addr, old | src)
        elif kind == 3 and i.rs1:
            csrs.write(addr, old & ~src)
        if addr == isa.CSR_MIE and self.clic.clint_mode:
            # legacy enables live in the CSR; mirror them into the lines
            for line in self.clic.lines:
                line.enabled = bool((csrs.mie_reg >> line.id) & 1)
        self._write_rd(i.rd, old)
        return pc + 4

    def _csr_mnxti(self, i, pc, cycle, kind, src):
        """Claim protocol: hand back the handler-table address of the best
        pending non-vectored line above both the threshold and the
        interrupted context's level, updating mcause/mil atomically."""
        csrs = self.csrs
        floor = max(csrs.mintthresh, csrs.mpil)
        sel = self.clic.claim_scan(floor, require_non_shv=True)
        if sel is None:
            self._write_rd(i.rd, 0)
            return pc + 4
        self.clic.claim(sel)
        csrs.mcause = MCAUSE_IRQ | (sel.id & MCAUSE_ID_MASK) \
            | (csrs.mpil << MCAUSE_MPIL_SHIFT)
        csrs.mil = sel.level
        if kind == 2 and (src & MSTATUS_MIE):
            csrs.mstatus |= MSTATUS_MIE
        elif kind == 3 and (src & MSTATUS_MIE):
            csrs.mstatus &= ~MSTATUS_MIE
        addr = (csrs.mtvt + 4 * sel.id) & MASK32
        self.tracer.emit(cycle, "pend", line=sel.id, claimed=1)
        self._write_rd(i.rd, addr)
        return pc + 4

    def _csr_jalmnxti(self, i, pc, cycle):
        """Fused claim-and-jump: on a claim, link rd to this instruction's
        own address (so the handler's return re-executes the claim) and
        jump through the handler table; otherwise write 0 and fall
        through."""
        csrs = self.csrs
        floor = max(csrs.mintthresh, csrs.mpil)
        sel = self.clic.claim_scan(floor, require_non_shv=True)
        if sel is None:
            self._write_rd(i.rd, 0)
            return pc + 4
        self.clic.claim(sel)
        csrs.mcause = MCAUSE_IRQ | (sel.id & MCAUSE_ID_MASK) \
            | (csrs.mpil << MCAUSE_MPIL_SHIFT)
        csrs.mil = sel.level
        csrs.mstatus |= MSTATUS_MIE
        self.tracer.emit(cycle, "pend", line=sel.id, claimed=1)
        target = self._vector_load(sel.id, cycle)
        if target is None:
            return None
        self._write_rd(i.rd, pc)
        return target

    # ----------------------------------------------------------- utility

    def _write_rd(self, rd: int, value: int):
        self.regs.write(rd, value)
        if rd and rd == self._ld_rd:
            self._ld_rd = 0   # freshly overwritten, interlock moot

    def _raise_fault(self, cycle: int, err: BusFault):
        self.fault = str(err)
        self.halted = True
        self.tracer.emit(cycle, "fault", addr=err.addr, kind=err.kind)


def _alu(f3, f7, a, b, imm_mode):
    a &= MASK32
    b &= MASK32
    if f3 == 0:
        if not imm_mode and f7 == 0b0100000:
            return (a - b) & MASK32
        return (a + b) & MASK32
    if f3 == 1:
        return (a << (b & 31)) & MASK32
    if f3 == 2:
        return 1 if isa.sext(a, 32) < isa.sext(b, 32) else 0
    if f3 == 3:
        return 1 if a < b else 0
    if f3 == 4:
        return a ^ b
    if f3 == 5:
        if f7 == 0b0100000:
            return (isa.sext(a, 32) >> (b & 31)) & MASK32
        return a >> (b & 31)
    if f3 == 6:
        return a | b
    return a & b


_COMMIT_HANDLERS = {
    isa.OP_LUI: Core._c_lui,
    isa.OP_AUIPC: Core._c_auipc,
    isa.OP_JAL: Core._c_jal,
    isa.OP_JALR: Core._c_jalr,
    isa.OP_BRANCH: Core._c_branch,
    isa.OP_LOAD: Core._c_load,
    isa.OP_STORE: Core._c_store,
    isa.OP_ALU_IMM: Core._c_alu_imm,
    isa.OP_ALU: Core._c_alu,
    isa.OP_CSR: Core._c_csr,
    isa.OP_FENCE: Core._c_fence,
    isa.OP_WFI: Core._c_wfi,
    isa.OP_MARKER: Core._c_marker,
    isa.OP_HALT: Core._c_halt,
    isa.OP_ECALL: Core._c_ecall,
    isa.OP_EBREAK: Core._c_ebreak,
    isa.OP_MRET: Core._c_mret,
    isa.OP_EMRET: Core._c_emret,
    isa.OP_ILLEGAL: Core._c_illegal,
}
