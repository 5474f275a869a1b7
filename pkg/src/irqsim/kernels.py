"""Hand-counted benchmark kernels.

Every cycle in these listings is load-bearing: the acceptance bands in the
sweep are calibrated against exactly these instruction sequences, so edits
here move measured numbers. Markers carry measurement tags (1 = first
observation point, 2 = second); tag 100 marks boot completion and is
ignored by the analyzer.

All kernels are emitted for both ABIs from the same code paths; the E
variants differ only through the register sets and frame sizes they pull
from isa/layout.
"""

from __future__ import annotations

from . import isa, layout
from .asm import ProgramBuilder
from .isa import (
    CSR_MCAUSE, CSR_MEPC, CSR_MIE, CSR_MINTTHRESH, CSR_MNXTI, CSR_MSCRATCH,
    CSR_MSTATUS, CSR_MTVEC, CSR_MTVT, CSR_JALMNXTI,
    caller_saved, callee_saved, num_regs,
)

BOOT_TAG = 100
TAG_FIRST = 1
TAG_SECOND = 2

# ctl byte for benchmark lines: with nlbits=4 this is level 0xFF, prio 0,
# so two-line scenarios tie on level and arbitrate on id
LEVEL_CTL = 0xF0

# post-entry mstatus snapshots used to pre-seed task B's suspended state
MSTATUS_SUSPENDED = isa.MSTATUS_MPP_M | isa.MSTATUS_MPIE              # 0x1880
MSTATUS_SUSPENDED_BANKED = MSTATUS_SUSPENDED | isa.MSTATUS_MIE        # 0x1888


class Build:
    """What a kernel builder hands the scenario runner."""

    def __init__(self, blob: bytes, base: int, data, meta):
        self.blob = blob
        self.base = base
        self.data = data        # list of (addr, word) pokes into data SPM
        self.meta = meta


def build(measurement: str, flavor: str, cfg) -> Build:
    try:
        fn = _BUILDERS[(measurement, flavor)]
    except KeyError:
        raise ValueError(
            f"no kernel for measurement={measurement!r} flavor={flavor!r}"
        ) from None
    return fn(cfg)


# ------------------------------------------------------------------- boot

def _emit_boot(b: ProgramBuilder, *, mtvec, vectored=False, mtvt=None,
               lines=(), mie_mask=None, sp=layout.MAIN_SP, mscratch=None,
               thresh=None, extra=None):
    b.label("boot")
    b.li("sp", sp)
    b.li("t0", mtvec | (1 if vectored else 0))
    b.csrw(CSR_MTVEC, "t0")
    if mtvt is not None:
        b.li("t0", mtvt)
        b.csrw(CSR_MTVT, "t0")
    for line_id, ctl, shv, edge in lines:
        attr = (layout.CLIC_ATTR_SHV if shv else 0) \
            | (layout.CLIC_ATTR_EDGE if edge else 0)
        b.li("t0", layout.clic_line_addr(line_id))
        b.li("t1", attr)
        b.sb("t1", 2, "t0")
        b.li("t1", ctl)
        b.sb("t1", 3, "t0")
        b.li("t1", 1)
        b.sb("t1", 1, "t0")
    if mie_mask is not None:
        b.li("t0", mie_mask)
        b.csrw(CSR_MIE, "t0")
    if thresh is not None:
        b.li("t0", thresh)
        b.csrw(CSR_MINTTHRESH, "t0")
    if mscratch is not None:
        b.li("t0", mscratch)
        b.csrw(CSR_MSCRATCH, "t0")
    b.csrsi(CSR_MSTATUS, 8)
    if extra is not None:
        extra(b)
    b.marker(BOOT_TAG)
    b.j("task")


def _emit_sled(b: ProgramBuilder, n: int = 140):
    b.org(layout.TASK_BASE)
    b.label("task")
    for _ in range(n):
        b.nop()
    b.halt(0)


# ------------------------------------------------ full save/restore pieces

def _temps(abi):
    # three scratch registers that are caller-saved under the given ABI
    return ("t0", "t1", "t2") if abi == "I" else ("t0", "t1", "a0")


def _emit_full_save(b: ProgramBuilder, abi: str, clint: bool = False) -> str:
    """Push all caller-saved registers plus mepc/mcause/mstatus.
    26 cycles (I) / 17 (E). The CLINT flavor snapshots-and-masks mie in the
    mcause slot (it has no levels to gate nesting with). Returns the name
    of the register left holding mcause (for the irq/exception dispatch)."""
    fb = layout.frame_bytes(abi)
    callers = caller_saved(abi)
    t0, t1, t2 = _temps(abi)
    b.addi("sp", "sp", -fb)
    for k, r in enumerate(callers):
        b.sw(r, 4 * k, "sp")
    o = 4 * len(callers)
    b.csrr(t0, CSR_MEPC)
    b.sw(t0, o, "sp")
    if clint:
        # snapshot mie and mask the lower-ranked software interrupt before
        # the prologue re-enables mstatus.mie
        b.csrrci(t1, CSR_MIE, 0b00010)
    else:
        b.csrr(t1, CSR_MCAUSE)
    b.sw(t1, o + 4, "sp")
    b.csrr(t2, CSR_MSTATUS)
    b.sw(t2, o + 8, "sp")
    return t1


def _emit_full_restore(b: ProgramBuilder, abi: str, clint: bool = False):
    """Mirror of _emit_full_save plus the trap return. 33 cycles (I)."""
    fb = layout.frame_bytes(abi)
    callers = caller_saved(abi)
    t0, t1, t2 = _temps(abi)
    o = 4 * len(callers)
    b.csrci(CSR_MSTATUS, 8)
    b.lw(t0, o, "sp")
    b.csrw(CSR_MEPC, t0)
    b.lw(t1, o + 4, "sp")
    b.csrw(CSR_MIE if clint else CSR_MCAUSE, t1)
    b.lw(t2, o + 8, "sp")
    b.csrw(CSR_MSTATUS, t2)
    for k, r in enumerate(callers):
        b.lw(r, 4 * k, "sp")
    b.addi("sp", "sp", fb)
    b.mret()


# -------------------------------------------------------- latency kernels

def _lat_meta(lines, extra=None):
    meta = {"measurement": "latency", "lines": list(lines), "lead": 8}
    if extra:
        meta.update(extra)
    return meta


def _build_lat_clint(cfg):
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    line = 3   # machine software interrupt
    _emit_boot(b, mtvec=layout.CLINT_VECTOR_TABLE, vectored=True,
               mie_mask=1 << line)
    b.org(layout.CLINT_VECTOR_TABLE)
    for _ in range(32):
        b.j("handler")
    b.org(layout.HANDLER_BASE)
    b.label("handler")
    _emit_full_save(b, cfg.abi, clint=True)
    b.csrsi(CSR_MSTATUS, 8)
    b.marker(TAG_FIRST)
    _emit_full_restore(b, cfg.abi, clint=True)
    _emit_sled(b)
    return Build(b.assemble(), b.base, [], _lat_meta([line]))


def _build_lat_clic(cfg):
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    line = 5
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(line, LEVEL_CTL, True, True)])
    b.org(layout.HANDLER_BASE)
    b.label("handler")
    _emit_full_save(b, cfg.abi)
    b.csrsi(CSR_MSTATUS, 8)
    b.marker(TAG_FIRST)
    _emit_full_restore(b, cfg.abi)
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 4 * line, b.addr_of("handler"))]
    return Build(b.assemble(), b.base, data, _lat_meta([line]))


def _build_lat_minimal(cfg):
    """CLIC with the header-only prologue: one register spill, the three
    CSR saves reusing it, and the nesting enable."""
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    line = 5
    fb = layout.frame_bytes(cfg.abi)
    o = 4 * len(caller_saved(cfg.abi))
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(line, LEVEL_CTL, True, True)])
    b.org(layout.HANDLER_BASE)
    b.label("handler")
    b.addi("sp", "sp", -fb)
    b.sw("t0", 4, "sp")
    b.csrr("t0", CSR_MEPC)
    b.sw("t0", o, "sp")
    b.csrr("t0", CSR_MCAUSE)
    b.sw("t0", o + 4, "sp")
    b.csrr("t0", CSR_MSTATUS)
    b.sw("t0", o + 8, "sp")
    b.csrsi(CSR_MSTATUS, 8)
    b.marker(TAG_FIRST)
    # inline epilogue, same single working register
    b.csrci(CSR_MSTATUS, 8)
    b.lw("t0", o, "sp")
    b.csrw(CSR_MEPC, "t0")
    b.lw("t0", o + 4, "sp")
    b.csrw(CSR_MCAUSE, "t0")
    b.lw("t0", o + 8, "sp")
    b.csrw(CSR_MSTATUS, "t0")
    b.lw("t0", 4, "sp")
    b.addi("sp", "sp", fb)
    b.mret()
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 4 * line, b.addr_of("handler"))]
    return Build(b.assemble(), b.base, data, _lat_meta([line]))


def _emit_xnxti_handler(b: ProgramBuilder, abi: str):
    """Common non-vectored entry with the claim-register service loop."""
    b.label("handler")
    cause = _emit_full_save(b, abi)
    b.bltz(cause, "xn_loop")
    b.j("xn_done")                     # exception side, unused here
    b.label("xn_loop")
    b.csrrsi("a0", CSR_MNXTI, 8)       # claim; also re-enables mstatus.mie
    b.beqz("a0", "xn_done")
    b.lw("a1", 0, "a0")
    b.jalr("ra", "a1", 0)
    b.csrci(CSR_MSTATUS, 8)
    b.j("xn_loop")
    b.label("xn_done")
    _emit_full_restore(b, abi)


def _build_lat_xnxti(cfg):
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    line = 5
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(line, LEVEL_CTL, False, True)])
    b.org(layout.HANDLER_BASE)
    _emit_xnxti_handler(b, cfg.abi)
    b.label("body5")
    b.marker(TAG_FIRST)
    b.ret()
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 4 * line, b.addr_of("body5"))]
    return Build(b.assemble(), b.base, data, _lat_meta([line]))


def _emit_jalxnxti_handler(b: ProgramBuilder, abi: str):
    """Common entry built around the fused claim-and-jump register: bodies
    return straight into the csrrw, so the claim loop is the instruction
    itself. Falls through to the restore when nothing is claimable."""
    b.label("handler")
    _emit_full_save(b, abi)
    b.csrrw("ra", CSR_JALMNXTI, "ra")
    _emit_full_restore(b, abi)


def _build_lat_jalxnxti(cfg):
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    line = 5
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(line, LEVEL_CTL, False, True)])
    b.org(layout.HANDLER_BASE)
    _emit_jalxnxti_handler(b, cfg.abi)
    b.label("body5")
    b.marker(TAG_FIRST)
    b.ret()
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 4 * line, b.addr_of("body5"))]
    return Build(b.assemble(), b.base, data, _lat_meta([line]))


def _build_lat_fastirq(cfg):
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    line = 5
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(line, LEVEL_CTL, True, True)])
    b.org(layout.HANDLER_BASE)
    b.label("handler")
    b.marker(TAG_FIRST)
    b.emret()
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 4 * line, b.addr_of("handler"))]
    return Build(b.assemble(), b.base, data, _lat_meta([line]))


# --------------------------------------------------- back-to-back kernels

def _b2b_meta(lines):
    return {"measurement": "back2back", "lines": list(lines), "lead": 8}


def _build_b2b_clic(cfg):
    # two same-level lines; id arbitration serves 6 then 5 through one
    # full exit/re-entry of the shared handler
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    lines = [6, 5]
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(i, LEVEL_CTL, True, True) for i in lines])
    b.org(layout.HANDLER_BASE)
    b.label("handler")
    _emit_full_save(b, cfg.abi)
    b.csrsi(CSR_MSTATUS, 8)
    b.marker(TAG_FIRST)
    _emit_full_restore(b, cfg.abi)
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 4 * i, b.addr_of("handler")) for i in lines]
    return Build(b.assemble(), b.base, data, _b2b_meta(lines))


def _build_b2b_xnxti(cfg):
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    lines = [6, 5]
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(i, LEVEL_CTL, False, True) for i in lines])
    b.org(layout.HANDLER_BASE)
    _emit_xnxti_handler(b, cfg.abi)
    b.label("body6")
    b.marker(TAG_FIRST)
    b.ret()
    b.label("body5")
    b.marker(TAG_SECOND)
    b.ret()
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 24, b.addr_of("body6")),
            (layout.MTVT_TABLE + 20, b.addr_of("body5"))]
    return Build(b.assemble(), b.base, data, _b2b_meta(lines))


def _build_b2b_jalxnxti(cfg):
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    lines = [6, 5]
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(i, LEVEL_CTL, False, True) for i in lines])
    b.org(layout.HANDLER_BASE)
    _emit_jalxnxti_handler(b, cfg.abi)
    b.label("body6")
    b.marker(TAG_FIRST)
    b.ret()
    b.label("body5")
    b.marker(TAG_SECOND)
    b.ret()
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 24, b.addr_of("body6")),
            (layout.MTVT_TABLE + 20, b.addr_of("body5"))]
    return Build(b.assemble(), b.base, data, _b2b_meta(lines))


def _build_b2b_fastirq(cfg):
    # the first handler is padded past the drain window so the tail-chain
    # cost is measured pure, with no save-engine wait folded in
    b = ProgramBuilder(layout.RESET_PC, cfg.abi)
    lines = [6, 5]
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(i, LEVEL_CTL, True, True) for i in lines])
    b.org(layout.HANDLER_BASE)
    b.label("handler6")
    for _ in range(16):
        b.nop()
    b.marker(TAG_FIRST)
    b.emret()
    b.label("handler5")
    b.marker(TAG_SECOND)
    b.emret()
    _emit_sled(b)
    data = [(layout.MTVT_TABLE + 24, b.addr_of("handler6")),
            (layout.MTVT_TABLE + 20, b.addr_of("handler5"))]
    return Build(b.assemble(), b.base, data, _b2b_meta(lines))


# ------------------------------------------------- context-switch kernels

def _emit_scheduler(b: ProgramBuilder):
    """Round-robin pick plus a fixed think loop; 64 cycles, shared verbatim
    by both switch implementations so the comparison isolates save/restore."""
    hi = layout.TCB_CURRENT >> 12
    lo = layout.TCB_CURRENT & 0xFFF
    b.lui("a1", hi)
    b.lw("a0", lo, "a1")
    b.lw("a0", layout.CTX_NEXT, "a0")
    b.sw("a0", lo, "a1")
    b.nop()
    b.li("t1", 19)
    b.label("sched_loop")
    b.addi("t1", "t1", -1)
    b.bnez("t1", "sched_loop")


def _ctx_meta():
    return {"measurement": "ctxswitch", "lines": [], "lead": 0}


def _build_ctx_baseline(cfg):
    """Software switch: trap to a full-save handler, scheduler, full
    restore of the other task. mscratch carries the running task's context
    block pointer; the trigger is an environment call."""
    abi = cfg.abi
    b = ProgramBuilder(layout.RESET_PC, abi)
    _emit_boot(b, mtvec=layout.HANDLER_BASE, sp=layout.STACK_A_TOP,
               mscratch=layout.CTX_A)

    b.org(layout.HANDLER_BASE)
    b.label("handler")
    b.csrrw("sp", CSR_MSCRATCH, "sp")      # sp = context block, mscratch = user sp
    regs = [r for r in range(1, num_regs(abi)) if r != 2]
    for r in regs:
        b.sw(r, layout.ctx_gpr_slot(r), "sp")
    b.csrr("t0", CSR_MSCRATCH)
    b.sw("t0", layout.ctx_gpr_slot(2), "sp")
    b.csrr("t1", CSR_MCAUSE)
    b.sw("t1", layout.CTX_MCAUSE, "sp")
    b.bltz("t1", "irq_side")
    b.csrr("t0", CSR_MEPC)                 # ecall: resume past the trigger
    b.addi("t0", "t0", 4)
    b.sw("t0", layout.CTX_MEPC, "sp")
    b.csrr("t1", CSR_MSTATUS)
    b.sw("t1", layout.CTX_MSTATUS, "sp")

    b.label("sched")
    _emit_scheduler(b)

    # a0 = incoming task's context block
    b.csrw(CSR_MSCRATCH, "a0")
    b.lw("t1", layout.CTX_MEPC, "a0")
    b.lw("t2", layout.CTX_MSTATUS, "a0")
    b.csrw(CSR_MEPC, "t1")
    b.csrw(CSR_MSTATUS, "t2")
    for r in range(1, num_regs(abi)):
        if r == 10:
            continue                        # a0 is the base, restored last
        b.lw(r, layout.ctx_gpr_slot(r), "a0")
    b.lw("a0", layout.ctx_gpr_slot(10), "a0")
    b.mret()

    b.label("irq_side")                     # interrupt flavor, unused here
    b.csrr("t0", CSR_MEPC)
    b.sw("t0", layout.CTX_MEPC, "sp")
    b.csrr("t1", CSR_MSTATUS)
    b.sw("t1", layout.CTX_MSTATUS, "sp")
    b.j("sched")

    b.org(layout.TASK_BASE)
    b.label("task")                         # task A
    b.marker(TAG_FIRST)
    b.ecall()
    b.nop()
    b.nop()
    b.halt(0)
    b.org(layout.TASK_BASE + 0x80)
    b.label("task_b")
    b.marker(TAG_SECOND)
    b.ecall()
    b.nop()
    b.nop()
    b.j("task_b")

    data = [
        (layout.TCB_CURRENT, layout.CTX_A),
        (layout.CTX_A + layout.CTX_NEXT, layout.CTX_B),
        (layout.CTX_B + layout.CTX_NEXT, layout.CTX_A),
        (layout.CTX_B + layout.CTX_MEPC, b.addr_of("task_b") + 8),
        (layout.CTX_B + layout.CTX_MCAUSE, isa.EXC_ECALL_M),
        (layout.CTX_B + layout.CTX_MSTATUS, MSTATUS_SUSPENDED),
        (layout.CTX_B + layout.ctx_gpr_slot(2), layout.STACK_B_TOP),
    ]
    for r in regs:
        data.append((layout.CTX_B + layout.ctx_gpr_slot(r),
                     0xB000_0000 + r))
    return Build(b.assemble(), b.base, data, _ctx_meta())


def _build_ctx_accel(cfg):
    """Banked switch: the save engine drains the suspended task's frame in
    the background, the handler only records the stack top and the shared
    callee-saved registers, and the restore rebuilds the incoming task from
    its context block and drained frame."""
    abi = cfg.abi
    fb = layout.frame_bytes(abi)
    callers = caller_saved(abi)
    callees = callee_saved(abi)
    line = 5
    pend_addr = layout.clic_line_addr(line)

    def task_regs(bb):
        bb.li("t0", pend_addr)
        bb.li("t1", 1)

    b = ProgramBuilder(layout.RESET_PC, abi)
    _emit_boot(b, mtvec=layout.HANDLER_BASE, mtvt=layout.MTVT_TABLE,
               lines=[(line, LEVEL_CTL, True, True)],
               sp=layout.STACK_A_TOP, extra=task_regs)

    p, q = ("t3", "t4") if abi == "I" else ("t0", "t1")
    fp = "t5" if abi == "I" else "a1"
    c0, c1 = ("t1", "t2") if abi == "I" else ("t0", "t1")

    b.org(layout.HANDLER_BASE)
    b.label("handler")
    b.lui(p, layout.TCB_CURRENT >> 12)
    b.lw(p, layout.TCB_CURRENT & 0xFFF, p)
    b.addi(q, "sp", fb)                     # outgoing task's stack top
    b.sw(q, layout.CTX_SPTOP, p)            # (the addi hides the load delay)
    for r in callees:
        b.sw(r, layout.ctx_gpr_slot(r), p)

    _emit_scheduler(b)

    # a0 = incoming task's context block; its caller-save state lives in
    # the frame the save engine drained below its recorded stack top
    b.lw(fp, layout.CTX_SPTOP, "a0")
    for r in callees:
        b.lw(r, layout.ctx_gpr_slot(r), "a0")
    b.lw(c0, -12, fp)                       # saved mepc
    b.lw(c1, -4, fp)                        # saved mstatus
    b.csrw(CSR_MEPC, c0)
    b.csrw(CSR_MSTATUS, c1)
    fp_num = isa.REG_NUM[fp]
    for k, r in enumerate(callers):
        if r == fp_num:
            continue
        b.lw(r, -fb + 4 * k, fp)
    b.mv("sp", fp)
    b.lw(fp, -fb + 4 * callers.index(fp_num), "sp")
    b.mret()

    b.org(layout.TASK_BASE)
    b.label("task")                         # task A
    b.marker(TAG_FIRST)
    b.sb("t1", 0, "t0")                     # pend our own line
    b.nop()
    b.nop()
    b.halt(0)
    b.org(layout.TASK_BASE + 0x80)
    b.label("task_b")
    b.marker(TAG_SECOND)
    b.sb("t1", 0, "t0")
    b.nop()
    b.nop()
    b.j("task_b")

    frame_base = layout.STACK_B_TOP - fb
    data = [
        (layout.MTVT_TABLE + 4 * line, b.addr_of("handler")),
        (layout.TCB_CURRENT, layout.CTX_A),
        (layout.CTX_A + layout.CTX_NEXT, layout.CTX_B),
        (layout.CTX_B + layout.CTX_NEXT, layout.CTX_A),
        (layout.CTX_B + layout.CTX_SPTOP, layout.STACK_B_TOP),
    ]
    for r in callees:
        data.append((layout.CTX_B + layout.ctx_gpr_slot(r),
                     0xB000_0000 + r))
    # task B's drained frame, exactly as the save engine would have left it
    for k, r in enumerate(callers):
        if r == 5:
            word = pend_addr                # B's t0: its trigger address
        elif r == 6:
            word = 1                        # B's t1: the pend value
        else:
            word = 0xBF00_0000 + k
        data.append((frame_base + 4 * k, word))
    n = len(callers)
    data += [
        (frame_base + 4 * n, b.addr_of("task_b") + 12),      # mepc
        (frame_base + 4 * (n + 1),
         isa.MCAUSE_IRQ | line),                             # mcause
        (frame_base + 4 * (n + 2), MSTATUS_SUSPENDED_BANKED),  # mstatus
    ]
    return Build(b.assemble(), b.base, data, _ctx_meta())


_BUILDERS = {
    ("latency", "clint"): _build_lat_clint,
    ("latency", "clic"): _build_lat_clic,
    ("latency", "minimal"): _build_lat_minimal,
    ("latency", "xnxti"): _build_lat_xnxti,
    ("latency", "jalxnxti"): _build_lat_jalxnxti,
    ("latency", "fastirq"): _build_lat_fastirq,
    ("back2back", "clic"): _build_b2b_clic,
    ("back2back", "xnxti"): _build_b2b_xnxti,
    ("back2back", "jalxnxti"): _build_b2b_jalxnxti,
    ("back2back", "fastirq"): _build_b2b_fastirq,
    ("ctxswitch", "baseline"): _build_ctx_baseline,
    ("ctxswitch", "accel"): _build_ctx_accel,
}
