"""Core engine tests: execution semantics against a reference interpreter,
the charge model, the load-use interlock, traps, and the claim CSRs."""

import random

from irqsim import isa, layout
from irqsim.isa import (CSR_JALMNXTI, CSR_MCAUSE, CSR_MEPC, CSR_MIE,
                        CSR_MNXTI, CSR_MSTATUS, CSR_MTVEC, EXC_ECALL_M,
                        EXC_ILLEGAL, MCAUSE_IRQ, MSTATUS_MIE, MSTATUS_MPIE,
                        MSTATUS_MPP_M)
from irqsim.clic import split_ctl
from irqsim.sim import Simulator

from conftest import builder, make_config, marker_cycles, run_blob

M32 = 0xFFFF_FFFF


def _fetch_cycles(sim):
    return {ev.get("pc"): ev.cycle for ev in sim.tracer.events
            if ev.kind == "fetch"}


# ------------------------------------------------- reference interpreter

def _ref_alu(mn, a, b):
    """Independent model of the ALU, straight from two's-complement math."""
    s = lambda x: x - (1 << 32) if x & (1 << 31) else x
    if mn in ("add", "addi"):
        return (a + b) & M32
    if mn == "sub":
        return (a - b) & M32
    if mn in ("xor", "xori"):
        return a ^ b
    if mn in ("or", "ori"):
        return a | b
    if mn in ("and", "andi"):
        return a & b
    if mn in ("sll", "slli"):
        return (a << (b & 31)) & M32
    if mn in ("srl", "srli"):
        return a >> (b & 31)
    if mn in ("sra", "srai"):
        return (s(a) >> (b & 31)) & M32
    raise AssertionError(mn)


def test_alu_matches_reference_interpreter(cfg_clic):
    rng = random.Random(2024)
    regs = [0] * 32
    b = builder()
    for r in range(1, 10):
        v = rng.randrange(1 << 32)
        b.li(r, v)
        regs[r] = v
    ops_r = ("add", "sub", "xor", "or", "and", "sll", "srl", "sra")
    ops_i = ("addi", "xori", "ori", "andi")
    shifts = ("slli", "srli", "srai")
    emit = {"add": b.add, "sub": b.sub, "xor": b.xor, "or": b.or_,
            "and": b.and_, "sll": b.slli, "srl": b.srli, "sra": b.srai,
            "addi": b.addi, "xori": b.xori, "ori": b.ori, "andi": b.andi,
            "slli": b.slli, "srli": b.srli, "srai": b.srai}
    # register-register shift ops are not in the builder; use a mixed pool
    pool = [m for m in ops_r if m not in ("sll", "srl", "sra")] \
        + list(ops_i) + list(shifts)
    for _ in range(300):
        mn = rng.choice(pool)
        rd, rs1 = rng.randrange(1, 10), rng.randrange(10)
        if mn in ops_i:
            imm = rng.randrange(-2048, 2048)
            emit[mn](rd, rs1, imm)
            regs[rd] = _ref_alu(mn, regs[rs1], imm & M32)
        elif mn in shifts:
            sh = rng.randrange(32)
            emit[mn](rd, rs1, sh)
            regs[rd] = _ref_alu(mn, regs[rs1], sh)
        else:
            rs2 = rng.randrange(10)
            emit[mn](rd, rs1, rs2)
            regs[rd] = _ref_alu(mn, regs[rs1], regs[rs2])
    b.halt(0)
    sim = run_blob(b.assemble(), cfg_clic)
    for r in range(10):
        assert sim.core.regs.read(r) == (regs[r] if r else 0), f"x{r}"


def test_branch_and_jump_semantics(cfg_clic):
    b = builder()
    b.li("t0", 5)
    b.li("t1", 0xFFFF_FFFB)        # -5 signed
    b.blt("t1", "t0", "took_lt")   # signed: -5 < 5 taken
    b.halt(9)
    b.label("took_lt")
    b.bltu("t1", "t0", "bad")      # unsigned: huge, not taken
    b.bgeu("t1", "t0", "took_geu")
    b.halt(9)
    b.label("took_geu")
    jal_pc = b.pc
    b.jal("ra", "sub1")
    b.marker(2)
    b.halt(0)
    b.label("sub1")
    b.marker(1)
    b.jr("ra")
    b.label("bad")
    b.halt(9)
    sim = run_blob(b.assemble(), cfg_clic)
    halts = [ev for ev in sim.tracer.events if ev.kind == "halt"]
    assert halts[0].get("tag") == 0
    assert [t for _, t in marker_cycles(sim)] == [1, 2]
    # ra linked past the jal
    assert sim.core.regs.read(1) == jal_pc + 4


def test_determinism_same_program_same_trace(cfg_clic):
    def go():
        b = builder()
        b.li("t0", 3)
        b.label("loop")
        b.addi("t0", "t0", -1)
        b.marker(1)
        b.bnez("t0", "loop")
        b.halt(0)
        sim = run_blob(b.assemble(), make_config(controller="clic",
                                                 trace="full"))
        return sim.tracer.render(), sim.cycle
    assert go() == go()


# ----------------------------------------------------------- charge model

def _charge_between_markers(body, cfg=None, setup=None):
    """Cycles charged to the instruction(s) between two markers."""
    b = builder()
    if setup:
        setup(b)
    b.marker(1)
    body(b)
    b.marker(2)
    b.halt(0)
    sim = run_blob(b.assemble(), cfg or make_config(trace="full"))
    (c1, _), (c2, _) = marker_cycles(sim)
    return c2 - c1 - 1


def test_instruction_charges():
    t = make_config().timing
    assert _charge_between_markers(lambda b: b.addi(5, 0, 1)) == t.base == 1
    assert _charge_between_markers(lambda b: b.nop()) == 1
    assert _charge_between_markers(
        lambda b: b.lw(5, 0, 6),
        setup=lambda b: b.li(6, layout.DATA_BASE)) == t.load == 1
    assert _charge_between_markers(
        lambda b: b.sw(5, 0, 6),
        setup=lambda b: b.li(6, layout.DATA_BASE)) == t.store == 1
    assert _charge_between_markers(
        lambda b: b.csrr(5, CSR_MSTATUS)) == t.csr == 2
    assert _charge_between_markers(
        lambda b: b.csrsi(CSR_MSTATUS, 0)) == 2

    def jump_next(b):
        b.jal(0, "jt")
        b.label("jt")
    assert _charge_between_markers(jump_next) == t.jump == 2
    assert _charge_between_markers(lambda b: b.fence()) == 1
    assert _charge_between_markers(lambda b: b.wfi()) == 1


def test_branch_charges():
    t = make_config().timing

    def not_taken(b):
        b.bnez(0, "nt")             # x0 is never nonzero
        b.label("nt")
    assert _charge_between_markers(not_taken) == t.branch_not_taken == 1
    # taken: the marker right after the target
    b = builder()
    b.marker(1)
    b.beqz(0, "target")
    b.label("target")
    b.marker(2)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(trace="full"))
    (c1, _), (c2, _) = marker_cycles(sim)
    assert c2 - c1 - 1 == t.branch_taken == 2


def test_wait_states_add_to_memory_charges():
    cfg = make_config(wait_states=2, trace="full")
    assert _charge_between_markers(
        lambda b: b.lw(5, 0, 6),
        cfg=cfg, setup=lambda b: b.li(6, layout.DATA_BASE)) == 3
    assert _charge_between_markers(
        lambda b: b.sw(5, 0, 6),
        cfg=cfg, setup=lambda b: b.li(6, layout.DATA_BASE)) == 3


# ------------------------------------------------------ load-use interlock

def _runtime(fill):
    b = builder()
    b.li(6, layout.DATA_BASE)
    b.sw(0, 0, 6)
    fill(b)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(trace="full"))
    return sim.cycle, sim


def test_load_use_stalls_one_cycle():
    base, _ = _runtime(lambda b: (b.lw(5, 0, 6), b.add(7, 8, 8)))
    dep, sim = _runtime(lambda b: (b.lw(5, 0, 6), b.add(7, 5, 5)))
    assert dep == base + 1
    stalls = [ev for ev in sim.tracer.events if ev.kind == "stall"]
    assert len(stalls) == 1 and stalls[0].get("cycles") == 1


def test_load_use_covers_store_data_operand():
    # a store whose *data* register was loaded the cycle before stalls
    # exactly like a consumer of the value
    base, _ = _runtime(lambda b: (b.lw(5, 0, 6), b.sw(7, 4, 6)))
    data_dep, _ = _runtime(lambda b: (b.lw(5, 0, 6), b.sw(5, 4, 6)))
    assert data_dep == base + 1


def test_load_use_address_dependence_stalls():
    # lw t0 <- [t1]; lw t2 <- [t0] : address operand came from the load
    b = builder()
    b.li(6, layout.DATA_BASE)
    b.li(5, layout.DATA_BASE + 8)
    b.sw(5, 0, 6)                   # mem[DATA] = DATA+8
    b.marker(1)
    b.lw(5, 0, 6)
    b.lw(7, 0, 5)
    b.marker(2)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(trace="full"))
    (c1, _), (c2, _) = marker_cycles(sim)
    assert c2 - c1 - 1 == 3         # 1 + (1 stall + 1)


def test_interlock_cleared_by_overwrite():
    # the loaded register is overwritten before use: no stall
    plain, _ = _runtime(lambda b: (b.lw(5, 0, 6), b.addi(5, 0, 1),
                                   b.add(7, 5, 5)))
    reference, _ = _runtime(lambda b: (b.lw(8, 0, 6), b.addi(5, 0, 1),
                                       b.add(7, 5, 5)))
    assert plain == reference


def test_gap_dissolves_interlock():
    dep, _ = _runtime(lambda b: (b.lw(5, 0, 6), b.add(7, 5, 5)))
    gapped, _ = _runtime(lambda b: (b.lw(5, 0, 6), b.nop(), b.add(7, 5, 5)))
    assert gapped == dep            # one nop replaces the one stall exactly


def test_csr_immediate_form_never_interlocks():
    # csrrsi's rs1 field is a literal; a pending load into x5 must not
    # stall it
    base, _ = _runtime(lambda b: (b.lw(5, 0, 6),
                                  b.csrrsi(0, CSR_MSTATUS, 0)))
    dep, _ = _runtime(lambda b: (b.lw(7, 0, 6),
                                 b.csrrsi(0, CSR_MSTATUS, 0)))
    assert base == dep


# ------------------------------------------------------------------ traps

def test_exception_round_trip():
    b = builder()
    b.li("sp", layout.MAIN_SP)
    b.li("t0", layout.HANDLER_BASE)
    b.csrw(CSR_MTVEC, "t0")
    b.csrsi(CSR_MSTATUS, 8)         # MIE on, to check MPIE round trip
    b.label("site")
    b.ecall()
    b.marker(2)
    b.halt(0)
    b.org(layout.HANDLER_BASE)
    b.label("handler")
    b.csrr("t1", CSR_MCAUSE)
    b.csrr("t2", CSR_MEPC)
    b.csrr("a0", CSR_MSTATUS)
    b.addi("t2", "t2", 4)
    b.csrw(CSR_MEPC, "t2")
    b.marker(1)
    b.mret()
    sim = run_blob(b.assemble(), make_config(controller="clic",
                                             trace="full"))
    assert [t for _, t in marker_cycles(sim)] == [1, 2]
    regs = sim.core.regs
    assert regs.read(6) == EXC_ECALL_M                 # mcause
    assert regs.read(7) == b.addr_of("site") + 4       # mepc after +4
    # inside the handler: MPP=M, MPIE set (MIE was on), MIE clear
    assert regs.read(10) == MSTATUS_MPP_M | MSTATUS_MPIE
    # after mret: MIE restored from MPIE
    assert sim.core.csrs.mstatus & MSTATUS_MIE


def test_exception_entry_cost_is_direct():
    # ecall commits at C; handler's first instruction fetches at C+4
    # (1 sync + 3 direct-entry cycles)
    b = builder()
    b.li("t0", layout.HANDLER_BASE)
    b.csrw(CSR_MTVEC, "t0")
    b.label("site")
    b.ecall()
    b.org(layout.HANDLER_BASE)
    b.label("handler")
    b.marker(1)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(trace="full"))
    fetches = _fetch_cycles(sim)
    ecall_issue = fetches[b.addr_of("site")]
    handler_fetch = fetches[b.addr_of("handler")]
    assert handler_fetch - ecall_issue == 4


def test_illegal_instruction_traps_with_mtval():
    b = builder()
    b.li("t0", layout.HANDLER_BASE)
    b.csrw(CSR_MTVEC, "t0")
    b.label("site")
    b._emit(0xFFFF_FFFF)            # not a valid encoding
    b.org(layout.HANDLER_BASE)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(trace="full"))
    assert sim.core.csrs.mcause == EXC_ILLEGAL
    assert sim.core.csrs.mtval == 0xFFFF_FFFF
    assert sim.core.csrs.mepc == b.addr_of("site")


def test_unknown_csr_traps():
    b = builder()
    b.li("t0", layout.HANDLER_BASE)
    b.csrw(CSR_MTVEC, "t0")
    b.csrr(5, 0x7C0)                # unimplemented custom CSR
    b.org(layout.HANDLER_BASE)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(trace="full"))
    assert sim.core.csrs.mcause == EXC_ILLEGAL


def test_emret_is_illegal_outside_banked_config():
    b = builder()
    b.li("t0", layout.HANDLER_BASE)
    b.csrw(CSR_MTVEC, "t0")
    b.emret()
    b.org(layout.HANDLER_BASE)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(controller="clic",
                                             trace="full"))
    assert sim.core.csrs.mcause == EXC_ILLEGAL
    assert sim.core.csrs.mtval == isa.WORD_EMRET


def test_csr_set_clear_with_zero_source_does_not_write():
    b = builder()
    b.csrsi(CSR_MSTATUS, 8)         # turn MIE on
    b.csrrs(5, CSR_MSTATUS, 0)      # read, no write
    b.csrrc(6, CSR_MSTATUS, 0)      # read, no write
    b.csrrci(7, CSR_MSTATUS, 0)     # uimm 0: read, no write
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(trace="full"))
    assert sim.core.csrs.mstatus & MSTATUS_MIE
    assert sim.core.regs.read(5) & MSTATUS_MIE
    assert sim.core.regs.read(6) & MSTATUS_MIE
    assert sim.core.regs.read(7) & MSTATUS_MIE


# ------------------------------------------------- interrupt entry timing

def _armed_sim(cfg, *, lines, handler_word=None, sled=64):
    """nop sled with controller state poked directly (no boot code)."""
    b = builder()
    for _ in range(sled):
        b.nop()
    b.halt(0)
    sim = Simulator(cfg)
    sim.mem.load_image("instr-spm", b.assemble(),
                       offset=layout.RESET_PC - layout.INSTR_BASE)
    csrs = sim.core.csrs
    csrs.mstatus |= MSTATUS_MIE
    csrs.mtvec = layout.HANDLER_BASE
    csrs.mtvt = layout.MTVT_TABLE
    hb = builder(layout.HANDLER_BASE)
    hb.marker(1)
    hb.halt(0)
    sim.mem.load_image("instr-spm", hb.assemble(),
                       offset=layout.HANDLER_BASE - layout.INSTR_BASE)
    for lid, ctl, shv in lines:
        line = sim.clic.lines[lid]
        line.enabled = True
        line.edge = True
        line.shv = shv
        line.ctl = ctl
        sim.mem.poke_word(layout.MTVT_TABLE + 4 * lid, layout.HANDLER_BASE)
    return sim


def test_vectored_accept_handshake_timing():
    cfg = make_config(controller="clic", trace="full")
    sim = _armed_sim(cfg, lines=[(5, 0xF0, True)])
    T = 12
    sim.at(T, 5, 1)
    sim.run(400)
    assert sim.halted
    ev = {k: [e for e in sim.tracer.events if e.kind == k]
          for k in ("pend", "present", "accept", "trap_enter", "marker")}
    assert ev["pend"][0].cycle == T            # latched as it is applied
    assert ev["present"][0].cycle == T + 1     # next arbitration pass
    assert ev["accept"][0].cycle == T + 2      # after one full stable cycle
    # vectored entry: first handler instruction 4 cycles after accept
    assert marker_cycles(sim)[0][0] == T + 6
    assert ev["trap_enter"][0].get("target") == layout.HANDLER_BASE


def test_direct_accept_handshake_timing():
    cfg = make_config(controller="clic", trace="full")
    sim = _armed_sim(cfg, lines=[(5, 0xF0, False)])
    T = 12
    sim.at(T, 5, 1)
    sim.run(400)
    ev = [e for e in sim.tracer.events if e.kind == "accept"]
    assert ev[0].cycle == T + 2
    # direct entry is one cycle cheaper than vectored
    assert marker_cycles(sim)[0][0] == T + 5
    # the line is NOT retired by acceptance: the claim path owns it
    assert sim.clic.lines[5].pending


def test_interrupt_entry_saves_and_masks():
    cfg = make_config(controller="clic", trace="full")
    sim = _armed_sim(cfg, lines=[(5, 0xF0, True)])
    sim.core.csrs.mil = 0x10
    sim.at(12, 5, 1)
    sim.run(400)
    csrs = sim.core.csrs
    assert csrs.mcause & MCAUSE_IRQ
    assert csrs.mcause & 0xFFF == 5
    assert (csrs.mcause >> 16) & 0xFF == 0x10          # previous level
    assert csrs.mil == split_ctl(0xF0, cfg.nlbits)[0]  # running level
    assert csrs.mstatus & MSTATUS_MPIE                 # MIE was on
    assert not csrs.mstatus & MSTATUS_MIE              # masked in handler
    assert csrs.mepc % 4 == 0


def test_higher_level_preempts_pending_lower():
    cfg = make_config(controller="clic", trace="full")
    sim = _armed_sim(cfg, lines=[(3, 0x40, True), (9, 0xF0, True)])
    sim.at(12, 3, 1)
    sim.at(13, 9, 1)                # better line arrives one cycle later
    sim.run(400)
    accepts = [e for e in sim.tracer.events if e.kind == "accept"]
    assert accepts[0].get("id") == 9
    kills = [e for e in sim.tracer.events if e.kind == "kill"]
    assert len(kills) == 1


# ----------------------------------------------------- mnxti brute force

def test_mnxti_claim_brute_force():
    rng = random.Random(0xC1A1)
    cfg = make_config(controller="clic", trace="off")
    trials = 1200
    claims = 0
    for trial in range(trials):
        nlbits = rng.randrange(9)
        b = builder()
        b.label("site")
        b.csrrsi(10, CSR_MNXTI, 8)
        b.halt(0)
        sim = Simulator(make_config(controller="clic", nlbits=nlbits,
                                    trace="off"))
        sim.mem.load_image("instr-spm", b.assemble(),
                           offset=layout.RESET_PC - layout.INSTR_BASE)
        csrs = sim.core.csrs
        csrs.mtvt = layout.MTVT_TABLE
        csrs.mintthresh = rng.randrange(256)
        csrs.mil = rng.randrange(256)
        mpil = rng.randrange(256)
        csrs.mcause = MCAUSE_IRQ | (mpil << 16) | 5
        state = {}
        for line in sim.clic.lines:
            line.pending = rng.random() < 0.35
            line.enabled = rng.random() < 0.7
            line.shv = rng.random() < 0.4
            line.edge = rng.random() < 0.8
            line.ctl = rng.randrange(256)
            state[line.id] = (line.pending, line.edge)
        # oracle: best claimable line by (level, prio, id)
        floor = max(csrs.mintthresh, mpil)
        best = None
        for line in sim.clic.lines:
            if not (line.pending and line.enabled) or line.shv:
                continue
            level, prio = split_ctl(line.ctl, nlbits)
            if level <= floor:
                continue
            key = (level, prio, line.id)
            if best is None or key > best:
                best = key
        sim.run(50)
        assert sim.halted and not sim.fault, trial
        rd = sim.core.regs.read(10)
        if best is None:
            assert rd == 0, trial
            assert csrs.mcause == MCAUSE_IRQ | (mpil << 16) | 5, trial
            assert not csrs.mstatus & MSTATUS_MIE, trial
        else:
            claims += 1
            level, prio, lid = best
            assert rd == layout.MTVT_TABLE + 4 * lid, trial
            assert csrs.mcause == MCAUSE_IRQ | (mpil << 16) | lid, trial
            assert csrs.mil == level, trial
            assert csrs.mstatus & MSTATUS_MIE, trial
            was_pending, is_edge = state[lid]
            assert sim.clic.lines[lid].pending == (not is_edge), trial
    # the distribution must exercise both outcomes heavily
    assert 200 < claims < trials - 200, claims


def test_mnxti_no_claim_leaves_zero_in_rd():
    b = builder()
    b.li(10, 0x1234)
    b.csrrsi(10, CSR_MNXTI, 8)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(controller="clic",
                                             trace="full"))
    assert sim.core.regs.read(10) == 0


def test_jalmnxti_claims_and_self_links():
    cfg = make_config(controller="clic", trace="full")
    b = builder()
    b.label("site")
    b.csrrw("ra", CSR_JALMNXTI, "ra")
    b.marker(2)                     # fallthrough when nothing is pending
    b.halt(0)
    body = builder(layout.HANDLER_BASE)
    body.marker(1)
    body.halt(0)
    sim = Simulator(cfg)
    sim.mem.load_image("instr-spm", b.assemble(),
                       offset=layout.RESET_PC - layout.INSTR_BASE)
    sim.mem.load_image("instr-spm", body.assemble(),
                       offset=layout.HANDLER_BASE - layout.INSTR_BASE)
    csrs = sim.core.csrs
    csrs.mtvt = layout.MTVT_TABLE
    line = sim.clic.lines[6]
    line.pending = line.enabled = line.edge = True
    line.ctl = 0xF0
    sim.mem.poke_word(layout.MTVT_TABLE + 24, layout.HANDLER_BASE)
    sim.run(100)
    assert sim.halted
    assert [t for _, t in marker_cycles(sim)] == [1]    # jumped to the body
    assert sim.core.regs.read(1) == b.addr_of("site")   # self-link
    assert csrs.mcause & 0xFFF == 6
    assert csrs.mstatus & MSTATUS_MIE
    assert not line.pending


def test_jalmnxti_falls_through_without_claim():
    cfg = make_config(controller="clic", trace="full")
    b = builder()
    b.li("ra", 0x5555)
    b.csrrw("ra", CSR_JALMNXTI, "ra")
    b.marker(2)
    b.halt(0)
    sim = run_blob(b.assemble(), cfg)
    assert [t for _, t in marker_cycles(sim)] == [2]
    assert sim.core.regs.read(1) == 0


# --------------------------------------------------------------- mret/mie

def test_clint_mie_csr_mirrors_line_enables():
    b = builder()
    b.li("t0", (1 << 3) | (1 << 7))
    b.csrw(CSR_MIE, "t0")
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(controller="clint",
                                             trace="full"))
    enabled = {l.id for l in sim.clic.lines if l.enabled}
    assert enabled == {3, 7}
    assert sim.core.csrs.read(CSR_MIE) == (1 << 3) | (1 << 7)


def test_mie_reads_zero_under_clic():
    b = builder()
    b.li("t0", 0xFF)
    b.csrw(CSR_MIE, "t0")
    b.csrr("t1", CSR_MIE)
    b.halt(0)
    sim = run_blob(b.assemble(), make_config(controller="clic",
                                             trace="full"))
    assert sim.core.regs.read(6) == 0


def test_mret_restores_level_from_mpil():
    cfg = make_config(controller="clic", trace="full")
    sim = _armed_sim(cfg, lines=[(5, 0xF0, True)])
    csrs = sim.core.csrs
    csrs.mil = 0x30
    # handler at HANDLER_BASE: mret straight back
    hb = builder(layout.HANDLER_BASE)
    hb.mret()
    sim.mem.load_image("instr-spm", hb.assemble(),
                       offset=layout.HANDLER_BASE - layout.INSTR_BASE)
    sim.at(12, 5, 1)
    sim.run(400)
    assert sim.halted
    assert csrs.mil == 0x30        # restored at trap return
