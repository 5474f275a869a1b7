"""Banked register file, drain FSM, watermark gate, and swap-back."""

import pytest

from irqsim import isa, layout
from irqsim.fastirq import (ADJUST_SP, DONE, DRAINING, IDLE, BankedRegfile,
                            FastIrq, Regfile)
from irqsim.memory import Memory
from irqsim.trace import Tracer

from conftest import make_config

SP_TOP = layout.DATA_BASE + 0x8000


def _fast(abi="I", **kw):
    cfg = make_config(controller="fastirq", abi=abi, **kw)
    mem = Memory(cfg, clic=None, tracer=Tracer("off"))
    return FastIrq(cfg, mem, Tracer("full"))


def _seed_bank(fi, sp=SP_TOP):
    """Distinct value in every register of the active bank."""
    for r in range(1, fi.regs.n):
        fi.regs.write(r, 0xA0000000 + r)
    fi.regs.write(2, sp)


def _drain_all(fi, start=0):
    cycle = start
    while fi.fsm.state != DONE:
        fi.tick(cycle)
        cycle += 1
    return cycle


# ---------------------------------------------------------------- regfiles

def test_plain_regfile_x0_hardwired():
    rf = Regfile("I")
    rf.write(0, 123)
    assert rf.read(0) == 0
    rf.write(5, 0x1_0000_0007)
    assert rf.read(5) == 7           # masked to 32 bits
    assert Regfile("E").n == 16


def test_banked_regfile_split():
    rf = BankedRegfile("I")
    assert rf.banked_set == set(isa.CALLER_SAVED_I) | {2}
    rf.write(5, 111)                 # banked (t0)
    rf.write(9, 222)                 # shared (s1)
    rf.active = 1
    assert rf.read(5) == 0           # other bank's copy
    assert rf.read(9) == 222         # shared registers cross banks
    rf.write(5, 333)
    rf.active = 0
    assert rf.read(5) == 111
    assert rf.read_bank(1, 5) == 333
    rf.write_bank(1, 9, 444)         # shared write through either bank
    assert rf.read(9) == 444
    rf.write(0, 9)
    assert rf.read(0) == 0


# ------------------------------------------------------------- bank switch

def test_bank_switch_seeds_sp_and_arms_fsm():
    fi = _fast("I")
    _seed_bank(fi)
    base = fi.bank_switch((0x100, 0x200, 0x300), cycle=5)
    assert base == SP_TOP - 4 * fi.frame_len
    assert fi.regs.active == 1
    assert fi.regs.read(2) == base            # new bank enters pre-decremented
    assert fi.fsm.state == ADJUST_SP
    assert fi.drain_remaining() == fi.frame_len
    assert fi.draining
    kinds = [ev.kind for ev in fi.tracer.events]
    assert kinds == ["bank_switch", "drain_start"]


def test_frame_image_matches_layout_and_abi():
    for abi in ("I", "E"):
        fi = _fast(abi)
        _seed_bank(fi)
        snap = (0xE101, 0xE202, 0xE303)       # mepc, mcause, mstatus
        base = fi.bank_switch(snap, cycle=0)
        _drain_all(fi)
        regs = list(isa.caller_saved(abi))
        assert fi.frame_len == len(regs) + 3
        assert fi.frame_len == layout.frame_len(abi)
        for i, reg in enumerate(regs):
            assert fi.mem.word(base + 4 * i) == 0xA0000000 + reg, (abi, reg)
        assert fi.mem.word(base + 4 * len(regs)) == 0xE101
        assert fi.mem.word(base + 4 * len(regs) + 4) == 0xE202
        assert fi.mem.word(base + 4 * len(regs) + 8) == 0xE303
        # layout's frame table names the same slots in the same order
        names = layout.frame_slots(abi)
        assert names[len(regs):] == ("mepc", "mcause", "mstatus")
        assert names[:len(regs)] == tuple(isa.REG_NAMES[r] for r in regs)
        assert layout.frame_offset("mepc", abi) == 4 * len(regs)
        assert layout.frame_offset("mstatus", abi) == 4 * fi.frame_len - 4
        assert layout.frame_bytes(abi) == 4 * fi.frame_len


def test_no_store_at_or_above_old_sp():
    fi = _fast("I")
    _seed_bank(fi)
    fi.bank_switch((1, 2, 3), cycle=0)
    _drain_all(fi)
    tops = [ev.get("addr") for ev in fi.tracer.events
            if ev.kind == "drain_store"]
    assert max(tops) == SP_TOP - 4
    assert all(a < SP_TOP for a in tops)
    assert min(tops) == SP_TOP - 4 * fi.frame_len


def test_drain_is_one_store_per_cycle():
    for abi, words in (("I", 19), ("E", 10)):
        fi = _fast(abi)
        _seed_bank(fi)
        fi.bank_switch((0, 0, 0), cycle=0)
        end = _drain_all(fi, start=1)
        stores = [ev for ev in fi.tracer.events if ev.kind == "drain_store"]
        assert len(stores) == words
        cycles = [ev.cycle for ev in stores]
        # setup cycle first, then consecutive stores in slot order
        assert cycles == list(range(2, 2 + words))
        assert [ev.get("idx") for ev in stores] == list(range(words))
        assert fi.tracer.events[-1].kind == "drain_done"
        assert end == 2 + words


def test_drain_remaining_counts_down():
    fi = _fast("E")
    _seed_bank(fi)
    fi.bank_switch((0, 0, 0), cycle=0)
    seen = [fi.drain_remaining()]
    cycle = 1
    while fi.fsm.state != DONE:
        fi.tick(cycle)
        cycle += 1
        seen.append(fi.drain_remaining())
    assert seen[0] == 10                       # armed, nothing written
    assert seen[1] == 10                       # setup cycle writes nothing
    assert seen[2:] == list(range(9, -1, -1))


# ------------------------------------------------------------------- gate

def test_gate_covers_undrained_frame_words():
    fi = _fast("I")
    _seed_bank(fi)
    base = fi.bank_switch((0, 0, 0), cycle=0)
    # during the setup cycle nothing is written: the whole frame is gated
    assert fi.gate_access(base)
    assert fi.gate_access(base + 4 * (fi.frame_len - 1))
    assert not fi.gate_access(base - 4)        # below the frame
    assert not fi.gate_access(base + 4 * fi.frame_len)   # old sp and above
    fi.tick(1)                                 # setup
    fi.tick(2)                                 # store word 0
    assert not fi.gate_access(base)            # drained word is free
    assert fi.gate_access(base + 4)
    fi.tick(3)
    assert not fi.gate_access(base + 4)
    # once done, nothing is gated
    _drain_all(fi, start=4)
    assert not fi.gate_access(base)
    assert not fi.draining


def test_gate_wait_for_last_word():
    # an access to the last frame word (old sp - 4, slot 18) issued right
    # after the switch has to wait for the whole drain: 72/4 = slot 18
    # is written in the 19th store cycle
    fi = _fast("I")
    _seed_bank(fi)
    base = fi.bank_switch((0, 0, 0), cycle=0)
    target = base + 72
    stalls = 0
    cycle = 1
    while fi.gate_access(target):
        fi.tick(cycle)
        cycle += 1
        stalls += 1
    assert stalls == 20    # setup + stores 0..18; freed when slot 18 lands


# -------------------------------------------------------------- swap back

def test_swap_back_returns_snapshot_and_keeps_registers():
    fi = _fast("I")
    _seed_bank(fi)
    snap = (0xAA, 0xBB, 0xCC)
    fi.bank_switch(snap, cycle=0)
    _drain_all(fi)
    fi.regs.write(5, 0x5555)                   # handler clobbers its own bank
    got = fi.swap_back(cycle=30)
    assert got == snap
    assert fi.regs.active == 0
    assert fi.regs.shadows[0] is None
    # original bank contents survived untouched
    for r in fi.frame_regs:
        assert fi.regs.read(r) == 0xA0000000 + r
    assert fi.regs.read(2) == SP_TOP


def test_switch_swap_round_trip_is_involutive():
    fi = _fast("E")
    _seed_bank(fi)
    before = fi.regs.snapshot()
    fi.bank_switch((1, 2, 3), cycle=0)
    _drain_all(fi)
    fi.swap_back(cycle=20)
    assert fi.regs.snapshot() == before


def test_swap_back_restore_from_memory_reloads_frame():
    fi = _fast("I", restore_from_memory=True)
    _seed_bank(fi)
    base = fi.bank_switch((0xE1, 0xE2, 0xE3), cycle=0)
    _drain_all(fi)
    # handler patches the in-memory frame: t0 slot and saved mepc
    t0_slot = fi.frame_regs.index(5)
    fi.mem.poke_word(base + 4 * t0_slot, 0x1234)
    fi.mem.poke_word(base + 4 * len(fi.frame_regs), 0x4444)
    snap = fi.swap_back(cycle=30)
    assert snap == (0x4444, 0xE2, 0xE3)        # csrs come from memory
    assert fi.regs.read(5) == 0x1234           # so do the registers
    assert fi.regs.read(2) == SP_TOP           # sp rebuilt from the base


def test_switch_asserts_while_drain_active():
    fi = _fast("I")
    _seed_bank(fi)
    fi.bank_switch((0, 0, 0), cycle=0)
    with pytest.raises(AssertionError):
        fi.bank_switch((0, 0, 0), cycle=1)
    with pytest.raises(AssertionError):
        fi.swap_back(cycle=1)


# ----------------------------------------------------------- shared port

def test_shared_port_defers_drain_to_lsu():
    fi = _fast("I", drain_port="shared")
    _seed_bank(fi)
    fi.bank_switch((0, 0, 0), cycle=0)
    fi.tick(1)                                  # setup
    fi.mem.access(layout.DATA_BASE, "load", 4)  # LSU takes cycle 2
    fi.tick(2)
    assert fi.fsm.cursor == 0                   # drain had to wait
    fi.mem.end_cycle()
    fi.tick(3)
    assert fi.fsm.cursor == 1
    assert fi.mem.contention_events == 1
