"""Shared fixtures and small helpers for driving the simulator in tests."""

from __future__ import annotations

import pytest

from irqsim import layout
from irqsim.asm import ProgramBuilder
from irqsim.config import SimConfig
from irqsim.sim import Simulator


def make_config(**kw) -> SimConfig:
    cfg = SimConfig(**kw)
    cfg.validate()
    return cfg


def run_blob(blob: bytes, cfg: SimConfig, base: int = layout.RESET_PC,
             data=(), stimuli=(), max_cycles: int = 20_000,
             expect_halt: bool = True) -> Simulator:
    """Load a program image, apply scheduled line stimuli, run to halt."""
    sim = Simulator(cfg)
    sim.mem.load_image("instr-spm", blob, offset=base - layout.INSTR_BASE)
    for addr, word in data:
        sim.mem.poke_word(addr, word)
    for cycle, line, wire in stimuli:
        sim.at(cycle, line, wire)
    sim.run(max_cycles)
    assert not sim.fault, f"unexpected fault: {sim.fault}"
    if expect_halt:
        assert sim.halted, "program did not halt"
    return sim


def builder(base: int = layout.RESET_PC, abi: str = "I") -> ProgramBuilder:
    return ProgramBuilder(base, abi)


def marker_cycles(sim: Simulator):
    """(cycle, tag) for every marker event in the trace."""
    return [(ev.cycle, ev.get("tag")) for ev in sim.tracer.events
            if ev.kind == "marker"]


@pytest.fixture
def cfg_clic():
    return make_config(controller="clic", trace="full")


@pytest.fixture
def cfg_clint():
    return make_config(controller="clint", trace="full")


@pytest.fixture
def cfg_fastirq():
    return make_config(controller="fastirq", trace="full")
