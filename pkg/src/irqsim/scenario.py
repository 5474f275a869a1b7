"""Scenario configs and the run pipeline.

A scenario names a kernel (measurement + flavor), a controller build, an
ABI, and optional engine knobs. Scenarios come from small `key = value`
files or from the built-in sweep table; both go through the same runner.

Interrupt-driven measurements are scheduled with a pre-pass: the program
is first run with no external stimulus to find the cycle of the boot
marker (tag 100), then re-run with the line(s) asserted a fixed lead
after it. That keeps assertion placement deterministic without the
kernels having to busy-poll a cycle counter.
"""

from __future__ import annotations

from . import kernels, layout
from .config import SimConfig
from .sim import Simulator
from .trace import FULL_ONLY_KINDS

LEAD = 8

_REQUIRED = ("name", "measurement", "flavor", "controller", "abi")
_OPTIONAL = {
    "nlbits": int,
    "wait_states": int,
    "drain_port": str,
    "stall_mode": str,
    "restore_from_memory": lambda s: bool(int(s)),
    "arb_stages": int,
    "max_cycles": int,
    "trace": str,
}


class Scenario:
    """Parsed scenario description."""

    def __init__(self, name, measurement, flavor, controller, abi, **knobs):
        self.name = name
        self.measurement = measurement
        self.flavor = flavor
        self.controller = controller
        self.abi = abi
        self.knobs = knobs

    def config(self, trace="events") -> SimConfig:
        kw = dict(self.knobs)
        kw.pop("trace", None)
        return SimConfig(controller=self.controller, abi=self.abi,
                         trace=trace, **kw)

    def __repr__(self):
        return f"<Scenario {self.name}>"


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    """Parse `key = value` lines; '#' starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"{source}:{lineno}: expected key = value")
        key = key.strip()
        val = val.strip()
        if not key or not val:
            raise ValueError(f"{source}:{lineno}: empty key or value")
        if key in raw:
            raise ValueError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = val

    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ValueError(f"{source}: missing keys: {', '.join(missing)}")
    knobs = {}
    for key, val in raw.items():
        if key in _REQUIRED:
            continue
        if key not in _OPTIONAL:
            raise ValueError(f"{source}: unknown key {key!r}")
        knobs[key] = _OPTIONAL[key](val)
    return Scenario(raw["name"], raw["measurement"], raw["flavor"],
                    raw["controller"], raw["abi"].upper(), **knobs)


def load_scenario(path) -> Scenario:
    with open(path) as f:
        return parse_scenario(f.read(), source=str(path))


class RunResult:
    """One finished simulation plus everything the analyzer needs."""

    def __init__(self, scenario, sim, build, sched_cycle):
        self.scenario = scenario
        self.sim = sim
        self.build = build
        self.sched_cycle = sched_cycle   # None for self-triggering scenarios
        self.events = sim.tracer.events

    def trace_text(self, level: str = "events") -> str:
        if level == "off":
            return ""
        lines = []
        for ev in self.events:
            if level == "events" and ev.kind in FULL_ONLY_KINDS:
                continue
            lines.append(ev.format())
        return "\n".join(lines) + ("\n" if lines else "")


def _fresh_sim(scenario: Scenario, build, trace: str) -> Simulator:
    sim = Simulator(scenario.config(trace=trace))
    sim.mem.load_image("instr-spm", build.blob,
                       offset=build.base - layout.INSTR_BASE)
    for addr, word in build.data:
        sim.mem.poke_word(addr, word)
    return sim


def _boot_marker_cycle(sim) -> int:
    for ev in sim.tracer.events:
        if ev.kind == "marker" and ev.get("tag") == kernels.BOOT_TAG:
            return ev.cycle
    raise RuntimeError("boot marker not reached in pre-pass")


def run_scenario(scenario: Scenario, trace: str = "full") -> RunResult:
    """Build the kernel, find the stimulus point, run the measured pass."""
    cfg = scenario.config(trace="off")
    build = kernels.build(scenario.measurement, scenario.flavor, cfg)
    lines = build.meta.get("lines", ())
    sched_cycle = None
    if lines:
        pre = _fresh_sim(scenario, build, trace="events")
        pre.run()
        if pre.fault:
            raise RuntimeError(f"{scenario.name}: pre-pass faulted")
        sched_cycle = _boot_marker_cycle(pre) + build.meta.get("lead", LEAD)
    sim = _fresh_sim(scenario, build, trace=trace)
    if sched_cycle is not None:
        for line in lines:
            sim.at(sched_cycle, line, 1)
    sim.run()
    if sim.fault:
        raise RuntimeError(f"{scenario.name}: measured pass faulted")
    if not sim.halted:
        raise RuntimeError(f"{scenario.name}: ran to cycle limit")
    return RunResult(scenario, sim, build, sched_cycle)


# ------------------------------------------------------------ sweep table

def builtin_scenarios():
    """The full measurement matrix."""
    out = []
    for flavor in ("clint", "clic", "xnxti", "jalxnxti", "fastirq",
                   "minimal"):
        ctrl = {"clint": "clint", "fastirq": "fastirq"}.get(flavor, "clic")
        for abi in ("I", "E"):
            out.append(Scenario(f"lat-{flavor}-{abi.lower()}", "latency",
                                flavor, ctrl, abi))
    for flavor, abi in (("clic", "I"), ("clic", "E"), ("xnxti", "I"),
                        ("jalxnxti", "I"), ("fastirq", "I")):
        ctrl = "fastirq" if flavor == "fastirq" else "clic"
        out.append(Scenario(f"b2b-{flavor}-{abi.lower()}", "back2back",
                            flavor, ctrl, abi))
    for abi in ("I", "E"):
        out.append(Scenario(f"ctx-baseline-{abi.lower()}", "ctxswitch",
                            "baseline", "clic", abi))
        out.append(Scenario(f"ctx-accel-{abi.lower()}", "ctxswitch",
                            "accel", "fastirq", abi))
    return out


def find_builtin(name: str) -> Scenario:
    for sc in builtin_scenarios():
        if sc.name == name:
            return sc
    raise KeyError(f"no built-in scenario named {name!r}")
