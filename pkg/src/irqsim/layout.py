"""Address map and stack-frame layout constants.

Single source of truth: the simulator's memory regions, the CLIC register
aperture, the benchmark programs, and the `dump-map` / `dump-frame` CLI
commands all read from here, and the generated markdown tables are rendered
from the same structures they execute against.
"""

from __future__ import annotations

from .isa import REG_NAMES, caller_saved

# ---------------------------------------------------------------- regions

INSTR_BASE = 0x0000_0000
INSTR_SIZE = 0x1_0000
DATA_BASE = 0x0010_0000
DATA_SIZE = 0x1_0000
CLIC_BASE = 0x0020_0000
CLIC_SIZE = 0x1_0000
STUB_BASE = 0x0030_0000
STUB_SIZE = 0x1_0000

# CLIC aperture offsets (relative to CLIC_BASE)
CLIC_CFG_OFF = 0x0          # byte: nlbits
CLIC_LINE_OFF = 0x1000      # 4 bytes per line: ip, ie, attr, ctl
CLIC_ATTR_SHV = 0x01
CLIC_ATTR_EDGE = 0x02


def clic_line_addr(line: int) -> int:
    return CLIC_BASE + CLIC_LINE_OFF + 4 * line


def stub_addr(line: int) -> int:
    return STUB_BASE + 4 * line


# ------------------------------------------------------- program placement

RESET_PC = 0x100
CLINT_VECTOR_TABLE = 0x200      # mtvec base in vectored CLINT mode (j stubs)
HANDLER_BASE = 0x400            # handler code grows upward from here
TASK_BASE = 0x2000              # task/benchmark code

MTVT_TABLE = DATA_BASE          # word table of handler entry addresses
TCB_BASE = DATA_BASE + 0x4000   # scheduler state + per-task context blocks
SCRATCH_BASE = DATA_BASE + 0x5000
STACK_A_TOP = DATA_BASE + 0x8000
STACK_B_TOP = DATA_BASE + 0x9000
MAIN_SP = DATA_BASE + 0xF000

# TCB layout: one word `current` (pointer to the running task's context
# block), then the context blocks themselves.
TCB_CURRENT = TCB_BASE
CTX_A = TCB_BASE + 0x40
CTX_B = TCB_BASE + 0x100

# Context-block field offsets (shared by both context-switch kernels).
CTX_NEXT = 0        # ring link to the other task's block
CTX_SPTOP = 4       # task stack pointer at suspension
CTX_MEPC = 8        # software-switch resume pc
CTX_MCAUSE = 12
CTX_MSTATUS = 16
CTX_GPR = 20        # 31 one-word slots, x1..x31 in index order; the
                    # software switch uses them all, the accelerated switch
                    # only the callee-save slice


def ctx_gpr_slot(reg: int) -> int:
    """Byte offset of register x<reg>'s slot in a context block."""
    assert reg != 0
    return CTX_GPR + 4 * (reg - 1)


# ------------------------------------------------------------ frame layout

FRAME_CSRS = ("mepc", "mcause", "mstatus")


def frame_slots(abi: str):
    """Ordered hardware save-frame slots: caller-save registers in index
    order, then mepc, mcause, mstatus. Drained lowest address first."""
    return tuple(REG_NAMES[r] for r in caller_saved(abi)) + FRAME_CSRS


def frame_len(abi: str) -> int:
    return len(frame_slots(abi))   # 19 for I, 10 for E


def frame_bytes(abi: str) -> int:
    return 4 * frame_len(abi)


def frame_offset(slot_name: str, abi: str) -> int:
    return 4 * frame_slots(abi).index(slot_name)


def regions():
    return (
        ("instr-spm", INSTR_BASE, INSTR_SIZE),
        ("data-spm", DATA_BASE, DATA_SIZE),
        ("clic-mmio", CLIC_BASE, CLIC_SIZE),
        ("stub-device", STUB_BASE, STUB_SIZE),
    )


# --------------------------------------------------------- rendered tables

def render_map() -> str:
    lines = [
        "# Address map",
        "",
        "| region | base | size |",
        "|---|---|---|",
    ]
    for name, base, size in regions():
        lines.append(f"| {name} | 0x{base:08X} | 0x{size:X} |")
    lines += [
        "",
        "## CLIC aperture (relative to 0x%08X)" % CLIC_BASE,
        "",
        "| offset | register |",
        "|---|---|",
        f"| +0x{CLIC_CFG_OFF:04X} | cfg: byte0 = nlbits |",
        f"| +0x{CLIC_LINE_OFF:04X} + 4*id | line id: byte0 ip, byte1 ie,"
        " byte2 attr (bit0 shv, bit1 edge), byte3 ctl |",
        "",
        "## Fixed program/data placement",
        "",
        "| symbol | address |",
        "|---|---|",
        f"| reset pc | 0x{RESET_PC:08X} |",
        f"| legacy vector table | 0x{CLINT_VECTOR_TABLE:08X} |",
        f"| handler code | 0x{HANDLER_BASE:08X} |",
        f"| task code | 0x{TASK_BASE:08X} |",
        f"| handler-address table (mtvt) | 0x{MTVT_TABLE:08X} |",
        f"| scheduler state | 0x{TCB_BASE:08X} |",
        f"| task A stack top | 0x{STACK_A_TOP:08X} |",
        f"| task B stack top | 0x{STACK_B_TOP:08X} |",
        f"| main stack top | 0x{MAIN_SP:08X} |",
    ]
    return "\n".join(lines) + "\n"


def render_frame(abi: str) -> str:
    slots = frame_slots(abi)
    lines = [
        f"# Hardware save frame, {abi}-ABI ({len(slots)} words)",
        "",
        "Drained one word per cycle, slot 0 first, to"
        " `sp_before - 4*frame_len`.",
        "",
        "| slot | name | byte offset | offset from old sp |",
        "|---|---|---|---|",
    ]
    n = len(slots)
    for i, name in enumerate(slots):
        lines.append(f"| {i} | {name} | +{4 * i} | -{4 * (n - i)} |")
    return "\n".join(lines) + "\n"
