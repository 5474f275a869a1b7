"""RV32 instruction encodings, register conventions, and the decoder.

Covers the RV32I base set (minus unused corners), the Zicsr instructions,
mret, and two local extensions:

  * ``emret``   - SYSTEM funct12 0x306, trap return with bank swap-back and
                  tail-chain resolution (only legal in the banked-regfile
                  configuration).
  * custom-0    - funct3 0 is a one-cycle measurement marker (tag in the
                  I-immediate field), funct3 1 halts the simulation.

Decoding is total: anything unrecognized decodes to OP_ILLEGAL and traps
at execute time.
"""

from __future__ import annotations

MASK32 = 0xFFFF_FFFF

# ---------------------------------------------------------------- registers

REG_NAMES = (
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2",
    "s0", "s1", "a0", "a1", "a2", "a3", "a4", "a5",
    "a6", "a7", "s2", "s3", "s4", "s5", "s6", "s7",
    "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6",
)

REG_NUM = {name: i for i, name in enumerate(REG_NAMES)}
REG_NUM["fp"] = 8

# Caller-save sets per ABI. The embedded convention keeps 16 registers and
# splits them 7/7 around zero+sp: x1,x5,x6,x10-x13 volatile, the rest
# preserved. These sets drive both the banked-regfile frame layout and the
# hand-written kernel prologues, so they live here as the single source.
CALLER_SAVED_I = (1, 5, 6, 7, 10, 11, 12, 13, 14, 15, 16, 17, 28, 29, 30, 31)
CALLEE_SAVED_I = (3, 4, 8, 9, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27)
CALLER_SAVED_E = (1, 5, 6, 10, 11, 12, 13)
CALLEE_SAVED_E = (3, 4, 7, 8, 9, 14, 15)


def caller_saved(abi: str):
    return CALLER_SAVED_I if abi == "I" else CALLER_SAVED_E


def callee_saved(abi: str):
    return CALLEE_SAVED_I if abi == "I" else CALLEE_SAVED_E


def num_regs(abi: str) -> int:
    return 32 if abi == "I" else 16


# ---------------------------------------------------------------- CSR map

CSR_MSTATUS = 0x300
CSR_MISA = 0x301
CSR_MIE = 0x304
CSR_MTVEC = 0x305
CSR_MTVT = 0x307
CSR_MSCRATCH = 0x340
CSR_MEPC = 0x341
CSR_MCAUSE = 0x342
CSR_MTVAL = 0x343
CSR_MIP = 0x344
CSR_MNXTI = 0x345
CSR_MINTSTATUS = 0x346
CSR_MINTTHRESH = 0x347
CSR_JALMNXTI = 0x348   # nonstandard: fused claim-and-jump variant of mnxti
CSR_MHARTID = 0xF14

CSR_NAMES = {
    CSR_MSTATUS: "mstatus", CSR_MISA: "misa", CSR_MIE: "mie",
    CSR_MTVEC: "mtvec", CSR_MTVT: "mtvt", CSR_MSCRATCH: "mscratch",
    CSR_MEPC: "mepc", CSR_MCAUSE: "mcause", CSR_MTVAL: "mtval",
    CSR_MIP: "mip", CSR_MNXTI: "mnxti", CSR_MINTSTATUS: "mintstatus",
    CSR_MINTTHRESH: "mintthresh", CSR_JALMNXTI: "jalmnxti",
    CSR_MHARTID: "mhartid",
}

# mstatus bit positions
MSTATUS_MIE = 1 << 3
MSTATUS_MPIE = 1 << 7
MSTATUS_MPP_SHIFT = 11
MSTATUS_MPP_M = 0b11 << MSTATUS_MPP_SHIFT

# mcause layout: bit 31 interrupt flag, bits 23:16 previous interrupt
# level, bits 11:0 exception/interrupt id.
MCAUSE_IRQ = 1 << 31
MCAUSE_MPIL_SHIFT = 16
MCAUSE_MPIL_MASK = 0xFF << MCAUSE_MPIL_SHIFT
MCAUSE_ID_MASK = 0xFFF

# mintstatus: bits 31:24 hold the running interrupt level.
MINTSTATUS_MIL_SHIFT = 24

# exception codes
EXC_ILLEGAL = 2
EXC_BREAKPOINT = 3
EXC_LOAD_FAULT = 5
EXC_STORE_FAULT = 7
EXC_ECALL_M = 11

# ---------------------------------------------------------------- opcodes

OPC_LUI = 0b0110111
OPC_AUIPC = 0b0010111
OPC_JAL = 0b1101111
OPC_JALR = 0b1100111
OPC_BRANCH = 0b1100011
OPC_LOAD = 0b0000011
OPC_STORE = 0b0100011
OPC_OP_IMM = 0b0010011
OPC_OP = 0b0110011
OPC_SYSTEM = 0b1110011
OPC_FENCE = 0b0001111
OPC_CUSTOM0 = 0b0001011

F12_ECALL = 0x000
F12_EBREAK = 0x001
F12_WFI = 0x105
F12_MRET = 0x302
F12_EMRET = 0x306

WORD_MRET = 0x30200073
WORD_EMRET = 0x30600073
WORD_NOP = 0x00000013

# decoded op kinds (dispatch keys in the core)
OP_LUI = "lui"
OP_AUIPC = "auipc"
OP_JAL = "jal"
OP_JALR = "jalr"
OP_BRANCH = "branch"
OP_LOAD = "load"
OP_STORE = "store"
OP_ALU_IMM = "alu_imm"
OP_ALU = "alu"
OP_CSR = "csr"
OP_ECALL = "ecall"
OP_EBREAK = "ebreak"
OP_MRET = "mret"
OP_EMRET = "emret"
OP_WFI = "wfi"
OP_FENCE = "fence"
OP_MARKER = "marker"
OP_HALT = "halt"
OP_ILLEGAL = "illegal"


def sext(value: int, bits: int) -> int:
    """Sign-extend the low `bits` of value to a Python int."""
    value &= (1 << bits) - 1
    if value & (1 << (bits - 1)):
        value -= 1 << bits
    return value


class Instr:
    """One decoded instruction. Field meaning depends on `op`."""

    __slots__ = ("raw", "op", "rd", "rs1", "rs2", "f3", "f7", "imm", "csr")

    def __init__(self, raw, op, rd=0, rs1=0, rs2=0, f3=0, f7=0, imm=0, csr=0):
        self.raw = raw
        self.op = op
        self.rd = rd
        self.rs1 = rs1
        self.rs2 = rs2
        self.f3 = f3
        self.f7 = f7
        self.imm = imm
        self.csr = csr

    def __repr__(self):
        return f"Instr({self.op} raw={self.raw:#010x} rd={self.rd} rs1={self.rs1} imm={self.imm})"


def _imm_i(w):
    return sext(w >> 20, 12)


def _imm_s(w):
    return sext(((w >> 25) << 5) | ((w >> 7) & 0x1F), 12)


def _imm_b(w):
    v = (((w >> 31) & 1) << 12) | (((w >> 7) & 1) << 11) \
        | (((w >> 25) & 0x3F) << 5) | (((w >> 8) & 0xF) << 1)
    return sext(v, 13)


def _imm_u(w):
    return w & 0xFFFFF000


def _imm_j(w):
    v = (((w >> 31) & 1) << 20) | (((w >> 12) & 0xFF) << 12) \
        | (((w >> 20) & 1) << 11) | (((w >> 21) & 0x3FF) << 1)
    return sext(v, 21)


def decode(word: int, abi: str = "I") -> Instr:
    """Decode one 32-bit word. Total: unknown encodings become OP_ILLEGAL."""
    word &= MASK32
    opc = word & 0x7F
    rd = (word >> 7) & 0x1F
    f3 = (word >> 12) & 0x7
    rs1 = (word >> 15) & 0x1F
    rs2 = (word >> 20) & 0x1F
    f7 = word >> 25

    limit = num_regs(abi)

    def ok(*regs):
        return all(r < limit for r in regs)

    if opc == OPC_LUI:
        if not ok(rd):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_LUI, rd=rd, imm=_imm_u(word))
    if opc == OPC_AUIPC:
        if not ok(rd):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_AUIPC, rd=rd, imm=_imm_u(word))
    if opc == OPC_JAL:
        if not ok(rd):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_JAL, rd=rd, imm=_imm_j(word))
    if opc == OPC_JALR:
        if f3 != 0 or not ok(rd, rs1):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_JALR, rd=rd, rs1=rs1, imm=_imm_i(word))
    if opc == OPC_BRANCH:
        if f3 in (2, 3) or not ok(rs1, rs2):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_BRANCH, rs1=rs1, rs2=rs2, f3=f3, imm=_imm_b(word))
    if opc == OPC_LOAD:
        if f3 not in (0, 1, 2, 4, 5) or not ok(rd, rs1):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_LOAD, rd=rd, rs1=rs1, f3=f3, imm=_imm_i(word))
    if opc == OPC_STORE:
        if f3 > 2 or not ok(rs1, rs2):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_STORE, rs1=rs1, rs2=rs2, f3=f3, imm=_imm_s(word))
    if opc == OPC_OP_IMM:
        if not ok(rd, rs1):
            return Instr(word, OP_ILLEGAL)
        if f3 == 1 and f7 != 0:
            return Instr(word, OP_ILLEGAL)
        if f3 == 5 and f7 not in (0b0000000, 0b0100000):
            return Instr(word, OP_ILLEGAL)
        imm = (rs2 if f3 in (1, 5) else _imm_i(word))
        return Instr(word, OP_ALU_IMM, rd=rd, rs1=rs1, f3=f3, f7=f7, imm=imm)
    if opc == OPC_OP:
        if not ok(rd, rs1, rs2):
            return Instr(word, OP_ILLEGAL)
        if f7 not in (0b0000000, 0b0100000):
            return Instr(word, OP_ILLEGAL)
        if f7 == 0b0100000 and f3 not in (0, 5):
            return Instr(word, OP_ILLEGAL)
        return Instr(word, OP_ALU, rd=rd, rs1=rs1, rs2=rs2, f3=f3, f7=f7)
    if opc == OPC_FENCE:
        return Instr(word, OP_FENCE)
    if opc == OPC_SYSTEM:
        if f3 == 0:
            f12 = word >> 20
            if f12 == F12_ECALL and rd == 0 and rs1 == 0:
                return Instr(word, OP_ECALL)
            if f12 == F12_EBREAK and rd == 0 and rs1 == 0:
                return Instr(word, OP_EBREAK)
            if f12 == F12_MRET and rd == 0 and rs1 == 0:
                return Instr(word, OP_MRET)
            if f12 == F12_EMRET and rd == 0 and rs1 == 0:
                return Instr(word, OP_EMRET)
            if f12 == F12_WFI and rd == 0 and rs1 == 0:
                return Instr(word, OP_WFI)
            return Instr(word, OP_ILLEGAL)
        if f3 in (1, 2, 3, 5, 6, 7):
            if not ok(rd) or (f3 <= 3 and not ok(rs1)):
                return Instr(word, OP_ILLEGAL)
            # for the immediate forms rs1 is the 5-bit literal, not a register
            return Instr(word, OP_CSR, rd=rd, rs1=rs1, f3=f3, csr=word >> 20)
        return Instr(word, OP_ILLEGAL)
    if opc == OPC_CUSTOM0:
        if f3 == 0:
            return Instr(word, OP_MARKER, imm=_imm_i(word))
        if f3 == 1:
            return Instr(word, OP_HALT, imm=_imm_i(word))
        return Instr(word, OP_ILLEGAL)
    return Instr(word, OP_ILLEGAL)


# ------------------------------------------------------------- encoders
# Field packers for the program kit. Range checks are asserts: emitting an
# out-of-range immediate is a bug in a kernel, not a runtime condition.

def enc_r(opc, rd, f3, rs1, rs2, f7):
    return (f7 << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | opc


def enc_i(opc, rd, f3, rs1, imm):
    assert -2048 <= imm < 2048, f"I-imm out of range: {imm}"
    return ((imm & 0xFFF) << 20) | (rs1 << 15) | (f3 << 12) | (rd << 7) | opc


def enc_s(opc, f3, rs1, rs2, imm):
    assert -2048 <= imm < 2048, f"S-imm out of range: {imm}"
    imm &= 0xFFF
    return ((imm >> 5) << 25) | (rs2 << 20) | (rs1 << 15) | (f3 << 12) \
        | ((imm & 0x1F) << 7) | opc


def enc_b(opc, f3, rs1, rs2, imm):
    assert -4096 <= imm < 4096 and imm % 2 == 0, f"B-imm out of range: {imm}"
    imm &= 0x1FFF
    return (((imm >> 12) & 1) << 31) | (((imm >> 5) & 0x3F) << 25) \
        | (rs2 << 20) | (rs1 << 15) | (f3 << 12) \
        | (((imm >> 1) & 0xF) << 8) | (((imm >> 11) & 1) << 7) | opc


def enc_u(opc, rd, imm20):
    assert 0 <= imm20 < (1 << 20), f"U-imm out of range: {imm20}"
    return (imm20 << 12) | (rd << 7) | opc


def enc_j(opc, rd, imm):
    assert -(1 << 20) <= imm < (1 << 20) and imm % 2 == 0, f"J-imm out of range: {imm}"
    imm &= 0x1FFFFF
    return (((imm >> 20) & 1) << 31) | (((imm >> 1) & 0x3FF) << 21) \
        | (((imm >> 11) & 1) << 20) | (((imm >> 12) & 0xFF) << 12) \
        | (rd << 7) | opc
