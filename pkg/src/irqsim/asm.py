"""Tiny in-process assembler for the benchmark kernels.

One ProgramBuilder per image: mnemonic methods append words, labels can be
referenced before they are defined, and assemble() resolves the fixups and
returns the raw little-endian blob. This is deliberately not a full
assembler; it covers exactly the instruction set the kernels use.
"""

from __future__ import annotations

from . import isa


class AsmError(Exception):
    pass


class _Fixup:
    __slots__ = ("kind", "label", "rd", "rs1", "rs2", "f3")

    def __init__(self, kind, label, rd=0, rs1=0, rs2=0, f3=0):
        self.kind = kind
        self.label = label
        self.rd = rd
        self.rs1 = rs1
        self.rs2 = rs2
        self.f3 = f3


class ProgramBuilder:
    def __init__(self, base: int, abi: str = "I"):
        self.base = base
        self.abi = abi
        self.words: list = []
        self.labels: dict[str, int] = {}

    # ----------------------------------------------------------- plumbing

    @property
    def pc(self) -> int:
        return self.base + 4 * len(self.words)

    def label(self, name: str) -> int:
        if name in self.labels:
            raise AsmError(f"label {name!r} defined twice")
        self.labels[name] = self.pc
        return self.pc

    def addr_of(self, name: str) -> int:
        return self.labels[name]

    def org(self, addr: int):
        """Pad forward to an absolute address (zero words, never executed)."""
        if addr < self.pc or (addr - self.base) % 4:
            raise AsmError(f"org 0x{addr:X} behind pc 0x{self.pc:X}")
        self.words.extend([0] * ((addr - self.pc) // 4))
        return self

    def _r(self, reg) -> int:
        n = isa.REG_NUM[reg] if isinstance(reg, str) else int(reg)
        if not 0 <= n < isa.num_regs(self.abi):
            raise AsmError(f"register {reg!r} not valid under RV32{self.abi}")
        return n

    def _emit(self, word: int):
        self.words.append(word)
        return self

    # -------------------------------------------------------------- arith

    def _alu_imm(self, f3, rd, rs1, imm, f7=0):
        if f3 in (1, 5):
            return self._emit(isa.enc_r(isa.OPC_OP_IMM, self._r(rd), f3,
                                        self._r(rs1), imm & 0x1F, f7))
        return self._emit(isa.enc_i(isa.OPC_OP_IMM, self._r(rd), f3,
                                    self._r(rs1), imm))

    def addi(self, rd, rs1, imm):
        return self._alu_imm(0, rd, rs1, imm)

    def andi(self, rd, rs1, imm):
        return self._alu_imm(7, rd, rs1, imm)

    def ori(self, rd, rs1, imm):
        return self._alu_imm(6, rd, rs1, imm)

    def xori(self, rd, rs1, imm):
        return self._alu_imm(4, rd, rs1, imm)

    def slli(self, rd, rs1, sh):
        return self._alu_imm(1, rd, rs1, sh)

    def srli(self, rd, rs1, sh):
        return self._alu_imm(5, rd, rs1, sh)

    def srai(self, rd, rs1, sh):
        return self._alu_imm(5, rd, rs1, sh, f7=0b0100000)

    def _alu(self, f3, rd, rs1, rs2, f7=0):
        return self._emit(isa.enc_r(isa.OPC_OP, self._r(rd), f3,
                                    self._r(rs1), self._r(rs2), f7))

    def add(self, rd, rs1, rs2):
        return self._alu(0, rd, rs1, rs2)

    def sub(self, rd, rs1, rs2):
        return self._alu(0, rd, rs1, rs2, f7=0b0100000)

    def xor(self, rd, rs1, rs2):
        return self._alu(4, rd, rs1, rs2)

    def or_(self, rd, rs1, rs2):
        return self._alu(6, rd, rs1, rs2)

    def and_(self, rd, rs1, rs2):
        return self._alu(7, rd, rs1, rs2)

    def lui(self, rd, imm20):
        return self._emit(isa.enc_u(isa.OPC_LUI, self._r(rd), imm20))

    def auipc(self, rd, imm20):
        return self._emit(isa.enc_u(isa.OPC_AUIPC, self._r(rd), imm20))

    # ------------------------------------------------------------- memory

    def lw(self, rd, off, rs1):
        return self._emit(isa.enc_i(isa.OPC_LOAD, self._r(rd), 2,
                                    self._r(rs1), off))

    def lh(self, rd, off, rs1):
        return self._emit(isa.enc_i(isa.OPC_LOAD, self._r(rd), 1,
                                    self._r(rs1), off))

    def lhu(self, rd, off, rs1):
        return self._emit(isa.enc_i(isa.OPC_LOAD, self._r(rd), 5,
                                    self._r(rs1), off))

    def lb(self, rd, off, rs1):
        return self._emit(isa.enc_i(isa.OPC_LOAD, self._r(rd), 0,
                                    self._r(rs1), off))

    def lbu(self, rd, off, rs1):
        return self._emit(isa.enc_i(isa.OPC_LOAD, self._r(rd), 4,
                                    self._r(rs1), off))

    def sw(self, rs2, off, rs1):
        return self._emit(isa.enc_s(isa.OPC_STORE, 2, self._r(rs1),
                                    self._r(rs2), off))

    def sh(self, rs2, off, rs1):
        return self._emit(isa.enc_s(isa.OPC_STORE, 1, self._r(rs1),
                                    self._r(rs2), off))

    def sb(self, rs2, off, rs1):
        return self._emit(isa.enc_s(isa.OPC_STORE, 0, self._r(rs1),
                                    self._r(rs2), off))

    # ------------------------------------------------------ control flow

    def _branch(self, f3, rs1, rs2, target):
        if isinstance(target, str):
            self.words.append(_Fixup("branch", target, rs1=self._r(rs1),
                                     rs2=self._r(rs2), f3=f3))
            return self
        return self._emit(isa.enc_b(isa.OPC_BRANCH, f3, self._r(rs1),
                                    self._r(rs2), target - self.pc))

    def beq(self, rs1, rs2, target):
        return self._branch(0, rs1, rs2, target)

    def bne(self, rs1, rs2, target):
        return self._branch(1, rs1, rs2, target)

    def blt(self, rs1, rs2, target):
        return self._branch(4, rs1, rs2, target)

    def bge(self, rs1, rs2, target):
        return self._branch(5, rs1, rs2, target)

    def bltu(self, rs1, rs2, target):
        return self._branch(6, rs1, rs2, target)

    def bgeu(self, rs1, rs2, target):
        return self._branch(7, rs1, rs2, target)

    def beqz(self, rs1, target):
        return self.beq(rs1, 0, target)

    def bnez(self, rs1, target):
        return self.bne(rs1, 0, target)

    def bltz(self, rs1, target):
        return self.blt(rs1, 0, target)

    def bgez(self, rs1, target):
        return self.bge(rs1, 0, target)

    def jal(self, rd, target):
        if isinstance(target, str):
            self.words.append(_Fixup("jal", target, rd=self._r(rd)))
            return self
        return self._emit(isa.enc_j(isa.OPC_JAL, self._r(rd),
                                    target - self.pc))

    def j(self, target):
        return self.jal(0, target)

    def jalr(self, rd, rs1, off=0):
        return self._emit(isa.enc_i(isa.OPC_JALR, self._r(rd), 0,
                                    self._r(rs1), off))

    def jr(self, rs1):
        return self.jalr(0, rs1, 0)

    def ret(self):
        return self.jalr(0, 1, 0)

    # ---------------------------------------------------------------- CSR

    def csrrw(self, rd, csr, rs1):
        return self._emit(isa.enc_i(isa.OPC_SYSTEM, self._r(rd), 1,
                                    self._r(rs1), 0) | (csr << 20))

    def csrrs(self, rd, csr, rs1):
        return self._emit(isa.enc_i(isa.OPC_SYSTEM, self._r(rd), 2,
                                    self._r(rs1), 0) | (csr << 20))

    def csrrc(self, rd, csr, rs1):
        return self._emit(isa.enc_i(isa.OPC_SYSTEM, self._r(rd), 3,
                                    self._r(rs1), 0) | (csr << 20))

    def csrrwi(self, rd, csr, uimm):
        return self._emit(isa.enc_i(isa.OPC_SYSTEM, self._r(rd), 5,
                                    uimm & 0x1F, 0) | (csr << 20))

    def csrrsi(self, rd, csr, uimm):
        return self._emit(isa.enc_i(isa.OPC_SYSTEM, self._r(rd), 6,
                                    uimm & 0x1F, 0) | (csr << 20))

    def csrrci(self, rd, csr, uimm):
        return self._emit(isa.enc_i(isa.OPC_SYSTEM, self._r(rd), 7,
                                    uimm & 0x1F, 0) | (csr << 20))

    def csrr(self, rd, csr):
        return self.csrrs(rd, csr, 0)

    def csrw(self, csr, rs1):
        return self.csrrw(0, csr, rs1)

    def csrsi(self, csr, uimm):
        return self.csrrsi(0, csr, uimm)

    def csrci(self, csr, uimm):
        return self.csrrci(0, csr, uimm)

    # ------------------------------------------------------------- system

    def ecall(self):
        return self._emit(0x00000073)

    def ebreak(self):
        return self._emit(0x00100073)

    def mret(self):
        return self._emit(isa.WORD_MRET)

    def emret(self):
        return self._emit(isa.WORD_EMRET)

    def wfi(self):
        return self._emit(0x10500073)

    def fence(self):
        return self._emit(0x0000000F)

    def nop(self):
        return self._emit(isa.WORD_NOP)

    def marker(self, tag: int):
        return self._emit(isa.enc_i(isa.OPC_CUSTOM0, 0, 0, 0, tag))

    def halt(self, tag: int = 0):
        return self._emit(isa.enc_i(isa.OPC_CUSTOM0, 0, 1, 0, tag))

    # ------------------------------------------------------------ pseudos

    def mv(self, rd, rs1):
        return self.addi(rd, rs1, 0)

    def li(self, rd, value: int):
        value = isa.sext(value & 0xFFFF_FFFF, 32)
        if -2048 <= value < 2048:
            return self.addi(rd, 0, value)
        hi = ((value + 0x800) >> 12) & 0xFFFFF
        lo = value - (isa.sext(hi << 12, 32))
        self.lui(rd, hi)
        if lo:
            self.addi(rd, rd, lo)
        return self

    def la(self, rd, addr: int):
        # addresses in this model are compile-time constants
        return self.li(rd, addr)

    # ----------------------------------------------------------- assemble

    def assemble(self) -> bytes:
        out = bytearray()
        for idx, w in enumerate(self.words):
            if isinstance(w, _Fixup):
                here = self.base + 4 * idx
                try:
                    target = self.labels[w.label]
                except KeyError:
                    raise AsmError(f"undefined label {w.label!r}") from None
                delta = target - here
                if w.kind == "branch":
                    word = isa.enc_b(isa.OPC_BRANCH, w.f3, w.rs1, w.rs2,
                                     delta)
                else:
                    word = isa.enc_j(isa.OPC_JAL, w.rd, delta)
            else:
                word = w
            out += word.to_bytes(4, "little")
        return bytes(out)
