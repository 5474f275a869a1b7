"""Scratchpad memory model with an address map, wait states, MMIO routing,
and the optional dedicated drain port.

Instructions and data live in separate single-cycle SPM banks, so fetch and
LSU traffic never contend. The drain port is dedicated by default; in
"shared" mode it yields to LSU traffic cycle by cycle.
"""

from __future__ import annotations

from . import layout


class BusFault(Exception):
    def __init__(self, addr, kind):
        super().__init__(f"bus fault: {kind} at 0x{addr:08X}")
        self.addr = addr
        self.kind = kind


class ConfigError(Exception):
    pass


_WIDTH_MASK = {1: 0xFF, 2: 0xFFFF, 4: 0xFFFF_FFFF}


class Memory:
    """Address map + backing stores + per-access latency accounting."""

    def __init__(self, config, clic=None, tracer=None):
        self.config = config
        self.clic = clic
        self.tracer = tracer
        self.instr = bytearray(layout.INSTR_SIZE)
        self.data = bytearray(layout.DATA_SIZE)
        # latency bookkeeping; tests reconcile this against the trace
        self.charged_cycles = 0
        self.access_count = 0
        self.lsu_active = False     # set by LSU access, cleared each cycle
        self.contention_events = 0

    # ------------------------------------------------------------ images

    def load_image(self, region: str, blob: bytes, offset: int = 0):
        if region == "instr-spm":
            arr, size = self.instr, layout.INSTR_SIZE
        elif region == "data-spm":
            arr, size = self.data, layout.DATA_SIZE
        else:
            raise ConfigError(f"cannot load image into region {region!r}")
        if offset < 0 or offset + len(blob) > size:
            raise ConfigError(
                f"image of {len(blob)} bytes at +0x{offset:X} exceeds {region}")
        arr[offset:offset + len(blob)] = blob

    # ------------------------------------------------------------ fetch

    def fetch_word(self, addr: int) -> int:
        if addr % 4 or not self._in(addr, layout.INSTR_BASE, layout.INSTR_SIZE):
            raise BusFault(addr, "fetch")
        off = addr - layout.INSTR_BASE
        return int.from_bytes(self.instr[off:off + 4], "little")

    # ------------------------------------------------------------ LSU

    def access(self, addr: int, kind: str, width: int = 4, value: int = 0,
               port: str = "lsu"):
        """One data access. Returns (data, latency_cycles)."""
        if port == "lsu":
            self.lsu_active = True
        self.access_count += 1
        if self._in(addr, layout.DATA_BASE, layout.DATA_SIZE):
            lat = 1 + self.config.wait_states
            data = self._spm(self.data, addr - layout.DATA_BASE,
                             kind, width, value)
        elif self._in(addr, layout.INSTR_BASE, layout.INSTR_SIZE):
            # data access into the instruction bank is legal (tables, stubs)
            lat = 1 + self.config.wait_states
            data = self._spm(self.instr, addr - layout.INSTR_BASE,
                             kind, width, value)
        elif self._in(addr, layout.CLIC_BASE, layout.CLIC_SIZE):
            if self.clic is None:
                raise BusFault(addr, kind)
            lat = 1
            data = self.clic.mmio(addr - layout.CLIC_BASE, kind, value, width)
        elif self._in(addr, layout.STUB_BASE, layout.STUB_SIZE):
            lat = 1
            data = self._stub(addr, kind, value)
        else:
            raise BusFault(addr, kind)
        self.charged_cycles += lat
        return data, lat

    def _spm(self, arr, off, kind, width, value):
        if off % width or off + width > len(arr):
            raise BusFault(off, f"misaligned-{kind}")
        if kind == "store":
            arr[off:off + width] = (value & _WIDTH_MASK[width]).to_bytes(
                width, "little")
            return 0
        return int.from_bytes(arr[off:off + width], "little")

    def wait_states_for(self, addr: int) -> int:
        """Extra charge cycles the core adds on top of the base load/store
        cost; MMIO apertures are always single-cycle."""
        if self._in(addr, layout.DATA_BASE, layout.DATA_SIZE) \
                or self._in(addr, layout.INSTR_BASE, layout.INSTR_SIZE):
            return self.config.wait_states
        return 0

    def _stub(self, addr, kind, value):
        # Writing any value to a stub device deasserts its interrupt wire;
        # this is how level-triggered handlers retire their source.
        line = (addr - layout.STUB_BASE) // 4
        if kind == "store":
            if self.clic is not None:
                self.clic.set_input(line, 0)
            return 0
        return 0

    # ----------------------------------------------------------- helpers

    def word(self, addr: int) -> int:
        """Debug/test peek, no latency accounting."""
        if self._in(addr, layout.DATA_BASE, layout.DATA_SIZE):
            off = addr - layout.DATA_BASE
            return int.from_bytes(self.data[off:off + 4], "little")
        if self._in(addr, layout.INSTR_BASE, layout.INSTR_SIZE):
            off = addr - layout.INSTR_BASE
            return int.from_bytes(self.instr[off:off + 4], "little")
        raise BusFault(addr, "peek")

    def poke_word(self, addr: int, value: int):
        if self._in(addr, layout.DATA_BASE, layout.DATA_SIZE):
            off = addr - layout.DATA_BASE
            self.data[off:off + 4] = (value & 0xFFFF_FFFF).to_bytes(4, "little")
            return
        raise BusFault(addr, "poke")

    def drain_may_proceed(self) -> bool:
        """Shared-port mode gives the LSU absolute priority."""
        if self.config.drain_port == "dedicated":
            return True
        if self.lsu_active:
            self.contention_events += 1
            return False
        return True

    def end_cycle(self):
        self.lsu_active = False

    @staticmethod
    def _in(addr, base, size):
        return base <= addr < base + size
