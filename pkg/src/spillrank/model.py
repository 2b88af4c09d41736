"""Cost model primitives: metered bit arena, spillover values, parameters.

The memory model is a flat bit arena read through w-bit windows.  A window may
start at any bit offset; each read_word call costs exactly one probe.  Spillover
values are integers carried outside the arena; consulting them is metered
separately (spill_reads) and never counts as a word probe.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ParameterError(ValueError):
    """Invalid structural parameters (w/B/t/mode constraints)."""


class RangeError(IndexError):
    """Offset or query position out of range."""


class EncodingError(ValueError):
    """Input cannot be encoded under the declared domains."""


class IntegrityError(ValueError):
    """Stored bits or spillover fail internal consistency checks."""


class CertificationError(AssertionError):
    """An exact certification failed; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConfigError(ValueError):
    """Bad configuration key or value."""


class CapError(ConfigError):
    """A configured cap was exceeded; names the cap."""

    def __init__(self, cap_name, needed, allowed):
        super().__init__(
            "cap %s exceeded: needed %d, allowed %d" % (cap_name, needed, allowed)
        )
        self.cap_name = cap_name
        self.needed = needed
        self.allowed = allowed


@dataclass
class ProbeMeter:
    """Counts metered accesses.  Monotone within a query; resettable."""

    word_reads: int = 0
    spill_reads: int = 0

    def count_word(self, k=1):
        self.word_reads += k

    def count_spill(self, k=1):
        self.spill_reads += k

    def reset(self):
        self.word_reads = 0
        self.spill_reads = 0


def meter_report(meter):
    """Snapshot of a meter as a plain dict."""
    return {"word_reads": meter.word_reads, "spill_reads": meter.spill_reads}


@dataclass(frozen=True)
class SpilloverValue:
    """An integer k in [K]: the non-bit part of a code."""

    k: int
    K: int

    def __post_init__(self):
        if not (0 <= self.k < self.K):
            raise RangeError("spillover %d outside [0, %d)" % (self.k, self.K))

    def bits_if_written(self):
        """Width needed to store this spillover literally as bits."""
        return max(1, (self.K - 1).bit_length())


class BitArena:
    """Append-only bit store, LSB-first within each appended field.

    Bit i of an appended value lands at absolute position offset+i.  Reads are
    through w-bit windows at arbitrary bit offsets; every read_word costs one
    probe on the supplied meter.
    """

    def __init__(self, w):
        if w < 1:
            raise ParameterError("word size must be positive")
        self.w = w
        self._acc = 0
        self._len = 0
        self._buf = None  # bytes cache, rebuilt lazily after appends

    def __len__(self):
        return self._len

    @property
    def n_bits(self):
        return self._len

    def append_bits(self, value, width):
        """Append `width` bits of `value`; returns the bit offset written at."""
        if width < 0:
            raise RangeError("negative width")
        if value < 0 or value >> width:
            raise EncodingError("value %d does not fit in %d bits" % (value, width))
        off = self._len
        self._acc |= value << off
        self._len += width
        self._buf = None
        return off

    def _bytes(self):
        if self._buf is None:
            self._buf = self._acc.to_bytes((self._len + 7) // 8 or 1, "little")
        return self._buf

    def read_word(self, offset, meter=None):
        """Read the w bits at [offset, offset+w); one probe."""
        w = self.w
        if offset < 0 or offset + w > self._len:
            raise RangeError(
                "window [%d, %d) outside arena of %d bits" % (offset, offset + w, self._len)
            )
        if meter is not None:
            meter.count_word()
        buf = self._bytes()
        first = offset >> 3
        last = (offset + w + 7) >> 3
        chunk = int.from_bytes(buf[first:last], "little")
        return (chunk >> (offset & 7)) & ((1 << w) - 1)

    def read_field(self, offset, width, meter=None):
        """Read an arbitrary-width field through as few w-windows as possible.

        Charges ceil(width/w) probes (the final window is slid back if it would
        poke past the end of the arena).
        """
        if width == 0:
            return 0
        w = self.w
        if offset < 0 or offset + width > self._len:
            raise RangeError("field [%d, %d) outside arena" % (offset, offset + width))
        value = 0
        got = 0
        while got < width:
            start = offset + got
            if start + w > self._len:
                back = start + w - self._len
                word = self.read_word(start - back, meter) >> back
            else:
                word = self.read_word(start, meter)
            take = min(w, width - got)
            value |= (word & ((1 << take) - 1)) << got
            got += take
        return value

    def peek_all(self):
        """The whole arena as an int (unmetered; for audits and serialization)."""
        return self._acc

    def to_bytes(self):
        return self._bytes()

    @classmethod
    def from_bytes(cls, data, n_bits, w):
        arena = cls(w)
        acc = int.from_bytes(data, "little")
        mask = (1 << n_bits) - 1
        arena._acc = acc & mask
        if arena._acc != acc:
            raise IntegrityError("trailing garbage beyond declared bit length")
        arena._len = n_bits
        return arena


def read_word(arena, offset, meter):
    """Module-level alias for the single-window probe."""
    return arena.read_word(offset, meter)


def append_bits(arena, value, width):
    return arena.append_bits(value, width)


@dataclass
class Caps:
    """Enumeration ceilings; exceeding one raises CapError naming it."""

    max_s_tuples: int = 1 << 16
    max_j_tuples: int = 4096
    max_grid: int = 1 << 22

    def as_dict(self):
        return {
            "max_s_tuples": self.max_s_tuples,
            "max_j_tuples": self.max_j_tuples,
            "max_grid": self.max_grid,
        }


def _next_pow2(x):
    return 1 << max(0, x - 1).bit_length()


def auto_base_pad(w, B, t):
    """Default relaxed-mode leaf padding.

    Smallest power of two at least max_i 2(B^{i-1}w+1)^B / B^i, the per-level
    ceiling slop the spillover slack has to absorb for the small-path growth
    bound K <= 2^w + 2B*sigma to hold at every level.
    """
    need = 1
    for i in range(1, t + 1):
        l_i = B ** (i - 1) * w
        need = max(need, -(-2 * (l_i + 1) ** B // B**i))
    return _next_pow2(need)


def strict_base_pad(w, n):
    return n * (1 << (w // 2))


def relaxed_w_min(t, B, limit=4096):
    """Smallest even w whose auto padding keeps sigma usable at every level.

    Requires pad <= 2^{w-1} (so per-sum counts stay below 2^w) and
    (2B)^t * pad <= 2^w (so a one-bit-redundant top spillover is attainable).
    """
    w = 4
    while w <= limit:
        pad = auto_base_pad(w, B, t)
        if pad <= 1 << (w - 1) and (2 * B) ** t * pad <= 1 << w:
            return w
        w += 2
    raise ParameterError("no feasible word size below %d for t=%d B=%d" % (limit, t, B))


def _round_cube_root(w):
    b = round(w ** (1.0 / 3.0))
    best, err = b, abs(b**3 - w)
    for cand in (b - 1, b + 1):
        if cand >= 2 and abs(cand**3 - w) < err:
            best, err = cand, abs(cand**3 - w)
    return best


@dataclass
class Params:
    """Structural parameters of one build.

    mode='strict' pins every constant to the certified-growth regime and makes
    violated size bounds fatal; mode='relaxed' permits desk-scale parameters,
    records width bumps, and asserts only the bounds whose preconditions hold.
    """

    w: int
    B: int
    t: int
    mode: str = "relaxed"
    engine: str = "enum"
    path: str = "auto"  # auto | small | large
    base_pad: object = "auto"  # 'auto' | int
    caps: Caps = field(default_factory=Caps)

    def __post_init__(self):
        if self.w < 4 or self.w % 2:
            raise ParameterError("w must be even and at least 4")
        if self.B < 2:
            raise ParameterError("branching factor must be at least 2")
        if self.t < 1:
            raise ParameterError("depth must be at least 1")
        if self.mode not in ("strict", "relaxed"):
            raise ParameterError("mode must be strict or relaxed")
        if self.engine not in ("enum", "probe"):
            raise ParameterError("engine must be enum or probe")
        if self.path not in ("auto", "small", "large"):
            raise ParameterError("path must be auto, small or large")

    @property
    def tree_bits(self):
        return self.B**self.t * self.w

    def level_len(self, i):
        """Subtree bit-length at level i (level 0 = leaf = one word)."""
        return self.B**i * self.w

    def pad_for(self, n):
        if self.base_pad == "auto":
            if self.mode == "strict":
                return strict_base_pad(self.w, n)
            return auto_base_pad(self.w, self.B, self.t)
        return int(self.base_pad)

    def validate_for(self, n):
        """Mode-dependent feasibility checks against a concrete input size."""
        if n < 1:
            raise ParameterError("empty input")
        if self.mode == "strict":
            lg = max(1, (n - 1).bit_length())
            if self.w < 7 * lg:
                raise ParameterError(
                    "strict mode needs w >= 7*log2(n): w=%d, n=%d" % (self.w, n)
                )
            if self.B != _round_cube_root(self.w):
                raise ParameterError(
                    "strict mode pins B to round(w^(1/3)) = %d" % _round_cube_root(self.w)
                )
        else:
            wmin = relaxed_w_min(self.t, self.B)
            if self.w < wmin:
                raise ParameterError(
                    "relaxed mode needs w >= %d for t=%d B=%d" % (wmin, self.t, self.B)
                )
        pad = self.pad_for(n)
        if pad < 0 or pad > 1 << (self.w - 1):
            raise ParameterError("leaf padding %d exceeds 2^(w-1)" % pad)

    def as_dict(self):
        return {
            "w": self.w,
            "B": self.B,
            "t": self.t,
            "mode": self.mode,
            "engine": self.engine,
            "path": self.path,
            "base_pad": self.base_pad,
            "caps": self.caps.as_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        caps = Caps(**d.get("caps", {}))
        return cls(
            w=int(d["w"]),
            B=int(d["B"]),
            t=int(d["t"]),
            mode=d.get("mode", "relaxed"),
            engine=d.get("engine", "enum"),
            path=d.get("path", "auto"),
            base_pad=d.get("base_pad", "auto"),
            caps=caps,
        )


# ---------------------------------------------------------------------------
# bit-file formats
#
# A bit file starts with one ASCII header line "n=<int>" or "n=<int> fmt=hex".
# The default body is the array packed 8 bits per byte, LSB first within each
# byte; fmt=hex stores ceil(n/4) hex digits (low nibble first), whitespace
# ignored.


def pack_bits(bits):
    """List of 0/1 -> (packed bytes LSB-first, count)."""
    acc = 0
    for i, b in enumerate(bits):
        if b:
            acc |= 1 << i
    n = len(bits)
    return acc.to_bytes((n + 7) // 8 or 1, "little") if n else b"", n


def unpack_bits(data, n):
    acc = int.from_bytes(data, "little")
    return [(acc >> i) & 1 for i in range(n)]


def save_bit_file(path, bits, fmt="raw"):
    n = len(bits)
    if fmt == "raw":
        body, _ = pack_bits(bits)
        with open(path, "wb") as fh:
            fh.write(("n=%d\n" % n).encode("ascii"))
            fh.write(body)
    elif fmt == "hex":
        acc = 0
        for i, b in enumerate(bits):
            if b:
                acc |= 1 << i
        digits = (n + 3) // 4
        text = "".join("%x" % ((acc >> (4 * i)) & 0xF) for i in range(digits))
        with open(path, "w", encoding="ascii") as fh:
            fh.write("n=%d fmt=hex\n" % n)
            fh.write(text + "\n")
    else:
        raise ConfigError("unknown bit-file format %r" % fmt)


def load_bit_file(path):
    """Read a bit file; returns a list of 0/1 ints."""
    with open(path, "rb") as fh:
        header = fh.readline()
        body = fh.read()
    try:
        fields = header.decode("ascii").split()
    except UnicodeDecodeError as exc:
        raise EncodingError("bit file header is not ASCII") from exc
    kv = {}
    for f in fields:
        if "=" not in f:
            raise EncodingError("malformed header field %r" % f)
        key, val = f.split("=", 1)
        kv[key] = val
    if "n" not in kv:
        raise EncodingError("bit file header missing n=<int>")
    n = int(kv["n"])
    if n < 0:
        raise EncodingError("negative bit count")
    fmt = kv.get("fmt", "raw")
    if fmt == "raw":
        need = (n + 7) // 8
        if len(body) < need:
            raise EncodingError("bit file truncated: need %d bytes, have %d" % (need, len(body)))
        return unpack_bits(body[:need], n)
    if fmt == "hex":
        text = "".join(body.decode("ascii").split())
        need = (n + 3) // 4
        if len(text) < need:
            raise EncodingError("hex bit file truncated")
        acc = 0
        for i, ch in enumerate(text[:need]):
            acc |= int(ch, 16) << (4 * i)
        if acc >> n:
            raise EncodingError("set bits beyond declared length")
        return [(acc >> i) & 1 for i in range(n)]
    raise EncodingError("unknown bit-file fmt %r" % fmt)
