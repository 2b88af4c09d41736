"""Mixed-radix packing of digit tuples into memory bits plus a small spillover.

Given digit domains M_1..M_n and a memory share of m bits, the packer arranges
the product set so that

  * the whole tuple is a single integer split as (low m bits, spillover k),
  * the spillover domain K never exceeds ceil(2^-m * prod M) + 1,
  * decoding one digit touches at most two stored digit fields.

Digits are grouped greedily until a group's product exceeds 2^{3w}; groups are
then chained by repeatedly borrowing a near-word-aligned factor from the
previous group's remainder, so every stored field is local.  Within a group the
last digit is the outermost (most significant) factor, which keeps the final
digit of the whole tuple recoverable from the top of the last field.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .model import (
    CertificationError,
    EncodingError,
    IntegrityError,
    ParameterError,
    RangeError,
    SpilloverValue,
)


def _ceil_div(a, b):
    return -(-a // b)


@dataclass(frozen=True)
class RadixPlan:
    """Precomputed layout for one tuple shape.  Immutable; safe to share."""

    domains: tuple
    w: int
    m: int
    groups: tuple  # (start, end) index ranges into domains
    group_products: tuple
    V: tuple  # V[0]=1, then carried remainder domains, len == n_groups
    U: tuple  # borrowed factor per inner group, len == n_groups-1
    widths: tuple  # stored field width per inner group, len == n_groups-1
    offsets: tuple  # bit offset of each field, len == n_groups
    K: int
    product: int
    bound_ok: bool = True

    @property
    def base_bound(self):
        """ceil(product / 2^m): the spillover size of an ideal split."""
        return _ceil_div(self.product, 1 << self.m)

    @property
    def n_groups(self):
        return len(self.groups)

    @property
    def top_offset(self):
        return self.offsets[-1]

    def group_of(self, idx):
        if not 0 <= idx < len(self.domains):
            raise RangeError("digit index %d out of range" % idx)
        starts = [g[0] for g in self.groups]
        return bisect.bisect_right(starts, idx) - 1

    def fields_for(self, idx):
        """Which stored fields a single-digit decode touches (at most two)."""
        g = self.group_of(idx)
        if g == self.n_groups - 1:
            return (g,)
        return (g, g + 1)

    def field_span(self, g):
        """(offset, width) of field g; the last field is open-ended above."""
        if g < self.n_groups - 1:
            return self.offsets[g], self.widths[g]
        top = self.V[-1] * self.group_products[-1]
        return self.offsets[g], max(1, (top - 1).bit_length())


def plan_radix(domains, w, m, require_bound=False):
    """Build the packing layout for `domains` with an m-bit memory share.

    The spillover stays within ceil(product/2^m)+1 whenever the residual
    domain is small next to 2^{3w/2} (the headroom each borrow step carries);
    `bound_ok` records whether that held, and require_bound=True makes a miss
    fatal.  A single group splits exactly, with no +1.
    """
    domains = tuple(int(M) for M in domains)
    if not domains:
        raise ParameterError("need at least one digit domain")
    if any(M < 1 for M in domains):
        raise ParameterError("digit domains must be positive")
    if m < 0:
        raise ParameterError("memory share must be nonnegative")
    if w < 2 or w % 2:
        raise ParameterError("word size must be even and at least 2")

    product = 1
    for M in domains:
        product *= M

    group_cap = 1 << (3 * w)
    if product <= group_cap * group_cap:
        groups = [(0, len(domains))]
    else:
        groups = []
        start = 0
        acc = 1
        for i, M in enumerate(domains):
            acc *= M
            if acc > group_cap:
                groups.append((start, i + 1))
                start = i + 1
                acc = 1
        if start < len(domains):
            groups.append((start, len(domains)))

    group_products = []
    for a, b in groups:
        p = 1
        for M in domains[a:b]:
            p *= M
        group_products.append(p)

    V = [1]
    U = []
    widths = []
    offsets = [0]
    half = 3 * w // 2
    for i in range(len(groups) - 1):
        w_i = (V[-1] << half).bit_length() - 1
        u_i = (1 << w_i) // V[-1]
        V.append(_ceil_div(group_products[i], u_i))
        U.append(u_i)
        widths.append(w_i)
        offsets.append(offsets[-1] + w_i)

    total = V[-1] * group_products[-1] << offsets[-1]
    K = _ceil_div(total, 1 << m)
    base_bound = _ceil_div(product, 1 << m)
    limit = base_bound if len(groups) == 1 else base_bound + 1
    bound_ok = K <= limit
    if require_bound and not bound_ok:
        raise CertificationError(
            "spillover domain exceeds ceil(product/2^m)+1",
            witness={"K": K, "bound": limit, "domains": domains, "m": m},
        )
    return RadixPlan(
        domains=domains,
        w=w,
        m=m,
        groups=tuple(groups),
        group_products=tuple(group_products),
        V=tuple(V),
        U=tuple(U),
        widths=tuple(widths),
        offsets=tuple(offsets),
        K=K,
        product=product,
        bound_ok=bound_ok,
    )


def _group_value(plan, g, values):
    a, b = plan.groups[g]
    y = 0
    for j in range(b - 1, a - 1, -1):
        y = y * plan.domains[j] + values[j]
    return y


def radix_encode(plan, values):
    """Pack one digit tuple; returns (memory integer, spillover)."""
    if len(values) != len(plan.domains):
        raise EncodingError("expected %d digits" % len(plan.domains))
    for d, M in zip(values, plan.domains):
        if not 0 <= d < M:
            raise EncodingError("digit %d outside [0, %d)" % (d, M))
    n_groups = plan.n_groups
    z_fields = []
    v_prev = 0
    for i in range(n_groups - 1):
        y = _group_value(plan, i, values)
        u = y // plan.V[i + 1]
        v = y % plan.V[i + 1]
        z_fields.append(v_prev * plan.U[i] + u)
        v_prev = v
    y_last = _group_value(plan, n_groups - 1, values)
    z_top = y_last * plan.V[-1] + v_prev

    Z = z_top << plan.offsets[-1]
    for i, z in enumerate(z_fields):
        Z |= z << plan.offsets[i]
    mem = Z & ((1 << plan.m) - 1)
    return mem, SpilloverValue(Z >> plan.m, plan.K)


def _split_groups(plan, fields, z_top):
    """Invert the borrow chain; returns per-group mixed-radix values."""
    n_groups = plan.n_groups
    v = z_top % plan.V[-1]
    ys = [None] * n_groups
    ys[-1] = z_top // plan.V[-1]
    for i in range(n_groups - 2, -1, -1):
        z = fields[i]
        u = z % plan.U[i]
        carry = z // plan.U[i]
        ys[i] = u * plan.V[i + 1] + v
        v = carry
    if v != 0:
        raise IntegrityError("borrow chain does not terminate at zero")
    for i, y in enumerate(ys):
        if y >= plan.group_products[i]:
            raise IntegrityError("group value %d outside its domain" % i)
    return ys


def radix_decode_all(plan, mem, k):
    """Unmetered full decode (audits, serialization checks)."""
    if not 0 <= k < plan.K:
        raise RangeError("spillover out of range")
    if mem >> plan.m:
        raise EncodingError("memory value wider than %d bits" % plan.m)
    Z = mem | (k << plan.m)
    fields = [(Z >> plan.offsets[i]) & ((1 << plan.widths[i]) - 1) for i in range(plan.n_groups - 1)]
    ys = _split_groups(plan, fields, Z >> plan.offsets[-1])
    out = []
    for g, (a, b) in enumerate(plan.groups):
        y = ys[g]
        for j in range(a, b):
            out.append(y % plan.domains[j])
            y //= plan.domains[j]
        if y:
            raise IntegrityError("group %d has residue above its outermost digit" % g)
    return out


def _read_code_field(plan, arena, base, k, offset, width, meter):
    """Field bits of the packed code: low m bits live in the arena at `base`,
    everything above comes from the spillover (free of word probes)."""
    lo_width = max(0, min(plan.m, offset + width) - offset)
    value = 0
    if lo_width > 0:
        value = arena.read_field(base + offset, lo_width, meter)
    if lo_width < width:
        hi_off = max(0, offset - plan.m)
        hi = (k >> hi_off) & ((1 << (width - lo_width)) - 1)
        value |= hi << lo_width
        if meter is not None:
            meter.count_spill()
    return value


def radix_decode_element(plan, arena, base, k, idx, meter=None):
    """Decode a single digit, touching at most two stored fields."""
    if not 0 <= k < plan.K:
        raise RangeError("spillover out of range")
    g = plan.group_of(idx)
    n_groups = plan.n_groups

    if g == n_groups - 1:
        off, width = plan.field_span(g)
        z_top = _read_code_field(plan, arena, base, k, off, width, meter)
        y = z_top // plan.V[-1]
    else:
        off, width = plan.field_span(g)
        z_g = _read_code_field(plan, arena, base, k, off, width, meter)
        u = z_g % plan.U[g]
        if g + 1 == n_groups - 1:
            off2, width2 = plan.field_span(g + 1)
            z_next = _read_code_field(plan, arena, base, k, off2, width2, meter)
            v = z_next % plan.V[-1]
        else:
            off2, width2 = plan.field_span(g + 1)
            z_next = _read_code_field(plan, arena, base, k, off2, width2, meter)
            v = z_next // plan.U[g + 1]
        y = u * plan.V[g + 1] + v

    if y >= plan.group_products[g]:
        raise IntegrityError("decoded group value out of range")
    a, _ = plan.groups[g]
    for j in range(a, idx):
        y //= plan.domains[j]
    return y % plan.domains[idx]


# ---------------------------------------------------------------------------
# sum alignment


@dataclass(frozen=True)
class AlignedLayout:
    """Spillover domain re-laid-out so the high bits alone identify the key.

    Every key's elements occupy whole 2^low-blocks starting at a block
    boundary, so k >> low determines the key and the low bits never matter for
    classification.  Costs at most one extra block per key:
    K_blocks <= ceil(total/2^low) + number of keys.
    """

    low: int
    counts: tuple
    block_starts: tuple  # first block index per key
    K_blocks: int

    @property
    def domain(self):
        return self.K_blocks << self.low

    @property
    def total(self):
        return sum(self.counts)

    def encode(self, key_idx, r):
        if not 0 <= r < self.counts[key_idx]:
            raise RangeError("rank %d outside key %d" % (r, key_idx))
        return (self.block_starts[key_idx] << self.low) + r

    def decode(self, z):
        if not 0 <= z < self.domain:
            raise RangeError("aligned value out of range")
        block = z >> self.low
        key_idx = bisect.bisect_right(self.block_starts, block) - 1
        r = z - (self.block_starts[key_idx] << self.low)
        if r >= self.counts[key_idx]:
            raise IntegrityError("aligned value inside padding of key %d" % key_idx)
        return key_idx, r

    def key_from_high(self, high_bits):
        """Classify from the block index only (no low bits needed)."""
        if not 0 <= high_bits < self.K_blocks:
            raise RangeError("block index out of range")
        return bisect.bisect_right(self.block_starts, high_bits) - 1


def sum_align(counts, low_width):
    """Lay key-sorted counts out on 2^low_width boundaries."""
    counts = tuple(int(c) for c in counts)
    if any(c < 0 for c in counts):
        raise ParameterError("counts must be nonnegative")
    if low_width < 0:
        raise ParameterError("alignment width must be nonnegative")
    starts = []
    cursor = 0
    for c in counts:
        starts.append(cursor)
        cursor += _ceil_div(c, 1 << low_width)
    layout = AlignedLayout(
        low=low_width,
        counts=counts,
        block_starts=tuple(starts),
        K_blocks=cursor,
    )
    total = sum(counts)
    bound = _ceil_div(total, 1 << low_width) + len(counts)
    if layout.K_blocks > bound:
        raise CertificationError(
            "aligned block count exceeds its bound",
            witness={"K_blocks": layout.K_blocks, "bound": bound},
        )
    return layout
