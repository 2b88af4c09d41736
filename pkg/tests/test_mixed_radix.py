import math
import random

import pytest

from spillrank.model import (
    BitArena,
    CertificationError,
    EncodingError,
    IntegrityError,
    ProbeMeter,
    RangeError,
)
from spillrank.mixed_radix import (
    plan_radix,
    radix_decode_all,
    radix_decode_element,
    radix_encode,
    sum_align,
)


def ceil_div(a, b):
    return -(-a // b)


def mixed_radix_oracle(values, domains):
    """Plain positional value with the last digit outermost."""
    y = 0
    for d, M in zip(reversed(values), reversed(domains)):
        y = y * M + d
    return y


def test_small_tuple_exact_split():
    plan = plan_radix([3, 5, 7], w=8, m=3)
    assert plan.n_groups == 1
    assert plan.product == 105
    assert plan.K == ceil_div(105, 8) == 14
    assert plan.bound_ok
    # exhaustive bijection: every tuple distinct, decodes back
    seen = set()
    for a in range(3):
        for b in range(5):
            for c in range(7):
                mem, sp = radix_encode(plan, [a, b, c])
                assert 0 <= mem < 8 and 0 <= sp.k < 14
                seen.add((mem, sp.k))
                assert radix_decode_all(plan, mem, sp.k) == [a, b, c]
    assert len(seen) == 105


def test_single_group_matches_positional_oracle():
    plan = plan_radix([4, 9, 2, 5], w=8, m=0)
    for _ in range(200):
        rng = random.Random(_)
        vals = [rng.randrange(M) for M in plan.domains]
        mem, sp = radix_encode(plan, vals)
        assert mem == 0
        assert sp.k == mixed_radix_oracle(vals, plan.domains)


def test_exhaustive_round_trip_two_groups():
    # product 13^8 ~ 2^29.6 exceeds 2^{6w} at w=4, forcing a borrow chain
    plan = plan_radix([13] * 8, w=4, m=26)
    assert plan.n_groups == 2
    assert plan.bound_ok
    assert plan.K <= ceil_div(plan.product, 1 << 26) + 1
    rng = random.Random(77)
    for _ in range(3000):
        vals = [rng.randrange(13) for _ in range(8)]
        mem, sp = radix_encode(plan, vals)
        assert radix_decode_all(plan, mem, sp.k) == vals


def test_three_group_chain_round_trip():
    plan = plan_radix([11] * 12, w=4, m=38)
    assert plan.n_groups >= 3
    rng = random.Random(5)
    for _ in range(2000):
        vals = [rng.randrange(11) for _ in range(12)]
        mem, sp = radix_encode(plan, vals)
        assert radix_decode_all(plan, mem, sp.k) == vals


def test_bound_violation_detected_out_of_regime():
    # taking almost nothing into memory leaves the borrow slack visible
    plan = plan_radix([13] * 8, w=4, m=14)
    assert not plan.bound_ok
    with pytest.raises(CertificationError):
        plan_radix([13] * 8, w=4, m=14, require_bound=True)


def test_random_domains_bound_holds_in_regime():
    rng = random.Random(123)
    for trial in range(1000):
        w = rng.choice([8, 10, 12, 16])
        n = rng.randrange(1, 14)
        domains = [rng.randrange(1, (1 << w) + 1) for _ in range(n)]
        product = math.prod(domains)
        # leave at most ~2^w of the product to the spillover
        m = max(0, product.bit_length() - w + rng.randrange(-2, 3))
        plan = plan_radix(domains, w=w, m=m)
        limit = ceil_div(product, 1 << m) + (0 if plan.n_groups == 1 else 1)
        assert plan.K <= limit, (trial, domains, w, m, plan.K, limit)
        assert plan.bound_ok


def test_decode_element_matches_full_decode():
    rng = random.Random(9)
    for w, domains, m in [
        (8, [7, 3, 250, 19, 6], 12),
        (4, [13] * 8, 26),
        (4, [11] * 12, 38),
        (6, [40, 40, 40, 40, 40, 40, 40], 30),
    ]:
        plan = plan_radix(domains, w=w, m=m)
        for _ in range(100):
            vals = [rng.randrange(M) for M in plan.domains]
            mem, sp = radix_encode(plan, vals)
            arena = BitArena(w)
            arena.append_bits(mem, m)
            if len(arena) < w:  # keep the final window slidable
                arena.append_bits(0, w)
            for idx in range(len(domains)):
                meter = ProbeMeter()
                got = radix_decode_element(plan, arena, 0, sp.k, idx, meter)
                assert got == vals[idx]
                fields = plan.fields_for(idx)
                assert len(fields) <= 2
                budget = sum(
                    ceil_div(plan.field_span(f)[1], w) for f in fields
                )
                assert meter.word_reads <= budget


def test_decode_element_top_digit_no_memory_reads():
    # the last digit is outermost: with memory below the top field, reading it
    # costs no word probes at all
    plan = plan_radix([16] * 4, w=8, m=8)
    vals = [3, 7, 1, 12]
    mem, sp = radix_encode(plan, vals)
    arena = BitArena(8)
    arena.append_bits(mem, 8)
    meter = ProbeMeter()
    top_field_offset = plan.field_span(plan.n_groups - 1)[0]
    if top_field_offset >= 8:  # entirely in spillover
        got = radix_decode_element(plan, arena, 0, sp.k, 3, meter)
        assert got == 12
        assert meter.word_reads == 0
        assert meter.spill_reads == 1


def test_encode_validates_digits():
    plan = plan_radix([3, 5], w=8, m=2)
    with pytest.raises(EncodingError):
        radix_encode(plan, [3, 0])
    with pytest.raises(EncodingError):
        radix_encode(plan, [0, -1])
    with pytest.raises(EncodingError):
        radix_encode(plan, [0])


def test_decode_rejects_out_of_domain():
    plan = plan_radix([3, 5], w=8, m=0)
    with pytest.raises(RangeError):
        radix_decode_all(plan, 0, 15)
    # craft a stored value whose first group decodes above its product
    plan2 = plan_radix([13] * 8, w=4, m=26)
    u_max = plan2.U[0] - 1
    v_bad = plan2.group_products[0] - u_max * plan2.V[1]
    assert 0 <= v_bad < plan2.V[1]
    bad_z = (v_bad << plan2.offsets[1]) | u_max
    with pytest.raises(IntegrityError):
        radix_decode_all(plan2, bad_z & ((1 << 26) - 1), bad_z >> 26)


def test_spillover_alias_free():
    # distinct tuples map to distinct (mem, k) pairs even across the chain
    plan = plan_radix([6] * 11, w=4, m=20)
    assert plan.n_groups >= 2
    rng = random.Random(31)
    seen = {}
    for _ in range(4000):
        vals = tuple(rng.randrange(6) for _ in range(11))
        mem, sp = radix_encode(plan, vals)
        key = (mem, sp.k)
        assert seen.setdefault(key, vals) == vals
    assert len(seen) > 3500


# ---------------------------------------------------------------------------
# sum alignment


def test_align_block_counts_frozen_example():
    counts = [math.comb(8, s) for s in range(9)]
    layout = sum_align(counts, 5)
    assert layout.K_blocks == 13
    assert layout.K_blocks <= ceil_div(sum(counts), 32) + len(counts)
    assert layout.block_starts == (0, 1, 2, 3, 5, 8, 10, 11, 12)


def test_align_round_trip_and_classification():
    counts = [5, 0, 17, 1, 32, 9]
    layout = sum_align(counts, 3)
    for key, c in enumerate(counts):
        for r in range(c):
            z = layout.encode(key, r)
            assert layout.decode(z) == (key, r)
            assert layout.key_from_high(z >> 3) == key


def test_align_padding_is_unreachable():
    layout = sum_align([5, 9], 3)
    # key 0 occupies one block of 8 with 5 live values; 5..7 are padding
    with pytest.raises(IntegrityError):
        layout.decode(5)
    with pytest.raises(RangeError):
        layout.decode(layout.domain)


def test_align_zero_width_is_identity():
    counts = [3, 4, 2]
    layout = sum_align(counts, 0)
    assert layout.K_blocks == 9
    z = 0
    for key, c in enumerate(counts):
        for r in range(c):
            assert layout.encode(key, r) == z
            z += 1


def test_align_random_bound():
    rng = random.Random(42)
    for _ in range(300):
        n_keys = rng.randrange(1, 20)
        counts = [rng.randrange(0, 500) for _ in range(n_keys)]
        low = rng.randrange(0, 8)
        layout = sum_align(counts, low)
        assert layout.K_blocks <= ceil_div(sum(counts), 1 << low) + n_keys
        # high bits always classify correctly
        for key, c in enumerate(counts):
            if c:
                z = layout.encode(key, c - 1)
                assert layout.key_from_high(z >> low) == key
