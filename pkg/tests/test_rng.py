import numpy as np

from hubofs.rng import Xoshiro256StarStar, VectorXoshiro256StarStar, splitmix64_stream


def test_splitmix64_known_values():
    # Frozen from the documented recurrence; any port must reproduce these.
    assert splitmix64_stream(0, 3) == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]
    assert splitmix64_stream(1234567, 2) == [
        0x599ED017FB08FC85,
        0x2C73F08458540FA5,
    ]


def test_xoshiro_stream_frozen():
    gen = Xoshiro256StarStar(42)
    first = [gen.next_u64() for _ in range(4)]
    gen2 = Xoshiro256StarStar(42)
    assert [gen2.next_u64() for _ in range(4)] == first
    assert all(0 <= v < 2**64 for v in first)
    assert len(set(first)) == 4


def test_random_in_unit_interval():
    gen = Xoshiro256StarStar(7)
    values = [gen.random() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in values)
    assert 0.4 < float(np.mean(values)) < 0.6


def test_vector_lanes_match_scalar_streams():
    seeds = [0, 1, 7, 2**63, 12345]
    scalars = [Xoshiro256StarStar(s) for s in seeds]
    vec = VectorXoshiro256StarStar(seeds)
    for _ in range(50):
        expect = [g.next_u64() for g in scalars]
        got = [int(v) for v in vec.next_u64()]
        assert got == expect


def test_vector_random_matches_scalar_random():
    seeds = [3, 4]
    scalars = [Xoshiro256StarStar(s) for s in seeds]
    vec = VectorXoshiro256StarStar(seeds)
    for _ in range(20):
        expect = [g.random() for g in scalars]
        got = list(vec.random())
        assert got == expect


def test_next_bit_is_top_bit():
    gen_a = Xoshiro256StarStar(99)
    gen_b = Xoshiro256StarStar(99)
    for _ in range(32):
        assert gen_a.next_bit() == gen_b.next_u64() >> 63
