from fractions import Fraction

from hypothesis import given, strategies as st

from dfactor.rng import RngStream, as_stream


def test_streams_are_reproducible():
    a, b = RngStream(5, (1, 2)), RngStream(5, (1, 2))
    assert [a.randrange(10**9) for _ in range(5)] == [b.randrange(10**9) for _ in range(5)]
    assert a.np.integers(0, 100, 5).tolist() == b.np.integers(0, 100, 5).tolist()


def test_children_differ():
    base = RngStream(5)
    assert base.child(0).randrange(10**12) != base.child(1).randrange(10**12)
    assert base.child(3).stream == (3,)


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**6))
def test_bernoulli_edges(p):
    rng = RngStream(1)
    if p == 0:
        assert not rng.bernoulli(p)
    elif p == 1:
        assert rng.bernoulli(p)


def test_bernoulli_rate():
    rng = RngStream(2)
    hits = sum(rng.bernoulli(Fraction(1, 3)) for _ in range(30_000))
    assert abs(hits / 30_000 - 1 / 3) < 0.015


def test_as_stream():
    assert as_stream(None).seed == 0 and as_stream(7).seed == 7
    s = RngStream(3)
    assert as_stream(s) is s
