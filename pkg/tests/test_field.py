import random

import pytest
from hypothesis import given, strategies as st

from zkpol.field import (
    DEFAULT_MODULUS,
    FieldElement,
    FieldError,
    FieldParams,
    InversionOfZero,
    OutOfRange,
    f_inv,
    overflow_ledger,
)

P = DEFAULT_MODULUS
PARAMS = FieldParams()


def _egcd_inverse(a: int, p: int) -> int:
    # Independent extended-gcd oracle for inversion.
    old_r, r = a % p, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    assert old_r == 1
    return old_s % p


def test_mul_trivial():
    assert FieldElement(2) * FieldElement(3) == 6


def test_minus_one_squared():
    assert FieldElement(P - 1) * FieldElement(P - 1) == 1


def test_mul_random_against_int_oracle():
    rng = random.Random(7)
    for _ in range(200):
        a = rng.getrandbits(126)
        b = rng.getrandbits(126)
        assert (FieldElement(a) * FieldElement(b)).value == (a * b) % P


def test_inv_of_one():
    assert FieldElement(1).inv() == 1


def test_inv_of_two():
    assert FieldElement(2).inv() == (P + 1) // 2


def test_inv_random_against_egcd_oracle():
    rng = random.Random(11)
    for _ in range(100):
        a = rng.randrange(1, P)
        inv = FieldElement(a).inv().value
        assert inv == _egcd_inverse(a, P)
        assert a * inv % P == 1


def test_inv_zero_raises():
    with pytest.raises(InversionOfZero):
        FieldElement(0).inv()
    with pytest.raises(InversionOfZero):
        f_inv(P, 0)


def test_from_signed_examples():
    assert PARAMS.from_signed(0) == 0
    assert PARAMS.from_signed(-5) == P - 5
    assert PARAMS.from_signed(7) == 7


def test_from_signed_out_of_range():
    with pytest.raises(OutOfRange):
        PARAMS.from_signed(P // 2 + 1)
    with pytest.raises(OutOfRange):
        PARAMS.from_signed(-(P // 2) - 1)


@given(st.integers(min_value=-(P // 2), max_value=P // 2))
def test_from_signed_round_trip(n):
    assert PARAMS.to_signed(PARAMS.from_signed(n)) == n


@given(st.integers(min_value=1, max_value=P // 2))
def test_from_signed_negation(n):
    assert PARAMS.from_signed(-n) == P - PARAMS.from_signed(n)


@given(
    st.integers(min_value=0, max_value=P - 1),
    st.integers(min_value=0, max_value=P - 1),
    st.integers(min_value=0, max_value=P - 1),
)
def test_ring_axioms(a, b, c):
    fa, fb, fc = FieldElement(a), FieldElement(b), FieldElement(c)
    assert fa + fb == fb + fa
    assert fa * fb == fb * fa
    assert (fa + fb) + fc == fa + (fb + fc)
    assert (fa * fb) * fc == fa * (fb * fc)
    assert fa * (fb + fc) == fa * fb + fa * fc


def test_params_reject_composite_modulus():
    with pytest.raises(FieldError):
        FieldParams(modulus=2**127 - 3, coord_bits=8)


def test_params_reject_insufficient_headroom():
    with pytest.raises(FieldError):
        FieldParams(modulus=2**61 - 1, coord_bits=24)


def test_small_prime_with_small_coords_ok():
    fp = FieldParams(modulus=2**61 - 1, coord_bits=12)
    assert fp.elem(5).value == 5


def test_overflow_ledger_below_half_p():
    ledger = overflow_ledger(PARAMS.coord_bits, 4096)
    for bits in ledger.values():
        assert 2**bits < P // 2
