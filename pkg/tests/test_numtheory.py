"""Number-theory core against brute-force oracles."""

from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prfdist.numtheory import (
    NotInSubgroup,
    PrimeSearchExhausted,
    SafePrime,
    discrete_log,
    find_qr_generator,
    gen_safe_prime,
    is_prime,
    is_quadratic_residue,
    is_safe_prime,
    modpow,
    qr_fold,
    qr_unfold,
)

from conftest import qr_set, sieve_primes, sieve_safe_primes

# A pool of safe primes for randomized properties, found once.
SAFE_PRIME_POOL = sieve_safe_primes(4096)


# ---------------------------------------------------------------------------
# modpow
# ---------------------------------------------------------------------------

def test_modpow_examples():
    assert modpow(3, 0, 11) == 1
    assert modpow(3, 4, 11) == 4
    assert modpow(9, 4, 11) == 5


def test_modpow_validation():
    with pytest.raises(ValueError):
        modpow(11, 2, 11)
    with pytest.raises(ValueError):
        modpow(3, -1, 11)
    with pytest.raises(ValueError):
        modpow(0, 2, 1)


@given(st.integers(min_value=2, max_value=997), st.integers(min_value=0, max_value=50),
       st.data())
def test_modpow_matches_repeated_multiplication(p, e, data):
    base = data.draw(st.integers(min_value=0, max_value=p - 1))
    acc = 1
    for _ in range(e):
        acc = acc * base % p
    assert modpow(base, e, p) == acc


# ---------------------------------------------------------------------------
# Primality and safe primes
# ---------------------------------------------------------------------------

def test_is_prime_agrees_with_sieve():
    primes = set(sieve_primes(5000))
    for n in range(5000):
        assert is_prime(n) == (n in primes)


def test_is_safe_prime_examples():
    assert not is_safe_prime(4)
    assert is_safe_prime(11)
    assert not is_safe_prime(13)
    # p = 5 has q = 2; an even q breaks the residue fold, so it is excluded.
    assert not is_safe_prime(5)
    with pytest.raises(ValueError):
        is_safe_prime(1)


def test_is_safe_prime_agrees_with_sieve():
    expected = set(sieve_safe_primes(4096))
    for p in range(2, 4096):
        assert is_safe_prime(p) == (p in expected)


def test_gen_safe_prime_4_bits_is_11():
    # Enumeration: 11 is the only 4-bit safe prime.
    assert [p for p in SAFE_PRIME_POOL if p.bit_length() == 4] == [11]
    for seed in range(10):
        assert gen_safe_prime(4, Random(seed)).p == 11


def test_gen_safe_prime_5_bits_is_23():
    assert [p for p in SAFE_PRIME_POOL if p.bit_length() == 5] == [23]
    assert gen_safe_prime(5, Random(0)).p == 23


def test_gen_safe_prime_exact_width_and_determinism():
    for bits in (6, 8, 12, 16, 20):
        sp = gen_safe_prime(bits, Random(42))
        assert sp.p.bit_length() == bits
        assert sp.p == 2 * sp.q + 1
        assert gen_safe_prime(bits, Random(42)).p == sp.p


def test_gen_safe_prime_outputs_come_from_the_enumerated_set():
    found = {gen_safe_prime(8, Random(seed)).p for seed in range(40)}
    allowed = {p for p in SAFE_PRIME_POOL if p.bit_length() == 8}
    assert found <= allowed
    assert len(found) > 1


def test_gen_safe_prime_validation_and_exhaustion():
    with pytest.raises(ValueError):
        gen_safe_prime(3, Random(0))
    with pytest.raises(ValueError):
        gen_safe_prime(49, Random(0))
    with pytest.raises(PrimeSearchExhausted):
        gen_safe_prime(20, Random(0), max_tries=1)


def test_safe_prime_type_invariants():
    with pytest.raises(ValueError):
        SafePrime(p=13, q=6, bit_len=4)
    with pytest.raises(ValueError):
        SafePrime(p=5, q=2, bit_len=3)
    with pytest.raises(ValueError):
        SafePrime(p=11, q=5, bit_len=5)
    sp = SafePrime.from_p(23)
    assert (sp.p, sp.q, sp.bit_len) == (23, 11, 5)
    assert sp.p % 4 == 3


# ---------------------------------------------------------------------------
# Quadratic residues
# ---------------------------------------------------------------------------

def test_is_quadratic_residue_examples(sp11):
    assert is_quadratic_residue(1, sp11)
    assert is_quadratic_residue(5, sp11)
    assert not is_quadratic_residue(2, sp11)
    assert qr_set(11) == {1, 3, 4, 5, 9}


def test_is_quadratic_residue_domain_error(sp11):
    with pytest.raises(ValueError):
        is_quadratic_residue(0, sp11)
    with pytest.raises(ValueError):
        is_quadratic_residue(11, sp11)


def test_euler_criterion_agrees_with_square_enumeration():
    # Brute-force oracle over every safe prime below 2**12.
    for p in SAFE_PRIME_POOL:
        sp = SafePrime.from_p(p)
        squares = qr_set(p)
        for c in range(1, p):
            assert is_quadratic_residue(c, sp) == (c in squares)


def test_find_qr_generator_examples(sp11, sp7):
    rng = Random(5)
    assert {find_qr_generator(sp11, rng) for _ in range(50)} == {3, 4, 5, 9}
    assert {find_qr_generator(sp7, rng) for _ in range(50)} == {2, 4}


def test_find_qr_generator_postcondition():
    for p in (23, 47, 59):
        sp = SafePrime.from_p(p)
        for seed in range(5):
            g = find_qr_generator(sp, Random(seed))
            assert g != 1
            assert is_quadratic_residue(g, sp)


# ---------------------------------------------------------------------------
# Fold / unfold
# ---------------------------------------------------------------------------

def test_fold_examples(sp11, sp7):
    # Raw values land in {1..q}; raw q folds to the canonical 0.
    assert qr_fold(4, sp7) == 0    # raw 7 - 4 = 3 = q
    assert qr_fold(9, sp11) == 2   # raw 11 - 9 = 2
    assert qr_fold(5, sp11) == 0   # raw 5 = q


def test_unfold_examples(sp11, sp7):
    assert qr_unfold(0, sp7) == 4   # raw 3 is not in QR_7, so 7 - 3
    assert qr_unfold(0, sp11) == 5  # raw 5 is in QR_11
    assert qr_unfold(2, sp11) == 9  # raw 2 is not in QR_11, so 11 - 2


def test_fold_domain_error(sp11):
    with pytest.raises(ValueError):
        qr_fold(2, sp11)  # 2 is not a residue mod 11
    with pytest.raises(ValueError):
        qr_unfold(5, sp11)
    with pytest.raises(ValueError):
        qr_unfold(-1, sp11)


def test_fold_bijection_small():
    for p in sieve_safe_primes(1024):
        sp = SafePrime.from_p(p)
        images = {qr_fold(x, sp) for x in qr_set(p)}
        assert images == set(range(sp.q))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SAFE_PRIME_POOL), st.data())
def test_fold_unfold_round_trip(p, data):
    sp = SafePrime.from_p(p)
    y = data.draw(st.integers(min_value=0, max_value=sp.q - 1))
    x = qr_unfold(y, sp)
    assert is_quadratic_residue(x, sp)
    assert qr_fold(x, sp) == y


# ---------------------------------------------------------------------------
# Discrete log
# ---------------------------------------------------------------------------

def test_discrete_log_examples(sp11):
    assert discrete_log(3, 1, sp11) == 0
    assert discrete_log(3, 4, sp11) == 4
    assert discrete_log(9, 5, sp11) == 4


def test_discrete_log_brute_force_oracle(sp11):
    # Exponent scan over the whole subgroup.
    for g in (3, 4, 5, 9):
        for e in range(5):
            y = pow(g, e, 11)
            assert discrete_log(g, y, sp11) == e


def test_discrete_log_not_in_subgroup(sp11):
    with pytest.raises(NotInSubgroup):
        discrete_log(3, 2, sp11)  # 2 is not a quadratic residue


def test_discrete_log_random_pairs_up_to_32_bits():
    # 10**4 random (g, e) pairs across primes up to 2**32, heavier at the
    # small end to keep the sqrt(q) scans affordable.
    plan = [(16, 2500), (18, 1800), (20, 1500), (22, 1200), (24, 1000),
            (26, 800), (28, 600), (30, 400), (32, 200)]
    assert sum(c for _, c in plan) == 10_000
    rng = Random(2024)
    for bits, count in plan:
        sp = gen_safe_prime(bits, rng)
        gens = [find_qr_generator(sp, rng) for _ in range(4)]
        for _ in range(count):
            g = gens[rng.randrange(4)]
            e = rng.randrange(sp.q)
            assert discrete_log(g, pow(g, e, sp.p), sp) == e
