"""Safe-prime and quadratic-residue arithmetic.

Deterministic primality testing, safe-prime search, the folding bijection
between QR_p and Z_q (for p = 2q + 1), and baby-step giant-step discrete
logarithms. Residues and exponents are plain Python ints; values "in Z_q"
are always canonicalized to the range [0, q).

All functions are pure; randomized searches take an explicit random.Random.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from random import Random

# Largest prime we ever construct. Keeps every intermediate product well
# inside 128 bits and the deterministic witness set valid.
DESK_PRIME_CAP = 1 << 48

# Baby-step giant-step needs O(sqrt(q)) memory; cap the subgroup order so a
# single table stays around a million entries.
BSGS_ORDER_CAP = 1 << 40

# Deterministic Miller-Rabin witnesses, exact for all n < 3.3 * 10^24
# (far above DESK_PRIME_CAP).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class PrimeSearchExhausted(RuntimeError):
    """No safe prime was found within the retry budget."""


class NotInSubgroup(ValueError):
    """Discrete-log target is not in the subgroup generated by the base."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact below 2**64)."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n == w:
            return True
        if n % w == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def modpow(base: int, exp: int, p: int) -> int:
    """base**exp mod p via square-and-multiply (CPython's three-arg pow)."""
    if p < 2:
        raise ValueError(f"modulus must be >= 2, got {p}")
    if not 0 <= base < p:
        raise ValueError(f"base must lie in [0, {p}), got {base}")
    if exp < 0:
        raise ValueError(f"exponent must be nonnegative, got {exp}")
    return pow(base, exp, p)


@dataclass(frozen=True)
class SafePrime:
    """A prime p = 2q + 1 with q an odd prime.

    q odd forces p = 3 (mod 4), hence -1 is a non-residue mod p and the set
    QR_p of quadratic residues is a group of prime order q on which the
    fold to Z_q below is a bijection. (This excludes p = 5, whose q = 2
    breaks the bijection.)
    """

    p: int
    q: int
    bit_len: int

    def __post_init__(self):
        if self.p != 2 * self.q + 1:
            raise ValueError(f"p = {self.p} is not 2*{self.q} + 1")
        if self.p >= DESK_PRIME_CAP:
            raise ValueError(f"p = {self.p} exceeds the desk-scale cap 2**48")
        if self.p % 4 != 3:
            raise ValueError(f"p = {self.p} is not 3 mod 4 (q must be odd)")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if not is_prime(self.q):
            raise ValueError(f"q = {self.q} is not prime")
        if self.p.bit_length() != self.bit_len:
            raise ValueError(
                f"bit_len {self.bit_len} does not match p ({self.p.bit_length()} bits)"
            )

    @classmethod
    def from_p(cls, p: int) -> "SafePrime":
        return cls(p=p, q=(p - 1) // 2, bit_len=p.bit_length())


def is_safe_prime(p: int) -> bool:
    """True iff p is prime and (p-1)/2 is an odd prime.

    The oddness requirement rejects p = 5 (q = 2), the one prime where the
    residue fold would not be injective.
    """
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    return p % 4 == 3 and is_prime(p) and is_prime((p - 1) // 2)


def gen_safe_prime(bit_len: int, rng: Random, max_tries: int = 200_000) -> SafePrime:
    """Sample a uniformly random safe prime with exactly `bit_len` bits.

    Deterministic for a fixed rng state. Raises PrimeSearchExhausted if no
    safe prime turns up within `max_tries` candidates (a sign the bit length
    admits none or nearly none).
    """
    if not 4 <= bit_len <= 48:
        raise ValueError(f"bit_len must be in [4, 48], got {bit_len}")
    for _ in range(max_tries):
        # Top bit set for exact width, low two bits 11 so p = 3 (mod 4).
        p = (1 << (bit_len - 1)) | (rng.getrandbits(bit_len - 3) << 2) | 3
        if is_safe_prime(p):
            return SafePrime.from_p(p)
    raise PrimeSearchExhausted(
        f"no {bit_len}-bit safe prime found in {max_tries} tries"
    )


def is_quadratic_residue(c: int, sp: SafePrime) -> bool:
    """Euler criterion: c is a square mod p iff c**q = 1 (mod p)."""
    if not 1 <= c < sp.p:
        raise ValueError(f"c must lie in [1, {sp.p}), got {c}")
    return pow(c, sp.q, sp.p) == 1


def find_qr_generator(sp: SafePrime, rng: Random) -> int:
    """Random generator of QR_p.

    Squares a random h in [2, p-2] and retries while the square is 1; since
    |QR_p| = q is prime, any element other than 1 generates the whole group.
    """
    while True:
        h = rng.randrange(2, sp.p - 1)
        g = h * h % sp.p
        if g != 1:
            return g


def qr_fold(x: int, sp: SafePrime, *, assume_qr: bool = False) -> int:
    """Fold a quadratic residue onto its canonical Z_q representative.

    Raw value is x itself when x <= q and p - x otherwise, which lands in
    {1, ..., q}; the raw value q is identified with 0 so the image is the
    canonical range [0, q). Restricted to QR_p this map is a bijection.

    `assume_qr` skips the residue check for callers that produce group
    elements structurally (e.g. powers of a generator).
    """
    if not assume_qr and not is_quadratic_residue(x, sp):
        raise ValueError(f"{x} is not a quadratic residue mod {sp.p}")
    raw = x if x <= sp.q else sp.p - x
    return raw % sp.q


def qr_unfold(y: int, sp: SafePrime) -> int:
    """Inverse of qr_fold: the unique quadratic residue folding to y."""
    if not 0 <= y < sp.q:
        raise ValueError(f"y must lie in [0, {sp.q}), got {y}")
    raw = y if y != 0 else sp.q
    if pow(raw, sp.q, sp.p) == 1:
        return raw
    return sp.p - raw


@lru_cache(maxsize=64)
def _baby_steps(p: int, g: int, m: int) -> dict:
    """Table {g**j mod p: j} for j in [0, m). Cached per (p, g, m)."""
    table: dict[int, int] = {}
    acc = 1
    for j in range(m):
        table[acc] = j
        acc = acc * g % p
    return table


def discrete_log(g: int, y: int, sp: SafePrime) -> int:
    """The unique e in [0, q) with g**e = y (mod p), for g a generator of QR_p.

    Baby-step giant-step: O(sqrt(q)) time and memory. Raises NotInSubgroup
    when no exponent exists, which signals y outside <g>.
    """
    p, q = sp.p, sp.q
    if q >= BSGS_ORDER_CAP:
        raise ValueError(f"subgroup order {q} exceeds the BSGS cap 2**40")
    if not 1 <= g < p or not 1 <= y < p:
        raise ValueError("g and y must lie in [1, p)")
    m = math.isqrt(q - 1) + 1
    table = _baby_steps(p, g, m)
    # g has order q on QR_p, so g**-m = g**(q - m mod q).
    factor = pow(g, (q - m % q) % q, p)
    cur = y
    for i in range(m):
        j = table.get(cur)
        if j is not None:
            return (i * m + j) % q
        cur = cur * factor % p
    raise NotInSubgroup(f"{y} is not in the subgroup generated by {g} mod {p}")
