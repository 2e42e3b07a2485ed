import pytest

from prfdist.numtheory import SafePrime
from prfdist.prf import Instance, SecretInstance, SecretKey


def sieve_primes(limit: int) -> list:
    """Independent primality oracle: plain sieve of Eratosthenes."""
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i:: i] = bytearray(len(flags[i * i:: i]))
    return [i for i in range(limit + 1) if flags[i]]


def sieve_safe_primes(limit: int) -> list:
    """All p < limit with p and (p-1)/2 prime and (p-1)/2 odd."""
    primes = set(sieve_primes(limit))
    return [
        p for p in sorted(primes)
        if p % 4 == 3 and (p - 1) // 2 in primes and (p - 1) // 2 % 2 == 1
    ]


def qr_set(p: int) -> set:
    """Brute-force quadratic residues: enumerate all squares mod p."""
    return {x * x % p for x in range(1, p)}


@pytest.fixture
def sp11() -> SafePrime:
    return SafePrime.from_p(11)


@pytest.fixture
def sp7() -> SafePrime:
    return SafePrime.from_p(7)


@pytest.fixture
def inst11(sp11) -> Instance:
    # g = 3 generates QR_11 = {1, 3, 4, 5, 9}; ga = 3**2 = 9.
    return Instance(sp=sp11, g=3, ga=9, n_in=2)


@pytest.fixture
def secret11(inst11) -> SecretInstance:
    return SecretInstance(instance=inst11, a=2)


@pytest.fixture
def key2() -> SecretKey:
    return SecretKey(k=2, q=5)


class StubRandom:
    """Deterministic stand-in feeding scripted values to rng consumers."""

    def __init__(self, bits=(), randranges=(), randoms=()):
        self._bits = list(bits)
        self._randranges = list(randranges)
        self._randoms = list(randoms)

    def getrandbits(self, _k):
        return self._bits.pop(0)

    def randrange(self, *args):
        return self._randranges.pop(0)

    def random(self):
        return self._randoms.pop(0)
