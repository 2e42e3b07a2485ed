"""Keyed function family on safe-prime quadratic-residue groups.

A public instance is a tuple (p, g, g^a) with p = 2q + 1 a safe prime, g a
generator of QR_p and a secret exponent a. Evaluation chains one folded
exponentiation per input bit, starting from the secret key:

    b_0 = k,   b_j = fold(g^(b_{j-1}))   if bit j is 0,
               b_j = fold((g^a)^(b_{j-1}))  if bit j is 1,

with the leftmost input bit consumed first and the final b_n returned.
Every step is a bijection on Z_q, so the chain can be inverted step by step
with discrete logarithms; that inversion is what the key-recovery learner
exploits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from random import Random

import numpy as np

from .bitstrings import validate_bits
from .numtheory import (
    SafePrime,
    discrete_log,
    find_qr_generator,
    gen_safe_prime,
    is_quadratic_residue,
    qr_fold,
    qr_unfold,
)

# numpy fast paths multiply two residues in int64; products must not overflow.
_VECTOR_PRIME_CAP = 1 << 31


@dataclass(frozen=True)
class Instance:
    """Public parameters (p, g, g^a) plus the input bit-length.

    n_in = 0 is permitted as a degenerate case (the empty chain is the
    identity on keys); generated instances always have n_in >= 1.
    """

    sp: SafePrime
    g: int
    ga: int
    n_in: int

    def __post_init__(self):
        for name, val in (("g", self.g), ("ga", self.ga)):
            if val == 1 or not is_quadratic_residue(val, self.sp):
                raise ValueError(f"{name} = {val} is not a non-identity element of QR_p")
        if self.n_in < 0:
            raise ValueError(f"n_in must be nonnegative, got {self.n_in}")

    @property
    def p(self) -> int:
        return self.sp.p

    @property
    def q(self) -> int:
        return self.sp.q


@dataclass(frozen=True)
class SecretInstance:
    """An Instance together with the exponent a such that ga = g^a."""

    instance: Instance
    a: int

    def __post_init__(self):
        q = self.instance.q
        if not 1 <= self.a < q:
            raise ValueError(f"a must lie in [1, {q}), got {self.a}")
        if pow(self.instance.g, self.a, self.instance.p) != self.instance.ga:
            raise ValueError("ga does not equal g**a mod p")


@dataclass(frozen=True)
class SecretKey:
    """Key k in Z_q, carried with its modulus."""

    k: int
    q: int

    def __post_init__(self):
        if not 0 <= self.k < self.q:
            raise ValueError(f"k must lie in [0, {self.q}), got {self.k}")


def instance_gen(bit_len: int, n_in: int, rng: Random) -> SecretInstance:
    """Sample a fresh instance: safe prime, QR generator, secret exponent.

    a is drawn from {1, ..., q-1}; a = 0 would make ga = 1 and the 1-branch
    non-invertible.
    """
    if not 4 <= bit_len <= 40:
        raise ValueError(f"bit_len must be in [4, 40], got {bit_len}")
    if n_in < 1:
        raise ValueError(f"n_in must be >= 1, got {n_in}")
    sp = gen_safe_prime(bit_len, rng)
    g = find_qr_generator(sp, rng)
    a = rng.randrange(1, sp.q)
    ga = pow(g, a, sp.p)
    return SecretInstance(Instance(sp=sp, g=g, ga=ga, n_in=n_in), a=a)


def sample_key(instance: Instance, rng: Random) -> SecretKey:
    """Uniform key over Z_q."""
    return SecretKey(k=rng.randrange(instance.q), q=instance.q)


def chain_step(instance: Instance, branch: int, b: int) -> int:
    """One chain step: fold(g^b) on branch 0, fold((g^a)^b) on branch 1."""
    if branch not in (0, 1):
        raise ValueError(f"branch must be 0 or 1, got {branch}")
    if not 0 <= b < instance.q:
        raise ValueError(f"b must lie in [0, {instance.q}), got {b}")
    base = instance.g if branch == 0 else instance.ga
    return qr_fold(pow(base, b, instance.p), instance.sp, assume_qr=True)


def invert_chain_step(instance: Instance, branch: int, b_next: int) -> int:
    """Inverse of chain_step: unfold then take the discrete log to the base.

    Satisfies chain_step(instance, branch, invert_chain_step(instance,
    branch, v)) == v for every v in Z_q (each step is a bijection).
    """
    if branch not in (0, 1):
        raise ValueError(f"branch must be 0 or 1, got {branch}")
    c = qr_unfold(b_next, instance.sp)
    base = instance.g if branch == 0 else instance.ga
    return discrete_log(base, c, instance.sp)


def prf_eval(instance: Instance, key: SecretKey, x: str) -> int:
    """Evaluate the chained function on an n_in-bit input string."""
    if key.q != instance.q:
        raise ValueError("key modulus does not match the instance")
    if len(x) != instance.n_in:
        raise ValueError(f"input must have {instance.n_in} bits, got {len(x)}")
    validate_bits(x)
    b = key.k
    for ch in x:
        b = chain_step(instance, int(ch), b)
    return b


# ---------------------------------------------------------------------------
# Vectorized evaluation (int64 fast path for p < 2**31)
# ---------------------------------------------------------------------------

def modexp_vec(base: int, exps: np.ndarray, p: int) -> np.ndarray:
    """Elementwise base**exps mod p for an int64 exponent array."""
    exps = np.asarray(exps, dtype=np.int64)
    if p >= _VECTOR_PRIME_CAP:
        return np.array([pow(base, int(e), p) for e in exps], dtype=np.int64)
    res = np.ones(exps.shape, dtype=np.int64)
    cur = base % p
    maxbits = int(exps.max()).bit_length() if exps.size else 0
    for i in range(maxbits):
        mask = ((exps >> i) & 1).astype(bool)
        if mask.any():
            res[mask] = res[mask] * cur % p
        cur = cur * cur % p
    return res


def _fold_vec(xs: np.ndarray, p: int, q: int) -> np.ndarray:
    return np.where(xs <= q, xs, p - xs) % q


def prf_graph(instance: Instance, key: SecretKey) -> np.ndarray:
    """All 2**n_in outputs, indexed by the integer value of the input.

    Walks the prefix tree level by level so each chain value is computed
    once, instead of re-running full chains per input.
    """
    p, q, n = instance.p, instance.q, instance.n_in
    if key.q != q:
        raise ValueError("key modulus does not match the instance")
    values = np.array([key.k], dtype=np.int64)
    for _ in range(n):
        children = np.empty(2 * values.size, dtype=np.int64)
        children[0::2] = _fold_vec(modexp_vec(instance.g, values, p), p, q)
        children[1::2] = _fold_vec(modexp_vec(instance.ga, values, p), p, q)
        values = children
    return values


def prf_eval_batch(instance: Instance, key: SecretKey, xs: np.ndarray) -> np.ndarray:
    """Evaluate many inputs given as integers; same values as prf_eval."""
    p, q, n = instance.p, instance.q, instance.n_in
    if key.q != q:
        raise ValueError("key modulus does not match the instance")
    xs = np.asarray(xs, dtype=np.int64)
    if xs.size and (xs.min() < 0 or xs.max() >= (1 << n)):
        raise ValueError("inputs out of range for n_in")
    values = np.full(xs.shape, key.k, dtype=np.int64)
    for j in range(n):
        bit = (xs >> (n - 1 - j)) & 1
        for branch, base in ((0, instance.g), (1, instance.ga)):
            idx = np.nonzero(bit == branch)[0]
            if idx.size:
                values[idx] = _fold_vec(modexp_vec(base, values[idx], p), p, q)
    return values


# ---------------------------------------------------------------------------
# Serialization (decimal integers in JSON objects)
# ---------------------------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict:
    return {
        "p": instance.p,
        "q": instance.q,
        "g": instance.g,
        "ga": instance.ga,
        "n_in": instance.n_in,
    }


def instance_from_dict(d: dict) -> Instance:
    sp = SafePrime(p=int(d["p"]), q=int(d["q"]), bit_len=int(d["p"]).bit_length())
    return Instance(sp=sp, g=int(d["g"]), ga=int(d["ga"]), n_in=int(d["n_in"]))


def secret_instance_to_dict(si: SecretInstance) -> dict:
    """Serialization of the secret side; only ever written to secret files."""
    d = instance_to_dict(si.instance)
    d["a"] = si.a
    return d


def secret_instance_from_dict(d: dict) -> SecretInstance:
    return SecretInstance(instance=instance_from_dict(d), a=int(d["a"]))


def instance_to_json(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), sort_keys=True)


def instance_from_json(s: str) -> Instance:
    return instance_from_dict(json.loads(s))
