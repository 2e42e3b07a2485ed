#!/usr/bin/env python3
"""Walk one tiny keyed chain forward and then invert it step by step.

Everything here is small enough to check by hand: p = 11, so the residue
group QR_11 = {1, 3, 4, 5, 9} has prime order q = 5, and the fold maps it
onto Z_5 = {0, 1, 2, 3, 4}.
"""

from random import Random

from prfdist import (
    Instance,
    SafePrime,
    SecretKey,
    chain_step,
    discrete_log,
    invert_chain_step,
    prf_eval,
    qr_fold,
    qr_unfold,
)

sp = SafePrime.from_p(11)
print(f"safe prime p = {sp.p} = 2*{sp.q} + 1")

residues = sorted({x * x % sp.p for x in range(1, sp.p)})
print(f"QR_{sp.p} = {residues}")
print(f"fold:   {[qr_fold(x, sp) for x in residues]}  (raw q folds to 0)")
print(f"unfold: {[qr_unfold(y, sp) for y in range(sp.q)]}")

# g = 3 generates QR_11; the public instance hides a = 2 behind ga = 9.
inst = Instance(sp=sp, g=3, ga=9, n_in=4)
key = SecretKey(k=2, q=sp.q)
x = "1011"

print(f"\ninstance (p, g, ga) = ({inst.p}, {inst.g}, {inst.ga}), input x = {x}")
b = key.k
trace = [b]
for ch in x:
    b = chain_step(inst, int(ch), b)
    trace.append(b)
print(f"forward chain from k = {key.k}: {' -> '.join(map(str, trace))}")
assert b == prf_eval(inst, key, x)

# Inversion: each step is a bijection on Z_q, undone by one discrete log.
back = trace[-1]
for ch in reversed(x):
    back = invert_chain_step(inst, int(ch), back)
print(f"inverted chain recovers b_0 = {back} (true key {key.k})")
assert back == key.k

e = discrete_log(inst.g, inst.ga, sp)
print(f"for scale: discrete_log(g, ga) = {e}, the secret exponent")

rng = Random(0)
print("\nthe same inversion at 20-bit scale:")
from prfdist import instance_gen, sample_key

si = instance_gen(20, 16, rng)
k20 = sample_key(si.instance, rng)
y = prf_eval(si.instance, k20, "1100101001110001")
b = y
for ch in reversed("1100101001110001"):
    b = invert_chain_step(si.instance, int(ch), b)
print(f"p = {si.instance.p}: recovered key {b}, true key {k20.k}")
