#!/usr/bin/env python3
"""Induced distributions and the function/evaluator learning dictionary.

Demonstrates, on dense rational vectors:
  * disagreement probability of two functions == TV of their induced
    distributions (exactly),
  * the argmax hypothesis from an evaluator is never worse than any
    candidate function,
  * the two reduction wrappers and their error bounds.
"""

from fractions import Fraction
from random import Random

from prfdist import (
    Evaluator,
    FiniteFunction,
    InducedSpec,
    LearnerConfig,
    argmax_hypothesis,
    eval_to_function_learner,
    function_loss,
    function_to_eval_learner,
    induced_dense,
    tv_distance,
)
from prfdist.distlearn import perturb_within_tv
from prfdist.verify import random_rational_distribution

rng = Random(42)
n, m = 4, 2

f = FiniteFunction.random(n, m, rng)
h = FiniteFunction.random(n, m, rng)
p_input = random_rational_distribution(1 << n, rng)

loss = function_loss(f, h, p_input)
tv = tv_distance(
    induced_dense(InducedSpec(f=f, p_input=p_input)),
    induced_dense(InducedSpec(f=h, p_input=p_input)),
)
print(f"Pr[f != h] = {loss} and TV of induced distributions = {tv}")
assert loss == tv

# Corrupt the exact evaluator by a known TV budget, then take its argmax.
epsilon = Fraction(1, 10)
spec = InducedSpec(f=f, p_input=p_input)
target = induced_dense(spec)
corrupted = perturb_within_tv(target, epsilon, rng, exact=True)
print(f"\ncorrupted evaluator sits at TV {tv_distance(corrupted, target)} from the target")

h_star = argmax_hypothesis(Evaluator.from_dense(n, m, corrupted), n, m)
print(f"argmax hypothesis loss = {function_loss(f, h_star, p_input)}"
      f" (bound for eta=0: 2*eps = {2 * epsilon})")

# The same things through the reduction wrappers, now with label noise.
eta = Fraction(1, 10)
noisy_spec = InducedSpec(f=f, p_input=p_input, eta=eta)
cfg = LearnerConfig(epsilon=epsilon, delta=Fraction(1, 20), sample_budget=64)

noisy_target = induced_dense(noisy_spec)
noisy_corrupted = perturb_within_tv(noisy_target, epsilon, rng, exact=True)
h_red = eval_to_function_learner(
    lambda draw, _c, _r: (draw(), Evaluator.from_dense(n, m, noisy_corrupted))[1],
    noisy_spec, cfg, rng)
print(f"\nevaluator->function wrapper: loss {function_loss(f, h_red, p_input)}"
      f" <= 2*(eta+eps) = {2 * (eta + epsilon)}")

# A hypothesis wrong on exactly one input of mass p_input[0].
table = list(f.table)
table[0] ^= 1
h_close = FiniteFunction(n=n, m=m, table=tuple(table))
small_loss = function_loss(f, h_close, p_input)
ev = function_to_eval_learner(lambda query, _c, _r: (query(), h_close)[1],
                              noisy_spec, cfg, rng)
print(f"function->evaluator wrapper: TV {tv_distance(ev.to_dense(), noisy_target)}"
      f" <= eta + loss = {eta + small_loss}")
