#!/usr/bin/env python3
"""Inference exams and distinguishing advantage.

After random-example-only training, an examinee sees two candidate outputs
for a fresh input (one genuine, one uniformly random) and must say which is
which. Learners that produce good evaluators convert accuracy into pass
rate through a fixed two-threshold rule; learners that learned nothing stay
at a coin flip.
"""

from fractions import Fraction
from random import Random

from prfdist import (
    ExamStrategyConfig,
    estimate_distinguishing_advantage,
    estimate_pass_rate,
    exam_taker_from_learner,
    instance_gen,
    key_recovery_learner,
    prf_eval,
    uniform_baseline,
)
from prfdist.exam import LearnerExamTaker
from prfdist.learners import SampleRecord

BITS, N = 16, 8
cfg = ExamStrategyConfig(epsilon=Fraction(1, 10), n=N)
sampler = lambda r: instance_gen(BITS, N, r)

print(f"exam thresholds at n={N}, eps=1/10: genuine >= {cfg.genuine_threshold}, "
      f"spurious <= {cfg.spurious_threshold}\n")

kr_factory = exam_taker_from_learner(
    lambda samples, rng: key_recovery_learner(samples[0]), cfg, training_samples=1)
report = estimate_pass_rate(kr_factory, sampler, trials=500, rng=Random(1))
print(f"key-recovery examinee: {report.passes}/{report.trials} passed, "
      f"99% CI [{report.ci_low:.3f}, {report.ci_high:.3f}]")
print(f"  clears 1/2 + 1/n = {report.q_threshold}: {report.meets_q_inference}")


def uniform_factory(instance, rng):
    model = uniform_baseline(instance.n_in, instance.n_in)
    return LearnerExamTaker(lambda s, r: model, cfg, training_samples=0, rng=rng)


report = estimate_pass_rate(uniform_factory, sampler, trials=500, rng=Random(2))
print(f"\nuniform examinee: {report.passes}/{report.trials} passed, "
      f"99% CI [{report.ci_low:.3f}, {report.ci_high:.3f}] (a coin flip)")


# Distinguishing games: the same key recovery makes a perfect distinguisher
# once chosen inputs are allowed.
def recover_and_verify(inst, oracle, rng):
    x0 = "0" * inst.n_in
    _, y0 = oracle.query(x0)
    from prfdist import SecretKey

    model = key_recovery_learner(SampleRecord(x=x0, y=y0, p=inst.p, g=inst.g, ga=inst.ga))
    key = SecretKey(k=model.payload["k"], q=inst.q)
    for probe in (1, 2):
        x = format(probe, f"0{inst.n_in}b")
        _, y = oracle.query(x)
        if prf_eval(inst, key, x) != y:
            return 0
    return 1


adv = estimate_distinguishing_advantage(recover_and_verify, "MQ", 14, 6,
                                        trials=300, rng=Random(3))
print(f"\nchosen-input key-recovery distinguisher: advantage {adv.advantage:.3f} "
      f"(keyed {adv.p_keyed:.2f} vs random {adv.p_random:.2f}), "
      f"significant: {adv.significant}")

constant = lambda inst, oracle, rng: 1
adv = estimate_distinguishing_advantage(constant, "REX", 14, 6,
                                        trials=300, rng=Random(4))
print(f"constant distinguisher: advantage {adv.advantage:.3f}, "
      f"significant: {adv.significant}")
