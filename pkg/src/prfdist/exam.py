"""Inference exams, pass-rate statistics, and distinguisher harnesses.

The exam: after a training phase with random examples only, the examinee is
shown two candidate outputs for one fresh random input - the true chain
value and a uniformly random wrong value, in random order - and must say
which is which. The two-threshold strategy decides from an evaluator's
masses alone; with an evaluator within TV epsilon < 1/9 of the target its
conditional pass probability is at least 5/8.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable

from scipy.stats import norm

from .bitstrings import int_to_bits, validate_bits
from .distlearn import BudgetExceeded, Evaluator, InducedSpec, tv_distance, induced_dense
from .learners import LearnedModel, SampleRecord, draw_param_sample
from .prf import Instance, SecretInstance, SecretKey, instance_gen, prf_eval, sample_key

Z_99 = float(norm.ppf(0.995))  # two-sided 99% confidence


def wilson_interval(successes: int, trials: int, z: float = Z_99) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * ((phat * (1 - phat) / trials + z * z / (4 * trials * trials)) ** 0.5) / denom
    return (max(0.0, center - half), min(1.0, center + half))


# ---------------------------------------------------------------------------
# Exam data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExamPair:
    x_prime: str
    candidate: int
    position: int

    def __post_init__(self):
        validate_bits(self.x_prime)
        if self.position not in (1, 2):
            raise ValueError("position must be 1 or 2")
        if self.candidate < 0:
            raise ValueError("candidate must be nonnegative")


@dataclass(frozen=True)
class ExamTranscript:
    training_queries: int
    pairs: tuple
    guess: int
    truth: int
    passed: bool

    def __post_init__(self):
        if self.guess not in (1, 2) or self.truth not in (1, 2):
            raise ValueError("guess and truth must be 1 or 2")
        if self.passed != (self.guess == self.truth):
            raise ValueError("passed flag inconsistent with guess/truth")
        p1, p2 = self.pairs
        if p1.x_prime != p2.x_prime:
            raise ValueError("exam pairs must share x_prime")
        if p1.candidate == p2.candidate:
            raise ValueError("exam pairs must carry distinct candidates")


@dataclass(frozen=True)
class ExamStrategyConfig:
    """Promised evaluator accuracy and input bit-length for the strategy.

    epsilon < 1/9 and n >= 3 together make the two decision thresholds
    mutually exclusive (the genuine-looking threshold epsilon/2**n strictly
    exceeds the spurious-looking one 4*epsilon/(2**2n - 2**n)).
    """

    epsilon: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if not 0 < self.epsilon < Fraction(1, 9):
            raise ValueError(f"epsilon must lie in (0, 1/9), got {self.epsilon}")
        if self.n < 3:
            raise ValueError("strategy needs n >= 3")

    @property
    def genuine_threshold(self) -> Fraction:
        return self.epsilon / (1 << self.n)

    @property
    def spurious_threshold(self) -> Fraction:
        return 4 * self.epsilon / ((1 << (2 * self.n)) - (1 << self.n))


@dataclass(frozen=True)
class StrategyDecision:
    index: int
    threshold_fired: bool


def threshold_strategy(eval_mass: Callable[[str, int], Fraction],
                       cfg: ExamStrategyConfig,
                       pair1: ExamPair, pair2: ExamPair,
                       rng: Random) -> StrategyDecision:
    """Two-threshold exam strategy over an evaluator's record masses.

    Pick the pair whose mass clears the genuine threshold while the other
    falls below the spurious threshold; if neither side is conclusive,
    guess a fair random index.
    """
    p1 = eval_mass(pair1.x_prime, pair1.candidate)
    p2 = eval_mass(pair2.x_prime, pair2.candidate)
    hi, lo = cfg.genuine_threshold, cfg.spurious_threshold
    if p1 >= hi and p2 <= lo:
        return StrategyDecision(index=1, threshold_fired=True)
    if p2 >= hi and p1 <= lo:
        return StrategyDecision(index=2, threshold_fired=True)
    return StrategyDecision(index=rng.randrange(1, 3), threshold_fired=False)


# ---------------------------------------------------------------------------
# Exam administration
# ---------------------------------------------------------------------------

def administer_exam(si: SecretInstance, key: SecretKey, examinee,
                    rng: Random, training_budget: int = 10_000) -> ExamTranscript:
    """Run one full exam against a fresh (instance, key).

    The training phase answers the examinee's draws with parameter-appended
    samples, up to `training_budget`; overrunning the budget is recorded as
    a failed exam. The exam itself presents the true chain value on a fresh
    uniform input next to a uniformly random wrong value, in random order.
    """
    inst = si.instance
    used = 0

    def draw() -> SampleRecord:
        nonlocal used
        if used >= training_budget:
            raise BudgetExceeded(f"training budget {training_budget} exhausted")
        used += 1
        return draw_param_sample(si, key, rng)

    overran = False
    try:
        examinee.train(draw)
    except BudgetExceeded:
        overran = True

    x_prime = int_to_bits(rng.getrandbits(inst.n_in), inst.n_in)
    f1 = prf_eval(inst, key, x_prime)
    wrong = rng.randrange(inst.q - 1)
    f2 = wrong if wrong < f1 else wrong + 1
    truth = rng.randrange(1, 3)
    if truth == 1:
        pair1 = ExamPair(x_prime=x_prime, candidate=f1, position=1)
        pair2 = ExamPair(x_prime=x_prime, candidate=f2, position=2)
    else:
        pair1 = ExamPair(x_prime=x_prime, candidate=f2, position=1)
        pair2 = ExamPair(x_prime=x_prime, candidate=f1, position=2)

    if overran:
        guess = 3 - truth  # budget overrun counts as a wrong guess
    else:
        guess = examinee.guess(pair1, pair2, rng)
        if guess not in (1, 2):
            raise ValueError(f"examinee guess must be 1 or 2, got {guess}")
    return ExamTranscript(
        training_queries=used,
        pairs=(pair1, pair2),
        guess=guess,
        truth=truth,
        passed=guess == truth,
    )


class LearnerExamTaker:
    """Examinee wrapping a sample-batch learner plus the threshold strategy.

    `learner(samples, rng) -> LearnedModel` is fed `training_samples` draws
    during training; the guess phase queries the model's record masses. If
    the learner raises, the failure is recorded and the strategy runs on an
    all-zero evaluator (both thresholds silent, so guesses become random).
    """

    def __init__(self, learner, cfg: ExamStrategyConfig, training_samples: int,
                 rng: Random | None = None):
        self.learner = learner
        self.cfg = cfg
        self.training_samples = training_samples
        self._rng = rng
        self.model: LearnedModel | None = None
        self.learner_error: Exception | None = None
        self.threshold_decisions = 0
        self.random_decisions = 0

    def train(self, draw) -> None:
        samples = [draw() for _ in range(self.training_samples)]
        try:
            self.model = self.learner(samples, self._rng)
        except BudgetExceeded:
            raise
        except Exception as exc:  # recorded; the exam still runs
            self.learner_error = exc
            self.model = None

    def _mass(self, x: str, y: int) -> Fraction:
        if self.model is None:
            return Fraction(0)
        return self.model.record_mass(x, y)

    def guess(self, pair1: ExamPair, pair2: ExamPair, rng: Random) -> int:
        decision = threshold_strategy(self._mass, self.cfg, pair1, pair2, rng)
        if decision.threshold_fired:
            self.threshold_decisions += 1
        else:
            self.random_decisions += 1
        return decision.index


class EvaluatorExamTaker:
    """Examinee built directly from a record-mass function (no training)."""

    def __init__(self, eval_mass: Callable[[str, int], Fraction], cfg: ExamStrategyConfig):
        self.eval_mass = eval_mass
        self.cfg = cfg
        self.threshold_decisions = 0
        self.random_decisions = 0

    def train(self, draw) -> None:
        return None

    def guess(self, pair1: ExamPair, pair2: ExamPair, rng: Random) -> int:
        decision = threshold_strategy(self.eval_mass, self.cfg, pair1, pair2, rng)
        if decision.threshold_fired:
            self.threshold_decisions += 1
        else:
            self.random_decisions += 1
        return decision.index


def exam_taker_from_learner(learner, cfg: ExamStrategyConfig,
                            training_samples: int = 1) -> Callable:
    """Factory of examinees: fresh learner-backed taker per (instance, rng)."""

    def factory(instance: Instance, rng: Random) -> LearnerExamTaker:
        del instance  # learners read parameters off the samples themselves
        return LearnerExamTaker(learner, cfg, training_samples, rng)

    return factory


# ---------------------------------------------------------------------------
# Pass-rate estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExamReport:
    trials: int
    passes: int
    rate: float
    ci_low: float
    ci_high: float
    q_poly: str
    q_threshold: float
    meets_q_inference: bool
    n: int = 0

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "passes": self.passes,
            "rate": self.rate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "q_poly": self.q_poly,
            "q_threshold": self.q_threshold,
            "meets_q_inference": self.meets_q_inference,
        }


def estimate_pass_rate(examinee_factory, instance_sampler, trials: int,
                       rng: Random, q_poly: tuple = ("n", lambda n: n),
                       training_budget: int = 10_000) -> ExamReport:
    """Pass fraction over fresh (instance, key, seed) triples, with a Wilson
    99% interval and the comparison against 1/2 + 1/Q(n).

    Meeting the bar means the interval's lower end clears the threshold, so
    a conclusion is only drawn when the data supports it at the configured
    confidence.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    q_name, q_fn = q_poly
    seeds = [rng.getrandbits(64) for _ in range(trials)]
    passes = 0
    n_in = None
    for seed in seeds:
        trial_rng = Random(seed)
        si = instance_sampler(trial_rng)
        if n_in is None:
            n_in = si.instance.n_in
        elif n_in != si.instance.n_in:
            raise ValueError("instance sampler changed n_in between trials")
        key = sample_key(si.instance, trial_rng)
        examinee = examinee_factory(si.instance, trial_rng)
        transcript = administer_exam(si, key, examinee, trial_rng,
                                     training_budget=training_budget)
        passes += transcript.passed
    low, high = wilson_interval(passes, trials)
    threshold = 0.5 + 1.0 / q_fn(n_in)
    return ExamReport(
        trials=trials,
        passes=passes,
        rate=passes / trials,
        ci_low=low,
        ci_high=high,
        q_poly=q_name,
        q_threshold=threshold,
        meets_q_inference=low > threshold,
        n=n_in,
    )


# ---------------------------------------------------------------------------
# Counting bounds behind the strategy's thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdCountReport:
    n: int
    epsilon: Fraction
    measured_tv: Fraction
    diag_count: int
    diag_required: int
    offdiag_count: int
    offdiag_required: int

    @property
    def passed(self) -> bool:
        return (self.diag_count >= self.diag_required
                and self.offdiag_count >= self.offdiag_required)


def check_threshold_counts(f, ev: Evaluator, epsilon, n: int) -> ThresholdCountReport:
    """Count how much of the space respects the two strategy thresholds.

    For an evaluator within TV epsilon < 1/9 of the noiseless uniform-input
    target: at least 3/4 of inputs x must keep mass >= epsilon/2**n on their
    graph record x||f(x), and at least half of the off-graph records must
    stay below 4*epsilon/(2**2n - 2**n). The evaluator's distance is
    measured first; violating the promise is an error, not a failed count.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < Fraction(1, 9):
        raise ValueError("epsilon must lie in (0, 1/9)")
    if n > 8:
        raise ValueError("dense enumeration capped at n <= 8")
    if f.n != n or f.m != n:
        raise ValueError("counting bounds assume n input and n output bits")
    spec = InducedSpec(f=f)
    target = induced_dense(spec)
    measured = tv_distance(ev.to_dense(), target)
    if measured > epsilon:
        raise ValueError(
            f"evaluator is at TV {measured} from the target, beyond the promised {epsilon}"
        )
    cfg = ExamStrategyConfig(epsilon=epsilon, n=n)
    hi, lo = cfg.genuine_threshold, cfg.spurious_threshold
    diag = 0
    offdiag = 0
    for x in range(1 << n):
        x_bits = int_to_bits(x, n)
        fx = f(x)
        for y in range(1 << n):
            mass = ev.query(x_bits + int_to_bits(y, n))
            if y == fx:
                diag += mass >= hi
            else:
                offdiag += mass <= lo
    return ThresholdCountReport(
        n=n,
        epsilon=epsilon,
        measured_tv=Fraction(measured),
        diag_count=diag,
        diag_required=(3 * (1 << n)) // 4,
        offdiag_count=offdiag,
        offdiag_required=((1 << (2 * n)) - (1 << n)) // 2,
    )


# ---------------------------------------------------------------------------
# Distinguishing-advantage harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdvantageReport:
    mode: str
    trials: int
    p_keyed: float
    p_random: float
    advantage: float
    ci_low: float
    ci_high: float

    @property
    def significant(self) -> bool:
        """The 99% interval for the advantage excludes zero."""
        return self.ci_low > 0


class _TrialOracle:
    """Per-trial oracle: either the keyed chain or a lazily sampled uniform
    random function into Z_q (memoized, so repeat queries agree)."""

    def __init__(self, mode: str, instance: Instance, value_fn, rng: Random,
                 budget: int):
        self.mode = mode
        self.instance = instance
        self._value_fn = value_fn
        self._rng = rng
        self.budget = budget
        self.calls = 0

    def _value(self, x_bits: str) -> int:
        if self.calls >= self.budget:
            raise BudgetExceeded(f"oracle budget {self.budget} exhausted")
        self.calls += 1
        return self._value_fn(x_bits)

    def query(self, x_bits: str | None = None):
        if self.mode == "MQ":
            if x_bits is None:
                raise ValueError("chosen-input mode needs an input")
            validate_bits(x_bits, self.instance.n_in)
            return (x_bits, self._value(x_bits))
        if x_bits is not None:
            raise ValueError("random-example mode does not take an input")
        x = int_to_bits(self._rng.getrandbits(self.instance.n_in), self.instance.n_in)
        return (x, self._value(x))


def estimate_distinguishing_advantage(distinguisher, mode: str, bit_len: int,
                                      n_in: int, trials: int, rng: Random,
                                      query_budget: int = 4096) -> AdvantageReport:
    """Monte Carlo estimate of |Pr[out=1 | keyed] - Pr[out=1 | random]|.

    Per trial a fresh instance is generated and a fair coin picks the keyed
    chain (fresh key) or a lazy uniform random function on the same domain
    and range; the distinguisher sees the public instance plus the oracle in
    the requested mode ("MQ" chosen inputs, "REX" random examples only).
    """
    if mode not in ("MQ", "REX"):
        raise ValueError("mode must be 'MQ' or 'REX'")
    if trials < 100:
        raise ValueError("need at least 100 trials")
    seeds = [rng.getrandbits(64) for _ in range(trials)]
    ones = {True: 0, False: 0}
    totals = {True: 0, False: 0}
    for seed in seeds:
        trial_rng = Random(seed)
        si = instance_gen(bit_len, n_in, trial_rng)
        inst = si.instance
        keyed = bool(trial_rng.getrandbits(1))
        if keyed:
            key = sample_key(inst, trial_rng)
            value_fn = lambda x_bits, _i=inst, _k=key: prf_eval(_i, _k, x_bits)
        else:
            memo: dict = {}
            def value_fn(x_bits, _memo=memo, _q=inst.q, _r=trial_rng):
                if x_bits not in _memo:
                    _memo[x_bits] = _r.randrange(_q)
                return _memo[x_bits]
        oracle = _TrialOracle(mode, inst, value_fn, trial_rng, query_budget)
        out = distinguisher(inst, oracle, trial_rng)
        if out not in (0, 1):
            raise ValueError(f"distinguisher must output 0 or 1, got {out}")
        totals[keyed] += 1
        ones[keyed] += out
    p1 = ones[True] / max(1, totals[True])
    p0 = ones[False] / max(1, totals[False])
    advantage = abs(p1 - p0)
    se = (p1 * (1 - p1) / max(1, totals[True]) + p0 * (1 - p0) / max(1, totals[False])) ** 0.5
    low = max(0.0, advantage - Z_99 * se)
    high = min(1.0, advantage + Z_99 * se)
    return AdvantageReport(
        mode=mode,
        trials=trials,
        p_keyed=p1,
        p_random=p0,
        advantage=advantage,
        ci_low=low,
        ci_high=high,
    )
