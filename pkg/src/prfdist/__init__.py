"""prfdist: density-evaluator learning on keyed safe-prime function families.

Library layout:

- numtheory: primality, safe primes, the QR_p <-> Z_q fold, discrete logs
- prf:       the keyed evaluation chain and its step-by-step inversion
- distlearn: induced distributions, oracles, TV machinery, reductions
- learners:  single-sample key recovery and the classical baselines
- exam:      inference exams, pass-rate and distinguisher statistics
- verify:    exact brute-force verification suites
- cli:       seeded experiment driver (`prfdist` console script)
"""

from .numtheory import (
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
from .prf import (
    Instance,
    SecretInstance,
    SecretKey,
    chain_step,
    instance_gen,
    invert_chain_step,
    prf_eval,
    prf_eval_batch,
    prf_graph,
    sample_key,
)
from .distlearn import (
    BudgetExceeded,
    Evaluator,
    FiniteFunction,
    Generator,
    InducedSpec,
    LearnerConfig,
    argmax_hypothesis,
    eval_to_function_learner,
    function_loss,
    function_to_eval_learner,
    induced_dense,
    induced_eval,
    induced_generator,
    mq_oracle,
    rex_oracle,
    tv_against_induced,
    tv_distance,
)
from .learners import (
    LearnedModel,
    SampleRecord,
    draw_param_sample,
    exact_evaluator_from_key,
    histogram_learner,
    key_recovery_learner,
    model_tv_to_target,
    uniform_baseline,
)
from .exam import (
    ExamPair,
    ExamStrategyConfig,
    ExamTranscript,
    administer_exam,
    check_threshold_counts,
    estimate_distinguishing_advantage,
    estimate_pass_rate,
    exam_taker_from_learner,
    threshold_strategy,
)

__version__ = "0.1.0"
