"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. Every tolerance and case count is pinned here.
"""

import math
import time
from fractions import Fraction

from prfdist import cli
from prfdist.distlearn import (
    Evaluator,
    FiniteFunction,
    InducedSpec,
    LearnerConfig,
    eval_to_function_learner,
    function_loss,
    function_to_eval_learner,
    induced_dense,
    perturb_support_within_tv,
    perturb_within_tv,
    tv_against_induced,
    tv_distance,
)
from prfdist.exam import (
    EvaluatorExamTaker,
    ExamStrategyConfig,
    administer_exam,
    estimate_pass_rate,
    exam_taker_from_learner,
)
from prfdist.learners import (
    PrfFunctionView,
    draw_param_sample,
    exact_evaluator_from_key,
    histogram_learner,
    key_recovery_learner,
    model_tv_to_target,
    uniform_baseline,
)
from prfdist.numtheory import SafePrime, qr_fold, qr_unfold
from prfdist.prf import SecretKey, instance_gen, sample_key
from prfdist.seeding import derive_rng
from prfdist.verify import (
    run_argmax_optimality,
    run_loss_tv_equivalence,
    run_threshold_count_bounds,
    random_rational_distribution,
)

from conftest import sieve_safe_primes

SEED = 20240817


def report(tag: str, ok: bool, detail: str, elapsed: float) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{tag}] {detail} ({elapsed:.1f}s) {status}")
    assert ok, f"{tag}: {detail}"


def test_c01_loss_equals_induced_tv():
    # 200 random (f, h, P) with n <= 6, m <= 3, exact rational equality.
    start = time.perf_counter()
    result = run_loss_tv_equivalence(200, derive_rng(SEED, "c1"))
    elapsed = time.perf_counter() - start
    report("C1", result.failures == 0 and elapsed < 10,
           f"loss == induced TV on {result.cases - result.failures}/{result.cases} cases",
           elapsed)


def test_c02_argmax_optimality():
    # 50 random evaluators at n <= 3, m <= 2 against exhaustive enumeration.
    start = time.perf_counter()
    result = run_argmax_optimality(50, derive_rng(SEED, "c2"))
    elapsed = time.perf_counter() - start
    report("C2", result.failures == 0 and elapsed < 60,
           f"argmax minimal on {result.cases - result.failures}/{result.cases} evaluators",
           elapsed)


def test_c03_fold_bijectivity_all_safe_primes_below_2_14():
    start = time.perf_counter()
    primes = sieve_safe_primes(1 << 14)
    failures = 0
    for p in primes:
        sp = SafePrime.from_p(p)
        residues = {x * x % p for x in range(1, p)}
        images = set()
        for x in residues:
            y = qr_fold(x, sp)
            images.add(y)
            if qr_unfold(y, sp) != x:
                failures += 1
        if images != set(range(sp.q)):
            failures += 1
        for y in range(sp.q):
            if qr_fold(qr_unfold(y, sp), sp) != y:
                failures += 1
    elapsed = time.perf_counter() - start
    report("C3", failures == 0 and elapsed < 30,
           f"fold bijective with two-sided inverse on {len(primes)} safe primes < 2^14",
           elapsed)


def test_c04_step_inversion_10k():
    # 10^4 random (instance, branch, b) at 16-32-bit primes.
    from prfdist.prf import chain_step, invert_chain_step

    start = time.perf_counter()
    rng = derive_rng(SEED, "c4")
    checks = 0
    failures = 0
    bit_sizes = list(range(16, 33))
    per_instance = 80
    while checks < 10_000:
        bits = bit_sizes[(checks // per_instance) % len(bit_sizes)]
        si = instance_gen(bits, 4, rng)
        inst = si.instance
        for _ in range(min(per_instance, 10_000 - checks)):
            branch = rng.getrandbits(1)
            b = rng.randrange(inst.q)
            if invert_chain_step(inst, branch, chain_step(inst, branch, b)) != b:
                failures += 1
            checks += 1
    elapsed = time.perf_counter() - start
    report("C4", failures == 0 and checks == 10_000 and elapsed < 60,
           f"invert(step(.)) identity on {checks - failures}/{checks} draws at 16-32 bits",
           elapsed)


def test_c05_key_recovery_100_instances():
    # 100 random 20-bit instances, n = 16: exact key recovery under 50 ms
    # each, learned evaluator at TV exactly 0 (full-graph verification),
    # plus the explicit-support closed form on a subsample.
    start = time.perf_counter()
    rng = derive_rng(SEED, "c5")
    slowest = 0.0
    key_failures = 0
    tv_failures = 0
    closed_form_checked = 0
    for i in range(100):
        si = instance_gen(20, 16, rng)
        key = sample_key(si.instance, rng)
        sample = draw_param_sample(si, key, rng)
        t0 = time.perf_counter()
        model = key_recovery_learner(sample)
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if model.payload["k"] != key.k or dt >= 0.050:
            key_failures += 1
        if model_tv_to_target(model, si.instance, key) != 0:
            tv_failures += 1
        if i < 3:
            ev = exact_evaluator_from_key(
                si.instance, SecretKey(k=model.payload["k"], q=si.instance.q))
            xy = ev.xy_evaluator()
            view = PrfFunctionView(si.instance, key, m=xy.m, use_graph=True)
            if tv_against_induced(xy, InducedSpec(f=view)) != 0:
                tv_failures += 1
            closed_form_checked += 1
    elapsed = time.perf_counter() - start
    ok = key_failures == 0 and tv_failures == 0 and closed_form_checked == 3
    report("C5", ok,
           f"100/100 exact recoveries (slowest {slowest * 1000:.1f} ms), TV 0 on all, "
           f"closed form on {closed_form_checked}",
           elapsed)


def test_c06_exam_exact_evaluator_1000_of_1000():
    # Key-recovery examinee at 16-bit primes: 1000/1000 passes and the
    # strategy never reaches its random branch.
    start = time.perf_counter()
    cfg = ExamStrategyConfig(epsilon=Fraction(1, 10), n=8)
    takers = []
    base_factory = exam_taker_from_learner(
        lambda samples, rng: key_recovery_learner(samples[0]), cfg, training_samples=1)

    def factory(instance, rng):
        taker = base_factory(instance, rng)
        takers.append(taker)
        return taker

    rep = estimate_pass_rate(factory, lambda r: instance_gen(16, 8, r),
                             1000, derive_rng(SEED, "c6"))
    random_branches = sum(t.random_decisions for t in takers)
    elapsed = time.perf_counter() - start
    report("C6", rep.passes == 1000 and random_branches == 0,
           f"{rep.passes}/1000 exams passed, {random_branches} random-branch decisions",
           elapsed)


def test_c07_conditional_pass_bound_10k_exams():
    # Evaluators corrupted within TV <= 0.1 (< 1/9): pass rate over 10^4
    # exams must clear 5/8 - 3 sigma. Instances keep q >= 2^n so the
    # spurious-threshold count bound applies to the exam's candidate space.
    start = time.perf_counter()
    rng = derive_rng(SEED, "c7")
    epsilon = Fraction(1, 10)
    n_in = 8
    cfg = ExamStrategyConfig(epsilon=epsilon, n=n_in)
    trials = 10_000
    passes = 0
    pool = 50
    per_pair = trials // (pool * 4)
    done = 0
    for _ in range(pool):
        si = instance_gen(14, n_in, rng)
        inst = si.instance
        assert inst.q >= 1 << n_in
        view = PrfFunctionView(inst, sample_key(inst, rng), use_graph=True)
        for _ in range(4):
            key = sample_key(inst, rng)
            graph_view = PrfFunctionView(inst, key, use_graph=True)
            u = Fraction(1, 1 << n_in)
            diag = {(x, int(graph_view(x))): u for x in range(1 << n_in)}

            for _ in range(per_pair):
                if done >= trials:
                    break

                def fresh_key(r):
                    while True:
                        x = r.randrange(1 << n_in)
                        y = r.randrange(inst.q)
                        if graph_view(x) != y:
                            return (x, y)

                corrupted = perturb_support_within_tv(diag, epsilon, rng, fresh_key)
                mass = lambda x, y, _c=corrupted: _c.get((int(x, 2), y), Fraction(0))
                taker = EvaluatorExamTaker(mass, cfg)
                transcript = administer_exam(si, key, taker, rng)
                passes += transcript.passed
                done += 1
    sigma = math.sqrt((5 / 8) * (3 / 8) / trials)
    threshold = 5 / 8 - 3 * sigma
    rate = passes / done
    elapsed = time.perf_counter() - start
    report("C7", done == trials and rate >= threshold,
           f"corrupted-evaluator pass rate {rate:.4f} >= {threshold:.4f} over {done} exams",
           elapsed)


def test_c08_threshold_count_bounds_1000():
    # 10^3 random TV <= 0.1 corruptions at n = 4: both counting bounds hold.
    start = time.perf_counter()
    result = run_threshold_count_bounds(1000, derive_rng(SEED, "c8"),
                                        n=4, epsilon=Fraction(1, 10))
    elapsed = time.perf_counter() - start
    report("C8", result.failures == 0,
           f"both count bounds held on {result.cases - result.failures}/{result.cases} corruptions",
           elapsed)


def test_c09_reduction_bounds_100_trials():
    # n = 4, m = 2, eta in {0, 0.1}: evaluator->function loss <= 2(eta+eps)
    # and function->evaluator TV <= eta+eps, exact rational arithmetic.
    start = time.perf_counter()
    rng = derive_rng(SEED, "c9")
    epsilon = Fraction(1, 10)
    cfg = LearnerConfig(epsilon=epsilon, delta=Fraction(1, 10), sample_budget=64)
    failures = 0
    for trial in range(100):
        eta = Fraction(0) if trial % 2 == 0 else Fraction(1, 10)
        f = FiniteFunction.random(4, 2, rng)
        p_input = random_rational_distribution(16, rng)
        spec = InducedSpec(f=f, p_input=p_input, eta=eta)
        target = induced_dense(spec)

        # evaluator learner whose output is within TV epsilon (spent fully)
        corrupted = perturb_within_tv(target, epsilon, rng, exact=True)
        assert tv_distance(corrupted, target) == epsilon

        def eval_learner(draw, _cfg, _rng, _dense=corrupted):
            draw()
            return Evaluator.from_dense(4, 2, _dense)

        h = eval_to_function_learner(eval_learner, spec, cfg, rng)
        if function_loss(f, h, p_input) > 2 * (eta + epsilon):
            failures += 1

        # function learner whose hypothesis has loss <= epsilon
        table = list(f.table)
        budget = epsilon
        order = list(range(16))
        rng.shuffle(order)
        for x in order:
            if p_input[x] <= budget and p_input[x] > 0:
                table[x] ^= rng.randrange(1, 4)
                budget -= p_input[x]
        h_bad = FiniteFunction(n=4, m=2, table=tuple(table))
        assert function_loss(f, h_bad, p_input) <= epsilon

        def fn_learner(query, _cfg, _rng, _h=h_bad):
            query()
            return _h

        ev = function_to_eval_learner(fn_learner, spec, cfg, rng)
        if tv_distance(ev.to_dense(), target) > eta + epsilon:
            failures += 1
    elapsed = time.perf_counter() - start
    report("C9", failures == 0,
           f"both reduction bounds held on {100 - failures}/100 trials", elapsed)


def test_c10_separation_demonstration():
    # 20-bit instance: key recovery TV 0 from 1 sample in < 1 s; histogram
    # with 10^5 samples at TV >= 0.89 (within 0.01 of 1 - N * 2^-n);
    # uniform baseline at exactly 1 - 2^-20.
    start = time.perf_counter()
    rng = derive_rng(SEED, "c10")
    si = instance_gen(20, 20, rng)
    key = sample_key(si.instance, rng)
    inst = si.instance

    one = draw_param_sample(si, key, rng)
    t0 = time.perf_counter()
    model = key_recovery_learner(one)
    recovery_s = time.perf_counter() - t0
    tv_q = model_tv_to_target(model, inst, key)

    n_samples = 100_000
    batch = [draw_param_sample(si, key, rng) for _ in range(n_samples)]
    tv_h = model_tv_to_target(histogram_learner(batch), inst, key)
    closed_form = 1 - Fraction(n_samples, 1 << 20)

    tv_u = model_tv_to_target(uniform_baseline(20, 20), inst, key)

    ok = (tv_q == 0 and recovery_s < 1.0
          and tv_h >= Fraction(89, 100)
          and abs(tv_h - closed_form) <= Fraction(1, 100)
          and tv_u == 1 - Fraction(1, 1 << 20))
    elapsed = time.perf_counter() - start
    report("C10", ok,
           f"key-recovery TV {tv_q} in {recovery_s * 1000:.0f} ms; histogram TV "
           f"{float(tv_h):.4f} (closed form {float(closed_form):.4f}); uniform TV "
           f"{float(tv_u):.6f}",
           elapsed)


def test_c11_separation_report_byte_identical(tmp_path):
    start = time.perf_counter()
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    for out in (out_a, out_b):
        code = cli.main(["separation-report", "--seed", "77", "--bits", "20",
                         "--n-in", "20", "--budget", "100000", "--out", str(out)])
        assert code == 0
    identical = out_a.read_bytes() == out_b.read_bytes()
    elapsed = time.perf_counter() - start
    report("C11", identical,
           f"two runs, {len(out_a.read_bytes())} bytes each, byte-identical={identical}",
           elapsed)
