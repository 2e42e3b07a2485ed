"""Exact verification suites for the framework's core identities.

Each suite pits an implementation path against an independent brute-force
route on randomized small instances and reports the number of failing
cases. The suites double as the machine-checkable acceptance surface, so
all arithmetic here is exact rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from random import Random

from .distlearn import (
    Evaluator,
    FiniteFunction,
    InducedSpec,
    argmax_hypothesis,
    function_loss,
    induced_dense,
    perturb_within_tv,
    tv_distance,
)
from .exam import check_threshold_counts


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def random_rational_distribution(size: int, rng: Random, weight_cap: int = 64) -> tuple:
    """Dense distribution with random small-denominator rational masses."""
    weights = [rng.randrange(weight_cap) for _ in range(size)]
    if sum(weights) == 0:
        weights[rng.randrange(size)] = 1
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def run_loss_tv_equivalence(cases: int, rng: Random, inject_fault: bool = False) -> SuiteResult:
    """Function-disagreement probability must equal the TV distance of the
    noiseless induced distributions, with exact rational equality."""
    failures = 0
    for i in range(cases):
        n = rng.randrange(1, 7)
        m = rng.randrange(1, 4)
        f = FiniteFunction.random(n, m, rng)
        h = FiniteFunction.random(n, m, rng)
        p_input = random_rational_distribution(1 << n, rng)
        loss = function_loss(f, h, p_input)
        tv = tv_distance(
            induced_dense(InducedSpec(f=f, p_input=p_input)),
            induced_dense(InducedSpec(f=h, p_input=p_input)),
        )
        if inject_fault and i == 0:
            loss += Fraction(1, 1000)
        if loss != tv:
            failures += 1
    return SuiteResult(name="loss-equals-induced-tv", cases=cases, failures=failures)


def run_argmax_optimality(cases: int, rng: Random, inject_fault: bool = False) -> SuiteResult:
    """The argmax hypothesis must minimize TV to the evaluator over every
    candidate function, checked by exhaustive enumeration of all
    (2**m)**(2**n) candidates."""
    failures = 0
    for i in range(cases):
        n = rng.randrange(1, 4)
        m = rng.randrange(1, 3)
        if rng.getrandbits(1):
            dense = random_rational_distribution(1 << (n + m), rng)
        else:
            f = FiniteFunction.random(n, m, rng)
            dense = perturb_within_tv(
                induced_dense(InducedSpec(f=f)), Fraction(1, 5), rng
            )
        ev = Evaluator.from_dense(n, m, dense)
        p_input = random_rational_distribution(1 << n, rng)
        h = argmax_hypothesis(ev, n, m)

        # Independent route: per-input contribution table, then brute force.
        # TV(E, induced(c, P)) = 1/2 * sum_x [ S(x) - E(x||c(x)) + |E(x||c(x)) - P(x)| ]
        per_x = []
        for x in range(1 << n):
            row_start = x << m
            row = dense[row_start: row_start + (1 << m)]
            s_x = sum(row)
            per_x.append([s_x - row[y] + abs(row[y] - p_input[x]) for y in range(1 << m)])
        h_tv = sum(per_x[x][h(x)] for x in range(1 << n)) / 2
        if inject_fault and i == 0:
            h_tv += Fraction(1, 1000)
        best = min(
            sum(per_x[x][cand[x]] for x in range(1 << n))
            for cand in product(range(1 << m), repeat=1 << n)
        ) / 2
        # Cross-check the decomposition itself against the direct dense TV.
        direct = tv_distance(dense, induced_dense(InducedSpec(f=h, p_input=p_input)))
        if h_tv != direct or h_tv > best:
            failures += 1
    return SuiteResult(name="argmax-minimizes-tv", cases=cases, failures=failures)


def run_threshold_count_bounds(cases: int, rng: Random, n: int = 4,
                               epsilon=Fraction(1, 10),
                               inject_fault: bool = False) -> SuiteResult:
    """Random TV-bounded corruptions of exact evaluators must keep at least
    3/4 of graph records above the genuine threshold and at least half of
    the off-graph records below the spurious threshold."""
    epsilon = Fraction(epsilon)
    failures = 0
    for i in range(cases):
        f = FiniteFunction.random(n, n, rng)
        # Alternate partial corruptions with ones spending the whole budget,
        # so the counts are exercised right at the promised distance.
        dense = perturb_within_tv(induced_dense(InducedSpec(f=f)), epsilon, rng,
                                  exact=bool(i % 2))
        ev = Evaluator.from_dense(n, n, dense)
        report = check_threshold_counts(f, ev, epsilon, n)
        diag_ok = report.diag_count >= report.diag_required
        off_ok = report.offdiag_count >= report.offdiag_required
        if inject_fault and i == 0:
            diag_ok = False
        if not (diag_ok and off_ok):
            failures += 1
    return SuiteResult(name="threshold-count-bounds", cases=cases, failures=failures)


def run_all(rng: Random, loss_cases: int = 200, argmax_cases: int = 50,
            count_cases: int = 1000, inject_fault: bool = False) -> list:
    return [
        run_loss_tv_equivalence(loss_cases, rng, inject_fault=inject_fault),
        run_argmax_optimality(argmax_cases, rng),
        run_threshold_count_bounds(count_cases, rng),
    ]
