"""Distribution-learning framework over fixed-length bitstrings.

The central object is the distribution induced by a function f mapping n
bits to m bits under an input distribution P and a label-noise rate eta:
mass P(x)(1 - eta) sits on each graph point x||f(x), and each of the
2^m - 1 wrong labels for x carries P(x) * eta / (2^m - 1). Drawing one
noisy random example from f is distributionally identical to drawing one
sample of the induced distribution, which is what makes function learning
and evaluator learning interchangeable here.

Two numeric modes are used deliberately: exact rational arithmetic
(fractions.Fraction) wherever an identity is asserted, and floats only in
Monte Carlo statistics. Total-variation distance between dense rational
vectors is exact.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable

from .bitstrings import bits_to_int, int_to_bits, validate_bits

_ZERO = Fraction(0)

_FLOAT_TOL = 1e-12
_DENSE_BIT_CAP = 24          # dense vectors enumerate 2**(n+m) cells
_SUPPORT_CAP = 10_000_000    # explicit-support closed-form TV cap
_ARGMAX_M_CAP = 20           # argmax scans all 2**m labels per input


class BudgetExceeded(RuntimeError):
    """An oracle or learner ran past its configured query budget."""


# ---------------------------------------------------------------------------
# Functions and induced distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteFunction:
    """Total function from n-bit strings to m-bit strings, as a dense table
    indexed by the integer value of the input."""

    n: int
    m: int
    table: tuple

    def __post_init__(self):
        if len(self.table) != 1 << self.n:
            raise ValueError("table must cover all 2**n inputs")
        if any(not 0 <= v < (1 << self.m) for v in self.table):
            raise ValueError("table entry does not fit in m bits")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def apply(self, x_bits: str) -> str:
        """String-in, string-out evaluation."""
        return int_to_bits(self.table[bits_to_int(validate_bits(x_bits, self.n))], self.m)

    @classmethod
    def from_callable(cls, n: int, m: int, fn: Callable[[int], int]) -> "FiniteFunction":
        return cls(n=n, m=m, table=tuple(fn(x) for x in range(1 << n)))

    @classmethod
    def random(cls, n: int, m: int, rng: Random) -> "FiniteFunction":
        return cls(n=n, m=m, table=tuple(rng.randrange(1 << m) for _ in range(1 << n)))


UNIFORM = "uniform"


@dataclass(frozen=True)
class InducedSpec:
    """A function view plus input distribution and noise rate.

    `f` needs attributes n and m and must be callable on input integers.
    `p_input` is either the tag "uniform" or a dense table over 2**n inputs;
    rational tables must sum to exactly 1, float tables to within 1e-12.
    """

    f: object
    p_input: object = UNIFORM
    eta: Fraction = _ZERO

    def __post_init__(self):
        eta = self.eta if isinstance(self.eta, (Fraction, int)) else Fraction(self.eta)
        object.__setattr__(self, "eta", Fraction(eta))
        if not _ZERO <= self.eta < Fraction(1, 2):
            raise ValueError(f"eta must lie in [0, 1/2), got {self.eta}")
        if self.eta > 0 and self.f.m < 1:
            raise ValueError("noise needs at least one output bit")
        if self.p_input != UNIFORM:
            table = tuple(self.p_input)
            object.__setattr__(self, "p_input", table)
            if len(table) != 1 << self.f.n:
                raise ValueError("input distribution must cover all 2**n inputs")
            if any(v < 0 for v in table):
                raise ValueError("negative input mass")
            total = sum(table)
            if isinstance(total, Fraction):
                if total != 1:
                    raise ValueError(f"input distribution sums to {total}, not 1")
            elif abs(total - 1.0) > _FLOAT_TOL:
                raise ValueError(f"input distribution sums to {total}, not 1")

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def m(self) -> int:
        return self.f.m

    def p_mass(self, x: int):
        if self.p_input == UNIFORM:
            return Fraction(1, 1 << self.n)
        return self.p_input[x]

    def mass(self, x: int, y: int):
        """Induced mass on the record x||y."""
        px = self.p_mass(x)
        if self.f(x) == y:
            return px * (1 - self.eta)
        return px * self.eta / ((1 << self.m) - 1)


# ---------------------------------------------------------------------------
# Evaluators and generators
# ---------------------------------------------------------------------------

class Evaluator:
    """Probability-mass query interface over length-(n+m) bitstrings.

    Either a query function or an explicit support may back the evaluator.
    Explicit supports are dicts {bitstring: mass}; masses must be
    nonnegative and sum to at most 1, and queries off the support are 0.
    """

    def __init__(self, n: int, m: int, query_fn=None, support=None):
        if query_fn is None and support is None:
            raise ValueError("need a query function or an explicit support")
        self.n = n
        self.m = m
        self._query_fn = query_fn
        self.support = support
        if support is not None:
            total = _ZERO
            for s, mass in support.items():
                validate_bits(s, n + m)
                if mass < 0:
                    raise ValueError(f"negative mass on {s}")
                total += mass
            if total > 1:
                raise ValueError(f"support masses sum to {total} > 1")

    def query(self, s: str):
        validate_bits(s, self.n + self.m)
        if self._query_fn is not None:
            return self._query_fn(s)
        return self.support.get(s, _ZERO)

    def to_dense(self) -> tuple:
        width = self.n + self.m
        if width > _DENSE_BIT_CAP:
            raise ValueError(f"dense mode needs n + m <= {_DENSE_BIT_CAP}")
        return tuple(self.query(int_to_bits(i, width)) for i in range(1 << width))

    @classmethod
    def from_dense(cls, n: int, m: int, dense) -> "Evaluator":
        dense = tuple(dense)
        if len(dense) != 1 << (n + m):
            raise ValueError("dense vector has the wrong length")
        support = {
            int_to_bits(i, n + m): v for i, v in enumerate(dense) if v != 0
        }
        ev = cls(n, m, query_fn=lambda s: dense[bits_to_int(s)], support=support)
        return ev


class Generator:
    """Sampler for a distribution over length-(n+m) bitstrings."""

    def __init__(self, n: int, m: int, draw_fn, rng: Random):
        self.n = n
        self.m = m
        self._draw_fn = draw_fn
        self._rng = rng

    def draw(self, rng: Random | None = None) -> str:
        return self._draw_fn(rng if rng is not None else self._rng)


@dataclass(frozen=True)
class LearnerConfig:
    epsilon: Fraction
    delta: Fraction
    sample_budget: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "delta", Fraction(self.delta))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.sample_budget < 1:
            raise ValueError("sample_budget must be >= 1")


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

class MQOracle:
    """Chosen-input access: query(x) returns (x, f(x)) and counts the call."""

    def __init__(self, f, budget: int | None = None):
        self.f = f
        self.budget = budget
        self.calls = 0

    def query(self, x_bits: str):
        if self.budget is not None and self.calls >= self.budget:
            raise BudgetExceeded(f"membership-query budget {self.budget} exhausted")
        self.calls += 1
        validate_bits(x_bits, self.f.n)
        return (x_bits, self.f.apply(x_bits))


def mq_oracle(f, budget: int | None = None) -> MQOracle:
    return MQOracle(f, budget=budget)


def _input_sampler(spec: InducedSpec):
    """Returns a draw(rng) -> x_int closure sampling spec.p_input."""
    if spec.p_input == UNIFORM:
        n = spec.n
        if n == 0:
            return lambda rng: 0
        return lambda rng: rng.getrandbits(n)
    cumulative = []
    acc = _ZERO
    for v in spec.p_input:
        acc += v
        cumulative.append(acc)

    def draw(rng: Random) -> int:
        r = rng.random()
        return min(bisect.bisect_right(cumulative, r), len(cumulative) - 1)

    return draw


def _draw_label(spec: InducedSpec, x: int, rng: Random) -> int:
    """Correct label with probability 1 - eta, else uniform over wrong ones."""
    fx = spec.f(x)
    if spec.eta > 0 and rng.random() < spec.eta:
        wrong = rng.randrange((1 << spec.m) - 1)
        return wrong if wrong < fx else wrong + 1
    return fx


class RexOracle:
    """Noisy random-example access to the function behind an InducedSpec.

    One query is distributionally identical to one sample of the induced
    distribution, split into its (x, label) halves.
    """

    def __init__(self, spec: InducedSpec, rng: Random, budget: int | None = None):
        self.spec = spec
        self.budget = budget
        self.calls = 0
        self._rng = rng
        self._draw_input = _input_sampler(spec)

    def query(self):
        if self.budget is not None and self.calls >= self.budget:
            raise BudgetExceeded(f"random-example budget {self.budget} exhausted")
        self.calls += 1
        x = self._draw_input(self._rng)
        y = _draw_label(self.spec, x, self._rng)
        return (int_to_bits(x, self.spec.n), int_to_bits(y, self.spec.m))


def rex_oracle(spec: InducedSpec, rng: Random, budget: int | None = None) -> RexOracle:
    return RexOracle(spec, rng, budget=budget)


# ---------------------------------------------------------------------------
# Induced evaluators / generators / dense vectors
# ---------------------------------------------------------------------------

def induced_eval(spec: InducedSpec) -> Evaluator:
    """Exact evaluator of the induced distribution (query-based)."""
    n, m = spec.n, spec.m

    def query_fn(s: str):
        return spec.mass(bits_to_int(s[:n]), bits_to_int(s[n:]))

    return Evaluator(n, m, query_fn=query_fn)


def induced_dense(spec: InducedSpec) -> tuple:
    """Dense mass vector of the induced distribution, index = int(x||y)."""
    n, m = spec.n, spec.m
    if n + m > _DENSE_BIT_CAP:
        raise ValueError(f"dense mode needs n + m <= {_DENSE_BIT_CAP}")
    out = []
    one_minus = 1 - spec.eta
    wrong = spec.eta / ((1 << m) - 1) if spec.eta > 0 else _ZERO
    for x in range(1 << n):
        px = spec.p_mass(x)
        fx = spec.f(x)
        row = [px * wrong] * (1 << m)
        row[fx] = px * one_minus
        out.extend(row)
    return tuple(out)


def induced_generator(spec: InducedSpec, rng: Random) -> Generator:
    """Sampler emitting x||label with the random-example label rule."""
    n, m = spec.n, spec.m
    draw_input = _input_sampler(spec)

    def draw_fn(r: Random) -> str:
        x = draw_input(r)
        y = _draw_label(spec, x, r)
        return int_to_bits(x, n) + int_to_bits(y, m)

    return Generator(n, m, draw_fn, rng)


# ---------------------------------------------------------------------------
# Distances and losses
# ---------------------------------------------------------------------------

def tv_distance(d1, d2):
    """Total variation distance (half the l1 distance) of dense vectors."""
    if len(d1) != len(d2):
        raise ValueError(f"length mismatch: {len(d1)} vs {len(d2)}")
    if len(d1) > (1 << _DENSE_BIT_CAP):
        raise ValueError("dense vectors too large")
    total = sum(abs(a - b) for a, b in zip(d1, d2))
    return total / 2


def tv_against_induced(ev: Evaluator, spec: InducedSpec):
    """Exact TV between an explicit-support evaluator and a noiseless
    uniform-input induced distribution, without enumerating 2**(n+m) cells.

    Diagonal cells x||f(x) carry target mass 2**-n; everything else carries
    0. Evaluator mass missing from the support (supports may sum to less
    than 1) is counted as sitting off the target's support entirely, so the
    all-zero evaluator is at distance 1. For supports of total mass 1 this
    equals tv_distance on the dense vectors.
    """
    if ev.support is None:
        raise ValueError("closed-form TV needs an explicit support")
    if len(ev.support) > _SUPPORT_CAP:
        raise ValueError("support too large")
    if spec.eta != 0 or spec.p_input != UNIFORM:
        raise ValueError("closed form only covers noiseless uniform-input specs")
    n = spec.n
    u = Fraction(1, 1 << n)
    diag_sum = _ZERO
    off_sum = _ZERO
    total_mass = _ZERO
    diag_covered = 0
    f = spec.f
    for s, mass in ev.support.items():
        total_mass += mass
        x = bits_to_int(s[:n])
        y = bits_to_int(s[n:])
        if f(x) == y:
            diag_covered += 1
            if mass != u:
                diag_sum += abs(u - mass)
        else:
            off_sum += mass
    uncovered = ((1 << n) - diag_covered) * u
    missing = 1 - total_mass
    return (diag_sum + uncovered + off_sum + missing) / 2


def function_loss(f: FiniteFunction, h: FiniteFunction, p_input=UNIFORM):
    """Probability under the input distribution that f and h disagree."""
    if (f.n, f.m) != (h.n, h.m):
        raise ValueError("shape mismatch between f and h")
    if p_input == UNIFORM:
        bad = sum(1 for x in range(1 << f.n) if f(x) != h(x))
        return Fraction(bad, 1 << f.n)
    if len(p_input) != 1 << f.n:
        raise ValueError("input distribution has the wrong length")
    return sum((p_input[x] for x in range(1 << f.n) if f(x) != h(x)), _ZERO)


def argmax_hypothesis(ev: Evaluator, n: int, m: int) -> FiniteFunction:
    """Best-label hypothesis: h(x) is the y maximizing the evaluator's mass
    on x||y, ties broken toward the lexicographically smallest y."""
    if m > _ARGMAX_M_CAP:
        raise ValueError(f"argmax scan needs m <= {_ARGMAX_M_CAP}")
    table = []
    for x in range(1 << n):
        x_bits = int_to_bits(x, n)
        best_y = 0
        best_mass = ev.query(x_bits + int_to_bits(0, m))
        for y in range(1, 1 << m):
            mass = ev.query(x_bits + int_to_bits(y, m))
            if mass > best_mass:
                best_y, best_mass = y, mass
        table.append(best_y)
    return FiniteFunction(n=n, m=m, table=tuple(table))


# ---------------------------------------------------------------------------
# Reductions between evaluator learning and function learning
# ---------------------------------------------------------------------------

def eval_to_function_learner(learner, spec: InducedSpec, cfg: LearnerConfig,
                             rng: Random) -> FiniteFunction:
    """Run an evaluator learner on induced samples, then take its argmax.

    `learner(draw, cfg, rng)` must return an Evaluator; `draw()` yields one
    induced sample per call and raises BudgetExceeded past the budget. When
    the learner's output evaluator is within TV epsilon of the induced
    distribution, the returned hypothesis has loss at most
    2 * (eta + epsilon) against f under P.
    """
    gen = induced_generator(spec, rng)
    used = 0

    def draw() -> str:
        nonlocal used
        if used >= cfg.sample_budget:
            raise BudgetExceeded(f"sample budget {cfg.sample_budget} exhausted")
        used += 1
        return gen.draw()

    ev = learner(draw, cfg, rng)
    return argmax_hypothesis(ev, spec.n, spec.m)


def function_to_eval_learner(learner, spec: InducedSpec, cfg: LearnerConfig,
                             rng: Random) -> Evaluator:
    """Run a function learner on random examples, wrap its hypothesis as the
    evaluator putting P(x) on x||h(x) and 0 elsewhere.

    When the hypothesis has loss at most epsilon, the returned evaluator is
    within TV eta + epsilon of the induced distribution.
    """
    oracle = rex_oracle(spec, rng, budget=cfg.sample_budget)
    h = learner(oracle.query, cfg, rng)
    if spec.n > 20:
        raise ValueError("hypothesis evaluator materializes 2**n support entries")
    support = {}
    for x in range(1 << spec.n):
        px = spec.p_mass(x)
        if px != 0:
            support[int_to_bits(x, spec.n) + int_to_bits(h(x), spec.m)] = px
    return Evaluator(spec.n, spec.m, support=support)


# ---------------------------------------------------------------------------
# Controlled perturbations (exact TV budgets, used by verification suites)
# ---------------------------------------------------------------------------

def perturb_within_tv(dense, budget, rng: Random, transfers: int = 24,
                      exact: bool = False) -> tuple:
    """Randomly move probability mass, keeping TV to the original bounded by
    `budget` (equal to `budget` exactly when exact=True).

    Each transfer takes mass from one cell and gives it to another, so the
    result is again a distribution. With exact=True donors and recipients
    are kept disjoint, so no movement cancels and the distance is the full
    spent budget.
    """
    masses = list(dense)
    size = len(masses)
    budget = Fraction(budget)
    if budget <= 0:
        return tuple(masses)
    if not exact:
        cap = budget / transfers
        for _ in range(transfers):
            positive = [i for i in range(size) if masses[i] > 0]
            d = positive[rng.randrange(len(positive))]
            r = rng.randrange(size)
            if r == d:
                continue
            amt = min(masses[d], cap * Fraction(rng.randrange(1, 65), 64))
            masses[d] -= amt
            masses[r] += amt
        return tuple(masses)

    order = list(range(size))
    rng.shuffle(order)
    n_reserved = max(1, size // 4)
    reserved = order[:n_reserved]
    donors = [i for i in order[n_reserved:] if masses[i] > 0]
    if sum((masses[d] for d in donors), _ZERO) < budget:
        raise ValueError("not enough donor mass for the exact budget")
    spend = budget
    donated = []
    # Pass 1 spreads random partial amounts; pass 2 tops up greedily so the
    # whole budget is always spent.
    for d in donors:
        if spend == 0:
            break
        amt = min(masses[d], spend, budget * Fraction(rng.randrange(1, transfers + 1), transfers))
        if amt > 0:
            masses[d] -= amt
            spend -= amt
            donated.append((d, amt))
    for d in donors:
        if spend == 0:
            break
        amt = min(masses[d], spend)
        if amt > 0:
            masses[d] -= amt
            spend -= amt
            donated.append((d, amt))
    assert spend == 0
    for _, amt in donated:
        masses[reserved[rng.randrange(n_reserved)]] += amt
    return tuple(masses)


def perturb_support_within_tv(support: dict, budget, rng: Random, fresh_key,
                              transfers: int = 16) -> dict:
    """Support-level analogue of perturb_within_tv for spaces too large to
    densify. `fresh_key(rng)` must return a key outside the original support
    (so moved mass never cancels against a donor)."""
    new = dict(support)
    donors = list(support.keys())
    budget = Fraction(budget)
    cap = budget / transfers
    for _ in range(transfers):
        d = donors[rng.randrange(len(donors))]
        avail = new[d]
        if avail <= 0:
            continue
        amt = min(avail, cap * Fraction(rng.randrange(1, 65), 64))
        r = fresh_key(rng)
        if r == d:
            continue
        new[d] -= amt
        new[r] = new.get(r, _ZERO) + amt
    return new


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def frac_to_str(value) -> str:
    fr = Fraction(value)
    return f"{fr.numerator}/{fr.denominator}"


def frac_from_str(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def dense_to_json(dense) -> str:
    """Dense distributions serialize as arrays of "num/den" strings indexed
    by the big-endian integer value of the bitstring."""
    return json.dumps([frac_to_str(v) for v in dense])


def dense_from_json(s: str) -> tuple:
    return tuple(frac_from_str(v) for v in json.loads(s))


def support_to_ndjson(support: dict) -> str:
    lines = [
        json.dumps({"s": s, "p": frac_to_str(mass)}, sort_keys=True)
        for s, mass in sorted(support.items())
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def support_from_ndjson(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        out[obj["s"]] = frac_from_str(obj["p"])
    return out
