"""Evaluator learners for the parameter-appended sample stream.

Samples carry the public parameters (p, g, ga) alongside each (x, y) pair,
so a learner can rebuild the instance from data alone. The key-recovery
learner inverts the evaluation chain of a single sample with one discrete
logarithm per input bit and recovers the secret key exactly; the histogram
and uniform learners are the classical baselines it is compared against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from random import Random

import numpy as np

from .bitstrings import bits_to_int, int_to_bits, validate_bits
from .distlearn import Evaluator, InducedSpec, tv_against_induced
from .numtheory import SafePrime
from .prf import (
    Instance,
    SecretInstance,
    SecretKey,
    invert_chain_step,
    prf_eval,
    prf_graph,
)

_ZERO = Fraction(0)

MODEL_KINDS = ("exact-key", "histogram", "uniform")


class MixedParams(ValueError):
    """Samples from different instances were mixed in one batch."""


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleRecord:
    """One draw x || F(k, x) || (p, g, ga) from the parameter-appended
    distribution."""

    x: str
    y: int
    p: int
    g: int
    ga: int

    def __post_init__(self):
        validate_bits(self.x)
        q = (self.p - 1) // 2
        if not 0 <= self.y < q:
            raise ValueError(f"y = {self.y} is not in [0, {q})")

    @property
    def params(self) -> tuple:
        return (self.p, self.g, self.ga)

    def params_instance(self) -> Instance:
        """Rebuild and fully re-verify the instance carried by the sample.

        Parameters arrive from data, not config, so nothing is trusted:
        safe-primality of p and group membership of g and ga are rechecked.
        """
        sp = SafePrime.from_p(self.p)
        return Instance(sp=sp, g=self.g, ga=self.ga, n_in=len(self.x))

    def to_json_line(self) -> str:
        return json.dumps(
            {"x": self.x, "y": self.y, "p": self.p, "g": self.g, "ga": self.ga},
            sort_keys=True,
        )

    @classmethod
    def from_json_line(cls, line: str) -> "SampleRecord":
        obj = json.loads(line)
        return cls(x=obj["x"], y=int(obj["y"]), p=int(obj["p"]),
                   g=int(obj["g"]), ga=int(obj["ga"]))


def draw_param_sample(si: SecretInstance, key: SecretKey, rng: Random) -> SampleRecord:
    """One sample: x uniform over n-bit strings, y the chain value, public
    parameters appended."""
    inst = si.instance
    x = int_to_bits(rng.getrandbits(inst.n_in) if inst.n_in else 0, inst.n_in)
    return SampleRecord(x=x, y=prf_eval(inst, key, x), p=inst.p, g=inst.g, ga=inst.ga)


# ---------------------------------------------------------------------------
# Learned models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LearnedModel:
    """Tagged union of the three learner outputs.

    kind "exact-key": payload carries the recovered key and instance fields.
    kind "histogram": payload carries empirical counts over seen records.
    kind "uniform":   payload carries the dimensions only.
    """

    kind: str
    payload: dict

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")

    # -- record-level mass queries (used by exam strategies) --------------

    def record_mass(self, x: str, y: int) -> Fraction:
        if self.kind == "exact-key":
            inst = self._instance()
            key = SecretKey(k=self.payload["k"], q=inst.q)
            if not 0 <= y < inst.q:
                return _ZERO
            return Fraction(1, 1 << inst.n_in) if prf_eval(inst, key, x) == y else _ZERO
        if self.kind == "histogram":
            total = self.payload["total"]
            return Fraction(self.payload["counts"].get((x, y), 0), total)
        n, m = self.payload["n"], self.payload["m"]
        return Fraction(1, 1 << (n + m))

    def _instance(self) -> Instance:
        pl = self.payload
        sp = SafePrime.from_p(pl["p"])
        return Instance(sp=sp, g=pl["g"], ga=pl["ga"], n_in=pl["n_in"])

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == "histogram":
            counts = [
                {"x": x, "y": y, "c": c}
                for (x, y), c in sorted(self.payload["counts"].items())
            ]
            payload = {k: v for k, v in self.payload.items() if k != "counts"}
            payload["counts"] = counts
            return {"kind": self.kind, "payload": payload}
        return {"kind": self.kind, "payload": dict(self.payload)}

    @classmethod
    def from_dict(cls, d: dict) -> "LearnedModel":
        kind = d["kind"]
        payload = dict(d["payload"])
        if kind == "histogram":
            payload["counts"] = {
                (e["x"], int(e["y"])): int(e["c"]) for e in payload["counts"]
            }
        return cls(kind=kind, payload=payload)


# ---------------------------------------------------------------------------
# Function views and evaluators bound to an instance
# ---------------------------------------------------------------------------

class PrfFunctionView:
    """Function-view adapter (n, m, callable on ints) for a keyed instance.

    Output values live in Z_q; m is the bit width used when they are
    embedded into strings, defaulting to the width of q - 1. Out-of-range
    m-bit strings simply never appear as outputs.
    """

    def __init__(self, instance: Instance, key: SecretKey, m: int | None = None,
                 use_graph: bool = False):
        self.instance = instance
        self.key = key
        self.n = instance.n_in
        self.m = m if m is not None else max(1, (instance.q - 1).bit_length())
        if instance.q > (1 << self.m):
            raise ValueError("m too small to embed Z_q outputs")
        self._graph = prf_graph(instance, key) if use_graph else None

    def __call__(self, x: int) -> int:
        if self._graph is not None:
            return int(self._graph[x])
        return prf_eval(self.instance, self.key, int_to_bits(x, self.n))

    def apply(self, x_bits: str) -> int:
        return self(bits_to_int(validate_bits(x_bits, self.n)))


def exact_evaluator_from_key(instance: Instance, key: SecretKey) -> "KeyEvaluator":
    return KeyEvaluator(instance, key)


class KeyEvaluator:
    """Exact evaluator of the parameter-appended distribution, built from a
    known key: mass 2**-n on records whose parameters match the instance and
    whose y is the chain value, 0 everywhere else."""

    def __init__(self, instance: Instance, key: SecretKey):
        if key.q != instance.q:
            raise ValueError("key modulus does not match the instance")
        self.instance = instance
        self.key = key

    def mass(self, x: str, y: int) -> Fraction:
        inst = self.instance
        validate_bits(x, inst.n_in)
        if not 0 <= y < inst.q:
            raise ValueError(f"malformed record: y = {y} outside [0, {inst.q})")
        if prf_eval(inst, self.key, x) == y:
            return Fraction(1, 1 << inst.n_in)
        return _ZERO

    def mass_record(self, rec: SampleRecord) -> Fraction:
        if rec.params != (self.instance.p, self.instance.g, self.instance.ga):
            return _ZERO
        return self.mass(rec.x, rec.y)

    def xy_evaluator(self, m: int | None = None) -> Evaluator:
        """Materialize the explicit x||y support (2**n entries)."""
        inst = self.instance
        n = inst.n_in
        if n > 22:
            raise ValueError("support materialization capped at n <= 22")
        m = m if m is not None else max(1, (inst.q - 1).bit_length())
        graph = prf_graph(inst, self.key)
        u = Fraction(1, 1 << n)
        support = {
            int_to_bits(x, n) + int_to_bits(int(graph[x]), m): u
            for x in range(1 << n)
        }
        return Evaluator(n, m, support=support)


# ---------------------------------------------------------------------------
# Learners
# ---------------------------------------------------------------------------

def key_recovery_learner(sample: SampleRecord) -> LearnedModel:
    """Recover the secret key from one parameter-appended sample.

    Verifies the appended parameters, then walks the evaluation chain
    backwards: b_n = y and b_{j-1} = invert(x_j, b_j), one discrete log per
    input bit. Every step is a bijection, so b_0 is the key exactly and the
    derived evaluator matches the target with total variation 0.
    """
    inst = sample.params_instance()
    b = sample.y
    for ch in reversed(sample.x):
        b = invert_chain_step(inst, int(ch), b)
    payload = {
        "k": b,
        "p": inst.p,
        "q": inst.q,
        "g": inst.g,
        "ga": inst.ga,
        "n_in": inst.n_in,
        "dlog_calls": len(sample.x),
    }
    return LearnedModel(kind="exact-key", payload=payload)


def histogram_learner(samples) -> LearnedModel:
    """Empirical-frequency baseline: mass count/N on seen records, 0 off."""
    samples = list(samples)
    if not samples:
        raise ValueError("histogram learner needs at least one sample")
    params = samples[0].params
    counts: dict = {}
    for rec in samples:
        if rec.params != params:
            raise MixedParams(f"sample params {rec.params} != {params}")
        counts[(rec.x, rec.y)] = counts.get((rec.x, rec.y), 0) + 1
    p, g, ga = params
    payload = {
        "n": len(samples[0].x),
        "total": len(samples),
        "p": p,
        "g": g,
        "ga": ga,
        "counts": counts,
    }
    return LearnedModel(kind="histogram", payload=payload)


def uniform_baseline(n: int, m: int) -> LearnedModel:
    """Evaluator assigning 2**-(n+m) to every record."""
    if n + m > 40:
        raise ValueError("uniform baseline capped at n + m <= 40")
    return LearnedModel(kind="uniform", payload={"n": n, "m": m})


# ---------------------------------------------------------------------------
# Model evaluation against the true target
# ---------------------------------------------------------------------------

def histogram_xy_evaluator(model: LearnedModel, m: int | None = None) -> Evaluator:
    if model.kind != "histogram":
        raise ValueError("not a histogram model")
    pl = model.payload
    n = pl["n"]
    q = (pl["p"] - 1) // 2
    m = m if m is not None else max(1, (q - 1).bit_length())
    total = pl["total"]
    support: dict = {}
    for (x, y), c in pl["counts"].items():
        support[x + int_to_bits(y, m)] = Fraction(c, total)
    return Evaluator(n, m, support=support)


def model_tv_to_target(model: LearnedModel, instance: Instance,
                       true_key: SecretKey) -> Fraction:
    """Exact TV between a learned model and the target it was trained on.

    Histogram models go through the generic explicit-support closed form.
    Exact-key models compare full output graphs (a key mismatch moves every
    diagonal cell, a match moves none). The uniform model admits a direct
    closed form: 1 - 2**-m against any noiseless uniform-input target.
    """
    n = instance.n_in
    if model.kind == "exact-key":
        if model.payload["n_in"] != n or (model.payload["p"], model.payload["g"],
                                          model.payload["ga"]) != (instance.p, instance.g, instance.ga):
            return Fraction(1)
        learned = prf_graph(instance, SecretKey(k=model.payload["k"], q=instance.q))
        truth = prf_graph(instance, true_key)
        mismatches = int(np.count_nonzero(learned != truth))
        return Fraction(mismatches, 1 << n)
    if model.kind == "histogram":
        m = max(1, (instance.q - 1).bit_length())
        ev = histogram_xy_evaluator(model, m=m)
        view = PrfFunctionView(instance, true_key, m=m,
                               use_graph=instance.p < (1 << 31) and n <= 22)
        return tv_against_induced(ev, InducedSpec(f=view))
    return uniform_model_tv(model.payload["n"], model.payload["m"])


def uniform_model_tv(n: int, m: int) -> Fraction:
    """TV of the uniform record evaluator to any noiseless uniform-input
    induced target with m output bits: 1 - 2**-m (equals 1 - 2**-n in the
    matched-dimension case m = n)."""
    return 1 - Fraction(1, 1 << m)
