"""Parameter validation and the inductive construction of the relator family.

Relators have the shape r_i = x_1^{m_i} x_2^{m_i} ... x_n^{m_i} w_i^{-1}
with m_i = N|w_i| + i, where w_i is the deg-lex-least reduced word that
does not start with x_1^{+-1}, does not end with x_n^{+-1}, and is not
equal (under the bounded equality test) to any regular word within the
completeness length bound.  All inequality checks use exact rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import decision
from .words import EMPTY, Word, iter_reduced_words, iter_regular_words, parse_word


class MalformedParamsError(ValueError):
    pass


class ConstructionError(ValueError):
    pass


_Q_MAX_DEN = 10**6


def least_rational_geq(x: Fraction, max_den: int) -> Fraction:
    """The least rational >= x with denominator at most max_den."""
    if x.denominator <= max_den:
        return x
    lo = x.limit_denominator(max_den)
    if lo >= x:
        return lo
    # lo = a/b is the best approximation from below; its right Farey
    # neighbour c/d with the largest d <= max_den satisfies c*b - a*d = 1.
    a, b = lo.numerator, lo.denominator
    if b == 1:
        return Fraction(a * max_den + 1, max_den)
    # solve a*d = -1 (mod b), then push d as high as possible under max_den
    d = (-pow(a, -1, b)) % b
    d += ((max_den - d) // b) * b
    c = (1 + a * d) // b
    return Fraction(c, d)


@dataclass(frozen=True)
class ConstructionParams:
    """n, lambda1, N plus the derived constants lambda2, mu, q."""

    n: int
    lambda1: Fraction
    N: int
    q_override: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise MalformedParamsError(f"n must be positive, got {self.n}")
        if not isinstance(self.lambda1, Fraction):
            object.__setattr__(self, "lambda1", Fraction(self.lambda1))
        if not 0 < self.lambda1 < 1:
            raise MalformedParamsError(f"lambda1 must lie in (0,1), got {self.lambda1}")
        if self.N < 1:
            raise MalformedParamsError(f"N must be positive, got {self.N}")

    @property
    def lambda2(self) -> Fraction:
        return Fraction(2, self.n)

    @property
    def mu(self) -> Fraction:
        return self.lambda1 + 5 * self.lambda2

    @property
    def q(self) -> Fraction:
        """Isoperimetric constant: least rational >= 1/(1-2*mu), denominator-capped.

        When mu >= 1/2 the bound 1/(1-2*mu) is meaningless (negative or
        infinite), which happens at toy alphabet sizes; q then falls back
        to 1 so the derived edge budgets stay positive.
        """
        if self.q_override is not None:
            return self.q_override
        if self.mu >= Fraction(1, 2):
            return Fraction(1)
        return least_rational_geq(1 / (1 - 2 * self.mu), _Q_MAX_DEN)


@dataclass(frozen=True)
class ParamCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ParamReport:
    checks: tuple[ParamCheck, ...]
    theorem_scale: bool

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
            "all_passed": self.all_passed,
            "theorem_scale": self.theorem_scale,
        }


def validate_params(p: ConstructionParams) -> ParamReport:
    """Exact-rational pass/fail for each inequality the construction needs."""
    n, l1 = p.n, p.lambda1
    l2, mu = p.lambda2, p.mu
    checks = []

    lhs_21 = (4 + Fraction(2 * n, 1) * l1 / (1 - l1)) * l1
    checks.append(
        ParamCheck(
            "small-cancellation bound",
            lhs_21 <= Fraction(1, n),
            f"(4 + 2n*l1/(1-l1))*l1 = {lhs_21} vs 1/n = {Fraction(1, n)}",
        )
    )
    checks.append(
        ParamCheck(
            "exponent-growth bound",
            l1 * n * p.N >= 1,
            f"l1*n*N = {l1 * n * p.N} vs 1",
        )
    )
    lhs_51 = 2 * l1 + 13 * l2
    checks.append(
        ParamCheck(
            "selection-density bound",
            lhs_51 < 1,
            f"2*l1 + 13*l2 = {lhs_51} vs 1",
        )
    )
    checks.append(
        ParamCheck("mu below one-half", mu < Fraction(1, 2), f"mu = {mu} vs 1/2")
    )

    lhs_52 = 1 - 2 * mu - 2 * l1 - Fraction(2 * n, 1) * l1 * l1 / (1 - l1)
    rhs_52 = 1 - Fraction(21, n)
    scale_ok = n >= 63 and lhs_52 >= rhs_52
    return ParamReport(tuple(checks), theorem_scale=scale_ok)


@dataclass(frozen=True)
class Relator:
    i: int
    w: Word
    m: int
    r: Word


def regular_head(n: int, m: int) -> Word:
    """The word x_1^m x_2^m ... x_n^m."""
    return Word(tuple((j, m) for j in range(1, n + 1)))


def build_relator(p: ConstructionParams, i: int, w: Word, strict: bool = False) -> Relator:
    """Assemble relator i from its word w; m = N|w| + i.

    Structural identities are always asserted.  Shape and growth
    constraints on w are reported: with strict=True a violation raises,
    otherwise it is recorded by check_relator callers.  The non-strict
    default exists because toy parameter sets can violate the growth
    inequality while remaining useful test fixtures.
    """
    if i < 1:
        raise ConstructionError(f"relator index must be positive, got {i}")
    if w.max_index() > p.n:
        raise ConstructionError("w uses letters outside the alphabet")
    m = p.N * len(w) + i
    r = regular_head(p.n, m) * w.inverse()
    rel = Relator(i=i, w=w, m=m, r=r)
    if len(r) != p.n * m + len(w):
        raise ConstructionError("relator length does not match n*m + |w|")
    if strict:
        problems = check_relator(p, rel)
        if problems:
            raise ConstructionError("; ".join(problems))
    return rel


def check_relator(p: ConstructionParams, rel: Relator) -> list[str]:
    """Names of violated per-relator constraints (empty list when clean)."""
    problems = []
    if rel.m != p.N * len(rel.w) + rel.i:
        problems.append("exponent is not N|w| + i")
    if rel.r != regular_head(p.n, rel.m) * rel.w.inverse():
        problems.append("relator is not x_1^m...x_n^m w^-1")
    if len(rel.r) != p.n * rel.m + len(rel.w):
        problems.append("length identity n*m + |w| fails")
    core, _ = rel.r.cyclically_reduce()
    if core != rel.r:
        problems.append("relator is not cyclically reduced")
    letters = rel.w.letter_tuple()
    if letters and letters[0][0] == 1:
        problems.append("w starts with x_1^{+-1}")
    if letters and letters[-1][0] == p.n:
        problems.append("w ends with x_n^{+-1}")
    if rel.w.is_regular():
        problems.append("w is regular")
    if p.lambda1 * (p.n * rel.m + len(rel.w)) < len(rel.w):
        problems.append("growth inequality l1*(n*m + |w|) >= |w| fails")
    return problems


@dataclass(frozen=True)
class Presentation:
    params: ConstructionParams
    relators: tuple[Relator, ...] = ()
    truncated: bool = False  # generation stopped early on budget exhaustion

    def validate(self) -> list[str]:
        """Re-check per-relator and cross-relator constraints."""
        problems = []
        for rel in self.relators:
            for issue in check_relator(self.params, rel):
                problems.append(f"relator {rel.i}: {issue}")
        ms = [rel.m for rel in self.relators]
        if len(set(ms)) != len(ms):
            problems.append("exponents m_i are not pairwise distinct")
        lengths = [len(rel.r) for rel in self.relators]
        if any(a > b for a, b in zip(lengths, lengths[1:])):
            problems.append("relator lengths are not nondecreasing")
        return problems

    def relator_words(self) -> list[Word]:
        return [rel.r for rel in self.relators]

    # -- JSON round-trip -------------------------------------------------

    def as_dict(self) -> dict:
        return {
            "n": self.params.n,
            "lambda1": str(self.params.lambda1),
            "N": self.params.N,
            "relators": [
                {"i": rel.i, "w": str(rel.w), "m": rel.m, "r": str(rel.r)}
                for rel in self.relators
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    @staticmethod
    def from_dict(data: dict) -> "Presentation":
        try:
            params = ConstructionParams(
                n=int(data["n"]), lambda1=Fraction(data["lambda1"]), N=int(data["N"])
            )
            relators = tuple(
                Relator(
                    i=int(item["i"]),
                    w=parse_word(item["w"], params.n),
                    m=int(item["m"]),
                    r=parse_word(item["r"], params.n),
                )
                for item in data.get("relators", [])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedParamsError(f"bad presentation data: {exc}") from exc
        return Presentation(params=params, relators=relators)

    @staticmethod
    def loads(text: str) -> "Presentation":
        return Presentation.from_dict(json.loads(text))


def _shape_ok(w: Word, n: int) -> bool:
    letters = w.letter_tuple()
    if not letters:
        return False
    return letters[0][0] != 1 and letters[-1][0] != n and not w.is_regular()


def next_w(
    p: ConstructionParams, relators: Sequence[Relator], budget: "decision.Budget"
) -> "decision.Outcome":
    """Deg-lex-least candidate word for the next relator.

    A candidate must avoid x_1^{+-1} at the start and x_n^{+-1} at the
    end, and must not be equal (bounded equality test) to any regular
    word of length up to (n+1)|w| + n^4 L.  With no relators yet the
    test collapses to free-group equality, where a reduced word equals a
    regular word only if it is itself regular, so shape filtering alone
    decides; this keeps step 1 fast even at large n.
    """
    n = p.n
    rel_words = [rel.r for rel in relators]
    L = max((len(r) for r in rel_words), default=0)
    scanned = 0
    for w in iter_reduced_words(n):
        scanned += 1
        if scanned > budget.max_states:
            return decision.Outcome(decision.EXCEEDED)
        if not _shape_ok(w, n):
            continue
        if not rel_words:
            return decision.Outcome(decision.YES, witness=w)
        bound = (n + 1) * len(w) + n**4 * L
        bound = min(bound, budget.max_word_len)
        matched = False
        exceeded = False
        for u in iter_regular_words(n, bound):
            out = decision.in_D(rel_words, u, w, budget, p.q, n=n)
            if out.is_yes:
                matched = True
                break
            if out.exceeded:
                exceeded = True
        if matched:
            continue
        if exceeded:
            return decision.Outcome(decision.EXCEEDED)
        return decision.Outcome(decision.YES, witness=w)
    raise AssertionError("unreachable: word enumeration is infinite")


def generate(
    p: ConstructionParams, count: int, budget: "decision.Budget"
) -> Presentation:
    """Run the inductive construction for `count` steps.

    Deterministic for fixed inputs.  The produced family never reaches a
    fixed point: the full relator set is infinite, so generation is
    bounded only by `count` and the budget.  Budget exhaustion truncates
    the output and sets the truncated flag.
    """
    relators: list[Relator] = []
    for step in range(1, count + 1):
        out = next_w(p, relators, budget)
        if out.exceeded:
            return Presentation(p, tuple(relators), truncated=True)
        relators.append(build_relator(p, step, out.witness))
    return Presentation(p, tuple(relators))
