"""Budgeted decision procedures: bounded-diagram tests, word problem,
regular normal forms, conjugacy.

Every procedure is three-valued: "yes" and "no" are certified (a yes
carries a replayable witness, a no is produced only when the bounded
search space was exhausted or an abelianized obstruction exists), and
resource exhaustion is reported as "budget-exceeded", never converted
into a no.

The disc-diagram test uses an exact accounting identity: in any diagram
whose darts are partitioned between face boundary cycles and the contour,

    2 * edges = sum of face boundary lengths + contour length.

So a disc diagram with contour label z and at most E edges exists if and
only if z has a filling whose total face boundary length is at most
2E - |z|.  The search for fillings runs over cyclically reduced cyclic
words with relator-variant insertions, ordered by accumulated face area.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Optional, Sequence

from .words import EMPTY, Letter, Word, inverse_letter, iter_reduced_words, iter_regular_words

YES = "yes"
NO = "no"
EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class Budget:
    """Resource limits; exceeding any cap yields budget-exceeded, never a wrong answer."""

    max_edges: int = 10**6
    max_word_len: int = 200
    max_states: int = 20000

    def __post_init__(self) -> None:
        if self.max_edges <= 0 or self.max_word_len <= 0 or self.max_states <= 0:
            raise ValueError("all budget caps must be positive")


@dataclass(frozen=True)
class Outcome:
    value: str
    witness: object = None

    @property
    def is_yes(self) -> bool:
        return self.value == YES

    @property
    def is_no(self) -> bool:
        return self.value == NO

    @property
    def exceeded(self) -> bool:
        return self.value == EXCEEDED


@dataclass(frozen=True)
class FillWitness:
    """A disc diagram described by its contour word and face-insertion trace."""

    contour: tuple[Letter, ...]
    trace: tuple[tuple[int, tuple[Letter, ...]], ...]  # (insert position, face label)
    edges: int
    area: int  # total face boundary length


@dataclass(frozen=True)
class RewriteWitness:
    """Insertion chains from u and from v meeting at a common reduced word."""

    meeting_point: tuple[Letter, ...]
    steps_from_u: tuple[tuple[Letter, ...], ...]
    steps_from_v: tuple[tuple[Letter, ...], ...]


@dataclass(frozen=True)
class ConjugacyWitness:
    conjugator: Word
    certificate: object = None  # fill witness for s u s^-1 v^-1, if a filling was needed


# ---------------------------------------------------------------------------
# letter-sequence helpers


def _reduce_seq(seq: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for letter in seq:
        if out and out[-1] == inverse_letter(letter):
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def _cyclic_reduce_seq(seq: Sequence[Letter]) -> tuple[Letter, ...]:
    seq = _reduce_seq(seq)
    i, j = 0, len(seq) - 1
    while i < j and seq[i] == inverse_letter(seq[j]):
        i += 1
        j -= 1
    return tuple(seq[i : j + 1])


def _invert_seq(seq: Sequence[Letter]) -> tuple[Letter, ...]:
    return tuple(inverse_letter(l) for l in reversed(seq))


def _canon_cyclic(seq: Sequence[Letter]) -> tuple[Letter, ...]:
    """Least rotation in linear time (Booth's algorithm)."""
    if not seq:
        return ()
    seq = tuple(seq)
    s = seq + seq
    n = len(seq)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return s[k : k + n]


def relator_variants(relators: Iterable[Word]) -> tuple[tuple[Letter, ...], ...]:
    """All rotations of each relator and of its inverse, deduplicated."""
    variants: set[tuple[Letter, ...]] = set()
    for r in relators:
        for base in (r.letter_tuple(), r.inverse().letter_tuple()):
            for k in range(len(base)):
                variants.add(base[k:] + base[:k])
    return tuple(sorted(variants))


# ---------------------------------------------------------------------------
# abelianized obstruction


def _ab_vector(seq: Iterable[Letter], n: int) -> tuple[int, ...]:
    vec = [0] * n
    for index, sign in seq:
        vec[index - 1] += sign
    return tuple(vec)


def _ab_in_lattice(target: Sequence[int], generators: Sequence[Sequence[int]]) -> Optional[bool]:
    """Exact membership of `target` in the integer span of `generators`.

    Returns True/False when decidable by rational elimination (generators
    linearly independent, or no rational solution at all); None otherwise.
    """
    if all(t == 0 for t in target):
        return True
    if not generators:
        return False
    cols = len(generators)
    rows = [[Fraction(g[i]) for g in generators] + [Fraction(target[i])] for i in range(len(target))]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][cols] != 0:
            return False  # no rational solution
    if r < cols:
        return None  # dependent generators; integral membership not settled here
    solution = [rows[i][cols] for i in range(cols)]
    return all(x.denominator == 1 for x in solution)


def ab_obstructed(seq: Sequence[Letter], relators: Sequence[Word], n: int) -> bool:
    """True when the abelianization certifies that no filling of seq exists."""
    membership = _ab_in_lattice(
        _ab_vector(seq, n), [_ab_vector(r.letters(), n) for r in relators]
    )
    return membership is False


# ---------------------------------------------------------------------------
# area-bounded filling search (the disc-diagram engine)


@dataclass
class _SearchResult:
    found: bool
    trace: tuple = ()
    area: int = 0
    complete: bool = True  # search space exhausted without hitting a cap


def _fill_search(
    variants: Sequence[tuple[Letter, ...]],
    start: tuple[Letter, ...],
    area_bound: int,
    budget: Budget,
) -> _SearchResult:
    """Dijkstra over canonical cyclic words; cost = accumulated face boundary length."""
    start = _canon_cyclic(_cyclic_reduce_seq(start))
    if not start:
        return _SearchResult(found=True)
    if area_bound <= 0 or not variants:
        return _SearchResult(found=False)
    min_variant = min(len(v) for v in variants)
    best: dict[tuple[Letter, ...], int] = {start: 0}
    parent: dict[tuple[Letter, ...], tuple] = {start: None}
    heap: list[tuple[int, tuple[Letter, ...]]] = [(0, start)]
    complete = True
    while heap:
        area, word = heapq.heappop(heap)
        if area > best.get(word, -1):
            continue
        for variant in variants:
            child_area = area + len(variant)
            if child_area > area_bound:
                continue
            live = child_area + min_variant <= area_bound
            for j in range(len(word)):
                rotated = word[j:] + word[:j]
                child = _canon_cyclic(_cyclic_reduce_seq(rotated + variant))
                if not child:
                    trace = _rebuild_trace(parent, word) + ((j, variant),)
                    return _SearchResult(found=True, trace=trace, area=child_area)
                if not live:
                    # no further insertion fits under the bound, dead end
                    continue
                if len(child) > budget.max_word_len:
                    complete = False
                    continue
                if child_area < best.get(child, area_bound + 1):
                    if child not in best and len(best) >= budget.max_states:
                        # give up promptly rather than churn a capped frontier
                        return _SearchResult(found=False, complete=False)
                    best[child] = child_area
                    parent[child] = (word, j, variant)
                    heapq.heappush(heap, (child_area, child))
    return _SearchResult(found=False, complete=complete)


def _rebuild_trace(parent: dict, word: tuple) -> tuple:
    steps = []
    while parent.get(word) is not None:
        prev, j, variant = parent[word]
        steps.append((j, variant))
        word = prev
    return tuple(reversed(steps))


def replay_fill(witness: FillWitness, relators: Sequence[Word]) -> bool:
    """Independent replay of a fill witness by pure free/cyclic reduction."""
    allowed = set(relator_variants(relators))
    word = _canon_cyclic(_cyclic_reduce_seq(witness.contour))
    area = 0
    for j, variant in witness.trace:
        if variant not in allowed:
            return False
        if word:
            if j >= len(word):
                return False
            word = _canon_cyclic(_cyclic_reduce_seq(word[j:] + word[:j] + variant))
        else:
            word = _canon_cyclic(_cyclic_reduce_seq(variant))
        area += len(variant)
    if word:
        return False
    if area != witness.area:
        return False
    return 2 * witness.edges == area + len(witness.contour)


# ---------------------------------------------------------------------------
# the C and D predicates


def in_C(
    relators: Sequence[Word],
    E: Fraction | int,
    u: Word,
    v: Word,
    budget: Budget,
    n: int | None = None,
) -> Outcome:
    """Does a disc diagram over the relators with at most E edges have contour uv^-1?"""
    z = u.letter_tuple() + v.inverse().letter_tuple()
    zlen = len(z)
    e_genuine = floor(E)
    if n is None:
        n = max([u.max_index(), v.max_index()] + [r.max_index() for r in relators], default=1)
        n = max(n, 1)
    if ab_obstructed(z, relators, n):
        return Outcome(NO, witness="abelianized obstruction")
    e_cap = min(e_genuine, budget.max_edges)
    area_bound = 2 * e_cap - zlen
    if area_bound < 0:
        # even a degenerate diagram needs |z|/2 edges
        if 2 * e_genuine - zlen < 0:
            return Outcome(NO)
        return Outcome(EXCEEDED)
    core = _cyclic_reduce_seq(z)
    if not core:
        return Outcome(YES, witness=FillWitness(z, (), edges=zlen // 2, area=0))
    variants = relator_variants(relators)
    result = _fill_search(variants, core, area_bound, budget)
    if result.found:
        edges = (result.area + zlen) // 2
        return Outcome(YES, witness=FillWitness(z, result.trace, edges=edges, area=result.area))
    if result.complete and e_cap == e_genuine:
        return Outcome(NO)
    return Outcome(EXCEEDED)


def d_edge_bound(relators: Sequence[Word], u: Word, v: Word, q: Fraction) -> Fraction:
    length_cap = max((len(r) for r in relators), default=0)
    return Fraction(1 + q * length_cap, 2) * (len(u) + len(v))


def in_D(
    relators: Sequence[Word],
    u: Word,
    v: Word,
    budget: Budget,
    q: Fraction,
    n: int | None = None,
) -> Outcome:
    """The bounded-diagram equality test with E = (1+qL)/2 * (|u|+|v|)."""
    return in_C(relators, d_edge_bound(relators, u, v, q), u, v, budget, n=n)


# ---------------------------------------------------------------------------
# rewriting engine (bidirectional relator-insertion search)


def rewrite_search(relators: Sequence[Word], u: Word, v: Word, budget: Budget) -> Outcome:
    """Bidirectional search by relator insertion plus free reduction.

    A no is certified only when both reachable sets close without hitting
    any cap (which happens e.g. over an empty relator set).
    """
    start_u = u.letter_tuple()
    start_v = v.letter_tuple()
    variants = relator_variants(relators)
    sides: list[dict] = [{start_u: None}, {start_v: None}]
    frontiers = [[start_u], [start_v]]
    complete = True

    def chain(side: int, word) -> tuple:
        steps = []
        while word is not None:
            steps.append(word)
            word = sides[side][word]
        return tuple(reversed(steps))

    if start_u == start_v:
        return Outcome(YES, witness=RewriteWitness(start_u, (start_u,), (start_v,)))
    while frontiers[0] or frontiers[1]:
        side = 0 if frontiers[0] and (not frontiers[1] or len(sides[0]) <= len(sides[1])) else 1
        frontier = frontiers[side]
        frontiers[side] = []
        for word in frontier:
            for variant in variants:
                for j in range(len(word) + 1):
                    child = _reduce_seq(word[:j] + variant + word[j:])
                    if len(child) > budget.max_word_len:
                        complete = False
                        continue
                    if child in sides[side]:
                        continue
                    if len(sides[0]) + len(sides[1]) >= budget.max_states:
                        return Outcome(EXCEEDED)
                    sides[side][child] = word
                    frontiers[side].append(child)
                    if child in sides[1 - side]:
                        chains = (chain(0, child), chain(1, child))
                        return Outcome(
                            YES, witness=RewriteWitness(child, chains[0], chains[1])
                        )
    if complete:
        return Outcome(NO)
    return Outcome(EXCEEDED)


def replay_rewrite(witness: RewriteWitness, relators: Sequence[Word], u: Word, v: Word) -> bool:
    variants = set(relator_variants(relators))

    def check_chain(start: tuple[Letter, ...], steps: Sequence[tuple[Letter, ...]]) -> bool:
        if not steps or steps[0] != start or steps[-1] != witness.meeting_point:
            return False
        for a, b in zip(steps, steps[1:]):
            ok = any(
                b == _reduce_seq(a[:j] + variant + a[j:])
                for variant in variants
                for j in range(len(a) + 1)
            )
            if not ok:
                return False
        return True

    return check_chain(u.letter_tuple(), witness.steps_from_u) and check_chain(
        v.letter_tuple(), witness.steps_from_v
    )


# ---------------------------------------------------------------------------
# top-level procedures


def equals_in_G(presentation, u: Word, v: Word, budget: Budget, engine: str = "diagram") -> Outcome:
    """Bounded equality test in the presented group.

    A yes is always sound.  A no is exact for the bounded-diagram question;
    it implies inequality in the group whenever f(k) = qk is an isoperimetric
    function of the presentation (guaranteed at theorem scale, not at toy
    parameters).
    """
    if u == v:
        return Outcome(YES, witness=FillWitness(u.letter_tuple() + v.inverse().letter_tuple(), (), len(u), 0))
    relators = [rel.r for rel in presentation.relators]
    n = presentation.params.n
    if engine == "diagram":
        return in_D(relators, u, v, budget, presentation.params.q, n=n)
    if engine == "rewrite":
        return rewrite_search(relators, u, v, budget)
    if engine == "both":
        d = in_D(relators, u, v, budget, presentation.params.q, n=n)
        if d.is_yes:
            return d
        r = rewrite_search(relators, u, v, budget)
        if r.is_yes:
            return r
        if d.is_no:
            return d
        if r.is_no:
            return r
        return Outcome(EXCEEDED)
    raise ValueError(f"unknown engine {engine!r}")


def regular_normal_form(presentation, g: Word, budget: Budget, engine: str = "diagram") -> Outcome:
    """Deg-lex-least regular word equal to g within the bounded search."""
    n = presentation.params.n
    relators = [rel.r for rel in presentation.relators]
    length_cap = max((len(r) for r in relators), default=0)
    bound = (n + 1) * len(g) + n**4 * length_cap
    bound = min(bound, budget.max_word_len)
    scanned = 0
    exceeded_any = False
    for u in iter_regular_words(n, bound):
        scanned += 1
        if scanned > budget.max_states:
            return Outcome(EXCEEDED)
        out = equals_in_G(presentation, u, g, budget, engine=engine)
        if out.is_yes:
            return Outcome(YES, witness=u)
        if out.exceeded:
            exceeded_any = True
    return Outcome(EXCEEDED) if exceeded_any else Outcome(NO)


def _free_conjugacy(u: Word, v: Word) -> Optional[Word]:
    """A conjugator with s u s^-1 = v in the free group, or None."""
    core_u, a = u.cyclically_reduce()
    core_v, b = v.cyclically_reduce()
    if len(core_u) != len(core_v):
        return None
    cu = core_u.letter_tuple()
    cv = core_v.letter_tuple()
    if not cu:
        return b * a.inverse()
    for k in range(len(cu)):
        if cu[k:] + cu[:k] == cv:
            # core_v = p^-1 core_u p with p the first k letters of core_u
            p = Word.from_letters(cu[:k])
            return b * p.inverse() * a.inverse()
    return None


def are_conjugate(presentation, u: Word, v: Word, budget: Budget) -> Outcome:
    """Bounded conjugacy test following the trivial-word / annulus algorithm.

    The annular-diagram step is realized by cutting the annulus: a
    conjugator s of length at most q(|u|+|v|) plus a disc filling of
    s u s^-1 v^-1 with face area at most 2q(|u|+|v|) - |u| - |v|.
    """
    params = presentation.params
    relators = [rel.r for rel in presentation.relators]
    n = params.n
    q = params.q
    incomplete = False

    # Step 1: handle trivial inputs by the equality test.
    tu = equals_in_G(presentation, u, EMPTY, budget)
    tv = equals_in_G(presentation, v, EMPTY, budget)
    if tu.is_yes or tv.is_yes:
        eq = equals_in_G(presentation, u, v, budget)
        if eq.is_yes:
            return Outcome(YES, witness=ConjugacyWitness(EMPTY, eq.witness))
        return eq
    if tu.exceeded or tv.exceeded:
        incomplete = True

    # Free-group conjugacy is a sound fast path (degenerate annulus).
    s = _free_conjugacy(u, v)
    if s is not None:
        return Outcome(YES, witness=ConjugacyWitness(s))

    # Abelianized conjugacy obstruction: conjugate elements have equal images.
    diff = _ab_vector(u.letters(), n)
    vv = _ab_vector(v.letters(), n)
    diff = tuple(a - b for a, b in zip(diff, vv))
    if _ab_in_lattice(diff, [_ab_vector(r.letters(), n) for r in relators]) is False:
        return Outcome(NO, witness="abelianized obstruction")

    bound_len = ceil(q * (len(u) + len(v)))

    # Step 2: trivial words up to the length bound (budget-capped).
    trivial_words: list[Word] = []
    scanned = 0
    words_complete = True
    for w in iter_reduced_words(n):
        if len(w) > bound_len:
            break
        scanned += 1
        if scanned > budget.max_states:
            words_complete = False
            break
        if not w:
            continue
        t = equals_in_G(presentation, w, EMPTY, budget)
        if t.is_yes:
            trivial_words.append(w)
        elif t.exceeded:
            words_complete = False
    if not words_complete:
        incomplete = True

    # Steps 3-4: cut-annulus search over conjugators.
    face_words = relators + trivial_words
    variants = relator_variants(face_words)
    area_bound = 2 * bound_len - (len(u) + len(v))
    scanned = 0
    search_complete = True
    for s in iter_reduced_words(n):
        if len(s) > bound_len:
            break
        scanned += 1
        if scanned > budget.max_states:
            search_complete = False
            break
        z = _reduce_seq(
            s.letter_tuple()
            + u.letter_tuple()
            + s.inverse().letter_tuple()
            + v.inverse().letter_tuple()
        )
        if ab_obstructed(z, face_words, n):
            continue
        result = _fill_search(variants, z, area_bound, budget)
        if result.found:
            witness = FillWitness(z, result.trace, edges=(result.area + len(z)) // 2, area=result.area)
            return Outcome(YES, witness=ConjugacyWitness(s, witness))
        if not result.complete:
            search_complete = False
    if incomplete or not search_complete:
        return Outcome(EXCEEDED)
    return Outcome(NO)
