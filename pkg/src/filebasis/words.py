"""Reduced group words over a finite alphabet, run-length encoded.

A word is stored as maximal runs ``(index, exponent)`` with nonzero
exponents and distinct adjacent indices, so it is freely reduced by
construction.  Exponents are plain Python ints (arbitrary precision),
which matters because the group construction produces exponents in the
hundreds even for its smallest instances.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence


class MalformedWordError(ValueError):
    """A letter index is outside the alphabet, or word text does not parse."""


# A group letter: (basic letter index, sign), sign in {+1, -1}.
Letter = tuple[int, int]


def inverse_letter(letter: Letter) -> Letter:
    return (letter[0], -letter[1])


def letter_rank(letter: Letter) -> int:
    """Position of a group letter in the order x_1 < x_1^-1 < x_2 < ... < x_n^-1."""
    index, sign = letter
    return 2 * (index - 1) + (0 if sign > 0 else 1)


def rank_letter(rank: int) -> Letter:
    return (rank // 2 + 1, 1 if rank % 2 == 0 else -1)


@dataclass(frozen=True)
class Word:
    """A freely reduced group word in run-normal form."""

    runs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for index, exp in self.runs:
            if index < 1:
                raise MalformedWordError(f"letter index {index} out of range")
            if exp == 0:
                raise MalformedWordError("zero-exponent run")
            if index == prev:
                raise MalformedWordError("adjacent runs with equal indices")
            prev = index

    # -- construction ----------------------------------------------------

    @staticmethod
    def from_letters(letters: Sequence[Letter]) -> "Word":
        """Freely reduce a letter sequence into run-normal form."""
        runs: list[list[int]] = []
        for index, sign in letters:
            if index < 1:
                raise MalformedWordError(f"letter index {index} out of range")
            if runs and runs[-1][0] == index:
                runs[-1][1] += sign
                if runs[-1][1] == 0:
                    runs.pop()
            else:
                runs.append([index, sign])
        return Word(tuple((i, e) for i, e in runs))

    @staticmethod
    def from_runs(runs: Sequence[tuple[int, int]]) -> "Word":
        """Build a word from arbitrary runs, merging and cancelling as needed."""
        letters: list[Letter] = []
        for index, exp in runs:
            sign = 1 if exp > 0 else -1
            letters.extend((index, sign) for _ in range(abs(exp)))
        return Word.from_letters(letters)

    # -- basic queries ---------------------------------------------------

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.runs)

    def __bool__(self) -> bool:
        return bool(self.runs)

    def letters(self) -> Iterator[Letter]:
        for index, exp in self.runs:
            sign = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield (index, sign)

    def letter_tuple(self) -> tuple[Letter, ...]:
        return tuple(self.letters())

    def max_index(self) -> int:
        return max((i for i, _ in self.runs), default=0)

    # -- group operations ------------------------------------------------

    def inverse(self) -> "Word":
        return Word(tuple((i, -e) for i, e in reversed(self.runs)))

    def __mul__(self, other: "Word") -> "Word":
        return Word.from_runs(self.runs + other.runs)

    def conjugate_by(self, a: "Word") -> "Word":
        """a * self * a^-1."""
        return a * self * a.inverse()

    def cyclically_reduce(self) -> tuple["Word", "Word"]:
        """Return (core, conjugator) with self = conjugator * core * conjugator^-1."""
        letters = self.letter_tuple()
        i, j = 0, len(letters) - 1
        while i < j and letters[i] == inverse_letter(letters[j]):
            i += 1
            j -= 1
        return Word.from_letters(letters[i : j + 1]), Word.from_letters(letters[:i])

    def is_cyclically_reduced(self) -> bool:
        core, _ = self.cyclically_reduce()
        return core == self

    # -- regularity ------------------------------------------------------

    def is_regular(self) -> bool:
        indices = [i for i, _ in self.runs]
        return all(a < b for a, b in zip(indices, indices[1:]))

    def is_counter_regular(self) -> bool:
        return self.inverse().is_regular()

    def relabel_mirror(self, n: int) -> "Word":
        """Replace each letter x_i^s by x_{n+1-i}^{-s}; involutive."""
        if self.max_index() > n:
            raise MalformedWordError("letter index exceeds alphabet size")
        return Word(tuple((n + 1 - i, -e) for i, e in self.runs))

    # -- text form -------------------------------------------------------

    def __str__(self) -> str:
        parts = []
        for index, exp in self.runs:
            parts.append(f"x{index}" if exp == 1 else f"x{index}^{exp}")
        return " ".join(parts)


EMPTY = Word()

_TOKEN = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, n: int | None = None) -> Word:
    """Parse the grammar of whitespace-separated `x<i>` / `x<i>^<k>` tokens."""
    runs = []
    for token in text.split():
        m = _TOKEN.match(token)
        if m is None:
            raise MalformedWordError(f"bad token {token!r}")
        index = int(m.group(1))
        exp = int(m.group(2)) if m.group(2) is not None else 1
        if index < 1 or (n is not None and index > n):
            raise MalformedWordError(f"letter index {index} out of range")
        runs.append((index, exp))
    return Word.from_runs(runs)


def reduce_letters(raw: Sequence[Letter], n: int) -> Word:
    """Free reduction of a raw letter sequence over an n-letter alphabet."""
    for index, sign in raw:
        if not 1 <= index <= n:
            raise MalformedWordError(f"letter index {index} out of 1..{n}")
        if sign not in (1, -1):
            raise MalformedWordError(f"letter sign {sign} must be +1 or -1")
    return Word.from_letters(raw)


# -- deg-lex order -------------------------------------------------------


def deglex_key(w: Word) -> tuple[int, tuple[int, ...]]:
    return (len(w), tuple(letter_rank(l) for l in w.letters()))


def deglex_compare(u: Word, v: Word) -> int:
    """-1, 0 or 1: compare by length first, then letter-by-letter."""
    ku, kv = deglex_key(u), deglex_key(v)
    return (ku > kv) - (ku < kv)


def _min_allowed_rank(prev_rank: int | None) -> int:
    if prev_rank is None:
        return 0
    forbidden = prev_rank ^ 1  # rank of the inverse letter
    return 1 if forbidden == 0 else 0


def deglex_successor(w: Word, n: int) -> Word:
    """Least reduced word strictly greater than w in deg-lex."""
    if w.max_index() > n:
        raise MalformedWordError("letter index exceeds alphabet size")
    ranks = [letter_rank(l) for l in w.letters()]
    length = len(ranks)
    for i in reversed(range(length)):
        prev = ranks[i - 1] if i > 0 else None
        for r in range(ranks[i] + 1, 2 * n):
            if prev is not None and r == (prev ^ 1):
                continue
            new = ranks[:i] + [r]
            while len(new) < length:
                new.append(_min_allowed_rank(new[-1]))
            return Word.from_letters([rank_letter(r_) for r_ in new])
    # w is the largest word of its length; next is x_1^(length+1)
    return Word(((1, length + 1),))


def iter_reduced_words(n: int, start: Word = EMPTY) -> Iterator[Word]:
    """All reduced words in deg-lex order, starting from `start` (inclusive)."""
    w = start
    while True:
        yield w
        w = deglex_successor(w, n)


def _regular_rank_runs(n: int, start_rank: int, remaining: int) -> Iterator[list[tuple[int, int]]]:
    # Yields run lists [(rank, count), ...] in lex order of the flattened sequence.
    if remaining == 0:
        yield []
        return
    for r in range(start_rank, 2 * n):
        next_start = (r // 2 + 1) * 2  # next run must use a strictly larger index
        for c in range(remaining, 0, -1):
            for tail in _regular_rank_runs(n, next_start, remaining - c):
                yield [(r, c)] + tail


def iter_regular_words(n: int, max_length: int) -> Iterator[Word]:
    """Regular words x_1^{k_1}...x_n^{k_n} in deg-lex order, lengths 0..max_length."""
    yield EMPTY
    for length in range(1, max_length + 1):
        for rank_runs in _regular_rank_runs(n, 0, length):
            runs = []
            for rank, count in rank_runs:
                index, sign = rank_letter(rank)
                runs.append((index, sign * count))
            yield Word(tuple(runs))
