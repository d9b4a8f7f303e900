"""Method-of-types machinery: empirical distributions with denominator n,
exact type-class counting, robust typicality, and constant-composition
sampling.

All combinatorial counts use exact arbitrary-width integers (multinomials
overflow 64-bit arithmetic quickly); entropies of types are computed in
floating point from the exact counts/n ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, BudgetExceededError
from .prob import Alphabet, JointPmf, Pmf

DEFAULT_TYPE_ENUM_BUDGET = 10**7


@dataclass(frozen=True)
class NType:
    """Empirical distribution with denominator ``n``: counts summing to n."""

    alphabet: Alphabet
    counts: tuple[int, ...]
    n: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if self.n < 1:
            raise ArgumentError(f"n must be >= 1, got {self.n}")
        if len(counts) != self.alphabet.size:
            raise ArgumentError(
                f"{self.alphabet.size} counts required, got {len(counts)}"
            )
        if any(c < 0 for c in counts):
            raise ArgumentError("counts must be non-negative")
        if sum(counts) != self.n:
            raise ArgumentError(f"counts sum to {sum(counts)}, expected n={self.n}")
        object.__setattr__(self, "counts", counts)

    def as_pmf(self) -> Pmf:
        return Pmf(self.alphabet, np.array(self.counts, dtype=float) / self.n)


@dataclass(frozen=True)
class JointNType:
    """Joint empirical distribution of a tuple of equal-length sequences."""

    axes: tuple[Alphabet, ...]
    counts: np.ndarray
    n: int

    def __post_init__(self):
        axes = tuple(self.axes)
        c = np.array(self.counts, dtype=np.int64)
        c.setflags(write=False)
        if self.n < 1:
            raise ArgumentError(f"n must be >= 1, got {self.n}")
        if c.shape != tuple(a.size for a in axes):
            raise ArgumentError(f"counts shape {c.shape} does not match axes")
        if np.any(c < 0):
            raise ArgumentError("counts must be non-negative")
        if int(c.sum()) != self.n:
            raise ArgumentError(f"counts sum to {int(c.sum())}, expected n={self.n}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "counts", c)

    def as_table(self) -> np.ndarray:
        return self.counts / self.n

    def marginal(self, axis: int) -> NType:
        drop = tuple(i for i in range(len(self.axes)) if i != axis)
        return NType(self.axes[axis], tuple(self.counts.sum(axis=drop)), self.n)


@dataclass(frozen=True)
class Sequence:
    """A length-n sequence of symbol indices over one alphabet."""

    alphabet: Alphabet
    symbols: np.ndarray

    def __post_init__(self):
        s = np.array(self.symbols, dtype=np.int64)
        s.setflags(write=False)
        if s.ndim != 1 or s.size < 1:
            raise ArgumentError("symbols must be a non-empty 1-d array")
        if np.any(s < 0) or np.any(s >= self.alphabet.size):
            raise ArgumentError(
                f"symbols out of range for alphabet of size {self.alphabet.size}"
            )
        object.__setattr__(self, "symbols", s)

    def __len__(self) -> int:
        return int(self.symbols.size)


def number_of_ntypes(alphabet_size: int, n: int) -> int:
    """Exact count of n-types over an alphabet: C(n + k - 1, k - 1)."""
    return math.comb(n + alphabet_size - 1, alphabet_size - 1)


def enumerate_ntypes(
    alphabet: Alphabet, n: int, budget: int = DEFAULT_TYPE_ENUM_BUDGET
) -> list[NType]:
    """All n-types over ``alphabet``, in descending lexicographic count order.

    The order is part of the contract: for a binary alphabet and n=2 the
    result is (2,0), (1,1), (0,2).
    """
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    count = number_of_ntypes(alphabet.size, n)
    if count > budget:
        raise BudgetExceededError("n-type enumeration", count, budget)
    out: list[NType] = []

    def rec(prefix: tuple[int, ...], remaining: int, slots: int) -> None:
        if slots == 1:
            out.append(NType(alphabet, prefix + (remaining,), n))
            return
        for c in range(remaining, -1, -1):
            rec(prefix + (c,), remaining - c, slots - 1)

    rec((), n, alphabet.size)
    return out


def type_of(seq: Sequence) -> NType:
    counts = np.bincount(seq.symbols, minlength=seq.alphabet.size)
    return NType(seq.alphabet, tuple(int(c) for c in counts), len(seq))


def joint_type_of(seqs: list[Sequence]) -> JointNType:
    """Joint type of equal-length sequences (one axis per sequence)."""
    if not seqs:
        raise ArgumentError("need at least one sequence")
    n = len(seqs[0])
    if any(len(s) != n for s in seqs):
        raise ArgumentError("sequences must have equal lengths")
    axes = tuple(s.alphabet for s in seqs)
    sizes = [a.size for a in axes]
    flat = np.zeros(n, dtype=np.int64)
    for s, k in zip(seqs, sizes):
        flat = flat * k + s.symbols
    counts = np.bincount(flat, minlength=int(np.prod(sizes, dtype=int)))
    return JointNType(axes, counts.reshape(sizes), n)


def _multinomial(n: int, counts) -> int:
    res = 1
    rem = n
    for c in counts:
        res *= math.comb(rem, int(c))
        rem -= int(c)
    return res


def type_class_size(t: NType) -> int:
    """Number of sequences with type ``t``: the exact multinomial n!/prod(counts!)."""
    return _multinomial(t.n, t.counts)


def conditional_type_class_size(joint: JointNType, given_axis: str) -> int:
    """Number of companion sequences with the given conditional type.

    For a joint type over (X, rest) and any fixed x-sequence of the matching
    x-type, counts the sequences over the remaining axes whose joint type
    with it equals ``joint``: the product over x-symbols of per-symbol
    multinomials.  Depends on the x-sequence only through its type.
    """
    labels = [a.label for a in joint.axes]
    if given_axis not in labels:
        raise ArgumentError(f"no axis {given_axis!r} in {labels}")
    axis = labels.index(given_axis)
    if len(joint.axes) < 2:
        raise ArgumentError("joint type must have at least two axes")
    c = np.moveaxis(joint.counts, axis, 0).reshape(joint.axes[axis].size, -1)
    total = 1
    for row in c:
        total *= _multinomial(int(row.sum()), row)
    return total


def _as_table(a) -> tuple[tuple[tuple[str, int], ...], np.ndarray]:
    """Normalize pmf-like or type-like values to (axis signature, table)."""
    if isinstance(a, JointPmf):
        return tuple((ax.label, ax.size) for ax in a.axes), a.table
    if isinstance(a, Pmf):
        return ((a.alphabet.label, a.alphabet.size),), a.weights
    if isinstance(a, JointNType):
        return tuple((ax.label, ax.size) for ax in a.axes), a.as_table()
    if isinstance(a, NType):
        return ((a.alphabet.label, a.alphabet.size),), np.array(a.counts) / a.n
    raise ArgumentError(f"cannot interpret {type(a).__name__} as a distribution")


def is_delta_close(a, b, delta: float) -> bool:
    """Entrywise closeness: max |a - b| < delta (strict).

    This criterion also defines the robust typical sets used by the
    detectors: a sequence is typical when its (joint) type is entrywise
    within the slack of the target distribution.
    """
    if delta <= 0:
        raise ArgumentError(f"delta must be positive, got {delta}")
    sig_a, ta = _as_table(a)
    sig_b, tb = _as_table(b)
    if sig_a != sig_b:
        raise ArgumentError(f"axis mismatch: {sig_a} vs {sig_b}")
    return bool(np.abs(ta - tb).max() < delta)


def sample_constant_composition(t: NType, rng: np.random.Generator) -> Sequence:
    """Uniform draw from the type class of ``t``: the sorted multiset of
    symbols followed by a uniform random permutation."""
    base = np.repeat(np.arange(t.alphabet.size, dtype=np.int64), t.counts)
    return Sequence(t.alphabet, rng.permutation(base))


def delta_prime(n: int, c: float = 1.0) -> float:
    """Typicality slack schedule: c * n**(-1/3).

    Vanishes with n but slower than n**(-1/2), so empirical types still
    concentrate inside the slack and the miss probability vanishes.
    """
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    return c * n ** (-1.0 / 3.0)
