"""Exact finite-alphabet probability arithmetic.

Dense tables over small product alphabets are the universal currency of the
package: every information measure, divergence, and channel composition runs
through the types defined here.

Conventions
-----------
* All logarithms are base 2; entropies, divergences, and rates are in bits.
* ``0 * log 0 = 0`` everywhere; a KL divergence is ``+inf`` exactly when the
  first argument puts mass outside the support of the second.
* Tables must sum to 1 within ``NORM_TOL`` at construction.  Out-of-tolerance
  inputs are rejected, never silently renormalized.
* Axis order is part of a joint table's identity.  Axes are addressed by
  their alphabet labels, which must be unique within a table.

All values are immutable after construction and safe to share across
concurrent tasks; every operation is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError

NORM_TOL = 1e-12

_LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class Alphabet:
    """A finite support set: a size and a short label used to address axes."""

    size: int
    label: str

    def __post_init__(self):
        if self.size < 1:
            raise ArgumentError(f"alphabet size must be >= 1, got {self.size}")
        if not self.label:
            raise ArgumentError("alphabet label must be non-empty")


def _freeze(table: np.ndarray) -> np.ndarray:
    out = np.array(table, dtype=float)
    out.setflags(write=False)
    return out


def _check_weights(table: np.ndarray, what: str) -> None:
    if np.any(table < 0):
        raise ArgumentError(f"{what} has negative entries")
    total = float(table.sum())
    if abs(total - 1.0) > NORM_TOL:
        raise ArgumentError(f"{what} sums to {total!r}, not 1 within {NORM_TOL}")


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over a single alphabet."""

    alphabet: Alphabet
    weights: np.ndarray

    def __post_init__(self):
        w = _freeze(self.weights)
        if w.shape != (self.alphabet.size,):
            raise ArgumentError(
                f"pmf for {self.alphabet.label!r} needs {self.alphabet.size} weights, "
                f"got shape {w.shape}"
            )
        _check_weights(w, f"pmf over {self.alphabet.label!r}")
        object.__setattr__(self, "weights", w)

    def as_joint(self) -> "JointPmf":
        return JointPmf((self.alphabet,), self.weights)


@dataclass(frozen=True)
class JointPmf:
    """Dense joint pmf over an ordered product of alphabets."""

    axes: tuple[Alphabet, ...]
    table: np.ndarray

    def __post_init__(self):
        axes = tuple(self.axes)
        labels = [a.label for a in axes]
        if len(set(labels)) != len(labels):
            raise ArgumentError(f"duplicate axis labels: {labels}")
        t = _freeze(self.table)
        shape = tuple(a.size for a in axes)
        if t.shape != shape:
            raise ArgumentError(f"table shape {t.shape} does not match axes {shape}")
        _check_weights(t, f"joint pmf over {labels}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "table", t)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.axes)

    def axis_index(self, label: str) -> int:
        for i, a in enumerate(self.axes):
            if a.label == label:
                return i
        raise ArgumentError(f"no axis {label!r} in {self.labels}")


@dataclass(frozen=True)
class CondPmf:
    """Conditional pmf: one distribution over ``to_axes`` per from-symbol.

    Stored as a dense table of shape ``from_shape + to_shape``; every row
    (one slice per from-symbol combination) sums to 1 within ``NORM_TOL``.
    """

    from_axes: tuple[Alphabet, ...]
    to_axes: tuple[Alphabet, ...]
    table: np.ndarray

    def __post_init__(self):
        fa, ta = tuple(self.from_axes), tuple(self.to_axes)
        labels = [a.label for a in fa + ta]
        if len(set(labels)) != len(labels):
            raise ArgumentError(f"duplicate axis labels: {labels}")
        t = _freeze(self.table)
        shape = tuple(a.size for a in fa) + tuple(a.size for a in ta)
        if t.shape != shape:
            raise ArgumentError(f"table shape {t.shape} does not match {shape}")
        if np.any(t < 0):
            raise ArgumentError("conditional pmf has negative entries")
        to_dims = tuple(range(len(fa), len(fa) + len(ta)))
        row_sums = t.sum(axis=to_dims)
        if np.any(np.abs(row_sums - 1.0) > NORM_TOL):
            bad = float(np.abs(row_sums - 1.0).max())
            raise ArgumentError(f"conditional rows deviate from 1 by {bad!r}")
        object.__setattr__(self, "from_axes", fa)
        object.__setattr__(self, "to_axes", ta)
        object.__setattr__(self, "table", t)

    @property
    def from_labels(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.from_axes)

    @property
    def to_labels(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.to_axes)


def _axis_indices(p: JointPmf, labels) -> tuple[int, ...]:
    return tuple(p.axis_index(lbl) for lbl in labels)


def _require_disjoint(*groups) -> None:
    seen: set[str] = set()
    for g in groups:
        for lbl in g:
            if lbl in seen:
                raise ArgumentError(f"axis subsets overlap on {lbl!r}")
            seen.add(lbl)


def _marginal_table(p: JointPmf, labels) -> np.ndarray:
    keep = _axis_indices(p, labels)
    drop = tuple(i for i in range(len(p.axes)) if i not in keep)
    t = p.table.sum(axis=drop) if drop else p.table
    # sum() above keeps the surviving axes in original order; reorder to match
    # the requested label order.
    order = [sorted(keep).index(i) for i in keep]
    return np.transpose(t, order)


def table_entropy(table: np.ndarray) -> float:
    """Entropy in bits of an arbitrary non-negative table summing to 1."""
    t = np.asarray(table, dtype=float)
    mask = t > 0
    return float(-(t[mask] * np.log2(t[mask])).sum())


def entropy(p: JointPmf, vars, given=()) -> float:
    """Conditional entropy H(vars | given) in bits.

    ``vars`` and ``given`` are disjoint sequences of axis labels.
    """
    vars = tuple(vars)
    given = tuple(given)
    if not vars:
        raise ArgumentError("vars must be non-empty")
    _require_disjoint(vars, given)
    h_joint = table_entropy(_marginal_table(p, vars + given))
    if not given:
        return h_joint
    return h_joint - table_entropy(_marginal_table(p, given))


def mutual_information(p: JointPmf, a, b, given=()) -> float:
    """Conditional mutual information I(a; b | given) in bits."""
    a, b, given = tuple(a), tuple(b), tuple(given)
    if not a or not b:
        raise ArgumentError("both variable subsets must be non-empty")
    _require_disjoint(a, b, given)
    return entropy(p, a, given) - entropy(p, a, b + given)


def _require_same_axes(p: JointPmf, q: JointPmf) -> None:
    if p.axes != q.axes:
        raise ArgumentError(f"axis mismatch: {p.labels} vs {q.labels}")


def kl_divergence(p: JointPmf, q: JointPmf) -> float:
    """D(p || q) in bits; +inf iff p puts mass where q has none."""
    _require_same_axes(p, q)
    pt, qt = p.table, q.table
    if np.any((pt > 0) & (qt == 0)):
        return math.inf
    mask = pt > 0
    return float((pt[mask] * (np.log2(pt[mask]) - np.log2(qt[mask]))).sum())


def tv_distance(p: JointPmf, q: JointPmf) -> float:
    """Total variation distance (1/2) * sum |p - q|, in [0, 1]."""
    _require_same_axes(p, q)
    return 0.5 * float(np.abs(p.table - q.table).sum())


def marginalize(p: JointPmf, keep) -> JointPmf:
    """Sum out all axes not named in ``keep``; result axes follow ``keep``'s order."""
    keep = tuple(keep)
    if not keep:
        raise ArgumentError("keep must name at least one axis")
    _require_disjoint(keep)
    axes = tuple(p.axes[p.axis_index(lbl)] for lbl in keep)
    return JointPmf(axes, _marginal_table(p, keep))


def compose(p: JointPmf, c: CondPmf) -> JointPmf:
    """Extend ``p`` by the channel ``c``: result(a, b) = p(a) * c(b | a).

    ``c.from_axes`` must match a subset of ``p``'s axes by label and size;
    the output axes are ``p.axes`` followed by ``c.to_axes``.
    """
    from_idx = []
    for a in c.from_axes:
        i = p.axis_index(a.label)
        if p.axes[i].size != a.size:
            raise ArgumentError(f"axis {a.label!r} size mismatch")
        from_idx.append(i)
    for a in c.to_axes:
        if a.label in p.labels:
            raise ArgumentError(f"output axis {a.label!r} already present in input")
    np_ax = len(p.axes)
    p_ids = list(range(np_ax))
    to_ids = list(range(np_ax, np_ax + len(c.to_axes)))
    c_ids = from_idx + to_ids
    out = np.einsum(p.table, p_ids, c.table, c_ids, p_ids + to_ids)
    return JointPmf(p.axes + c.to_axes, out)


def condition(p: JointPmf, on) -> CondPmf:
    """Split ``p`` into the conditional of the remaining axes given ``on``.

    Rows with zero conditioning mass are filled uniformly so the result is a
    valid channel; they never matter when re-composed against ``p``.
    """
    on = tuple(on)
    on_idx = _axis_indices(p, on)
    rest = tuple(i for i in range(len(p.axes)) if i not in on_idx)
    perm = on_idx + rest
    t = np.transpose(p.table, perm)
    from_axes = tuple(p.axes[i] for i in on_idx)
    to_axes = tuple(p.axes[i] for i in rest)
    to_dims = tuple(range(len(from_axes), len(from_axes) + len(to_axes)))
    marg = t.sum(axis=to_dims, keepdims=True)
    to_cells = int(np.prod([a.size for a in to_axes], dtype=int))
    rows = np.where(marg > 0, t / np.where(marg > 0, marg, 1.0), 1.0 / to_cells)
    return CondPmf(from_axes, to_axes, rows)


def channel_marginal(c: CondPmf, keep_to) -> CondPmf:
    """Restrict a channel's output to the named subset of its to-axes."""
    keep_to = tuple(keep_to)
    keep_idx = []
    for lbl in keep_to:
        try:
            keep_idx.append(c.to_labels.index(lbl))
        except ValueError:
            raise ArgumentError(f"no output axis {lbl!r} in {c.to_labels}") from None
    nf = len(c.from_axes)
    drop = tuple(nf + i for i in range(len(c.to_axes)) if i not in keep_idx)
    t = c.table.sum(axis=drop) if drop else c.table
    order = sorted(keep_idx)
    perm = list(range(nf)) + [nf + order.index(i) for i in keep_idx]
    return CondPmf(c.from_axes, tuple(c.to_axes[i] for i in keep_idx), np.transpose(t, perm))


def entropy_continuity_bound(theta: float, out_alphabet_size: int, conditional: bool) -> float:
    """Upper bound, in bits, on the entropy gap between two distributions at
    total-variation distance ``theta``.

    Unconditional form (valid for 0 < theta <= 1/4) bounds |H_p(X) - H_q(X)|
    by -2*theta*log2(2*theta/|X|).  Conditional form (valid for
    0 < theta <= 1/(2e)) bounds |H_p(Y|X) - H_q(Y|X)| by
    -5*theta*log2(4*theta/|Y|), where theta is measured between the joints.
    """
    if out_alphabet_size < 1:
        raise ArgumentError("alphabet size must be >= 1")
    limit = 1.0 / (2.0 * math.e) if conditional else 0.25
    if not (0.0 < theta <= limit):
        raise ArgumentError(
            f"theta={theta!r} outside validity range (0, {limit:.6g}]"
            f" for {'conditional' if conditional else 'unconditional'} bound"
        )
    if conditional:
        return -5.0 * theta * math.log2(4.0 * theta / out_alphabet_size)
    return -2.0 * theta * math.log2(2.0 * theta / out_alphabet_size)


# ---------------------------------------------------------------------------
# Serialization: axis labels, sizes, and a flat row-major weight array
# (row-major over axes in declared order, last axis fastest).
# ---------------------------------------------------------------------------

def joint_to_dict(p: JointPmf) -> dict:
    return {
        "axes": [{"label": a.label, "size": a.size} for a in p.axes],
        "weights": [float(x) for x in p.table.reshape(-1)],
    }


def joint_from_dict(doc: dict) -> JointPmf:
    try:
        axes = tuple(Alphabet(int(a["size"]), str(a["label"])) for a in doc["axes"])
        weights = np.asarray(doc["weights"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ArgumentError(f"malformed joint pmf document: {exc}") from exc
    shape = tuple(a.size for a in axes)
    if weights.size != int(np.prod(shape, dtype=int)):
        raise ArgumentError(
            f"weight array has {weights.size} entries, axes imply {np.prod(shape)}"
        )
    return JointPmf(axes, weights.reshape(shape))


def pmf_to_dict(p: Pmf) -> dict:
    return {
        "alphabet": {"label": p.alphabet.label, "size": p.alphabet.size},
        "weights": [float(x) for x in p.weights],
    }


def pmf_from_dict(doc: dict) -> Pmf:
    try:
        a = Alphabet(int(doc["alphabet"]["size"]), str(doc["alphabet"]["label"]))
        return Pmf(a, np.asarray(doc["weights"], dtype=float))
    except (KeyError, TypeError) as exc:
        raise ArgumentError(f"malformed pmf document: {exc}") from exc
