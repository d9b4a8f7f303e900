"""Brute-force simplex-grid minimizer used to cross-check the solver.

Enumerates every table whose entries are multiples of 1/granularity,
restricted to the support of the reference, filters to the pinned-marginal
constraints at tolerance 1e-6, and evaluates the same bracketed divergence
objective as the solver.  Intended for tests and golden-value generation,
not production paths.

When one pin's target lands exactly on the grid, enumeration happens per
marginal cell (compositions of that cell's integer mass over its support
cells), which keeps the point count far below naive full-simplex
enumeration; remaining pins are enforced by filtering.  The point count is
checked against ``cap`` before any enumeration starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, BudgetExceededError
from .solver import EntropyBudget, MarginalPin, _marg_map

GRID_POINT_CAP = 10**7
_CHUNK = 1 << 16
PIN_FILTER_TOL = 1e-6


@dataclass
class GridResult:
    value: float
    table: np.ndarray | None
    points: int


def _compositions(total: int, parts: int) -> np.ndarray:
    """All compositions of ``total`` into ``parts`` non-negative ints."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    rows = []
    for first in range(total, -1, -1):
        rest = _compositions(total - first, parts - 1)
        rows.append(
            np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest])
        )
    return np.vstack(rows)


def _grid_exact(target: np.ndarray, g: int) -> np.ndarray | None:
    scaled = target * g
    rounded = np.rint(scaled)
    if np.abs(scaled - rounded).max() > 1e-6:
        return None
    return rounded.astype(np.int64)


def grid_minimize(
    ref: np.ndarray,
    pins=(),
    bracket=None,
    granularity: int = 48,
    cap: int = GRID_POINT_CAP,
) -> GridResult:
    """Exhaustive grid search over the constrained simplex; value in bits."""
    shape = ref.shape
    flat_ref = np.asarray(ref, dtype=float).reshape(-1)
    support = np.flatnonzero(flat_ref > 0)
    m = support.size
    log_ref = np.log2(flat_ref[support])
    g = int(granularity)

    pins = list(pins)
    pin_maps = []
    for pin in pins:
        mp, size = _marg_map(shape, pin.axes, support)
        pin_maps.append((mp, np.asarray(pin.target, dtype=float).reshape(-1), size))

    # Choose a base pin whose target is grid-exact; enumerate per marginal
    # cell.  Prefer the pin splitting the support into the most groups.
    base = None
    for idx in np.argsort([-size for _, _, size in pin_maps], kind="stable"):
        mp, tgt, size = pin_maps[idx]
        ints = _grid_exact(tgt, g)
        if ints is not None:
            base = (int(idx), mp, ints, size)
            break

    if base is None:
        groups = [np.arange(m)]
        masses = [g]
        filter_pins = list(range(len(pins)))
    else:
        bidx, mp, ints, size = base
        groups, masses = [], []
        for a in range(size):
            cells = np.flatnonzero(mp == a)
            k = int(ints[a])
            if cells.size == 0:
                if k > 0:
                    return GridResult(math.inf, None, 0)
                continue
            groups.append(cells)
            masses.append(k)
        filter_pins = [i for i in range(len(pins)) if i != bidx]

    total_points = 1
    for cells, k in zip(groups, masses):
        total_points *= math.comb(k + cells.size - 1, cells.size - 1)
        if total_points > cap:
            raise BudgetExceededError("grid enumeration", total_points, cap)
    if total_points == 0:
        return GridResult(math.inf, None, 0)

    comp = [_compositions(k, cells.size) for cells, k in zip(groups, masses)]
    sizes = np.array([c.shape[0] for c in comp], dtype=np.int64)
    strides = np.ones(len(comp), dtype=np.int64)
    for i in range(len(comp) - 2, -1, -1):
        strides[i] = strides[i + 1] * sizes[i + 1]

    # one-hot marginal operators for filter pins and bracket groups
    def onehot(mapping: np.ndarray, size: int) -> np.ndarray:
        out = np.zeros((m, size))
        out[np.arange(m), mapping] = 1.0
        return out

    filters = []
    for i in filter_pins:
        mp, tgt, size = pin_maps[i]
        filters.append((onehot(mp, size), tgt))

    brackets = []
    for b in bracket or ():
        jmap, jsize = _marg_map(shape, b.joint_axes, support)
        cmap, csize = _marg_map(shape, b.cond_axes, support)
        brackets.append((onehot(jmap, jsize), onehot(cmap, csize), b.budget))

    col_of_group = [np.asarray(cells) for cells in groups]

    best_val = math.inf
    best_row = None
    evaluated = 0
    for lo in range(0, total_points, _CHUNK):
        hi = min(lo + _CHUNK, total_points)
        idx = np.arange(lo, hi, dtype=np.int64)
        chunk = np.zeros((idx.size, m))
        for gi, (cells, cmat) in enumerate(zip(col_of_group, comp)):
            digits = (idx // strides[gi]) % sizes[gi]
            chunk[:, cells] = cmat[digits]
        chunk /= g

        keep = np.ones(idx.size, dtype=bool)
        for oh, tgt in filters:
            marg = chunk @ oh
            keep &= np.abs(marg - tgt).max(axis=1) <= PIN_FILTER_TOL
        if not np.any(keep):
            continue
        pi = chunk[keep]
        kept_idx = idx[keep]
        evaluated += pi.shape[0]

        with np.errstate(divide="ignore", invalid="ignore"):
            terms = pi * (np.log2(np.where(pi > 0, pi, 1.0)) - log_ref)
        vals = terms.sum(axis=1)

        if brackets:
            inner = np.full(pi.shape[0], math.inf)
            for oh_j, oh_c, budget in brackets:
                mj = pi @ oh_j
                mc = pi @ oh_c
                hj = -(np.where(mj > 0, mj * np.log2(np.where(mj > 0, mj, 1.0)), 0.0)).sum(axis=1)
                hc = -(np.where(mc > 0, mc * np.log2(np.where(mc > 0, mc, 1.0)), 0.0)).sum(axis=1)
                inner = np.minimum(inner, (hj - hc) - budget)
            vals = vals + 0.5 * np.clip(inner, 0.0, None)

        pos = int(np.argmin(vals))
        if vals[pos] < best_val:
            best_val = float(vals[pos])
            best_row = (int(kept_idx[pos]), pi[pos].copy())

    if best_row is None:
        return GridResult(math.inf, None, evaluated)
    table = np.zeros(flat_ref.size)
    table[support] = best_row[1]
    return GridResult(best_val, table.reshape(shape), evaluated)
