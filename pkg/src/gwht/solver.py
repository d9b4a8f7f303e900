"""Constrained divergence minimization over dense probability tables.

The single engine behind every exponent computation: minimize

    D(pi || ref) + 0.5 * [ min_g ( H_pi(group_g) - budget_g ) ]^+

over tables ``pi`` on the simplex, subject to pinned marginals.  The
divergence part alone is convex; the optional entropy-budget bracket makes
the objective non-convex, so the solver is multi-start.

Method: parameterize on the full product simplex; handle the linear
equality constraints by projection onto the affine set followed by
non-negativity clipping and renormalization sweeps; descend with projected
gradients and a backtracking line search.  Starts: the caller's preferred
tables, the reference itself, the uniform table, and seeded random draws.
The reduction over starts is a deterministic min (ties go to the lowest
start index), so results do not depend on scheduling even if starts run
concurrently.  For bracket-free problems an iterative proportional-fitting
refinement is run as an extra start; for a feasible problem it converges to
the exact divergence minimizer and typically wins.

Cells outside the support of ``ref`` are excluded up front: any mass there
would make the divergence infinite, so pinned targets that force such mass
make the problem infeasible and the engine reports +inf rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LOG2E = 1.0 / math.log(2.0)
_TINY = 1e-300
_GRAD_CLIP = 64.0


@dataclass(frozen=True)
class MarginalPin:
    """Pin the marginal of ``pi`` over the given cell axes to ``target``."""

    axes: tuple[int, ...]
    target: np.ndarray


@dataclass(frozen=True)
class EntropyBudget:
    """One bracket group: H(joint_axes) - H(cond_axes) compared to ``budget``.

    With joint_axes = X + Y_S and cond_axes = X this is the conditional
    entropy H(Y_S | X) under ``pi``.
    """

    name: str
    joint_axes: tuple[int, ...]
    cond_axes: tuple[int, ...]
    budget: float


@dataclass
class SolveResult:
    value: float
    table: np.ndarray | None
    iterations: int
    gap: float
    feasible: bool
    n_starts: int


def _marg_map(shape, axes, support_flat) -> tuple[np.ndarray, int]:
    """Map each support cell (flat index) to its flat marginal index."""
    if not axes:
        return np.zeros(support_flat.size, dtype=np.int64), 1
    multi = np.unravel_index(support_flat, shape)
    msizes = tuple(shape[a] for a in axes)
    idx = np.ravel_multi_index(tuple(multi[a] for a in axes), msizes)
    return idx.astype(np.int64), int(np.prod(msizes, dtype=int))


class _Problem:
    def __init__(self, ref: np.ndarray, pins, bracket):
        self.shape = ref.shape
        flat_ref = np.asarray(ref, dtype=float).reshape(-1)
        self.support_flat = np.flatnonzero(flat_ref > 0)
        self.ref = flat_ref[self.support_flat]
        self.log_ref = np.log2(self.ref)
        self.m = self.support_flat.size

        self.pin_maps: list[np.ndarray] = []
        self.pin_targets: list[np.ndarray] = []
        # total-mass row first; pins follow
        self.pin_maps.append(np.zeros(self.m, dtype=np.int64))
        self.pin_targets.append(np.array([1.0]))
        self.infeasible = False
        for pin in pins:
            mp, size = _marg_map(self.shape, pin.axes, self.support_flat)
            tgt = np.asarray(pin.target, dtype=float).reshape(-1)
            if tgt.size != size:
                raise ValueError("pin target shape mismatch")
            covered = np.zeros(size, dtype=bool)
            covered[mp] = True
            if np.any(tgt[~covered] > 1e-12):
                self.infeasible = True  # target mass outside ref support
            self.pin_maps.append(mp)
            self.pin_targets.append(tgt)

        self.b = np.concatenate(self.pin_targets)
        self.offsets = np.cumsum([0] + [t.size for t in self.pin_targets])
        n_rows = self.offsets[-1]
        # Gram matrix of the constraint rows: entries are support-cell counts
        # of marginal-cell intersections.
        gram = np.zeros((n_rows, n_rows))
        for i, (mi, ti) in enumerate(zip(self.pin_maps, self.pin_targets)):
            for j, (mj, tj) in enumerate(zip(self.pin_maps, self.pin_targets)):
                if j < i:
                    continue
                pair = mi * tj.size + mj
                cnt = np.bincount(pair, minlength=ti.size * tj.size)
                block = cnt.reshape(ti.size, tj.size)
                gram[
                    self.offsets[i] : self.offsets[i + 1],
                    self.offsets[j] : self.offsets[j + 1],
                ] = block
                gram[
                    self.offsets[j] : self.offsets[j + 1],
                    self.offsets[i] : self.offsets[i + 1],
                ] = block.T
        self.gram_pinv = np.linalg.pinv(gram, rcond=1e-12)

        self.bracket = []
        if bracket:
            for g in bracket:
                jmap, jsize = _marg_map(self.shape, g.joint_axes, self.support_flat)
                cmap, csize = _marg_map(self.shape, g.cond_axes, self.support_flat)
                self.bracket.append((g.name, jmap, jsize, cmap, csize, g.budget))

    # -- constraint algebra ------------------------------------------------

    def apply_a(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [
                np.bincount(mp, weights=x, minlength=t.size)
                for mp, t in zip(self.pin_maps, self.pin_targets)
            ]
        )

    def apply_at(self, lam: np.ndarray) -> np.ndarray:
        out = np.zeros(self.m)
        for i, mp in enumerate(self.pin_maps):
            out += lam[self.offsets[i] : self.offsets[i + 1]][mp]
        return out

    def affine_project(self, x: np.ndarray) -> np.ndarray:
        resid = self.apply_a(x) - self.b
        return x - self.apply_at(self.gram_pinv @ resid)

    def tangent_project(self, g: np.ndarray) -> np.ndarray:
        return g - self.apply_at(self.gram_pinv @ self.apply_a(g))

    def repair(self, x: np.ndarray, sweeps: int = 60) -> np.ndarray:
        y = x
        for _ in range(sweeps):
            y = self.affine_project(y)
            lo = y.min()
            if lo >= -1e-13:
                break
            y = np.clip(y, 0.0, None)
        return np.clip(y, 0.0, None)

    def residual(self, x: np.ndarray) -> float:
        return float(np.abs(self.apply_a(x) - self.b).max())

    # -- objective ----------------------------------------------------------

    def _bracket_terms(self, x: np.ndarray):
        inner = math.inf
        arg = None
        for name, jmap, jsize, cmap, csize, budget in self.bracket:
            mj = np.bincount(jmap, weights=x, minlength=jsize)
            mc = np.bincount(cmap, weights=x, minlength=csize)
            h = float(
                -(mj[mj > 0] * np.log2(mj[mj > 0])).sum()
                + (mc[mc > 0] * np.log2(mc[mc > 0])).sum()
            )
            val = h - budget
            if val < inner:
                inner = val
                arg = (jmap, mj, cmap, mc)
        return inner, arg

    def value(self, x: np.ndarray) -> float:
        mask = x > 0
        kl = float(
            (x[mask] * (np.log2(x[mask]) - self.log_ref[mask])).sum()
        )
        if not self.bracket:
            return kl
        inner, _ = self._bracket_terms(x)
        return kl + 0.5 * max(0.0, inner)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        g = np.log2(np.maximum(x, _TINY)) - self.log_ref + _LOG2E
        if self.bracket:
            inner, arg = self._bracket_terms(x)
            if inner > 0 and arg is not None:
                jmap, mj, cmap, mc = arg
                lj = np.log2(np.maximum(mj, _TINY))
                lc = np.log2(np.maximum(mc, _TINY))
                g += 0.5 * (-(lj[jmap]) - _LOG2E + lc[cmap] + _LOG2E)
        return np.clip(g, -_GRAD_CLIP, _GRAD_CLIP)

    # -- iterative proportional fitting (bracket-free refinement) -----------

    def ipf(self, sweeps: int = 500) -> np.ndarray | None:
        x = self.ref.copy()
        x /= x.sum()
        for _ in range(sweeps):
            worst = 0.0
            for mp, t in zip(self.pin_maps, self.pin_targets):
                marg = np.bincount(mp, weights=x, minlength=t.size)
                worst = max(worst, float(np.abs(marg - t).max()))
                ratio = np.where(marg > 0, t / np.where(marg > 0, marg, 1.0), 0.0)
                x = x * ratio[mp]
            if worst < 1e-13:
                return x
        return x if self.residual(x) < 1e-9 else None


def minimize(
    ref: np.ndarray,
    pins=(),
    bracket=None,
    extra_starts=(),
    n_starts: int = 16,
    max_iter: int = 1200,
    seed: int = 0,
) -> SolveResult:
    """Minimize the bracketed divergence objective; value in bits.

    ``extra_starts`` are tried first (e.g. the null joint); then the
    reference, the uniform table, and seeded random tables up to
    ``n_starts`` total.  Returns +inf (feasible=False) when the pins cannot
    be met on the support of ``ref``.
    """
    prob = _Problem(ref, pins, bracket)
    if prob.infeasible or prob.m == 0:
        return SolveResult(math.inf, None, 0, math.inf, False, 0)

    starts: list[np.ndarray] = []
    for s in extra_starts:
        flat = np.asarray(s, dtype=float).reshape(-1)[prob.support_flat]
        total = flat.sum()
        if total > 0:
            starts.append(flat / total)
    starts.append(prob.ref.copy())
    starts.append(np.full(prob.m, 1.0 / prob.m))
    rng = np.random.default_rng(seed)
    while len(starts) < n_starts:
        starts.append(rng.dirichlet(np.ones(prob.m)))

    best_val = math.inf
    best_x = None
    runner_up = math.inf
    total_iters = 0
    feasible_any = False

    for x0 in starts:
        x = prob.repair(x0)
        if prob.residual(x) > 1e-8:
            continue
        feasible_any = True
        fx = prob.value(x)
        step = 1.0
        stall = 0
        for _ in range(max_iter):
            total_iters += 1
            d = prob.tangent_project(prob.gradient(x))
            dn2 = float(d @ d)
            if dn2 < 1e-24:
                break
            t = step
            improved = False
            while t > 1e-16:
                xn = prob.repair(x - t * d)
                fn = prob.value(xn)
                if fn < fx - 1e-4 * t * dn2 or fn < fx - 1e-15:
                    improved = True
                    break
                t *= 0.5
            if not improved:
                break
            if fx - fn < 1e-14 * (1.0 + abs(fx)):
                stall += 1
                if stall >= 5:
                    x, fx = xn, fn
                    break
            else:
                stall = 0
            x, fx = xn, fn
            step = min(t * 4.0, 64.0)
        if fx < best_val:
            runner_up = best_val
            best_val = fx
            best_x = x
        elif fx < runner_up:
            runner_up = fx

    if not prob.bracket:
        x_ipf = prob.ipf()
        if x_ipf is not None:
            f_ipf = prob.value(x_ipf)
            if f_ipf < best_val:
                runner_up = best_val
                best_val = f_ipf
                best_x = x_ipf
            elif f_ipf < runner_up:
                runner_up = f_ipf

    if not feasible_any or best_x is None:
        return SolveResult(math.inf, None, total_iters, math.inf, False, len(starts))

    table = np.zeros(int(np.prod(prob.shape, dtype=int)))
    table[prob.support_flat] = best_x
    gap = runner_up - best_val if math.isfinite(runner_up) else 0.0
    return SolveResult(
        float(best_val), table.reshape(prob.shape), total_iters, float(gap), True,
        len(starts),
    )
