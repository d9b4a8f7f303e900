"""Closed-form achievable bounds for the two-detector network.

For detector j, the optimizations run over joint tables on
(X, Y0, Y1, Y2, Zj) against the alternative-hypothesis reference
q(x, zj) * chan(y | x).  Three constraint levels appear:

* both the (X, Y0, Y1, Y2) marginal and the (Y0, Yj, Zj) marginal pinned
  to their null values (the fully matched case, ``exponent_e0``);
* the (X, Y0, Y1, Y2) marginal and the Zj marginal pinned, plus the
  binning-rate surplus term (``exponent_e1``);
* only the Zj marginal pinned, plus the randomization-rate bracket
  (``exponent_e2``, non-convex, cross-checked against the grid oracle in
  the test suite).

The best achievable type-II exponent is the minimum of the three.  All
entropies in the e1 surplus are evaluated under the null joint.  Exponents
are returned in their asymptotic form; passing a blocklength ``n`` yields
the finite-n variants obtained by subtracting the polynomial correction
terms (and, for e2, tightening the bracket budgets).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .prob import (
    CondPmf,
    JointPmf,
    channel_marginal,
    compose,
    entropy,
    marginalize,
    mutual_information,
)
from .solver import EntropyBudget, MarginalPin, SolveResult, minimize

MARGINAL_TOL = 1e-9
STRICT_MARGIN = 1e-9

_Y_LABELS = ("y0", "y1", "y2")


@dataclass(frozen=True)
class HypothesisPair:
    """Null and alternative joints over (x, z1, z2) with a shared x-marginal."""

    p: JointPmf
    q: JointPmf

    def __post_init__(self):
        if self.p.axes != self.q.axes:
            raise ArgumentError(
                f"hypotheses disagree on axes: {self.p.labels} vs {self.q.labels}"
            )
        required = {"x", "z1", "z2"}
        if set(self.p.labels) != required:
            raise ArgumentError(f"hypothesis axes must be {sorted(required)}")
        px = marginalize(self.p, ["x"]).table
        qx = marginalize(self.q, ["x"]).table
        gap = float(np.abs(px - qx).max())
        if gap > MARGINAL_TOL:
            raise ArgumentError(
                f"hypotheses must share the x-marginal; deviation {gap!r}"
            )


@dataclass(frozen=True)
class RateVector:
    """Message rates r_i and shared-randomness rates rt_i, in bits/symbol."""

    r0: float
    r1: float
    r2: float
    rt0: float = 0.0
    rt1: float = 0.0
    rt2: float = 0.0

    def __post_init__(self):
        for name in ("r0", "r1", "r2", "rt0", "rt1", "rt2"):
            v = getattr(self, name)
            if not (v >= 0.0) or not math.isfinite(v):
                raise ArgumentError(f"rate {name} must be finite and >= 0, got {v!r}")

    def r(self, i: int) -> float:
        return (self.r0, self.r1, self.r2)[i]

    def rt(self, i: int) -> float:
        return (self.rt0, self.rt1, self.rt2)[i]


@dataclass(frozen=True)
class ExponentReport:
    e0: float
    e1: float
    e2: float
    theta_star: float
    argmin_pi: JointPmf | None
    solver_diag: dict


@dataclass(frozen=True)
class InequalityReport:
    block: str
    name: str
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    interpreted: bool = False


def _check_channel(chan: CondPmf) -> None:
    if chan.from_labels != ("x",) or chan.to_labels != _Y_LABELS:
        raise ArgumentError(
            f"channel must map x to {_Y_LABELS}, got {chan.from_labels} ->"
            f" {chan.to_labels}"
        )


def _check_detector(j: int) -> None:
    if j not in (1, 2):
        raise ArgumentError(f"detector index must be 1 or 2, got {j}")


def _detector_frame(hyp: HypothesisPair, chan: CondPmf, j: int):
    """Null and reference joints over (x, y0, y1, y2, zj), in that order."""
    _check_channel(chan)
    _check_detector(j)
    zl = f"z{j}"
    order = ("x", "y0", "y1", "y2", zl)
    p_joint = marginalize(compose(marginalize(hyp.p, ["x", zl]), chan), order)
    ref = marginalize(compose(marginalize(hyp.q, ["x", zl]), chan), order)
    return p_joint, ref


def _nu_n(frame: JointPmf, n: int) -> float:
    cells = int(np.prod([a.size for a in frame.axes], dtype=int))
    return cells * math.log2(n + 1) / n


def _e2_budgets(rates: RateVector, frame: JointPmf, n: int | None):
    """Bracket groups for every non-empty subset of the three randomized
    sources; budgets are rate sums plus, at finite n, the per-subset
    polynomial corrections."""
    x_size = frame.axes[0].size
    budgets = []
    for mask in range(1, 8):
        subset = tuple(i for i in range(3) if mask >> i & 1)
        c = sum(rates.rt(i) for i in subset)
        if n is not None:
            y_s = int(np.prod([frame.axes[1 + i].size for i in subset], dtype=int))
            c += x_size * y_s * math.log2(n + 1) / n + 3.0 / n
        budgets.append(
            EntropyBudget(
                name="+".join(_Y_LABELS[i] for i in subset),
                joint_axes=(0,) + tuple(1 + i for i in subset),
                cond_axes=(0,),
                budget=c,
            )
        )
    return budgets


def _wrap_argmin(frame: JointPmf, result: SolveResult) -> JointPmf | None:
    if result.table is None:
        return None
    t = np.clip(result.table, 0.0, None)
    return JointPmf(frame.axes, t / t.sum())


def _diag(result: SolveResult) -> dict:
    return {
        "iterations": result.iterations,
        "gap": result.gap,
        "n_starts": result.n_starts,
        "feasible": result.feasible,
    }


def exponent_e0(hyp: HypothesisPair, chan: CondPmf, j: int, n: int | None = None):
    """Divergence exponent with both typicality marginals pinned.

    Returns (bits, argmin table or None, diagnostics).  +inf means the
    pinned marginals cannot be met on the support of the alternative.
    """
    p_joint, ref = _detector_frame(hyp, chan, j)
    pins = [
        MarginalPin((0, 1, 2, 3), p_joint.table.sum(axis=4)),
        MarginalPin((1, 1 + j, 4), marginalize(p_joint, ["y0", f"y{j}", f"z{j}"]).table),
    ]
    res = minimize(ref.table, pins, extra_starts=[p_joint.table])
    value = res.value
    if n is not None and math.isfinite(value):
        value -= _nu_n(ref, n)
    return value, _wrap_argmin(ref, res), _diag(res)


def _e1_surplus(rates: RateVector, p_joint: JointPmf, j: int) -> float:
    zl = f"z{j}"
    yj = f"y{j}"
    terms = [
        rates.r(0) + rates.rt(0) - entropy(p_joint, ["y0"], [zl, yj]),
        rates.r(j) + rates.rt(j) - entropy(p_joint, [yj], [zl, "y0"]),
        rates.r(0) + rates.rt(0) + rates.r(j) + rates.rt(j)
        - entropy(p_joint, ["y0", yj], [zl]),
    ]
    return min(terms)


def exponent_e1(
    hyp: HypothesisPair, chan: CondPmf, rates: RateVector, j: int, n: int | None = None
):
    """Divergence exponent against false binning witnesses plus the
    binning-rate surplus, minimized over the three non-empty witness sets.

    Surplus entropies are evaluated under the null joint.
    """
    p_joint, ref = _detector_frame(hyp, chan, j)
    pins = [
        MarginalPin((0, 1, 2, 3), p_joint.table.sum(axis=4)),
        MarginalPin((4,), p_joint.table.sum(axis=(0, 1, 2, 3))),
    ]
    res = minimize(ref.table, pins, extra_starts=[p_joint.table])
    value = res.value
    if math.isfinite(value):
        value += _e1_surplus(rates, p_joint, j)
        if n is not None:
            value -= math.log2(3.0) / n + _nu_n(ref, n)
    return value, _wrap_argmin(ref, res), _diag(res)


def exponent_e2(
    hyp: HypothesisPair, chan: CondPmf, rates: RateVector, j: int, n: int | None = None
):
    """Concentration exponent of the induced statistics: divergence plus the
    clamped randomization-rate bracket, with only the side-information
    marginal pinned.  Non-convex; solved by the multi-start engine.
    """
    p_joint, ref = _detector_frame(hyp, chan, j)
    pins = [MarginalPin((4,), p_joint.table.sum(axis=(0, 1, 2, 3)))]
    budgets = _e2_budgets(rates, ref, n)
    res = minimize(ref.table, pins, bracket=budgets, extra_starts=[p_joint.table])
    value = res.value
    if n is not None and math.isfinite(value):
        x_size = ref.axes[0].size
        y_all = int(np.prod([a.size for a in ref.axes[1:4]], dtype=int))
        value -= x_size * y_all * math.log2(n + 1) / n
    return value, _wrap_argmin(ref, res), _diag(res)


def theta_star(
    hyp: HypothesisPair, chan: CondPmf, rates: RateVector, j: int, n: int | None = None
) -> ExponentReport:
    """Best achievable type-II exponent for detector j: the exact minimum of
    the three bounds, with the binding minimizer attached."""
    e0, pi0, d0 = exponent_e0(hyp, chan, j, n)
    e1, pi1, d1 = exponent_e1(hyp, chan, rates, j, n)
    e2, pi2, d2 = exponent_e2(hyp, chan, rates, j, n)
    best = min(e0, e1, e2)
    argmin = {e0: pi0, e1: pi1, e2: pi2}[best]
    return ExponentReport(
        e0=e0,
        e1=e1,
        e2=e2,
        theta_star=best,
        argmin_pi=argmin,
        solver_diag={"e0": d0, "e1": d1, "e2": d2},
    )


# ---------------------------------------------------------------------------
# Inequality blocks
# ---------------------------------------------------------------------------

def _mi(joint, a, b, given=()):
    return mutual_information(joint, a, b, given)


def check_rate_region(
    rates: RateVector, p: JointPmf, chan: CondPmf
) -> list[InequalityReport]:
    """The eleven strict message-rate inequalities, with per-row margins.

    Three source inequalities contain pair-information terms written
    ambiguously upstream; they are evaluated as I(Y0; Yi | Zi) and flagged
    ``interpreted`` in the report.
    """
    _check_channel(chan)
    joint = compose(p, chan)
    r0, r1, r2 = rates.r0, rates.r1, rates.r2

    def row(name, lhs, rhs, interpreted=False):
        return InequalityReport(
            block="rate",
            name=name,
            lhs=lhs,
            rhs=rhs,
            margin=lhs - rhs,
            satisfied=lhs - rhs > STRICT_MARGIN,
            interpreted=interpreted,
        )

    rows = []
    for i in (1, 2):
        rhs = _mi(joint, ["x"], ["y0"], [f"z{i}"]) - _mi(
            joint, ["y0"], [f"y{i}"], [f"z{i}"]
        )
        rows.append(
            row(f"R0 > I(X;Y0|Z{i}) - I(Y0;Y{i}|Z{i})", r0, rhs, interpreted=True)
        )
    for i, ri in ((1, r1), (2, r2)):
        rhs = _mi(joint, ["x"], [f"y{i}"], [f"z{i}"]) - _mi(
            joint, ["y0"], [f"y{i}"], [f"z{i}"]
        )
        rows.append(
            row(f"R{i} > I(X;Y{i}|Z{i}) - I(Y0;Y{i}|Z{i})", ri, rhs, interpreted=True)
        )
    rows.append(
        row("R0+R1 > I(X;Y0Y1|Z1)", r0 + r1, _mi(joint, ["x"], ["y0", "y1"], ["z1"]))
    )
    rows.append(
        row("R0+R2 > I(X;Y0Y2|Z2)", r0 + r2, _mi(joint, ["x"], ["y0", "y2"], ["z2"]))
    )
    rows.append(
        row(
            "R0+R1 > I(X;Y0|Z2) + I(X;Y1|Y0,Z1) - I(Y0;Y2|Z2)",
            r0 + r1,
            _mi(joint, ["x"], ["y0"], ["z2"])
            + _mi(joint, ["x"], ["y1"], ["y0", "z1"])
            - _mi(joint, ["y0"], ["y2"], ["z2"]),
        )
    )
    rows.append(
        row(
            "R0+R2 > I(X;Y0|Z1) + I(X;Y2|Y0,Z2) - I(Y0;Y1|Z1)",
            r0 + r2,
            _mi(joint, ["x"], ["y0"], ["z1"])
            + _mi(joint, ["x"], ["y2"], ["y0", "z2"])
            - _mi(joint, ["y0"], ["y1"], ["z1"]),
        )
    )
    rows.append(
        row(
            "R1+R2 > I(X;Y1|Y0,Z1) + I(X;Y2|Y0,Z2) + I(Y1;Y2|X,Y0) - I(Y1Y2;Y0|X)",
            r1 + r2,
            _mi(joint, ["x"], ["y1"], ["y0", "z1"])
            + _mi(joint, ["x"], ["y2"], ["y0", "z2"])
            + _mi(joint, ["y1"], ["y2"], ["x", "y0"])
            - _mi(joint, ["y1", "y2"], ["y0"], ["x"]),
        )
    )
    max_i0 = max(
        _mi(joint, ["y0"], ["x"], ["z1"]), _mi(joint, ["y0"], ["x"], ["z2"])
    )
    common = _mi(joint, ["x"], ["y1"], ["y0", "z1"]) + _mi(
        joint, ["x"], ["y2"], ["y0", "z2"]
    ) + _mi(joint, ["y1"], ["y2"], ["x", "y0"])
    rows.append(
        row(
            "R0+R1+R2 > I(X;Y1|Y0,Z1) + I(X;Y2|Y0,Z2) + max_i I(Y0;X|Zi)"
            " + I(Y1;Y2|X,Y0)",
            r0 + r1 + r2,
            common + max_i0,
        )
    )
    rows.append(
        row(
            "2R0+R1+R2 > I(X;Y1|Y0,Z1) + I(X;Y2|Y0,Z2) + I(Y0;X|Z1) + I(Y0;X|Z2)"
            " + I(Y1;Y2|X,Y0)",
            2 * r0 + r1 + r2,
            common
            + _mi(joint, ["y0"], ["x"], ["z1"])
            + _mi(joint, ["y0"], ["x"], ["z2"]),
        )
    )
    return rows


def check_tilde_region(
    rates: RateVector, p: JointPmf, chan: CondPmf
) -> list[InequalityReport]:
    """The seven strict randomization-rate inequalities: for every non-empty
    subset S of the sources, sum of rt_i over S must stay below H(Y_S | X)."""
    _check_channel(chan)
    joint = compose(p, chan)
    rows = []
    for mask in range(1, 8):
        subset = tuple(i for i in range(3) if mask >> i & 1)
        lhs = sum(rates.rt(i) for i in subset)
        labels = [f"y{i}" for i in subset]
        rhs = entropy(joint, labels, ["x"])
        name = "+".join(f"Rt{i}" for i in subset) + " < H(" + ",".join(
            lbl.upper() for lbl in labels
        ) + "|X)"
        rows.append(
            InequalityReport(
                block="tilde",
                name=name,
                lhs=lhs,
                rhs=rhs,
                margin=rhs - lhs,
                satisfied=rhs - lhs > STRICT_MARGIN,
            )
        )
    return rows


def check_binning_conditions(
    rates: RateVector, p: JointPmf, chan: CondPmf, j: int
) -> list[InequalityReport]:
    """The three strict per-detector bin-coverage inequalities."""
    _check_channel(chan)
    _check_detector(j)
    joint = compose(p, chan)
    zl, yj = f"z{j}", f"y{j}"
    entries = [
        (
            f"R0+Rt0 > H(Y0|Y{j},Z{j})",
            rates.r0 + rates.rt0,
            entropy(joint, ["y0"], [yj, zl]),
        ),
        (
            f"R{j}+Rt{j} > H(Y{j}|Y0,Z{j})",
            rates.r(j) + rates.rt(j),
            entropy(joint, [yj], ["y0", zl]),
        ),
        (
            f"R0+Rt0+R{j}+Rt{j} > H(Y0,Y{j}|Z{j})",
            rates.r0 + rates.rt0 + rates.r(j) + rates.rt(j),
            entropy(joint, ["y0", yj], [zl]),
        ),
    ]
    return [
        InequalityReport(
            block=f"binning{j}",
            name=name,
            lhs=lhs,
            rhs=rhs,
            margin=lhs - rhs,
            satisfied=lhs - rhs > STRICT_MARGIN,
        )
        for name, lhs, rhs in entries
    ]


def privacy_bound(source: JointPmf, chan: CondPmf, i: int) -> float:
    """Single-letter equivocation bound for detector i: H(Si | Zi, Y0, Yi)
    under the null source composed with the channel."""
    _check_channel(chan)
    _check_detector(i)
    zl, sl, yl = f"z{i}", f"s{i}", f"y{i}"
    for lbl in ("x", zl, sl):
        source.axis_index(lbl)  # raises if missing
    chan_pair = channel_marginal(chan, ["y0", yl])
    joint = compose(marginalize(source, ["x", zl, sl]), chan_pair)
    return entropy(joint, [sl], [zl, "y0", yl])
