"""Executable model of the two-detector binning protocol at small blocklengths.

Two operating modes share one pipeline:

* mode "A": the auxiliary sequences are drawn directly from the product
  channel and all six bin indices are read off the binning maps;
* mode "B": the shared-randomness indices are drawn uniformly first and the
  encoder samples the auxiliaries from the channel law restricted to the
  matching shared-randomness buckets (exact enumeration over the buckets).

Each detector tests two events: the transmitted type index must be
entrywise close to the null joint of (X, Y0, Y1, Y2), and some pair of
sequences in its bin buckets must be jointly typical with its side
information.  It declares the alternative iff either event fails.

Determinism: every Monte Carlo routine derives per-trial random streams
from (seed, hypothesis, trial), so reports are bit-identical for a fixed
seed under any scheduling or worker count.  A sampled binning realization
is immutable and shared read-only across trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, BudgetExceededError, EncoderAbort
from .exponents import MARGINAL_TOL, RateVector
from .osrb import DEFAULT_SEQUENCE_BUDGET
from .prob import Alphabet, CondPmf, JointPmf, compose, marginalize
from .types_method import JointNType, Sequence, delta_prime, joint_type_of

SOURCE_LABELS = ("x", "z1", "z2", "s1", "s2")
ALT_LABELS = ("x", "z1", "z2")
_MAX_F_RESAMPLES = 256


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything a protocol run needs; immutable and fully seeded."""

    source: JointPmf  # (x, z1, z2, s1, s2) under the null
    alt: JointPmf  # (x, z1, z2) under the alternative
    chan: CondPmf  # x -> (y0, y1, y2)
    rates: RateVector
    n: int
    seed: int
    delta_prime_c: float = 1.0
    budget: int = DEFAULT_SEQUENCE_BUDGET

    def __post_init__(self):
        if self.source.labels != SOURCE_LABELS:
            raise ArgumentError(f"source axes must be {SOURCE_LABELS} in order")
        if self.alt.labels != ALT_LABELS:
            raise ArgumentError(f"alternative axes must be {ALT_LABELS} in order")
        if self.chan.from_labels != ("x",) or self.chan.to_labels != ("y0", "y1", "y2"):
            raise ArgumentError("channel must map x to (y0, y1, y2)")
        if self.chan.from_axes[0].size != self.source.axes[0].size:
            raise ArgumentError("channel x-alphabet does not match source")
        for lbl in ("x", "z1", "z2"):
            i, k = self.source.axis_index(lbl), self.alt.axis_index(lbl)
            if self.source.axes[i].size != self.alt.axes[k].size:
                raise ArgumentError(f"axis {lbl!r} size differs between hypotheses")
        if self.n < 1:
            raise ArgumentError(f"n must be >= 1, got {self.n}")
        if self.delta_prime_c <= 0:
            raise ArgumentError("delta_prime_c must be positive")
        px = marginalize(self.source, ["x"]).table
        qx = marginalize(self.alt, ["x"]).table
        gap = float(np.abs(px - qx).max())
        if gap > MARGINAL_TOL:
            raise ArgumentError(
                f"hypotheses must share the x-marginal; deviation {gap!r}"
            )
        # sequence-space budget: a factorized channel is simulated per axis,
        # anything else requires enumerating the full product of y-spaces
        sizes = [a.size for a in self.chan.to_axes]
        if _factorize_channel(self.chan) is not None:
            worst = max(s**self.n for s in sizes)
        else:
            worst = math.prod(s**self.n for s in sizes)
        if worst > self.budget:
            raise BudgetExceededError("auxiliary sequence space", worst, self.budget)

    @property
    def delta_slack(self) -> float:
        return delta_prime(self.n, self.delta_prime_c)

    @property
    def m_counts(self) -> tuple[int, int, int]:
        return tuple(
            max(1, math.ceil(2.0 ** (self.n * self.rates.r(i)))) for i in range(3)
        )

    @property
    def f_counts(self) -> tuple[int, int, int]:
        return tuple(
            max(1, math.ceil(2.0 ** (self.n * self.rates.rt(i)))) for i in range(3)
        )


def _factorize_channel(chan: CondPmf) -> list[np.ndarray] | None:
    """Per-output factors when the channel outputs are conditionally
    independent given x, else None."""
    t = chan.table
    factors = []
    for i in range(3):
        drop = tuple(1 + k for k in range(3) if k != i)
        factors.append(t.sum(axis=drop))
    prod = np.einsum("xa,xb,xc->xabc", *factors)
    if np.abs(prod - t).max() < 1e-12:
        return factors
    return None


@dataclass(frozen=True)
class BinningRealization:
    """Six uniform independent maps from y-sequences to bin indices, with
    inverse buckets for the detector search.  Immutable; share freely."""

    m_maps: tuple[np.ndarray, np.ndarray, np.ndarray]
    f_maps: tuple[np.ndarray, np.ndarray, np.ndarray]
    m_counts: tuple[int, int, int]
    f_counts: tuple[int, int, int]
    _buckets: tuple[dict, dict, dict] = field(repr=False, default=None)

    def __post_init__(self):
        for arr in self.m_maps + self.f_maps:
            arr.setflags(write=False)
        buckets = []
        for i in range(3):
            key = self.m_maps[i] * self.f_counts[i] + self.f_maps[i]
            order = np.argsort(key, kind="stable")
            sorted_key = key[order]
            edges = np.flatnonzero(np.diff(sorted_key)) + 1
            starts = np.concatenate([[0], edges])
            ends = np.concatenate([edges, [key.size]])
            buckets.append(
                {
                    int(sorted_key[s]): order[s:e]
                    for s, e in zip(starts, ends)
                }
            )
        object.__setattr__(self, "_buckets", tuple(buckets))

    def bucket(self, i: int, m: int, f: int) -> np.ndarray:
        """Y-sequence indices mapped to message bin m and randomness bin f."""
        return self._buckets[i].get(m * self.f_counts[i] + f, _EMPTY)


_EMPTY = np.zeros(0, dtype=np.int64)


@dataclass(frozen=True)
class Transcript:
    """One protocol run: sequences, bin indices, and the transmitted type."""

    x: Sequence
    y: tuple[Sequence, Sequence, Sequence]
    m: tuple[int, int, int]
    f: tuple[int, int, int]
    type_index: JointNType
    z: tuple[Sequence, Sequence] | None = None
    s: tuple[Sequence, Sequence] | None = None
    resamples: int = 0


@dataclass(frozen=True)
class ErrorReport:
    """Measured error rates with binomial standard errors."""

    n: int
    trials: int
    mode: str
    alpha: dict
    beta: dict
    alpha_stderr: dict
    beta_stderr: dict
    encoder_resamples: int
    encoder_fallbacks: int


class _Runtime:
    """Derived tables shared by every trial of one configuration."""

    def __init__(self, cfg: ProtocolConfig):
        self.cfg = cfg
        self.n = cfg.n
        self.y_sizes = tuple(a.size for a in cfg.chan.to_axes)
        self.seq_counts = tuple(s**cfg.n for s in self.y_sizes)
        self.factors = _factorize_channel(cfg.chan)
        p_x = marginalize(cfg.source, ["x"])
        self.t_xy = compose(p_x, cfg.chan).table  # (x, y0, y1, y2)
        self.t_y0yjz = {}
        for j in (1, 2):
            zl = f"z{j}"
            joint = compose(marginalize(cfg.source, ["x", zl]), cfg.chan)
            self.t_y0yjz[j] = marginalize(joint, ["y0", f"y{j}", zl]).table
        self.null_flat = cfg.source.table.reshape(-1)
        self.null_cdf = np.cumsum(self.null_flat)
        self.alt_flat = cfg.alt.table.reshape(-1)
        self.alt_cdf = np.cumsum(self.alt_flat)
        self.null_shape = tuple(a.size for a in cfg.source.axes)
        self.alt_shape = tuple(a.size for a in cfg.alt.axes)
        self._digits: dict[int, np.ndarray] = {}
        self._pair_symbol: dict[int, np.ndarray] = {}

    def digits(self, i: int) -> np.ndarray:
        """(N_i, n) symbol table of every y_i sequence, symbol 0 first."""
        if i not in self._digits:
            count, size, n = self.seq_counts[i], self.y_sizes[i], self.n
            rows = np.arange(count, dtype=np.int64)
            out = np.empty((count, n), dtype=np.int64)
            for t in range(n - 1, -1, -1):
                out[:, t] = rows % size
                rows //= size
            self._digits[i] = out
        return self._digits[i]

    def seq_weights(self, i: int, x_digits: np.ndarray) -> np.ndarray:
        """Product-channel likelihood of every y_i sequence given x."""
        factor = self.factors[i]
        return factor[x_digits[None, :], self.digits(i)].prod(axis=1)

    def full_weights(self, x_digits: np.ndarray) -> np.ndarray:
        """Joint likelihood over (y0, y1, y2) sequence triples given x."""
        w = np.ones((1, 1, 1))
        for t in range(self.n):
            sym = self.cfg.chan.table[int(x_digits[t])]
            w = np.einsum("abc,xyz->axbycz", w, sym).reshape(
                w.shape[0] * sym.shape[0],
                w.shape[1] * sym.shape[1],
                w.shape[2] * sym.shape[2],
            )
        return w

    def sample_source(self, rng, hypothesis: int):
        cdf = self.null_cdf if hypothesis == 0 else self.alt_cdf
        shape = self.null_shape if hypothesis == 0 else self.alt_shape
        flat = np.searchsorted(cdf, rng.random(self.n), side="right")
        return np.unravel_index(flat, shape)


def _sequence(axis: Alphabet, symbols: np.ndarray) -> Sequence:
    return Sequence(axis, symbols)


def sample_binning(cfg: ProtocolConfig, rng: np.random.Generator) -> BinningRealization:
    """Draw the six uniform independent maps (m0, f0, m1, f1, m2, f2 order)."""
    m_counts, f_counts = cfg.m_counts, cfg.f_counts
    seq_counts = [a.size**cfg.n for a in cfg.chan.to_axes]
    m_maps, f_maps = [], []
    for i in range(3):
        m_maps.append(rng.integers(0, m_counts[i], size=seq_counts[i]))
        f_maps.append(rng.integers(0, f_counts[i], size=seq_counts[i]))
    return BinningRealization(tuple(m_maps), tuple(f_maps), m_counts, f_counts)


def _seq_index(symbols: np.ndarray, size: int) -> int:
    idx = 0
    for s in symbols:
        idx = idx * size + int(s)
    return int(idx)


def _transcript(rt: _Runtime, bins, x_digits, y_idx, f, resamples) -> Transcript:
    cfg = rt.cfg
    y_seqs = tuple(
        _sequence(cfg.chan.to_axes[i], rt.digits(i)[y_idx[i]]) for i in range(3)
    )
    m = tuple(int(bins.m_maps[i][y_idx[i]]) for i in range(3))
    x_seq = _sequence(cfg.source.axes[0], x_digits)
    type_index = joint_type_of([x_seq, *y_seqs])
    return Transcript(
        x=x_seq, y=y_seqs, m=m, f=tuple(int(v) for v in f),
        type_index=type_index, resamples=resamples,
    )


def encode_protocol_b(
    cfg: ProtocolConfig,
    bins: BinningRealization,
    x: Sequence,
    f,
    rng: np.random.Generator,
    _rt: _Runtime | None = None,
) -> Transcript:
    """Sample (y0, y1, y2) from the channel law restricted to the requested
    shared-randomness buckets, then emit message bins and the type index.

    Raises EncoderAbort when no sequence tuple in the buckets carries
    positive channel mass (possible at finite n; callers resample f).
    """
    rt = _rt or _Runtime(cfg)
    x_digits = np.asarray(x.symbols)
    f = tuple(int(v) for v in f)
    y_idx = []
    if rt.factors is not None:
        for i in range(3):
            w = rt.seq_weights(i, x_digits)
            mask = bins.f_maps[i] == f[i]
            wr = w * mask
            total = wr.sum()
            if total <= 0.0:
                raise EncoderAbort(f"no y{i} sequence in randomness bucket {f[i]}")
            flat = np.searchsorted(np.cumsum(wr / total), rng.random(), side="right")
            y_idx.append(min(int(flat), wr.size - 1))
    else:
        w = rt.full_weights(x_digits)
        masks = [bins.f_maps[i] == f[i] for i in range(3)]
        wr = w * masks[0][:, None, None] * masks[1][None, :, None] * masks[2][None, None, :]
        total = wr.sum()
        if total <= 0.0:
            raise EncoderAbort("no y tuple in the randomness buckets")
        flat_w = (wr / total).reshape(-1)
        flat = np.searchsorted(np.cumsum(flat_w), rng.random(), side="right")
        flat = min(int(flat), flat_w.size - 1)
        y_idx = list(np.unravel_index(flat, wr.shape))
    return _transcript(rt, bins, x_digits, y_idx, f, resamples=0)


def encode_protocol_a(
    cfg: ProtocolConfig,
    bins: BinningRealization,
    x: Sequence,
    rng: np.random.Generator,
    _rt: _Runtime | None = None,
) -> Transcript:
    """Draw (y0, y1, y2) from the unrestricted product channel and read all
    bin indices off the maps."""
    rt = _rt or _Runtime(cfg)
    x_digits = np.asarray(x.symbols)
    y_idx = []
    if rt.factors is not None:
        for i in range(3):
            w = rt.seq_weights(i, x_digits)
            flat = np.searchsorted(np.cumsum(w / w.sum()), rng.random(), side="right")
            y_idx.append(min(int(flat), w.size - 1))
    else:
        w = rt.full_weights(x_digits)
        flat_w = (w / w.sum()).reshape(-1)
        flat = np.searchsorted(np.cumsum(flat_w), rng.random(), side="right")
        y_idx = list(np.unravel_index(min(int(flat), flat_w.size - 1), w.shape))
    f = tuple(int(bins.f_maps[i][y_idx[i]]) for i in range(3))
    return _transcript(rt, bins, x_digits, y_idx, f, resamples=0)


def detect(
    cfg: ProtocolConfig,
    bins: BinningRealization,
    j: int,
    z: Sequence,
    m0: int,
    mj: int,
    f0: int,
    fj: int,
    type_index: JointNType,
    _rt: _Runtime | None = None,
) -> int:
    """Decision of detector j: 0 (null) iff the transmitted type is close to
    the null joint and its buckets contain a pair jointly typical with z."""
    if j not in (1, 2):
        raise ArgumentError(f"detector index must be 1 or 2, got {j}")
    rt = _rt or _Runtime(cfg)
    slack = cfg.delta_slack

    type_table = type_index.counts / cfg.n
    if np.abs(type_table - rt.t_xy).max() >= slack:
        return 1

    cand0 = bins.bucket(0, m0, f0)
    candj = bins.bucket(j, mj, fj)
    if cand0.size == 0 or candj.size == 0:
        return 1
    d0 = rt.digits(0)[cand0]
    dj = rt.digits(j)[candj]
    zd = np.asarray(z.symbols)
    kj = rt.y_sizes[j]
    kz = z.alphabet.size
    target = rt.t_y0yjz[j].reshape(-1)
    cells = target.size
    combined = (d0[:, None, :] * kj + dj[None, :, :]) * kz + zd[None, None, :]
    pairs = cand0.size * candj.size
    offsets = np.arange(pairs, dtype=np.int64)[:, None] * cells
    counts = np.bincount(
        (combined.reshape(pairs, cfg.n) + offsets).reshape(-1),
        minlength=pairs * cells,
    ).reshape(pairs, cells)
    dev = np.abs(counts / cfg.n - target[None, :]).max(axis=1)
    return 0 if bool((dev < slack).any()) else 1


def _trial_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def estimate_errors(
    cfg: ProtocolConfig, trials: int, seed: int | None = None, mode: str = "B"
) -> ErrorReport:
    """Monte Carlo type-I and type-II error rates for both detectors.

    Samples the memoryless source under each hypothesis, runs the encoder
    (mode "B" draws shared randomness uniformly and resamples it on an
    encoder abort; mode "A" is the unrestricted dual), and applies both
    detectors to every trial.  Standard errors are binomial.
    """
    if trials < 1:
        raise ArgumentError("trials must be >= 1")
    if mode not in ("A", "B"):
        raise ArgumentError(f"mode must be 'A' or 'B', got {mode!r}")
    seed = cfg.seed if seed is None else seed
    rt = _Runtime(cfg)
    bins = sample_binning(cfg, _trial_rng(seed, 0))
    x_axis = cfg.source.axes[0]
    z_axes = (cfg.source.axes[1], cfg.source.axes[2])

    wrong = {(0, 1): 0, (0, 2): 0, (1, 1): 0, (1, 2): 0}
    resamples = 0
    fallbacks = 0
    for hyp in (0, 1):
        for trial in range(trials):
            rng = _trial_rng(seed, 1, hyp, trial)
            parts = rt.sample_source(rng, hyp)
            x = _sequence(x_axis, parts[0])
            z_seqs = (
                _sequence(z_axes[0], parts[1]),
                _sequence(z_axes[1], parts[2]),
            )
            if mode == "A":
                tr = encode_protocol_a(cfg, bins, x, rng, _rt=rt)
            else:
                tr = None
                for attempt in range(_MAX_F_RESAMPLES):
                    f = tuple(
                        int(rng.integers(0, cfg.f_counts[i])) for i in range(3)
                    )
                    try:
                        tr = encode_protocol_b(cfg, bins, x, f, rng, _rt=rt)
                        break
                    except EncoderAbort:
                        resamples += 1
                if tr is None:
                    # every y has some randomness index, so the unrestricted
                    # draw with read-off f is always available
                    tr = encode_protocol_a(cfg, bins, x, rng, _rt=rt)
                    fallbacks += 1
            for j in (1, 2):
                decision = detect(
                    cfg,
                    bins,
                    j,
                    z_seqs[j - 1],
                    tr.m[0],
                    tr.m[j],
                    tr.f[0],
                    tr.f[j],
                    tr.type_index,
                    _rt=rt,
                )
                if hyp == 0 and decision == 1:
                    wrong[(0, j)] += 1
                if hyp == 1 and decision == 0:
                    wrong[(1, j)] += 1

    def rate(h, j):
        return wrong[(h, j)] / trials

    def se(h, j):
        r = rate(h, j)
        return math.sqrt(max(r * (1.0 - r), 0.0) / trials)

    return ErrorReport(
        n=cfg.n,
        trials=trials,
        mode=mode,
        alpha={1: rate(0, 1), 2: rate(0, 2)},
        beta={1: rate(1, 1), 2: rate(1, 2)},
        alpha_stderr={1: se(0, 1), 2: se(0, 2)},
        beta_stderr={1: se(1, 1), 2: se(1, 2)},
        encoder_resamples=resamples,
        encoder_fallbacks=fallbacks,
    )


# ---------------------------------------------------------------------------
# Equivocation
# ---------------------------------------------------------------------------

def _entropy_bits(table: np.ndarray) -> float:
    t = table[table > 0]
    return float(-(t * np.log2(t)).sum())


def estimate_equivocation(
    cfg: ProtocolConfig,
    bins: BinningRealization,
    i: int,
    mode: str = "exact",
    trials: int = 10_000,
    seed: int | None = None,
) -> float:
    """Equivocation of detector i's private source given its observations,
    in bits per symbol, under the fixed binning realization.

    Exact mode enumerates the induced joint of (private seq, side-info seq,
    common bin, private bin); plugin mode estimates the same conditional
    entropy from samples with a small-sample (observed-support) correction.
    """
    if i not in (1, 2):
        raise ArgumentError(f"detector index must be 1 or 2, got {i}")
    if mode not in ("exact", "plugin"):
        raise ArgumentError(f"mode must be 'exact' or 'plugin', got {mode!r}")
    rt = _Runtime(cfg)
    n = cfg.n
    zl, sl = f"z{i}", f"s{i}"
    tri = marginalize(cfg.source, ["x", zl, sl])
    kx, kz, ks = (a.size for a in tri.axes)
    m0_count, mi_count = bins.m_counts[0], bins.m_counts[i]

    if mode == "plugin":
        seed = cfg.seed if seed is None else seed
        counts: dict[tuple, int] = {}
        flat = tri.table.reshape(-1)
        cdf = np.cumsum(flat)
        for trial in range(trials):
            rng = _trial_rng(seed, 2, i, trial)
            draw = np.searchsorted(cdf, rng.random(n), side="right")
            xd, zd, sd = np.unravel_index(draw, (kx, kz, ks))
            y0, yi = _pick_pair(rt, i, xd, rng)
            key = (
                _seq_index(sd, ks),
                _seq_index(zd, kz),
                int(bins.m_maps[0][y0]),
                int(bins.m_maps[i][yi]),
            )
            counts[key] = counts.get(key, 0) + 1
        total = sum(counts.values())
        joint = np.array(list(counts.values()), dtype=float) / total
        cond_counts: dict[tuple, int] = {}
        for (s_idx, z_idx, m0, mi), c in counts.items():
            k = (z_idx, m0, mi)
            cond_counts[k] = cond_counts.get(k, 0) + c
        cond = np.array(list(cond_counts.values()), dtype=float) / total
        # plug-in conditional entropy with the observed-support correction
        # applied to both terms
        h_joint = _entropy_bits(joint) + (len(counts) - 1) / (2 * total * math.log(2))
        h_cond = _entropy_bits(cond) + (len(cond_counts) - 1) / (
            2 * total * math.log(2)
        )
        return (h_joint - h_cond) / n

    x_total = kx**n
    zs_total = (kz * ks) ** n
    if x_total > cfg.budget or zs_total * m0_count * mi_count > 64 * cfg.budget:
        raise BudgetExceededError(
            "equivocation enumeration", max(x_total, zs_total), cfg.budget
        )
    per_x = tri.table.reshape(kx, kz * ks)
    joint = np.zeros((zs_total, m0_count * mi_count))
    x_digits_all = np.empty((x_total, n), dtype=np.int64)
    rows = np.arange(x_total, dtype=np.int64)
    for t in range(n - 1, -1, -1):
        x_digits_all[:, t] = rows % kx
        rows //= kx
    for xi in range(x_total):
        xd = x_digits_all[xi]
        zs_vec = np.ones(1)
        for t in range(n):
            zs_vec = np.kron(zs_vec, per_x[xd[t]])
        pm = _pair_bin_distribution(rt, bins, i, xd, m0_count, mi_count)
        joint += np.outer(zs_vec, pm)
    # split the per-symbol (z, s) digits into separate z and s indices
    zs_rows = np.arange(zs_total, dtype=np.int64)
    z_of = np.zeros(zs_total, dtype=np.int64)
    digits = []
    r = zs_rows.copy()
    for _ in range(n):
        digits.append(r % (kz * ks))
        r //= kz * ks
    digits.reverse()
    for d in digits:
        z_of = z_of * kz + d // ks
    marg_zm = np.zeros((kz**n, m0_count * mi_count))
    np.add.at(marg_zm, z_of, joint)
    return (_entropy_bits(joint) - _entropy_bits(marg_zm)) / n


def _pick_pair(rt: _Runtime, i: int, x_digits: np.ndarray, rng) -> tuple[int, int]:
    """Sample (y0 index, yi index) from the channel law given x.

    Outputs of a product channel are conditionally independent; otherwise
    the pair is drawn from the jointly enumerated marginal over (y0, yi).
    """
    if rt.factors is not None:
        out = []
        for k in (0, i):
            w = rt.seq_weights(k, x_digits)
            flat = np.searchsorted(np.cumsum(w / w.sum()), rng.random(), side="right")
            out.append(min(int(flat), w.size - 1))
        return out[0], out[1]
    full = rt.full_weights(x_digits)
    drop = tuple(k for k in range(3) if k not in (0, i))
    pair = full.sum(axis=drop)
    flat_w = (pair / pair.sum()).reshape(-1)
    flat = min(
        int(np.searchsorted(np.cumsum(flat_w), rng.random(), side="right")),
        flat_w.size - 1,
    )
    y0, yi = np.unravel_index(flat, pair.shape)
    return int(y0), int(yi)


def _pair_bin_distribution(rt, bins, i, x_digits, m0_count, mi_count) -> np.ndarray:
    """P(common bin, private bin | x sequence), flattened row-major."""
    if rt.factors is not None:
        w0 = np.bincount(
            bins.m_maps[0], weights=rt.seq_weights(0, x_digits), minlength=m0_count
        )
        wi = np.bincount(
            bins.m_maps[i], weights=rt.seq_weights(i, x_digits), minlength=mi_count
        )
        return np.outer(w0, wi).reshape(-1)
    full = rt.full_weights(x_digits)
    drop = tuple(k for k in range(3) if k not in (0, i))
    pair = full.sum(axis=drop)
    key = (
        bins.m_maps[0][:, None] * mi_count + bins.m_maps[i][None, :]
    ).reshape(-1)
    return np.bincount(key, weights=pair.reshape(-1), minlength=m0_count * mi_count)


def transcript_to_dict(tr: Transcript) -> dict:
    """Structured record of one run, for debugging dumps."""
    doc = {
        "x": [int(v) for v in tr.x.symbols],
        "y": [[int(v) for v in seq.symbols] for seq in tr.y],
        "m": list(tr.m),
        "f": list(tr.f),
        "type_counts": [int(c) for c in tr.type_index.counts.reshape(-1)],
        "resamples": tr.resamples,
    }
    if tr.z is not None:
        doc["z"] = [[int(v) for v in seq.symbols] for seq in tr.z]
    if tr.s is not None:
        doc["s"] = [[int(v) for v in seq.symbols] for seq in tr.s]
    return doc
