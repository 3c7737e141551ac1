"""
Monte-Carlo outage engine for multihop relaying schemes.

Each relaying scheme is reduced, per channel draw, to an effective
end-to-end linear channel ``y = G x + z`` with exactly accumulated
noise covariance ``K_z`` (the destination's own noise contributes an
identity, so ``K_z`` always has eigenvalues >= 1).  Outage compares the
Gaussian mutual information of that channel against the target rate.

Reproducibility: trials are drawn in fixed-size blocks from a
counter-based generator keyed by ``(seed, block_index)``, and outcomes
are accumulated as integer counts.  Results are therefore bit-identical
for a given seed regardless of how many workers process the blocks, and
trial ``t`` sees the same channel realization no matter how many trials
the run requests.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Sequence, Union

import numpy as np

from .dmt_core import DecodeSet, Dimension, DimensionLike, as_dimension
from .partition import FlipSchedule, Partition, ff_schedule, min_full_div_partition_2hop

__all__ = [
    "BLOCK_SIZE",
    "ChannelRealization",
    "EffectiveChannel",
    "OutageEstimate",
    "AfScheme",
    "PfScheme",
    "DfScheme",
    "ParallelAfScheme",
    "FfScheme",
    "SvdAlignScheme",
    "Scheme",
    "sample_channel",
    "sample_block",
    "af_effective",
    "pf_effective",
    "ff_effective",
    "parallel_af_effective",
    "svd_align_effective",
    "alignment_rotations",
    "df_outage",
    "mutual_info",
    "outage_mask",
    "estimate_outage",
    "outage_curve",
    "multiplexing_rate",
    "estimate_slope",
    "write_outage_csv",
    "run_manifest",
    "default_ff_scheme",
]

# Trials per RNG block.  Part of the algorithm, not a tuning knob: the
# per-block key (seed, block_index) is what makes counts independent of
# the worker count.
BLOCK_SIZE = 8192

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw (or a stacked batch of draws) of the hop matrices.

    ``hops[i]`` has shape ``(..., n_{i+1}, n_i)``; entries are i.i.d.
    circularly-symmetric complex Gaussian with unit variance.
    """

    dim: Dimension
    hops: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.hops) != self.dim.hops:
            raise ValueError("one matrix per hop expected")
        for i, h in enumerate(self.hops):
            if h.shape[-2:] != (self.dim[i + 1], self.dim[i]):
                raise ValueError(
                    f"hop {i + 1} must have shape (..., {self.dim[i + 1]}, {self.dim[i]})"
                )


@dataclass(frozen=True)
class EffectiveChannel:
    """End-to-end gain and exact accumulated noise covariance."""

    gain: np.ndarray  # (..., n_out, n_in)
    noise_cov: np.ndarray  # (..., n_out, n_out), Hermitian, eigenvalues >= 1


@dataclass(frozen=True)
class OutageEstimate:
    """One Monte-Carlo point: outage (or error) count at an SNR."""

    snr_db: float
    rate_bpcu: float
    trials: int
    outage_count: int
    p_hat: float
    ci95: tuple[float, float]


# --------------------------------------------------------------------------
# Scheme configurations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AfScheme:
    kind = "af"

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class PfScheme:
    kind = "pf"

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class DfScheme:
    decode: DecodeSet
    kind = "df"

    def describe(self) -> dict:
        return {"kind": self.kind, "decode": list(self.decode.indices)}


@dataclass(frozen=True)
class ParallelAfScheme:
    partition: Partition
    kind = "parallel-af"

    def describe(self) -> dict:
        return {"kind": self.kind, "path_dims": [list(w) for w in self.partition.path_dims()]}


@dataclass(frozen=True)
class FfScheme:
    schedule: FlipSchedule
    kind = "ff"

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "layer_counts": list(self.schedule.layer_counts),
            "modes": self.schedule.mode_count,
        }


@dataclass(frozen=True)
class SvdAlignScheme:
    kind = "svd-align"

    def describe(self) -> dict:
        return {"kind": self.kind}


Scheme = Union[AfScheme, PfScheme, DfScheme, ParallelAfScheme, FfScheme, SvdAlignScheme]


def default_ff_scheme(dim: DimensionLike) -> FfScheme:
    """Flip-and-forward over the minimum full-diversity two-hop partition."""
    dim = as_dimension(dim)
    if dim.hops != 2:
        raise ValueError("no default partition beyond two hops; supply one explicitly")
    _, part = min_full_div_partition_2hop(*dim.counts)
    return FfScheme(ff_schedule(dim, part))


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, block_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_block(
    dim: DimensionLike, seed: int, block_index: int, count: int = BLOCK_SIZE
) -> ChannelRealization:
    """Draw ``count`` stacked realizations from stream ``(seed, block_index)``."""
    dim = as_dimension(dim)
    rng = _block_rng(seed, block_index)
    hops = []
    for i in range(dim.hops):
        raw = rng.standard_normal((count, dim[i + 1], dim[i], 2))
        hops.append((raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0))
    return ChannelRealization(dim=dim, hops=tuple(hops))


def sample_channel(dim: DimensionLike, seed: int, index: int = 0) -> ChannelRealization:
    """The single realization that trial ``index`` of a run with this seed sees."""
    dim = as_dimension(dim)
    block, offset = divmod(index, BLOCK_SIZE)
    stacked = sample_block(dim, seed, block)
    return ChannelRealization(dim=dim, hops=tuple(h[offset] for h in stacked.hops))


# --------------------------------------------------------------------------
# Effective channels
# --------------------------------------------------------------------------


def _normalizer_diag(hop: np.ndarray, snr: float, n_in: int, n_out: int) -> np.ndarray:
    """Per-antenna amplify-and-forward gains for one relay layer.

    The relay scales each received component to unit average power
    (signal power ``snr/n_in`` per transmit antenna plus unit noise) and
    retransmits at ``snr/n_out`` per antenna.
    """
    row_power = (snr / n_in) * np.sum(np.abs(hop) ** 2, axis=-1) + 1.0
    return np.sqrt((snr / n_out) / row_power)


def _apply_left(op: np.ndarray, x: np.ndarray) -> np.ndarray:
    # op is a diagonal (vector) or a full matrix
    if op.ndim == x.ndim - 1:
        return op[..., :, None] * x
    return op @ x


def _apply_right(x: np.ndarray, op: np.ndarray) -> np.ndarray:
    if op.ndim == x.ndim - 1:
        return x * op[..., None, :]
    return x @ op


def _chain_effective(hops: Sequence[np.ndarray], relay_ops: Sequence[np.ndarray]) -> EffectiveChannel:
    """Gain and noise covariance of ``H_N R_{N-1} ... R_1 H_1``.

    ``relay_ops[i]`` is the linear operation of relay layer ``i+1``,
    either a diagonal given as a vector or a full matrix.  Noise terms
    are ``M_j = H_N R_{N-1} ... H_{j+1} R_j`` plus the identity for the
    destination's own noise.
    """
    n_hops = len(hops)
    gain = hops[0]
    for i in range(1, n_hops):
        gain = hops[i] @ _apply_left(relay_ops[i - 1], gain)
    n_out = hops[-1].shape[-2]
    noise_cov = np.zeros(gain.shape[:-2] + (n_out, n_out), dtype=complex) + np.eye(n_out)
    m = None
    for j in range(n_hops - 1, 0, -1):
        applied = hops[j] if m is None else m @ hops[j]
        m = _apply_right(applied, relay_ops[j - 1])
        noise_cov = noise_cov + m @ m.conj().swapaxes(-1, -2)
    return EffectiveChannel(gain=gain, noise_cov=noise_cov)


def af_effective(real: ChannelRealization, snr: float) -> EffectiveChannel:
    """Amplify-and-forward: per-antenna normalization at every relay."""
    dim = real.dim
    diags = [
        _normalizer_diag(real.hops[i - 1], snr, dim[i - 1], dim[i]) for i in range(1, dim.hops)
    ]
    return _chain_effective(real.hops, diags)


def ff_effective(
    real: ChannelRealization, sched: FlipSchedule, snr: float
) -> list[EffectiveChannel]:
    """Per-mode effective channels of the flip-and-forward scheme.

    Flips are unit-modulus, so the amplify normalization is the AF one;
    mode k combines it with the +-1 pattern of each relay layer.  The
    scheme's mutual information is the average over modes.
    """
    dim = real.dim
    if sched.dim != dim:
        raise ValueError("schedule was built for a different dimension")
    diags = [
        _normalizer_diag(real.hops[i - 1], snr, dim[i - 1], dim[i]) for i in range(1, dim.hops)
    ]
    out = []
    for mode in range(1, sched.mode_count + 1):
        flips = sched.mode_flips(mode)
        ops = [d * np.asarray(f, dtype=float) for d, f in zip(diags, flips)]
        out.append(_chain_effective(real.hops, ops))
    return out


def pf_effective(real: ChannelRealization, snr: float) -> EffectiveChannel:
    """Project-and-forward: project onto the incoming signal subspace.

    A relay with more antennas than the incoming rank projects its
    received vector onto the column space of the incoming matrix (an
    orthonormal-basis factorization keeps the noise white), then
    normalizes and forwards on rank-many antennas at full per-layer
    power.  Square or thin relays forward exactly as in AF.
    """
    dim = real.dim
    rank = dim[0]
    gain = None  # map x0 -> current transmitted signal
    noises: list[np.ndarray] = []  # maps from per-layer white noise
    for i in range(1, dim.hops):
        incoming = real.hops[i - 1][..., :, :rank]
        n_i = dim[i]
        if n_i <= rank:
            reduced = incoming
            new_rank = n_i
        else:
            q, r = np.linalg.qr(incoming)
            reduced = r
            new_rank = rank
        gain = reduced if gain is None else reduced @ gain
        noises = [reduced @ b for b in noises]
        noises.append(np.broadcast_to(np.eye(new_rank), reduced.shape[:-2] + (new_rank, new_rank)))
        row_power = (snr / rank) * np.sum(np.abs(reduced) ** 2, axis=-1) + 1.0
        scale = np.sqrt((snr / new_rank) / row_power)
        gain = scale[..., :, None] * gain
        noises = [scale[..., :, None] * b for b in noises]
        rank = new_rank
    last = real.hops[-1][..., :, :rank]
    gain = last if gain is None else last @ gain
    noises = [last @ b for b in noises]
    n_out = dim[dim.hops]
    noise_cov = np.zeros(gain.shape[:-2] + (n_out, n_out), dtype=complex) + np.eye(n_out)
    for b in noises:
        noise_cov = noise_cov + b @ b.conj().swapaxes(-1, -2)
    return EffectiveChannel(gain=gain, noise_cov=noise_cov)


def parallel_af_effective(
    real: ChannelRealization, p: Partition, snr: float
) -> list[EffectiveChannel]:
    """Per-path effective channels; each path runs AF on its own antennas.

    Power is path-local: a supernode of ``m`` antennas transmits
    ``snr/m`` per antenna while its path is active.
    """
    dim = real.dim
    out = []
    for path in p.paths:
        idx = [node.sorted_antennas() for node in path.supernodes]
        widths = path.widths
        sub_hops = []
        for i in range(dim.hops):
            h = real.hops[i][..., idx[i + 1], :][..., :, idx[i]]
            sub_hops.append(h)
        diags = [
            _normalizer_diag(sub_hops[i - 1], snr, widths[i - 1], widths[i])
            for i in range(1, dim.hops)
        ]
        out.append(_chain_effective(sub_hops, diags))
    return out


def alignment_rotations(real: ChannelRealization) -> list[np.ndarray]:
    """Per-relay unitary rotations matching adjacent hops' singular directions.

    Relay ``i`` maps the incoming hop's left singular basis onto the
    outgoing hop's right singular basis, pairing singular values in
    magnitude order, so the rotated chain is unitarily equivalent to
    the elementwise product of the hops' singular-value profiles.
    Requires a symmetric ``(n, ..., n)`` dimension (square hops).
    """
    dim = real.dim
    n = dim[0]
    if any(c != n for c in dim.counts):
        raise ValueError("alignment requires a symmetric (n,...,n) dimension")
    svds = [np.linalg.svd(h) for h in real.hops]
    rotations = []
    for i in range(1, dim.hops):
        u_in = svds[i - 1][0]
        vh_out = svds[i][2]
        rotations.append(vh_out.conj().swapaxes(-1, -2) @ u_in.conj().swapaxes(-1, -2))
    return rotations


def svd_align_effective(real: ChannelRealization, snr: float) -> EffectiveChannel:
    """CSI-aided alignment for symmetric channels.

    Each relay applies its alignment rotation, then the amplify
    normalization computed from the rotated hop's row powers.
    """
    dim = real.dim
    n = dim[0]
    ops = []
    for i, rotation in enumerate(alignment_rotations(real), start=1):
        rotated_hop = rotation @ real.hops[i - 1]
        row_power = (snr / n) * np.sum(np.abs(rotated_hop) ** 2, axis=-1) + 1.0
        scale = np.sqrt((snr / n) / row_power)
        ops.append(scale[..., :, None] * rotation)
    return _chain_effective(real.hops, ops)


def mutual_info(eff: EffectiveChannel, snr: float, n0: int):
    """Gaussian mutual information, bits per channel use.

    ``log2 det(I + (snr/n0) K_z^{-1} G G^H)`` with isotropic input,
    evaluated through a Cholesky factor of the noise covariance.
    """
    chol = np.linalg.cholesky(eff.noise_cov)
    whitened = np.linalg.solve(chol, eff.gain)
    n_out = whitened.shape[-2]
    s = np.eye(n_out) + (snr / n0) * (whitened @ whitened.conj().swapaxes(-1, -2))
    _, logdet = np.linalg.slogdet(s)
    return logdet.real / _LN2


def df_outage(real: ChannelRealization, decode: DecodeSet, snr: float, rate: float):
    """Outage of a serial partition: any AF segment below the rate fails."""
    dim = real.dim
    bounds = (0,) + decode.indices
    out = None
    for a, b in zip(bounds, bounds[1:]):
        seg_dim = Dimension(dim.counts[a : b + 1])
        seg = ChannelRealization(dim=seg_dim, hops=real.hops[a:b])
        mi = mutual_info(af_effective(seg, snr), snr, seg_dim[0])
        bad = mi < rate
        out = bad if out is None else (out | bad)
    return out


def outage_mask(dim: Dimension, scheme: Scheme, real: ChannelRealization, snr: float, rate: float):
    """Boolean outage indicator(s) for one (stacked) realization."""
    if isinstance(scheme, AfScheme):
        return mutual_info(af_effective(real, snr), snr, dim[0]) < rate
    if isinstance(scheme, PfScheme):
        return mutual_info(pf_effective(real, snr), snr, dim[0]) < rate
    if isinstance(scheme, SvdAlignScheme):
        return mutual_info(svd_align_effective(real, snr), snr, dim[0]) < rate
    if isinstance(scheme, DfScheme):
        return df_outage(real, scheme.decode, snr, rate)
    if isinstance(scheme, FfScheme):
        effs = ff_effective(real, scheme.schedule, snr)
        mi = sum(mutual_info(e, snr, dim[0]) for e in effs) / len(effs)
        return mi < rate
    if isinstance(scheme, ParallelAfScheme):
        effs = parallel_af_effective(real, scheme.partition, snr)
        widths = [path.widths[0] for path in scheme.partition.paths]
        mi = sum(mutual_info(e, snr, w) for e, w in zip(effs, widths)) / len(effs)
        return mi < rate
    raise TypeError(f"unknown scheme {scheme!r}")


# --------------------------------------------------------------------------
# Estimation
# --------------------------------------------------------------------------


def _count_block_range(args) -> int:
    dim, scheme, rate, snr, seed, blocks, trials = args
    total = 0
    for b in blocks:
        real = sample_block(dim, seed, b)
        mask = outage_mask(dim, scheme, real, snr, rate)
        live = min(trials - b * BLOCK_SIZE, BLOCK_SIZE)
        total += int(np.count_nonzero(mask[:live]))
    return total


def _binomial_ci(count: int, trials: int) -> tuple[float, float]:
    p = count / trials
    # Continuity floor keeps the normal approximation usable at the edges.
    p_var = p if 0 < count < trials else (count + 0.5) / (trials + 1.0)
    se = math.sqrt(p_var * (1.0 - p_var) / trials)
    return (max(0.0, p - 1.96 * se), min(1.0, p + 1.96 * se))


def estimate_outage(
    dim: DimensionLike,
    scheme: Scheme,
    rate: float,
    snr_db: float,
    trials: int,
    seed: int,
    workers: int = 1,
) -> OutageEstimate:
    """Monte-Carlo outage probability at one SNR point.

    Deterministic for a given seed, independent of ``workers``.
    """
    dim = as_dimension(dim)
    if trials < 1:
        raise ValueError("need at least one trial")
    snr = 10.0 ** (snr_db / 10.0)
    n_blocks = math.ceil(trials / BLOCK_SIZE)
    if workers <= 1 or n_blocks == 1:
        count = _count_block_range((dim, scheme, rate, snr, seed, range(n_blocks), trials))
    else:
        chunks = [
            (dim, scheme, rate, snr, seed, range(w, n_blocks, workers), trials)
            for w in range(workers)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            count = sum(pool.map(_count_block_range, chunks))
    return OutageEstimate(
        snr_db=float(snr_db),
        rate_bpcu=float(rate),
        trials=trials,
        outage_count=count,
        p_hat=count / trials,
        ci95=_binomial_ci(count, trials),
    )


def multiplexing_rate(r: float, snr_db: float) -> float:
    """Rate in bits per use growing as ``r * log2(SNR)``, the tradeoff's scaling."""
    return r * (snr_db / 10.0) * math.log2(10.0)


def outage_curve(
    dim: DimensionLike,
    scheme: Scheme,
    rate: float,
    snr_grid_db: Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
    rate_policy: str = "fixed",
) -> list[OutageEstimate]:
    """One outage point per grid SNR; every point reuses the same trial streams.

    With ``rate_policy="fixed"`` the target rate is constant (the slope
    then estimates the maximum diversity).  With ``"multiplexing"`` the
    per-point rate is ``rate * log2(SNR)``, tracing the tradeoff at
    multiplexing gain ``rate``; far more trials are needed there for
    comparable accuracy.
    """
    if rate_policy == "fixed":
        rates = [rate] * len(snr_grid_db)
    elif rate_policy == "multiplexing":
        rates = [multiplexing_rate(rate, s) for s in snr_grid_db]
    else:
        raise ValueError(f"unknown rate policy {rate_policy!r}")
    return [
        estimate_outage(dim, scheme, rr, s, trials, seed, workers=workers)
        for rr, s in zip(rates, snr_grid_db)
    ]


MIN_EVENTS_FOR_SLOPE = 20


def estimate_slope(points: Sequence[OutageEstimate]) -> float:
    """Diversity estimate: decay rate of outage with SNR on a log-log scale.

    Weighted least squares of ``log10 p`` against ``log10 SNR``; the
    weight of a point is the inverse variance of its log-probability
    estimate, and points with fewer than ``MIN_EVENTS_FOR_SLOPE``
    events (or with empty/full counts) are discarded as too noisy.
    """
    usable = [
        p
        for p in points
        if 0 < p.outage_count < p.trials and p.outage_count >= MIN_EVENTS_FOR_SLOPE
    ]
    if len(usable) < 3:
        raise ValueError("need at least 3 points with usable outage counts")
    x = np.array([p.snr_db / 10.0 for p in usable])
    y = np.array([math.log10(p.p_hat) for p in usable])
    w = np.array([p.trials * p.p_hat / (1.0 - p.p_hat) for p in usable])
    xm = np.sum(w * x) / np.sum(w)
    ym = np.sum(w * y) / np.sum(w)
    slope = np.sum(w * (x - xm) * (y - ym)) / np.sum(w * (x - xm) ** 2)
    return float(-slope)


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

CSV_HEADER = "snr_db,rate,trials,outages,p_hat,ci_lo,ci_hi"


def write_outage_csv(points: Sequence[OutageEstimate], out: IO[str]) -> None:
    """Fixed-format CSV; identical counts give identical bytes."""
    out.write(CSV_HEADER + "\n")
    for p in points:
        out.write(
            f"{p.snr_db:.6g},{p.rate_bpcu:.6g},{p.trials},{p.outage_count},"
            f"{p.p_hat:.10g},{p.ci95[0]:.10g},{p.ci95[1]:.10g}\n"
        )


def run_manifest(
    command: str,
    dim: DimensionLike,
    scheme_desc: dict,
    rate: float | None,
    snr_grid_db: Sequence[float],
    trials: int,
    seed: int,
    block_size: int = BLOCK_SIZE,
    extra: dict | None = None,
) -> dict:
    """Reproducibility record for a simulation run, with a config digest."""
    doc = {
        "command": command,
        "dim": list(as_dimension(dim).counts),
        "scheme": scheme_desc,
        "rate_bpcu": rate,
        "snr_grid_db": [float(s) for s in snr_grid_db],
        "trials": trials,
        "seed": seed,
        "block_size": block_size,
    }
    if extra:
        doc.update(extra)
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    doc["config_hash"] = hashlib.sha1(canon.encode()).hexdigest()
    return doc
