"""
Small algebraic space-time block codes and coded error-rate simulation.

Two constructions over QAM symbol alphabets:

* the 2x2 orthogonal design (one information symbol per channel use);
* the 2x2 golden-ratio lattice code and its two-sub-channel parallel
  sibling, built on ``Q(i, sqrt 5)`` with the conjugate mode obtained by
  negating the eighth root of unity that plays the non-norm role.

Both are symbol-linear: the difference of two codewords is the codeword
of the difference symbols, so the non-vanishing-determinant (NVD) check
enumerates difference-symbol tuples rather than codeword pairs.  The
defining property is that the minimum product determinant stays at the
same positive value as the constellation grows.

Maximum-likelihood decoding whitens each sub-channel by a Cholesky
factor of its noise covariance and minimizes the summed Frobenius
distance exhaustively over the codebook.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel_sim import (
    ChannelRealization,
    EffectiveChannel,
    OutageEstimate,
    AfScheme,
    FfScheme,
    Scheme,
    _binomial_ci,
    _block_rng,
    af_effective,
    ff_effective,
)
from .dmt_core import DimensionLike, as_dimension

__all__ = [
    "QamAlphabet",
    "Codebook",
    "alamouti",
    "golden",
    "stacked",
    "verify_nvd",
    "ml_decode",
    "simulate_ser",
    "codebook_to_json",
    "NVD_EVALUATION_CAP",
    "CODED_BLOCK_SIZE",
]

NVD_EVALUATION_CAP = 10**6
CODED_BLOCK_SIZE = 2048

_GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
_GOLDEN_CONJ = (1.0 - math.sqrt(5.0)) / 2.0
_ALPHA = 1.0 + 1j - 1j * _GOLDEN_RATIO
_ALPHA_CONJ = 1.0 + 1j - 1j * _GOLDEN_CONJ
_ZETA8 = np.exp(1j * np.pi / 4.0)


@dataclass(frozen=True)
class QamAlphabet:
    """Square QAM constellation on unnormalized Gaussian integers.

    ``points`` are the raw lattice points ({+-1 +-1j} for order 4,
    {+-1, +-3}^2 for order 16); ``energy_norm`` rescales them to unit
    average energy when a transmit signal is formed.
    """

    order: int
    points: tuple[complex, ...]
    energy_norm: float

    @classmethod
    def qam(cls, order: int) -> "QamAlphabet":
        if order == 4:
            reals = (-1, 1)
        elif order == 16:
            reals = (-3, -1, 1, 3)
        else:
            raise ValueError("only 4-QAM and 16-QAM are supported")
        pts = tuple(complex(a, b) for a in reals for b in reals)
        mean_energy = sum(abs(p) ** 2 for p in pts) / len(pts)
        return cls(order=order, points=pts, energy_norm=1.0 / math.sqrt(mean_energy))

    def difference_points(self, max_coord: int | None = None) -> tuple[complex, ...]:
        """Pairwise differences of the constellation, optionally boxed.

        ``max_coord`` keeps only differences whose real and imaginary
        parts are at most that large in magnitude (used to fit large
        constellations under the exhaustive-search evaluation cap).
        """
        reals = sorted({int(p.real) for p in self.points})
        diffs = sorted({a - b for a in reals for b in reals})
        if max_coord is not None:
            diffs = [d for d in diffs if abs(d) <= max_coord]
        return tuple(complex(a, b) for a in diffs for b in diffs)


@dataclass(frozen=True)
class Codebook:
    """A finite symbol-linear space-time code for ``k_sub`` parallel sub-channels.

    ``encode`` maps symbol tuples to codeword matrix tuples of shape
    ``(..., k_sub, n_t, time_span)``.  ``energy_norm`` scales codewords
    so the average transmitted power per antenna per channel use is
    ``1/n_t`` of the total (matching the isotropic-input convention of
    the outage engine).
    """

    name: str
    k_sub: int
    n_t: int
    time_span: int
    num_symbols: int
    alphabet: QamAlphabet
    energy_norm: float
    rate_syms_per_use: float  # information symbols per end-to-end channel use (all k_sub * T uses)
    linear: bool = True

    def encode(self, symbols: np.ndarray) -> np.ndarray:
        """Unnormalized codewords from raw symbols ``(..., num_symbols)``."""
        return _ENCODERS[self.name](symbols)

    def codewords(self) -> tuple[np.ndarray, np.ndarray]:
        """All codewords and their symbol tuples, enumerated in a fixed order."""
        grids = np.meshgrid(*([np.array(self.alphabet.points)] * self.num_symbols), indexing="ij")
        symbols = np.stack([g.ravel() for g in grids], axis=-1)
        return self.encode(symbols), symbols

    def describe(self) -> dict:
        return {
            "code": self.name,
            "k_sub": self.k_sub,
            "n_t": self.n_t,
            "time_span": self.time_span,
            "qam": self.alphabet.order,
        }


def _encode_alamouti(s: np.ndarray) -> np.ndarray:
    s1, s2 = s[..., 0], s[..., 1]
    x = np.empty(s.shape[:-1] + (1, 2, 2), dtype=complex)
    x[..., 0, 0, 0] = s1
    x[..., 0, 0, 1] = -np.conj(s2)
    x[..., 0, 1, 0] = s2
    x[..., 0, 1, 1] = np.conj(s1)
    return x


def _encode_golden_modes(s: np.ndarray, gammas: Sequence[complex]) -> np.ndarray:
    a, b, c, d = (s[..., i] for i in range(4))
    x = np.empty(s.shape[:-1] + (len(gammas), 2, 2), dtype=complex)
    for k, gamma in enumerate(gammas):
        x[..., k, 0, 0] = _ALPHA * (a + b * _GOLDEN_RATIO)
        x[..., k, 0, 1] = _ALPHA * (c + d * _GOLDEN_RATIO)
        x[..., k, 1, 0] = gamma * _ALPHA_CONJ * (c + d * _GOLDEN_CONJ)
        x[..., k, 1, 1] = _ALPHA_CONJ * (a + b * _GOLDEN_CONJ)
    return x


def _encode_golden1(s: np.ndarray) -> np.ndarray:
    return _encode_golden_modes(s, (1j,))


def _encode_golden2(s: np.ndarray) -> np.ndarray:
    return _encode_golden_modes(s, (_ZETA8, -_ZETA8))


def _encode_stacked2(s: np.ndarray) -> np.ndarray:
    # Block-diagonal stack of the two-sub-channel lattice code: rows of
    # the 4 x 4 full codeword split two per sub-channel.
    modes = _encode_golden2(s)
    x = np.zeros(s.shape[:-1] + (2, 2, 4), dtype=complex)
    x[..., 0, :, 0:2] = modes[..., 0, :, :]
    x[..., 1, :, 2:4] = modes[..., 1, :, :]
    return x


_ENCODERS = {
    "alamouti": _encode_alamouti,
    "golden": _encode_golden1,
    "parallel-golden": _encode_golden2,
    "stacked-golden": _encode_stacked2,
}


def _with_energy_norm(cb: Codebook) -> Codebook:
    words, _ = cb.codewords()
    mean_power = float(np.mean(np.sum(np.abs(words) ** 2, axis=(-2, -1))))
    norm = math.sqrt(cb.n_t * cb.time_span / mean_power)
    return Codebook(
        name=cb.name,
        k_sub=cb.k_sub,
        n_t=cb.n_t,
        time_span=cb.time_span,
        num_symbols=cb.num_symbols,
        alphabet=cb.alphabet,
        energy_norm=norm,
        rate_syms_per_use=cb.rate_syms_per_use,
        linear=cb.linear,
    )


def alamouti(q: QamAlphabet) -> Codebook:
    """2x2 orthogonal design: one symbol per channel use, K = 1."""
    return _with_energy_norm(
        Codebook(
            name="alamouti",
            k_sub=1,
            n_t=2,
            time_span=2,
            num_symbols=2,
            alphabet=q,
            energy_norm=1.0,
            rate_syms_per_use=1.0,
        )
    )


def golden(q: QamAlphabet, m: int = 0) -> Codebook:
    """Golden-ratio lattice code: full-rate 2x2 (m=0) or its K=2 parallel form (m=1).

    Codewords follow::

        [ alpha (a + b th)          alpha (c + d th)      ]
        [ gamma alpha' (c + d th')  alpha' (a + b th')    ]

    with ``th`` the golden ratio, ``th'`` its conjugate, and
    ``alpha = 1 + i - i*th``.  For ``m = 0`` the twist is ``gamma = i``;
    for ``m = 1`` the two sub-channel codewords use the eighth root of
    unity and its negation, which keeps the product of the two
    determinants a Gaussian integer and hence bounded away from zero.
    """
    if m == 0:
        name, k_sub = "golden", 1
    elif m == 1:
        name, k_sub = "parallel-golden", 2
    else:
        raise ValueError("only m = 0 and m = 1 are supported")
    return _with_energy_norm(
        Codebook(
            name=name,
            k_sub=k_sub,
            n_t=2,
            time_span=2,
            num_symbols=4,
            alphabet=q,
            energy_norm=1.0,
            rate_syms_per_use=4.0 / (k_sub * 2),
        )
    )


def stacked(q: QamAlphabet) -> Codebook:
    """Row-partitioned block-diagonal stack of the K=2 parallel code.

    The 4 x 4 block-diagonal full codeword is cut into two aligned 2 x 4
    row blocks, one per sub-channel.  Only sub-block-aligned row splits
    keep the determinant product positive, so that is the split used.
    """
    return _with_energy_norm(
        Codebook(
            name="stacked-golden",
            k_sub=2,
            n_t=2,
            time_span=4,
            num_symbols=4,
            alphabet=q,
            energy_norm=1.0,
            rate_syms_per_use=4.0 / (2 * 4),
        )
    )


# --------------------------------------------------------------------------
# Non-vanishing determinant search
# --------------------------------------------------------------------------


def verify_nvd(
    cb: Codebook,
    difference_points: Sequence[complex],
    cap: int = NVD_EVALUATION_CAP,
) -> tuple[float, tuple[complex, ...]]:
    """Exhaustive minimum of the product determinant over difference tuples.

    Evaluates ``prod_k |det(D_k D_k^H)|`` for every nonzero tuple of
    difference symbols (codewords are symbol-linear, so these are
    exactly the codeword differences).  Returns the minimum and an
    attaining tuple.  Raises if the enumeration would exceed ``cap``
    tuples rather than silently sampling.  Raw lattice symbols are
    used; no energy normalization is applied.
    """
    if not cb.linear:
        return _verify_nvd_all_pairs(cb, cap)
    n_tuples = len(difference_points) ** cb.num_symbols
    if n_tuples > cap:
        raise ValueError(
            f"{n_tuples} difference tuples exceed the exhaustive cap of {cap}; "
            "restrict the difference alphabet"
        )
    pts = np.asarray(difference_points, dtype=complex)
    grids = np.meshgrid(*([pts] * cb.num_symbols), indexing="ij")
    tuples = np.stack([g.ravel() for g in grids], axis=-1)
    nonzero = ~np.all(tuples == 0, axis=-1)
    tuples = tuples[nonzero]
    best = math.inf
    best_tuple: tuple[complex, ...] = ()
    for start in range(0, tuples.shape[0], 65536):
        chunk = tuples[start : start + 65536]
        words = cb.encode(chunk)  # (m, K, n_t, T)
        gram = words @ words.conj().swapaxes(-1, -2)
        prod = np.prod(np.abs(np.linalg.det(gram)), axis=-1)
        i = int(np.argmin(prod))
        if prod[i] < best:
            best = float(prod[i])
            best_tuple = tuple(chunk[i])
    return best, best_tuple


def _verify_nvd_all_pairs(cb: Codebook, cap: int) -> tuple[float, tuple[complex, ...]]:
    words, symbols = cb.codewords()
    n = words.shape[0]
    if n * n > cap:
        raise ValueError(f"{n * n} codeword pairs exceed the exhaustive cap of {cap}")
    diff = words[:, None] - words[None, :]  # (n, n, K, n_t, T)
    gram = diff @ diff.conj().swapaxes(-1, -2)
    prod = np.prod(np.abs(np.linalg.det(gram)), axis=-1)
    prod[np.arange(n), np.arange(n)] = math.inf
    i, j = np.unravel_index(int(np.argmin(prod)), prod.shape)
    return float(prod[i, j]), tuple(symbols[i] - symbols[j])


# --------------------------------------------------------------------------
# Decoding and coded simulation
# --------------------------------------------------------------------------


def ml_decode(
    received: Sequence[np.ndarray],
    effs: Sequence[EffectiveChannel],
    cb: Codebook,
    snr: float,
) -> int:
    """Exhaustive maximum-likelihood codeword index for one reception.

    Whitens each sub-channel by the Cholesky factor of its noise
    covariance and minimizes the summed squared distance; ties resolve
    to the lowest index.
    """
    words, _ = cb.codewords()
    n0 = effs[0].gain.shape[-1]
    amp = math.sqrt(snr / n0) * cb.energy_norm
    total = np.zeros(words.shape[0])
    for k in range(cb.k_sub):
        chol = np.linalg.cholesky(effs[k].noise_cov)
        y_w = np.linalg.solve(chol, received[k])
        g_w = np.linalg.solve(chol, effs[k].gain)
        cand = amp * (g_w @ words[:, k])  # (M, n_r, T)
        total += np.sum(np.abs(y_w[None] - cand) ** 2, axis=(-2, -1))
    return int(np.argmin(total))


def _coded_effectives(
    dim, scheme: Scheme, real: ChannelRealization, snr: float, k_sub: int
) -> list[EffectiveChannel]:
    if isinstance(scheme, AfScheme):
        effs = [af_effective(real, snr)]
    elif isinstance(scheme, FfScheme):
        effs = ff_effective(real, scheme.schedule, snr)
    else:
        raise TypeError("coded simulation supports the af and ff schemes")
    if len(effs) != k_sub:
        raise ValueError(f"code has {k_sub} sub-channels but the scheme offers {len(effs)}")
    return effs


def _ser_block(dim, scheme, cb, snr, seed, block, words, word_flat, word_grams, live) -> int:
    """Codeword errors among the first ``live`` trials of one block.

    Draw order inside the block stream is fixed: hop variates, then the
    transmitted codeword indices, then per-sub-channel noise.  Distances
    are expanded as ``|Y|^2 - 2 amp Re<G^H Y, X> + amp^2 tr(Q X X^H)``
    on the whitened quantities (``Q = G^H G``), so the codebook enters
    only through two small matrix products per sub-channel instead of a
    trials-by-codebook array of candidate receptions.
    """
    n0 = dim[0]
    amp = math.sqrt(snr / n0) * cb.energy_norm
    rng = _block_rng(seed, block)
    hop_mats = []
    for i in range(dim.hops):
        raw = rng.standard_normal((CODED_BLOCK_SIZE, dim[i + 1], dim[i], 2))
        hop_mats.append((raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0))
    real = ChannelRealization(dim=dim, hops=tuple(hop_mats))
    n_words = words.shape[0]
    sent = rng.integers(0, n_words, size=CODED_BLOCK_SIZE)
    effs = _coded_effectives(dim, scheme, real, snr, cb.k_sub)
    total = np.zeros((CODED_BLOCK_SIZE, n_words))
    n_t = cb.n_t
    for k in range(cb.k_sub):
        gain, cov = effs[k].gain, effs[k].noise_cov
        n_r = gain.shape[-2]
        chol = np.linalg.cholesky(cov)
        raw = rng.standard_normal((CODED_BLOCK_SIZE, n_r, cb.time_span, 2))
        white = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
        y = amp * (gain @ words[sent, k]) + chol @ white
        y_w = np.linalg.solve(chol, y)
        g_w = np.linalg.solve(chol, gain)  # (B, n_r, n_t)
        corr = g_w.conj().swapaxes(-1, -2) @ y_w  # (B, n_t, T)
        gram = g_w.conj().swapaxes(-1, -2) @ g_w  # (B, n_t, n_t)
        term1 = np.sum(np.abs(y_w) ** 2, axis=(-2, -1))[:, None]
        term2 = (corr.reshape(-1, n_t * cb.time_span) @ word_flat[k]).real
        term3 = (gram.reshape(-1, n_t * n_t) @ word_grams[k]).real
        total += term1 - 2.0 * amp * term2 + amp * amp * term3
    decided = np.argmin(total, axis=1)
    return int(np.count_nonzero((decided != sent)[:live]))


def _word_tables(words: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Codebook lookup tables for the expanded ML distance.

    Per sub-channel k: the conjugated flattened codewords,
    ``(n_t*T, M)``, and the transposed-flattened codeword Grams,
    ``(n_t^2, M)``, laid out so ``tr(Q X X^H)`` is a single matrix
    product against the flattened per-trial ``Q``.
    """
    flats, grams = [], []
    for k in range(words.shape[1]):
        w = words[:, k]  # (M, n_t, T)
        flats.append(w.conj().reshape(w.shape[0], -1).T.copy())
        xxh = w @ w.conj().swapaxes(-1, -2)
        grams.append(xxh.swapaxes(-1, -2).reshape(w.shape[0], -1).T.copy())
    return flats, grams


def _ser_range(args) -> int:
    dim, scheme, cb, snr, seed, blocks, trials = args
    words, _ = cb.codewords()
    word_flat, word_grams = _word_tables(words)
    errors = 0
    for b in blocks:
        live = min(trials - b * CODED_BLOCK_SIZE, CODED_BLOCK_SIZE)
        errors += _ser_block(dim, scheme, cb, snr, seed, b, words, word_flat, word_grams, live)
    return errors


def simulate_ser(
    dim: DimensionLike,
    scheme: Scheme,
    cb: Codebook,
    snr_grid_db: Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[OutageEstimate]:
    """Codeword error rate per SNR point under exhaustive ML decoding.

    The code's sub-channel count must match the scheme (one AF channel,
    or one channel per flip mode).  Deterministic for a given seed,
    independent of the worker count.
    """
    dim = as_dimension(dim)
    if trials < 1:
        raise ValueError("need at least one trial")
    points = []
    n_blocks = math.ceil(trials / CODED_BLOCK_SIZE)
    for snr_db in snr_grid_db:
        snr = 10.0 ** (snr_db / 10.0)
        if workers <= 1 or n_blocks == 1:
            errors = _ser_range((dim, scheme, cb, snr, seed, range(n_blocks), trials))
        else:
            chunks = [
                (dim, scheme, cb, snr, seed, range(w, n_blocks, workers), trials)
                for w in range(workers)
            ]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                errors = sum(pool.map(_ser_range, chunks))
        bits_per_use = cb.rate_syms_per_use * math.log2(cb.alphabet.order)
        points.append(
            OutageEstimate(
                snr_db=float(snr_db),
                rate_bpcu=bits_per_use,
                trials=trials,
                outage_count=errors,
                p_hat=errors / trials,
                ci95=_binomial_ci(errors, trials),
            )
        )
    return points


def codebook_to_json(cb: Codebook) -> str:
    """Reproducibility export: construction name, alphabet, and basis data."""
    doc = {
        "code": cb.name,
        "k_sub": cb.k_sub,
        "n_t": cb.n_t,
        "time_span": cb.time_span,
        "num_symbols": cb.num_symbols,
        "qam_order": cb.alphabet.order,
        "qam_points": [[int(p.real), int(p.imag)] for p in cb.alphabet.points],
        "energy_norm": cb.energy_norm,
        "rate_syms_per_use": cb.rate_syms_per_use,
        "basis": "codeword = encoder(name) applied to integer QAM symbols; "
        "lattice constants: golden ratio, alpha = 1 + i - i*theta, "
        "twist gamma in {i} or {zeta8, -zeta8}",
    }
    return json.dumps(doc, indent=2, sort_keys=True)
