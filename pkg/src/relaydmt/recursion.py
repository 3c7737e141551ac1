"""
Recursive computation of the multihop AF tradeoff, used as an
independent oracle against the closed form in :mod:`relaydmt.dmt_core`.

The diversity at integer multiplexing gain ``k`` equals the minimum
cost of limiting the source-destination "flow" to ``k`` streams.
Cutting the channel at any interior layer ``i`` splits that cost::

    d(n_0..n_N, k) = min over j >= k of  d(n_0..n_i, j) + d((j, n_{i+1}..n_N), k)

with the two-layer base case ``d((a, b), k) = (a - k)(b - k)``, and the
shift identity ``d(n, k) = d(n - k, 0)`` when every count exceeds ``k``.
The canonical evaluation splits at the last layer, so the tail term is
the Rayleigh cost ``(j - k)(n_N - k)``.
"""

from __future__ import annotations

from functools import lru_cache

from .dmt_core import DimensionLike, as_dimension, dmt_rp

__all__ = ["dmt_recursive", "cross_check", "split_values"]


@lru_cache(maxsize=None)
def _d(ordered: tuple[int, ...], k: int) -> int:
    # Memo key is the sorted dimension: permutations share a tradeoff.
    if k >= min(ordered):
        return 0
    if len(ordered) == 2:
        return (ordered[0] - k) * (ordered[1] - k)
    head, last = ordered[:-1], ordered[-1]
    key = tuple(sorted(head))
    return min(
        _d(key, j) + (j - k) * (last - k) for j in range(k, min(head) + 1)
    )


def dmt_recursive(dim: DimensionLike, k: int) -> int:
    """Diversity at integer multiplexing gain ``k`` via the flow recursion."""
    dim = as_dimension(dim)
    if not 0 <= k <= dim.n_min:
        raise ValueError(f"k must be in 0..{dim.n_min}")
    return _d(dim.ordered, k)


def split_values(dim: DimensionLike, k: int, layer: int) -> int:
    """Recursion value when the chain is cut at ``layer`` (1..N-1).

    Every interior cut must give the same minimum; disagreement at any
    layer falsifies the recursion.
    """
    dim = as_dimension(dim)
    if not 1 <= layer <= dim.hops - 1:
        raise ValueError("cut layer must be interior")
    left = dim.counts[: layer + 1]
    right = dim.counts[layer + 1 :]
    j_hi = min(left)
    best = None
    for j in range(k, j_hi + 1):
        tail_dim = (j,) + right
        cost = _d(tuple(sorted(left)), j) + _d(tuple(sorted(tail_dim)), k)
        best = cost if best is None else min(best, cost)
    assert best is not None
    return best


def cross_check(dim: DimensionLike) -> bool:
    """Full agreement between the recursion and the closed-form curve.

    Checks, for every integer ``k``:

    * recursion == closed-form vertex value;
    * cut invariance: every interior cut layer yields the same minimum;
    * shift identity, whenever all counts stay positive after shifting.
    """
    dim = as_dimension(dim)
    curve = dmt_rp(dim)
    for k in range(dim.n_min + 1):
        expected = curve.evaluate(k)
        if dmt_recursive(dim, k) != expected:
            return False
        for layer in range(1, dim.hops):
            if split_values(dim, k, layer) != expected:
                return False
        if all(n > k for n in dim.counts):
            shifted = tuple(n - k for n in dim.counts)
            if dmt_recursive(shifted, 0) != expected:
                return False
    return True
