import itertools

import networkx as nx
import pytest

from relaydmt.dmt_core import cutset_bound, dmt_rp
from relaydmt.partition import (
    AfPath,
    Partition,
    Supernode,
    ff_schedule,
    is_full_diversity,
    is_independent,
    max_partition,
    min_full_div_partition_2hop,
    nonind_partition_diversity,
    partition_from_json,
    partition_to_json,
    search_min_full_diversity_partition,
    singleton_path,
)


def full_node(layer, n):
    return Supernode(layer, frozenset(range(n)))


def trivial_partition(counts):
    return Partition((AfPath(tuple(full_node(i, n) for i, n in enumerate(counts))),))


class TestIndependence:
    def test_relay_split_222(self):
        src, dst = full_node(0, 2), full_node(2, 2)
        p = Partition(
            (
                AfPath((src, Supernode(1, frozenset({0})), dst)),
                AfPath((src, Supernode(1, frozenset({1})), dst)),
            )
        )
        assert is_independent((2, 2, 2), p)

    def test_duplicated_path_shares_edges(self):
        path = trivial_partition((2, 2, 2)).paths[0]
        assert not is_independent((2, 2, 2), Partition((path, path)))

    def test_four_singleton_paths_222(self):
        p = Partition(
            (
                singleton_path((0, 0, 0)),
                singleton_path((0, 1, 1)),
                singleton_path((1, 0, 1)),
                singleton_path((1, 1, 0)),
            )
        )
        assert is_independent((2, 2, 2), p)

    def test_overlapping_supernodes_malformed(self):
        p = Partition(
            (
                AfPath((full_node(0, 2), Supernode(1, frozenset({0, 1})), full_node(2, 2))),
                AfPath((full_node(0, 2), Supernode(1, frozenset({1})), full_node(2, 2))),
            )
        )
        with pytest.raises(ValueError, match="overlapping"):
            is_independent((2, 2, 2), p)

    def test_out_of_range_antenna(self):
        p = Partition((AfPath((full_node(0, 3), full_node(1, 2), full_node(2, 2))),))
        with pytest.raises(ValueError):
            is_independent((2, 2, 2), p)


class TestFullDiversity:
    def test_243_two_wide_paths(self):
        _, p = min_full_div_partition_2hop(2, 4, 3)
        assert is_full_diversity((2, 4, 3), p)

    def test_trivial_222_is_not(self):
        assert not is_full_diversity((2, 2, 2), trivial_partition((2, 2, 2)))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_symmetric_singleton_relays(self, n):
        src, dst = full_node(0, n), full_node(2, n)
        p = Partition(
            tuple(AfPath((src, Supernode(1, frozenset({j})), dst)) for j in range(n))
        )
        assert is_full_diversity((n, n, n), p)

    def test_requires_independence(self):
        path = trivial_partition((2, 2, 2)).paths[0]
        with pytest.raises(ValueError, match="independent"):
            is_full_diversity((2, 2, 2), Partition((path, path)))

    def test_agrees_with_diversity_sum(self, dims_to_3_3):
        # The structural conditions and the per-path diversity sum must
        # be the same predicate on independent partitions.
        for counts in dims_to_3_3:
            p = max_partition(counts)
            d_max = int(cutset_bound(counts).d_max)
            total = sum(int(dmt_rp(path.widths).d_max) for path in p.paths)
            assert is_full_diversity(counts, p) == (total == d_max), counts

    def test_uncovered_bottleneck_layer_is_not_full_diversity(self):
        # A single narrow path leaves relay antennas unused: the count
        # conditions alone would pass, the coverage requirement must not.
        p = Partition((singleton_path((0, 0, 0, 0)),))
        counts = (1, 2, 2, 1)
        assert is_independent(counts, p)
        assert not is_full_diversity(counts, p)


def layered_flow_value(counts):
    """Independent oracle: max edge-disjoint paths = integral max flow."""
    g = nx.DiGraph()
    for i in range(len(counts) - 1):
        for a in range(counts[i]):
            for b in range(counts[i + 1]):
                g.add_edge(("L", i, a), ("L", i + 1, b), capacity=1)
    for a in range(counts[0]):
        g.add_edge("s", ("L", 0, a))
    for b in range(counts[-1]):
        g.add_edge(("L", len(counts) - 1, b), "t")
    return nx.maximum_flow_value(g, "s", "t")


def brute_force_max_disjoint(counts):
    """Truly exhaustive max edge-disjoint single-antenna family (tiny dims)."""
    paths = list(itertools.product(*[range(n) for n in counts]))
    edges = [
        [((i, p[i], p[i + 1])) for i in range(len(counts) - 1)] for p in paths
    ]
    best = 0

    def rec(start, used, size):
        nonlocal best
        best = max(best, size)
        for j in range(start, len(paths)):
            ej = edges[j]
            if any(e in used for e in ej):
                continue
            rec(j + 1, used | set(ej), size + 1)

    rec(0, frozenset(), 0)
    return best


class TestMaxPartition:
    def test_222(self):
        p = max_partition((2, 2, 2))
        assert p.size == 4
        assert is_independent((2, 2, 2), p)

    def test_all_ones(self):
        p = max_partition((1, 1, 1, 1))
        assert p.size == 1

    def test_243_has_eight(self):
        p = max_partition((2, 4, 3))
        assert p.size == 8
        assert is_independent((2, 4, 3), p)

    def test_size_matches_flow_oracle(self, dims_to_3_3):
        for counts in dims_to_3_3:
            d_max = int(cutset_bound(counts).d_max)
            p = max_partition(counts)
            assert p.size == d_max
            assert is_independent(counts, p), counts
            assert layered_flow_value(counts) == d_max, counts

    def test_flow_oracle_matches_brute_force_on_tiny(self):
        for n_hops in (1, 2):
            for counts in itertools.product((1, 2), repeat=n_hops + 1):
                assert layered_flow_value(counts) == brute_force_max_disjoint(counts)

    def test_per_antenna_load_bounds(self, dims_to_3_3):
        for counts in dims_to_3_3:
            p = max_partition(counts)
            d_max = p.size
            for layer, n in enumerate(counts):
                load = [0] * n
                for path in p.paths:
                    (antenna,) = path.supernodes[layer].antennas
                    load[antenna] += 1
                assert all(la in (d_max // n, -(-d_max // n)) for la in load), counts


class TestMinFullDiversity2Hop:
    @pytest.mark.parametrize(
        "counts,expect",
        [((2, 4, 3), 2), ((1, 5, 1), 5), ((3, 4, 3), 4), ((2, 2, 2), 2)],
    )
    def test_sizes(self, counts, expect):
        k, p = min_full_div_partition_2hop(*counts)
        assert k == expect
        assert is_full_diversity(counts, p)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_symmetric(self, n):
        k, p = min_full_div_partition_2hop(n, n, n)
        assert k == n
        assert is_full_diversity((n, n, n), p)

    def test_full_diversity_on_all_small_dims(self):
        for counts in itertools.product(range(1, 5), repeat=3):
            _, p = min_full_div_partition_2hop(*counts)
            assert is_full_diversity(counts, p), counts
            total = sum(int(dmt_rp(path.widths).d_max) for path in p.paths)
            assert total == int(cutset_bound(counts).d_max), counts

    def test_each_path_is_bottleneck_reducible(self, dims_to_3_3):
        # Every path of the constructed partition satisfies the
        # reduce-to-bottleneck condition on its own widths.
        for counts in dims_to_3_3:
            if len(counts) != 3:
                continue
            _, p = min_full_div_partition_2hop(*counts)
            for path in p.paths:
                o = sorted(path.widths)
                assert o[2] + 1 >= o[0] + o[1], counts

    def test_matches_exhaustive_search(self):
        for counts in [(2, 2, 2), (2, 4, 3), (1, 4, 1), (3, 3, 2), (2, 3, 2)]:
            k, _ = min_full_div_partition_2hop(*counts)
            k_search, p_search = search_min_full_diversity_partition(counts)
            assert k_search == k, counts
            assert is_full_diversity(counts, p_search)

    def test_exhaustive_search_guards_size(self):
        with pytest.raises(ValueError, match="exhaustive"):
            search_min_full_diversity_partition((5, 5, 5))
        with pytest.raises(ValueError, match="exhaustive"):
            search_min_full_diversity_partition((2, 2, 2, 2, 2))


class TestFlipSchedule:
    def test_222_matches_reference_modes(self):
        _, p = min_full_div_partition_2hop(2, 2, 2)
        sched = ff_schedule((2, 2, 2), p)
        assert sched.mode_count == 2
        assert sched.mode_flips(1) == [(1, 1)]
        assert sched.mode_flips(2) == [(1, -1)]

    def test_2222_enumerates_all_pairs(self):
        p = max_partition((2, 2, 2, 2))
        sched = ff_schedule((2, 2, 2, 2), p)
        assert sched.layer_counts == (2, 2)
        assert sched.mode_count == 4
        assert sorted(sched.mode_map) == sorted(itertools.product((1, 2), (1, 2)))

    def test_single_supernode_layers(self):
        p = trivial_partition((2, 3, 2))
        with pytest.warns(UserWarning):
            sched = ff_schedule((2, 3, 2), p)
        assert sched.mode_count == 1
        assert sched.mode_flips(1) == [(1, 1, 1)]

    def test_mode_map_is_bijection(self):
        # The mode indexing covers the product of per-layer choices
        # exactly once, whatever the supernode counts.
        for layer_counts in itertools.product((1, 2, 3, 4), repeat=3):
            counts = (4,) + tuple(max(2, k) for k in layer_counts) + (4,)
            paths = []
            src = full_node(0, counts[0])
            dst = full_node(len(counts) - 1, counts[-1])
            for combo in itertools.product(*[range(k) for k in layer_counts]):
                nodes = [
                    Supernode(layer, frozenset({j}))
                    for layer, j in enumerate(combo, start=1)
                ]
                paths.append(AfPath((src, *nodes, dst)))
            with pytest.warns(UserWarning):
                sched = ff_schedule(counts, Partition(tuple(paths)))
            assert sched.layer_counts == layer_counts
            assert sorted(sched.mode_map) == sorted(
                itertools.product(*[range(1, k + 1) for k in layer_counts])
            ), layer_counts

    def test_selection_vectors(self):
        _, p = min_full_div_partition_2hop(2, 4, 3)
        sched = ff_schedule((2, 4, 3), p)
        assert sched.selection_vector(1, 1) == (1, 1, 0, 0)
        assert sched.selection_vector(1, 2) == (0, 0, 1, 1)


class TestNonIndependentPartition:
    def test_32223_pivot_2(self):
        assert nonind_partition_diversity((3, 2, 2, 2, 3), 2) == 4

    def test_222_pivot_1(self):
        assert nonind_partition_diversity((2, 2, 2), 1) == 4

    def test_matches_segment_minimum(self, dims_to_3_3):
        for counts in dims_to_3_3:
            hops = len(counts) - 1
            for layer in range(1, hops):
                left = dmt_rp(counts[: layer + 1]).d_max
                right = dmt_rp(counts[layer:]).d_max
                assert nonind_partition_diversity(counts, layer) == min(left, right)

    def test_pivot_out_of_range(self):
        with pytest.raises(ValueError):
            nonind_partition_diversity((2, 2, 2), 2)


class TestDiversitySumBound:
    def test_independent_partitions_never_exceed_cutset(self, dims_to_3_3):
        for counts in dims_to_3_3:
            d_max = int(cutset_bound(counts).d_max)
            p = max_partition(counts)
            total = sum(int(dmt_rp(path.widths).d_max) for path in p.paths)
            assert total <= d_max


class TestJsonRoundTrip:
    def test_round_trip(self):
        for counts in [(2, 2, 2), (2, 4, 3), (3, 1, 4, 2)]:
            p = max_partition(counts)
            text = partition_to_json(counts, p)
            dim2, p2 = partition_from_json(text)
            assert dim2.counts == counts
            assert partition_to_json(dim2, p2) == text
            assert is_independent(counts, p2)

    def test_wide_paths(self):
        _, p = min_full_div_partition_2hop(2, 4, 3)
        dim2, p2 = partition_from_json(partition_to_json((2, 4, 3), p))
        assert p2.path_dims() == ((2, 2, 3), (2, 2, 3))
