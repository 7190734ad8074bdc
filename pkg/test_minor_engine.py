"""Engine parameters, expander growth, the partition engine and witness checks"""
import math

import pytest

from expander_minors import minor_engine, walks
from expander_minors.errors import (
    ConfigError, DisconnectedGraphError, EngineInvariantError, ExhaustiveLimitError, GraphError, RegimeError,
)
from expander_minors.generators import complete_bipartite, random_regular
from expander_minors.graph_core import build_graph, external_neighborhood, is_connected_set
from expander_minors.minor_engine import (
    CONSTANT_DEGREE, FAILURE, INTERMEDIATE, LITERAL, SPARSE, SUCCESS, TIMEOUT, EngineParams, MinorWitness,
    Partition, Verification, bipartite_ccl_upper_bound, brute_force_ccl, compute_params, find_minor,
    grow_connected_expander, normalize_mode, pad_connected, verify_partition, verify_witness,
)
from expander_minors.walks import RngStream


def small_params(n, d, mode=SPARSE, **changes):
    """Hand-built parameters for fixtures too small for compute_params"""
    values = dict(n=n, d=d, eps=0.3, zeta=0.0375, K=4.0, t=2, r=2, ell=10, ell_coef=1.0, cover_eps=0.3,
                  C=3.0, mode=mode, profile='desk', branch_cap=6, cover_cap=4)
    values.update(changes)
    return EngineParams(**values)


class TestComputeParams:
    def test_sparse_desk_values(self):
        params = compute_params(10 ** 5, 16, 0.4)
        assert params.zeta == pytest.approx(0.05)
        assert params.t == 66
        assert params.r == 94
        assert params.ell >= 1
        assert params.mode == SPARSE

    def test_constant_degree(self):
        params = compute_params(10 ** 4, 3, 0.4, mode='constd')
        assert params.mode == CONSTANT_DEGREE
        assert (params.t, params.r) == (100, 25)

    def test_constant_degree_keeps_room_for_padded_sets(self):
        for n in (64, 900, 1024, 4096, 10 ** 4):
            params = compute_params(n, 4, 0.1, mode=CONSTANT_DEGREE)
            assert params.r * params.t <= n / 4 + params.t

    @pytest.mark.parametrize('mode', [SPARSE, INTERMEDIATE])
    @pytest.mark.parametrize('d', [8, 16])
    @pytest.mark.parametrize('n', [2 ** 10, 2 ** 11, 2 ** 12, 2 ** 13, 2 ** 14])
    def test_desk_grid_is_parameterisable(self, n, d, mode):
        params = compute_params(n, d, 0.4, mode=mode)
        assert 1 <= params.t <= 0.4 * n / (4 * d)
        assert params.r >= 1
        assert params.cover_cap == 2 * params.t

    def test_t_is_clamped_to_the_branch_budget(self):
        # 0.5 sqrt(1024 ln 16 / 16) rounds up to 7 > 0.4 * 1024 / 64 = 6.4
        assert compute_params(1024, 16, 0.4).t == 6
        assert compute_params(1024, 16, 0.4, mode=INTERMEDIATE).t == 6
        assert compute_params(1024, 8, 0.4).t == 9

    def test_literal_covering_constants(self):
        # one of the few instances the literal profile accepts
        params = compute_params(10 ** 14, 100, 0.4, profile=LITERAL, zeta=0.45)
        assert params.cover_eps == pytest.approx(0.45 ** 3 / 4)
        assert params.K == pytest.approx(32 / (0.45 ** 3 / 4) ** 3)
        assert params.K > 32 / 0.45 ** 3
        assert params.r >= 1

    def test_constant_degree_literal_profile_is_degenerate(self):
        # r = floor(zeta^2 eps 100 / 2) = 0
        with pytest.raises(RegimeError) as info:
            compute_params(10 ** 4, 3, 0.4, mode='constd', profile=LITERAL)
        assert 'r >= 1' in info.value.inequality

    def test_literal_profile_needs_large_degree(self):
        with pytest.raises(RegimeError) as info:
            compute_params(10 ** 5, 16, 0.4, profile=LITERAL)
        assert 'zeta^3 eps d > e' in info.value.inequality

    def test_branch_sets_too_large_for_the_graph(self):
        with pytest.raises(RegimeError) as info:
            compute_params(100, 50, 0.4)
        assert 't <= eps n/(4d)' in info.value.inequality

    @pytest.mark.parametrize('n, d, eps', [(1000, 8, 0.5), (1000, 8, 0.0), (1000, 2, 0.3), (1, 3, 0.3)])
    def test_regime_errors(self, n, d, eps):
        with pytest.raises(RegimeError):
            compute_params(n, d, eps)

    def test_petersen_constant_degree(self):
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE)
        assert (params.t, params.r) == (4, 1)
        assert params.cover_cap == 8
        assert params.branch_cap == 12

    def test_overrides(self):
        params = compute_params(10 ** 5, 16, 0.4, K=8.0, C=1.0, ell=500)
        assert params.K == 8.0
        assert params.ell == 500
        assert params.retries == math.ceil(math.log(10 ** 5))

    def test_unknown_override_or_mode(self):
        with pytest.raises(ConfigError):
            compute_params(10 ** 5, 16, 0.4, beta=1)
        with pytest.raises(ConfigError):
            compute_params(10 ** 5, 16, 0.4, mode='dense')
        assert normalize_mode('constd') == CONSTANT_DEGREE

    def test_thresholds(self):
        params = compute_params(10 ** 5, 16, 0.4)
        assert params.neighbour_threshold == pytest.approx(66 * 0.6 * 16)
        assert params.growth_threshold == pytest.approx(0.65 * 16)
        assert params.min_u_degree == pytest.approx(0.8)


class TestGrowth:
    def test_single_vertex(self, k4):
        growth = grow_connected_expander(k4, 0, 1, 3)
        assert not growth.obstruction
        assert growth.vertices == {0}

    def test_cycle_pair(self, c6):
        growth = grow_connected_expander(c6, 0, 2, 2)
        assert not growth.obstruction
        assert growth.vertices == {0, 1}
        assert len(external_neighborhood(c6, growth.vertices)) == 2

    def test_cycle_obstruction(self, c6):
        growth = grow_connected_expander(c6, 0, 3, 2.5)
        assert growth.obstruction
        assert growth.vertices == {0, 1, 5}

    def test_size_beyond_n(self, c6):
        with pytest.raises(GraphError):
            grow_connected_expander(c6, 0, 7, 2)

    def test_grown_set_meets_its_bound(self):
        graph = random_regular(200, 8, RngStream(2))
        for v in (0, 50, 199):
            growth = grow_connected_expander(graph, v, 10, 5.0)
            if growth.obstruction:
                continue
            assert v in growth.vertices
            assert len(growth.vertices) == 10
            assert is_connected_set(graph, growth.vertices)
            assert len(external_neighborhood(graph, growth.vertices)) >= 10 * 4.0

    def test_padding_follows_bfs_order(self, c12):
        assert pad_connected(c12, {0}, 4) == {0, 1, 11, 2}
        assert pad_connected(c12, {0, 1}, 3) == {0, 1, 2}

    def test_padding_keeps_large_sets(self, c6):
        assert pad_connected(c6, {0, 1, 2}, 2) == {0, 1, 2}

    def test_padding_stops_at_the_component(self):
        graph = build_graph(5, [(0, 1), (1, 2), (3, 4)])
        assert pad_connected(graph, {0}, 4) == {0, 1, 2}
        with pytest.raises(GraphError):
            pad_connected(graph, set(), 2)

    def test_padded_set_is_connected(self):
        graph = random_regular(200, 4, RngStream(6))
        padded = pad_connected(graph, {5, *graph.neighbors(5).tolist()[:1]}, 30)
        assert len(padded) == 30
        assert is_connected_set(graph, padded)


class TestVerifyWitness:
    def test_complete_graph_singletons(self, k4):
        result = verify_witness(k4, MinorWitness([{0}, {1}, {2}, {3}]))
        assert result.valid
        assert result.order == 4

    def test_cycle_halves(self, c4):
        assert verify_witness(c4, MinorWitness([{0, 1}, {2, 3}])).valid

    def test_overlap(self, c6):
        result = verify_witness(c6, MinorWitness([{0, 1}, {2}, {1, 2}]))
        assert not result.valid
        assert result.condition == 'disjointness'
        assert result.indices == (0, 2)

    def test_disconnected_set(self, c6):
        result = verify_witness(c6, MinorWitness([{0, 3}]))
        assert result.condition == 'connectivity'
        assert result.indices == (0,)

    def test_missing_edge(self, c6):
        result = verify_witness(c6, MinorWitness([{0}, {3}]))
        assert result.condition == 'adjacency'
        assert result.indices == (0, 1)

    def test_empty_and_out_of_range(self, c6):
        assert verify_witness(c6, MinorWitness([set()])).condition == 'nonempty'
        assert verify_witness(c6, MinorWitness([{9}])).condition == 'range'

    def test_pair_fraction(self, k4, c4):
        assert verify_witness(k4, MinorWitness([{0}, {1}, {2}, {3}], kind='pair-fraction', threshold=0.1)).valid
        result = verify_witness(c4, MinorWitness([{0}, {2}], kind='pair-fraction', threshold=0.1))
        assert result.condition == 'pair-fraction'

    def test_report_dict(self, k4):
        data = verify_witness(k4, MinorWitness([{0}, {1}])).to_dict()
        assert data == {'valid': True, 'condition': None, 'indices': [], 'message': 'valid', 'order': 2}


def planted_witness(gen):
    """
    A graph built around a complete-minor witness: each branch set is a path,
    every pair of sets gets one edge, and a separate path of spare vertices
    touches no set.
    """
    q = int(gen.integers(2, 6))
    sizes = gen.integers(1, 4, size=q)
    sets, edges, start = [], [], 0
    for size in sizes:
        members = list(range(start, start + int(size)))
        edges += list(zip(members, members[1:]))
        sets.append(members)
        start += int(size)
    for i in range(q):
        for j in range(i + 1, q):
            edges.append((int(gen.choice(sets[i])), int(gen.choice(sets[j]))))
    spare = list(range(start, start + 3))
    edges += list(zip(spare, spare[1:]))
    return build_graph(start + 3, edges), sets, spare


def mutate(gen, sets, spare, n):
    """One change that must break the witness"""
    sets = [list(members) for members in sets]
    i = int(gen.integers(len(sets)))
    j = (i + 1) % len(sets)
    choice = int(gen.integers(5))
    if choice == 0:
        sets[i].append(sets[j][0])
    elif choice == 1 and len(sets[i]) == 3:
        sets[i].remove(sets[i][1])
    elif choice == 2:
        sets[i] = [spare[int(gen.integers(len(spare)))]]
    elif choice == 3:
        sets[i] = []
    else:
        sets[i].append(n)
    return sets


@pytest.mark.parametrize('cases', [pytest.param(1000, id='1e3'),
                                   pytest.param(10 ** 5, id='1e5', marks=pytest.mark.slow)])
def test_verifier_fuzz(cases):
    gen = RngStream(2024, 7).generator
    for _ in range(cases):
        graph, sets, spare = planted_witness(gen)
        assert verify_witness(graph, MinorWitness(sets)).valid
        broken = mutate(gen, sets, spare, graph.n)
        assert not verify_witness(graph, MinorWitness(broken)).valid


class TestVerifyPartition:
    def test_initial_partition(self, petersen_graph):
        result = verify_partition(petersen_graph, Partition.initial(petersen_graph), small_params(10, 3))
        assert result.valid

    def test_everything_discarded(self, petersen_graph):
        partition = Partition(D=frozenset(range(10)), branch_sets=[], U=frozenset())
        result = verify_partition(petersen_graph, partition, small_params(10, 3))
        assert result.condition == 'c'

    def test_shared_vertex(self, petersen_graph):
        partition = Partition(D=frozenset(), branch_sets=[frozenset({0, 1}), frozenset({1, 2})],
                              U=frozenset(range(3, 10)))
        result = verify_partition(petersen_graph, partition, small_params(10, 3))
        assert result.condition == 'b'
        assert result.indices == (0, 1)

    def test_uncovered_vertex(self, petersen_graph):
        partition = Partition(D=frozenset(), branch_sets=[], U=frozenset(range(9)))
        assert verify_partition(petersen_graph, partition, small_params(10, 3)).condition == 'partition'

    def test_small_neighbourhood(self, c6):
        # t(1/2 + 2 zeta)d = 2 * 0.575 * 3 > 2 neighbours of an arc
        partition = Partition(D=frozenset(), branch_sets=[frozenset({0, 1})], U=frozenset(range(2, 6)))
        assert verify_partition(c6, partition, small_params(6, 3)).condition == 'a'
        relaxed = small_params(6, 3, mode=CONSTANT_DEGREE)
        assert verify_partition(c6, partition, relaxed).valid

    def test_non_adjacent_sets(self, c6):
        partition = Partition(D=frozenset(), branch_sets=[frozenset({0}), frozenset({3})],
                              U=frozenset({1, 2, 4, 5}))
        params = small_params(6, 3, mode=CONSTANT_DEGREE)
        result = verify_partition(c6, partition, params)
        assert result.condition == 'b'
        assert result.indices == (0, 1)

    def test_intermediate_pairs(self, k4):
        params = small_params(4, 3, mode=INTERMEDIATE, t=1)
        sets = [frozenset({0}), frozenset({1})]
        good = Partition(frozenset(), sets, frozenset({2, 3}), pair_edges=frozenset({(0, 1)}))
        assert verify_partition(k4, good, params).valid
        short = Partition(frozenset(), sets, frozenset({2, 3}))
        assert verify_partition(k4, short, params).condition == 'b-pairs'

    def test_edges_from_discarded_vertices(self, k4):
        partition = Partition(D=frozenset({0}), branch_sets=[], U=frozenset({1, 2, 3}))
        # 3 edges into U against eps |D| d = 0.9
        result = verify_partition(k4, partition, small_params(4, 3, mode=CONSTANT_DEGREE))
        assert result.condition == 'd'


class TestFindMinor:
    def test_complete_graph(self, k4):
        params = compute_params(4, 3, 0.3, mode='constd')
        report = find_minor(k4, params, RngStream(0), check_invariants=True)
        assert report.outcome == SUCCESS
        assert report.order == params.r
        assert verify_witness(k4, report.witness).valid
        assert [event.rule for event in report.history] == ['covering-built', 'covering-added']
        assert len(report.witness.branch_sets[0]) == params.t

    @pytest.mark.parametrize('seed', range(5))
    def test_petersen_constant_degree(self, petersen_graph, seed):
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE)
        report = find_minor(petersen_graph, params, RngStream(seed), check_invariants=True)
        assert report.outcome == SUCCESS
        assert report.order == 1
        assert verify_witness(petersen_graph, report.witness).valid
        assert report.iterations <= 2 * petersen_graph.n

    def test_runs_are_deterministic(self, petersen_graph):
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE)
        first = find_minor(petersen_graph, params, RngStream(11))
        second = find_minor(petersen_graph, params, RngStream(11))
        assert first.witness.to_dict() == second.witness.to_dict()
        assert [e.to_dict() for e in first.history] == [e.to_dict() for e in second.history]

    @pytest.mark.parametrize('seeds', [pytest.param(10, id='10-seeds'),
                                       pytest.param(100, id='100-seeds', marks=pytest.mark.slow)])
    def test_never_beats_the_contraction_clique_number(self, seeds):
        graph = complete_bipartite(3, 5)
        params = compute_params(8, 5, 0.3, mode=CONSTANT_DEGREE, r=5)
        ccl = brute_force_ccl(graph)
        for seed in range(seeds):
            report = find_minor(graph, params, RngStream(seed), check_invariants=True)
            assert report.outcome != SUCCESS
            assert report.q <= ccl

    @pytest.mark.slow
    @pytest.mark.parametrize('fixture', ['k4', 'k5', 'c6', 'k33', 'k35', 'bridged_triangles'])
    def test_witness_order_is_below_exact_ccl(self, fixture, request):
        graph = request.getfixturevalue(fixture)
        ccl = brute_force_ccl(graph)
        params = compute_params(graph.n, max(3, graph.max_degree), 0.3, mode=CONSTANT_DEGREE)
        for seed in range(100):
            report = find_minor(graph, params, RngStream(seed), check_invariants=True)
            if report.outcome == SUCCESS:
                assert report.order <= ccl

    @pytest.mark.parametrize('seed', range(3))
    def test_constant_degree_builds_several_sets(self, seed):
        graph = random_regular(64, 4, RngStream(seed))
        params = compute_params(64, 4, 0.3, mode=CONSTANT_DEGREE)
        assert params.r == 2
        report = find_minor(graph, params, RngStream(seed), check_invariants=True)
        assert report.outcome == SUCCESS
        assert report.order == params.r
        assert report.iterations <= 2 * graph.n
        assert verify_witness(graph, report.witness).valid
        assert all(len(members) >= params.t for members in report.witness.branch_sets)

    def test_constant_degree_sets_survive_on_a_larger_graph(self):
        graph = random_regular(1024, 4, RngStream(3))
        params = compute_params(1024, 4, 0.1, mode=CONSTANT_DEGREE)
        report = find_minor(graph, params, RngStream(3), check_invariants=True)
        assert report.reason != 'constraint-d'
        assert report.outcome == SUCCESS
        assert report.order == params.r == 8
        assert verify_witness(graph, report.witness).valid

    @pytest.mark.slow
    @pytest.mark.parametrize('n, d, eps', [(64, 4, 0.3), (900, 3, 0.1), (1024, 4, 0.1), (1024, 4, 0.2),
                                           (1024, 8, 0.2), (4096, 3, 0.05), (64, 4, 0.1)])
    def test_constant_degree_across_configurations(self, n, d, eps):
        params = compute_params(n, d, eps, mode=CONSTANT_DEGREE)
        reports = []
        for seed in range(4):
            graph = random_regular(n, d, RngStream(seed))
            reports.append(find_minor(graph, params, RngStream(seed), check_invariants=True))
        assert not [r.reason for r in reports if r.reason in ('constraint-c', 'constraint-d')]
        assert sum(r.outcome == SUCCESS for r in reports) >= 3
        for report in reports:
            if report.outcome == SUCCESS:
                assert report.order == params.r

    @pytest.mark.parametrize('seed', range(2))
    def test_intermediate_mode_finds_a_dense_minor(self, seed):
        graph = random_regular(400, 6, RngStream(seed))
        params = compute_params(400, 6, 0.4, mode=INTERMEDIATE, r=4)
        report = find_minor(graph, params, RngStream(seed), check_invariants=True)
        assert report.outcome == SUCCESS
        assert report.witness.kind == 'pair-fraction'
        assert report.order == 4
        assert len(report.partition.pair_edges) >= 0.1 * 4 ** 2
        assert verify_witness(graph, report.witness).valid
        assert 'expander-grown' in [event.rule for event in report.history]

    def test_pair_deficit(self, mocker):
        # no four sets can hold q^2 adjacent pairs
        mocker.patch.object(minor_engine, 'PAIR_FRACTION', 1.0)
        graph = random_regular(400, 6, RngStream(3))
        params = compute_params(400, 6, 0.4, mode=INTERMEDIATE, r=2)
        report = find_minor(graph, params, RngStream(3))
        assert report.outcome == FAILURE
        assert report.reason == 'pair-deficit'
        assert report.q == 2
        assert report.witness is None

    def test_low_degree_vertex_and_stray_component_are_discarded(self):
        # K37 on 0..36, a degree-2 bridge vertex 37, and K4 on 38..41
        edges = [(u, v) for u in range(37) for v in range(u + 1, 37)]
        edges += [(0, 37), (37, 38)]
        edges += [(u, v) for u in range(38, 42) for v in range(u + 1, 42)]
        graph = build_graph(42, edges)
        params = compute_params(42, 37, 0.45, mode=CONSTANT_DEGREE)
        report = find_minor(graph, params, RngStream(0), check_invariants=True)
        assert [event.rule for event in report.history] == [
            'vertex-moved', 'component-moved', 'covering-built', 'covering-added']
        assert report.partition.D == frozenset(range(37, 42))
        assert report.outcome == SUCCESS

    def test_sparse_cut_is_swept_into_d(self, barbell):
        params = compute_params(20, 10, 0.3, mode=CONSTANT_DEGREE)
        report = find_minor(barbell, params, RngStream(0), check_invariants=True, engine_tol=0.05)
        rules = [event.rule for event in report.history]
        assert rules == ['sweep-moved', 'covering-built', 'covering-added']
        assert report.partition.D in (frozenset(range(10)), frozenset(range(10, 20)))
        assert report.outcome == SUCCESS

    def test_sweep_that_breaks_constraint_d(self, barbell):
        # one bridge edge against eps |D| d = 0.5
        params = compute_params(20, 10, 0.005, mode=CONSTANT_DEGREE)
        report = find_minor(barbell, params, RngStream(0), engine_tol=0.05)
        assert [event.rule for event in report.history] == ['sweep-moved']
        assert report.outcome == FAILURE
        assert report.reason == 'constraint-d'

    def test_obstruction_is_moved_and_breaks_constraint_c(self):
        # on K10 no pair of vertices keeps (t - 1) * 4.5 outside neighbours
        graph = build_graph(10, [(u, v) for u in range(10) for v in range(u + 1, 10)])
        report = find_minor(graph, small_params(10, 9), RngStream(0), check_invariants=True)
        assert [event.rule for event in report.history] == ['covering-built', 'S-moved']
        assert report.history[-1].size == 10
        assert report.reason == 'constraint-c'

    def test_weak_sets_are_recycled(self, c20):
        # an arc of 4 sends 2 edges into U, below eps t d = 3.6
        params = small_params(20, 3, mode=CONSTANT_DEGREE, t=4, branch_cap=12, cover_cap=8)
        report = find_minor(c20, params, RngStream(0), check_invariants=True)
        rules = [event.rule for event in report.history]
        assert rules[:3] == ['covering-built', 'covering-added', 'T_i-recycled']
        assert report.history[2].size == 4
        assert report.outcome == FAILURE
        assert report.reason != 'constraint-d'

    def test_ell_caps_every_walk(self, mocker, petersen_graph):
        spy = mocker.spy(walks, 'run_walk')
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE, ell=0)
        report = find_minor(petersen_graph, params, RngStream(0), check_invariants=True)
        assert report.outcome == SUCCESS
        assert spy.call_count >= 1
        assert all(call.args[1] == 0 for call in spy.call_args_list)

    @pytest.mark.parametrize('mode, eps', [(CONSTANT_DEGREE, 0.3), (INTERMEDIATE, 0.4)])
    def test_covering_size_has_a_floor(self, mocker, mode, eps):
        spy = mocker.spy(minor_engine, 'covering_set')
        graph = random_regular(400, 6, RngStream(4))
        params = compute_params(400, 6, eps, mode=mode, r=3)
        find_minor(graph, params, RngStream(4))
        assert spy.call_count >= 2
        for call in spy.call_args_list:
            sub, targets, size = call.args[:3]
            observed = min(len(target) for target in targets)
            assert size == min(max(observed, params.covering_size), sub.n)

    def test_iteration_budget(self, petersen_graph):
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE)
        report = find_minor(petersen_graph, params, RngStream(0), max_iter=0)
        assert report.outcome == FAILURE
        assert report.reason == 'max-iterations'
        assert report.witness is None
        assert report.partition.U == frozenset(range(10))

    def test_deadline(self, petersen_graph):
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE)
        report = find_minor(petersen_graph, params, RngStream(0), deadline=-1.0)
        assert report.outcome == TIMEOUT
        assert report.reason == 'timeout'

    def test_rejects_mismatched_graph(self, petersen_graph, k4):
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE)
        with pytest.raises(GraphError):
            find_minor(k4, params, RngStream(0))

    def test_rejects_disconnected_graph(self):
        graph = build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        params = compute_params(6, 3, 0.3, mode=CONSTANT_DEGREE)
        with pytest.raises(DisconnectedGraphError):
            find_minor(graph, params, RngStream(0))

    def test_broken_invariant_is_raised(self, mocker, petersen_graph):
        broken = Verification()
        broken.add('a', (0,), 'branch set 0 is not connected')
        mocker.patch.object(minor_engine, 'verify_partition', return_value=broken)
        params = compute_params(10, 3, 0.3, mode=CONSTANT_DEGREE)
        with pytest.raises(EngineInvariantError):
            find_minor(petersen_graph, params, RngStream(0), check_invariants=True)

    def test_report_dict(self, k4):
        params = compute_params(4, 3, 0.3, mode='constd')
        report = find_minor(k4, params, RngStream(0))
        data = report.to_dict(history=False)
        assert data['outcome'] == 'success'
        assert data['witness']['order'] == 1
        assert 'history' not in data
        assert len(report.to_dict()['history']) == 2

    @pytest.mark.slow
    def test_sparse_mode_at_desk_scale(self):
        graph = random_regular(2 ** 12, 16, RngStream(1))
        params = compute_params(graph.n, 16, 0.4)
        report = find_minor(graph, params, RngStream(1))
        assert report.iterations <= 2 * graph.n
        assert report.outcome == SUCCESS
        assert report.order == params.r
        assert verify_witness(graph, report.witness).valid


class TestContractionCliqueNumber:
    def test_known_values(self, k5, c6, k35):
        assert brute_force_ccl(k5) == 5
        assert brute_force_ccl(c6) == 3
        assert brute_force_ccl(k35) == 4

    def test_bipartite_bound(self, k35, k33):
        assert bipartite_ccl_upper_bound(3, 5) == brute_force_ccl(k35)
        assert brute_force_ccl(k33) <= bipartite_ccl_upper_bound(3, 3)

    def test_limit(self, petersen_graph):
        with pytest.raises(ExhaustiveLimitError):
            brute_force_ccl(petersen_graph, limit=8)
