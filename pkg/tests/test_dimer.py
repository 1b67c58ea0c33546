"""Dimer representation, Kasteleyn orientation, and constrained sums."""

import itertools
import math

import pytest

from vertex_expand.dimer import (
    EdgeConstraint,
    audit_faces,
    build_decorated,
    constrained_partition,
    constrained_ratio,
    dimer_probability,
    enumerate_matchings,
    kasteleyn_orientation,
    lattice_dump,
    line_completion_weight,
    partition_dimer,
    vertex_constrained_ratio,
)
from vertex_expand.errors import (
    ConstraintConflict,
    NotFreeFermion,
    TooLarge,
    TooManyConstraints,
)
from vertex_expand.model import (
    Boundary,
    ModelParams,
    config_from_mask,
    enumerate_partition,
    line_representation,
)


def params_for(rows, cols, beta_s=0.3):
    return ModelParams(beta_s=beta_s, rows=rows, cols=cols)


@pytest.fixture(scope="module")
def kast22():
    return kasteleyn_orientation(build_decorated(params_for(2, 2)))


class TestDecoration:
    def test_requires_free_fermion_point(self):
        params = params_for(2, 2).with_u_shift(0.1)
        with pytest.raises(NotFreeFermion):
            build_decorated(params)

    def test_requires_fixed_boundary(self):
        params = ModelParams(beta_s=0.3, rows=2, cols=2,
                             boundary=Boundary.PERIODIC)
        with pytest.raises(ValueError):
            build_decorated(params)

    def test_counts(self):
        lat = build_decorated(params_for(2, 3))
        assert lat.n_nodes == 24
        # 4 internal per city + horizontal + vertical externals
        assert len(lat.edges) == 24 + 2 * 2 + 3

    def test_empty_city_weight(self):
        # a lone city has two diamond matchings of weight u^2 each, so
        # Z = 2 u^2 = exp(beta_s), the weight of the pinned ground state
        lat = build_decorated(params_for(1, 1, beta_s=0.4))
        assert enumerate_matchings(lat) == pytest.approx(
            math.exp(0.4), rel=1e-13)


class TestKasteleyn:
    @pytest.mark.parametrize("rows,cols", [(1, 1), (2, 2), (2, 3), (3, 3)])
    @pytest.mark.parametrize("beta_s", [-0.5, 0.0, 0.3])
    def test_pfaffian_counts_matchings(self, rows, cols, beta_s):
        lat = build_decorated(params_for(rows, cols, beta_s))
        kast = kasteleyn_orientation(lat)
        z_pf = math.exp(partition_dimer(kast))
        z_direct = enumerate_matchings(lat)
        assert z_pf == pytest.approx(z_direct, rel=1e-12)

    def test_face_audit(self, kast22):
        audit_faces(kast22)

    def test_log_partition_frozen(self, kast22):
        assert partition_dimer(kast22) == pytest.approx(
            1.27259834672205, rel=1e-13)

    def test_dump_deterministic(self):
        lat = build_decorated(params_for(2, 2))
        d1 = lattice_dump(kasteleyn_orientation(lat))
        d2 = lattice_dump(kasteleyn_orientation(
            build_decorated(params_for(2, 2))))
        assert d1 == d2
        assert len(d1.splitlines()) == len(lat.edges)

    def test_matching_enumeration_bound(self):
        with pytest.raises(TooLarge):
            enumerate_matchings(build_decorated(params_for(4, 4)))


class TestMappingEquivalence:
    @pytest.mark.parametrize("rows,cols", [(2, 2), (2, 3)])
    def test_per_configuration_weights(self, rows, cols):
        params = params_for(rows, cols)
        lat = build_decorated(params)
        result = enumerate_partition(params)
        for mask, weight in zip(result.masks, result.weights):
            cfg = config_from_mask(params, int(mask))
            lines = line_representation(cfg, params)
            assert line_completion_weight(lat, lines) == pytest.approx(
                weight, rel=1e-13)

    @pytest.mark.parametrize("rows,cols", [(2, 2), (2, 3)])
    def test_partition_functions_agree(self, rows, cols):
        params = params_for(rows, cols)
        z_vertex = enumerate_partition(params).z
        kast = kasteleyn_orientation(build_decorated(params))
        assert math.exp(partition_dimer(kast)) == pytest.approx(
            z_vertex, rel=1e-13)


class TestConstrained:
    def test_single_edge_frozen(self, kast22):
        assert constrained_ratio(
            kast22, [EdgeConstraint(0, True)]) == pytest.approx(
                0.535012858879755, rel=1e-13)

    def test_occupied_plus_empty_is_total(self, kast22):
        for edge in (0, 7, 16):
            occ = constrained_ratio(kast22, [EdgeConstraint(edge, True)])
            emp = constrained_ratio(kast22, [EdgeConstraint(edge, False)])
            assert occ + emp == pytest.approx(1.0, rel=1e-12)
            assert occ == pytest.approx(dimer_probability(kast22, edge),
                                        rel=1e-12)

    def test_against_direct_enumeration(self, kast22):
        lat = build_decorated(params_for(2, 2))
        z0 = enumerate_matchings(lat)
        edges = [0, 5, 16, 18]
        for r in (1, 2):
            for combo in itertools.combinations(edges, r):
                for occ in itertools.product((True, False), repeat=r):
                    cons = [EdgeConstraint(e, o)
                            for e, o in zip(combo, occ)]
                    direct = enumerate_matchings(
                        lat,
                        tuple(e for e, o in zip(combo, occ) if o),
                        tuple(e for e, o in zip(combo, occ) if not o)) / z0
                    assert constrained_ratio(kast22, cons) == pytest.approx(
                        direct, abs=1e-11)

    def test_five_edge_pattern(self, kast22):
        lat = build_decorated(params_for(2, 2))
        z0 = enumerate_matchings(lat)
        cons = ([EdgeConstraint(e, True) for e in (0, 5)]
                + [EdgeConstraint(e, False) for e in (16, 17, 18)])
        direct = enumerate_matchings(lat, (0, 5), (16, 17, 18)) / z0
        assert constrained_ratio(kast22, cons) == pytest.approx(
            direct, abs=1e-11)

    def test_constrained_partition_log(self, kast22):
        cons = [EdgeConstraint(0, True)]
        expected = partition_dimer(kast22) + math.log(
            constrained_ratio(kast22, cons))
        assert constrained_partition(kast22, cons) == pytest.approx(
            expected, rel=1e-12)

    def test_conflicting_constraints(self, kast22):
        with pytest.raises(ConstraintConflict):
            constrained_ratio(kast22, [EdgeConstraint(0, True),
                                       EdgeConstraint(0, False)])

    def test_too_many_constraints(self, kast22):
        cons = [EdgeConstraint(e, True) for e in range(6)]
        with pytest.raises(TooManyConstraints):
            constrained_ratio(kast22, cons)


@pytest.fixture(scope="module")
def kast33():
    return kasteleyn_orientation(build_decorated(params_for(3, 3)))


class TestVertexStates:
    def test_probabilities_sum_to_one(self, kast33):
        total = sum(vertex_constrained_ratio(kast33, (1, 1), s)
                    for s in range(1, 7))
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_ground_state_dominates(self, kast33):
        # site (1,1) sits on sublattice A where state 6 is the reference
        probs = {s: vertex_constrained_ratio(kast33, (1, 1), s)
                 for s in range(1, 7)}
        assert probs[6] == max(probs.values())
        assert probs[5] == min(probs.values())

    def test_boundary_site_rejected(self, kast33):
        with pytest.raises(ValueError):
            vertex_constrained_ratio(kast33, (0, 0), 6)
