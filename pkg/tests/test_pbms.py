import json
import math

import numpy as np
import pytest

from bicpb import instances, pbms
from bicpb.bicomplex import I1, I2, ONE, ZERO, Bicomplex, compare
from bicpb.errors import AxiomViolation, MalformedTable, NonPositiveCone
from bicpb.pbms import FiniteSpace, MetricFn, check_axioms, minimal_coefficient

from generators import random_partial_metric_space, table_metric


def test_four_point_holds_for_small_angles():
    for y in (0.0, math.pi / 8, math.pi / 6, math.pi / 4):
        rep = check_axioms(instances.four_point_space(y), 1.0)
        assert rep.holds, y
        assert rep.mode == "exhaustive"
        assert rep.checked >= 64


def test_four_point_cone_violation_at_sixty_degrees():
    rep = check_axioms(instances.four_point_space(math.pi / 3), 1.0)
    assert not rep.holds
    assert not rep.status["small-self-distance"]
    v = rep.violations("small-self-distance")[0]
    assert v.lhs == ZERO and v.rhs.a1 < 0


def test_one_point_space():
    space = FiniteSpace(("p",), ((ZERO,),))
    for s in (1.0, 2.5, 10.0):
        assert check_axioms(space, s).holds
    assert minimal_coefficient(space) == 1.0


def test_reports_all_violations_sorted():
    rep = check_axioms(instances.four_point_space(math.pi / 3), 1.0)
    assert len(rep.counterexamples) == 39
    keys = [(pbms.AXIOMS.index(v.axiom), v.points) for v in rep.counterexamples]
    assert keys == sorted(keys)


def test_replay_soundness():
    for space, s in ((instances.four_point_space(math.pi / 3), 1.0), (instances.max_power_space(), 1.0),
                     (pbms.induced_table(instances.induced_failure_space()), 2.0)):
        kind = "b-metric" if space.points == ("x", "y", "z") else "partial-b"
        rep = check_axioms(space, s, kind=kind)
        assert rep.counterexamples
        for v in rep.counterexamples:
            assert pbms.replay(space, v, s, kind)


def test_minimal_coefficient_examples():
    assert minimal_coefficient(instances.four_point_space(0.0)) == 1.0
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 10, size=(6, 2))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    space = FiniteSpace.tabulate(table_metric(d), list(range(6)))
    assert minimal_coefficient(space) == 1.0


def test_max_power_counterexample():
    space = instances.max_power_space((2, 5, 6), 2.0)
    assert space.delta(2, 0) == Bicomplex(52, 52)
    rhs = space.delta(2, 1) + space.delta(1, 0) - space.delta(1, 1)
    assert rhs == Bicomplex(46, 46)
    rep = check_axioms(space, 1.0, with_minimal_s=True)
    assert not rep.status["triangularity"]
    assert max(v.ratio for v in rep.violations("triangularity")) == pytest.approx(52 / 46, rel=1e-12)
    assert sorted(rep.nonzero_self_distances) == [0, 1, 2]
    for k, x in enumerate((2, 5, 6)):
        assert space.delta(k, k) == (ONE + I1).scale(x * x)
    assert rep.minimal_s == pytest.approx(77 / 71, rel=1e-12)
    assert check_axioms(space, 4.0).holds


def test_minimal_coefficient_consistency():
    rng = np.random.default_rng(6)
    for space in (instances.max_power_space(), instances.max_power_space((1, 3, 4, 9), 3.0),
                  pbms.FiniteSpace.tabulate(instances.max_power_metric(2.0), list(rng.uniform(0.5, 8, 5)))):
        s = minimal_coefficient(space)
        assert s > 1
        assert check_axioms(space, s).holds
        assert not check_axioms(space, s * (1 - 1e-6)).holds


def test_monotone_in_s():
    rng = np.random.default_rng(7)
    for _ in range(20):
        space = random_partial_metric_space(rng, 4)
        scaled = space.with_table([[v.scale(1.0 + 0.5 * (i != j)) for j, v in enumerate(row)]
                                   for i, row in enumerate(space.table)])
        s0 = minimal_coefficient(scaled)
        for s in (s0, s0 * 1.5, s0 + 3):
            assert check_axioms(scaled, s).holds


def test_minimal_coefficient_requires_pair_axioms():
    with pytest.raises(AxiomViolation):
        minimal_coefficient(instances.four_point_space(math.pi / 3))


def test_minimal_coefficient_infeasible():
    # d(x,z) + d(z,y) vanishes in the i2 part while d(x,y) does not
    t = [[ZERO, Bicomplex(1, 0, 1), Bicomplex(1)],
         [Bicomplex(1, 0, 1), ZERO, Bicomplex(1)],
         [Bicomplex(1), Bicomplex(1), ZERO]]
    space = FiniteSpace(("a", "b", "c"), t)
    assert minimal_coefficient(space) == math.inf
    assert check_axioms(space, 1.0, with_minimal_s=True).to_dict()["minimal_s"] == "infeasible"


def test_malformed_tables():
    with pytest.raises(MalformedTable):
        FiniteSpace(("a", "b"), ((ZERO, ONE),))
    with pytest.raises(MalformedTable):
        FiniteSpace(("a", "b"), ((ZERO, ONE), (Bicomplex(2), ZERO)))
    with pytest.raises(MalformedTable):
        FiniteSpace(("a", "a"), ((ZERO, ONE), (ONE, ZERO)))
    with pytest.raises(MalformedTable):
        FiniteSpace(("a", "b"), ((ZERO, ONE), (ONE, ZERO)), maps={"U": (0, 2)})
    with pytest.raises(MalformedTable):
        FiniteSpace.from_dict({"points": ["a"], "delta": [[[0, 0, 0]]]})
    with pytest.raises(MalformedTable):
        FiniteSpace.from_dict({"points": ["a"], "delta": [[[0, 0, 0, 0]]], "maps": {"U": ["zz"]}})


def test_space_json_round_trip():
    space = instances.four_point_space()
    again = FiniteSpace.from_dict(json.loads(json.dumps(space.to_dict())))
    assert again.table == space.table and again.order == space.order and again.maps == space.maps
    assert again.meta["y"] == pytest.approx(math.pi / 8)


def test_axiom_report_round_trip():
    rep = check_axioms(instances.four_point_space(math.pi / 3), 1.0, with_minimal_s=False)
    data = json.loads(json.dumps(rep.to_dict()))
    assert set(data["status"]) == set(pbms.AXIOMS)
    back = pbms.AxiomReport.from_dict(data)
    assert back.to_dict() == data


def test_sum_construction_discrete():
    for s in (1.5, 2.0, 4.0):
        m = pbms.sum_construction(instances.discrete_partial_metric(1, 2), instances.discrete_metric(s, s))
        assert m.s == s
        assert check_axioms(FiniteSpace.tabulate(m, list(range(5))), s).holds


def test_sum_construction_identities():
    p = instances.discrete_partial_metric(1, 2)
    zero = MetricFn(lambda x, y: ZERO, 2.0)
    m = pbms.sum_construction(p, zero)
    assert all(m(x, y) == p(x, y) for x in range(3) for y in range(3))
    m = pbms.sum_construction(MetricFn(lambda x, y: ZERO), instances.discrete_metric(1.0, 2.0))
    rep = check_axioms(FiniteSpace.tabulate(m, list(range(4))), 2.0)
    assert rep.holds and rep.nonzero_self_distances == []


def test_power_construction():
    rng = np.random.default_rng(8)
    from generators import random_real_partial_metric
    table = random_real_partial_metric(rng, 5)
    p = table_metric(table)
    assert pbms.power_construction(p, 1.0)(1, 2) == p(1, 2)
    sq = FiniteSpace.tabulate(pbms.power_construction(p, 2.0), list(range(5)))
    assert check_axioms(sq, 2.0).holds
    cube = FiniteSpace.tabulate(pbms.power_construction(p, 3.0), list(range(5)))
    assert check_axioms(cube, 4.0).holds
    assert minimal_coefficient(cube) <= 4.0
    assert sq.delta(1, 2).a1 == pytest.approx(table[1, 2] ** 2, rel=1e-12)


def test_power_construction_rejects_out_of_cone():
    bad = MetricFn(lambda x, y: Bicomplex(-1.0))
    with pytest.raises(NonPositiveCone):
        pbms.power_construction(bad, 2.0)(0, 1)
    with pytest.raises(ValueError):
        pbms.power_construction(bad, 0.5)


def test_induced_b_metric():
    m = pbms.induced_b_metric(instances.max_square_metric())
    assert m(2, 1) == (ONE + I2).scale(3.0)
    assert m(2, 2) == ZERO
    d = instances.discrete_metric(3.0)
    ind = pbms.induced_b_metric(d)
    assert ind(0, 1) == d(0, 1).scale(2.0)


def test_induced_b_metric_can_fail():
    space = instances.induced_failure_space()
    assert check_axioms(space, 2.0).holds
    induced = pbms.induced_table(space)
    assert not pbms.check_b_metric_axioms(induced, 2.0).holds
    assert minimal_coefficient(induced, kind="b-metric") == pytest.approx(3.0)


def test_generalized_reduces_to_metric():
    rng = np.random.default_rng(9)
    pts = rng.uniform(0, 10, size=(5, 2))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    space = FiniteSpace.tabulate(table_metric(d), list(range(5)))
    assert pbms.check_generalized_axioms(space, 1.0).holds


def test_generalized_and_ordinary_on_four_point():
    space = instances.four_point_space(0.0)
    assert check_axioms(space, 1.0).holds
    gen = pbms.check_generalized_axioms(space, 1.0)
    assert gen.kind == "generalized" and gen.holds


def test_triangle_rhs_forms():
    a, b, c, x, y = (Bicomplex(v) for v in (1, 2, 3, 4, 5))
    assert pbms.triangle_rhs("partial-b", 2, a, b, c, x, y) == Bicomplex(2 * 3 - 3)
    assert pbms.triangle_rhs("generalized", 2, a, b, c, x, y) == Bicomplex(2 * (1 + 2 - 3) - 0.5 * 9)
    assert pbms.triangle_rhs("b-metric", 2, a, b, c, x, y) == Bicomplex(6)


def test_sampled_check_is_labelled():
    rep = pbms.check_axioms_sampled(instances.max_square_metric(), lambda rng: float(rng.uniform(0, 10)),
                                    1.0, n_samples=2000)
    assert rep.mode == "sampled" and rep.holds
    rep = pbms.check_axioms_sampled(instances.max_power_metric(2.0), lambda rng: float(rng.uniform(0.1, 10)),
                                    1.0, n_samples=2000)
    assert not rep.holds
    rep = pbms.check_axioms_sampled(instances.max_power_metric(2.0), lambda rng: float(rng.uniform(0.1, 10)),
                                    n_samples=2000)
    assert rep.s == 4.0 and rep.holds


def test_sampled_check_is_seeded():
    sampler = lambda rng: float(rng.uniform(0.1, 10))  # noqa: E731
    a = pbms.check_axioms_sampled(instances.max_power_metric(2.0), sampler, 1.0, n_samples=500, seed=3)
    b = pbms.check_axioms_sampled(instances.max_power_metric(2.0), sampler, 1.0, n_samples=500, seed=3)
    assert a.to_dict() == b.to_dict()


def test_ball_contains():
    space = instances.four_point_space(0.0)
    d = space.metric
    assert pbms.ball_contains(d, "1", 0.5, "1")
    assert not pbms.ball_contains(d, "1", 0.5, "2")
    assert pbms.ball_contains(d, "1", 2.0, "2")
    assert pbms.ball_contains(d, "1", 2.0, "3")
    assert not pbms.ball_contains(d, "1", 2.0, "4")
    assert pbms.ball_contains(d, "3", Bicomplex(0.1, 0, 0.1), "3")
    with pytest.raises(ValueError):
        pbms.ball_contains(d, "1", 0.0, "1")
    with pytest.raises(ValueError):
        pbms.ball_contains(d, "1", Bicomplex(1.0), "1")


def test_table_entries_in_cone_for_valid_instance():
    space = instances.four_point_space(math.pi / 8)
    assert all(compare(ZERO, v).is_le for row in space.table for v in row)
