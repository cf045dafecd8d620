import random

import pytest

from polarfloer.complexes import ComplexError, homology
from polarfloer.generate import random_twisted_dataset
from polarfloer.rings import F2Poly
from polarfloer.twisted import (
    LocalSystemXi,
    TrajectoryClass,
    TwistedDataset,
    build_twisted,
    e2_page,
    point_dataset,
    porteous_coefficient,
    two_point_twisted,
    twisted_spectral_report,
    verify_T_invertible,
)


def test_point_dataset_is_laurent_line():
    b = build_twisted(point_dataset(), 4)
    rep = homology(b.laurent)
    assert rep.free_rank == 1 and not rep.torsion
    assert verify_T_invertible(b)
    # windowed ladder: d = 0 (two constant solutions cancel), T = shift
    assert b.windowed is not None
    assert all(x == 0 for row in b.windowed.complex.d for x in row)
    t = b.windowed.T
    n = len(t)
    assert sum(t[i][j] for i in range(n) for j in range(n)) == n - 1


def test_unit_trajectory_is_acyclic():
    tw = TwistedDataset([("a", 1), ("b", 0)], [TrajectoryClass("a", "b", 0, 1, 0)])
    b = build_twisted(tw, 4)
    assert homology(b.laurent).is_zero()
    assert verify_T_invertible(b)


def test_two_trajectories_cancel():
    tw = TwistedDataset([("a", 1), ("b", 0)], [TrajectoryClass("a", "b", 0, 0, 0)])
    rep = homology(build_twisted(tw, 3).laurent)
    assert rep.free_rank == 2


def test_index_must_drop():
    with pytest.raises(ComplexError, match="drop"):
        TwistedDataset([("a", 0), ("b", 0)], [TrajectoryClass("a", "b", 0, 1, 0)])


def test_action_filtration_enforced():
    with pytest.raises(ComplexError, match="action"):
        TwistedDataset(
            [("a", 1), ("b", 0)],
            [TrajectoryClass("a", "b", 0, 1, 0)],
            actions={"a": "0", "b": "1"},
        )


def test_grading_sf_consistency():
    with pytest.raises(ComplexError, match="sf"):
        TwistedDataset(
            [("a", 1), ("b", 0)],
            [TrajectoryClass("a", "b", 2, 1, 0)],
            grading={"a": 1, "b": 0},
        )


def test_rung_counts_admissibility():
    points = [("a", 1), ("b", 0)]
    good = [(("a", -1), ("b", 0), 1, 1, 0)]
    with pytest.raises(ComplexError, match="dimension formula"):
        TwistedDataset.from_rung_counts(points, [(("a", 0), ("b", 0), 1, 1, 0)], 2)
    # T-equivariant rung family for window 2: ip in {-2..1} with ip+delta in range
    fam = [(("a", k - 1), ("b", k), 1, 1, 0) for k in (-1, 0, 1)]
    tw = TwistedDataset.from_rung_counts(points, fam, 2)
    assert len(tw.classes) == 1


def test_rung_counts_non_equivariant_rejected():
    points = [("a", 1), ("b", 0)]
    fam = [(("a", -1), ("b", 0), 1, 1, 0), (("a", 0), ("b", 1), 1, 0, 0)]
    with pytest.raises(ComplexError, match="T-equivariant"):
        TwistedDataset.from_rung_counts(points, fam, 2)


def test_T_invertible_with_zeroed_negative_counts():
    # ladder alone forces invertibility even with no negative counts
    tw = TwistedDataset([("a", 1), ("b", 0)], [TrajectoryClass("a", "b", 1, 1, 0)])
    b = build_twisted(tw, 4)
    assert verify_T_invertible(b)
    # and with some negative counts present
    tw2 = TwistedDataset([("a", 1), ("b", 0)], [TrajectoryClass("a", "b", 1, 0, 1)])
    assert verify_T_invertible(build_twisted(tw2, 4))


def test_e2_all_sf_zero_is_morse_homology():
    tw = TwistedDataset(
        [("a", 1), ("b", 0), ("c", 0)],
        [TrajectoryClass("a", "b", 0, 1, 0)],
    )
    rep = e2_page(tw)
    assert rep.free_rank == 1  # H(Morse) = F2<c> tensored with Laurent


def test_e2_unit_entry_acyclic():
    tw = TwistedDataset([("a", 1), ("b", 0)], [TrajectoryClass("a", "b", 1, 1, 0)])
    assert e2_page(tw).is_zero()


def test_e2_zero_differential_full_rank():
    tw = TwistedDataset([("a", 3), ("b", 0)], [])
    assert e2_page(tw).free_rank == 2


def test_spectral_e2_matches_e2_page():
    rng = random.Random(31)
    for _ in range(12):
        tw = random_twisted_dataset(rng, rng.randrange(2, 6))
        b = build_twisted(tw, 4)
        sp = twisted_spectral_report(b, 3)
        assert sp.page(2).total == e2_page(tw)


def test_window_stability_interior():
    rng = random.Random(32)
    checked = 0
    for _ in range(8):
        tw = random_twisted_dataset(rng, rng.randrange(2, 5))
        n_small = 5
        b1 = build_twisted(tw, n_small)
        b2 = build_twisted(tw, n_small + 1)
        assert b1.windowed is not None and b2.windowed is not None
        d1 = b1.windowed.graded_homology_dims()
        d2 = b2.windowed.graded_homology_dims()
        # interior degrees: rungs of every point's ladder stay within both
        # windows (with a margin for the class shifts)
        bases = [tw.ind[x] + tw.grading[x] for x in tw.labels]
        lo = max(bases) - n_small + 2
        hi = min(bases) + n_small - 3
        interior = list(range(lo, hi + 1))
        if interior:
            checked += 1
            assert all(d1.get(k, 0) == d2.get(k, 0) for k in interior)
    assert checked >= 4


def test_constant_ladder_reproduces_example():
    # associated graded at one critical point: d = 0, T = rung shift
    tw = TwistedDataset([("a", 2), ("b", 0)], [])
    b = build_twisted(tw, 3)
    assert all(x == 0 for row in b.windowed.complex.d for x in row)
    rep = homology(b.laurent)
    assert rep.free_rank == 2


def test_porteous_trivial_bundle():
    for n in range(1, 5):
        assert porteous_coefficient(F2Poly(1), n, 1) == 0


def test_porteous_geometric_series():
    w = F2Poly.from_exponents([0, 1])
    for n in range(1, 6):
        assert porteous_coefficient(w, n, 1) == 1
    assert porteous_coefficient(w, 3, 0) == 0


def test_porteous_degree_two_example():
    w = F2Poly.from_exponents([0, 1, 2])
    assert porteous_coefficient(w, 2, 1) == 0
    assert porteous_coefficient(w, 2, {2: 1}) == 0
    with pytest.raises(ComplexError):
        porteous_coefficient(F2Poly.monomial(1), 2, 1)


def test_porteous_linear_in_pairing():
    w = F2Poly.from_exponents([0, 1])
    for n in range(1, 5):
        c1 = porteous_coefficient(w, n, 1)
        c0 = porteous_coefficient(w, n, 0)
        assert c0 == 0 and c1 in (0, 1)


def test_two_point_dichotomy():
    for n in range(1, 7):
        assert two_point_twisted(n, 1).is_zero()
        rep = two_point_twisted(n, 0)
        assert rep.free_rank == 2 and not rep.torsion


def test_local_system_additivity():
    xi = LocalSystemXi({"u": 1, "v": 2, "uv": 3}, [("u", "v", "uv")])
    assert xi.check_additivity()
    bad = LocalSystemXi({"u": 1, "v": 2, "uv": 0}, [("u", "v", "uv")])
    assert not bad.check_additivity()


def test_laurent_chain_map_contract():
    # negative counts that break [T, d] = 0 are rejected
    tw = TwistedDataset(
        [("a", 2), ("b", 1), ("c", 0)],
        [
            TrajectoryClass("a", "b", 0, 1, 1),
            TrajectoryClass("b", "c", 0, 1, 0),
        ],
    )
    with pytest.raises(ComplexError, match="chain-map"):
        build_twisted(tw, 3)
