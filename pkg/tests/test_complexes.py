import random

import numpy as np
import pytest

from polarfloer import smith
from polarfloer.complexes import (
    ChainMap,
    ComplexError,
    FreeComplex,
    cone,
    direct_sum,
    graded_piece_dims,
    homology,
    multiply_by_scalar_map,
    tensor_over_pid,
    truncation_cone,
    verify_homotopy,
)
from polarfloer.generate import random_f2_complex
from polarfloer.rings import F2T, F2Z2, GF2, F2Poly, GR_ZERO
from polarfloer.spectral import spectral_pages


def free_rank_one():
    return FreeComplex(F2T, ["e"], [[F2T.zero]])


def test_homology_one_step_torsion():
    tn = F2Poly.monomial(4)
    c = FreeComplex(F2T, ["a", "b"], [[F2T.zero, tn], [F2T.zero, F2T.zero]])
    rep = homology(c)
    assert rep.free_rank == 0 and rep.torsion_strings() == ("t^4",)


def test_homology_zero_differential():
    c = FreeComplex(GF2, list("xyz"), [[0] * 3 for _ in range(3)])
    rep = homology(c)
    assert rep.free_rank == 3 and rep.dimension == 3


def test_homology_rejects_group_ring():
    c = FreeComplex(F2Z2, ["x"], [[GR_ZERO]])
    with pytest.raises(ComplexError, match="a_f2 or borel"):
        homology(c)


def test_truncation_cone_model_free_presentation():
    # Cone(F2[t] -> F2[t]/(t^n)) as a free presentation: generators a, f, g
    # with d(a) = g and d(f) = t^n g; quasi-isomorphic to F2[t]
    t2 = F2Poly.monomial(2)
    one = F2Poly(1)
    z = F2T.zero
    c = FreeComplex(F2T, ["a", "f", "g"], [[z, z, z], [z, z, z], [one, t2, z]])
    rep = homology(c)
    assert rep.free_rank == 1 and not rep.torsion


def test_dd_validation_rejects_with_witness():
    with pytest.raises(ComplexError, match="offending"):
        FreeComplex(GF2, ["a", "b", "c"], [[0, 0, 0], [1, 0, 0], [0, 1, 0]])


def test_cone_of_identity_acyclic():
    c = FreeComplex(GF2, list("ab"), [[0, 0], [1, 0]])
    ident = ChainMap(c, c, [[1, 0], [0, 1]])
    assert homology(cone(ident)).is_zero()


def test_cone_of_zero_map_splits():
    c = FreeComplex(GF2, list("abc"), [[0] * 3 for _ in range(3)])
    z = cone(c.zero_map_to(c))
    assert homology(z).free_rank == 6


def test_cone_of_t_multiplication():
    f = multiply_by_scalar_map(free_rank_one(), F2Poly.monomial(1))
    rep = homology(cone(f))
    assert rep.free_rank == 0 and rep.torsion_strings() == ("t",)


def test_cone_rank_inequality_and_triangle():
    rng = random.Random(3)
    for _ in range(15):
        a = random_f2_complex(rng, rng.randrange(2, 6), graded=False)
        h = [[rng.randrange(2) for _ in range(a.n)] for _ in range(a.n)]
        # null-homotopic chain maps f = dh + hd always commute with d
        f = smith.mat_add(
            GF2, smith.mat_mul(GF2, a.d, h), smith.mat_mul(GF2, h, a.d)
        )
        cm = ChainMap(a, a, f)
        cn = cone(cm)
        ha = homology(a).free_rank
        hc = homology(cn).free_rank
        assert hc <= 2 * ha
        # rank bookkeeping: dim H(cone) = 2 dim H(A) - 2 rank(induced f)
        from polarfloer.linalg import F2Homology, f2_induced_map, f2_rank

        hom = F2Homology(a.d_numpy())
        ind = f2_induced_map(np.array(f, dtype=np.uint8), hom, hom)
        assert hc == 2 * ha - 2 * f2_rank(ind)


def test_verify_homotopy_basic():
    c = FreeComplex(GF2, list("ab"), [[0, 0], [1, 0]])
    f = ChainMap(c, c, [[1, 0], [0, 1]])
    zero_h = [[0, 0], [0, 0]]
    assert verify_homotopy(f, f, zero_h)
    g = ChainMap(c, c, [[0, 0], [0, 0]])
    # id and 0 differ by the homotopy h with dh + hd = id on this acyclic complex
    h = [[0, 1], [0, 0]]
    assert verify_homotopy(f, g, h)


def test_verify_homotopy_false_on_zero_differential():
    c = FreeComplex(GF2, list("ab"), [[0, 0], [0, 0]])
    f = ChainMap(c, c, [[1, 0], [0, 1]])
    g = ChainMap(c, c, [[0, 0], [0, 0]])
    assert not verify_homotopy(f, g, [[0, 0], [0, 0]])


def test_homology_invariant_under_conjugation_f2t():
    rng = random.Random(5)
    t = F2Poly.monomial(1)
    base = FreeComplex(
        F2T,
        list("abcd"),
        [
            [F2T.zero, t, F2T.zero, F2T.zero],
            [F2T.zero] * 4,
            [F2T.zero, F2T.zero, F2T.zero, F2Poly.monomial(2)],
            [F2T.zero] * 4,
        ],
    )
    rep = homology(base)
    for _ in range(5):
        # random unimodular conjugation built from elementary operations
        n = base.n
        u = smith.mat_identity(F2T, n)
        for _ in range(6):
            i, j = rng.randrange(n), rng.randrange(n)
            if i == j:
                continue
            coeff = F2Poly(rng.getrandbits(3))
            for k in range(n):
                u[i][k] = F2T.add(u[i][k], F2T.mul(coeff, u[j][k]))
        # inverse by solving u x = id
        uinv = smith.pid_solve(F2T, u, smith.mat_identity(F2T, n))
        assert uinv is not None
        d2 = smith.mat_mul(F2T, smith.mat_mul(F2T, u, base.d), uinv)
        rep2 = homology(FreeComplex(F2T, base.labels, d2))
        assert rep2 == rep


def test_graded_fast_path_matches_generic():
    # graded complexes: barcode route equals the generic SNF route
    rng = random.Random(8)
    for _ in range(10):
        n = rng.randrange(2, 5)
        degs = sorted(rng.randrange(0, 3) for _ in range(n))
        d = smith.mat_zero(F2T, n, n)
        for j in range(n):
            for i in range(n):
                if degs[i] == degs[j] + 1 and rng.random() < 0.4 and i != j:
                    d[i][j] = F2Poly(1)
        sq = smith.mat_mul(F2T, d, d)
        if not smith.mat_is_zero(F2T, sq):
            continue
        graded = homology(FreeComplex(F2T, [f"g{i}" for i in range(n)], d, degs))
        generic = homology(FreeComplex(F2T, [f"g{i}" for i in range(n)], d))
        assert graded.free_rank == generic.free_rank
        assert sorted(graded.torsion_strings()) == sorted(generic.torsion_strings())


def test_tensor_over_pid_tor_computation():
    # F2[t]/(t) (x)^L F2[t]/(t): Tor_0 + Tor_1 = F2 + F2
    t = F2Poly.monomial(1)
    pres = FreeComplex(F2T, ["f", "g"], [[F2T.zero, F2T.zero], [t, F2T.zero]])
    rep = homology(tensor_over_pid(pres, pres))
    assert rep.free_rank == 0
    assert rep.torsion_strings() == ("t", "t")
    # unit of the tensor
    rep2 = homology(tensor_over_pid(pres, free_rank_one()))
    assert rep2 == homology(pres)
    rep3 = homology(tensor_over_pid(free_rank_one(), free_rank_one()))
    assert rep3.free_rank == 1 and not rep3.torsion


def test_truncation_cone_levels():
    assert homology(truncation_cone(free_rank_one(), 2)).torsion_strings() == ("t^2",)
    with pytest.raises(ComplexError):
        truncation_cone(free_rank_one(), 0)


def test_spectral_trivial_filtration_is_graded_homology():
    c = FreeComplex(GF2, list("hxy"), [[0, 0, 0], [0, 0, 0], [0, 1, 0]], filtration=[0, 0, 0])
    rep = spectral_pages(c, 2)
    assert rep.page(1).total.free_rank == 1
    assert rep.degeneration_page == 1


def test_spectral_jump_two_degenerates_at_three():
    c = FreeComplex(GF2, list("xy"), [[0, 0], [1, 0]], filtration=[0, 2])
    rep = spectral_pages(c, 4)
    assert rep.page(1).total.free_rank == 2
    assert rep.page(2).total.free_rank == 2
    assert rep.page(3).total.is_zero()
    assert rep.degeneration_page == 3


def test_spectral_e_infinity_matches_homology_ranks():
    rng = random.Random(13)
    for _ in range(10):
        c = random_f2_complex(rng, rng.randrange(2, 7))
        filt = list(c.grading)
        cf = FreeComplex(GF2, c.labels, c.d, c.grading, filt)
        rep = spectral_pages(cf, 2)
        last = rep.pages[-1].total
        assert last.free_rank == homology(cf).free_rank


def test_spectral_rejects_unfiltered():
    c = FreeComplex(GF2, ["x"], [[0]])
    with pytest.raises(ComplexError):
        spectral_pages(c, 2)


def test_direct_sum_reports_add():
    a = FreeComplex(GF2, list("ab"), [[0, 0], [1, 0]])
    b = FreeComplex(GF2, list("c"), [[0]])
    assert homology(direct_sum(a, b)).free_rank == 1


def test_graded_piece_dims_of_free_module():
    c = FreeComplex(F2T, ["e"], [[F2T.zero]], grading=[2])
    dims = graded_piece_dims(c, 0, 5)
    assert dims == {0: 0, 1: 0, 2: 1, 3: 1, 4: 1, 5: 1}
