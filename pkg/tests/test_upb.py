import itertools
import math

import numpy as np
import pytest

from addiviol.subspace import full_space
from addiviol.tensor import haar_random_states, haar_random_unitary
from addiviol.upb import (
    NonOrthogonalError,
    ProductBasis,
    channel_from_upb_choi,
    choi_state,
    genericity_check,
    is_upb_partition_criterion,
    load_product_basis,
    no_product_vector_evidence,
    p0_additivity_report,
    sample_output_spectra,
    save_product_basis,
    tensor_upb,
    tiles_upb,
)
from addiviol.minentropy import min_output_renyi

E2 = np.eye(2)


def brute_force_extendible(pb):
    # oracle: enumerate every bipartition and test both local ranks directly
    n = pb.size
    for mask in range(2**n):
        S = [i for i in range(n) if mask >> i & 1]
        T = [i for i in range(n) if not mask >> i & 1]
        ra = np.linalg.matrix_rank(pb.a[S], tol=1e-9) if S else 0
        rb = np.linalg.matrix_rank(pb.b[T], tol=1e-9) if T else 0
        if ra < pb.d_A and rb < pb.d_B:
            return True
    return False


def test_tiles_basics():
    pb = tiles_upb()
    assert pb.size == 5
    g = np.abs(pb.vectors().conj().T @ pb.vectors())
    assert np.abs(g - np.eye(5)).max() < 1e-12


def test_genericity():
    ok, subset = genericity_check(tiles_upb())
    assert ok and subset is None
    # oracle: exhaustive rank check written out here
    pb = tiles_upb()
    for idx in itertools.combinations(range(5), 3):
        assert np.linalg.matrix_rank(pb.a[list(idx)]) == 3
        assert np.linalg.matrix_rank(pb.b[list(idx)]) == 3


def test_genericity_failures_and_errors():
    rng = np.random.default_rng(0)
    a = haar_random_states(3, 5, rng)
    b = haar_random_states(3, 5, rng)
    a[[0, 2, 4]] = a[0]
    ok, subset = genericity_check((a, b))
    assert not ok and len(subset) == 3
    assert np.linalg.matrix_rank(a[list(subset)], tol=1e-9) < 3 or np.linalg.matrix_rank(b[list(subset)], tol=1e-9) < 3
    with pytest.raises(ValueError):
        genericity_check((a[:4], b[:4]))


def test_genericity_d2_random():
    a = haar_random_states(2, 3, seed=1)
    b = haar_random_states(2, 3, seed=2)
    assert genericity_check((a, b)) == (True, None)


def test_partition_criterion_examples():
    cert = is_upb_partition_criterion(tiles_upb())
    assert cert.is_unextendible and cert.method == "partition_exhaustive"
    assert cert.bipartitions_examined == 32
    pb = ProductBasis(2, 2, E2[[0, 1]], E2[[0, 1]])
    cert = is_upb_partition_criterion(pb)
    assert not cert.is_unextendible
    v = cert.extension
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert np.abs(pb.vectors().conj().T @ v).max() < 1e-12
    big = tensor_upb(tiles_upb(), tiles_upb())
    cert = is_upb_partition_criterion(big, restarts=8)
    assert cert.method == "seesaw_evidence"
    assert cert.is_unextendible


def test_partition_matches_brute_force():
    pb = tiles_upb()
    for drop in range(5):
        sub = pb.without(drop)
        assert is_upb_partition_criterion(sub).is_unextendible == (not brute_force_extendible(sub))
    assert not brute_force_extendible(pb)


def test_partition_shuffle_invariance():
    pb = tiles_upb()
    rng = np.random.default_rng(3)
    for _ in range(10):
        perm = rng.permutation(5)
        shuffled = ProductBasis(3, 3, pb.a[perm], pb.b[perm])
        assert is_upb_partition_criterion(shuffled).is_unextendible
        sub = shuffled.without(0)
        assert not is_upb_partition_criterion(sub).is_unextendible


def test_non_orthogonal_rejected():
    with pytest.raises(NonOrthogonalError) as err:
        ProductBasis(2, 2, E2[[0, 0]], np.array([[1, 0], [1, 1] / np.sqrt(2)]))
    assert err.value.pair == (0, 1)


def test_tensor_upb():
    pb2 = tensor_upb(tiles_upb(), tiles_upb())
    assert pb2.size == 25 and (pb2.d_A, pb2.d_B) == (9, 9)
    g = pb2.vectors().conj().T @ pb2.vectors()
    assert np.abs(g - np.eye(25)).max() < 1e-12


def test_complement_evidence():
    pb = tiles_upb()
    assert no_product_vector_evidence(pb.complement(), restarts=16) < 1 - 1e-3
    assert abs(no_product_vector_evidence(full_space(3, 3), restarts=2) - 1) < 1e-12
    comp2 = tensor_upb(pb, pb).complement()
    assert no_product_vector_evidence(comp2, restarts=8) < 1 - 1e-4
    assert abs(no_product_vector_evidence(pb.without(0).complement(), restarts=16) - 1) < 1e-6


def test_choi_state_is_projector_over_d():
    pb = tiles_upb()
    ch = channel_from_upb_choi(pb)
    P = pb.span().projector()
    assert np.abs(choi_state(ch) - P / 3).max() < 1e-12


def test_channel_outputs():
    ch = channel_from_upb_choi(tiles_upb())
    out = ch(np.eye(3) / 3)
    assert np.linalg.eigvalsh(out).min() > 1e-6
    spectra = sample_output_spectra(ch, 200, seed=0)
    assert spectra[:, -1].min() > 1e-6
    rng = np.random.default_rng(1)
    for _ in range(100):
        z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = z @ z.conj().T
        w = np.linalg.eigvalsh(ch(rho / np.trace(rho)))
        assert w.min() >= -1e-10
        assert abs(w.sum() - 1) < 1e-12


def test_channel_zero_output_guard():
    # only members with a = |0> : the input |1> is annihilated
    pb = ProductBasis(2, 2, E2[[0, 0]], E2[[0, 1]])
    with pytest.raises(ValueError):
        channel_from_upb_choi(pb)(np.diag([0, 1]))


def test_conjugation_convention_does_not_change_ranks():
    # a locally rephased tiles basis has complex members; ranks agree for both conventions
    pb = tiles_upb()
    U = np.diag(np.exp(1j * np.array([0.3, 1.1, -0.7])))
    V = haar_random_unitary(3, seed=4)
    ph = ProductBasis(3, 3, pb.a @ U.T, pb.b @ V.T)
    assert is_upb_partition_criterion(ph).is_unextendible
    ch = channel_from_upb_choi(ph)
    flipped = channel_from_upb_choi(ProductBasis(3, 3, ph.a.conj(), ph.b))
    for c in (ch, flipped):
        assert sample_output_spectra(c, 50, seed=2)[:, -1].min() > 1e-6
        res = min_output_renyi(c, 0, restarts=8)
        assert abs(res.value - math.log2(3)) < 1e-9


def test_p0_report_tiles():
    rep = p0_additivity_report(tiles_upb(), samples=200, restarts=16)
    assert rep.verdict == "S_0 additive (evidence)"
    assert rep.generic is True
    assert rep.single_min_rank == 3
    assert rep.two_copy_min_rank == 9
    assert abs(rep.two_copy_s0 - 2 * math.log2(3)) < 1e-6
    assert rep.single_complement_overlap < 1 - 1e-3
    assert rep.tensor_complement_overlap < 1 - 1e-4
    assert rep.single_min_eigenvalue > 1e-6


def test_p0_report_declines_extendible():
    rep = p0_additivity_report(ProductBasis(2, 2, E2[[0, 1]], E2[[0, 1]]), samples=20, restarts=4)
    assert rep.verdict == "declined: not a UPB"


def test_p0_report_tiles_minus_one():
    rep = p0_additivity_report(tiles_upb().without(4), samples=50, restarts=8)
    assert rep.verdict == "declined: not a UPB"
    assert abs(rep.single_complement_overlap - 1) < 1e-6
    assert rep.single_min_rank < 3


def test_json_round_trip(tmp_path):
    pb = tiles_upb()
    path = tmp_path / "pb.json"
    save_product_basis(pb, path)
    back = load_product_basis(path)
    assert np.abs(back.a - pb.a).max() == 0 and np.abs(back.b - pb.b).max() == 0
