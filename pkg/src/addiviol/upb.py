"""Unextendible product bases and the entanglement-breaking maps built from them.

A set of orthogonal product vectors a_i (x) b_i can be extended by a product
vector x (x) y exactly when the members split into two groups S, T with the
A-parts of S spanning less than C^dA (x is orthogonal to them) and the B-parts
of T spanning less than C^dB (y is orthogonal to those). The map whose Choi
state is proportional to the projector onto the members sends
rho -> sum_i <conj(a_i)|rho|conj(a_i)> |b_i><b_i|; when the complement of the
members holds no product vector, every output of this map has full rank.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .maxoverlap import max_product_overlap
from .minentropy import min_output_renyi
from .renyi import DEFAULT_RANK_EPS, rank_eps
from .subspace import Subspace, _decode_complex, _encode_complex, orthogonal_complement
from .tensor import haar_random_states, make_rng, normalize_spectrum

ORTHO_TOL = 1e-10
RANK_TOL = 1e-9
EXHAUSTIVE_LIMIT = 22
SINGLE_COMPLEMENT_GAP = 1e-3
TENSOR_COMPLEMENT_GAP = 1e-4


class NonOrthogonalError(ValueError):
    def __init__(self, i: int, j: int, overlap: float):
        super().__init__(f"members {i} and {j} are not orthogonal (|overlap| = {overlap:.3e})")
        self.pair = (i, j)


@dataclass(frozen=True)
class ProductBasis:
    d_A: int
    d_B: int
    a: np.ndarray  # (n, d_A)
    b: np.ndarray  # (n, d_B)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=np.complex128))
        b = np.atleast_2d(np.asarray(self.b, dtype=np.complex128))
        if a.shape != (len(a), self.d_A) or b.shape != (len(a), self.d_B):
            raise ValueError(f"member arrays {a.shape}, {b.shape} inconsistent with dims ({self.d_A}, {self.d_B})")
        norms = np.concatenate([np.linalg.norm(a, axis=1), np.linalg.norm(b, axis=1)])
        if np.abs(norms - 1).max() > ORTHO_TOL:
            raise ValueError("member factors must be normalized")
        gram = (a.conj() @ a.T) * (b.conj() @ b.T)
        np.fill_diagonal(gram, 0)
        if gram.size and np.abs(gram).max() > ORTHO_TOL:
            i, j = np.unravel_index(np.argmax(np.abs(gram)), gram.shape)
            i, j = sorted((int(i), int(j)))
            raise NonOrthogonalError(i, j, float(np.abs(gram[i, j])))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return len(self.a)

    def vectors(self) -> np.ndarray:
        """Member product vectors as columns of a (d_A d_B, n) array."""
        return np.einsum("na,nb->abn", self.a, self.b).reshape(self.d_A * self.d_B, -1)

    def span(self) -> Subspace:
        return Subspace(self.d_A, self.d_B, self.vectors())

    def complement(self) -> Subspace:
        return orthogonal_complement(self.span())

    def without(self, index: int) -> "ProductBasis":
        keep = [i for i in range(self.size) if i != index]
        return ProductBasis(self.d_A, self.d_B, self.a[keep], self.b[keep])


def tiles_upb() -> ProductBasis:
    s2, s3 = 1 / math.sqrt(2), 1 / math.sqrt(3)
    e = np.eye(3)
    a = [e[0], e[2], (e[0] - e[1]) * s2, (e[1] - e[2]) * s2, (e[0] + e[1] + e[2]) * s3]
    b = [(e[0] - e[1]) * s2, (e[1] - e[2]) * s2, e[2], e[0], (e[0] + e[1] + e[2]) * s3]
    return ProductBasis(3, 3, np.array(a), np.array(b))


def local_rank(vectors: np.ndarray) -> int:
    if len(vectors) == 0:
        return 0
    s = np.linalg.svd(np.asarray(vectors), compute_uv=False)
    return int(np.count_nonzero(s > RANK_TOL))


def genericity_check(pb, d: int | None = None):
    """Check that every d members have full local rank on both sides.

    ``pb`` is a :class:`ProductBasis` or a pair ``(a, b)`` of member arrays
    (orthogonality is not needed for this property). Returns ``(True, None)``
    or ``(False, failing_subset)``.
    """
    if isinstance(pb, ProductBasis):
        a, b = pb.a, pb.b
    else:
        a, b = (np.atleast_2d(np.asarray(x)) for x in pb)
        if len(a) != len(b):
            raise ValueError("a and b must list the same number of members")
    d = a.shape[1] if d is None else d
    if a.shape[1] != d or b.shape[1] != d:
        raise ValueError(f"genericity needs d_A = d_B = {d}")
    if len(a) != 2 * (d - 1) + 1:
        raise ValueError(f"expected {2 * (d - 1) + 1} members, got {len(a)}")
    for subset in itertools.combinations(range(len(a)), d):
        idx = list(subset)
        if local_rank(a[idx]) < d or local_rank(b[idx]) < d:
            return False, subset
    return True, None


@dataclass
class UpbCertificate:
    is_unextendible: bool
    method: str  # "partition_exhaustive" or "seesaw_evidence"
    bipartitions_examined: int = 0
    worst_partition: tuple | None = None
    extension: np.ndarray | None = field(default=None, repr=False)
    max_complement_overlap: float | None = None

    def to_dict(self) -> dict:
        out = {
            "is_unextendible": self.is_unextendible,
            "method": self.method,
            "bipartitions_examined": self.bipartitions_examined,
            "worst_partition": None if self.worst_partition is None else [list(x) for x in self.worst_partition],
            "max_complement_overlap": self.max_complement_overlap,
        }
        return out


def _extension_vector(pb: ProductBasis, left, right) -> np.ndarray:
    x = scipy.linalg.null_space(pb.a[list(left)].conj()) if left else np.eye(pb.d_A)
    y = scipy.linalg.null_space(pb.b[list(right)].conj()) if right else np.eye(pb.d_B)
    return np.kron(x[:, 0], y[:, 0])


def _find_extending_partition(pb: ProductBasis):
    """Depth-first search over member subsets S whose A-parts are rank deficient.

    Rank deficiency is inherited by subsets, so pruning at full A-rank still
    decides every one of the 2^n bipartitions.
    """
    n = pb.size

    def visit(start, chosen):
        rest = [i for i in range(n) if i not in chosen]
        if local_rank(pb.b[rest]) < pb.d_B:
            return tuple(chosen), tuple(rest)
        for i in range(start, n):
            cand = chosen + [i]
            if local_rank(pb.a[cand]) < pb.d_A:
                found = visit(i + 1, cand)
                if found:
                    return found
        return None

    return visit(0, [])


def is_upb_partition_criterion(pb: ProductBasis, max_members: int = EXHAUSTIVE_LIMIT, **opts) -> UpbCertificate:
    """Decide unextendibility; exhaustive up to ``max_members``, seesaw evidence beyond."""
    if pb.size > max_members:
        if pb.size >= pb.d_A * pb.d_B:
            return UpbCertificate(True, "seesaw_evidence", max_complement_overlap=0.0)
        val = no_product_vector_evidence(pb.complement(), **opts)
        return UpbCertificate(val < 1 - TENSOR_COMPLEMENT_GAP, "seesaw_evidence", max_complement_overlap=val)
    found = _find_extending_partition(pb)
    if found is None:
        return UpbCertificate(True, "partition_exhaustive", bipartitions_examined=2**pb.size)
    return UpbCertificate(
        False, "partition_exhaustive", bipartitions_examined=2**pb.size,
        worst_partition=found, extension=_extension_vector(pb, *found),
    )


def tensor_upb(u1: ProductBasis, u2: ProductBasis) -> ProductBasis:
    """Members a_i (x) a'_j on A A' and b_i (x) b'_j on B B', i-major order."""
    a = np.einsum("ix,jy->ijxy", u1.a, u2.a).reshape(u1.size * u2.size, -1)
    b = np.einsum("ix,jy->ijxy", u1.b, u2.b).reshape(u1.size * u2.size, -1)
    return ProductBasis(u1.d_A * u2.d_A, u1.d_B * u2.d_B, a, b)


def no_product_vector_evidence(s: Subspace, **opts) -> float:
    """Largest product-state overlap found with the projector onto ``s``.

    Values bounded away from 1 are numerical evidence (not proof) that ``s``
    contains no product vector.
    """
    return max_product_overlap(s, s.d_A, s.d_B, **opts).value


@dataclass(frozen=True)
class UpbChannel:
    """rho -> sum_i <conj(a_i)|rho|conj(a_i)> |b_i><b_i|, renormalized per input."""

    basis: ProductBasis

    @property
    def d_in(self) -> int:
        return self.basis.d_A

    @property
    def d_out(self) -> int:
        return self.basis.d_B

    def kraus(self) -> np.ndarray:
        # <conj(a)| = a^T, so K_i = |b_i> a_i^T
        return np.einsum("nb,na->nba", self.basis.b, self.basis.a)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        K = self.kraus()
        out = np.einsum("nba,ac,ndc->bd", K, np.asarray(rho), K.conj())
        t = np.trace(out).real
        if t < 1e-14:
            raise ValueError("map output vanishes on this input")
        return out / t

    __call__ = apply


def channel_from_upb_choi(pb: ProductBasis) -> UpbChannel:
    return UpbChannel(pb)


def choi_state(ch: UpbChannel) -> np.ndarray:
    """(I (x) Lambda)|Phi+><Phi+| without renormalization."""
    d = ch.d_in
    K = ch.kraus()
    phi = np.eye(d).reshape(-1) / math.sqrt(d)
    rho = np.outer(phi, phi).reshape(d, d, d, d)
    out = np.einsum("ikjl,nbk,ncl->ibjc", rho, K, K.conj())
    return out.reshape(d * ch.d_out, d * ch.d_out)


@dataclass
class P0AdditivityReport:
    certificate: UpbCertificate
    generic: bool | None
    single_complement_overlap: float | None
    single_min_eigenvalue: float
    single_min_rank: int
    tensor_complement_overlap: float | None
    two_copy_min_rank: int
    two_copy_s0: float
    verdict: str

    def to_dict(self) -> dict:
        return {
            "certificate": self.certificate.to_dict(),
            "generic": self.generic,
            "single_complement_overlap": self.single_complement_overlap,
            "single_min_eigenvalue": self.single_min_eigenvalue,
            "single_min_rank": self.single_min_rank,
            "tensor_complement_overlap": self.tensor_complement_overlap,
            "two_copy_min_rank": self.two_copy_min_rank,
            "two_copy_s0": self.two_copy_s0,
            "verdict": self.verdict,
        }


def sample_output_spectra(ch, num: int, seed=None) -> np.ndarray:
    """Normalized output spectra for ``num`` Haar-random pure inputs, one row each."""
    xs = haar_random_states(ch.d_in, num, make_rng(seed))
    K = ch.kraus()
    out = []
    for x in xs:
        y = K @ x
        rho = y.T @ y.conj()
        out.append(normalize_spectrum(np.linalg.eigvalsh(rho / np.trace(rho).real)))
    return np.array(out)


def _complement_starts(comp_result) -> list[np.ndarray]:
    # a product vector x (x) y in the complement makes conj(x) a rank-deficient input
    return [comp_result.witness_a.vec.conj()] if comp_result is not None else []


def p0_additivity_report(pb: ProductBasis, samples: int = 200, restarts: int = 32, seed: int = 0,
                         eps: float = DEFAULT_RANK_EPS, **opts) -> P0AdditivityReport:
    """Numerical evidence that output S_0 of the UPB map is additive on two copies."""
    cert = is_upb_partition_criterion(pb, restarts=restarts, seed=seed)
    try:
        generic = genericity_check(pb)[0]
    except ValueError:
        generic = None
    ch = channel_from_upb_choi(pb)

    comp1 = None
    if pb.size < pb.d_A * pb.d_B:
        comp1 = max_product_overlap(pb.complement(), pb.d_A, pb.d_B, restarts=restarts, seed=seed)
    spectra = sample_output_spectra(ch, samples, seed)
    single = min_output_renyi(ch, 0, restarts=restarts, seed=seed, eps=eps,
                              starts=_complement_starts(comp1), **opts)
    single_rank = min(rank_eps(single.spectrum_at_argmin, eps),
                      min(rank_eps(s, eps) for s in spectra))

    pb2 = tensor_upb(pb, pb)
    comp2 = None
    if pb2.size < pb2.d_A * pb2.d_B:
        comp2 = max_product_overlap(pb2.complement(), pb2.d_A, pb2.d_B, restarts=restarts, seed=seed)
    two = min_output_renyi(channel_from_upb_choi(pb2), 0, restarts=restarts, seed=seed, eps=eps,
                           starts=_complement_starts(comp2), **opts)
    two_rank = rank_eps(two.spectrum_at_argmin, eps)

    full = pb.d_B
    passed = (
        cert.is_unextendible
        and single_rank == full
        and two_rank == full * full
        and (comp1 is None or comp1.value < 1 - SINGLE_COMPLEMENT_GAP)
        and (comp2 is None or comp2.value < 1 - TENSOR_COMPLEMENT_GAP)
    )
    if not cert.is_unextendible:
        verdict = "declined: not a UPB"
    elif passed:
        verdict = "S_0 additive (evidence)"
    else:
        verdict = "inconclusive"
    return P0AdditivityReport(
        certificate=cert,
        generic=generic,
        single_complement_overlap=None if comp1 is None else comp1.value,
        single_min_eigenvalue=float(spectra[:, -1].min()),
        single_min_rank=single_rank,
        tensor_complement_overlap=None if comp2 is None else comp2.value,
        two_copy_min_rank=two_rank,
        two_copy_s0=math.log2(two_rank),
        verdict=verdict,
    )


def product_basis_to_dict(pb: ProductBasis) -> dict:
    return {
        "d_A": pb.d_A,
        "d_B": pb.d_B,
        "members": [{"a": _encode_complex(a)[0], "b": _encode_complex(b)[0]} for a, b in zip(pb.a, pb.b)],
    }


def product_basis_from_dict(data: dict) -> ProductBasis:
    try:
        d_A, d_B = int(data["d_A"]), int(data["d_B"])
        a = [_decode_complex(m["a"]) for m in data["members"]]
        b = [_decode_complex(m["b"]) for m in data["members"]]
    except (KeyError, TypeError) as err:
        raise ValueError(f"malformed product basis document: {err}") from err
    return ProductBasis(d_A, d_B, np.array(a), np.array(b))


def save_product_basis(pb: ProductBasis, path) -> None:
    Path(path).write_text(json.dumps(product_basis_to_dict(pb)))


def load_product_basis(path) -> ProductBasis:
    return product_basis_from_dict(json.loads(Path(path).read_text()))
