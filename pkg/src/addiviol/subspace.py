"""Bipartite subspaces and the channels they define by tracing out the A factor.

A :class:`Subspace` of C^dA (x) C^dB with orthonormal basis columns ``W`` is the
range of the isometry ``W``; the corresponding channel sends an input state
``x`` on C^k to ``Tr_A(W x x^dag W^dag)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .tensor import make_rng, partial_trace

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Subspace:
    d_A: int
    d_B: int
    basis: np.ndarray  # (d_A*d_B, k), orthonormal columns, row index = a*d_B + b

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=np.complex128)
        if basis.ndim == 1:
            basis = basis[:, None]
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "d_A", int(self.d_A))
        object.__setattr__(self, "d_B", int(self.d_B))
        if basis.shape[0] != self.d_A * self.d_B:
            raise ValueError(f"basis has {basis.shape[0]} rows, expected {self.d_A * self.d_B}")
        k = basis.shape[1]
        if not 1 <= k <= self.d_A * self.d_B:
            raise ValueError(f"subspace dimension {k} out of range")
        err = np.abs(basis.conj().T @ basis - np.eye(k)).max()
        if err > ORTHO_TOL:
            raise ValueError(f"basis is not orthonormal (max deviation {err:.2e})")

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.d_A * self.d_B

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def matrices(self) -> np.ndarray:
        """Basis vectors reshaped to ``(k, d_A, d_B)`` coefficient matrices."""
        return self.basis.T.reshape(self.k, self.d_A, self.d_B)


@dataclass(frozen=True)
class Channel:
    """Channel C^k -> C^dB realized by the isometry onto ``subspace``, tracing out A."""

    subspace: Subspace

    @property
    def isometry(self) -> np.ndarray:
        return self.subspace.basis

    @property
    def d_in(self) -> int:
        return self.subspace.k

    @property
    def d_out(self) -> int:
        return self.subspace.d_B

    def kraus(self) -> np.ndarray:
        """Kraus operators ``K_a = (<a| (x) I) W`` stacked as ``(d_A, d_B, k)``."""
        s = self.subspace
        return self.isometry.reshape(s.d_A, s.d_B, s.k)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        s = self.subspace
        W = self.isometry
        return partial_trace(W @ np.asarray(rho) @ W.conj().T, [s.d_A, s.d_B], [1])

    def output(self, x: np.ndarray) -> np.ndarray:
        """Output density matrix for a pure input vector."""
        s = self.subspace
        m = (self.isometry @ np.asarray(x)).reshape(s.d_A, s.d_B)
        return m.T @ m.conj()


def channel_from_subspace(s: Subspace) -> Channel:
    return Channel(s)


def orthonormalize(vectors: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) for the span of the given columns."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.count_nonzero(s > rtol * max(s.max(initial=0), 1)))
    if rank == 0:
        raise ValueError("vectors span the zero subspace")
    return u[:, :rank]


def span(vectors: np.ndarray, d_A: int, d_B: int) -> Subspace:
    return Subspace(d_A, d_B, orthonormalize(vectors))


def orthogonal_complement(s: Subspace) -> Subspace:
    comp = scipy.linalg.null_space(s.basis.conj().T)
    if comp.shape[1] == 0:
        raise ValueError("subspace is the full space; its complement is trivial")
    return Subspace(s.d_A, s.d_B, comp)


def full_space(d_A: int, d_B: int) -> Subspace:
    return Subspace(d_A, d_B, np.eye(d_A * d_B))


def random_subspace(d_A: int, d_B: int, k: int, seed=None) -> Subspace:
    """Haar-random k-dimensional subspace of C^dA (x) C^dB."""
    rng = make_rng(seed)
    n = d_A * d_B
    z = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    q, _ = np.linalg.qr(z)
    return Subspace(d_A, d_B, q)


def swap_operator(d: int) -> np.ndarray:
    """The swap V|ij> = |ji> on C^d (x) C^d."""
    if d < 1:
        raise ValueError("d must be positive")
    V = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            V[j * d + i, i * d + j] = 1
    return V


def antisymmetric_subspace(d: int) -> Subspace:
    """Span of (|ij> - |ji>)/sqrt(2), i < j, in lexicographic pair order."""
    if d < 2:
        raise ValueError("antisymmetric subspace needs d >= 2")
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    W = np.zeros((d * d, len(pairs)))
    for c, (i, j) in enumerate(pairs):
        W[i * d + j, c] = 1 / np.sqrt(2)
        W[j * d + i, c] = -1 / np.sqrt(2)
    return Subspace(d, d, W)


def is_antisymmetric(s: Subspace, atol: float = 1e-10) -> bool:
    """True when every vector of ``s`` lies in the antisymmetric subspace (V v = -v)."""
    if s.d_A != s.d_B:
        return False
    tmp = s.matrices()
    return np.abs(tmp + tmp.transpose(0, 2, 1)).max() <= atol


def parthasarathy_subspace(d: int) -> Subspace:
    """The (d-1)^2 dimensional completely entangled subspace of C^d (x) C^d.

    Orthogonal complement of span{v_t (x) v_t}, v_t = (1, t, ..., t^(d-1)), over
    the 2d-1 nodes t = -d, ..., d-2.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    nodes = np.arange(2 * d - 1) - d
    vand = nodes[None, :] ** np.arange(d)[:, None]  # (d, 2d-1), column j = v_{t_j}
    vand = vand / np.linalg.norm(vand, axis=0)
    prods = np.einsum("aj,bj->abj", vand, vand).reshape(d * d, -1)
    comp = scipy.linalg.null_space(orthonormalize(prods).conj().T)
    return Subspace(d, d, comp)


def conjugate_subspace(s: Subspace) -> Subspace:
    """Entrywise complex conjugate in the standard product basis."""
    return Subspace(s.d_A, s.d_B, s.basis.conj())


def werner_holevo_apply(rho: np.ndarray, d: int) -> np.ndarray:
    """Werner-Holevo map rho -> (Tr(rho) I - rho^T) / (d - 1)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    rho = np.asarray(rho)
    if rho.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} density matrix")
    return (np.trace(rho) * np.eye(d) - rho.T) / (d - 1)


def _encode_complex(arr: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(arr)]


def _decode_complex(data, shape=None) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    return out.reshape(shape) if shape is not None else out


def subspace_to_dict(s: Subspace) -> dict:
    return {"d_A": s.d_A, "d_B": s.d_B, "basis": _encode_complex(s.basis)}


def subspace_from_dict(data: dict) -> Subspace:
    """Inverse of :func:`subspace_to_dict`; ``basis`` is (d_A*d_B) rows of k [re, im] pairs.

    A flat row-major list of pairs is accepted as well.
    """
    try:
        d_A, d_B = int(data["d_A"]), int(data["d_B"])
        raw = data["basis"]
    except (KeyError, TypeError) as err:
        raise ValueError(f"malformed subspace document: {err}") from err
    basis = _decode_complex(raw)
    if basis.ndim == 1:
        basis = basis.reshape(d_A * d_B, -1)
    return Subspace(d_A, d_B, basis)


def save_subspace(s: Subspace, path) -> None:
    Path(path).write_text(json.dumps(subspace_to_dict(s)))


def load_subspace(path) -> Subspace:
    return subspace_from_dict(json.loads(Path(path).read_text()))
