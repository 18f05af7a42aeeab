"""Dense complex tensor algebra on multi-factor Hilbert spaces.

States are carried as :class:`PureState` (amplitudes plus the list of factor
dimensions); operators are plain 2-D numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# singular/eigen values below this are treated as exact zeros
CLAMP_EPS = 1e-12


@dataclass(frozen=True)
class PureState:
    vec: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=np.complex128).reshape(-1)
        dims = tuple(int(x) for x in self.dims)
        if int(np.prod(dims)) != vec.size:
            raise ValueError(f"factor dims {dims} do not match vector length {vec.size}")
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "dims", dims)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def normalized(self) -> "PureState":
        return PureState(self.vec / np.linalg.norm(self.vec), self.dims)

    def density(self) -> np.ndarray:
        return np.outer(self.vec, self.vec.conj())


def basis_state(index: int | Sequence[int], dims: Sequence[int]) -> PureState:
    """Computational basis vector; ``index`` is flat or one digit per factor."""
    dims = tuple(dims)
    if not np.isscalar(index):
        index = int(np.ravel_multi_index(tuple(index), dims))
    vec = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    vec[index] = 1
    return PureState(vec, dims)


def tensor_product(a, b):
    """Kronecker product of two states (dims concatenated) or two matrices."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.vec, b.vec), a.dims + b.dims)
    if isinstance(a, PureState) or isinstance(b, PureState):
        raise TypeError("cannot mix states and matrices in tensor_product")
    return np.kron(np.asarray(a), np.asarray(b))


def _check_perm(perm: Sequence[int], n: int) -> list[int]:
    perm = [int(x) for x in perm]
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} factors")
    return perm


def permute_factors(state: PureState, perm: Sequence[int]) -> PureState:
    """Reorder tensor factors: factor ``i`` of the result is factor ``perm[i]`` of the input."""
    perm = _check_perm(perm, len(state.dims))
    tmp = state.vec.reshape(state.dims).transpose(perm)
    return PureState(tmp.reshape(-1), tuple(state.dims[i] for i in perm))


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, x in enumerate(perm):
        inv[x] = i
    return inv


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``; kept factors stay in the order given."""
    rho = np.asarray(rho)
    dims = [int(x) for x in dims]
    n = len(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"matrix of shape {rho.shape} inconsistent with dims {dims}")
    keep = [int(x) for x in keep]
    if len(set(keep)) != len(keep) or any(not 0 <= x < n for x in keep):
        raise ValueError(f"invalid factor subset {keep}")
    drop = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    dd = int(np.prod([dims[i] for i in drop]))
    tmp = rho.reshape(dims + dims).transpose(keep + drop + [n + i for i in keep] + [n + i for i in drop])
    return np.einsum("ikjk->ij", tmp.reshape(dk, dd, dk, dd))


def _cut_matrix(state: PureState, left: Sequence[int]) -> np.ndarray:
    n = len(state.dims)
    left = [int(x) for x in left]
    if len(set(left)) != len(left) or any(not 0 <= x < n for x in left):
        raise ValueError(f"invalid cut {left} for {n} factors")
    right = [i for i in range(n) if i not in left]
    if not left or not right:
        raise ValueError("both sides of the cut must be nonempty")
    dl = int(np.prod([state.dims[i] for i in left]))
    return state.vec.reshape(state.dims).transpose(left + right).reshape(dl, -1)


def normalize_spectrum(values: np.ndarray) -> np.ndarray:
    """Clamp tiny entries to zero, renormalize to unit sum, sort descending."""
    lam = np.sort(np.asarray(values, dtype=np.float64))[::-1].copy()
    lam[lam < CLAMP_EPS] = 0.0
    return lam / lam.sum()


def schmidt_spectrum(state: PureState, left: Sequence[int]) -> np.ndarray:
    """Squared Schmidt coefficients across the cut ``left : rest``, descending, summing to one."""
    s = np.linalg.svd(_cut_matrix(state, left), compute_uv=False)
    s[s < CLAMP_EPS] = 0.0
    return normalize_spectrum(s * s)


def schmidt_decomposition(state: PureState, left: Sequence[int]):
    """Return ``(coefficients, U, Vh)`` with ``state = sum_i c_i U[:, i] (x) Vh[i, :]`` in cut order."""
    u, s, vh = np.linalg.svd(_cut_matrix(state, left), full_matrices=False)
    return s, u, vh


def is_hermitian(m: np.ndarray, atol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.abs(m - m.conj().T).max(initial=0) <= atol


def is_projector(m: np.ndarray, atol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return is_hermitian(m, atol) and np.abs(m @ m - m).max(initial=0) <= atol


def hermitian_spectrum(m: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, descending."""
    m = np.asarray(m)
    if not is_hermitian(m, atol):
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh(m)[::-1]


def density_spectrum(rho: np.ndarray) -> np.ndarray:
    """Spectrum of a (possibly unnormalized) density matrix as a probability vector."""
    rho = np.asarray(rho)
    return normalize_spectrum(np.linalg.eigvalsh((rho + rho.conj().T) / 2))


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_state(dim: int, seed=None) -> PureState:
    """Haar-distributed pure state, as a normalized complex Gaussian vector."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    if dim == 1:
        # global phase is unphysical; return the canonical vector
        return PureState(np.ones(1), (1,))
    rng = make_rng(seed)
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(vec / np.linalg.norm(vec), (dim,))


def haar_random_states(dim: int, num: int, seed=None) -> np.ndarray:
    """``num`` Haar-random states of dimension ``dim`` stacked as rows."""
    rng = make_rng(seed)
    tmp = rng.normal(size=(num, dim)) + 1j * rng.normal(size=(num, dim))
    return tmp / np.linalg.norm(tmp, axis=1, keepdims=True)


def haar_random_unitary(dim: int, seed=None) -> np.ndarray:
    rng = make_rng(seed)
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
