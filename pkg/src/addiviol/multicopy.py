"""Several copies of the antisymmetric channel.

Inputs live on (C^k)^n with k = d(d-1)/2. Each input factor is embedded by the
antisymmetric isometry into a pair (A_j, B_j); the output factor order is
always (A_1, B_1, ..., A_n, B_n) and the channel output is the reduction onto
all B factors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .maxoverlap import multipartite_max_product_overlap
from .renyi import DEFAULT_RANK_EPS, format_order, parse_order, renyi_entropy
from .subspace import antisymmetric_subspace
from .tensor import PureState, inverse_permutation, normalize_spectrum

MAX_DENSE_DIM = 10**7

TOTALLY_ANTISYMMETRIC = "totally_antisymmetric"
PAIRING = "pairing"
OPTIMIZED = "optimized"


@dataclass
class MultiCopyResult:
    n: int
    d: int
    input_kind: str
    p: float
    entropy: float
    single_copy_sum: float
    spectrum: np.ndarray = field(repr=False)
    entropies: dict = field(default_factory=dict)
    seesaw_entropy: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "input_kind": self.input_kind,
            "p": format_order(self.p),
            "entropy": self.entropy,
            "single_copy_sum": self.single_copy_sum,
            "rank": int(np.count_nonzero(self.spectrum > DEFAULT_RANK_EPS)),
            "entropies": {format_order(q): v for q, v in self.entropies.items()},
            "seesaw_entropy": self.seesaw_entropy,
            "spectrum": [float(v) for v in self.spectrum if v > 0],
        }


def _parity(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def totally_antisymmetric_input(k: int, n: int | None = None) -> PureState:
    """Determinant state (1/sqrt(k!)) sum_sigma sgn(sigma) |sigma(0) ... sigma(k-1)> on (C^k)^k."""
    if n is not None and n != k:
        raise ValueError(f"the determinant state needs n = k copies, got n={n}, k={k}")
    if k < 1:
        raise ValueError("k must be positive")
    amp = np.zeros([k] * k)
    for perm in itertools.permutations(range(k)):
        amp[perm] = _parity(perm)
    amp /= math.sqrt(math.factorial(k))
    return PureState(amp.reshape(-1), (k,) * k)


def pairing_input(d: int, n: int) -> PureState:
    """Pair states on copies (0, 1), (2, 3), ...; a leftover copy gets a minimal-entropy input.

    The pair state in input coordinates is sum_i |i>|i> / sqrt(k) because the
    antisymmetric basis is real; the single-copy input is the embedding of
    (|01> - |10>)/sqrt(2), i.e. input basis vector 0.
    """
    if n < 1:
        raise ValueError("n must be positive")
    k = d * (d - 1) // 2
    pair = np.eye(k).reshape(-1) / math.sqrt(k)
    single = np.zeros(k)
    single[0] = 1
    vec = np.ones(1)
    for _ in range(n // 2):
        vec = np.kron(vec, pair)
    if n % 2:
        vec = np.kron(vec, single)
    return PureState(vec, (k,) * n)


def _check_size(d: int, n: int, large_ok: bool) -> None:
    total = d ** (2 * n)
    if total > MAX_DENSE_DIM and not large_ok:
        raise ValueError(
            f"d={d}, n={n} needs {total:.3g} output amplitudes (> {MAX_DENSE_DIM:.0e}); "
            "pass large_ok=True (CLI: --large) to run it anyway"
        )


def embed(x: PureState, d: int) -> np.ndarray:
    """Apply the antisymmetric isometry to each input factor; returns an array shaped [d]*(2n)."""
    W = antisymmetric_subspace(d).basis.real.reshape(d, d, -1)
    n = len(x.dims)
    T = x.vec.reshape(x.dims)
    for _ in range(n):
        # consume the leading input factor, append its (A, B) pair at the end
        T = np.tensordot(T, W, axes=([0], [2]))
    return T


def output_spectrum(d: int, x: PureState, large_ok: bool = False) -> np.ndarray:
    """Spectrum of the reduction onto B_1..B_n of the embedded input."""
    n = len(x.dims)
    k = d * (d - 1) // 2
    if any(dim != k for dim in x.dims):
        raise ValueError(f"input factors must have dimension k={k}")
    _check_size(d, n, large_ok)
    T = embed(x, d)
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    M = T.transpose(perm).reshape(d**n, d**n)
    gram = M.conj().T @ M
    del M, T
    return normalize_spectrum(np.linalg.eigvalsh(gram))


def multicopy_output_entropy(d: int, n: int, x: PureState, p, input_kind: str = "custom",
                             large_ok: bool = False, orders=()) -> MultiCopyResult:
    p = parse_order(p)
    if len(x.dims) != n:
        raise ValueError(f"input has {len(x.dims)} factors, expected n={n}")
    spec = output_spectrum(d, x, large_ok)
    ent = {q: renyi_entropy(spec, q) for q in map(parse_order, orders)}
    return MultiCopyResult(
        n=n, d=d, input_kind=input_kind, p=p,
        entropy=renyi_entropy(spec, p),
        single_copy_sum=float(n),
        spectrum=spec,
        entropies=ent,
    )


def antisym_tensor_basis(d: int, n: int) -> np.ndarray:
    """Orthonormal basis of the n-fold antisymmetric subspace, factors (A_1, B_1, ..., A_n, B_n)."""
    W = antisymmetric_subspace(d).basis.real
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, W)
    return out


def multicopy_min_search(d: int, n: int, large_ok: bool = False, **opts) -> MultiCopyResult:
    """Smallest output min-entropy over n-copy inputs, by seesaw across (all A) : (all B)."""
    _check_size(d, n, large_ok)
    Q = antisym_tensor_basis(d, n)
    dims = [d] * (2 * n)
    res = multipartite_max_product_overlap(Q, dims, list(range(0, 2 * n, 2)), **opts)
    # product witness back in (A_1, B_1, ...) order, then pulled back to the input space
    prod = np.kron(res.witness_a.vec, res.witness_b.vec).reshape(dims)
    grouped = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    prod = prod.transpose(inverse_permutation(grouped)).reshape(-1)
    x = Q.T @ prod
    x = PureState(x / np.linalg.norm(x), ((d * (d - 1)) // 2,) * n)
    result = multicopy_output_entropy(d, n, x, math.inf, OPTIMIZED, large_ok)
    result.seesaw_entropy = -math.log2(res.value)
    return result
