"""Dense complex linear algebra for small bipartite systems.

States are plain ``numpy`` vectors; a :class:`PureState` wraps one when a
bipartite factorization has to travel with it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class Tolerance:
    """Absolute cutoffs for exact algebra and for optimizer output."""

    algebraic: float = 1e-9
    optimization: float = 1e-6

    def __post_init__(self):
        if not 0 < self.algebraic <= self.optimization < 1:
            raise ValueError(
                f"need 0 < algebraic <= optimization < 1, got {self.algebraic}, {self.optimization}"
            )


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class PureState:
    """Unit vector, optionally tagged with a bipartite split ``dims=(dA, dB)``."""

    amplitudes: np.ndarray
    dims: tuple[int, int] | None = None
    atol: float = field(default=DEFAULT_TOL.algebraic, repr=False, compare=False)

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.size < 1:
            raise ValueError("state needs at least one amplitude")
        if not np.all(np.isfinite(vec)):
            raise ValueError("non-finite amplitude")
        if abs(np.linalg.norm(vec) - 1) > self.atol:
            raise ValueError(f"state norm {np.linalg.norm(vec):.3g} is not 1")
        if self.dims is not None:
            dims = tuple(int(x) for x in self.dims)
            if len(dims) != 2 or dims[0] * dims[1] != vec.size:
                raise ValueError(f"dims {self.dims} do not factor dimension {vec.size}")
            object.__setattr__(self, "dims", dims)
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True)
class SchmidtForm:
    """``state = sum_j coefficients[j] * left[:, j] (x) right[:, j]``."""

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def rank(self) -> int:
        return self.coefficients.size

    def reconstruct(self) -> np.ndarray:
        return np.einsum("j,aj,bj->ab", self.coefficients, self.left, self.right).reshape(-1)


def normalize(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return vec / nrm


def ket(index: int, dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1
    return vec


def product_ket(a: int, b: int, d_a: int, d_b: int | None = None) -> np.ndarray:
    """Computational basis state ``|a b>``."""
    return np.kron(ket(a, d_a), ket(b, d_a if d_b is None else d_b))


def fix_phase(vec, atol: float = DEFAULT_TOL.algebraic):
    """Rotate ``vec`` so its first entry above ``atol`` is real positive.

    Returns the rotated vector and the unit phase that was divided out.
    """
    vec = np.asarray(vec, dtype=complex)
    idx = np.flatnonzero(np.abs(vec) > atol)
    if idx.size == 0:
        return vec, 1.0 + 0j
    phase = vec[idx[0]] / abs(vec[idx[0]])
    return vec / phase, phase


def _split(state, dims):
    if isinstance(state, PureState):
        vec, dims = state.amplitudes, dims or state.dims
    else:
        vec = np.asarray(state, dtype=complex).reshape(-1)
    if dims is None:
        raise ValueError("bipartite dims are required")
    d_a, d_b = dims
    if d_a * d_b != vec.size:
        raise ValueError(f"dims {dims} do not factor dimension {vec.size}")
    return vec, int(d_a), int(d_b)


def schmidt_decompose(state, dims=None, atol: float = DEFAULT_TOL.algebraic) -> SchmidtForm:
    """Schmidt decomposition of a bipartite pure state.

    Coefficients come back nonincreasing with values below ``atol`` dropped.
    Each left vector has its first nonzero amplitude real positive; the
    compensating phase is carried by the matching right vector, so the
    reconstruction is exact rather than only up to phase. Ties in the
    coefficients are ordered lexicographically by left-vector amplitudes.
    """
    vec, d_a, d_b = _split(state, dims)
    if abs(np.linalg.norm(vec) - 1) > atol:
        raise ValueError("state is not normalized")
    mat = vec.reshape(d_a, d_b)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = s > atol
    coeffs = s[keep]
    left = u[:, keep]
    right = vh[keep].T
    for j in range(coeffs.size):
        left[:, j], phase = fix_phase(left[:, j], atol)
        right[:, j] = right[:, j] * phase

    def sort_key(j):
        amps = left[:, j]
        lex = tuple(x for a in amps for x in (round(a.real, 9), round(a.imag, 9)))
        return (-round(coeffs[j] / atol) * atol,) + lex

    order = sorted(range(coeffs.size), key=sort_key)
    return SchmidtForm(coeffs[order], left[:, order], right[:, order])


def schmidt_number(state, dims=None, atol: float = DEFAULT_TOL.algebraic) -> int:
    return schmidt_decompose(state, dims, atol).rank


def partial_trace(state, side: str, dims=None) -> np.ndarray:
    """Reduced density matrix of ``|state><state|``.

    ``side="A"`` keeps subsystem A (traces out B); ``side="B"`` keeps B.
    """
    vec, d_a, d_b = _split(state, dims)
    mat = vec.reshape(d_a, d_b)
    if side == "A":
        return mat @ mat.conj().T
    if side == "B":
        return (mat.T @ mat.conj()).astype(complex)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def marginals(state, dims=None) -> tuple[np.ndarray, np.ndarray]:
    return partial_trace(state, "A", dims), partial_trace(state, "B", dims)


def is_hermitian(mat, atol: float = DEFAULT_TOL.algebraic) -> bool:
    mat = np.asarray(mat)
    return mat.ndim == 2 and mat.shape[0] == mat.shape[1] and np.allclose(mat, mat.conj().T, atol=atol, rtol=0)


def is_density_matrix(mat, atol: float = DEFAULT_TOL.algebraic) -> bool:
    if not is_hermitian(mat, atol):
        return False
    mat = np.asarray(mat)
    return abs(np.trace(mat) - 1) < atol and np.linalg.eigvalsh(mat).min() > -atol


def eig_hermitian(rho, atol: float = DEFAULT_TOL.algebraic):
    """Eigenvalues (nonincreasing) and orthonormal eigenvectors as columns."""
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, atol):
        raise ValueError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh((rho + rho.conj().T) / 2)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    for k in range(vals.size):
        vecs[:, k], _ = fix_phase(vecs[:, k], atol)
    return vals, vecs


def is_isometry(mat, atol: float = DEFAULT_TOL.algebraic) -> bool:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim == 1:
        mat = mat[:, None]
    rows, cols = mat.shape
    if rows < cols:
        raise ValueError(f"{rows}x{cols} matrix cannot be an isometry")
    return np.allclose(mat.conj().T @ mat, np.eye(cols), atol=atol, rtol=0)


def is_unitary(mat, atol: float = DEFAULT_TOL.algebraic) -> bool:
    mat = np.asarray(mat)
    return mat.ndim == 2 and mat.shape[0] == mat.shape[1] and is_isometry(mat, atol)


def commutator_norm(a, b) -> float:
    """Frobenius norm of ``ab - ba``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"need square matrices of equal shape, got {a.shape} and {b.shape}")
    return float(np.linalg.norm(a @ b - b @ a))


def generalized_pauli(d: int, kind: str) -> np.ndarray:
    """Clock ``Z = sum_k w^k |k><k|`` or shift ``X = sum_k |k+1 mod d><k|``."""
    if d < 2:
        raise ValueError("generalized Pauli operators need d >= 2")
    if kind == "Z":
        return np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    if kind == "X":
        return np.roll(np.eye(d, dtype=complex), 1, axis=0)
    raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")


def orthonormal_complement(vectors, dim: int, atol: float = DEFAULT_TOL.algebraic) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of ``span(vectors)``."""
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vecs:
        return np.eye(dim, dtype=complex)
    mat = np.column_stack(vecs)
    if mat.shape[0] != dim:
        raise ValueError(f"vectors live in dimension {mat.shape[0]}, not {dim}")
    if np.linalg.matrix_rank(mat, tol=atol) < mat.shape[1]:
        raise ValueError("input vectors are linearly dependent")
    comp = scipy.linalg.null_space(mat.conj().T, rcond=atol)
    for k in range(comp.shape[1]):
        comp[:, k], _ = fix_phase(comp[:, k], atol)
    return comp


def orthonormalize(vectors, atol: float = DEFAULT_TOL.algebraic) -> np.ndarray:
    """Orthonormal basis (columns) of ``span(vectors)`` via QR; Gram-Schmidt order kept."""
    mat = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
    q, r = np.linalg.qr(mat)
    if np.min(np.abs(np.diag(r))) < atol:
        raise ValueError("input vectors are linearly dependent")
    return q * (np.diag(r) / np.abs(np.diag(r)))


def nearest_unitary(mat) -> np.ndarray:
    """Unitary factor of the polar decomposition."""
    u, _, vh = np.linalg.svd(np.asarray(mat, dtype=complex))
    return u @ vh


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return normalize(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def fidelity(a, b) -> float:
    """``|<a|b>|`` for unit vectors; phase-insensitive overlap."""
    return float(abs(np.vdot(a, b)))


def phase_distance(a, b) -> float:
    """Euclidean distance between unit vectors minimized over a global phase."""
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - fidelity(a, b)))))
