"""Hyperdisks, Schmidt hyperdisks and the criteria that relate them.

A hyperdisk is the set ``{sum_j r_j exp(i theta_j) |phi_j>}`` for an
orthonormal list ``phi_j`` and a strictly positive coefficient vector ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .linalg import (
    DEFAULT_TOL,
    fix_phase,
    fidelity,
    is_isometry,
    normalize,
    phase_distance,
    schmidt_decompose,
)


@dataclass(frozen=True, eq=False)
class Hyperdisk:
    """Orthonormal ``basis`` (columns, ambient dim x m) and positive ``coeffs``."""

    basis: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis[:, None]
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        atol = DEFAULT_TOL.algebraic
        if basis.shape[1] != coeffs.size:
            raise ValueError(f"{basis.shape[1]} basis states but {coeffs.size} coefficients")
        if basis.shape[1] > basis.shape[0] or not is_isometry(basis, atol):
            raise ValueError("hyperdisk basis is not orthonormal")
        if np.any(coeffs <= atol):
            raise ValueError("hyperdisk coefficients must be strictly positive")
        if abs(np.sum(coeffs**2) - 1) > atol:
            raise ValueError("hyperdisk coefficients must have unit norm")
        basis.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    def state(self, theta=None) -> np.ndarray:
        return sample_state(self, np.zeros(self.dim) if theta is None else theta)

    def fidelity(self, psi) -> float:
        """Largest overlap ``|<psi(theta)|psi>|`` over the disk, in closed form."""
        return float(self.coeffs @ np.abs(self.basis.conj().T @ np.asarray(psi)))

    def distance(self, psi) -> float:
        """Phase-insensitive Euclidean distance from ``psi`` to the nearest disk state."""
        return float(np.sqrt(max(0.0, 2.0 * (1.0 - self.fidelity(psi)))))

    def samples(self, count: int, rng: np.random.Generator) -> list[np.ndarray]:
        return [sample_state(self, rng.uniform(0, 2 * np.pi, self.dim)) for _ in range(count)]

    def __repr__(self):
        return f"Hyperdisk(dim={self.dim}, ambient_dim={self.ambient_dim}, coeffs={np.round(self.coeffs, 6)})"


class SchmidtHyperdisk(Hyperdisk):
    """Hyperdisk whose basis is a Schmidt basis of ``H_A (x) H_B``."""

    def __init__(self, basis, coeffs, dims):
        super().__init__(basis, coeffs)
        dims = (int(dims[0]), int(dims[1]))
        if not is_schmidt_hyperdisk(self, *dims):
            raise ValueError("basis is not a Schmidt basis")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_factors(cls, left, right, coeffs):
        """Build from local orthonormal factors given as columns of ``left`` and ``right``."""
        left = np.asarray(left, dtype=complex)
        right = np.asarray(right, dtype=complex)
        basis = np.column_stack([np.kron(left[:, j], right[:, j]) for j in range(left.shape[1])])
        return cls(basis, coeffs, (left.shape[0], right.shape[0]))


@dataclass(frozen=True, eq=False)
class GramianPattern:
    matrix: np.ndarray
    row_support: np.ndarray
    col_support: np.ndarray


@dataclass(frozen=True, eq=False)
class RegularSubsetVerdict:
    """Outcome of classifying a two-dimensional regular subset.

    ``kind`` is ``"TwoStates"`` (``states`` holds the pair) or ``"Disk"``
    (``disk`` holds the two-dimensional subhyperdisk).
    """

    kind: str
    states: tuple[np.ndarray, ...] = ()
    disk: Hyperdisk | None = None
    phases: np.ndarray | None = None

    def contains(self, psi, atol: float = DEFAULT_TOL.algebraic) -> bool:
        if self.kind == "Disk":
            return contains(self.disk, psi, atol)
        return any(phase_distance(s, psi) < atol for s in self.states)


def _check_basis(basis):
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[1] > basis.shape[0] or not is_isometry(basis, 1e-8):
        raise ValueError("basis is not orthonormal")
    return basis


def coefficient_vector(basis, psi) -> np.ndarray:
    """Overlap magnitudes ``|<phi_j|psi>|`` against an orthonormal basis."""
    basis = _check_basis(basis)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != basis.shape[0]:
        raise ValueError("state and basis live in different dimensions")
    return np.abs(basis.conj().T @ psi)


def contains(disk: Hyperdisk, psi, atol: float = DEFAULT_TOL.algebraic) -> bool:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != disk.ambient_dim:
        raise ValueError("state and hyperdisk live in different dimensions")
    amps = disk.basis.conj().T @ psi
    out_of_span = np.linalg.norm(psi - disk.basis @ amps)
    return bool(out_of_span < atol and np.all(np.abs(np.abs(amps) - disk.coeffs) < atol))


def sample_state(disk: Hyperdisk, theta) -> np.ndarray:
    """``sum_j r_j exp(i theta_j) |phi_j>``."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != disk.dim:
        raise ValueError(f"need {disk.dim} phases, got {theta.size}")
    return disk.basis @ (disk.coeffs * np.exp(1j * theta))


def phase_unitary(disk: Hyperdisk, theta) -> np.ndarray:
    """Diagonal-phase unitary on the disk span, identity on its complement."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != disk.dim:
        raise ValueError(f"need {disk.dim} phases, got {theta.size}")
    b = disk.basis
    proj = b @ b.conj().T
    return b @ np.diag(np.exp(1j * theta)) @ b.conj().T + (np.eye(disk.ambient_dim) - proj)


def image_under_isometry(disk: Hyperdisk, v) -> Hyperdisk:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[1] != disk.ambient_dim:
        raise ValueError("isometry does not act on the hyperdisk's space")
    if not is_isometry(v):
        raise ValueError("map is not an isometry")
    return Hyperdisk(v @ disk.basis, disk.coeffs)


def hyperdisk_equal(h0: Hyperdisk, h1: Hyperdisk, atol: float = DEFAULT_TOL.algebraic) -> bool:
    """Same set of states: bases match one-to-one up to phase with equal coefficients.

    Matching is greedy by largest overlap.
    """
    if h0.dim != h1.dim or h0.ambient_dim != h1.ambient_dim:
        return False
    overlap = np.abs(h0.basis.conj().T @ h1.basis)
    free = set(range(h1.dim))
    for j in range(h0.dim):
        k = max(free, key=lambda c: overlap[j, c])
        if abs(overlap[j, k] - 1) > atol or abs(h0.coeffs[j] - h1.coeffs[k]) > atol:
            return False
        free.remove(k)
    return True


def _bloch(vec):
    a, b = vec
    return np.array([2 * (np.conj(a) * b).real, 2 * (np.conj(a) * b).imag, abs(a) ** 2 - abs(b) ** 2])


def _from_bloch(n):
    x, y, z = n / np.linalg.norm(n)
    half = np.arccos(np.clip(z, -1, 1)) / 2
    return np.array([np.cos(half), np.sin(half) * np.exp(1j * np.arctan2(y, x))])


def hyperdisk_through_pair(psi0, psi1, atol: float = DEFAULT_TOL.algebraic) -> Hyperdisk:
    """Two-dimensional hyperdisk containing both states.

    In the qubit spanned by the pair the disk axis is the bisector of the two
    Bloch vectors; for antipodal (orthogonal) states any perpendicular axis
    works and the one closest to the frame's x axis is taken.
    """
    psi0 = normalize(psi0)
    psi1 = normalize(psi1)
    if fidelity(psi0, psi1) > 1 - atol:
        raise ValueError("states coincide up to phase; no unique two-dimensional disk")
    e1 = psi1 - np.vdot(psi0, psi1) * psi0
    e1 = e1 / np.linalg.norm(e1)
    frame = np.column_stack([psi0, e1])
    b0 = _bloch(frame.conj().T @ psi0)
    b1 = _bloch(frame.conj().T @ psi1)
    axis = b0 + b1
    if np.linalg.norm(axis) < 1e-6:
        for ref in np.eye(3):
            axis = ref - (ref @ b0) * b0
            if np.linalg.norm(axis) > 1e-3:
                break
    up = _from_bloch(axis)
    down = np.array([-np.conj(up[1]), np.conj(up[0])])
    basis = frame @ np.column_stack([up, down])
    coeffs = np.abs(basis.conj().T @ psi0)
    return Hyperdisk(basis, coeffs / np.linalg.norm(coeffs))


def gramian(disk: Hyperdisk, sub: Hyperdisk, atol: float = DEFAULT_TOL.algebraic) -> GramianPattern:
    """``G[j, k] = r'_k <phi_j|phi'_k>`` with support counts per row and column."""
    if disk.ambient_dim != sub.ambient_dim:
        raise ValueError("hyperdisks live in different spaces")
    if sub.dim > disk.dim:
        raise ValueError("candidate subhyperdisk has larger dimension")
    g = (disk.basis.conj().T @ sub.basis) * sub.coeffs[None, :]
    nz = np.abs(g) > atol
    return GramianPattern(g, nz.sum(axis=1), nz.sum(axis=0))


def _phase_grid(m: int, points: int = 1024) -> np.ndarray:
    # Sobol needs a power of two; the fixed seed keeps the sweep reproducible.
    return 2 * np.pi * qmc.Sobol(m, scramble=True, seed=7).random(points)


def is_subhyperdisk(sub: Hyperdisk, disk: Hyperdisk, atol: float = DEFAULT_TOL.algebraic) -> bool:
    """Gramian pattern test, confirmed by sweeping sample states of ``sub``."""
    if sub.dim > disk.dim:
        return False
    pat = gramian(disk, sub, atol)
    if np.any(pat.row_support != 1) or np.any(pat.col_support < 1):
        return False
    if np.any(np.abs(np.abs(pat.matrix).max(axis=1) - disk.coeffs) > atol):
        return False
    return all(contains(disk, sample_state(sub, th), atol) for th in _phase_grid(sub.dim))


def common_parent_obstruction(h0: Hyperdisk, h1: Hyperdisk, atol: float = DEFAULT_TOL.algebraic):
    """First ``(k, l)`` with ``<phi0_k|phi1_l> = 0``, scanning row-major, else ``None``.

    ``None`` certifies the two m-dimensional disks lie in no common
    (m+1)-dimensional hyperdisk.
    """
    if h0.dim != h1.dim:
        raise ValueError("hyperdisks must have the same dimension")
    if h0.dim < 2:
        raise ValueError("obstruction needs dimension m >= 2")
    if h0.ambient_dim != h1.ambient_dim:
        raise ValueError("hyperdisks live in different spaces")
    overlap = np.abs(h0.basis.conj().T @ h1.basis)
    hits = np.argwhere(overlap < atol)
    if hits.size == 0:
        return None
    return int(hits[0][0]), int(hits[0][1])


def _distinct_phases(theta, phase_tol):
    """Cluster angles on the circle; returns representative angles and labels."""
    reps, labels = [], []
    for t in theta:
        for i, r in enumerate(reps):
            if abs(np.angle(np.exp(1j * (t - r)))) < phase_tol:
                labels.append(i)
                break
        else:
            reps.append(t)
            labels.append(len(reps) - 1)
    return np.array(reps), np.array(labels)


def classify_2d_regular_subset(
    psi0,
    psi1,
    disk: Hyperdisk,
    atol: float = DEFAULT_TOL.algebraic,
    phase_tol: float = 1e-7,
) -> RegularSubsetVerdict:
    """Decide whether ``span{psi0, psi1}`` meets ``disk`` in two states or in a 2D disk.

    The relative phases ``arg<phi_j|psi1> - arg<phi_j|psi0>`` take at most two
    distinct values exactly when the intersection is a two-dimensional
    subhyperdisk; it is then built by grouping basis states by phase value.
    """
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    psi1 = np.asarray(psi1, dtype=complex).reshape(-1)
    if not (contains(disk, psi0, atol) and contains(disk, psi1, atol)):
        raise ValueError("both states must lie in the hyperdisk")
    if fidelity(psi0, psi1) > 1 - atol:
        raise ValueError("states coincide up to phase")
    amp0 = disk.basis.conj().T @ psi0
    amp1 = disk.basis.conj().T @ psi1
    theta = np.mod(np.angle(amp1) - np.angle(amp0), 2 * np.pi)
    reps, labels = _distinct_phases(theta, phase_tol)
    if reps.size == 1:
        raise ValueError("states coincide up to phase")
    if reps.size > 2:
        return RegularSubsetVerdict("TwoStates", states=(psi0, psi1), phases=theta)
    # Group 0 is the one holding basis index 0.
    vecs, coeffs = [], []
    for g in range(2):
        sel = labels == g
        part = disk.basis[:, sel] @ (disk.coeffs[sel] * np.exp(1j * np.angle(amp0[sel])))
        r = np.linalg.norm(part)
        coeffs.append(r)
        vecs.append(fix_phase(part / r, atol)[0])
    return RegularSubsetVerdict("Disk", disk=Hyperdisk(np.column_stack(vecs), np.array(coeffs)), phases=theta)


def is_schmidt_hyperdisk(disk: Hyperdisk, d_a: int, d_b: int, atol: float = DEFAULT_TOL.algebraic) -> bool:
    if disk.ambient_dim != d_a * d_b:
        raise ValueError(f"ambient dimension {disk.ambient_dim} != {d_a}*{d_b}")
    lefts, rights = [], []
    for j in range(disk.dim):
        form = schmidt_decompose(disk.basis[:, j], (d_a, d_b), atol)
        if form.rank != 1:
            return False
        lefts.append(form.left[:, 0])
        rights.append(form.right[:, 0])
    gl = np.abs(np.column_stack(lefts).conj().T @ np.column_stack(lefts))
    gr = np.abs(np.column_stack(rights).conj().T @ np.column_stack(rights))
    eye = np.eye(disk.dim)
    return bool(np.allclose(gl, eye, atol=atol, rtol=0) and np.allclose(gr, eye, atol=atol, rtol=0))
