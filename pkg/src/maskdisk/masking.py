"""Masking machines, marginal specifications and the legal set they fix."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import search
from .hyperdisk import Hyperdisk, SchmidtHyperdisk, contains, sample_state
from .linalg import (
    DEFAULT_TOL,
    PureState,
    Tolerance,
    is_isometry,
    is_unitary,
    marginals,
    nearest_unitary,
    phase_distance,
)


@dataclass(frozen=True)
class MarginalSpec:
    """Spectrum of the common marginal as ``((lambda_j, g_j), ...)``.

    Eigenvector ``|j, k>`` is the computational basis state at offset
    ``sum_{i<j} g_i + k``, blocks taken in declaration order.
    """

    blocks: tuple[tuple[float, int], ...]

    def __post_init__(self):
        blocks = tuple((float(lam), int(g)) for lam, g in self.blocks)
        if not blocks:
            raise ValueError("marginal spec needs at least one block")
        lams = [lam for lam, _ in blocks]
        if any(g < 1 for _, g in blocks) or any(lam <= 0 for lam in lams):
            raise ValueError("eigenvalues must be positive and degeneracies >= 1")
        gaps = np.abs(np.subtract.outer(lams, lams)) + np.eye(len(lams))
        if np.any(gaps < DEFAULT_TOL.algebraic):
            raise ValueError("block eigenvalues must be distinct; merge equal ones into one block")
        if abs(sum(lam * g for lam, g in blocks) - 1) > DEFAULT_TOL.algebraic:
            raise ValueError("sum of lambda_j * g_j must be 1")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_eigenvalues(cls, *lams):
        return cls(tuple((lam, 1) for lam in lams))

    @classmethod
    def maximally_mixed(cls, d: int):
        return cls(((1.0 / d, d),))

    @property
    def d(self) -> int:
        return sum(g for _, g in self.blocks)

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def degeneracies(self) -> list[int]:
        return [g for _, g in self.blocks]

    @property
    def eigenvalues(self) -> np.ndarray:
        """Per basis state, length ``d``."""
        return np.concatenate([np.full(g, lam) for lam, g in self.blocks])

    def density_matrix(self) -> np.ndarray:
        return np.diag(self.eigenvalues).astype(complex)

    def block_slices(self) -> list[slice]:
        out, off = [], 0
        for g in self.degeneracies:
            out.append(slice(off, off + g))
            off += g
        return out


class Degeneracy(enum.Enum):
    NONDEGENERATE = "Nondegenerate"
    COMPLETELY_DEGENERATE = "CompletelyDegenerate"
    PARTIAL = "Partial"


@dataclass(frozen=True)
class DegeneracyClass:
    tag: Degeneracy
    degeneracies: tuple[int, ...]


def degeneracy_class(spec: MarginalSpec) -> DegeneracyClass:
    if spec.t == 1 and spec.d > 1:
        tag = Degeneracy.COMPLETELY_DEGENERATE
    elif all(g == 1 for g in spec.degeneracies):
        tag = Degeneracy.NONDEGENERATE
    else:
        tag = Degeneracy.PARTIAL
    return DegeneracyClass(tag, tuple(spec.degeneracies))


def dimension_bound(spec: MarginalSpec) -> int:
    """Largest input dimension a machine with this marginal spec can have."""
    return sum(g * g for g in spec.degeneracies)


@dataclass(frozen=True, eq=False)
class LegalSetSpec:
    """All purifications ``U (x) I |Psi_I>`` of the marginal pair, U block-diagonal."""

    marginal: MarginalSpec

    @property
    def dims(self) -> tuple[int, int]:
        return (self.marginal.d, self.marginal.d)

    @property
    def anchor(self) -> np.ndarray:
        """``|Psi_I> = sum_j sqrt(lambda_j) sum_k |j,k>|j,k>``."""
        return np.diag(np.sqrt(self.marginal.eigenvalues)).astype(complex).reshape(-1)


def block_diagonal(blocks, spec: MarginalSpec, atol: float = DEFAULT_TOL.algebraic) -> np.ndarray:
    blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
    if [b.shape for b in blocks] != [(g, g) for g in spec.degeneracies]:
        raise ValueError(f"block shapes {[b.shape for b in blocks]} do not match degeneracies {spec.degeneracies}")
    if not all(is_unitary(b, atol) for b in blocks):
        raise ValueError("every block must be unitary")
    return scipy.linalg.block_diag(*blocks)


def is_block_diagonal(u, spec: MarginalSpec, atol: float = DEFAULT_TOL.algebraic) -> bool:
    mask = np.ones(u.shape, dtype=bool)
    for sl in spec.block_slices():
        mask[sl, sl] = False
    return bool(np.all(np.abs(u[mask]) < atol))


def legal_state_from_unitary(u, spec: MarginalSpec) -> np.ndarray:
    return (np.asarray(u) * np.sqrt(spec.eigenvalues)[None, :]).reshape(-1)


def legal_state(legal: LegalSetSpec, blocks, atol: float = DEFAULT_TOL.algebraic) -> PureState:
    u = block_diagonal(blocks, legal.marginal, atol)
    return PureState(legal_state_from_unitary(u, legal.marginal), legal.dims)


def unitary_from_legal_state(psi, spec: MarginalSpec, atol: float = DEFAULT_TOL.optimization) -> np.ndarray:
    """Recover the block-diagonal U with ``psi = U (x) I |Psi_I>``.

    The raw solve is projected to the nearest block-diagonal unitary; a
    state that is not legal within ``atol`` is rejected.
    """
    d = spec.d
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != d * d:
        raise ValueError(f"legal states of this spec live in dimension {d * d}")
    raw = psi.reshape(d, d) / np.sqrt(spec.eigenvalues)[None, :]
    u = np.zeros_like(raw)
    for sl in spec.block_slices():
        u[sl, sl] = nearest_unitary(raw[sl, sl])
    if np.linalg.norm(raw - u) > atol * 10 / np.sqrt(spec.eigenvalues.min()):
        raise ValueError("state is not in the legal set of this marginal spec")
    return u


def nondegenerate_legal_disk(spec: MarginalSpec) -> SchmidtHyperdisk:
    """The legal set of a nondegenerate spec: the Schmidt disk over ``|jj>``."""
    if degeneracy_class(spec).tag is not Degeneracy.NONDEGENERATE:
        raise ValueError("spec is degenerate")
    eye = np.eye(spec.d, dtype=complex)
    return SchmidtHyperdisk.from_factors(eye, eye, np.sqrt(spec.eigenvalues))


@dataclass(frozen=True, eq=False)
class MaskingMachine:
    """Isometry ``H_R -> H_A (x) H_B`` stored as a ``dA*dB x n`` matrix."""

    matrix: np.ndarray
    dims: tuple[int, int]
    marginal: MarginalSpec | None = None

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim == 1:
            mat = mat[:, None]
        dims = (int(self.dims[0]), int(self.dims[1]))
        if mat.shape[0] != dims[0] * dims[1]:
            raise ValueError(f"matrix has {mat.shape[0]} rows, dims {dims} need {dims[0] * dims[1]}")
        if not is_isometry(mat):
            raise ValueError("masking machine must be an isometry")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @property
    def target_marginals(self):
        if self.marginal is None:
            return None
        rho = self.marginal.density_matrix()
        return rho, rho


def mask(machine: MaskingMachine, psi) -> PureState:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != machine.n:
        raise ValueError(f"input has dimension {psi.size}, machine expects {machine.n}")
    return PureState(machine.matrix @ psi, machine.dims)


def marginals_of(state, dims=None) -> tuple[np.ndarray, np.ndarray]:
    """``(Tr_B, Tr_A)`` of a bipartite pure state."""
    return marginals(state, dims)


@dataclass(eq=False)
class MaskableSet:
    """Finite description of a claimed set of maskable states: disks plus single states."""

    disks: list[Hyperdisk] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)

    def distance(self, psi) -> float:
        dists = [h.distance(psi) for h in self.disks] + [phase_distance(s, psi) for s in self.states]
        return min(dists) if dists else np.inf

    def contains(self, psi, atol: float = DEFAULT_TOL.algebraic) -> bool:
        return any(contains(h, psi, atol) for h in self.disks) or any(phase_distance(s, psi) < atol for s in self.states)

    def samples(self, per_disk: int, rng: np.random.Generator) -> list[np.ndarray]:
        out = [np.asarray(s, dtype=complex) for s in self.states]
        for h in self.disks:
            out.extend(h.samples(per_disk, rng))
        return out


@dataclass(eq=False)
class Condition1Report:
    passed: bool
    rho_a: np.ndarray
    rho_b: np.ndarray
    max_deviation: float
    samples: int


def verify_condition1(machine: MaskingMachine, samples, tol: Tolerance = DEFAULT_TOL) -> Condition1Report:
    """All masked samples share both marginals (max pairwise Frobenius deviation)."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    pairs = [marginals_of(mask(machine, s)) for s in samples]
    ra = np.array([p[0] for p in pairs])
    rb = np.array([p[1] for p in pairs])
    dev = 0.0
    for stack in (ra, rb):
        diff = stack[:, None] - stack[None, :]
        dev = max(dev, float(np.linalg.norm(diff, axis=(2, 3)).max()))
    return Condition1Report(dev < tol.algebraic, ra.mean(axis=0), rb.mean(axis=0), dev, len(samples))


@dataclass(eq=False)
class Condition2Report:
    passed: bool
    matches: list[np.ndarray]
    counterexamples: list[np.ndarray]
    max_match_deviation: float
    membership_tol: float
    grid_points: int
    starts: int
    seed: int
    rho_a: np.ndarray | None = None
    rho_b: np.ndarray | None = None


def find_matching_inputs(
    machine: MaskingMachine,
    rho_a,
    rho_b,
    *,
    seed: int = 0,
    grid_points: int = 2**13,
    starts: int = 64,
    tol: Tolerance = DEFAULT_TOL,
):
    """Inputs whose masked marginals equal ``(rho_a, rho_b)``, found by grid plus descent.

    Returns ``(states, deviations)`` of the distinct converged matches.
    """
    v = machine.matrix
    if machine.n == 1:
        psi = np.ones(1, dtype=complex)
        dev = float(search.marginal_deviation(v, machine.dims, psi[None], rho_a, rho_b)[0])
        return ([psi], [dev]) if dev < tol.optimization else ([], [])
    # Rounding targets and grid values keeps last-bit BLAS noise from steering the
    # descent, which would otherwise land on a different point of a continuum.
    rho_a, rho_b = np.round(rho_a, 13), np.round(rho_b, 13)
    pts = search.sphere_points(machine.n, grid_points, seed)
    vals = np.round(search.marginal_deviation(v, machine.dims, pts, rho_a, rho_b), 12)
    found, devs = [], []
    for i in search.diverse_starts(pts, vals, starts):
        psi, dev = search.descend_marginals(v, machine.dims, pts[i], rho_a, rho_b)
        if dev < tol.optimization:
            found.append(psi)
            devs.append(dev)
    keep = search.dedupe(found, devs)
    return [found[i] for i in keep], [devs[i] for i in keep]


def verify_condition2(
    machine: MaskingMachine,
    claimed: MaskableSet,
    *,
    seed: int = 0,
    grid_points: int = 2**13,
    starts: int = 64,
    samples_per_disk: int = 16,
    tol: Tolerance = DEFAULT_TOL,
) -> Condition2Report:
    """Search the input space for marginal matches lying outside ``claimed``.

    Matches are accepted at the optimization tolerance; membership in the
    claimed set is judged by phase-insensitive distance below
    ``sqrt(tol.optimization)``. Passing is evidence, not proof: the search is
    a seeded grid of ``grid_points`` rays refined by ``starts`` local descents.
    """
    rng = np.random.default_rng(seed)
    c1 = verify_condition1(machine, claimed.samples(samples_per_disk, rng), tol)
    if not c1.passed:
        raise ValueError("condition 1 fails on the claimed set")
    found, devs = find_matching_inputs(
        machine, c1.rho_a, c1.rho_b, seed=seed, grid_points=grid_points, starts=starts, tol=tol
    )
    member_tol = float(np.sqrt(tol.optimization))
    outside = [psi for psi in found if claimed.distance(psi) > member_tol]
    return Condition2Report(
        passed=not outside,
        matches=found,
        counterexamples=outside,
        max_match_deviation=max(devs, default=0.0),
        membership_tol=member_tol,
        grid_points=grid_points if machine.n > 1 else 1,
        starts=starts if machine.n > 1 else 0,
        seed=seed,
        rho_a=c1.rho_a,
        rho_b=c1.rho_b,
    )


# -- Schmidt hyperdisk certificates ---------------------------------------------


@dataclass(eq=False)
class SchmidtCertificate:
    """Result of the commuting-product test on a family of block unitaries.

    ``status`` is ``"certified"`` (``u_t`` makes every ``U_a u_t`` commute)
    or ``"certified_absent"``: when ``U_0^dagger`` fails, no block-diagonal
    choice can succeed, since any working ``U_T`` equals ``U_0^dagger W``
    with ``W`` commuting with every ``U_a U_0^dagger``.
    """

    status: str
    u_t: np.ndarray | None
    max_commutator: float
    candidate_index: int | None


def _check_family(unitaries, spec, atol):
    us = [np.asarray(u, dtype=complex) for u in unitaries]
    if len(us) < 2:
        raise ValueError("need at least two unitaries")
    for u in us:
        if u.shape != (spec.d, spec.d) or not is_unitary(u, atol):
            raise ValueError("every member must be a d x d unitary")
        if not is_block_diagonal(u, spec, atol):
            raise ValueError("unitary is not block-diagonal for this spec")
    return us


def max_pairwise_commutator(mats) -> float:
    """Largest Frobenius norm of ``[A_a, A_b]`` over a stack of square matrices."""
    mats = np.asarray(mats, dtype=complex)
    prod = np.einsum("aij,bjk->abik", mats, mats)
    comm = prod - prod.transpose(1, 0, 2, 3)
    return float(np.linalg.norm(comm, axis=(2, 3)).max())


def schmidt_hyperdisk_certificate(unitaries, spec: MarginalSpec, atol: float = DEFAULT_TOL.algebraic) -> SchmidtCertificate:
    """Test ``U_T = U_0^dagger``; no other candidate needs trying (see :class:`SchmidtCertificate`)."""
    us = _check_family(unitaries, spec, atol)
    u_t = us[0].conj().T
    worst = max_pairwise_commutator([u @ u_t for u in us])
    if worst < atol:
        return SchmidtCertificate("certified", u_t, worst, 0)
    return SchmidtCertificate("certified_absent", None, worst, None)


def schmidt_hyperdisk_criterion(unitaries, spec: MarginalSpec, atol: float = DEFAULT_TOL.algebraic):
    """Block-diagonal ``U_T`` making all ``U_a U_T`` commute, or ``None``."""
    return schmidt_hyperdisk_certificate(unitaries, spec, atol).u_t


def _joint_eigenbasis(mats, seed: int = 11):
    """Columns diagonalizing a commuting family of normal matrices."""
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
    combo = sum(w * m for w, m in zip(weights, mats))
    _, z = scipy.linalg.schur(combo, output="complex")
    return z


def schmidt_hyperdisk_from_certificate(unitaries, u_t, spec: MarginalSpec) -> SchmidtHyperdisk:
    """Schmidt hyperdisk holding every ``U_a (x) I |Psi_I>``, built from a joint eigenbasis.

    Basis states are ``|psi_jk> (x) (U_T |psi_jk>)^*`` with ``psi_jk`` a joint
    eigenvector of ``{U_a U_T}`` inside block ``j``.
    """
    u_t = np.asarray(u_t, dtype=complex)
    prods = [np.asarray(u) @ u_t for u in unitaries]
    d = spec.d
    left = np.zeros((d, d), dtype=complex)
    for sl in spec.block_slices():
        left[sl, sl] = _joint_eigenbasis([p[sl, sl] for p in prods])
    right = (u_t @ left).conj()
    return SchmidtHyperdisk.from_factors(left, right, np.sqrt(spec.eigenvalues))


def certified_schmidt_hyperdisk(unitaries, spec: MarginalSpec, atol: float = DEFAULT_TOL.algebraic):
    """Schmidt hyperdisk containing the family's legal states, or ``None`` if none exists."""
    cert = schmidt_hyperdisk_certificate(unitaries, spec, atol)
    if cert.u_t is None:
        return None
    return schmidt_hyperdisk_from_certificate(unitaries, cert.u_t, spec)


def disk_phases(disk: Hyperdisk, state) -> np.ndarray:
    amps = disk.basis.conj().T @ np.asarray(state)
    return np.angle(amps)


def disk_state_check(disk: Hyperdisk, states, atol: float) -> bool:
    return all(contains(disk, s, atol) for s in states)


__all__ = [
    "Condition1Report",
    "Condition2Report",
    "Degeneracy",
    "DegeneracyClass",
    "LegalSetSpec",
    "MarginalSpec",
    "MaskableSet",
    "MaskingMachine",
    "SchmidtCertificate",
    "block_diagonal",
    "certified_schmidt_hyperdisk",
    "degeneracy_class",
    "dimension_bound",
    "find_matching_inputs",
    "is_block_diagonal",
    "legal_state",
    "legal_state_from_unitary",
    "marginals_of",
    "mask",
    "nondegenerate_legal_disk",
    "sample_state",
    "max_pairwise_commutator",
    "schmidt_hyperdisk_certificate",
    "schmidt_hyperdisk_criterion",
    "schmidt_hyperdisk_from_certificate",
    "unitary_from_legal_state",
    "verify_condition1",
    "verify_condition2",
]
