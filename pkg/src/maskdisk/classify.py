"""Structure of maskable sets for qubit inputs and of qutrit target sets.

Both classifiers recover the target set ``T = span(V_T) cap L`` numerically
and then reason on pairs of recovered states through the commuting-product
certificate and the two-phase test for two-dimensional regular subsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import search
from .hyperdisk import (
    Hyperdisk,
    classify_2d_regular_subset,
    common_parent_obstruction,
    contains,
    hyperdisk_equal,
)
from .linalg import DEFAULT_TOL, Tolerance, fidelity, normalize, orthonormal_complement
from .masking import (
    MarginalSpec,
    MaskingMachine,
    certified_schmidt_hyperdisk,
    degeneracy_class,
    find_matching_inputs,
    legal_state_from_unitary,
    schmidt_hyperdisk_certificate,
    schmidt_hyperdisk_from_certificate,
    unitary_from_legal_state,
)


@dataclass(eq=False)
class TargetStructure:
    """Classification verdict.

    ``tag`` is one of ``TwoStates``, ``Disk(m)``, ``TypeI``, ``TypeII``,
    ``TypeIII``, ``FiniteOrthogonalSet(k)`` or ``Other``. ``disks`` and
    ``states`` are the witnesses; ``parents`` holds the Schmidt hyperdisk each
    witness disk was found in.
    """

    tag: str
    disks: list[Hyperdisk] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)
    parents: list[Hyperdisk] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def family(self) -> str:
        return self.tag.split("(")[0]


# -- qubit inputs ---------------------------------------------------------------


def classify_qubit_maskable_set(
    machine: MaskingMachine,
    *,
    seed: int = 0,
    grid_points: int = 2**10,
    starts: int = 8,
    tol: Tolerance = DEFAULT_TOL,
) -> TargetStructure:
    """Maskable set of a two-input machine: ``TwoStates`` or ``Disk(2)``.

    Witnesses live in the input space. The machine must carry its marginal
    spec, whose eigenvectors are the computational labels on both sides.
    """
    if machine.n != 2:
        raise ValueError(f"qubit classifier needs n = 2, got n = {machine.n}")
    spec = machine.marginal
    if spec is None:
        raise ValueError("machine has no marginal spec")
    if machine.dims != (spec.d, spec.d):
        raise ValueError(f"machine dims {machine.dims} do not match marginal dimension {spec.d}")
    rho_a, rho_b = machine.target_marginals
    found, devs = find_matching_inputs(
        machine, rho_a, rho_b, seed=seed, grid_points=grid_points, starts=starts, tol=tol
    )
    if len(found) < 2:
        raise ValueError("fewer than two maskable inputs found; condition 1 fails on this machine")
    # The most separated pair gives the best-conditioned phase comparison.
    gram = np.abs(np.array(found).conj() @ np.array(found).T)
    a, b = np.unravel_index(np.argmin(gram), gram.shape)
    v = machine.matrix
    us = [unitary_from_legal_state(v @ found[k], spec) for k in (a, b)]
    disk = schmidt_hyperdisk_from_certificate(us, us[0].conj().T, spec)
    psis = [legal_state_from_unitary(u, spec) for u in us]
    verdict = classify_2d_regular_subset(psis[0], psis[1], disk, atol=tol.optimization, phase_tol=1e-5)
    diag = {
        "matches": len(found),
        "max_marginal_deviation": max(devs),
        "grid_points": grid_points,
        "starts": starts,
        "seed": seed,
        "relative_phases": verdict.phases,
    }
    if verdict.kind == "TwoStates":
        diag["disks_found"] = 0
        return TargetStructure("TwoStates", states=[found[a], found[b]], parents=[disk], diagnostics=diag)
    pulled = Hyperdisk(v.conj().T @ verdict.disk.basis, verdict.disk.coeffs)
    diag["disks_found"] = 1
    return TargetStructure("Disk(2)", disks=[pulled], parents=[disk], diagnostics=diag)


# -- projections and appendix families -------------------------------------------


@dataclass(eq=False)
class ProjectionResidual:
    state: np.ndarray
    residual: np.ndarray
    norm: float


def _anchors(spec: MarginalSpec) -> np.ndarray:
    """``|00>`` and the normalized ``sqrt(l1)|11> + sqrt(l2)|22>``; columns."""
    lam = spec.eigenvalues
    a0 = np.zeros(9, dtype=complex)
    a0[0] = 1
    a1 = np.zeros(9, dtype=complex)
    a1[4], a1[8] = np.sqrt(lam[1]), np.sqrt(lam[2])
    return np.column_stack([a0, a1 / np.linalg.norm(a1)])


def projection_residual(psi, spec: MarginalSpec) -> ProjectionResidual:
    """Component of a two-qutrit state orthogonal to ``|00>`` and the balanced ``|11>,|22>`` anchor."""
    if spec.d != 3:
        raise ValueError("projection residual is defined for qutrit specs")
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != 9:
        raise ValueError("state must live in a 3 x 3 space")
    anchors = _anchors(spec)
    res = psi - anchors @ (anchors.conj().T @ psi)
    return ProjectionResidual(psi, res, float(np.linalg.norm(res)))


def collinearity_sine(a, b) -> float:
    """Sine of the angle between two nonzero complex rays."""
    a = normalize(a)
    b = normalize(b)
    return float(np.linalg.norm(b - np.vdot(a, b) * a))


def _half_angle_pair(theta, phi):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    plus = np.array([c, s * np.exp(1j * phi), 0])
    minus = np.array([s * np.exp(-1j * phi), -c, 0])
    return plus, minus


def appendix_a_disk_basis(theta0, theta1, eta, phi0, phi1, spec: MarginalSpec):
    """Basis ``(Phi_0, Phi_1)`` of the second subhyperdisk under a partially degenerate spec.

    ``Phi_0 = |phi+ psi+>`` and
    ``Phi_1 ~ sqrt(l1)|phi- psi-> + sqrt(l2) e^{i eta}|22>``.
    """
    lam = spec.eigenvalues
    l1, l2 = lam[0], lam[2]
    fp, fm = _half_angle_pair(theta0, phi0)
    gp, gm = _half_angle_pair(theta1, phi1)
    two = np.zeros(9, dtype=complex)
    two[8] = 1
    phi_0 = np.kron(fp, gp)
    phi_1 = (np.sqrt(l1) * np.kron(fm, gm) + np.sqrt(l2) * np.exp(1j * eta) * two) / np.sqrt(l1 + l2)
    return phi_0, phi_1


def _check_partial_qutrit(spec: MarginalSpec):
    if spec.degeneracies != [2, 1]:
        raise ValueError("need a qutrit spec with degeneracies (2, 1)")


def appendix_collinearity_check(params0, spec: MarginalSpec, atol: float = DEFAULT_TOL.optimization) -> bool:
    """True iff the residuals of both basis states of the second disk are collinear.

    ``params0 = (theta0, theta1, eta, phi0, phi1)``; collinearity is what keeps
    the span of both disks three-dimensional.
    """
    _check_partial_qutrit(spec)
    theta0, theta1, eta, phi0, phi1 = params0
    phi_0, phi_1 = appendix_a_disk_basis(theta0, theta1, eta, phi0, phi1, spec)
    r0 = projection_residual(phi_0, spec)
    r1 = projection_residual(phi_1, spec)
    if min(r0.norm, r1.norm) < DEFAULT_TOL.algebraic:
        raise ValueError("a basis state lies in the anchor span; parameters are degenerate")
    return bool(collinearity_sine(r0.residual, r1.residual) < atol)


@dataclass(eq=False)
class InjectivityReport:
    pairs_checked: int
    violations: list[tuple[int, int]]
    type_ii_regime: list[int]
    min_sine: float

    @property
    def passed(self) -> bool:
        return not self.violations


def _check_b_domain(sample):
    theta, nu, *phases = sample
    if not 0 < theta <= np.pi or not 0 <= nu <= np.pi:
        raise ValueError(f"need theta in (0, pi] and nu in [0, pi], got {theta}, {nu}")
    if any(not 0 <= p < 2 * np.pi for p in phases):
        raise ValueError("phases must lie in [0, 2 pi)")


def appendix_b_injectivity_probe(samples, pairs=None, atol: float = DEFAULT_TOL.optimization) -> InjectivityReport:
    """Check that distinct parameter tuples give non-collinear residuals.

    ``samples`` are ``(theta, nu, phi0, phi1, omega, eta)`` tuples. Tuples with
    ``nu = 0`` are listed under ``type_ii_regime`` and left out of the
    comparison. ``pairs`` restricts the comparison to given index pairs;
    by default every pair is compared.
    """
    from .catalog import appendix_b_state

    spec = MarginalSpec.maximally_mixed(3)
    samples = [tuple(float(x) for x in s) for s in samples]
    for s in samples:
        _check_b_domain(s)
    regime = [i for i, s in enumerate(samples) if s[1] == 0]
    res = {i: projection_residual(appendix_b_state(*s), spec).residual for i, s in enumerate(samples) if s[1] != 0}
    if pairs is None:
        keys = sorted(res)
        pairs = [(i, j) for n, i in enumerate(keys) for j in keys[n + 1 :]]
    violations, checked, min_sine = [], 0, np.inf
    for i, j in pairs:
        if i not in res or j not in res or np.allclose(samples[i], samples[j], rtol=0, atol=1e-12):
            continue
        checked += 1
        sine = collinearity_sine(res[i], res[j])
        min_sine = min(min_sine, sine)
        if sine < atol:
            violations.append((i, j))
    return InjectivityReport(checked, violations, regime, float(min_sine))


# -- qutrit target sets ------------------------------------------------------------


@dataclass(eq=False)
class _Solution:
    unitary: np.ndarray
    state: np.ndarray
    residual: float


class _TargetSearch:
    """Grid plus descent over block unitaries landing ``U (x) I |Psi_I>`` in ``span(V_T)``."""

    def __init__(self, vt, spec: MarginalSpec, tol: Tolerance):
        self.spec = spec
        self.tol = tol
        self.vt = vt
        self.chart = search.BlockUnitaryChart(spec.degeneracies)
        self.sqrt_lambda = np.sqrt(spec.eigenvalues)
        # Rounded, like the grid values below, so last-bit noise cannot steer the descent.
        self.perp = np.round(orthonormal_complement(list(vt.T), vt.shape[0]).conj().T, 14)

    def descend(self, base) -> _Solution:
        u, res = search.descend_span(self.chart, self.sqrt_lambda, self.perp, base)
        return _Solution(u, legal_state_from_unitary(u, self.spec), res)

    def perturbed(self, sol: _Solution, scale: float, rng) -> _Solution:
        kick = self.chart.unitaries(scale * rng.standard_normal(self.chart.dim))[0]
        return self.descend(sol.unitary @ kick)

    def run(self, grid_points: int, starts: int, seed: int) -> list[_Solution]:
        us = search.haar_block_unitaries(self.spec.degeneracies, grid_points, seed)
        psis = (us * self.sqrt_lambda[None, None, :]).reshape(grid_points, -1)
        vals = np.round(np.linalg.norm(psis @ self.perp.T, axis=1), 12)
        order = search.diverse_starts(psis, vals, starts)
        sols = [self.descend(us[i]) for i in order]
        sols = [s for s in sols if s.residual < self.tol.optimization]
        keep = search.dedupe([s.state for s in sols], [s.residual for s in sols])
        return [sols[i] for i in keep]

    def in_span(self, psi) -> bool:
        return float(np.linalg.norm(self.perp @ psi)) < self.tol.optimization


def _representatives(sols, overlap):
    keep = search.dedupe([s.state for s in sols], overlap=overlap)
    return [sols[i] for i in keep]


def _pair_disk(sa: _Solution, sb: _Solution, spec: MarginalSpec, tol: Tolerance):
    """2D disk through two legal states inside their common Schmidt hyperdisk, if any."""
    parent = certified_schmidt_hyperdisk([sa.unitary, sb.unitary], spec)
    verdict = classify_2d_regular_subset(sa.state, sb.state, parent, atol=tol.optimization, phase_tol=1e-5)
    if verdict.kind != "Disk":
        return None
    return verdict.disk, parent


def _is_isolated(sol: _Solution, sols, disks, searcher: _TargetSearch, rng, perturbations: int, scale: float) -> bool:
    near = [
        s for s in sols if s is not sol and 1 - 1e-4 < fidelity(s.state, sol.state) <= 1 - 1e-8
    ]
    if near:
        return False
    for _ in range(perturbations):
        s = searcher.perturbed(sol, scale, rng)
        if s.residual >= searcher.tol.optimization:
            continue
        if any(d.distance(s.state) < np.sqrt(searcher.tol.optimization) for d in disks):
            continue
        if fidelity(s.state, sol.state) < 1 - 1e-6:
            return False
    return True


def _certified_type_i(sols, spec, searcher, tol):
    if len(sols) < 2:
        return None
    cert = schmidt_hyperdisk_certificate([s.unitary for s in sols], spec, atol=tol.optimization)
    if cert.u_t is None:
        return None
    disk = schmidt_hyperdisk_from_certificate([s.unitary for s in sols], cert.u_t, spec)
    if disk.dim != 3 or not all(searcher.in_span(disk.basis[:, j]) for j in range(3)):
        return None
    if not all(contains(disk, s.state, tol.optimization) for s in sols):
        return None
    return disk


def classify_qutrit_target_set(
    vt,
    spec: MarginalSpec,
    *,
    seed: int = 0,
    grid_points: int = 2**14,
    starts: int = 160,
    pair_budget: int = 48,
    perturbations: int = 32,
    perturbation_scale: float = 0.1,
    tol: Tolerance = DEFAULT_TOL,
) -> TargetStructure:
    """Type of ``T = span(vt) cap L`` for three orthonormal two-qutrit states ``vt`` (columns or list)."""
    vt = np.asarray(vt, dtype=complex)
    if vt.ndim == 2 and vt.shape == (3, 9):
        vt = vt.T
    if vt.shape != (9, 3):
        raise ValueError(f"need three states of a 3 x 3 space, got shape {vt.shape}")
    if not np.allclose(vt.conj().T @ vt, np.eye(3), atol=tol.algebraic, rtol=0):
        raise ValueError("target-space states must be orthonormal")
    if spec.d != 3:
        raise ValueError("spec must have d = 3")
    searcher = _TargetSearch(vt, spec, tol)
    sols = searcher.run(grid_points, starts, seed)
    diag = {
        "solutions": len(sols),
        "grid_points": grid_points,
        "starts": starts,
        "seed": seed,
        "max_span_residual": max((s.residual for s in sols), default=0.0),
        "degeneracy": degeneracy_class(spec).tag.value,
    }
    if not sols:
        diag["disks_found"] = 0
        return TargetStructure("Other", diagnostics=diag)

    type_i = _certified_type_i(sols, spec, searcher, tol)
    if type_i is not None:
        diag["disks_found"] = 1
        return TargetStructure("TypeI", disks=[type_i], parents=[type_i], diagnostics=diag)

    reps = _representatives(sols, 0.999)[:pair_budget]
    member = np.sqrt(tol.optimization)
    disks, parents = [], []
    for i, sa in enumerate(reps):
        if any(d.distance(sa.state) < member for d in disks):
            continue
        for sb in reps[i + 1 :]:
            if fidelity(sa.state, sb.state) > 0.99:
                continue
            hit = _pair_disk(sa, sb, spec, tol)
            if hit is None:
                continue
            disk, parent = hit
            probe = disk.samples(8, np.random.default_rng(seed))
            if not all(searcher.in_span(p) for p in probe):
                continue
            if not any(hyperdisk_equal(disk, d, atol=member) for d in disks):
                disks.append(disk)
                parents.append(parent)
            break
    loose = [s for s in sols if all(d.distance(s.state) >= member for d in disks)]
    clusters = _representatives(loose, 1 - 1e-4)
    rng = np.random.default_rng(seed)
    isolated = [
        s for s in clusters if _is_isolated(s, loose, disks, searcher, rng, perturbations, perturbation_scale)
    ]
    diag["disks_found"] = len(disks)
    diag["isolated_states"] = len(isolated)
    diag["loose_clusters"] = len(clusters)
    states = [s.state for s in isolated]
    all_isolated = len(isolated) == len(clusters)

    if len(disks) == 2 and not clusters:
        tag = "TypeII"
    elif len(disks) == 1 and len(clusters) == 1 and all_isolated:
        tag = "TypeIII"
    elif not disks and clusters and all_isolated and _mutually_orthogonal(states, tol.optimization):
        tag = f"FiniteOrthogonalSet({len(states)})"
    else:
        tag = "Other"
    if tag == "TypeII":
        diag["obstruction"] = common_parent_obstruction(disks[0], disks[1], atol=tol.optimization)
    return TargetStructure(tag, disks=disks, states=states, parents=parents, diagnostics=diag)


def _mutually_orthogonal(states, atol) -> bool:
    gram = np.abs(np.array(states).conj() @ np.array(states).T)
    return bool(np.allclose(gram, np.eye(len(states)), atol=atol, rtol=0))


def pull_back(structure: TargetStructure, machine: MaskingMachine) -> TargetStructure:
    """Map target-space witnesses into the input space of ``machine``."""
    v = machine.matrix
    disks = [Hyperdisk(v.conj().T @ d.basis, d.coeffs) for d in structure.disks]
    states = [v.conj().T @ s for s in structure.states]
    return TargetStructure(structure.tag, disks, states, structure.parents, dict(structure.diagnostics))


__all__ = [
    "InjectivityReport",
    "ProjectionResidual",
    "TargetStructure",
    "appendix_a_disk_basis",
    "appendix_b_injectivity_probe",
    "appendix_collinearity_check",
    "classify_qubit_maskable_set",
    "classify_qutrit_target_set",
    "collinearity_sine",
    "projection_residual",
    "pull_back",
]
