"""Acceptance criteria, one test (or group) per criterion.

Each criterion prints a PASS/FAIL line in the terminal summary. Run with
``pytest tests/test_acceptance.py -v``.
"""

import io
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from maskdisk import catalog
from maskdisk.classify import (
    appendix_b_injectivity_probe,
    appendix_collinearity_check,
    classify_qubit_maskable_set,
    classify_qutrit_target_set,
)
from maskdisk.cli import main
from maskdisk.hyperdisk import Hyperdisk, classify_2d_regular_subset, common_parent_obstruction, contains, is_subhyperdisk, sample_state
from maskdisk.linalg import orthonormalize, random_unitary
from maskdisk.masking import (
    MarginalSpec,
    MaskableSet,
    MaskingMachine,
    block_diagonal,
    certified_schmidt_hyperdisk,
    legal_state_from_unitary,
    max_pairwise_commutator,
    schmidt_hyperdisk_certificate,
    verify_condition1,
    verify_condition2,
)
from oracles import marginal_pair, regular_subset_brute_force

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
ND_RHO = np.diag([0.1, 0.2, 0.3, 0.4])

C1 = "n=3, d=4 example: common marginals diag(.1,.2,.3,.4); condition 2 with the claimed disks"
C2 = "B0/B1 obstruction is empty, every cross overlap above 1e-3"
C3 = "completely degenerate continuum: 100 disks at I/2, 50 pulled-back pairs without common parent"
C4 = "200 random two-input machines give only TwoStates or Disk(2); both qubit fixtures reproduce"
C5 = "qutrit anchors TypeI, TypeII, FiniteOrthogonalSet(3), Other within 10 minutes"
C6 = "second-disk collinearity true exactly on theta0=theta1, eta=0 over a 20^3 grid"
C7 = "legal-state family: nu=0 is TypeII, nu in (0,pi] is TypeIII, 500 injectivity pairs clean"
C8 = "two-state regular subset agrees with dense-grid brute force at m=3,4,5"
C9 = "pair certificate U_T = U_0^dagger on 100 random unitary pairs"
C10 = "repeated CLI runs are byte-identical"


# -- 1 -------------------------------------------------------------------------------


def test_criterion_1_marginals_and_three_disk_claim(criterion):
    with criterion(1, C1):
        ex = catalog.build("nd_n3_d4")
        rng = np.random.default_rng(101)
        b0, b1 = catalog.nd_input_disks()[:2]
        samples = b0.samples(50, rng) + b1.samples(50, rng)
        for psi in samples:
            ra, rb = marginal_pair(ex.machine.matrix @ psi, 4, 4)
            assert np.linalg.norm(ra - ND_RHO) < 1e-9 and np.linalg.norm(rb - ND_RHO) < 1e-9
        assert verify_condition1(ex.machine, samples).passed
        assert verify_condition2(ex.machine, ex.claimed, seed=0).passed
        for drop in range(3):
            kept = [d for k, d in enumerate(ex.claimed.disks) if k != drop]
            report = verify_condition2(ex.machine, MaskableSet(kept), seed=0)
            assert not report.passed and report.counterexamples


@pytest.mark.xfail(strict=True, reason="the printed two-disk claim misses a third maskable disk")
def test_criterion_1_printed_two_disk_claim_passes(criterion):
    with criterion(1, C1):
        ex = catalog.build("nd_n3_d4")
        claim = catalog.nd_printed_claim()
        for drop in range(2):
            assert not verify_condition2(ex.machine, MaskableSet([claim.disks[1 - drop]]), seed=0).passed
        assert verify_condition2(ex.machine, claim, seed=0).passed


# -- 2 -------------------------------------------------------------------------------


def test_criterion_2_obstruction(criterion):
    with criterion(2, C2):
        b0, b1 = catalog.nd_input_disks()[:2]
        assert common_parent_obstruction(b0, b1) is None
        cross = np.abs(b0.basis.conj().T @ b1.basis)
        assert cross.shape == (2, 2) and cross.min() > 1e-3


# -- 3 -------------------------------------------------------------------------------


def test_criterion_3_continuum(criterion):
    with criterion(3, C3):
        rng = np.random.default_rng(103)
        for _ in range(100):
            xi, eta, theta = rng.uniform(0, 2 * np.pi, 3)
            psi = catalog.cd_target_disk(xi, eta).state([0, theta])
            ra, rb = marginal_pair(psi, 2, 2)
            assert np.linalg.norm(ra - np.eye(2) / 2) < 1e-9 and np.linalg.norm(rb - np.eye(2) / 2) < 1e-9
        assert catalog.family_marginal_check("cd_n3_d2", samples=100, seed=3).passed
        for _ in range(50):
            h0 = catalog.cd_input_disk(*rng.uniform(0, 2 * np.pi, 2))
            h1 = catalog.cd_input_disk(*rng.uniform(0, 2 * np.pi, 2))
            assert common_parent_obstruction(h0, h1, atol=1e-9) is None


# -- 4 -------------------------------------------------------------------------------


QUBIT_SPECS = [
    MarginalSpec.from_eigenvalues(0.7, 0.3),
    MarginalSpec.maximally_mixed(2),
    MarginalSpec.from_eigenvalues(0.5, 0.3, 0.2),
    MarginalSpec(((0.35, 2), (0.3, 1))),
    MarginalSpec.maximally_mixed(3),
    MarginalSpec.from_eigenvalues(0.4, 0.3, 0.2, 0.1),
]


def _block_unitary(spec, rng):
    return block_diagonal([random_unitary(g, rng) for g in spec.degeneracies], spec)


def test_criterion_4_two_input_machines(criterion):
    with criterion(4, C4):
        rng = np.random.default_rng(104)
        tags = set()
        for k in range(200):
            spec = QUBIT_SPECS[k % len(QUBIT_SPECS)]
            u0 = _block_unitary(spec, rng)
            if k % 2:
                # a two-valued relative phase pattern
                ph = np.where(rng.permutation(np.arange(spec.d) % 2) == 0, 0.0, rng.uniform(0.5, 5.8))
                u1 = u0 @ np.diag(np.exp(1j * ph))
            else:
                u1 = _block_unitary(spec, rng)
            cols = orthonormalize([legal_state_from_unitary(u0, spec), legal_state_from_unitary(u1, spec)])
            result = classify_qubit_maskable_set(MaskingMachine(cols, (spec.d, spec.d), spec), seed=k)
            tags.add(result.tag)
            # two Schmidt terms allow at most two phase values
            expected = "Disk(2)" if k % 2 or spec.d == 2 else "TwoStates"
            assert result.tag == expected
        assert tags == {"TwoStates", "Disk(2)"}
        bell = classify_qubit_maskable_set(catalog.build("qubit_bell_pair").machine, seed=0)
        omega = classify_qubit_maskable_set(catalog.build("qubit_omega_phase").machine, seed=0)
        assert bell.tag == "Disk(2)" and omega.tag == "TwoStates"


# -- 5 -------------------------------------------------------------------------------


def test_criterion_5_qutrit_anchors(criterion):
    with criterion(5, C5):
        start = time.perf_counter()
        tags = {}
        for eid in ("type_i", "type_ii", "bell_triple", "partial_no_disk"):
            ex = catalog.build(eid)
            tags[eid] = classify_qutrit_target_set(ex.machine.matrix, ex.spec, seed=0)
        assert tags["type_i"].tag == "TypeI"
        t2 = tags["type_ii"]
        assert t2.tag == "TypeII" and common_parent_obstruction(*t2.disks, atol=1e-6) is None
        assert all(is_subhyperdisk(d, p, atol=1e-6) for d, p in zip(t2.disks, t2.parents))
        assert tags["bell_triple"].tag == "FiniteOrthogonalSet(3)"
        other = tags["partial_no_disk"]
        assert other.tag == "Other" and other.diagnostics["disks_found"] == 0
        assert other.diagnostics["grid_points"] == 2**14
        assert time.perf_counter() - start < 600


# -- 6 -------------------------------------------------------------------------------


def test_criterion_6_collinearity_grid(criterion):
    with criterion(6, C6):
        spec = catalog.partial_spec()
        thetas = (np.arange(20) + 0.5) * np.pi / 20
        etas = np.linspace(0, 2 * np.pi, 20, endpoint=False)
        hits = []
        for i, t0 in enumerate(thetas):
            for j, t1 in enumerate(thetas):
                for k, eta in enumerate(etas):
                    if appendix_collinearity_check((t0, t1, eta, 0.3, 1.2), spec):
                        hits.append((i, j, k))
        assert hits == [(i, i, 0) for i in range(20)]


# -- 7 -------------------------------------------------------------------------------


def _b_params(rng, nu):
    theta = np.pi - rng.uniform(0, np.pi)
    phi0, phi1, omega, eta = rng.uniform(0, 2 * np.pi, 4)
    return dict(theta=theta, nu=nu, phi0=phi0, phi1=phi1, omega=omega, eta=eta)


@pytest.mark.parametrize("nu,tag", [(0.0, "TypeII"), (0.7, "TypeIII"), (1.9, "TypeIII"), (np.pi, "TypeIII")])
def test_criterion_7_regimes(criterion, nu, tag):
    with criterion(7, C7):
        ex = catalog.build("appendix_b_family", **_b_params(np.random.default_rng(107), nu))
        assert ex.expected == tag
        assert classify_qutrit_target_set(ex.machine.matrix, ex.spec, seed=0).tag == tag


def test_criterion_7_injectivity(criterion):
    with criterion(7, C7):
        rng = np.random.default_rng(117)
        samples = []
        for _ in range(1000):
            p = _b_params(rng, rng.uniform(0, np.pi))
            samples.append(tuple(p[k] for k in ("theta", "nu", "phi0", "phi1", "omega", "eta")))
        rep = appendix_b_injectivity_probe(samples, pairs=[(2 * i, 2 * i + 1) for i in range(500)])
        assert rep.pairs_checked == 500 and rep.violations == []


# -- 8 -------------------------------------------------------------------------------


@pytest.mark.parametrize("m", [3, 4, 5])
def test_criterion_8_phase_grouping_oracle(criterion, m):
    with criterion(8, C8):
        rng = np.random.default_rng(800 + m)
        kinds = []
        for k in range(50):
            basis = random_unitary(m + 1, rng)[:, :m]
            r = rng.uniform(0.2, 1.0, m)
            disk = Hyperdisk(basis, r / np.linalg.norm(r))
            t0 = rng.uniform(0, 2 * np.pi, m)
            if k % 2:
                delta = np.where(rng.permutation(np.arange(m) % 2) == 0, 0.0, rng.uniform(0.5, 5.5))
            else:
                delta = rng.uniform(0, 2 * np.pi, m)
            psi0, psi1 = sample_state(disk, t0), sample_state(disk, t0 + delta)
            verdict = classify_2d_regular_subset(psi0, psi1, disk)
            kind, _ = regular_subset_brute_force(psi0, psi1, disk.basis, disk.coeffs)
            assert verdict.kind == kind
            kinds.append(kind)
        assert set(kinds) == {"Disk", "TwoStates"}


# -- 9 -------------------------------------------------------------------------------


PAIR_SPECS = [
    MarginalSpec.maximally_mixed(2),
    MarginalSpec.maximally_mixed(3),
    MarginalSpec(((0.35, 2), (0.3, 1))),
    MarginalSpec(((0.3, 2), (0.2, 2))),
    MarginalSpec.from_eigenvalues(0.5, 0.3, 0.2),
]


def test_criterion_9_pair_certificate(criterion):
    with criterion(9, C9):
        rng = np.random.default_rng(109)
        for k in range(100):
            spec = PAIR_SPECS[k % len(PAIR_SPECS)]
            us = [_block_unitary(spec, rng) for _ in range(2)]
            cert = schmidt_hyperdisk_certificate(us, spec)
            assert cert.status == "certified"
            assert np.allclose(cert.u_t, us[0].conj().T)
            assert max_pairwise_commutator([u @ cert.u_t for u in us]) < 1e-9
            disk = certified_schmidt_hyperdisk(us, spec)
            for u in us:
                assert contains(disk, legal_state_from_unitary(u, spec), 1e-9)


# -- 10 ------------------------------------------------------------------------------


def _run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_criterion_10_determinism(criterion):
    with criterion(10, C10):
        f = lambda name: str(FIXTURES / name)  # noqa: E731
        commands = [
            ["verify", f("nd_n3_d4.json"), f("nd_n3_d4.printed.claimed.json"), "--seed", "5"],
            ["classify", f("type_iii.subspace.json"), f("type_iii.spec.json"), "--mode", "qutrit", "--seed", "5"],
            ["classify", f("qubit_bell_pair.subspace.json"), f("qubit_bell_pair.spec.json"), "--mode", "qubit", "--seed", "5"],
            ["example", "cd_n3_d2", "--seed", "5"],
        ]
        for argv in commands:
            first, second = _run(argv), _run(argv)
            assert first == second and first[1]
        # and across separate processes
        argv = commands[2]
        outs = [
            subprocess.run([sys.executable, "-m", "maskdisk.cli", *argv], capture_output=True, check=False).stdout
            for _ in range(2)
        ]
        assert outs[0] == outs[1] == _run(argv)[1].encode()
