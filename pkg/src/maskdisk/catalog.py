"""Worked masking examples and parametrized families.

``build(id)`` returns an :class:`Example`; ``family_state(id, **params)``
evaluates a family member. Printed unnormalized kets are stored normalized,
with the normalization constant kept in ``Example.normalization``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hyperdisk import Hyperdisk, SchmidtHyperdisk
from .linalg import DEFAULT_TOL, generalized_pauli, normalize, orthonormalize, product_ket
from .masking import (
    MarginalSpec,
    MaskableSet,
    MaskingMachine,
    mask,
    marginals_of,
)

EXAMPLE_IDS = (
    "nd_n3_d4",
    "cd_n3_d2",
    "bell_triple",
    "partial_no_disk",
    "type_i",
    "type_ii",
    "type_iii",
    "appendix_a_family",
    "appendix_b_family",
    "qubit_bell_pair",
    "qubit_omega_phase",
)

DESCRIPTIONS = {
    "nd_n3_d4": "nondegenerate machine, n=3, d=4; maskable set is three 2D disks, pairwise without a common 3D parent",
    "cd_n3_d2": "maximally mixed marginals, n=3, d=2; maskable set is a continuum of 2D disks",
    "bell_triple": "three generalized Bell states at d=3; target set is three orthogonal states",
    "partial_no_disk": "spectrum (l1, l1, l2); target set is a one-parameter curve with no 2D disk",
    "type_i": "nondegenerate spectrum (.5, .3, .2) with the full Schmidt span; target set is a 3D Schmidt disk",
    "type_ii": "spectrum (.35, .35, .3); target set is two 2D disks on different Schmidt disks",
    "type_iii": "maximally mixed d=3; target set is one 2D disk plus one isolated state",
    "appendix_a_family": "second-disk family under spectrum (l1, l1, l2), parameters theta, phi0, phi1",
    "appendix_b_family": "legal-state family under maximally mixed d=3, parameters theta, nu, phi0, phi1, omega, eta",
    "qubit_bell_pair": "two-input machine onto two Bell states; maskable set is a 2D disk",
    "qubit_omega_phase": "two-input machine onto Phi_I and Z (x) I Phi_I at d=3; maskable set is two states",
}

LAMBDA_1, LAMBDA_2 = 0.35, 0.3


@dataclass(eq=False)
class Example:
    id: str
    machine: MaskingMachine
    expected: str
    claimed: MaskableSet | None = None
    params: dict = field(default_factory=dict)
    normalization: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def spec(self) -> MarginalSpec:
        return self.machine.marginal

    @property
    def mode(self) -> str:
        return "qubit" if self.machine.n == 2 else "qutrit" if self.machine.dims == (3, 3) else "verify"


def _kets(d, pairs_coeffs):
    vec = np.zeros(d * d, dtype=complex)
    for (a, b), c in pairs_coeffs:
        vec += c * product_ket(a, b, d)
    return vec


def partial_spec(lam1: float = LAMBDA_1, lam2: float | None = None) -> MarginalSpec:
    lam2 = 1 - 2 * lam1 if lam2 is None else lam2
    return MarginalSpec(((lam1, 2), (lam2, 1)))


# -- nd_n3_d4 --------------------------------------------------------------------


def _nd_phi_perp():
    s2, s3 = np.sqrt(2), np.sqrt(3)
    return _kets(4, [((0, 0), 2 / 3), ((2, 2), 4 * s3 / 7), ((1, 1), -s2 / 3), ((3, 3), -6 / 7)])


def _nd_machine():
    s2, s3 = np.sqrt(2), np.sqrt(3)
    c0 = _kets(4, [((0, 0), 1), ((1, 1), s2)]) / s3
    c1 = _kets(4, [((2, 2), s3), ((3, 3), 2)]) / np.sqrt(7)
    phi_perp = _nd_phi_perp()
    # |Phi_perp> has squared norm 50/21; the third column is its unit vector with
    # the sign that maps the second input disk onto the second target family.
    c2 = -phi_perp / np.linalg.norm(phi_perp)
    spec = MarginalSpec.from_eigenvalues(0.1, 0.2, 0.3, 0.4)
    return MaskingMachine(np.column_stack([c0, c1, c2]), (4, 4), spec)


def nd_input_disks() -> tuple[Hyperdisk, Hyperdisk, Hyperdisk]:
    """The three 2D input disks of the complete maskable set.

    The first two are the printed pair. The third is the pullback of the target
    disk spanned by |00> - 2|33> and sqrt(2)|11> - sqrt(3)|22>, which also lies
    in the image and has the common marginals.
    """
    s3, s7, q = np.sqrt(3), np.sqrt(7), np.sqrt(50 / 21)
    s0 = Hyperdisk(np.eye(3, dtype=complex)[:, :2], np.array([s3, s7]) / np.sqrt(10))
    b0 = np.array([1 / s3, 3 / s7, -q]) / 2
    b1 = np.array([2 / s3, 4 / s7, q]) / np.sqrt(6)
    s1 = Hyperdisk(np.column_stack([b0, b1]), np.array([2, np.sqrt(6)]) / np.sqrt(10))
    t2 = nd_target_disks()[2]
    v = _nd_machine().matrix
    s2 = Hyperdisk(v.conj().T @ t2.basis, t2.coeffs)
    return s0, s1, s2


def nd_printed_claim() -> MaskableSet:
    """The two-disk set as printed, which misses the third disk."""
    return MaskableSet(list(nd_input_disks()[:2]))


def nd_target_schmidt_disk() -> SchmidtHyperdisk:
    eye = np.eye(4, dtype=complex)
    return SchmidtHyperdisk.from_factors(eye, eye, np.sqrt([0.1, 0.2, 0.3, 0.4]))


def nd_target_disks() -> tuple[Hyperdisk, Hyperdisk, Hyperdisk]:
    s2, s3 = np.sqrt(2), np.sqrt(3)
    b00 = _kets(4, [((0, 0), 1), ((1, 1), s2)]) / s3
    b01 = _kets(4, [((2, 2), s3), ((3, 3), 2)]) / np.sqrt(7)
    b10 = _kets(4, [((0, 0), 1), ((2, 2), s3)]) / 2
    b11 = _kets(4, [((1, 1), s2), ((3, 3), 2)]) / np.sqrt(6)
    b20 = _kets(4, [((0, 0), 1), ((3, 3), -2)]) / np.sqrt(5)
    b21 = _kets(4, [((1, 1), s2), ((2, 2), -s3)]) / np.sqrt(5)
    r0 = np.array([s3, np.sqrt(7)]) / np.sqrt(10)
    r1 = np.array([2, np.sqrt(6)]) / np.sqrt(10)
    r2 = np.array([1, 1]) / s2
    return (
        Hyperdisk(np.column_stack([b00, b01]), r0),
        Hyperdisk(np.column_stack([b10, b11]), r1),
        Hyperdisk(np.column_stack([b20, b21]), r2),
    )


# -- cd_n3_d2 --------------------------------------------------------------------


def cd_local_pair(xi, eta):
    c, s = np.cos(xi / 2), np.sin(xi / 2)
    plus = np.array([c, s * np.exp(1j * eta)])
    minus = np.array([s, -c * np.exp(1j * eta)])
    return plus, minus


def cd_target_disk(xi, eta) -> SchmidtHyperdisk:
    plus, minus = cd_local_pair(xi, eta)
    left = np.column_stack([plus, minus])
    return SchmidtHyperdisk.from_factors(left, left, np.full(2, 1 / np.sqrt(2)))


def cd_input_disk(xi, eta) -> Hyperdisk:
    """The target disk at ``(xi, eta)`` pulled back through the machine."""
    v = _cd_machine().matrix
    disk = cd_target_disk(xi, eta)
    return Hyperdisk(v.conj().T @ disk.basis, disk.coeffs)


def _cd_machine():
    cols = [product_ket(0, 0, 2), product_ket(1, 1, 2), (product_ket(0, 1, 2) + product_ket(1, 0, 2)) / np.sqrt(2)]
    return MaskingMachine(np.column_stack(cols), (2, 2), MarginalSpec.maximally_mixed(2))


# -- qutrit target spaces --------------------------------------------------------------


def bell_triple_states():
    phi = np.eye(3, dtype=complex).reshape(-1) / np.sqrt(3)
    z, x = generalized_pauli(3, "Z"), generalized_pauli(3, "X")
    eye = np.eye(3)
    return [phi, np.kron(z, eye) @ phi, np.kron(x, eye) @ phi]


def _subspace_machine(states, spec) -> MaskingMachine:
    return MaskingMachine(orthonormalize(states), (3, 3), spec)


def partial_no_disk_state(eta, lam1: float = LAMBDA_1, lam2: float = LAMBDA_2):
    a = np.sqrt(lam1 / 2)
    return _kets(
        3,
        [
            ((0, 0), a * np.exp(1j * eta)),
            ((1, 1), a * np.exp(-1j * eta)),
            ((0, 1), 1j * a),
            ((1, 0), 1j * a),
            ((2, 2), np.sqrt(lam2)),
        ],
    )


def _partial_no_disk_states(lam1, lam2):
    third = _kets(3, [((0, 1), 1j * np.sqrt(lam1 / 2)), ((1, 0), 1j * np.sqrt(lam1 / 2)), ((2, 2), np.sqrt(lam2))])
    return [product_ket(0, 0, 3), product_ket(1, 1, 3), normalize(third)]


def type_i_state(theta1, theta2, lams=(0.5, 0.3, 0.2)):
    l0, l1, l2 = lams
    return _kets(3, [((0, 0), np.sqrt(l0)), ((1, 1), np.sqrt(l1) * np.exp(1j * theta1)), ((2, 2), np.sqrt(l2) * np.exp(1j * theta2))])


def _anchor_pair(lam1, lam2):
    w = _kets(3, [((1, 1), np.sqrt(lam1)), ((2, 2), np.sqrt(lam2))])
    return product_ket(0, 0, 3), w / np.linalg.norm(w)


def type_ii_local_bases(theta=np.pi / 2, phi0=0.0, phi1=np.pi / 2):
    """``(phi+, phi-, psi+, psi-)`` half-angle bases of ``span{|0>, |1>}`` embedded in C^3."""
    from .classify import _half_angle_pair

    fp, fm = _half_angle_pair(theta, phi0)
    gp, gm = _half_angle_pair(theta, phi1)
    return fp, fm, gp, gm


def type_ii_states(alpha=None, beta=None, lam1=LAMBDA_1, lam2=LAMBDA_2, theta=np.pi / 2, phi0=0.0, phi1=np.pi / 2):
    """Members of the two target disks; pass exactly one of ``alpha``/``beta``."""
    if (alpha is None) == (beta is None):
        raise ValueError("pass exactly one of alpha or beta")
    if alpha is not None:
        return _kets(3, [((0, 0), np.sqrt(lam1)), ((1, 1), np.exp(1j * alpha) * np.sqrt(lam1)), ((2, 2), np.exp(1j * alpha) * np.sqrt(lam2))])
    fp, fm, gp, gm = type_ii_local_bases(theta, phi0, phi1)
    two = product_ket(2, 2, 3)
    return np.sqrt(lam1) * (np.kron(fm, gm) + np.exp(1j * beta) * np.kron(fp, gp)) + np.sqrt(lam2) * two


def type_ii_disks(lam1=LAMBDA_1, lam2=LAMBDA_2, theta=np.pi / 2, phi0=0.0, phi1=np.pi / 2):
    """The two target disks and their Schmidt parents."""
    a0, a1 = _anchor_pair(lam1, lam2)
    fp, fm, gp, gm = type_ii_local_bases(theta, phi0, phi1)
    two = product_ket(2, 2, 3)
    b1 = normalize(np.sqrt(lam1) * np.kron(fm, gm) + np.sqrt(lam2) * two)
    r = np.array([np.sqrt(lam1), np.sqrt(lam1 + lam2)])
    d0 = Hyperdisk(np.column_stack([a0, a1]), r)
    d1 = Hyperdisk(np.column_stack([np.kron(fp, gp), b1]), r)
    e2 = np.eye(3, dtype=complex)[:, 2]
    eye = np.eye(3, dtype=complex)
    p0 = SchmidtHyperdisk.from_factors(eye, eye, np.sqrt([lam1, lam1, lam2]))
    p1 = SchmidtHyperdisk.from_factors(
        np.column_stack([fp, fm, e2]), np.column_stack([gp, gm, e2]), np.sqrt([lam1, lam1, lam2])
    )
    return (d0, d1), (p0, p1)


def _type_ii_states_span(lam1, lam2, theta, phi0, phi1):
    from .classify import appendix_a_disk_basis, projection_residual

    spec = partial_spec(lam1, lam2)
    a0, a1 = _anchor_pair(lam1, lam2)
    phi_0, _ = appendix_a_disk_basis(theta, theta, 0.0, phi0, phi1, spec)
    return [a0, a1, normalize(projection_residual(phi_0, spec).residual)]


# -- appendix families -------------------------------------------------------------


def appendix_a_state(theta, phi0, phi1, eta, lam1=LAMBDA_1, lam2=LAMBDA_2):
    """``U (x) I (sqrt(l1)|00> + sqrt(l1)|11> + sqrt(l2)|22>)`` with
    ``U = |chi+><0| + e^{i phi0}|chi-><1| + e^{i eta}|2><2|``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    chi_p = np.array([c, s * np.exp(1j * phi1), 0])
    chi_m = np.array([s, -c * np.exp(1j * phi1), 0])
    u = np.column_stack([chi_p, np.exp(1j * phi0) * chi_m, [0, 0, np.exp(1j * eta)]])
    return (u * np.sqrt([lam1, lam1, lam2])[None, :]).reshape(-1)


def appendix_a_unbalanced_residual(theta, phi0, phi1, eta, lam1=LAMBDA_1, lam2=LAMBDA_2):
    """Closed form of the residual of :func:`appendix_a_state`, up to the phase ``e^{i(phi0+phi1)}``."""
    s, c = np.sin(theta / 2), np.cos(theta / 2)
    k = lam1 * lam2 / (lam1 + lam2)
    return np.sqrt(lam1) * s * _kets(3, [((0, 1), np.exp(-1j * phi1)), ((1, 0), np.exp(-1j * phi0))]) - k * (
        c + np.exp(1j * (eta - phi0 - phi1))
    ) * _kets(3, [((1, 1), 1 / np.sqrt(lam1)), ((2, 2), -1 / np.sqrt(lam2))])


def appendix_a_balanced_residual(theta, phi0, phi1, lam1=LAMBDA_1, lam2=LAMBDA_2):
    """Residual direction shared by both basis states of the second disk when ``theta0 = theta1``."""
    k = lam1 * lam2 / (lam1 + lam2)
    return np.sin(theta) * np.sqrt(lam1) * _kets(3, [((0, 1), np.exp(-1j * phi0)), ((1, 0), np.exp(-1j * phi1))]) + k * (
        1 - np.cos(theta)
    ) * _kets(3, [((1, 1), 1 / np.sqrt(lam1)), ((2, 2), -1 / np.sqrt(lam2))])


def _psi_prime_12(nu, omega):
    c, s = np.cos(nu / 2), np.sin(nu / 2)
    return np.array([0, c, s * np.exp(1j * omega)]), np.array([0, s, -c * np.exp(1j * omega)])


def appendix_b_state(theta, nu, phi0, phi1, omega, eta):
    """Normalized maximally entangled two-qutrit state of the reduced form

    ``cos|00> + sin(e^{i phi0}|10> + e^{i phi1}|0 psi+>)
    + e^{i(phi0+phi1)}(e^{i eta}|2 psi-> - cos|1 psi+>)``, half angles of ``theta``,
    with ``psi+- `` the ``(nu, omega)`` basis of ``span{|1>, |2>}``.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.eye(3, dtype=complex)
    pp, pm = _psi_prime_12(nu, omega)
    vec = (
        c * np.kron(e[0], e[0])
        + s * (np.exp(1j * phi0) * np.kron(e[1], e[0]) + np.exp(1j * phi1) * np.kron(e[0], pp))
        + np.exp(1j * (phi0 + phi1)) * (np.exp(1j * eta) * np.kron(e[2], pm) - c * np.kron(e[1], pp))
    )
    return vec / np.sqrt(3)


def appendix_b_residual_closed_form(theta, nu, phi0, phi1, omega, eta):
    """Residual of the unnormalized :func:`appendix_b_state`, up to the phase ``e^{i phi0}``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    cn, sn = np.cos(nu / 2), np.sin(nu / 2)
    dp = phi1 - phi0
    return (
        s * _kets(3, [((1, 0), 1), ((0, 1), np.exp(1j * dp) * cn), ((0, 2), np.exp(1j * (dp + omega)) * sn)])
        + np.exp(1j * phi1) * sn * _kets(3, [((2, 1), np.exp(1j * eta)), ((1, 2), -np.exp(1j * omega) * c)])
        - 0.5 * np.exp(1j * phi1) * cn * (c - np.exp(1j * (eta + omega))) * _kets(3, [((1, 1), 1), ((2, 2), -1)])
    )


def type_iii_disk():
    e = np.eye(3, dtype=complex)
    a0 = np.kron(e[0], e[0])
    a1 = (np.kron(e[1], e[1]) + np.kron(e[2], e[2])) / np.sqrt(2)
    return Hyperdisk(np.column_stack([a0, a1]), np.array([1, np.sqrt(2)]) / np.sqrt(3))


def _type_iii_states(params):
    from .classify import projection_residual

    spec = MarginalSpec.maximally_mixed(3)
    d = type_iii_disk()
    res = projection_residual(appendix_b_state(**params), spec).residual
    return [d.basis[:, 0], d.basis[:, 1], normalize(res)]


APPENDIX_B_DEFAULTS = {"theta": np.pi / 2, "nu": np.pi / 2, "phi0": 0.3, "phi1": 0.7, "omega": 1.1, "eta": 0.5}
APPENDIX_A_DEFAULTS = {"lam1": LAMBDA_1, "lam2": LAMBDA_2, "theta": np.pi / 2, "phi0": 0.0, "phi1": np.pi / 2}


# -- build ---------------------------------------------------------------------------


def build(example_id: str, **params) -> Example:
    """Machine, claimed set and expected verdict of a catalog example.

    Family examples accept parameter overrides; other examples take none.
    """
    if example_id not in EXAMPLE_IDS:
        raise KeyError(f"unknown example {example_id!r}; known: {', '.join(EXAMPLE_IDS)}")
    fixed = {"nd_n3_d4", "cd_n3_d2", "bell_triple", "qubit_bell_pair", "qubit_omega_phase"}
    if params and example_id in fixed:
        raise ValueError(f"example {example_id!r} has no parameters")
    return _BUILDERS[example_id](**params)


def _build_nd():
    return Example(
        "nd_n3_d4",
        _nd_machine(),
        "pass",
        claimed=MaskableSet(list(nd_input_disks())),
        normalization={"column0": np.sqrt(3), "column1": np.sqrt(7), "phi_perp": np.sqrt(50 / 21), "target": np.sqrt(10)},
        notes="third column is -|Phi_perp>/|Phi_perp|; the claimed set has three disks, see nd_printed_claim",
    )


def _build_cd():
    return Example(
        "cd_n3_d2",
        _cd_machine(),
        "pass",
        claimed=None,
        normalization={"column2": np.sqrt(2), "family": np.sqrt(2)},
        notes="maskable set is the union over (xi, eta) of cd_input_disk(xi, eta)",
    )


def _build_bell_triple():
    spec = MarginalSpec.maximally_mixed(3)
    return Example("bell_triple", _subspace_machine(bell_triple_states(), spec), "FiniteOrthogonalSet(3)")


def _build_partial_no_disk(lam1=LAMBDA_1, lam2=None):
    spec = partial_spec(lam1, lam2)
    lam2 = spec.blocks[1][0]
    states = _partial_no_disk_states(lam1, lam2)
    return Example(
        "partial_no_disk",
        _subspace_machine(states, spec),
        "Other",
        params={"lam1": lam1, "lam2": lam2},
        normalization={"third": np.sqrt(lam1 + lam2)},
    )


def _build_type_i(lam0=0.5, lam1=0.3, lam2=0.2):
    spec = MarginalSpec.from_eigenvalues(lam0, lam1, lam2)
    e = np.eye(3, dtype=complex)
    states = [np.kron(e[k], e[k]) for k in range(3)]
    return Example("type_i", _subspace_machine(states, spec), "TypeI", params={"lams": (lam0, lam1, lam2)})


def _build_type_ii(lam1=LAMBDA_1, lam2=None, theta=np.pi / 2, phi0=0.0, phi1=np.pi / 2):
    spec = partial_spec(lam1, lam2)
    lam2 = spec.blocks[1][0]
    (d0, d1), _ = type_ii_disks(lam1, lam2, theta, phi0, phi1)
    fam = dict(lam1=lam1, lam2=lam2, theta=theta, phi0=phi0, phi1=phi1)
    machine = _subspace_machine(_type_ii_states_span(**fam), spec)
    v = machine.matrix
    claimed = MaskableSet([Hyperdisk(v.conj().T @ d.basis, d.coeffs) for d in (d0, d1)])
    return Example("type_ii", machine, "TypeII", claimed=claimed, params=fam)


def _build_type_iii(**params):
    fam = {**APPENDIX_B_DEFAULTS, **params}
    if not 0 < fam["nu"]:
        raise ValueError("type_iii needs nu > 0; nu = 0 falls in the two-disk regime")
    spec = MarginalSpec.maximally_mixed(3)
    machine = _subspace_machine(_type_iii_states(fam), spec)
    v = machine.matrix
    iso = appendix_b_state(**fam)
    claimed = MaskableSet([Hyperdisk(v.conj().T @ type_iii_disk().basis, type_iii_disk().coeffs)], [v.conj().T @ iso])
    return Example("type_iii", machine, "TypeIII", claimed=claimed, params=fam, normalization={"family": np.sqrt(3)})


def _build_appendix_a(**params):
    fam = {**APPENDIX_A_DEFAULTS, **params}
    ex = _build_type_ii(**fam)
    ex.id = "appendix_a_family"
    return ex


def _build_appendix_b(**params):
    fam = {**APPENDIX_B_DEFAULTS, **params}
    spec = MarginalSpec.maximally_mixed(3)
    machine = _subspace_machine(_type_iii_states(fam), spec)
    expected = "TypeII" if fam["nu"] == 0 else "TypeIII"
    return Example("appendix_b_family", machine, expected, params=fam, normalization={"family": np.sqrt(3)})


def _build_bell_pair():
    e = lambda a, b: product_ket(a, b, 2)  # noqa: E731
    cols = [(e(0, 0) + e(1, 1)) / np.sqrt(2), (e(0, 1) + e(1, 0)) / np.sqrt(2)]
    machine = MaskingMachine(np.column_stack(cols), (2, 2), MarginalSpec.maximally_mixed(2))
    return Example("qubit_bell_pair", machine, "Disk(2)")


def _build_omega_phase():
    phi, zphi, _ = bell_triple_states()
    machine = MaskingMachine(np.column_stack([phi, zphi]), (3, 3), MarginalSpec.maximally_mixed(3))
    return Example("qubit_omega_phase", machine, "TwoStates")


_BUILDERS = {
    "nd_n3_d4": _build_nd,
    "cd_n3_d2": _build_cd,
    "bell_triple": _build_bell_triple,
    "partial_no_disk": _build_partial_no_disk,
    "type_i": _build_type_i,
    "type_ii": _build_type_ii,
    "type_iii": _build_type_iii,
    "appendix_a_family": _build_appendix_a,
    "appendix_b_family": _build_appendix_b,
    "qubit_bell_pair": _build_bell_pair,
    "qubit_omega_phase": _build_omega_phase,
}


# -- family states -------------------------------------------------------------------


def _in_range(name, value, lo, hi, closed_lo=True, closed_hi=True):
    ok_lo = value >= lo if closed_lo else value > lo
    ok_hi = value <= hi if closed_hi else value < hi
    if not (ok_lo and ok_hi):
        raise ValueError(f"parameter {name}={value} outside its domain")


def family_state(example_id: str, **p) -> np.ndarray:
    """Normalized member of a catalog family in the bipartite space."""
    if example_id == "nd_n3_d4":
        given = [k for k in ("alpha", "beta", "gamma") if k in p]
        if len(given) != 1:
            raise ValueError("pass exactly one of alpha, beta or gamma")
        disk = nd_target_disks()[("alpha", "beta", "gamma").index(given[0])]
        return disk.state([0, p[given[0]]])
    if example_id == "cd_n3_d2":
        return cd_target_disk(p.get("xi", 0.0), p.get("eta", 0.0)).state([0, p.get("theta", 0.0)])
    if example_id == "partial_no_disk":
        return partial_no_disk_state(p.get("eta", 0.0), p.get("lam1", LAMBDA_1), p.get("lam2", LAMBDA_2))
    if example_id == "type_i":
        return type_i_state(p.get("theta1", 0.0), p.get("theta2", 0.0), p.get("lams", (0.5, 0.3, 0.2)))
    if example_id == "type_ii":
        return type_ii_states(**p)
    if example_id == "type_iii":
        if "alpha" in p:
            return type_iii_disk().state([0, p["alpha"]])
        example_id = "appendix_b_family"
    if example_id == "appendix_a_family":
        fam = {**APPENDIX_A_DEFAULTS, "eta": 0.0, **p}
        _in_range("theta", fam["theta"], 0, np.pi, closed_lo=False)
        return appendix_a_state(fam["theta"], fam["phi0"], fam["phi1"], fam["eta"], fam["lam1"], fam["lam2"])
    if example_id == "appendix_b_family":
        fam = {**APPENDIX_B_DEFAULTS, **p}
        _in_range("theta", fam["theta"], 0, np.pi, closed_lo=False)
        _in_range("nu", fam["nu"], 0, np.pi)
        return appendix_b_state(**fam)
    if example_id == "bell_triple":
        return bell_triple_states()[int(p.get("index", 0))]
    if example_id in ("qubit_bell_pair", "qubit_omega_phase"):
        machine = build(example_id).machine
        return machine.matrix[:, int(p.get("index", 0))]
    raise KeyError(f"unknown example {example_id!r}")


@dataclass(eq=False)
class FamilyCheck:
    id: str
    samples: int
    max_deviation: float
    passed: bool


def _sample_params(example_id, rng):
    u = lambda: rng.uniform(0, 2 * np.pi)  # noqa: E731
    if example_id == "nd_n3_d4":
        return {"alpha": u()} if rng.random() < 0.5 else {"beta": u()}
    if example_id == "cd_n3_d2":
        return {"xi": u(), "eta": u(), "theta": u()}
    if example_id == "partial_no_disk":
        return {"eta": u()}
    if example_id == "type_i":
        return {"theta1": u(), "theta2": u()}
    if example_id in ("type_ii", "appendix_a_family"):
        if example_id == "type_ii":
            return {"alpha": u()} if rng.random() < 0.5 else {"beta": u()}
        return {"theta": np.pi - rng.uniform(0, np.pi), "phi0": u(), "phi1": u(), "eta": u()}
    if example_id in ("type_iii", "appendix_b_family"):
        return {
            "theta": np.pi - rng.uniform(0, np.pi),
            "nu": rng.uniform(0, np.pi),
            "phi0": u(),
            "phi1": u(),
            "omega": u(),
            "eta": u(),
        }
    if example_id == "bell_triple":
        return {"index": int(rng.integers(3))}
    return {"index": int(rng.integers(2))}


def family_marginal_check(example_id: str, samples: int = 100, seed: int = 0, atol: float = DEFAULT_TOL.algebraic) -> FamilyCheck:
    """Sample a family uniformly over its domain and compare both marginals to its spec."""
    ex = build(example_id)
    rho = ex.spec.density_matrix()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        psi = family_state(example_id, **_sample_params(example_id, rng))
        ra, rb = marginals_of(psi, ex.machine.dims)
        worst = max(worst, float(np.linalg.norm(ra - rho)), float(np.linalg.norm(rb - rho)))
    return FamilyCheck(example_id, samples, worst, worst < atol)


def masked_family(example: Example, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    """Masked images of claimed inputs; handy for condition-1 checks."""
    if example.claimed is None:
        raise ValueError("example has no finite claimed set")
    return [mask(example.machine, s).amplitudes for s in example.claimed.samples(count, rng)]


__all__ = [
    "DESCRIPTIONS",
    "EXAMPLE_IDS",
    "Example",
    "FamilyCheck",
    "appendix_a_balanced_residual",
    "appendix_a_state",
    "appendix_a_unbalanced_residual",
    "appendix_b_residual_closed_form",
    "appendix_b_state",
    "bell_triple_states",
    "build",
    "cd_input_disk",
    "cd_target_disk",
    "family_marginal_check",
    "family_state",
    "nd_input_disks",
    "nd_printed_claim",
    "nd_target_disks",
    "nd_target_schmidt_disk",
    "partial_no_disk_state",
    "partial_spec",
    "type_i_state",
    "type_ii_disks",
    "type_ii_states",
    "type_iii_disk",
]
