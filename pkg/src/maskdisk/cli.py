"""Command line: ``maskdisk verify | classify | example | list-examples``.

Exit codes: 0 pass, 2 verification failure, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog
from .classify import classify_qubit_maskable_set, classify_qutrit_target_set
from .hyperdisk import common_parent_obstruction
from .linalg import Tolerance, marginals
from .masking import MaskingMachine, verify_condition1, verify_condition2
from .serialize import (
    InputError,
    Loader,
    disk_witness,
    dumps,
    encode_claimed,
    encode_machine,
    encode_spec,
    encode_subspace,
    read_json,
    report,
    state_witness,
    write_json,
)

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _tolerances(args) -> Tolerance:
    try:
        return Tolerance(args.tol_alg, args.tol_opt)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("MASKDISK_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"MASKDISK_SEED must be an integer, got {env!r}") from exc


def _tol_doc(tol: Tolerance) -> dict:
    return {"algebraic": tol.algebraic, "optimization": tol.optimization}


# -- pipelines shared by commands and examples ---------------------------------------


def run_verify(machine: MaskingMachine, claimed, seed: int, tol: Tolerance, rng_samples: int = 16):
    rng = np.random.default_rng(seed)
    samples = claimed.samples(rng_samples, rng)
    if not samples:
        raise InputError("claimed set is empty")
    c1 = verify_condition1(machine, samples, tol)
    diag = {
        "max_marginal_deviation": c1.max_deviation,
        "disks_found": len(claimed.disks),
        "condition1": c1.passed,
        "seed": seed,
        "tolerances": _tol_doc(tol),
    }
    if not c1.passed:
        return report("fail", [], diag)
    c2 = verify_condition2(machine, claimed, seed=seed, tol=tol, samples_per_disk=rng_samples)
    diag.update(
        condition2=c2.passed,
        matches=len(c2.matches),
        max_match_deviation=c2.max_match_deviation,
        membership_tol=c2.membership_tol,
        grid_points=c2.grid_points,
        starts=c2.starts,
    )
    witnesses = [state_witness(s, "input") for s in c2.counterexamples]
    return report("pass" if c2.passed else "fail", witnesses, diag)


def run_classify(cols, dims, spec, mode: str, seed: int, tol: Tolerance):
    if mode == "qubit":
        if cols.shape[1] != 2:
            raise InputError(f"qubit mode needs two target-space states, got {cols.shape[1]}")
        machine = MaskingMachine(cols, dims, spec)
        result = classify_qubit_maskable_set(machine, seed=seed, tol=tol)
        space = "input"
        witnesses = [disk_witness(d, space) for d in result.disks] + [state_witness(s, space) for s in result.states]
    else:
        if tuple(dims) != (3, 3) or cols.shape[1] != 3:
            raise InputError("qutrit mode needs three states of a 3 x 3 space")
        result = classify_qutrit_target_set(cols, spec, seed=seed, tol=tol)
        space = "target"
        witnesses = [disk_witness(d, space, dims) for d in result.disks]
        witnesses += [state_witness(s, space, dims) for s in result.states]
    d = result.diagnostics
    diag = {
        "max_marginal_deviation": d.get("max_marginal_deviation", 0.0),
        "disks_found": d.get("disks_found", 0),
        "seed": seed,
        "tolerances": _tol_doc(tol),
    }
    for key in ("matches", "solutions", "grid_points", "starts", "isolated_states", "max_span_residual"):
        if key in d:
            diag[key] = d[key]
    if "obstruction" in d:
        diag["obstruction_empty"] = d["obstruction"] is None
    if mode == "qutrit":
        diag["max_marginal_deviation"] = _qutrit_marginal_deviation(result, spec)
    return report(result.tag, witnesses, diag, mode=mode)


def _qutrit_marginal_deviation(result, spec) -> float:
    rho = spec.density_matrix()
    states = list(result.states) + [d.state() for d in result.disks]
    worst = 0.0
    for s in states:
        ra, rb = marginals(s, (3, 3))
        worst = max(worst, float(np.linalg.norm(ra - rho)), float(np.linalg.norm(rb - rho)))
    return worst


# -- commands --------------------------------------------------------------------------


def cmd_verify(args, out):
    tol = _tolerances(args)
    seed = _seed(args)
    loader = Loader()
    machine = loader.machine(read_json(args.machine))
    claimed = loader.claimed(read_json(args.claimed), machine.n)
    doc = run_verify(machine, claimed, seed, tol)
    doc["diagnostics"]["input_norm_error"] = loader.max_norm_error
    out.write(dumps(doc))
    return EXIT_PASS if doc["verdict"] == "pass" else EXIT_FAIL


def cmd_classify(args, out):
    tol = _tolerances(args)
    seed = _seed(args)
    loader = Loader()
    cols, dims = loader.subspace(read_json(args.subspace))
    spec = loader.spec(read_json(args.spec))
    if spec.d != dims[0] or dims[0] != dims[1]:
        raise InputError(f"spec dimension {spec.d} does not match dims {list(dims)}")
    doc = run_classify(cols, dims, spec, args.mode, seed, tol)
    doc["diagnostics"]["input_norm_error"] = loader.max_norm_error
    out.write(dumps(doc))
    return EXIT_PASS


def _parse_params(pairs):
    params = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--params expects key=value, got {item!r}")
        try:
            params[key] = float(value)
        except ValueError as exc:
            raise InputError(f"parameter {key} must be a number, got {value!r}") from exc
    return params


def _cd_example_report(seed: int, tol: Tolerance):
    check = catalog.family_marginal_check("cd_n3_d2", samples=100, seed=seed, atol=tol.algebraic)
    rng = np.random.default_rng(seed)
    hits, smallest = 0, 1.0
    for _ in range(50):
        h0 = catalog.cd_input_disk(*rng.uniform(0, 2 * np.pi, 2))
        h1 = catalog.cd_input_disk(*rng.uniform(0, 2 * np.pi, 2))
        # A zero cross overlap is an exact condition; nearby parameter pairs give small but nonzero ones.
        hits += common_parent_obstruction(h0, h1, atol=tol.algebraic) is not None
        smallest = min(smallest, float(np.abs(h0.basis.conj().T @ h1.basis).min()))
    diag = {
        "max_marginal_deviation": check.max_deviation,
        "disks_found": 100,
        "obstruction_hits": hits,
        "min_cross_overlap": smallest,
        "pairs": 50,
        "seed": seed,
        "tolerances": _tol_doc(tol),
    }
    return report("pass" if check.passed and hits == 0 else "fail", [], diag)


def run_example(ex: catalog.Example, seed: int, tol: Tolerance):
    if ex.id == "cd_n3_d2":
        doc = _cd_example_report(seed, tol)
    elif ex.mode == "verify":
        doc = run_verify(ex.machine, ex.claimed, seed, tol)
    else:
        doc = run_classify(ex.machine.matrix, ex.machine.dims, ex.spec, ex.mode, seed, tol)
    doc["example"] = ex.id
    doc["expected"] = ex.expected
    return doc


def write_fixtures(ex: catalog.Example, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_json(directory / f"{ex.id}.json", encode_machine(ex.machine))
    write_json(directory / f"{ex.id}.spec.json", encode_spec(ex.spec))
    if ex.claimed is not None:
        write_json(directory / f"{ex.id}.claimed.json", encode_claimed(ex.claimed))
    if ex.mode in ("qubit", "qutrit"):
        write_json(directory / f"{ex.id}.subspace.json", encode_subspace(ex.machine.matrix, ex.machine.dims))


def cmd_example(args, out):
    tol = _tolerances(args)
    seed = _seed(args)
    params = _parse_params(args.params)
    try:
        ex = catalog.build(args.id, **params)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad parameters for {args.id}: {exc}") from exc
    if args.out:
        write_fixtures(ex, args.out)
    doc = run_example(ex, seed, tol)
    out.write(dumps(doc))
    return EXIT_PASS if doc["verdict"] == ex.expected else EXIT_FAIL


def cmd_list(args, out):
    for eid in catalog.EXAMPLE_IDS:
        out.write(f"{eid}\t{catalog.DESCRIPTIONS[eid]}\n")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="search seed (default: $MASKDISK_SEED or 0)")
    common.add_argument("--tol-alg", type=float, default=1e-9, help="algebraic tolerance")
    common.add_argument("--tol-opt", type=float, default=1e-6, help="optimization tolerance")

    parser = _Parser(prog="maskdisk", description="Verify masking machines and classify maskable sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="check both masking conditions for a claimed set")
    p.add_argument("machine", help="machine JSON")
    p.add_argument("claimed", help="claimed maskable set JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="classify the target set of a subspace")
    p.add_argument("subspace", help="subspace or machine JSON")
    p.add_argument("spec", help="marginal spec JSON")
    p.add_argument("--mode", choices=("qubit", "qutrit"), required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("example", parents=[common], help="reproduce a catalog example")
    p.add_argument("id", help="example id (see list-examples)")
    p.add_argument("--params", nargs="*", metavar="KEY=VALUE", help="family parameter overrides")
    p.add_argument("--out", help="directory to write the example's JSON fixtures into")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("list-examples", help="list catalog example ids")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"maskdisk: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
