"""Command-line front end. Every command prints one JSON document.

Exit codes: 0 ok, 1 property failure, 2 input validation, 3 capability.
Random streams under the master ``--seed``: stream 0 draws ``--named haar``
states, stream 1 drives swap-test shots, stream 2 drives sweeps, stream 7
drives the verify suites.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import channels as ch
from . import convolution as cv
from . import library as lib
from . import magic as mg
from . import protocols as pr
from . import stabilizer as st
from . import verify as vf
from .errors import DimensionCapError, NotCliffordError, UnsupportedError, ValidationError
from .pauli import char_function, check_prime, num_subsystems, set_max_dim
from .serialize import SCHEMA_VERSION, array_from_json, array_to_json, dumps, validate
from .states import dm, haar_vector, is_pure, rng_for, spectrum, validate_density_matrix

logger = logging.getLogger(__name__)

NAMED_STATES = ("zero", "plus", "T", "H", "W", "bell", "haar")
NAMED_GATES = ("I", "X", "Y", "Z", "H", "S", "T", "sqrtT", "CNOT", "CZ", "F")


def _state_from_file(path: str, kind: str, d: int):
    try:
        obj = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    if isinstance(obj, dict) and "state" in obj and isinstance(obj["state"], dict):
        obj = obj["state"]  # output of `convolve` re-imports directly
    if isinstance(obj, dict):
        validate(obj, "state_input")
        d = obj.get("d", d)
        if kind in obj:
            data = obj[kind]
        else:
            other = "vector" if kind == "matrix" else "matrix"
            if other not in obj:
                raise ValidationError(f"{path}: expected a '{kind}' field")
            kind, data = other, obj[other]
    else:
        validate({kind: obj}, "state_input")
        data = obj
    arr = array_from_json(data)
    if kind == "vector":
        if arr.ndim != 1:
            raise ValidationError("vector must be a flat list of [re, im] pairs")
        num_subsystems(arr.size, d)
        norm = np.linalg.norm(arr)
        if abs(norm - 1) > 1e-10:
            raise ValidationError(f"vector norm {norm:.12g} != 1")
        return dm(arr), d
    return validate_density_matrix(arr, d), d


def load_state(args) -> tuple[np.ndarray, int]:
    """State from --named / --vector / --matrix, validated."""
    d = args.d
    check_prime(d)
    if getattr(args, "matrix", None):
        return _state_from_file(args.matrix, "matrix", d)
    if getattr(args, "vector", None):
        return _state_from_file(args.vector, "vector", d)
    name = args.named or "zero"
    if name == "haar":
        vec = haar_vector(d**args.n, rng_for(args.seed, 0))
        return dm(vec), d
    return lib.named_state(name, d, args.n), d


def load_gate(args) -> np.ndarray:
    d = args.d
    check_prime(d)
    if getattr(args, "matrix", None):
        try:
            obj = json.loads(Path(args.matrix).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read {args.matrix}: {exc}") from exc
        if isinstance(obj, dict):
            validate(obj, "state_input")
            obj = obj.get("matrix")
        else:
            validate({"matrix": obj}, "state_input")
        U = array_from_json(obj)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise ValidationError("gate matrix must be square")
        num_subsystems(U.shape[0], d)
        if np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > 1e-10:
            raise ValidationError("gate matrix is not unitary")
        return U
    return lib.named_gate(args.gate or "I", d)


def _state_json(rho, d: int) -> dict:
    return {"d": d, "n": num_subsystems(rho.shape[0], d), "matrix": array_to_json(rho)}


def _tolerances(args) -> dict:
    return {
        "unit": args.tol_unit,
        "support": args.tol_support,
        "bound": args.tol_bound,
    }


def cmd_test_state(args) -> tuple[dict, int]:
    rho, d = load_state(args)
    if not is_pure(rho):
        raise ValidationError("test-state takes a pure state; input is mixed")
    rep = pr.acceptance_probability_state(rho, d, args.shots, args.seed)
    return {"report": rep.to_dict()}, 0


def cmd_test_gate(args) -> tuple[dict, int]:
    U = load_gate(args)
    rep = pr.acceptance_probability_gate(U, args.d, args.shots, args.seed, scan_large=args.scan_large)
    return {"report": rep.to_dict()}, 0


def cmd_magic_entropy(args) -> tuple[dict, int]:
    rho, d = load_state(args)
    if d == 2:
        rep = mg.magic_entropy(rho, args.N, args.alpha)
    else:
        rep = mg.magic_entropy_qudit(rho, d, args.alpha)
    return {"report": rep.to_dict()}, 0


def cmd_mrm(args) -> tuple[dict, int]:
    rho, d = load_state(args)
    method = args.method or "closed_form"
    rep = mg.mrm(rho, args.alpha, d, method, unit_tol=args.tol_unit)
    return {"report": rep.to_dict()}, 0


def cmd_convolve(args) -> tuple[dict, int]:
    rho, d = load_state(args)
    method = args.method or cv.DEFAULT_METHOD
    if d == 2:
        out = cv.convolve_qubit([rho] * args.K, method)
        kind = f"K={args.K}"
    else:
        out = cv.convolve_hadamard(rho, rho, d, method)
        kind = "hadamard"
    payload = {
        "convolution": kind,
        "method": method,
        "state": _state_json(out, d),
        "char_function": array_to_json(char_function(out, d)),
        "spectrum": spectrum(out).tolist(),
    }
    return payload, 0


def cmd_clt(args) -> tuple[dict, int]:
    tols = {"unit_tol": args.tol_unit, "support_tol": args.tol_support}
    if args.gate:
        h = ch.choi_of_unitary(load_gate(args))
        recs = ch.channel_clt_report(h, args.K_list, args.tol_bound, **tols)
        subject = "channel"
    else:
        rho, d = load_state(args)
        if d != 2:
            raise UnsupportedError("the CLT report is implemented for qubits")
        recs = cv.clt_report(rho, args.K_list, args.tol_bound, **tols)
        subject = "state"
    rows = [r.__dict__.copy() for r in recs]
    ok = all(r["holds"] for r in rows) and all(b["lhs"] <= a["lhs"] + args.tol_bound for a, b in zip(rows, rows[1:]))
    return {"subject": subject, "records": rows, "all_hold": ok}, 0 if ok else 1


def cmd_enumerate(args) -> tuple[dict, int]:
    d, n = args.d, args.n
    what = args.what
    if what == "cliffords":
        mats = st.clifford_matrices(d, n)
        items = [array_to_json(m) for m in mats]
    elif what == "stabilizers":
        items = [array_to_json(v) for v in st.stabilizer_vectors(d, n)]
    else:
        items = [array_to_json(m) for m in st.msps_enumerate(d, n)]
    payload = {"what": what, "d": d, "n": n, "count": len(items)}
    if not args.count_only:
        payload["items"] = items
    return payload, 0


def cmd_verify(args) -> tuple[dict, int]:
    only = None
    if args.only:
        only = [s for part in args.only for s in part.split(",") if s]
    results = vf.run_suites(only, args.seed, args.trials, args.parallel)
    failed = [r for r in results if not r.passed]
    payload = {
        "suites": only or list(vf.SUITES),
        "trials": args.trials,
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "results": [r.to_dict() for r in results],
    }
    return payload, 1 if failed else 0


COMMANDS = {
    "test-state": cmd_test_state,
    "test-gate": cmd_test_gate,
    "magic-entropy": cmd_magic_entropy,
    "mrm": cmd_mrm,
    "convolve": cmd_convolve,
    "clt": cmd_clt,
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
}

OUTPUT_SCHEMA = {
    "test-state": "test_report",
    "test-gate": "test_report",
    "magic-entropy": "magic_report",
    "mrm": "magic_report",
    "convolve": "convolve",
    "clt": "clt",
    "enumerate": "enumerate",
    "verify": "verify",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=2, help="local dimension (2 or an odd prime)")
    p.add_argument("--n", type=int, default=1, help="number of subsystems")
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--tol-unit", type=float, default=st.UNIT_TOL,
                   help="|Xi| >= 1 - tol counts as unit modulus (mean state, magic gap)")
    p.add_argument("--tol-support", type=float, default=1e-12, help="|Xi| <= tol counts as outside the support")
    p.add_argument("--tol-bound", type=float, default=1e-9, help="slack allowed in asserted inequalities")
    p.add_argument("--max-dim", type=int, default=None, help="override the dense dimension cap (default 2^14)")


def _add_state(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--named", choices=NAMED_STATES, help="named state; haar draws from --seed")
    g.add_argument("--matrix", metavar="FILE", help="JSON density matrix of [re, im] pairs")
    g.add_argument("--vector", metavar="FILE", help="JSON state vector of [re, im] pairs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qconv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qconv {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test-state", help="acceptance probability of the stabilizer-state test")
    _add_common(p)
    _add_state(p)
    p.add_argument("--shots", type=int, default=None, help="simulate this many swap tests")

    p = sub.add_parser("test-gate", help="acceptance probability of the Clifford-gate test")
    _add_common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gate", choices=NAMED_GATES, help="named gate")
    g.add_argument("--matrix", metavar="FILE", help="JSON unitary of [re, im] pairs")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--scan-large", action="store_true", help="allow the 11520-element two-qubit Clifford scan")

    p = sub.add_parser("magic-entropy", help="magic entropy of a pure state")
    _add_common(p)
    _add_state(p)
    p.add_argument("--N", type=int, default=1, help="order: convolve 2N+1 copies")
    p.add_argument("--alpha", type=float, default=1.0, help="Renyi order (inf allowed)")

    p = sub.add_parser("mrm", help="relative entropy of magic against MSPS")
    _add_common(p)
    _add_state(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--method", choices=("closed_form", "oracle"))

    p = sub.add_parser("convolve", help="self-convolution of a state")
    _add_common(p)
    _add_state(p)
    p.add_argument("--K", type=int, default=3, help="number of copies (odd, qubits only)")
    p.add_argument("--method", choices=cv.METHODS)

    p = sub.add_parser("clt", help="central-limit decay report for a state or a gate's Choi state")
    _add_common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--named", choices=NAMED_STATES)
    g.add_argument("--matrix", metavar="FILE")
    g.add_argument("--vector", metavar="FILE")
    g.add_argument("--gate", choices=NAMED_GATES, help="report on the channel of this gate")
    p.add_argument("--K", dest="K_list", type=int, nargs="+", default=[3, 5, 7, 9])

    p = sub.add_parser("enumerate", help="list Cliffords, stabilizer states or MSPS")
    _add_common(p)
    p.add_argument("--what", choices=("cliffords", "stabilizers", "msps"), required=True)
    p.add_argument("--count-only", action="store_true")

    p = sub.add_parser("verify", help="run the property suites")
    _add_common(p)
    p.add_argument("--only", nargs="+", help=f"suites to run: {', '.join(vf.SUITES)}")
    p.add_argument("--trials", type=int, default=None, help="cap every random sweep at this many instances")
    p.add_argument("--parallel", action="store_true", help="run suites in worker processes")
    return parser


def _config(args) -> dict:
    skip = {"out", "verbose", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        config = {"command": args.command, **_config(args)}
        validate(json.loads(dumps(config)), "run_config")
        if args.max_dim:
            set_max_dim(args.max_dim)
        payload, code = COMMANDS[args.command](args)
        doc = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": config, **payload}
        text = dumps(doc)
        validate(json.loads(text), OUTPUT_SCHEMA[args.command])
    except (UnsupportedError, DimensionCapError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 3
    except (ValidationError, NotCliffordError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
