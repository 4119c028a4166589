"""Command-line front end: ``mumkit <command> [options]``.

Results go to stdout (or ``--out``) as JSON with fixed key order and
shortest round-trip floats, so repeated runs are byte-identical. ``--record``
additionally writes a run record with inputs and wall-clock timing.

Exit codes: 0 success, 1 a verification failed, 2 malformed input.
"""

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import MumkitError
from .linalg import gellmann_basis, matrix_from_json
from .mum import MumFamily, build_mum_family, mub_unitaries, simplex_check, verify_mum
from .spectra import (
    independent_param_count,
    sample_feasible_phases,
    spectrum_d3,
    synthesize_spectrum,
    validate_spectrum,
)
from .states import (
    DensityMatrix,
    dicke,
    dicke_schmidt,
    isotropic,
    mub_schmidt_mixture,
    noisy_dicke,
    ppt_bound_state,
    schmidt_aligned,
)
from .witness import (
    WitnessConfig,
    entanglement_monotone,
    evaluate,
    optimize_rotations_d3,
)

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT = 0, 1, 2


class UsageError(Exception):
    """Malformed command-line input (exit code 2)."""


@dataclass
class RunRecord:
    command: str
    inputs: dict
    outputs: object
    timing: float


# ---------------------------------------------------------------------------
# parsing helpers


def _floats(text):
    if text is None or text == "":
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text):
    if text is None or text == "":
        return None
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def parse_state(text):
    """Resolve ``isotropic:d,alpha``, ``dicke:N,k,p``, ``ppt3x3`` or a JSON matrix file.

    A JSON file holds either a bare matrix object or ``{"dims": [da, db], "matrix": {...}}``.
    """
    name, _, args = text.partition(":")
    if name == "ppt3x3" and not args:
        return ppt_bound_state()
    if name == "isotropic" and args:
        vals = _floats(args)
        if len(vals) != 2:
            raise UsageError("isotropic state takes d,alpha")
        return isotropic(int(vals[0]), vals[1])
    if name == "dicke" and args:
        vals = _floats(args)
        if len(vals) != 3:
            raise UsageError("dicke state takes N,k,p")
        return noisy_dicke(int(vals[0]), int(vals[1]), vals[2])
    path = Path(text)
    if not path.suffix == ".json":
        raise UsageError(f"unknown state {text!r}")
    obj = _load_json(path)
    try:
        if "matrix" in obj:
            return DensityMatrix(tuple(obj["dims"]), matrix_from_json(obj["matrix"]))
        m = matrix_from_json(obj)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a matrix file") from exc
    d = int(round(np.sqrt(m.shape[0])))
    return DensityMatrix((d, d), m)


def _phases_or_default(args, d, kappa):
    """Phases from ``--phases``; if absent, zeros (always feasible) or a seeded draw with ``--random-phases``."""
    n = independent_param_count(d)
    if args.phases is not None:
        return _floats(args.phases), args.even_sign
    if getattr(args, "random_phases", False):
        phases, sign = sample_feasible_phases(d, kappa, np.random.default_rng(args.seed))
        return [float(p) for p in phases], sign
    return [0.0] * n, args.even_sign


def _family(d, kappa, phases=None, sign=1, size=None):
    phases = [0.0] * independent_param_count(d) if phases is None else phases
    s = synthesize_spectrum(d, kappa, phases, sign)
    us = mub_unitaries(d)
    return build_mum_family(s, us if size is None else us[:size])


def _d3_family(kappa, phi=0.0):
    return build_mum_family(spectrum_d3(kappa, phi), mub_unitaries(3))


def _linspace(start, stop, steps):
    if steps < 1 or (steps > 1 and start == stop):
        raise UsageError("empty range")
    if steps == 1:
        return [float(start)]
    return [float(x) for x in np.linspace(start, stop, steps)]


def _fraction(x):
    f = Fraction(x)
    return {"numerator": f.numerator, "denominator": f.denominator, "value": float(f)}


# ---------------------------------------------------------------------------
# commands; each returns (payload, exit_code)


def cmd_spectrum(args):
    phases, sign = _phases_or_default(args, args.dim, args.kappa)
    s = synthesize_spectrum(args.dim, args.kappa, phases, sign)
    return s.to_json(), EXIT_OK


def cmd_build(args):
    phases, sign = _phases_or_default(args, args.dim, args.kappa)
    f = _family(args.dim, args.kappa, phases, sign, args.measurements)
    return f.to_json(), EXIT_OK


def cmd_verify(args):
    f = MumFamily.from_json(_load_json(args.family))
    spectrum = validate_spectrum(f.spectrum, args.tol)
    mum = verify_mum(f, args.tol)
    simplex = simplex_check(f, gellmann_basis(f.d), args.tol)
    out = {
        "d": f.d,
        "kappa": float(f.kappa),
        "measurements": f.size,
        "spectrum_passed": spectrum.passed,
        "max_residual": mum.max_residual,
        "location": list(mum.location),
        "min_eigenvalue": mum.min_eigenvalue,
        "completeness_residual": mum.completeness_residual,
        "simplex_passed": simplex.passed,
        "passed": bool(spectrum.passed and mum.passed and simplex.passed),
    }
    return out, EXIT_OK if out["passed"] else EXIT_FAILED


def _witness_cfg(family, thetas, blocks, pairing):
    if thetas:
        if pairing != "conjugate":
            raise UsageError("--thetas is only supported with the conjugate pairing")
        return WitnessConfig.from_thetas(family, thetas, blocks)
    return WitnessConfig.identity(family, blocks, pairing)


def cmd_witness(args):
    family = MumFamily.from_json(_load_json(args.family))
    rho = parse_state(args.state)
    blocks = _ints(args.blocks)
    if args.optimize:
        thetas, res = optimize_rotations_d3(family, rho, blocks, args.grid)
        out = res.to_json()
        out["thetas"] = list(thetas)
        return out, EXIT_OK
    cfg = _witness_cfg(family, _floats(args.thetas), blocks, args.pairing)
    return evaluate(cfg, rho).to_json(), EXIT_OK


# examples ------------------------------------------------------------------


def example_isotropic(args):
    d, alpha, kappa = args.dim, args.alpha, args.kappa
    f = _family(d, kappa)
    res = evaluate(WitnessConfig.identity(f), isotropic(d, alpha))
    blocks = f.size
    analytic = (kappa - 1.0 / d) * (1.0 - blocks * alpha)
    return {
        "example": "isotropic",
        "d": d,
        "kappa": kappa,
        "alpha": alpha,
        "analytic": analytic,
        "numeric": res.w_expectation,
        "difference": res.w_expectation - analytic,
        "threshold_alpha": 1.0 / blocks,
        "detected": res.detected,
    }


def _dicke_setup(n_qubits, k, kappa):
    d = 2 ** (n_qubits // 2)
    psi = dicke(n_qubits, k)
    cfg = WitnessConfig.identity(_family(d, kappa))

    def value(p):
        return evaluate(cfg, schmidt_aligned(noisy_dicke(n_qubits, k, p), psi))

    return d, cfg, value


def example_dicke(args):
    n, k, kappa = args.qubits, args.excitations, args.kappa
    if n % 2:
        raise UsageError("the balanced bipartition needs an even number of qubits")
    d, cfg, value = _dicke_setup(n, k, kappa)
    lam = dicke_schmidt(n // 2, k, exact=True)
    root_sum = sum(np.sqrt(float(x)) for x in lam)
    e = (root_sum**2 - 1.0) / (d - 1)
    delta = cfg.family.size - 1
    threshold = delta * e / (1.0 + delta * e)
    out = {
        "example": "dicke",
        "qubits": n,
        "excitations": k,
        "d": d,
        "kappa": kappa,
        "schmidt": [_fraction(x) for x in lam],
        "E": e,
        "threshold_p": threshold,
    }
    if args.sweep_p:
        grid = np.round(np.arange(0.0, 1.0 + args.step / 2, args.step), 12)
        detected = [value(float(p)).detected for p in grid]
        last = max((i for i, flag in enumerate(detected) if flag), default=None)
        if last is None or last + 1 >= len(grid):
            out["bracket"] = None
        else:
            out["bracket"] = [float(grid[last]), float(grid[last + 1])]
        out["step"] = args.step
    else:
        res = value(args.p)
        analytic = (kappa - 1.0 / d) * (1.0 - (1.0 - args.p) * (1.0 + delta * e))
        out.update(
            p=args.p,
            analytic=analytic,
            numeric=res.w_expectation,
            difference=res.w_expectation - analytic,
            detected=res.detected,
        )
    return out


def example_ppt(args):
    kappa = args.kappa
    rho = ppt_bound_state()
    f = _d3_family(kappa)
    blocks = _ints(args.blocks)
    if args.optimize:
        thetas, res = optimize_rotations_d3(f, rho, blocks, args.grid)
    else:
        thetas = _floats(args.thetas) or [np.pi, np.pi, 0.0, 0.0]
        res = evaluate(WitnessConfig.from_thetas(f, thetas, blocks), rho)
    out = {
        "example": "ppt",
        "kappa": kappa,
        "ppt": rho.is_ppt(),
        "thetas": [float(t) for t in thetas],
        "blocks": list(res.blocks),
        "numeric": res.w_expectation,
        "detected": res.detected,
    }
    if len(res.blocks) == 4:
        analytic = -(kappa - 1.0 / 3.0) / 5.0
        out.update(analytic=analytic, difference=res.w_expectation - analytic)
    return out


def example_mixture(args):
    d, kappa = args.dim, args.kappa
    weights = _floats(args.weights)
    flags = _ints(args.entangled) or [1] * len(weights)
    if len(flags) != len(weights):
        raise UsageError("--entangled needs one flag per weight")
    specs, es = [], []
    for w, ent in zip(weights, flags):
        lam = np.full(d, 1.0 / d) if ent else np.eye(d)[0]
        specs.append((w, lam))
        es.append(entanglement_monotone(lam))
    rho = mub_schmidt_mixture(specs, d)
    f = _family(d, kappa)
    blocks = _ints(args.blocks) or [0, 1]
    res = evaluate(WitnessConfig.identity(f, blocks), rho)
    excess = kappa - 1.0 / d
    weighted_e = sum(w * e for w, e in zip(weights, es))
    m_analytic = 0.0
    for b in res.blocks:
        if b < len(weights):
            m_analytic += excess * (weights[b] + weighted_e - weights[b] * es[b])
        else:
            m_analytic += excess * weighted_e
    return {
        "example": "mixture",
        "d": d,
        "kappa": kappa,
        "weights": weights,
        "E": es,
        "blocks": list(res.blocks),
        "analytic_m": m_analytic,
        "numeric_m": res.m_total,
        "difference": res.m_total - m_analytic,
        "w_expectation": res.w_expectation,
        "detected": res.detected,
    }


EXAMPLES = {
    "isotropic": example_isotropic,
    "dicke": example_dicke,
    "ppt": example_ppt,
    "mixture": example_mixture,
}


def cmd_example(args):
    return EXAMPLES[args.name](args), EXIT_OK


# sweeps --------------------------------------------------------------------


def _row(axis, x, res):
    row = {axis: x}
    row.update(res.to_json())
    return row


def cmd_sweep(args):
    grid = _linspace(args.start, args.stop, args.steps)
    rows = []
    if args.axis == "kappa":
        rho = parse_state(args.state)
        d = rho.dims[0]
        for kappa in grid:
            rows.append(_row("kappa", kappa, evaluate(WitnessConfig.identity(_family(d, kappa)), rho)))
    elif args.axis == "alpha":
        cfg = WitnessConfig.identity(_family(args.dim, args.kappa))
        for alpha in grid:
            rows.append(_row("alpha", alpha, evaluate(cfg, isotropic(args.dim, alpha))))
    elif args.axis == "p":
        _, _, value = _dicke_setup(args.qubits, args.excitations, args.kappa)
        for p in grid:
            rows.append(_row("p", p, value(p)))
    else:
        rho = parse_state(args.state)
        f = _d3_family(args.kappa)
        base = _floats(args.thetas) or [0.0] * f.size
        for theta in grid:
            thetas = list(base)
            thetas[args.block] = theta
            rows.append(_row("theta", theta, evaluate(WitnessConfig.from_thetas(f, thetas), rho)))
    return rows, EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "build": cmd_build,
    "verify": cmd_verify,
    "witness": cmd_witness,
    "example": cmd_example,
    "sweep": cmd_sweep,
}


def replay(record):
    """Re-run a run record (as loaded from JSON) and return its serialized outputs."""
    args = argparse.Namespace(**record["inputs"])
    payload, _ = COMMANDS[record["command"]](args)
    return _dumps(payload)


# ---------------------------------------------------------------------------
# output


def _dumps(payload):
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _to_csv(payload):
    rows = payload if isinstance(payload, list) else [payload]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([json.dumps(row[h]) if isinstance(row[h], (list, dict)) else row[h] for h in header])
    return buf.getvalue()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--record", help="also write a run record (inputs, outputs, timing) to this file")

    parser = argparse.ArgumentParser(prog="mumkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def spectral(p):
        p.add_argument("--dim", type=int, required=True)
        p.add_argument("--kappa", type=float, required=True)
        p.add_argument("--phases", help="comma-separated Fourier phases")
        p.add_argument("--even-sign", type=int, choices=(1, -1), default=1)
        p.add_argument("--random-phases", action="store_true", help="draw feasible phases from --seed")

    p = sub.add_parser("spectrum", parents=[common], help="print a feasible spectrum")
    spectral(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("build", parents=[common], help="build a MUM family")
    spectral(p)
    p.add_argument("--measurements", type=int, help="keep only the first N measurements")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", parents=[common], help="verify a family file")
    p.add_argument("family")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("witness", parents=[common], help="evaluate a witness on a state")
    p.add_argument("--family", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--thetas", help="d = 3 rotation angles, one per measurement")
    p.add_argument("--blocks", help="comma-separated measurement indices")
    p.add_argument("--pairing", choices=("conjugate", "plain"), default="conjugate")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--grid", type=float, default=np.pi / 180)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("example", parents=[common], help="run one of the worked examples")
    p.add_argument("name", choices=sorted(EXAMPLES))
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--qubits", type=int, default=4)
    p.add_argument("--excitations", type=int, default=2)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--sweep-p", action="store_true")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--thetas")
    p.add_argument("--blocks")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--grid", type=float, default=np.pi / 180)
    p.add_argument("--weights", default="0.5,0.5")
    p.add_argument("--entangled", help="1/0 per component: maximally entangled or product")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("sweep", parents=[common], help="tabulate witness values over a parameter")
    p.add_argument("axis", choices=("kappa", "alpha", "p", "theta"))
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--state", default="isotropic:3,0.5")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--qubits", type=int, default=4)
    p.add_argument("--excitations", type=int, default=2)
    p.add_argument("--thetas")
    p.add_argument("--block", type=int, default=0)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "out", "record")}
    start = time.perf_counter()
    try:
        payload, code = args.func(args)
    except (UsageError, MumkitError, ValueError) as exc:
        print(f"mumkit: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    elapsed = time.perf_counter() - start

    text = _to_csv(payload) if args.format == "csv" else _dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.record:
        record = RunRecord(args.command, inputs, payload, elapsed)
        Path(args.record).write_text(_dumps(asdict(record)))
    return code


if __name__ == "__main__":
    sys.exit(main())
