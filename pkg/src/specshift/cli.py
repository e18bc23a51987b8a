"""Command-line interface and file formats.

Matrices travel as JSON objects ``{"n": int, "re": [[...]], "im": [[...]]}``
with row-major ``n x n`` arrays ("im" optional, defaulting to zero).
Densities are emitted as CSV with header ``lambda,eta`` plus a JSON report.
All floating-point output is printed with 17 significant digits so reruns
are byte-identical.

Exit codes: 0 success; 1 I/O or parse failure; 2 numerical precondition
violation (e.g. a non-Hermitian input matrix); 3 tolerance failure in
``check``.

Numeric parameters are flag-driven only.  The single environment variable
``SPECSHIFT_CONFIG_DIR`` may point to a directory whose ``defaults.json``
provides non-numeric defaults (``out_dir``, ``emit``).
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    FunctionDomainError,
    FunctionSpecError,
    NonHermitianError,
    PreimageConsistencyError,
)
from .derivatives import remainder_trace
from .functions import GaussianPacket, Polynomial, ScalarFunction
from .oracles import corpus_cross_check, random_instance
from .shift_density import eta_density
from .spectral import HermitianOperator, eig

__all__ = [
    "RunConfig",
    "parse_function_spec",
    "load_matrix",
    "save_matrix",
    "run",
    "main",
]

ENV_CONFIG_DIR = "SPECSHIFT_CONFIG_DIR"

EXIT_OK = 0
EXIT_IO = 1
EXIT_PRECONDITION = 2
EXIT_TOLERANCE = 3

_PRECONDITION_ERRORS = (NonHermitianError, DimensionMismatchError,
                        FunctionDomainError, PreimageConsistencyError)


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of CLI options."""

    command: str
    a_path: str = ""
    v_path: str = ""
    function_spec: str = ""
    grid_size: int = 1001
    quad_order: int = 64
    order: int = 3
    tol: float = 1e-6
    seed: int = 0
    n: int = 4
    v_norm: float = 0.8
    instances: int = 4
    out: str = ""
    emit: str = "csv"

    def __post_init__(self):
        if self.grid_size < 2:
            raise ValueError("grid_size must be >= 2")
        if self.quad_order < 2:
            raise ValueError("quad_order must be >= 2")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.emit not in ("csv", "json"):
            raise ValueError("emit must be 'csv' or 'json'")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _config_defaults() -> dict:
    directory = os.environ.get(ENV_CONFIG_DIR, "")
    if not directory:
        return {}
    path = os.path.join(directory, "defaults.json")
    if not os.path.exists(path):
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return {k: data[k] for k in ("out_dir", "emit") if k in data}


# ---------------------------------------------------------------------------
# function-spec grammar: "poly:c0,c1,..." | "gauss:center,width" | "monomial:r"

def _parse_numbers(spec: str, payload_start: int, expected_count=None):
    values = []
    pos = payload_start
    spec_len = len(spec)
    if pos >= spec_len:
        raise FunctionSpecError(spec, pos, "a number")
    while True:
        end = spec.find(",", pos)
        token = spec[pos:end] if end >= 0 else spec[pos:]
        if token == "":
            # flag the separator (or end) that opened the empty token
            raise FunctionSpecError(spec, max(pos - 1, payload_start), "a number")
        try:
            values.append(float(token))
        except ValueError:
            raise FunctionSpecError(spec, pos, "a number") from None
        if end < 0:
            break
        pos = end + 1
    if expected_count is not None and len(values) != expected_count:
        raise FunctionSpecError(spec, spec_len, f"{expected_count} numbers")
    return values


def parse_function_spec(spec: str) -> ScalarFunction:
    """Parse ``poly:...``, ``gauss:...`` or ``monomial:...`` strings.

    Errors carry the character index of the offending token, e.g.
    ``poly:1,,2`` fails at index 6 (the separator starting the empty token).
    """
    head, sep, _ = spec.partition(":")
    if not sep:
        raise FunctionSpecError(spec, len(spec), "':' after the function kind")
    payload_start = len(head) + 1
    if head == "poly":
        return Polynomial(_parse_numbers(spec, payload_start))
    if head == "gauss":
        center, width = _parse_numbers(spec, payload_start, expected_count=2)
        if width <= 0:
            raise FunctionSpecError(spec, payload_start, "a positive width")
        return GaussianPacket(center=center, width=width)
    if head == "monomial":
        (r,) = _parse_numbers(spec, payload_start, expected_count=1)
        if r < 0 or r != int(r):
            raise FunctionSpecError(spec, payload_start, "a non-negative integer")
        coeffs = np.zeros(int(r) + 1)
        coeffs[int(r)] = 1.0
        return Polynomial(coeffs)
    raise FunctionSpecError(spec, 0, "'poly', 'gauss' or 'monomial'")


# ---------------------------------------------------------------------------
# matrix files

def load_matrix(path: str) -> HermitianOperator:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        n = int(data["n"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix file {path}: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(
            f"malformed matrix file {path}: arrays must be {n}x{n} row-major"
        )
    return HermitianOperator(re + 1j * im)


def save_matrix(path: str, H: HermitianOperator) -> None:
    payload = {
        "n": H.n,
        "re": H.entries.real.tolist(),
        "im": H.entries.imag.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands

def _cmd_eig(cfg: RunConfig, stdout) -> int:
    dec = eig(load_matrix(cfg.a_path))
    if cfg.emit == "json":
        _write_json({"eigenvalues": [float(v) for v in dec.eigenvalues]},
                    cfg.out, stdout)
    else:
        lines = "\n".join(_fmt(v) for v in dec.eigenvalues) + "\n"
        _write_text(lines, cfg.out, stdout)
    return EXIT_OK


def _cmd_remainder(cfg: RunConfig, stdout) -> int:
    A = load_matrix(cfg.a_path)
    V = load_matrix(cfg.v_path)
    phi = parse_function_spec(cfg.function_spec)
    value = remainder_trace(phi, A, V, order=cfg.order)
    _write_text(_fmt(value) + "\n", cfg.out, stdout)
    return EXIT_OK


def _cmd_eta(cfg: RunConfig, stdout) -> int:
    A = load_matrix(cfg.a_path)
    V = load_matrix(cfg.v_path)
    density = eta_density(A, V, grid_size=cfg.grid_size,
                          quad_order=cfg.quad_order, convergence_tol=cfg.tol)
    csv_text = "lambda,eta\n" + "".join(
        f"{_fmt(x)},{_fmt(y)}\n" for x, y in zip(density.grid, density.values)
    )
    report = density.report()
    if cfg.out:
        with open(cfg.out + ".csv", "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        _write_json(report, cfg.out + ".json", stdout)
        stdout.write(f"wrote {cfg.out}.csv and {cfg.out}.json\n")
    elif cfg.emit == "json":
        _write_json(report, "", stdout)
    else:
        stdout.write(csv_text)
    return EXIT_OK


def _cmd_check(cfg: RunConfig, stdout) -> int:
    report = corpus_cross_check(cfg.seed, instances=cfg.instances, n=cfg.n,
                                v_norm=cfg.v_norm, tol=cfg.tol,
                                quad_order=cfg.quad_order)
    _write_json(report, cfg.out, stdout)
    return EXIT_OK if not report["summary"]["failures"] else EXIT_TOLERANCE


def _cmd_gen(cfg: RunConfig, stdout) -> int:
    A, V = random_instance(cfg.seed, cfg.n, v_norm=cfg.v_norm)
    out_dir = cfg.out or "."
    os.makedirs(out_dir, exist_ok=True)
    a_path = os.path.join(out_dir, "A.json")
    v_path = os.path.join(out_dir, "V.json")
    save_matrix(a_path, A)
    save_matrix(v_path, V)
    stdout.write(f"wrote {a_path} and {v_path}\n")
    return EXIT_OK


def _write_text(text: str, out: str, stdout) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _write_json(payload, out: str, stdout) -> None:
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    _write_text(text, out, stdout)


_COMMANDS = {
    "eig": _cmd_eig,
    "remainder": _cmd_remainder,
    "eta": _cmd_eta,
    "check": _cmd_check,
    "gen": _cmd_gen,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        return _COMMANDS[cfg.command](cfg, stdout)
    except _PRECONDITION_ERRORS as exc:
        stderr.write(f"precondition violation: {exc}\n")
        return EXIT_PRECONDITION
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_IO


def _build_parser(defaults: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specshift",
        description="Taylor remainders of Hermitian matrix functions and "
                    "their third-order spectral shift density",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    emit_default = defaults.get("emit", "csv")

    p = sub.add_parser("eig", help="print the spectrum of a matrix file")
    p.add_argument("a_path", help="matrix JSON file")
    p.add_argument("--emit", choices=("csv", "json"), default=emit_default)
    p.add_argument("--out", default="")

    p = sub.add_parser("remainder", help="Taylor remainder trace")
    p.add_argument("--a", dest="a_path", required=True)
    p.add_argument("--v", dest="v_path", required=True)
    p.add_argument("--function", dest="function_spec", required=True,
                   help="poly:c0,c1,... | gauss:center,width | monomial:r")
    p.add_argument("--order", type=int, choices=(1, 2, 3), default=3)
    p.add_argument("--out", default="")

    p = sub.add_parser("eta", help="construct the shift density")
    p.add_argument("--a", dest="a_path", required=True)
    p.add_argument("--v", dest="v_path", required=True)
    p.add_argument("--grid-size", dest="grid_size", type=int, default=1001)
    p.add_argument("--quad-order", dest="quad_order", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--emit", choices=("csv", "json"), default=emit_default)
    p.add_argument("--out", default="",
                   help="output prefix; writes <out>.csv and <out>.json")

    p = sub.add_parser("check", help="cross-route consistency report")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=4)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--v-norm", dest="v_norm", type=float, default=0.8)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--quad-order", dest="quad_order", type=int, default=64)
    p.add_argument("--out", default="")

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--v-norm", dest="v_norm", type=float, default=0.8)
    p.add_argument("--out", default=defaults.get("out_dir", ""))

    return parser


def main(argv=None) -> int:
    defaults = _config_defaults()
    parser = _build_parser(defaults)
    ns = parser.parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if v is not None}
    try:
        cfg = RunConfig(**fields)
    except (ValueError, FunctionSpecError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
