"""Command-line front end.

Exit status is 0 on success, 2 for invalid configuration and 3 when a
computation is refused or fails (for example a DOS request in the broken
phase).
"""
import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import export
from .dos import dos_histogram, min_coupling_energy
from .errors import (
    BrokenBipartiteness,
    BrokenPhase,
    CTBandsError,
    DimensionMismatch,
    NoConvergence,
    OddSize,
    OutsideRegime,
)
from .lattice import (
    assemble,
    check_conjugate_pair_spectrum,
    check_ct_anticommutation,
    load_lattice,
)
from .models import (
    BilayerSpec,
    RiceMeleSpec,
    band_grid,
    bilayer_lattice,
    rice_mele_dispersion,
    rice_mele_k_grid,
    rice_mele_lattice,
)
from .numerics import svd
from .spectra import (
    dirac_probability_defect,
    eigenpair_residual,
    exceptional_scan,
    locate_transition,
    solve,
)

COMMANDS = ("bands", "dos", "scan", "spectrum", "verify")
MODELS = ("rice-mele", "bilayer", "custom")
THREADS_ENV = "CT_BANDS_THREADS"


class ConfigError(Exception):
    pass


class ComputeError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


@dataclass
class RunConfig:
    command: str
    model: str = "bilayer"
    n: int = None
    delta: float = None
    j_hop: float = 1.0
    t_hop: float = 5.0
    gamma: float = 0.0
    grid: int = None
    bins: int = 200
    gamma_from: float = 0.0
    gamma_to: float = 1.0
    steps: int = 101
    lattice: str = None
    output: str = None
    format: str = None
    full: bool = False
    vectors: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        for name in ("delta", "j_hop", "t_hop", "gamma", "gamma_from", "gamma_to"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value}")
        if self.model in ("rice-mele", "bilayer") and self.n is None:
            raise ConfigError(f"model {self.model} needs -N")
        if self.model == "rice-mele" and self.delta is None:
            raise ConfigError("model rice-mele needs --delta")
        if self.model == "custom" and self.lattice is None:
            raise ConfigError("model custom needs --lattice FILE")
        if self.n is not None and self.n < 1:
            raise ConfigError("-N must be positive")
        if self.steps < 1:
            raise ConfigError("--steps must be >= 1")
        if self.format not in (None, "csv", "json"):
            raise ConfigError("--format must be csv or json")
        return self


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--model", choices=MODELS, default="bilayer")
    common.add_argument("-N", dest="n", type=int, help="cells (rice-mele) or linear size (bilayer)")
    common.add_argument("--delta", type=float, help="Rice-Mele dimerisation")
    common.add_argument("-J", dest="j_hop", type=float, default=1.0, help="intra-layer hopping")
    common.add_argument("-T", dest="t_hop", type=float, default=5.0, help="inter-layer hopping")
    common.add_argument("--gamma", type=float, default=0.0, help="imaginary potential strength")
    common.add_argument("--lattice", help="lattice JSON file for --model custom")
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))

    parser = _Parser(prog="ctbands", description="CT-symmetric non-Hermitian lattice spectra")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bands", parents=[common], help="band energies on the k-grid")
    p.add_argument("--full", action="store_true", help="also emit the negative sector")

    p = sub.add_parser("dos", parents=[common], help="density of states histogram")
    p.add_argument("-M", "--grid", type=int, help="k-grid size (default: -N)")
    p.add_argument("-B", "--bins", type=int, default=200)

    p = sub.add_parser("scan", parents=[common], help="scan gamma for the exceptional point")
    p.add_argument("--gamma-from", type=float, default=0.0)
    p.add_argument("--gamma-to", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=101)

    p = sub.add_parser("spectrum", parents=[common], help="closed-form spectrum report")
    p.add_argument("--vectors", action="store_true", help="include eigenvectors")

    sub.add_parser("verify", parents=[common], help="check symmetry and residual claims")
    return parser


def parse_config(argv):
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if v is not None or k in ("n", "delta")}
    return RunConfig(**fields).validate()


def build_lattice(config):
    if config.model == "rice-mele":
        return rice_mele_lattice(RiceMeleSpec(config.n, config.delta))
    if config.model == "bilayer":
        return bilayer_lattice(bilayer_spec(config))
    return load_lattice(config.lattice)


def bilayer_spec(config, n=None):
    return BilayerSpec(n or config.n, config.j_hop, config.t_hop, config.gamma)


def _emit(config, text):
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_bands(config):
    if config.model == "bilayer":
        grid = band_grid(bilayer_spec(config))
        if config.format == "json":
            text = json.dumps(
                {
                    "J": config.j_hop,
                    "T": config.t_hop,
                    "gamma": config.gamma,
                    "N": config.n,
                    "rows": [dict(zip(export.BAND_HEADER, r)) for r in grid.rows(config.full)],
                },
                indent=1,
            ) + "\n"
        else:
            text = export.band_grid_csv(grid, full=config.full)
    elif config.model == "rice-mele":
        k = rice_mele_k_grid(config.n)
        eps0, eps = rice_mele_dispersion(config.delta, k, config.gamma)
        text = export.rice_mele_bands_csv(k, eps0, eps, full=config.full)
    else:
        raise ConfigError("bands needs a translation-invariant model (rice-mele or bilayer)")
    _emit(config, text)


def cmd_dos(config):
    if config.model != "bilayer":
        raise ConfigError("dos is defined for the bilayer model only")
    grid = config.grid or config.n
    try:
        hist = dos_histogram(bilayer_spec(config), grid, config.bins)
    except BrokenPhase as exc:
        raise ComputeError(str(exc)) from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(config, export.dos_csv(hist))
    sidecar = export.dos_sidecar(hist)
    if config.output:
        Path(config.output).with_suffix(".json").write_text(sidecar)
    else:
        sys.stderr.write(sidecar)


def cmd_scan(config):
    lattice = build_lattice(config)
    gammas = np.linspace(config.gamma_from, config.gamma_to, config.steps)
    points = exceptional_scan(lattice, gammas)
    bracket = locate_transition(points)
    if config.format == "json":
        doc = {
            "points": [
                {"gamma": p.gamma, "fully_real": p.fully_real, "n_broken": p.n_broken}
                for p in points
            ],
            "transition": list(bracket) if bracket else None,
            "estimate": 0.5 * sum(bracket) if bracket else None,
        }
        _emit(config, json.dumps(doc, indent=1) + "\n")
    else:
        _emit(config, export.scan_csv(points))
    if bracket:
        print(f"transition between gamma={bracket[0]!r} and gamma={bracket[1]!r}", file=sys.stderr)
    else:
        print("no real-to-complex transition inside the scanned range", file=sys.stderr)


def cmd_spectrum(config):
    report = solve(assemble(build_lattice(config), config.gamma))
    for note in report.notices:
        print(note, file=sys.stderr)
    if config.format == "csv":
        _emit(config, export.spectrum_csv(report))
    else:
        _emit(config, export.spectrum_json(report, vectors=config.vectors))


def verify_report(config):
    """Run the symmetry, pairing, residual, probability and DOS checks."""
    lattice = build_lattice(config)
    h = assemble(lattice, config.gamma)
    dec = svd(lattice.coupling)
    report = solve(h, dec)
    reference = solve(assemble(lattice, 0.0), dec)
    scale = h.norm() or 1.0
    checks = {}

    ct = check_ct_anticommutation(h)
    checks["ct_anticommutation"] = {
        "value": ct,
        "tolerance": 1e-12 * scale,
        "passed": ct <= 1e-12 * scale,
    }
    checks["conjugate_pairs"] = {
        "tolerance": 1e-9,
        "passed": bool(check_conjugate_pair_spectrum(report.eigenvalues(), 1e-9)),
    }
    res = eigenpair_residual(h, report)
    checks["eigenpair_residual"] = {"value": res, "tolerance": 1e-9, "passed": res <= 1e-9}

    defect = dirac_probability_defect(report, reference)
    skipped = sum(1 for p in report.pairs if p.broken or p.zero_mode)
    entry = {"tolerance": 1e-10, "skipped_channels": skipped}
    if defect is None:
        entry.update(passed=None, skipped="no unbroken channels")
    else:
        entry.update(value=defect, passed=defect <= 1e-10)
    checks["dirac_probability"] = entry

    if config.model == "bilayer" and abs(config.gamma) <= min_coupling_energy(bilayer_spec(config)):
        m = max(64, config.n + config.n % 2)
        hist = dos_histogram(bilayer_spec(config), m, 64)
        err = abs(hist.integral() - 2.0)
        checks["dos_normalization"] = {"value": hist.integral(), "tolerance": 1e-6, "passed": err <= 1e-6}
    else:
        checks["dos_normalization"] = {"passed": None, "skipped": "not applicable"}

    passed = all(c["passed"] is not False for c in checks.values())
    return {
        "model": config.model,
        "gamma": config.gamma,
        "gamma_c": None if math.isinf(report.gamma_c) else report.gamma_c,
        "fully_real": report.fully_real,
        "checks": checks,
        "passed": passed,
    }


def cmd_verify(config):
    _emit(config, json.dumps(verify_report(config), indent=1) + "\n")


HANDLERS = {
    "bands": cmd_bands,
    "dos": cmd_dos,
    "scan": cmd_scan,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


def _check_threads_env():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def run(config):
    """Execute a validated :class:`RunConfig`; return the process exit status."""
    try:
        _check_threads_env()
        config.validate()
        HANDLERS[config.command](config)
    except ConfigError as exc:
        _diagnostic(exc)
        return 2
    except (OddSize, DimensionMismatch, BrokenBipartiteness, OSError) as exc:
        _diagnostic(exc)
        return 2
    except (ComputeError, BrokenPhase, OutsideRegime, NoConvergence) as exc:
        _diagnostic(exc)
        return 3
    except (CTBandsError, ValueError) as exc:
        _diagnostic(exc)
        return 2
    return 0


def _diagnostic(exc):
    message = " ".join(str(exc).split())
    print(f"ctbands: error: {message}", file=sys.stderr)


def main(argv=None):
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        _diagnostic(exc)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
