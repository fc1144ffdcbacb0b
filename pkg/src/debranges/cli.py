"""Command line front end.

Every command writes machine-readable output into ``--out`` and echoes its
resolved configuration into the JSON.  Exit codes: 0 success (negative
verdicts included), 2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .characterization import (PW_FUNCTIONS, PairingFunction, check_pair,
                               check_schrodinger_L2, construct_from_f, pairing_eval)
from .functions import SchrodingerDB
from .potential import Potential, PotentialError
from .products import CanonicalProduct, ProductDB, ZeroSequence, perturbed_sine_sequence
from .resonances import certify_strip, find_resonances, remark5_fixture, strip_curve
from .schrodinger import ShootingError, positivity_shift
from .spectra import (SpectrumError, asymptotic_fit, compute_spectra, fit_report_json,
                      write_spectra_csv)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def _dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _gnuplot(path: Path, data: str, using: str, title: str, extra: str = "") -> None:
    path.write_text(
        "set terminal pngcairo size 900,600\n"
        f"set output '{path.stem}.png'\n"
        "set datafile separator ','\n"
        "set key top right\n"
        f"{extra}"
        f"plot '{data}' skip 1 using {using} with lines title '{title}'\n")


# -- source parsing -----------------------------------------------------------

def parse_potential(spec: str) -> Potential:
    """A registry name or ``@path`` to a JSON potential."""
    try:
        if spec.startswith("@"):
            return Potential.from_json(Path(spec[1:]).read_text())
        return Potential.registry(spec)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read potential {spec!r}: {exc}") from exc
    except PotentialError as exc:
        raise ConfigError(str(exc)) from exc


def _zero_file_source(path: str):
    try:
        d = json.loads(Path(path).read_text())
        lam = ZeroSequence.from_dict(d["lambda"])
        mu = ZeroSequence.from_dict(d["mu"])
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read zero sequences from {path!r}: {exc}") from exc
    return ProductDB(CanonicalProduct(lam, float(d.get("K_A", 1.0))),
                     CanonicalProduct(mu, float(d.get("K_B", 1.0))), label=f"zeros:{path}")


def parse_source(spec: str):
    """``q:<potential>``, ``fixture:remark5``, ``fixture:perturbed`` or ``zeros:<file>``."""
    kind, _, rest = spec.partition(":")
    if kind == "q":
        q = positivity_shift(parse_potential(rest))
        return SchrodingerDB(q), {"potential": q.to_dict()}
    if kind == "fixture":
        if rest == "remark5":
            return remark5_fixture().E, {}
        if rest == "perturbed":
            A = CanonicalProduct(perturbed_sine_sequence(2000, 1.25), 1.0)
            B = CanonicalProduct(ZeroSequence.lattice_sequence(2000, "cosine", 0.0), 1.0)
            return ProductDB(A, B, label="fixture:perturbed"), {}
        raise ConfigError(f"unknown fixture {rest!r}")
    if kind == "zeros":
        return _zero_file_source(rest), {}
    raise ConfigError(f"cannot interpret source {spec!r}")


# -- commands -------------------------------------------------------------

def cmd_spectrum(cfg: dict, out: Path) -> int:
    q = parse_potential(cfg["q"])
    n = int(cfg["n"])
    if n < 5:
        raise ConfigError("--n must be at least 5")
    q = positivity_shift(q)
    s = compute_spectra(q, n, float(cfg["tol"]))
    fit = asymptotic_fit(s, cfg["fit_model"])
    write_spectra_csv(out / "spectra.csv", s, fit)
    (out / "fit.json").write_text(fit_report_json(fit, {
        "config": cfg, "potential": q.to_dict(), "shift": q.shift,
        "interlacing": s.interlaces()}) + "\n")
    return EXIT_OK


def _pairing_plot(F, C_hat, out: Path, xmax: float = 50.0, n: int = 2001):
    x = np.linspace(-xmax, xmax, n)
    vals = np.real(F(x)) - C_hat
    _write_rows(out / "plot_pairing.csv", ["x", "F_minus_C"], zip(x, vals))
    _gnuplot(out / "plot_pairing.gp", "plot_pairing.csv", "1:2", "F(x) - C")


def cmd_characterize(cfg: dict, out: Path) -> int:
    src, meta = parse_source(cfg["source"])
    opts = dict(M=int(cfg["m"]), tail_fraction=float(cfg["tail_fraction"]), atol=float(cfg["atol"]))
    if cfg["mode"] == "pair":
        if not cfg.get("reference"):
            raise ConfigError("pair mode needs --reference")
        ref, ref_meta = parse_source(cfg["reference"])
        verdict = check_pair(src, ref, **opts)
        F = PairingFunction(src, ref, "pair")
        meta["reference"] = ref_meta
    elif cfg["mode"] == "trig":
        verdict = check_schrodinger_L2(src, **opts)
        F = PairingFunction(src)
    else:
        raise ConfigError(f"unknown mode {cfg['mode']!r}")
    report = verdict.to_dict()
    report.update({"config": cfg, "source": meta})
    _dump(out / "membership.json", report)
    M = verdict.report.M
    m = np.arange(-M, M + 1)
    _write_rows(out / "samples.csv", ["m", "x", "F_minus_C"],
                zip(m, np.pi / 2 * m, verdict.f_samples))
    _pairing_plot(lambda x: pairing_eval(F, x), verdict.C_hat, out)
    return EXIT_OK


def cmd_construct(cfg: dict, out: Path) -> int:
    if cfg["f"] not in PW_FUNCTIONS:
        raise ConfigError(f"unknown f {cfg['f']!r}; choose from {sorted(PW_FUNCTIONS)}")
    db = construct_from_f(cfg["f"], float(cfg["amp"]), n_zeros=int(cfg["n_zeros"]),
                          smallness=float(cfg["smallness"]))
    d = db.to_dict()
    if db.interlacing_ok:
        v = check_schrodinger_L2(db, M=int(cfg["m"]))
        d["round_trip"] = {"verdict": v.verdict, "C_hat": v.C_hat, "checks": v.checks,
                           "Q_sup_error": db.report["Q_sup_error"]}
    else:
        d["round_trip"] = None
    d["config"] = cfg
    _dump(out / "constructed.json", d)
    n = np.arange(1, len(db.lam) + 1)
    _write_rows(out / "zeros.csv", ["n", "lambda", "mu"], zip(n, db.lam, db.mu))
    return EXIT_OK


def cmd_resonances(cfg: dict, out: Path) -> int:
    xmax = float(cfg["xmax"])
    if not xmax > 0 or not float(cfg["ymin"]) < 0:
        raise ConfigError("need --xmax > 0 and --ymin < 0")
    src, meta = parse_source(cfg["source"])
    rs = find_resonances(src, x_max=xmax, y_min=float(cfg["ymin"]), tol=float(cfg["tol"]))
    C = (rs.strip_C if rs.strip_C is not None else 0.0) + float(cfg["margin"])
    cx = float(cfg["certify_xmax"]) if cfg.get("certify_xmax") is not None else xmax
    cert = certify_strip(src, C, cx, delta_gap=rs.delta_gap)
    d = rs.to_dict()
    d.update({"certification": cert.to_dict(), "config": cfg, "source": meta})
    _dump(out / "resonances.json", d)
    rs.write_csv(out / "resonances.csv")
    _write_rows(out / "plot_zeros.csv", ["x", "y"], ((z.real, z.imag) for z in rs.zeros))
    x, y = strip_curve(C, cx)
    _write_rows(out / "plot_strip.csv", ["x", "y"], zip(x, y))
    (out / "plot_resonances.gp").write_text(
        "set terminal pngcairo size 900,600\n"
        "set output 'plot_resonances.png'\n"
        "set datafile separator ','\n"
        "plot 'plot_strip.csv' skip 1 using 1:2 with lines title 'strip boundary', \\\n"
        "     'plot_zeros.csv' skip 1 using 1:2 with points pt 7 title 'resonances'\n")
    return EXIT_OK


COMMANDS = {
    "spectrum": (cmd_spectrum, {"q": None, "n": 30, "tol": 1e-12, "fit_model": "inverse-square"}),
    "characterize": (cmd_characterize, {"source": None, "reference": None, "mode": "trig",
                                        "m": 2000, "tail_fraction": 0.1, "atol": 1e-6}),
    "construct": (cmd_construct, {"f": None, "amp": 1.0, "n_zeros": 100, "smallness": 0.1,
                                  "m": 2000}),
    "resonances": (cmd_resonances, {"source": None, "xmax": 60.0, "ymin": -8.0, "tol": 1e-9,
                                    "margin": 0.5, "certify_xmax": None}),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="debranges", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--config", help="JSON file whose keys override the flags")

    sp = sub.add_parser("spectrum", help="Dirichlet and mixed spectra with asymptotic fit")
    sp.add_argument("--q", help="potential: registry name (zero, const:c, cos:a,k, linear:a,b) or @file.json")
    sp.add_argument("--n", type=int, help="number of eigenvalues per spectrum")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--fit-model", dest="fit_model", choices=["inverse-square", "mean"])
    common(sp)

    sp = sub.add_parser("characterize", help="test the pairing function for Const + L2")
    sp.add_argument("--source", help="q:<potential>, fixture:remark5, fixture:perturbed, zeros:<file>")
    sp.add_argument("--reference", help="reference source for pair mode")
    sp.add_argument("--mode", choices=["trig", "pair"])
    sp.add_argument("--m", type=int, help="lattice half-size M")
    sp.add_argument("--tail-fraction", dest="tail_fraction", type=float)
    sp.add_argument("--atol", type=float)
    common(sp)

    sp = sub.add_parser("construct", help="build E from a small even PW_2 function")
    sp.add_argument("--f", help=f"one of {sorted(PW_FUNCTIONS)}")
    sp.add_argument("--amp", type=float)
    sp.add_argument("--n-zeros", dest="n_zeros", type=int)
    sp.add_argument("--smallness", type=float)
    sp.add_argument("--m", type=int)
    common(sp)

    sp = sub.add_parser("resonances", help="zeros of E in the lower half-plane and strip certificate")
    sp.add_argument("--source")
    sp.add_argument("--xmax", type=float)
    sp.add_argument("--ymin", type=float)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--margin", type=float)
    sp.add_argument("--certify-xmax", dest="certify_xmax", type=float)
    common(sp)
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    fn, defaults = COMMANDS[args.command]
    cfg = dict(defaults)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.config:
        try:
            extra = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
        if not isinstance(extra, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(extra) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        cfg.update(extra)
    missing = [k for k, v in cfg.items() if v is None and k in ("q", "source", "f")]
    if missing:
        raise ConfigError(f"missing required setting(s): {', '.join(missing)}")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = resolve_config(args)
        out.mkdir(parents=True, exist_ok=True)
        fn = COMMANDS[args.command][0]
        return fn(cfg, out)
    except (ConfigError, PotentialError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ShootingError, SpectrumError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        try:
            out.mkdir(parents=True, exist_ok=True)
            _dump(out / "error.json", {"command": args.command, "error": type(exc).__name__,
                                       "message": str(exc)})
        except OSError:
            pass
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
