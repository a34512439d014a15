"""Command-line front end.

Every command prints one JSON document whose first field is a run manifest
(command, inputs, seed, parameters, version).  Re-running the manifest
reproduces the output byte for byte.

Exit codes: 0 ok, 2 parse error, 3 unsupported structure, 4 inadmissible
tails, 5 background failed to condense.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, bundled
from .ca import Ca1D, Ca2D, NotInvariant, check_block_injectivity, rule_from_json, verify_weak_invariance
from .defect import InadmissibleTails, classify, defect_field, defect_set
from .spectral import lattice_model, spectral_model
from .subshift import SubshiftError, UnsupportedStructure, WangSpec, spec_from_json, spec_radius
from .symbolic import AlphabetError, CyclicConfig, config_from_json
from .tracker import (NoCondensation, detect_collisions, extract_particles, max_speed, random_config,
                      render_field_pgm, render_overlay_pgm, render_pgm, simulate, total_displacement,
                      verify_conservation)

EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_INADMISSIBLE, EXIT_NO_CONDENSATION = 0, 2, 3, 4, 5

# read by nothing: results never depend on the thread count
THREADS_ENV = "CADEFECTS_THREADS"


class ParseError(ValueError):
    pass


def _load(kind: str, ref: str) -> dict:
    """Read a JSON file, or a bundled entry when ``ref`` is not a path."""
    p = Path(ref)
    try:
        if p.exists():
            return json.loads(p.read_text(encoding="utf-8"))
        if ref in bundled.names(kind):
            return bundled.load_json(kind, ref)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"{ref}: {e}") from e
    raise ParseError(f"{ref}: no such file or bundled {kind[:-1]}")


def _parse(fn, obj: dict, ref: str):
    try:
        return fn(obj)
    except UnsupportedStructure:
        raise
    except (KeyError, TypeError, ValueError, AlphabetError) as e:
        raise ParseError(f"{ref}: {e}") from e


def load_subshift(ref: str):
    return _parse(spec_from_json, _load("subshifts", ref), ref)


def load_rule(ref: str | None):
    if ref is None:
        return None
    return _parse(rule_from_json, _load("rules", ref), ref)


def load_config(ref: str):
    return _parse(config_from_json, _load("configs", ref), ref)


def manifest(args: argparse.Namespace, inputs: dict, params: dict, seed=None) -> dict:
    return {"command": args.command, "inputs": inputs, "seed": seed, "params": params,
            "version": __version__}


def emit(doc: dict, out=None) -> None:
    out = out or sys.stdout
    out.write(json.dumps(doc, indent=2, ensure_ascii=False))
    out.write("\n")


# --------------------------------------------------------------------------
# commands


def cmd_spectrum(args) -> dict:
    spec = load_subshift(args.subshift)
    ca = load_rule(args.ca)
    man = manifest(args, {"subshift": args.subshift, "ca": args.ca}, {})
    if isinstance(spec, WangSpec):
        if ca is not None and not isinstance(ca, Ca2D):
            raise UnsupportedStructure("a 2D subshift needs a 2D rule")
        lm = lattice_model(spec)
        out = {"manifest": man, **lm.to_json()}
        if len(lm.components) == 1:
            out["group"] = lm.components[0].group.label
        return out
    if ca is not None and not isinstance(ca, Ca1D):
        raise UnsupportedStructure("a 1D subshift needs a 1D rule")
    model = spectral_model(spec, ca)
    out: dict = {"manifest": man}
    if len(model.frames) == 1:
        fr = model.frames[0]
        out["P"] = fr.period
        if model.phase_structures and model.phase_structures[0].rotation is not None:
            out["rotation"] = model.phase_structures[0].rotation
        if fr.K > 1:
            out["K"], out["S"] = fr.K, fr.S
        out["group"] = fr.group.label
    out.update(model.to_json())
    return out


def cmd_classify(args) -> dict:
    spec = load_subshift(args.subshift)
    ca = load_rule(args.ca)
    c = load_config(args.config)
    rep = classify(c, spec, ca, r=args.r, boundary=args.boundary)
    man = manifest(args, {"subshift": args.subshift, "config": args.config, "ca": args.ca},
                   {"r": args.r, "boundary": args.boundary})
    return {"manifest": man, **rep.to_json()}


def cmd_field(args) -> dict:
    spec = load_subshift(args.subshift)
    c = load_config(args.config)
    f = defect_field(c, spec, r_max=args.r_max, boundary=args.boundary)
    if args.pgm:
        Path(args.pgm).write_text(render_field_pgm(f.values), encoding="ascii")
    man = manifest(args, {"subshift": args.subshift, "config": args.config},
                   {"r_max": args.r_max, "boundary": args.boundary, "pgm": args.pgm})
    return {"manifest": man, "field": f.to_json(),
            "defect_set": [list(p) if isinstance(p, tuple) else p for p in defect_set(f)]}


def cmd_track(args) -> dict:
    ca = load_rule(args.ca)
    spec = load_subshift(args.subshift)
    if not isinstance(ca, Ca1D):
        raise UnsupportedStructure("tracking needs a 1D rule")
    if args.steps < 1:
        raise ParseError("--steps must be at least 1")
    if args.init is not None:
        init = load_config(args.init)
        if not isinstance(init, CyclicConfig):
            raise ParseError(f"{args.init}: initial condition must be cyclic")
        seed = None
    else:
        if args.width < 16:
            raise ParseError("--width must be at least 16")
        seed = args.seed
        init = random_config(ca.alphabet, args.width, seed)
    st = simulate(ca, init, args.steps)
    res = extract_particles(st, spec, r=args.r, burn_in=args.burn_in, ca=ca)
    events = detect_collisions(res)
    report = verify_conservation(events, res.tracks)
    totals = [None if x is None else str(x) for x in total_displacement(res)]
    known = {x for x in totals if x is not None}
    if args.pgm:
        k = ca.alphabet.size
        Path(f"{args.pgm}_spacetime.pgm").write_text(render_pgm(st.rows, k), encoding="ascii")
        Path(f"{args.pgm}_overlay.pgm").write_text(
            render_overlay_pgm(st.rows, res.masks, k, res.burn_in), encoding="ascii")
    params = {"width": init.length, "steps": args.steps, "burn_in": args.burn_in, "r": res.r,
              "pgm": args.pgm}
    man = manifest(args, {"ca": args.ca, "subshift": args.subshift, "init": args.init}, params, seed)
    return {
        "manifest": man,
        "N": res.N, "T": res.T, "r": res.r, "burn_in": res.burn_in,
        "tracks": [t.to_json() for t in res.tracks],
        "events": [e.to_json() for e in events],
        "conservation": report.to_json(),
        "total_displacement": {"constant": len(known) <= 1,
                               "values": sorted(known),
                               "unlabelled_rows": totals.count(None)},
        "max_speed": max_speed(res),
    }


def cmd_verify(args) -> dict:
    ca = load_rule(args.ca)
    spec = load_subshift(args.subshift)
    if not isinstance(ca, Ca1D) or isinstance(spec, WangSpec):
        raise UnsupportedStructure("verify handles 1D rules and subshifts")
    r = spec_radius(spec) if args.r is None else args.r
    cert = verify_weak_invariance(ca, spec, r)
    man = manifest(args, {"ca": args.ca, "subshift": args.subshift}, {"r": args.r})
    out = {"manifest": man, **cert.to_json()}
    if cert.invariant:
        out["injective"] = check_block_injectivity(ca, spec, r)
    return out


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cadefects", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="rational spectrum and displacement group")
    s.add_argument("--subshift", required=True)
    s.add_argument("--ca")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("classify", help="classify the defect of a configuration")
    s.add_argument("--subshift", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--ca")
    s.add_argument("--r", type=int)
    s.add_argument("--boundary", choices=("open", "periodic"), default="open")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("field", help="defect field and defect set")
    s.add_argument("--subshift", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--r-max", type=int)
    s.add_argument("--boundary", choices=("open", "periodic"), default="open")
    s.add_argument("--pgm", metavar="FILE", help="write the field as a PGM heat map")
    s.set_defaults(func=cmd_field)

    s = sub.add_parser("track", help="simulate, extract particles and check collisions")
    s.add_argument("--ca", required=True)
    s.add_argument("--subshift", required=True)
    s.add_argument("--width", type=int, default=256)
    s.add_argument("--steps", type=int, default=256)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--init", help="cyclic initial configuration (overrides --width/--seed)")
    s.add_argument("--burn-in", type=int, default=50)
    s.add_argument("--r", type=int)
    s.add_argument("--pgm", metavar="PREFIX", help="write PREFIX_spacetime.pgm and PREFIX_overlay.pgm")
    s.set_defaults(func=cmd_track)

    s = sub.add_parser("verify", help="invariance certificate of a subshift under a rule")
    s.add_argument("--ca", required=True)
    s.add_argument("--subshift", required=True)
    s.add_argument("--r", type=int)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    try:
        doc = args.func(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except InadmissibleTails as e:
        print(f"inadmissible: {e}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except NoCondensation as e:
        print(f"no condensation: {e}", file=sys.stderr)
        return EXIT_NO_CONDENSATION
    except (UnsupportedStructure, NotInvariant) as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except SubshiftError as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    emit(doc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
