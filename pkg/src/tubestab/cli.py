"""Command line: gen, verify, stab, transform, suite, extract.

Machine output (JSON, floats rounded to 12 significant digits) goes to
stdout; the run manifest and all diagnostics go to stderr.  Exit codes:
0 success, 1 falsified or failed verification, 2 usage or schema error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cayley as cy
from . import detrep as dr
from . import domains as dm
from . import mvpoly as mv
from . import numkernel as nk
from . import stability as st
from . import suites as su
from .config import DEFAULT_TOLERANCES, VERSION, default_seed
from .errors import SchemaError, TubestabError, UnknownSuite
from .mvpoly import MultiPoly
from .serialization import SCHEMA, dumps, matrix_from_json, matrix_to_json, to_plain, vector_from_json, vector_to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
STRUCTURES = ("polydisk", "halfplane", "cartan", "skew", "lorentz2", "lorentzn", "lieball")
MAPS = ("phi", "phi_inv", "Phi_n", "Phi_n_inv", "Phi_2_link", "psi", "psi_inv", "matrix_cayley",
        "matrix_cayley_inv", "eta", "eta_inv", "X_zeta")


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    argv: list
    seed: int | None
    tolerances: dict = field(default_factory=lambda: DEFAULT_TOLERANCES.to_json())
    wall_time: float = 0.0
    outcomes: list = field(default_factory=list)
    tool: str = "tubestab"
    version: str = VERSION

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "manifest", "tool": self.tool, "version": self.version,
                "command": self.command, "argv": self.argv, "seed": self.seed, "tolerances": self.tolerances,
                "wall_time": self.wall_time, "outcomes": self.outcomes}


# ---------------------------------------------------------------------------
# input helpers


def load_json(source: str):
    """Parse inline JSON (starting with '{' or '[') or the contents of a file ('-' = stdin)."""
    text = source
    where = "<inline>"
    if not source.lstrip().startswith(("{", "[")):
        where = source
        try:
            text = sys.stdin.read() if source == "-" else Path(source).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{where}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _check_schema(obj, what: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{what}: expected a JSON object")
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"{what}: unsupported schema {obj.get('schema')!r}")
    return obj


def load_poly(source: str) -> MultiPoly:
    obj = _check_schema(load_json(source), "polynomial")
    if obj.get("kind") == "bundle":
        obj = obj["p"]
    return MultiPoly.from_json(obj)


def load_rep(source: str) -> dr.DetRep:
    obj = _check_schema(load_json(source), "representation")
    if obj.get("kind") == "bundle":
        obj = obj["rep"]
    return dr.DetRep.from_json(obj)


def parse_ints(text: str | None) -> list[int]:
    if text is None or text == "":
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def parse_point(text: str) -> np.ndarray:
    """Comma-separated Python complex literals, e.g. '0.3,0.4j,1+2j'."""
    try:
        return np.array([complex(t.strip().replace(" ", "")) for t in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed(0)


# ---------------------------------------------------------------------------
# gen


def _domain_for(structure: str, args, d: int) -> dm.DomainSpec:
    if structure == "polydisk":
        return dm.DomainSpec("PolyDisk", {"d": d})
    if structure == "halfplane":
        return dm.DomainSpec("HalfPlaneTube", {"d": d})
    if structure == "cartan":
        factors = [dm.DomainSpec("MatrixUHP", {"l": l}) for l in parse_ints(args.uhp)]
        factors += [dm.DomainSpec("SiegelUHP", {"s": s}) for s in parse_ints(args.suhp)]
        return dm.DomainSpec("CartanProduct", {"factors": factors})
    if structure == "skew":
        return dm.DomainSpec("SkewDomain", {"dim": 2 * args.n})
    if structure in ("lorentz2", "lorentzn"):
        return dm.DomainSpec("LorentzTube", {"n": 2 if structure == "lorentz2" else args.n})
    return dm.DomainSpec("LieBall", {"n": args.n})


def _size_for(structure: str, args) -> int:
    if structure in ("polydisk", "halfplane"):
        N = parse_ints(args.N) or [1] * (args.dims or 1)
        if args.dims is not None and len(N) != args.dims:
            raise UsageError(f"--N lists {len(N)} multiplicities but --dims is {args.dims}")
        return sum(N)
    if structure == "cartan":
        smap = cy.StructureMap("CartanBlocks", {"uhp": parse_ints(args.uhp), "suhp": parse_ints(args.suhp),
                                                "N": parse_ints(args.N), "M": parse_ints(args.M)})
        return smap.dim
    if structure == "skew":
        return 2 * args.n * (parse_ints(args.N) or [1])[0]
    if structure == "lorentz2":
        return 2 * args.k
    return args.n * args.k


def cmd_gen(args, manifest: RunManifest) -> tuple[int, object]:
    seed = _seed(args)
    manifest.seed = seed
    s = args.structure
    if args.K:
        K = matrix_from_json(_check_schema(load_json(args.K), "K"))
    else:
        K = nk.random_contraction(_size_for(s, args), args.norm, np.random.default_rng(seed))
    N = parse_ints(args.N)
    q = None
    if s in ("polydisk", "halfplane"):
        N = N or [1] * (args.dims or 1)
        ptilde, disc = dr.polydisk_rep_from_contraction(K, N)
        if s == "polydisk":
            p, rep = ptilde, disc
        else:
            rep = dr.cayley_push_halfplane(K, N)
            # independent route: Cayley substitution of the disc polynomial, divided by det(I - K)
            p = mv.mobius_substitute(ptilde, N, "halfplane_to_disc").scale(1 / rep.metadata["det_I_minus_K"])
        d = len(N)
    elif s == "cartan":
        rep = dr.cartan_rep_from_contraction(K, parse_ints(args.uhp), parse_ints(args.suhp), parse_ints(args.N), parse_ints(args.M))
        p, d = dr.extract_polynomial(rep), rep.nvars
    elif s == "skew":
        rep = dr.skew_rep_from_contraction(K, args.n, (N or [1])[0])
        p, d = dr.extract_polynomial(rep), rep.nvars
    elif s == "lorentz2":
        rep = dr.lorentz2_rep_from_contraction(K, args.k)
        p, d = dr.extract_polynomial(rep), 2
    elif s == "lorentzn":
        rep = dr.lorentzn_rep_from_contraction(K, args.n, args.k)
        p, d = dr.extract_polynomial(rep), args.n
    else:
        rep = dr.lieball_rep_from_contraction(K, args.n, args.k)
        p, d = dr.extract_polynomial(rep), args.n
    domain = _domain_for(s, args, d)
    out = {"schema": SCHEMA, "kind": "bundle", "structure": s, "seed": seed, "K": matrix_to_json(K),
           "p": p.to_json(), "q": q, "rep": rep.to_json(), "domain": domain.to_json(),
           "metadata": to_plain(rep.metadata)}
    manifest.outcomes.append({"check": "gen", "structure": s, "size": int(K.shape[0]), "degree": p.degree})
    if args.out:
        Path(args.out).write_text(dumps(out) + "\n")
        return EXIT_OK, {"schema": SCHEMA, "kind": "written", "path": args.out}
    return EXIT_OK, out


def cmd_verify(args, manifest: RunManifest) -> tuple[int, object]:
    seed = _seed(args)
    manifest.seed = seed
    if args.bundle:
        p = load_poly(args.bundle)
        rep = load_rep(args.bundle)
        qobj = load_json(args.bundle).get("q")
        q = MultiPoly.from_json(qobj) if qobj else None
    else:
        if not (args.p and args.rep):
            raise UsageError("verify needs --bundle or both --p and --rep")
        p, rep = load_poly(args.p), load_rep(args.rep)
        q = load_poly(args.q) if args.q else None
    v = dr.verify_rep(p, q, rep, samples=args.samples, seed=seed, coefficients=args.coefficients)
    manifest.outcomes.append({"check": "verify", "verdict": "pass" if v.verdict else "fail"})
    return (EXIT_OK if v.verdict else EXIT_FAIL), {"schema": SCHEMA, "kind": "verification", **v.to_json()}


def cmd_stab(args, manifest: RunManifest) -> tuple[int, object]:
    seed = _seed(args)
    manifest.seed = seed
    p = load_poly(args.p)
    if args.domain:
        spec = dm.DomainSpec.from_json(_check_schema(load_json(args.domain), "domain"))
    else:
        obj = load_json(args.p)
        if obj.get("kind") != "bundle" or "domain" not in obj:
            raise UsageError("stab needs --domain unless --p is a bundle carrying one")
        spec = dm.DomainSpec.from_json(obj["domain"])
    if spec.nvars != p.nvars:
        raise SchemaError(f"domain has {spec.nvars} variables, polynomial has {p.nvars}")
    witnesses = None
    if args.witnesses:
        wobj = load_json(args.witnesses)
        witnesses = [vector_from_json(w) for w in (wobj if isinstance(wobj, list) else [wobj])]
    r = st.sampled_stability(p, spec, args.samples, seed, falsify_tol=args.falsify_tol, witnesses=witnesses)
    out = {"schema": SCHEMA, "kind": "stability", **r.to_json()}
    if args.weight:
        e = st.strictness_estimate(p, spec, args.weight, max(args.samples // 4, 1), seed)
        out["strictness"] = e.to_json()
    manifest.outcomes.append({"check": "stab", "verdict": r.verdict})
    return (EXIT_FAIL if r.falsified else EXIT_OK), out


def _transform(name: str, x, n: int | None):
    if name == "phi":
        return cy.phi(x)
    if name == "phi_inv":
        return cy.phi_inv(x)
    if name == "Phi_n":
        return cy.Phi_n(x)
    if name == "Phi_n_inv":
        return cy.Phi_n_inv(x)
    if name == "Phi_2_link":
        w1, w2, err = cy.Phi_2_pencil_link(x[0], x[1])
        return {"w": vector_to_json([w1, w2]), "consistency": float(err)}
    if name == "eta":
        z, res = cy.eta(x)
        return {"zeta": vector_to_json(z), "residual": float(res)}
    if name == "eta_inv":
        w, res = cy.eta_inv(x)
        return {"w": vector_to_json(w), "residual": float(res)}
    if name == "X_zeta":
        return cy.build_X_zeta(x)
    if name == "psi":
        return cy.psi(x)
    if name == "psi_inv":
        return cy.psi_inv(x)
    if name == "matrix_cayley":
        return nk.matrix_cayley(x)
    return nk.matrix_cayley_inv(x)


MATRIX_MAPS = ("psi", "psi_inv", "matrix_cayley", "matrix_cayley_inv")


def cmd_transform(args, manifest: RunManifest) -> tuple[int, object]:
    if args.point is not None:
        x = parse_point(args.point)
    elif args.input:
        obj = _check_schema(load_json(args.input), "input")
        x = matrix_from_json(obj) if "rows" in obj else vector_from_json(obj)
    else:
        raise UsageError("transform needs --point or --input")
    if args.map in MATRIX_MAPS and x.ndim != 2:
        raise UsageError(f"{args.map} takes a matrix (--input with rows/cols)")
    if args.map not in MATRIX_MAPS and x.ndim != 1:
        raise UsageError(f"{args.map} takes a vector")
    y = _transform(args.map, x, None)
    if isinstance(y, dict):
        body = y
    elif np.ndim(y) == 2:
        body = {"matrix": matrix_to_json(y)}
    else:
        body = {"vector": vector_to_json(np.atleast_1d(y))}
    manifest.outcomes.append({"check": "transform", "map": args.map})
    return EXIT_OK, {"schema": SCHEMA, "kind": "transform", "map": args.map, **body}


def cmd_suite(args, manifest: RunManifest) -> tuple[int, object]:
    seed = _seed(args)
    manifest.seed = seed
    names = list(su.SUITES) if args.name == "all" else [args.name]
    if args.name != "all" and args.name not in su.SUITES:
        raise UnknownSuite(f"unknown suite {args.name!r}; choose from {', '.join(list(su.SUITES) + ['all'])}")
    if args.threads > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(lambda n: su.run_suite(n, seed)[0], names))
    else:
        reports = [su.run_suite(n, seed)[0] for n in names]
    ok = all(r.passed for r in reports)
    for r in reports:
        manifest.outcomes.append({"check": f"suite:{r.name}", "passed": r.passed, "wall_time": r.wall_time})
        print(f"suite {r.name}: {'pass' if r.passed else 'FAIL'} ({r.wall_time:.1f} s)", file=sys.stderr)
    body = []
    for r in reports:
        j = r.to_json()
        j.pop("wall_time")
        body.append(j)
    return (EXIT_OK if ok else EXIT_FAIL), {"schema": SCHEMA, "kind": "suite", "name": args.name, "seed": seed,
                                            "passed": ok, "reports": body}


def cmd_extract(args, manifest: RunManifest) -> tuple[int, object]:
    rep = load_rep(args.rep)
    degrees = parse_ints(args.degrees) or None
    p = dr.extract_polynomial(rep, degrees=degrees, max_points=args.max_points)
    manifest.outcomes.append({"check": "extract", "degree": p.degree, "terms": len(p.terms)})
    return EXIT_OK, p.to_json()


# ---------------------------------------------------------------------------
# entry points


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tubestab", description="Determinantal representations and stability on tube domains.")
    ap.add_argument("--version", action="version", version=f"tubestab {VERSION}")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for multi-suite runs")
    ap.add_argument("--manifest", help="also write the run manifest to this file")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a representation from a random or given contraction")
    g.add_argument("--structure", choices=STRUCTURES, required=True)
    g.add_argument("--dims", type=int, help="number of variables (polydisk/halfplane)")
    g.add_argument("--N", help="multiplicities, comma separated")
    g.add_argument("--M", help="Siegel block multiplicities (cartan)")
    g.add_argument("--uhp", help="square block sizes (cartan)")
    g.add_argument("--suhp", help="symmetric block sizes (cartan)")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--norm", type=float, default=0.9, help="operator norm of the random contraction")
    g.add_argument("--K", help="matrix JSON for K instead of a random one")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="write the bundle here instead of stdout")

    v = sub.add_parser("verify", help="verify p q = prefactor det(pencil)")
    v.add_argument("--bundle")
    v.add_argument("--p")
    v.add_argument("--q")
    v.add_argument("--rep")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--coefficients", action="store_true", help="also compare interpolated coefficients")
    v.add_argument("--seed", type=int)

    s = sub.add_parser("stab", help="sampled stability test")
    s.add_argument("--p", required=True)
    s.add_argument("--domain")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--falsify-tol", type=float, default=DEFAULT_TOLERANCES.falsify)
    s.add_argument("--weight", choices=st.WEIGHT_KINDS)
    s.add_argument("--witnesses", help="vector JSON (or list) of previously found witnesses")
    s.add_argument("--seed", type=int)

    t = sub.add_parser("transform", help="apply a Cayley-type map")
    t.add_argument("--map", choices=MAPS, required=True)
    t.add_argument("--point", help="comma-separated complex literals")
    t.add_argument("--input", help="vector or matrix JSON")

    u = sub.add_parser("suite", help="run an identity suite")
    u.add_argument("name")
    u.add_argument("--seed", type=int)

    e = sub.add_parser("extract", help="interpolate the polynomial of a representation")
    e.add_argument("--rep", required=True)
    e.add_argument("--degrees")
    e.add_argument("--max-points", type=int, default=dr.MAX_GRID)
    return ap


COMMANDS = {"gen": cmd_gen, "verify": cmd_verify, "stab": cmd_stab, "transform": cmd_transform,
            "suite": cmd_suite, "extract": cmd_extract}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    manifest = RunManifest(args.command, argv, getattr(args, "seed", None))
    t0 = time.perf_counter()
    old_err = sys.stderr
    sys.stderr = stderr
    try:
        code, out = COMMANDS[args.command](args, manifest)
    except (UsageError, SchemaError, UnknownSuite) as exc:
        print(f"tubestab: error: {exc}", file=stderr)
        return EXIT_USAGE
    except TubestabError as exc:
        print(f"tubestab: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_USAGE
    finally:
        sys.stderr = old_err
    manifest.wall_time = time.perf_counter() - t0
    stdout.write(dumps(out) + "\n")
    mtext = dumps(manifest)
    print(mtext, file=stderr)
    if args.manifest:
        Path(args.manifest).write_text(mtext + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
