"""Command-line interface: censuses, verifications, and searches.

Every successful run writes one machine-readable report (JSON by
default, CSV for tabular data) that embeds q, the modulus spec and the
tool version.  Reports are byte-identical across runs with the same
configuration: worker counts and timings never reach the output.

Exit codes: 0 success, 1 a verification failed (a claim checked by the
run does not hold), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import __version__, cyclic, fourfold, geom, hermcount, qh
from .gf import (CompositeCharacteristic, EvenCharacteristicUnsupported,
                 ReducibleModulus, UnsupportedScale, parse_spec_string,
                 tower_for_q_squared)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


def _tower_from_args(args):
    if getattr(args, "mod", None):
        return parse_spec_string(args.mod)
    return tower_for_q_squared(args.q)


def _geometry(args) -> geom.Geometry:
    return geom.Geometry(args.q, tower=_tower_from_args(args))


def _envelope(args, payload: dict) -> dict:
    tower = _tower_from_args(args)
    return {"tool": "pgtensors", "version": __version__,
            "command": args.command, "q": args.q,
            "modulus": tower.spec_string, "seed": getattr(args, "seed", 0),
            **payload}


def _emit(args, report: dict, csv_rows: list[str] | None = None) -> None:
    if args.format == "csv":
        if csv_rows is None:
            raise ValueError("this command has no CSV form")
        text = "\n".join(csv_rows) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------

def cmd_census(args) -> int:
    g = _geometry(args)
    rep = g.orbit_census(workers=args.workers)
    _emit(args, _envelope(args, rep.to_jsonable()), rep.to_csv_rows())
    return EXIT_OK


def cmd_plane_table(args) -> int:
    g = _geometry(args)
    z1, z2 = g.zsets()
    labels = [args.label] if args.label else list(geom.LABELS)
    tables = {}
    ok = True
    for tag in labels:
        xi = None
        if tag == "S1":
            if not z1:
                continue
            xi = z1[0]
        elif tag == "S2":
            xi = z2[0]
        P = geom.class_representative(g, tag, xi)
        rep = g.plane_distribution(P)
        checks = geom.plane_distribution_identities(g, rep)
        ok &= all(v for k, v in checks.items() if k.endswith("_ok"))
        tables[tag] = {"distribution": rep.to_jsonable(), "identities": checks}
    _emit(args, _envelope(args, {"tables": tables}))
    return EXIT_OK if ok else EXIT_VERIFY


def _parse_specs(args, g):
    s1 = qh.SurfaceSpec.parse(args.s1, g)
    s2 = qh.SurfaceSpec.parse(args.s2, g)
    return s1, s2


def cmd_qh_build(args) -> int:
    g = _geometry(args)
    K = qh.qh_join(g, *_parse_specs(args, g))
    _emit(args, _envelope(args, K.to_jsonable()))
    return EXIT_OK


def cmd_qh_verify(args) -> int:
    g = _geometry(args)
    K = qh.qh_join(g, *_parse_specs(args, g))
    rep = qh.two_intersection_check(g, K)
    payload = {"join": {"size": len(K), "spec": K.provenance},
               "verification": rep.to_jsonable()}
    _emit(args, _envelope(args, payload))
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_pavese(args) -> int:
    var, space = qh.pavese_variety(args.n, args.q)
    payload: dict = {"N": args.n, "size": len(var)}
    ok = True
    if args.n == 3:
        eq = qh.compare_with_line_union(args.q)
        payload["equals_line_union"] = eq
        ok &= eq
    else:
        sizes = space.hyperplane_section_sizes(var)
        herm = space.hyperplane_section_sizes(space.hermitian_variety())
        payload["sections"] = {str(k): v for k, v in sorted(sizes.items())}
        payload["hermitian_sections"] = {str(k): v for k, v in sorted(herm.items())}
        payload["two_intersection"] = set(sizes) == set(herm)
        ok &= payload["two_intersection"]
    _emit(args, _envelope(args, payload))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_belrank(args) -> int:
    from .gf import factorize, field_create
    (p, e), = factorize(args.q).items()
    tower = field_create(p, e, args.n)
    if args.tensor:
        M = cyclic.CyclicTensor.from_json(args.tensor, tower)
        rep = cyclic.bel_rank_report(M)
        _emit(args, _envelope(args, rep))
        return EXIT_OK
    rng = random.Random(args.seed)
    ranks = []
    for _ in range(args.count):
        M = _random_nonsingular_tensor(tower, rng)
        ranks.append(cyclic.bel_rank(M, stop_at=args.stop_at))
    payload = {"n": args.n, "count": args.count, "stop_at": args.stop_at,
               "ranks": sorted(set(ranks)),
               "histogram": {str(r): ranks.count(r) for r in sorted(set(ranks))},
               "qbound": cyclic.belrank_qbound(args.n) if args.n >= 3 else None}
    _emit(args, _envelope(args, payload))
    return EXIT_OK


def _random_nonsingular_tensor(tower, rng) -> cyclic.CyclicTensor:
    n = tower.n
    while True:
        entries = tuple(tuple(rng.randrange(tower.order) for _ in range(n))
                        for _ in range(n))
        M = cyclic.CyclicTensor(tower, entries)
        if cyclic.is_nonsingular_tensor(M):
            return M


def cmd_semifield_test(args) -> int:
    tower = _tower_from_args(args) if args.mod else None
    M = cyclic.CyclicTensor.from_json(args.tensor, tower)
    ns = cyclic.is_nonsingular_tensor(M)
    _emit(args, _envelope(args, {"nonsingular": ns}))
    return EXIT_OK


def cmd_zerocount(args) -> int:
    tower = _tower_from_args(args)
    xi = tower.element_from_string(args.xi).val if args.xi else None
    A = tower.element_from_string(args.param_a).val if args.param_a else None
    B = tower.element_from_string(args.param_b).val if args.param_b else None
    rep = hermcount.appendix_pipeline(args.q, xi=xi, A=A, B=B, tower=tower)
    _emit(args, _envelope(args, rep.to_jsonable()))
    internal = [d for d in rep.discrepancies if d["where"] != "closed-form"]
    return EXIT_OK if not internal else EXIT_VERIFY


def cmd_fourfold(args) -> int:
    g = _geometry(args)
    rng = random.Random(args.seed)
    if args.pencil:
        U = fourfold.FourfoldTensor.from_json(args.pencil, g)
    elif args.search_d:
        U = fourfold.find_witness_with_d(g, args.search_d, rng)
    else:
        U = fourfold.random_nonsingular_pencil(g, rng)
    d = fourfold.d_invariant(U)
    payload: dict = {"pencil": json.loads(U.to_json()), "nonsingular": True, "d": d}
    ok = True
    if d == 4:
        rep = fourfold.regulus_quadric_check(U)
        payload["regulus_check"] = rep
        ok &= rep.get("passed", False)
    _emit(args, _envelope(args, payload))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_errata(args) -> int:
    g = _geometry(args)
    errs = geom.errata_report(g)
    rows = ["source,row,column,q,xi,paper,computed"] + [
        f"{e['source']},{e['row']},{e.get('column','')},{e['q']},"
        f"{e.get('xi') or ''},{e['paper']},{e['computed']}" for e in errs]
    _emit(args, _envelope(args, {"errata": errs}), rows)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pgtensors",
        description="Exact tensor geometry over F_{q^2}: censuses, "
                    "quasi-Hermitian surface verification, zero counting.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, q_required=True):
        p.add_argument("--q", type=int, required=q_required, help="subfield order q")
        p.add_argument("--mod", help='modulus spec, e.g. "p=3,e=1,n=2,mod=1,0,1"')
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int,
                       default=int(os.environ.get("PGTENSORS_WORKERS", "1")))
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("census", help="orbit census of PG(3, q^2)")
    common(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("plane-table", help="per-class plane distributions")
    common(p)
    p.add_argument("--label", choices=geom.LABELS)
    p.set_defaults(func=cmd_plane_table)

    p = sub.add_parser("qh-build", help="build a quasi-Hermitian join")
    common(p)
    p.add_argument("--s1", required=True, help='"xi:<coeffs>" or H-minus-H2')
    p.add_argument("--s2", required=True, help='"xi:<coeffs>" or H-minus-H1')
    p.set_defaults(func=cmd_qh_build)

    p = sub.add_parser("qh-verify", help="two-intersection check of a join")
    common(p)
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.set_defaults(func=cmd_qh_verify)

    p = sub.add_parser("pavese", help="discriminant variety in PG(N, q^2)")
    common(p)
    p.add_argument("--n", type=int, default=3, help="projective dimension N")
    p.set_defaults(func=cmd_pavese)

    p = sub.add_parser("belrank", help="BEL ranks of random nonsingular tensors")
    common(p)
    p.add_argument("--n", type=int, default=2, help="tensor dimension n")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--stop-at", type=int, default=1, dest="stop_at")
    p.add_argument("--tensor", help="JSON tensor; compute its exact BEL rank")
    p.set_defaults(func=cmd_belrank)

    p = sub.add_parser("semifield-test", help="nonsingularity of one tensor")
    common(p, q_required=False)
    p.add_argument("--tensor", required=True, help="JSON tensor")
    p.set_defaults(func=cmd_semifield_test)

    p = sub.add_parser("zerocount", help="Hermitian zero-count pipeline")
    common(p)
    p.add_argument("--xi", help="xi as prime-field coefficients, e.g. 1,1")
    p.add_argument("--param-a", dest="param_a",
                   help="override for the coupled parameter A")
    p.add_argument("--param-b", dest="param_b",
                   help="override for the coupled parameter B")
    p.set_defaults(func=cmd_zerocount)

    p = sub.add_parser("fourfold", help="pencil invariants of fourfold tensors")
    common(p)
    p.add_argument("--pencil", help="JSON pencil fixture")
    p.add_argument("--search-d", type=int, dest="search_d",
                   help="search for a pencil with this d-invariant")
    p.set_defaults(func=cmd_fourfold)

    p = sub.add_parser("errata", help="computed-vs-published table differences")
    common(p)
    p.set_defaults(func=cmd_errata)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (CompositeCharacteristic, ReducibleModulus, EvenCharacteristicUnsupported,
            UnsupportedScale, geom.InvalidXi, geom.DegenerateLine, qh.WrongSide,
            qh.PointNotInSet, hermcount.DegenerateXi, hermcount.DimensionMismatch,
            hermcount.DependentBasis, fourfold.DegeneratePencil,
            fourfold.SingularFourfold, fourfold.NotRankFour,
            cyclic.SingularIsotopyComponent, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
