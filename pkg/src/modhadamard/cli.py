"""Command-line interface.

Exit status: 0 = exists / verified, 1 = does not exist / verification
failed, 2 = usage or format error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .designs import CATALOG_NAMES, EXACT_PARAMS, catalog
from .matrix import MatrixFormatError, SignMatrix, first_violation, gram_offdiag
from .search import Mode, SearchError, SearchSpec, exhaustive
from .solver import SUPPORTED_MODULI, construct, decide, explain

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _supported(m: int) -> int:
    if m not in SUPPORTED_MODULI:
        raise UsageError(f"unsupported modulus {m}; choose one of {SUPPORTED_MODULI}")
    return m


def _order(n: int) -> int:
    if n < 1:
        raise UsageError(f"order must be >= 1, got {n}")
    return n


def cmd_construct(args) -> int:
    cert, H = construct(_order(args.n), _supported(args.m))
    if args.emit_cert:
        Path(args.emit_cert).write_text(cert.dumps())
    sys.stdout.write(cert.dumps())
    if H is None:
        sys.stderr.write(explain(cert))
        return EXIT_NO
    Path(args.output).write_bytes(H.to_text(args.m).encode("ascii"))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        text = Path(args.input).read_bytes().decode("ascii")
    except UnicodeDecodeError as exc:
        raise MatrixFormatError("non-ASCII content", 1) from exc
    H, m = SignMatrix.from_text(text)
    if args.modulus is not None:
        m = args.modulus
        if m < 0 or m == 1:
            raise UsageError(f"invalid modulus {m}")
    bad = first_violation(H, m)
    if bad is None:
        print(f"OK: MH({H.order},{m}) verified")
        return EXIT_OK
    i, j = bad
    value = gram_offdiag(H, m)[i, j]
    print(f"FAIL: rows {i + 1} and {j + 1} have inner product {value} (mod {m}), expected 0")
    return EXIT_NO


def cmd_decide(args) -> int:
    cert = decide(_order(args.n), _supported(args.m))
    if args.emit_cert:
        Path(args.emit_cert).write_text(cert.dumps())
    sys.stdout.write(explain(cert))
    return EXIT_OK if cert.exists else EXIT_NO


def cmd_explain(args) -> int:
    cert = decide(_order(args.n), _supported(args.m))
    sys.stdout.write(explain(cert))
    return EXIT_OK if cert.exists else EXIT_NO


def cmd_search(args) -> int:
    spec = SearchSpec(
        _order(args.n), args.m, Mode(args.mode), workers=args.threads,
        shard_bits=args.shard_bits, ledger=Path(args.resume) if args.resume else None,
    )
    out = exhaustive(spec)
    print(f"n={out.n} m={out.m} mode={out.mode.value} examined={out.examined} "
          f"space={out.space} solutions={out.solutions}")
    if out.witness is not None:
        sys.stdout.write(out.witness.to_text(out.m))
    return EXIT_OK if out.exists else EXIT_NO


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in CATALOG_NAMES:
            exact = EXACT_PARAMS.get(name)
            label = "({},{},{})".format(*exact) if exact else "(26,1,2;5)"
            print(f"{name} {label}")
        return EXIT_OK
    if args.name not in CATALOG_NAMES:
        raise UsageError(f"unknown design {args.name!r}; known: {', '.join(CATALOG_NAMES)}")
    sys.stdout.write(catalog(args.name, args.m).to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modhadamard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a verified MH(n,m) and write it to a file")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--emit-cert")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="re-check a matrix file against its header modulus")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--modulus", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decide", help="print the existence verdict and its certificate")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--emit-cert")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("explain", help="print the recipe tree or obstruction")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("search", help="exhaustive search over normalized matrices")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--mode", choices=[x.value for x in Mode], default=Mode.FIRST_WITNESS.value)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--shard-bits", type=int, default=0)
    p.add_argument("--resume", metavar="LEDGER")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("catalog", help="list or print the base designs")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.add_argument("-m", type=int, default=5)
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog" and args.action == "show" and not args.name:
        parser.error("catalog show needs a design name")
    try:
        return args.func(args)
    except (UsageError, SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MatrixFormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
