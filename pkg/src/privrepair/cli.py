"""Command-line client for the privrepair service.

Every command is a thin wrapper over the HTTP API: by default requests
are dispatched to an in-process application instance, and ``--server``
points them at a running deployment instead.  Identical flags always
produce byte-identical output (the seed travels in the request).

Exit codes: 0 ok, 2 validation/infeasible, 3 correctness mismatch,
4 privacy-audit failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import re
import sys

import httpx

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_MISMATCH = 3
EXIT_AUDIT = 4


def _request(server, path, payload):
    async def go():
        if server:
            transport = None
            base = server.rstrip("/")
        else:
            from privrepair.service import create_app
            transport = httpx.ASGITransport(app=create_app())
            base = "http://privrepair.local"
        async with httpx.AsyncClient(transport=transport, base_url=base,
                                     timeout=600.0) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _call(args, path, payload):
    """POST and return the parsed body, or exit 2 on a rejected request."""
    resp = _request(args.server, path, payload)
    if resp.status_code in (400, 422):
        detail = resp.json().get("detail")
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    resp.raise_for_status()
    return resp.json()


def _load_field(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read field config {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    for key in ("p", "q", "ell", "modulus"):
        if key not in cfg:
            print(f"error: field config is missing {key!r}", file=sys.stderr)
            raise SystemExit(EXIT_VALIDATION)
    return cfg


def _load_codeword(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        print(f"error: cannot read codeword {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    symbols = []
    for line in lines:
        line = line.strip()
        if line:
            obj = json.loads(line)
            symbols.append({"alpha": int(obj["alpha"]), "value": int(obj["value"])})
    if not symbols:
        print("error: empty codeword file", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    return symbols


def _parse_ints(text, what):
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        print(f"error: {what} must be a comma-separated list of integers",
              file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _code_payload(args):
    return {"field": _load_field(args.field), "alphas": None, "k": args.k}


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_encode(args):
    payload = {
        "code": _code_payload(args),
        "message": _parse_ints(args.message, "--message"),
        "systematic": args.systematic,
    }
    body = _call(args, "/encode", payload)
    lines = [json.dumps(sym, separators=(", ", ": ")) for sym in body["codeword"]]
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
        print(f"wrote {len(lines)} symbols to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _print_audit(audit):
    counts = {int(b): c for b, c in audit["candidates"].items()}
    values = sorted(set(counts.values()))
    if audit["uniform"]:
        print(f"audit: posterior uniform over {len(counts)} candidates "
              f"(count={values[0]} each)")
    else:
        table = " ".join(f"{b}:{c}" for b, c in sorted(counts.items()))
        print(f"audit: posterior NOT uniform: {table}")
    if audit.get("conditioned") is not None:
        cond = {int(b): c for b, c in audit["conditioned"].items()}
        state = "uniform" if audit["conditioned_uniform"] else "NOT uniform"
        table = " ".join(f"{b}:{c}" for b, c in sorted(cond.items()))
        print(f"audit (mask-at-target conditioned): {state}: {table}")


def _repair_like(args, path, scheme):
    if args.audit and not args.coalition:
        print("error: --audit needs --coalition to say who is watching",
              file=sys.stderr)
        return EXIT_VALIDATION
    payload = {
        "code": _code_payload(args),
        "codeword": _load_codeword(args.codeword),
        "scheme": scheme,
        "beta": args.beta,
        "t": args.t,
        "m": args.m,
        "seed": args.seed,
        "coalition": _parse_ints(args.coalition, "--coalition") if args.coalition else [],
        "audit": args.audit,
        "conditioned": args.conditioned,
        "expected": args.expect,
    }
    body = _call(args, path, payload)
    print(f"scheme={body['scheme']} beta={body['beta']} seed={body['seed']} "
          f"t={body['t']} m={body['m']}")
    print(f"recovered={body['recovered']}")
    print(f"download_subsymbols={body['bandwidth_down_subsymbols']} "
          f"upload_symbols={body['bandwidth_up_symbols']} "
          f"naive_subsymbols={body['naive_subsymbols']}")
    if args.transcript:
        _write(args.transcript, json.dumps(body["nodes"], indent=2,
                                           sort_keys=True) + "\n")
        print(f"wrote transcript to {args.transcript}")
    if body.get("audit"):
        _print_audit(body["audit"])
    if body.get("matches_expected") is False:
        print(f"error: recovered {body['recovered']} != expected {args.expect}",
              file=sys.stderr)
        return EXIT_MISMATCH
    if body.get("audit") and not body["audit"]["uniform"]:
        return EXIT_AUDIT
    return EXIT_OK


def cmd_repair(args):
    return _repair_like(args, "/repair", args.scheme)


def cmd_retrieve(args):
    return _repair_like(args, "/retrieve", "retrieval")


def cmd_audit(args):
    payload = {
        "code": _code_payload(args),
        "scheme": args.scheme,
        "t": args.t,
        "m": args.m,
        "coalition_size": args.coalition_size,
        "seed": args.seed,
    }
    body = _call(args, "/audit/batch", payload)
    ratio = body["worst_ratio"]
    ratio_text = "inf" if ratio < 0 else f"{ratio:.3f}"
    print(f"scheme={body['scheme']} coalition_size={args.coalition_size} "
          f"views={body['views_checked']} worst_ratio={ratio_text} "
          f"passed={'true' if body['passed'] else 'false'}")
    if body.get("witness"):
        w = body["witness"]
        print(f"witness: beta={w['beta']} coalition={w['coalition']} "
              f"counts={w['candidates']}")
    return EXIT_OK if body["passed"] else EXIT_AUDIT


def cmd_bounds(args):
    payload = {"n": args.n, "k": args.k, "t": args.t, "q": args.q,
               "ell": args.ell, "d": args.d}
    body = _call(args, "/bounds", payload)
    scheme = body["scheme_bandwidth"]
    print(f"scheme={scheme if scheme is not None else 'none'} "
          f"fractional={body['fractional']['value']:.3f} "
          f"integer={body['integer']} "
          f"attained={'true' if body['attained'] else 'false'}")
    print(f"m={body['best_m'] if body['best_m'] is not None else 'none'} "
          f"naive={body['naive']}")
    return EXIT_OK


def cmd_sweep(args):
    match = re.fullmatch(r"(\d+)\.\.(\d+)", args.d)
    if not match:
        print("error: --d must look like 129..255", file=sys.stderr)
        return EXIT_VALIDATION
    payload = {"k": args.k, "t": args.t, "q": args.q, "ell": args.ell,
               "d_lo": int(match.group(1)), "d_hi": int(match.group(2))}
    body = _call(args, "/sweep", payload)
    if args.out:
        _write(args.out, body["csv"])
        print(f"wrote {len(body['rows'])} rows to {args.out} "
              f"(semantics: {body['semantics']})")
    else:
        sys.stdout.write(body["csv"])
    return EXIT_OK


def cmd_serve(args):
    import uvicorn

    from privrepair.service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="privrepair",
        description="Private repair and retrieval of Reed-Solomon coded symbols.")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_code_flags(p):
        p.add_argument("--field", required=True, help="field config JSON path")
        p.add_argument("--k", type=int, required=True, help="code dimension")

    p = sub.add_parser("encode", help="encode a message into a codeword file")
    add_code_flags(p)
    p.add_argument("--message", required=True,
                   help="comma-separated element indices (k of them)")
    p.add_argument("--systematic", action="store_true",
                   help="treat the message as values on the first k points")
    p.add_argument("--out", default=None, help="codeword JSONL output path")
    p.set_defaults(func=cmd_encode)

    def add_session_flags(p):
        add_code_flags(p)
        p.add_argument("--codeword", required=True, help="codeword JSONL path")
        p.add_argument("--beta", type=int, required=True, help="target element index")
        p.add_argument("--t", type=int, default=None, help="collusion threshold")
        p.add_argument("--m", type=int, default=None,
                       help="subspace dimension (default: best feasible)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--coalition", default=None,
                       help="comma-separated observing node indices")
        p.add_argument("--audit", action="store_true",
                       help="audit the coalition view; non-uniform posterior exits 4")
        p.add_argument("--conditioned", action="store_true",
                       help="also report the posterior conditioned on the "
                            "mask-resampling policy")
        p.add_argument("--expect", type=int, default=None,
                       help="exit 3 unless the recovered value equals this")
        p.add_argument("--transcript", default=None, help="transcript JSON output path")

    p = sub.add_parser("repair", help="run one repair session")
    add_session_flags(p)
    p.add_argument("--scheme", required=True,
                   choices=["plain", "hidden-subspace", "secret-sharing"])
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("retrieve", help="run one private retrieval session")
    add_session_flags(p)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("audit", help="exhaustive privacy audit over all "
                                     "targets, coalitions and private states")
    add_code_flags(p)
    p.add_argument("--scheme", required=True,
                   choices=["plain", "hidden-subspace", "secret-sharing", "retrieval"])
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--coalition-size", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bounds", help="bandwidth report for one parameter set")
    for flag in ("--n", "--k", "--t", "--q", "--ell"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--d", type=int, default=None, help="helper budget (default n-1)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="bandwidth vs helper budget as CSV")
    for flag in ("--k", "--t", "--q", "--ell"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--d", required=True, help="budget range, e.g. 129..255")
    p.add_argument("--out", default=None, help="CSV output path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
