"""Command-line frontend.

Every subcommand talks to the HTTP service; by default an in-process
client is used so no server or network is needed, and --server points the
same commands at a running instance.  Exit codes: 0 success, 1 usage or
domain error, 2 certification failure, 3 statistical failure.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import os
import sys

import httpx

USAGE_EXIT = 1
CERTIFY_EXIT = 2
STATS_EXIT = 3

SIM_CSV_COLUMNS = ["n", "c", "strategy", "trials", "successes", "rate",
                   "stderr", "seed"]
CERT_CSV_COLUMNS = ["n", "c", "regime", "primal_value", "dual_value", "gap",
                    "primal_feasible", "dual_feasible", "certified",
                    "min_eig_primal", "min_gamma", "min_dual_square",
                    "tolerance"]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract reserves 2 for certification."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _weight_list(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _default_tol() -> float:
    return float(os.environ.get("QCHANGE_TOL", "1e-9"))


def _default_feas_tol() -> float:
    return float(os.environ.get("QCHANGE_FEAS_TOL", "1e-10"))


def build_parser() -> _Parser:
    parser = _Parser(prog="qchange",
                     description="Exact change-point identification in a "
                                 "sequence of quantum states")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_output(p, default_format="json"):
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)

    p = sub.add_parser("compute", help="optimal success probability and profile")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    add_output(p)

    p = sub.add_parser("certify", help="primal/dual optimality certificate")
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--c", type=float)
    group.add_argument("--c-range", nargs=3, type=float,
                       metavar=("START", "STOP", "STEP"))
    p.add_argument("--tol", type=float, default=_default_tol())
    p.add_argument("--feas-tol", type=float, default=_default_feas_tol())
    add_output(p)

    p = sub.add_parser("figure", help="export reference figure data")
    p.add_argument("--id", type=int, choices=(1, 2), required=True)
    add_output(p, default_format="csv")

    p = sub.add_parser("simulate", help="Monte Carlo check of a strategy")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--strategy", required=True,
                   choices=("collective", "local-equal", "local-alternating",
                            "local-custom"))
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", type=_weight_list, default=None,
                   help="comma-separated site weights (local-custom only)")
    add_output(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


class _InProcessClient:
    """Sync facade over the ASGI app; no sockets, no running server needed."""

    def __init__(self, app):
        self._loop = asyncio.new_event_loop()
        self._client = httpx.AsyncClient(
            transport=httpx.ASGITransport(app=app),
            base_url="http://qchange.internal", timeout=None)

    def get(self, url):
        return self._loop.run_until_complete(self._client.get(url))

    def post(self, url, json=None):
        return self._loop.run_until_complete(self._client.post(url, json=json))

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self._loop.run_until_complete(self._client.aclose())
        self._loop.close()


def _client(server):
    if server:
        return httpx.Client(base_url=server, timeout=300.0)
    from .service import app
    return _InProcessClient(app)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _emit(args, payload, columns, rows):
    if args.out is None:
        return
    if args.format == "csv":
        _write_csv(args.out, columns, rows)
    else:
        _write_json(args.out, payload)
    print(f"wrote {args.out} ({len(rows)} row{'s' if len(rows) != 1 else ''})")


def _check_overlap(parser, c):
    if not 0.0 <= c <= 1.0:
        parser.error(f"overlap must lie in [0, 1], got {c}")


def cmd_compute(parser, args, client) -> int:
    _check_overlap(parser, args.c)
    resp = client.post("/compute", json={"n": args.n, "c": args.c})
    if resp.status_code != 200:
        print(f"error: {resp.json().get('detail', resp.text)}", file=sys.stderr)
        return USAGE_EXIT
    body = resp.json()
    print(f"n = {body['n']}  c = {body['c']}")
    print(f"P_s = {_fmt(body['success_probability'])}  regime = {body['regime']}"
          + (f"  delta = {_fmt(body['delta'])}" if body["regime"] == "II" else ""))
    crit = _fmt(body["critical_overlap"])
    if body["critical_overlap_degenerate"]:
        print(f"c*({body['n']}) degenerate (profile positive for all c < 1)")
    else:
        print(f"c*({body['n']}) = {crit}")
    print("gamma_k = [" + ", ".join(f"{g:.6g}" for g in body["gammas"]) + "]")
    columns = ["n", "c", "regime", "success_probability", "delta", "degenerate",
               "critical_overlap", "critical_overlap_degenerate", "b"] + \
              [f"gamma_{k + 1}" for k in range(args.n)]
    row = [body["n"], body["c"], body["regime"], body["success_probability"],
           body["delta"], body["degenerate"], body["critical_overlap"],
           body["critical_overlap_degenerate"], body["b"]] + body["gammas"]
    _emit(args, body, columns, [row])
    return 0


def _cert_row(body):
    return [body[k] for k in CERT_CSV_COLUMNS]


def cmd_certify(parser, args, client) -> int:
    if args.c is not None:
        _check_overlap(parser, args.c)
        resp = client.post("/certify", json={
            "n": args.n, "c": args.c, "tol": args.tol, "feas_tol": args.feas_tol})
        if resp.status_code != 200:
            print(f"not certified: {resp.json().get('detail', resp.text)}",
                  file=sys.stderr)
            return CERTIFY_EXIT
        body = resp.json()
        verdict = "certified" if body["certified"] else "NOT certified"
        print(f"n = {body['n']}  c = {body['c']}  regime = {body['regime']}: "
              f"{verdict}  gap = {_fmt(body['gap'])}")
        rep = body.get("minor_report")
        if rep:
            kind = rep["kind"]
            extra = "" if rep.get("kernel_residual") is None else \
                f"  kernel residual = {_fmt(rep['kernel_residual'])}"
            print(f"positivity ({kind}): minors "
                  + ("all positive" if rep["all_positive"] else "sign change")
                  + extra)
        if not body["certified"]:
            print(f"primal feasible = {body['primal_feasible']} "
                  f"(min eig = {_fmt(body['min_eig_primal'])}, "
                  f"min gamma = {_fmt(body['min_gamma'])}), "
                  f"dual feasible = {body['dual_feasible']}", file=sys.stderr)
        _emit(args, body, CERT_CSV_COLUMNS, [_cert_row(body)])
        return 0 if body["certified"] else CERTIFY_EXIT

    start, stop, step = args.c_range
    for c in (start, stop):
        _check_overlap(parser, c)
    if step <= 0:
        parser.error(f"step must be positive, got {step}")
    resp = client.post("/certify/grid", json={
        "n": args.n, "c_start": start, "c_stop": stop, "c_step": step,
        "tol": args.tol, "feas_tol": args.feas_tol})
    if resp.status_code != 200:
        print(f"not certified: {resp.json().get('detail', resp.text)}",
              file=sys.stderr)
        return CERTIFY_EXIT
    body = resp.json()
    rows = body["rows"]
    worst = max(abs(r["gap"]) for r in rows)
    good = sum(r["certified"] for r in rows)
    print(f"n = {args.n}: certified {good}/{len(rows)} grid points, "
          f"worst |gap| = {worst:.3g}")
    _emit(args, body, CERT_CSV_COLUMNS, [_cert_row(r) for r in rows])
    if not body["all_certified"]:
        for r in rows:
            if not r["certified"]:
                print(f"  c = {r['c']}: gap = {_fmt(r['gap'])}, "
                      f"primal feasible = {r['primal_feasible']}, "
                      f"dual feasible = {r['dual_feasible']}", file=sys.stderr)
        return CERTIFY_EXIT
    return 0


def cmd_figure(parser, args, client) -> int:
    resp = client.get(f"/figure/{args.id}")
    if resp.status_code != 200:
        print(f"error: {resp.json().get('detail', resp.text)}", file=sys.stderr)
        return USAGE_EXIT
    body = resp.json()
    if args.out is None:
        args.out = f"figure_{args.id}.csv"
    _emit(args, body, body["columns"], body["rows"])
    return 0


def cmd_simulate(parser, args, client) -> int:
    _check_overlap(parser, args.c)
    if (args.weights is not None) != (args.strategy == "local-custom"):
        parser.error("--weights is required for local-custom and invalid otherwise")
    payload = {"n": args.n, "c": args.c, "strategy": args.strategy,
               "trials": args.trials, "seed": args.seed}
    if args.weights is not None:
        payload["weights"] = args.weights
    resp = client.post("/simulate", json=payload)
    if resp.status_code != 200:
        print(f"error: {resp.json().get('detail', resp.text)}", file=sys.stderr)
        return USAGE_EXIT
    body = resp.json()
    print(f"{body['strategy']} n = {body['n']} c = {body['c']}: "
          f"rate = {body['empirical_rate']:.6f} vs analytic "
          f"{body['analytic_rate']:.6f} ({body['sigma_distance']:.2f} sigma), "
          f"errors = {body['errors_observed']}")
    row = [body["n"], body["c"], body["strategy"], body["trials"],
           body["successes"], body["empirical_rate"], body["standard_error"],
           body["seed"]]
    _emit(args, body, SIM_CSV_COLUMNS, [row])
    if not body["passed"]:
        print("statistical disagreement with the analytic rate", file=sys.stderr)
        return STATS_EXIT
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    with _client(args.server) as client:
        if args.subcommand == "compute":
            return cmd_compute(parser, args, client)
        if args.subcommand == "certify":
            return cmd_certify(parser, args, client)
        if args.subcommand == "figure":
            return cmd_figure(parser, args, client)
        return cmd_simulate(parser, args, client)


if __name__ == "__main__":
    sys.exit(main())
