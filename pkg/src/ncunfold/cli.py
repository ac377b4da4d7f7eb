"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 validation failure
(quasiclassical conditions violated, non-isolated f where isolation is
required, nonzero residual in mc-verify), 3 degree-guard abort.
Identical argv always produces byte-identical JSON output.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    DegreeGuardExceeded,
    NotACycle,
    NotIsolated,
    ParseError,
    QCInvalid,
)
from .groebner import GREVLEX, LEX, MonomialOrder
from .hochschild import (
    PolyDiffOperator,
    brace,
    cup,
    gerstenhaber_bracket,
    hkr,
    hochschild_differential,
)
from .parsing import (
    format_gelement,
    format_series,
    parse_gelement,
    parse_polynomial,
    parse_poly_series,
    parse_series,
)
from .poly import RingContext
from .polyvector import schouten_bracket
from .singularity import jacobian, monicize, qc_subspace
from .unfolding import (
    MCSolution,
    ObstructionReport,
    koszul_lift,
    mc_verify,
    qc_normalize,
    qc_validate,
    quantize_general,
    quantize_n3,
)

USAGE_ERROR, VALIDATION_ERROR, DEGREE_ABORT = 1, 2, 3


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    top = _CliParser(prog="unfold", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, needs_f=True):
        p.add_argument("--vars", required=True, help="comma-separated variable names")
        if needs_f:
            p.add_argument("--f", required=True, help="polynomial expression")
        p.add_argument("--order", type=int, default=8, help="h-truncation order")
        p.add_argument(
            "--monomial-order", choices=["grevlex", "lex"], default="grevlex"
        )
        p.add_argument("--format", choices=["json", "text"], default="text")
        p.add_argument("--max-degree", type=int, default=64)

    p = sub.add_parser("milnor", help="Milnor number of f")
    common(p)
    p = sub.add_parser("jacobian", help="Jacobian report of f")
    common(p)
    p = sub.add_parser("qc-subspace", help="monomial basis of the complement W")
    common(p)
    p = sub.add_parser("monicize", help="substitution making f monic in the last variable")
    common(p)

    p = sub.add_parser("schouten", help="bracket of two graded elements")
    common(p, needs_f=False)
    p.add_argument("--X", required=True)
    p.add_argument("--Y", required=True)

    p = sub.add_parser("koszul-lift", help="T with [f, T] = S")
    common(p)
    p.add_argument("--S", required=True, help="cycle to lift (polyvector)")

    p = sub.add_parser("qc-check", help="validate a quasiclassical datum (p, S)")
    common(p)
    p.add_argument("--p", required=True)
    p.add_argument("--S", required=True)

    p = sub.add_parser("qc-normalize", help="W-normal form of p modulo the Jacobian ideal")
    common(p)
    p.add_argument("--p", required=True)

    p = sub.add_parser("quantize", help="quantize a quasiclassical datum")
    common(p)
    p.add_argument("--p", required=True)
    p.add_argument("--S", required=True)
    p.add_argument("--general", action="store_true", help="order-by-order prober")

    p = sub.add_parser("mc-verify", help="residual report for a solution series")
    common(p)
    p.add_argument("--p", required=True, help="h-series of polynomials")
    p.add_argument("--S", required=True, help="h-series of bivectors")
    p.add_argument("--T", default=None, help="optional h-series witness")

    p = sub.add_parser("hh-cup", help="cup product of two cochains (JSON)")
    common(p, needs_f=False)
    p.add_argument("--P", required=True)
    p.add_argument("--Q", required=True)

    p = sub.add_parser("hh-brace", help="brace P{Q_1,...} of cochains (JSON)")
    common(p, needs_f=False)
    p.add_argument("--P", required=True)
    p.add_argument("--Qs", required=True, help="JSON array of cochains")

    p = sub.add_parser("hh-bracket", help="Gerstenhaber bracket of two cochains (JSON)")
    common(p, needs_f=False)
    p.add_argument("--P", required=True)
    p.add_argument("--Q", required=True)

    p = sub.add_parser("hh-d", help="Hochschild differential [mu, P] (JSON)")
    common(p, needs_f=False)
    p.add_argument("--P", required=True)

    p = sub.add_parser("hkr", help="HKR cochain of a polyvector field")
    common(p, needs_f=False)
    p.add_argument("--X", required=True)

    return top


def _ctx(args) -> RingContext:
    names = tuple(s.strip() for s in args.vars.split(",") if s.strip())
    return RingContext(names)


def _monomial_order(args) -> MonomialOrder:
    return GREVLEX if args.monomial_order == "grevlex" else LEX


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _mono_strs(ctx, exps_list):
    return [ctx.format_monomial(tuple(e)) for e in exps_list]


def _solution_payload(sol: MCSolution) -> dict:
    return sol.to_json()


def _solution_text(sol: MCSolution) -> str:
    lines = [f"order: {sol.order}"]
    lines.append(f"p: {format_series(sol.p_series)}")
    lines.append(f"S: {format_series(sol.s_series)}")
    if sol.witness is not None:
        lines.append(f"T: {format_series(sol.witness)}")
    lines.append("residual checked: zero")
    return "\n".join(lines)


def _run(args) -> int:
    ctx = _ctx(args)
    guard = args.max_degree

    if args.command == "milnor":
        f = parse_polynomial(args.f, ctx)
        data = jacobian(f, _monomial_order(args), guard)
        _emit(args, {"milnor": data.milnor}, f"milnor: {data.milnor}")
        return 0

    if args.command == "jacobian":
        f = parse_polynomial(args.f, ctx)
        data = jacobian(f, _monomial_order(args), guard)
        payload = data.report()
        text = "\n".join(
            [
                f"milnor: {data.milnor}",
                f"isolated: {payload['isolated']}",
                "w_basis: " + ", ".join(_mono_strs(ctx, payload["w_basis"])),
            ]
        )
        _emit(args, payload, text)
        return 0

    if args.command == "qc-subspace":
        f = parse_polynomial(args.f, ctx)
        basis = qc_subspace(f, guard)
        payload = {"w_basis": [list(e) for e in basis]}
        _emit(args, payload, "w_basis: " + ", ".join(_mono_strs(ctx, basis)))
        return 0

    if args.command == "monicize":
        f = parse_polynomial(args.f, ctx)
        sigma, image = monicize(f)
        payload = {
            "images": [im.to_json() for im in sigma.images],
            "result": image.to_json(),
            "xn_degree": image.degree_in(ctx.n),
        }
        text = f"substitution: {sigma}\nresult: {image}"
        _emit(args, payload, text)
        return 0

    if args.command == "schouten":
        x = parse_gelement(args.X, ctx)
        y = parse_gelement(args.Y, ctx)
        out = schouten_bracket(x, y)
        _emit(args, {"bracket": out.to_json()}, f"[X, Y] = {format_gelement(out)}")
        return 0

    if args.command == "koszul-lift":
        f = parse_polynomial(args.f, ctx)
        z = parse_gelement(args.S, ctx)
        lift = koszul_lift(f, z, guard)
        _emit(args, {"lift": lift.to_json()}, f"T = {format_gelement(lift)}")
        return 0

    if args.command == "qc-check":
        f = parse_polynomial(args.f, ctx)
        p = parse_polynomial(args.p, ctx)
        s = parse_gelement(args.S, ctx)
        result = qc_validate(f, p, s, guard)
        if isinstance(result, list):
            payload = {
                "valid": False,
                "violations": [{"kind": v.kind, "message": v.message} for v in result],
            }
            text = "invalid:\n" + "\n".join(f"  {v.kind}: {v.message}" for v in result)
            _emit(args, payload, text)
            return VALIDATION_ERROR
        payload = {
            "valid": True,
            "p_normal": result.p_normal.to_json(),
            "S": result.s.to_json(),
        }
        _emit(args, payload, f"valid\np_normal: {result.p_normal}")
        return 0

    if args.command == "qc-normalize":
        f = parse_polynomial(args.f, ctx)
        p = parse_polynomial(args.p, ctx)
        norm = qc_normalize(f, p, guard)
        payload = {
            "w_part": norm.w_part.to_json(),
            "cofactors": [c.to_json() for c in norm.cofactors],
        }
        text = "w_part: {}\ncofactors: {}".format(
            norm.w_part, ", ".join(str(c) for c in norm.cofactors)
        )
        _emit(args, payload, text)
        return 0

    if args.command == "quantize":
        f = parse_polynomial(args.f, ctx)
        p = parse_polynomial(args.p, ctx)
        s = parse_gelement(args.S, ctx)
        if args.general:
            result = quantize_general(f, p, s, args.order, max_degree=guard)
            if isinstance(result, ObstructionReport):
                payload = {
                    "obstruction": {
                        "failing_order": result.failing_order,
                        "kind": result.kind,
                        "element": result.obstruction.to_json(),
                    }
                }
                text = (
                    f"obstructed at h^{result.failing_order} ({result.kind}): "
                    f"{format_gelement(result.obstruction)}"
                )
                _emit(args, payload, text)
                return VALIDATION_ERROR
            sol = result
        else:
            sol = quantize_n3(f, p, s, guard)
        _emit(args, _solution_payload(sol), _solution_text(sol))
        return 0

    if args.command == "mc-verify":
        f = parse_polynomial(args.f, ctx)
        p_series = parse_poly_series(args.p, ctx, args.order)
        s_series = parse_series(args.S, ctx, args.order)
        witness = parse_series(args.T, ctx, args.order) if args.T else None
        sol = MCSolution(args.order, p_series, s_series, witness)
        report = mc_verify(f, sol)
        payload = report.to_json()
        lines = [f"ok: {report.ok}"]
        for o in report.orders:
            if o.is_zero():
                continue
            lines.append(
                f"h^{o.h_power}: [f-p,S] = {format_gelement(o.bracket_f_minus_p_s)}; "
                f"[S,S] = {format_gelement(o.poisson_square)}; "
                f"residual = {format_gelement(o.residual)}"
            )
        if len(lines) == 1:
            lines.append("all residuals zero through the requested order")
        _emit(args, payload, "\n".join(lines))
        return 0 if report.ok else VALIDATION_ERROR

    if args.command in ("hh-cup", "hh-bracket"):
        p = PolyDiffOperator.from_json(ctx, json.loads(args.P))
        q = PolyDiffOperator.from_json(ctx, json.loads(args.Q))
        out = cup(p, q) if args.command == "hh-cup" else gerstenhaber_bracket(p, q)
        _emit(args, out.to_json(), str(out))
        return 0

    if args.command == "hh-brace":
        p = PolyDiffOperator.from_json(ctx, json.loads(args.P))
        qs = [PolyDiffOperator.from_json(ctx, item) for item in json.loads(args.Qs)]
        out = brace(p, qs)
        _emit(args, out.to_json(), str(out))
        return 0

    if args.command == "hh-d":
        p = PolyDiffOperator.from_json(ctx, json.loads(args.P))
        out = hochschild_differential(p)
        _emit(args, out.to_json(), str(out))
        return 0

    if args.command == "hkr":
        x = parse_gelement(args.X, ctx)
        out = hkr(x)
        _emit(args, out.to_json(), str(out))
        return 0

    raise _UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (NotIsolated, NotACycle, QCInvalid) as e:
        print(f"error: {e}", file=sys.stderr)
        return VALIDATION_ERROR
    except DegreeGuardExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return DEGREE_ABORT


if __name__ == "__main__":
    sys.exit(main())
