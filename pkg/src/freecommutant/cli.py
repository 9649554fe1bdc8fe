"""Command-line verification front end.

Distribution specs are exact-rational strings; every command emits a
deterministic report (JSON by default, or an aligned table carrying the same
rationals) and exits 0 iff every checked identity holds, 1 on the first
counterexample, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from multiprocessing import get_context

from .commutator import (
    AdditivityReport,
    DistributionPair,
    cancellation_sum,
    closed_form_cumulant,
    commutator_polynomial,
    cumulant_sequence_of,
    expansion_cumulant,
    freeness_witness,
    sum_with_commutator,
    verify_additivity,
    I_S_X,
)
from .cumulants import (
    DEFAULT_ORDER_CAP,
    ORDER_CAP_ENV,
    CumulantSequence,
    MomentSequence,
    as_fraction,
    cumulant_of_polynomials,
    cumulants_from_moments,
    format_rational,
    moments_from_cumulants,
    real_cumulant,
    resolve_order_cap,
)
from .errors import FreeCommutantError, SpecSyntaxError
from .fid import compound_poisson_from_rho, hankel_fid_check
from .fock import (
    ADJOINT_PAIRS,
    RhoMoments,
    composition_formula_cumulant,
    model_cumulant,
    verify_adjointness,
)
from .partitions import PartitionKind, iter_partitions

FAULT_ENV = "FREECOMMUTANT_INJECT_FAULT"

_SPEC_KINDS = ("semicircle", "free-poisson", "atomic", "cumulants", "rho-moments")


@dataclass(frozen=True)
class DistributionSpec:
    """Parsed form of a distribution spec string."""

    source: str
    kind: str
    numbers: tuple[Fraction, ...] = ()
    atoms: tuple[tuple[Fraction, Fraction], ...] = ()

    def cumulants(self, order: int) -> CumulantSequence:
        if self.kind == "semicircle":
            return CumulantSequence.semicircular(self.numbers[0], order)
        if self.kind == "free-poisson":
            return CumulantSequence.free_poisson(self.numbers[0], order)
        if self.kind == "atomic":
            moments = [Fraction(1)] + [
                sum((w * a ** k for w, a in self.atoms), Fraction(0))
                for k in range(1, order + 1)
            ]
            return cumulants_from_moments(MomentSequence(moments), order)
        if self.kind == "cumulants":
            padded = list(self.numbers[:order])
            padded += [Fraction(0)] * (order - len(padded))
            return CumulantSequence(padded)
        if self.kind == "rho-moments":
            return compound_poisson_from_rho(self.rho(order), order)
        raise SpecSyntaxError(f"unknown spec kind {self.kind}", 0)

    def rho(self, order: int) -> RhoMoments:
        if self.kind == "atomic":
            return RhoMoments.from_atoms(self.atoms, order)
        if self.kind == "rho-moments":
            if len(self.numbers) < order:
                raise SpecSyntaxError(
                    f"rho-moments lists {len(self.numbers)} moments, need {order}", 0)
            return RhoMoments((Fraction(1),) + self.numbers[:order], genuine=False)
        raise SpecSyntaxError(
            f"spec kind {self.kind} does not describe a driving measure", 0)


def _parse_rational(text: str, offset: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecSyntaxError(f"bad rational literal {text.strip()!r}: {exc}", offset) from exc


def parse_spec(text: str) -> DistributionSpec:
    """Parse one of:

    semicircle(v) | free-poisson(l) | atomic(w1:a1, ...) |
    cumulants[c1, ...] | rho-moments[m1, ...]
    """
    src = text.strip()
    for head, open_c, close_c in (
        ("semicircle", "(", ")"),
        ("free-poisson", "(", ")"),
        ("atomic", "(", ")"),
        ("cumulants", "[", "]"),
        ("rho-moments", "[", "]"),
    ):
        if src.startswith(head + open_c):
            if not src.endswith(close_c):
                raise SpecSyntaxError(f"expected closing {close_c!r}", len(src))
            body = src[len(head) + 1:-1]
            offset = len(head) + 1
            if head == "atomic":
                atoms = []
                for piece in body.split(","):
                    if ":" not in piece:
                        raise SpecSyntaxError("atomic entries are weight:atom", offset)
                    w_text, a_text = piece.split(":", 1)
                    atoms.append((
                        _parse_rational(w_text, offset),
                        _parse_rational(a_text, offset + len(w_text) + 1),
                    ))
                    offset += len(piece) + 1
                if any(w <= 0 for w, _ in atoms):
                    raise SpecSyntaxError("atomic weights must be positive", len(head) + 1)
                if sum(w for w, _ in atoms) != 1:
                    raise SpecSyntaxError("atomic weights must sum to 1", len(head) + 1)
                return DistributionSpec(src, "atomic", atoms=tuple(atoms))
            numbers = []
            for piece in body.split(","):
                if not piece.strip():
                    raise SpecSyntaxError("empty entry", offset)
                numbers.append(_parse_rational(piece, offset))
                offset += len(piece) + 1
            if head in ("semicircle", "free-poisson") and len(numbers) != 1:
                raise SpecSyntaxError(f"{head} takes exactly one parameter", len(head) + 1)
            return DistributionSpec(src, head, numbers=tuple(numbers))
    raise SpecSyntaxError(f"expected one of {', '.join(_SPEC_KINDS)}", 0)


def _fault_active() -> bool:
    return os.environ.get(FAULT_ENV) == "1"


def _perturb(value: Fraction) -> Fraction:
    return value + 1 if _fault_active() else value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freecommutant",
        description="Exact verification of commutator-distribution identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, x=False, rho=False, order=None):
        if x:
            p.add_argument("--x", required=True, help="distribution spec for x")
            p.add_argument("--s-var", default="1", help="variance of the semicircular s")
        if rho:
            p.add_argument("--rho", required=True,
                           help="driving measure: atomic(...) or rho-moments[...]")
        if order is not None:
            p.add_argument("--max-order", type=int, default=order)
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("verify-additivity",
                          help="kappa_n(s+i[s,x]) vs kappa_n(s)+kappa_n(i[s,x])"),
           x=True, order=6)
    common(sub.add_parser("freeness-witness", help="kappa_4(s, i[s,x], i[s,x], s)"), x=True)
    common(sub.add_parser("cancellation", help="the signed double sums that must vanish"),
           x=True, order=5)
    common(sub.add_parser("verify-closed-form",
                          help="closed form for kappa_n(x+i[x,s]) vs full expansion"),
           x=True, order=6)
    common(sub.add_parser("verify-fock",
                          help="operator model vs composition sums vs closed form"),
           rho=True, order=6)
    fid = sub.add_parser("fid-check", help="truncated Hankel positivity witnesses")
    fid.add_argument("--rho", help="driving measure for x (atomic or rho-moments)")
    fid.add_argument("--sequence", help="literal cumulants[...] to check directly")
    fid.add_argument("--size", type=int, default=3)
    fid.add_argument("--format", choices=("json", "table"), default="json")
    fid.add_argument("--jobs", type=int, default=1)
    fid.add_argument("--seed", type=int, default=0)
    parts = sub.add_parser("partitions", help="enumerate a partition family")
    parts.add_argument("--n", type=int, required=True)
    parts.add_argument("--kind", required=True,
                       choices=[k.value for k in PartitionKind])
    parts.add_argument("--format", choices=("json", "table"), default="json")
    parts.add_argument("--jobs", type=int, default=1)
    parts.add_argument("--seed", type=int, default=0)
    common(sub.add_parser("cumulants", help="cumulant and moment table of a spec"),
           x=True, order=8)
    return parser


def _order_or_die(requested: int) -> int:
    cap = resolve_order_cap()
    if requested > cap:
        raise FreeCommutantError(
            f"--max-order {requested} exceeds the cap {cap};"
            f" raise it via {ORDER_CAP_ENV}"
        )
    if requested > DEFAULT_ORDER_CAP:
        est = 3 ** requested
        print(
            f"note: order {requested} expands about {est} slot assignments per cumulant",
            file=sys.stderr,
        )
    return requested


def _pair_from_args(args, order: int) -> DistributionPair:
    spec = parse_spec(args.x)
    s_var = as_fraction(args.s_var)
    return DistributionPair(
        CumulantSequence.semicircular(s_var, max(order, 2)),
        spec.cumulants(max(order, 2)),
        max_order=order,
    )


def _additivity_order(payload) -> AdditivityReport:
    pair, n = payload
    lhs = real_cumulant(
        cumulant_of_polynomials([sum_with_commutator()] * n, pair.dist_s, pair.dist_x),
        self_adjoint=True,
    )
    rhs_c = real_cumulant(
        cumulant_of_polynomials([commutator_polynomial(I_S_X)] * n,
                                pair.dist_s, pair.dist_x),
        self_adjoint=True,
    )
    return AdditivityReport(
        n=n, lhs=lhs, rhs_s=pair.dist_s.kappa(n), rhs_c=rhs_c,
        hypothesis_met=pair.semicircular_hypothesis,
    )


def _cancellation_cell(payload):
    pair, n, k = payload
    return cancellation_sum(n, k, pair)


def _closed_form_order(payload):
    dist_x, n = payload
    return closed_form_cumulant(n, dist_x), expansion_cumulant(n, dist_x, 1)


def _fock_order(payload):
    rho, dist_x, n = payload
    return (
        model_cumulant(n, rho),
        composition_formula_cumulant(n, rho),
        closed_form_cumulant(n, dist_x),
    )


def _pmap(fn, items, jobs):
    if jobs <= 1:
        return [fn(it) for it in items]
    with get_context("fork").Pool(jobs) as pool:
        return pool.map(fn, items)


def _cmd_verify_additivity(args) -> tuple[dict, bool]:
    order = _order_or_die(args.max_order)
    pair = _pair_from_args(args, order)
    if args.jobs > 1:
        reports = _pmap(_additivity_order,
                        [(pair, n) for n in range(1, order + 1)], args.jobs)
    else:
        reports = verify_additivity(pair, order)
    if reports and _fault_active():
        reports[0] = replace(reports[0], lhs=reports[0].lhs + 1)
    ok = all(r.holds for r in reports)
    payload = {
        "command": "verify-additivity",
        "x": args.x,
        "s_var": format_rational(as_fraction(args.s_var)),
        "max_order": order,
        "hypothesis_met": pair.semicircular_hypothesis,
        "holds": ok,
        "reports": [r.to_json() for r in reports],
    }
    return payload, ok


def _cmd_freeness_witness(args) -> tuple[dict, bool]:
    pair = _pair_from_args(args, 4)
    witness = _perturb(freeness_witness(pair))
    expected = pair.dist_s.kappa(2) ** 2 * pair.dist_x.kappa(2)
    ok = witness == expected
    payload = {
        "command": "freeness-witness",
        "x": args.x,
        "s_var": format_rational(as_fraction(args.s_var)),
        "witness": format_rational(witness),
        "expected": format_rational(expected),
        "holds": ok,
        "note": "a nonzero witness certifies that s and i[s,x] are not free",
    }
    return payload, ok


def _cmd_cancellation(args) -> tuple[dict, bool]:
    order = _order_or_die(args.max_order)
    pair = _pair_from_args(args, order)
    cells = [(n, k) for n in range(2, order + 1) for k in range(1, n)]
    values = _pmap(_cancellation_cell, [(pair, n, k) for n, k in cells], args.jobs)
    entries = []
    for i, ((n, k), value) in enumerate(zip(cells, values)):
        v = _perturb(value.re) if i == 0 else value.re
        entries.append({"n": n, "k": k, "value": format_rational(v), "holds": v == 0})
    ok = all(e["holds"] for e in entries)
    payload = {
        "command": "cancellation",
        "x": args.x,
        "s_var": format_rational(as_fraction(args.s_var)),
        "max_order": order,
        "holds": ok,
        "entries": entries,
    }
    return payload, ok


def _cmd_verify_closed_form(args) -> tuple[dict, bool]:
    order = _order_or_die(args.max_order)
    spec = parse_spec(args.x)
    dist_x = spec.cumulants(max(order, 2))
    results = _pmap(_closed_form_order,
                    [(dist_x, n) for n in range(1, order + 1)], args.jobs)
    entries = []
    for n, (closed, oracle) in zip(range(1, order + 1), results):
        if n == 1:
            closed = _perturb(closed)
        entries.append({
            "n": n,
            "closed_form": format_rational(closed),
            "expansion": format_rational(oracle),
            "holds": closed == oracle,
        })
    ok = all(e["holds"] for e in entries)
    payload = {
        "command": "verify-closed-form",
        "x": args.x,
        "max_order": order,
        "holds": ok,
        "entries": entries,
    }
    return payload, ok


def _cmd_verify_fock(args) -> tuple[dict, bool]:
    order = _order_or_die(args.max_order)
    spec = parse_spec(args.rho)
    # the adjointness samples pair exponents up to order 8
    rho = spec.rho(max(order + 1, 8) if spec.kind == "atomic" else order + 1)
    dist_x = compound_poisson_from_rho(rho, order)
    results = _pmap(_fock_order,
                    [(rho, dist_x, n) for n in range(1, order + 1)], args.jobs)
    entries = []
    for n, (model, comp, closed) in zip(range(1, order + 1), results):
        if n == 1:
            model = _perturb(model)
        entries.append({
            "n": n,
            "model": format_rational(model),
            "composition": format_rational(comp),
            "closed_form": format_rational(closed),
            "holds": model == comp == closed,
        })
    ok = all(e["holds"] for e in entries)
    adjoint: bool | None = None
    if rho.genuine:
        adjoint = verify_adjointness(ADJOINT_PAIRS, 50, rho, args.seed)
        ok = ok and adjoint
    payload = {
        "command": "verify-fock",
        "rho": args.rho,
        "max_order": order,
        "seed": args.seed,
        "holds": ok,
        "adjointness": adjoint,
        "entries": entries,
    }
    return payload, ok


def _cmd_fid_check(args) -> tuple[dict, bool]:
    size = args.size
    order = 2 * size
    checks: list[tuple[str, CumulantSequence]] = []
    if args.sequence:
        checks.append(("sequence", parse_spec(args.sequence).cumulants(order)))
    if args.rho:
        rho = parse_spec(args.rho).rho(order)
        dist_x = compound_poisson_from_rho(rho, order)
        checks.append(("x+i[x,s]", CumulantSequence(
            [closed_form_cumulant(n, dist_x) for n in range(1, order + 1)])))
        pair = DistributionPair.standard(dist_x, 1, max_order=order)
        checks.append(("s+i[s,x]",
                       cumulant_sequence_of(sum_with_commutator(), pair, order)))
    if not checks:
        raise FreeCommutantError("fid-check needs --rho and/or --sequence")
    if _fault_active() and checks[0][1].max_order >= 2:
        name, seq = checks[0]
        values = list(seq.values)
        values[1] = -abs(values[1]) - 1  # force a negative leading pivot
        checks[0] = (name, CumulantSequence(values))
    entries = []
    for target, seq in checks:
        verdict = hankel_fid_check(seq, size)
        entry = {"target": target, "cumulants": seq.to_json()}
        entry.update(verdict.to_json())
        entries.append(entry)
    ok = all(e["psd"] for e in entries)
    payload = {
        "command": "fid-check",
        "size": size,
        "holds": ok,
        "entries": entries,
    }
    return payload, ok


def _cmd_partitions(args) -> tuple[dict, bool]:
    kind = PartitionKind(args.kind)
    parts = [p.to_json() for p in iter_partitions(args.n, kind)]
    payload = {
        "command": "partitions",
        "n": args.n,
        "kind": kind.value,
        "count": len(parts),
        "partitions": parts,
    }
    return payload, True


def _cmd_cumulants(args) -> tuple[dict, bool]:
    order = args.max_order
    spec = parse_spec(args.x)
    seq = spec.cumulants(order)
    moments = moments_from_cumulants(seq, order)
    payload = {
        "command": "cumulants",
        "x": args.x,
        "max_order": order,
        "cumulants": seq.to_json(),
        "moments": moments.to_json(),
    }
    return payload, True


_HANDLERS = {
    "verify-additivity": _cmd_verify_additivity,
    "freeness-witness": _cmd_freeness_witness,
    "cancellation": _cmd_cancellation,
    "verify-closed-form": _cmd_verify_closed_form,
    "verify-fock": _cmd_verify_fock,
    "fid-check": _cmd_fid_check,
    "partitions": _cmd_partitions,
    "cumulants": _cmd_cumulants,
}


def run(argv: list[str]) -> tuple[dict, bool]:
    """Parse arguments and execute one command, returning (report, ok)."""
    args = _build_parser().parse_args(argv)
    return _HANDLERS[args.command](args)


def _render_table(payload: dict) -> str:
    lines = []
    rows_key = None
    for key, value in payload.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            rows_key = key
            continue
        if isinstance(value, list):
            lines.append(f"{key}: {' '.join(str(v) for v in value)}")
        else:
            lines.append(f"{key}: {value}")
    if rows_key:
        rows = payload[rows_key]
        headers = list(rows[0].keys())
        table = [headers] + [
            [" ".join(map(str, r[h])) if isinstance(r[h], list) else str(r[h])
             for h in headers]
            for r in rows
        ]
        widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
        for row in table:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        payload, ok = _HANDLERS[args.command](args)
    except SpecSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FreeCommutantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "table":
        sys.stdout.write(_render_table(payload))
    else:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
