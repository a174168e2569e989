"""``hodgekit`` command line.

Every subcommand builds a JSON-able report whose checks carry a relation
label.  Exit status: 0 when every check passes, 1 when one fails (the
failing relations are named on stderr), 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import degeneration, exterior, lefschetz, torus
from .scalars import QQ, re_im, to_rational

MAX_N = 6
MAX_M = 6
MAX_MODE = 4


class UsageError(ValueError):
    """Invalid parameters; reported with exit status 2."""


@dataclass
class Outcome:
    payload: dict
    failures: list = field(default_factory=list)
    lines: list = field(default_factory=list)

    def check(self, relation: str, ok: bool, detail: str = ""):
        self.payload.setdefault("checks", []).append({"relation": relation, "passed": bool(ok), "detail": detail})
        self.lines.append(f"{'PASS' if ok else 'FAIL'}  {relation}" + (f"  {detail}" if detail else ""))
        if not ok and relation not in self.failures:
            self.failures.append(relation)


# ---------------------------------------------------------------------------
# argument helpers


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: not valid JSON ({exc.msg})") from exc


def _matrix(text: str | None, what: str = "--matrix") -> list[list] | None:
    if text is None:
        return None
    path = Path(text)
    obj = _json_arg(path.read_text() if path.is_file() else text, what)
    if isinstance(obj, dict):
        obj = obj.get("entries", obj.get("gram"))
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise UsageError(f"{what}: expected a list of rows")
    try:
        return [[to_rational(x) if not isinstance(x, dict) else QQ(int(x["num"]), int(x.get("den", 1)))
                 for x in row] for row in obj]
    except (TypeError, ValueError, KeyError, ZeroDivisionError) as exc:
        raise UsageError(f"{what}: bad entry ({exc})") from exc


def _class_arg(text: str | None, what: str):
    if text is None:
        return None
    obj = _json_arg(text, what)
    if not isinstance(obj, (dict, list)):
        raise UsageError(f"{what}: expected {{name: coefficient}} or a coordinate list")
    return obj


def _eps_list(text: str | None, count: int) -> list:
    if text is None:
        return degeneration.geometric_eps(count)
    try:
        eps = [to_rational(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--eps: {exc}") from exc
    if not eps:
        raise UsageError("--eps: empty list")
    return eps


def _in_range(name: str, value: int | None, lo: int, hi: int):
    if value is not None and not lo <= value <= hi:
        raise UsageError(f"{name} must lie in {lo}..{hi}, got {value}")


def _ring(args) -> lefschetz.GradedRing:
    if not args.ring:
        raise UsageError("--ring is required")
    _in_range("--n", args.n, 0, MAX_N)
    try:
        return lefschetz.load_ring(args.ring, args.n)
    except FileNotFoundError as exc:
        raise UsageError(f"--ring: no builtin or file named {args.ring!r}") from exc


def _rat(x) -> str:
    x = to_rational(x)
    return str(int(x.numerator)) if x.denominator == 1 else f"{int(x.numerator)}/{int(x.denominator)}"


def _gauss(z) -> str:
    re, im = re_im(z)
    if not im:
        return _rat(re)
    if not re:
        return f"{_rat(im)}i"
    return f"{_rat(re)}{'+' if im > 0 else '-'}{_rat(abs(im))}i"


# ---------------------------------------------------------------------------
# subcommands


def cmd_star(args) -> Outcome:
    m = args.m if args.m is not None else 3
    _in_range("--m", m, 1, MAX_M)
    gram = _matrix(args.matrix)
    g = exterior.MetricSpec(tuple(map(tuple, gram))) if gram is not None else exterior.MetricSpec.euclidean(m)
    if g.dim != m:
        raise UsageError(f"--matrix is {g.dim}×{g.dim} but --m is {m}")
    out = Outcome({"command": "star", "m": m, "metric": g.to_json()})
    dV = exterior.volume_element(g)
    table, stst, doso = [], True, True
    for I in exterior.multi_indices(m):
        e = exterior.ExteriorElement.basis(m, I)
        s = exterior.hodge_star(e, g)
        table.append({"index": list(I), "star": s.to_json()})
        out.lines.append(f"*e{list(I)} = {s}")
        if exterior.hodge_star(s, g) != e * exterior.star_star_sign(len(I), m):
            stst = False
        for J in exterior.multi_indices(m, len(I)):
            u = exterior.ExteriorElement.basis(m, J)
            if (u ^ s) != dV * exterior.inner_product(u, e, g):
                doso = False
    out.payload["table"] = table
    one = exterior.ExteriorElement.scalar(m)
    out.check("stst", stst, "** = (-1)^{p(m-p)} on every basis element")
    out.check("doso", doso, "u ^ *v = <u,v> dV on basis pairs")
    out.check("exonst", exterior.hodge_star(one, g) == dV and exterior.hodge_star(dV, g) == one, "*1 = dV, *dV = 1")
    return out


def cmd_kahler(args) -> Outcome:
    n = args.n if args.n is not None else 1
    _in_range("--n", n, 1, MAX_N)
    bound = args.max_mode if args.max_mode is not None else 2
    _in_range("--max-mode", bound, 0, MAX_MODE)
    report = torus.kahler_identity_suite(n, max_mode=bound)
    out = Outcome({"command": "kahler-check", "n": n, "max_mode": bound, "modes": report.modes})
    out.payload["relations"] = [r.to_json() for r in report.relations.values()]
    for name, r in report.relations.items():
        out.check(name, r.passed, f"{r.modes_checked} modes, residual {'0 exact' if r.passed else r.max_residual}")
    return out


def cmd_torus(args) -> Outcome:
    m = args.m if args.m is not None else 2
    _in_range("--m", m, 1, MAX_M)
    bound = args.max_mode if args.max_mode is not None else 1
    _in_range("--max-mode", bound, 0, MAX_MODE)
    out = Outcome({"command": "torus", "m": m, "max_mode": bound})
    g = exterior.MetricSpec.euclidean(m)

    betti = torus.betti_numbers(m, bound)
    out.payload["betti"] = list(betti)
    expected = [len(exterior.multi_indices(m, p)) for p in range(m + 1)]
    out.check("hit", list(betti) == expected, f"dim H^p = {list(betti)}")

    dets = [torus.linalg.det(torus.poincare_pairing(m, p)) for p in range(m + 1)]
    out.payload["poincare_determinants"] = [_rat(d) for d in dets]
    out.check("pd", all(dets), "det of the pairing H^p x H^{m-p}: " + ", ".join(_rat(d) for d in dets))

    modes = torus.modes_in_box(m, bound)
    eig_ok = all(
        torus.laplacian_block(k, g) == torus.ExactSparse.identity(2 ** m).scale(torus.laplacian_eigenvalue(k, g))
        for k in modes)
    out.check("itslap", eig_ok, "Delta = |k|^2 on every mode")

    # decompose the form with every basis coefficient 1 on every mode
    full = exterior.ExteriorElement(m, {I: QQ(1) for I in exterior.multi_indices(m)})
    F = torus.FourierForm(m, {k: full for k in modes})
    dec = torus.hodge_decompose(F, g)
    parts = (dec.harmonic, dec.exact, dec.coexact)
    orth = all(not torus.global_inner(a, b, g) for i, a in enumerate(parts) for b in parts[i + 1:])
    out.check("hdts", dec.reconstruct() == F and orth, "H + dA + d*B reconstructs, parts pairwise orthogonal")

    if m % 2 == 0:
        h = torus.hodge_numbers(m // 2, min(bound, 1))
        out.payload["hodge_numbers"] = {f"{p},{q}": v for (p, q), v in sorted(h.items())}
        n = m // 2
        want = {(p, q): len(exterior.multi_indices(n, p)) * len(exterior.multi_indices(n, q)) for p, q in h}
        out.check("pqdeco", h == want, "h^{p,q} = C(n,p)C(n,q)")
    return out


def cmd_lefschetz(args) -> Outcome:
    ring = _ring(args)
    omega = _class_arg(args.omega, "--class")
    hl = lefschetz.hard_lefschetz_check(ring, omega)
    out = Outcome({"command": "lefschetz", "ring": ring.name, "n": ring.n, "hard_lefschetz": hl.to_json()})
    for s in hl.steps:
        out.lines.append(f"      r={s.r}: rank {s.rank} of {s.source_dim} -> {s.target_dim}")
    out.check("chl-a", hl.passed, "" if hl.passed else f"first failure at r = {hl.first_failure}")
    if hl.passed:
        decs = [lefschetz.primitive_decompose(ring, omega, l) for l in range(ring.n + 1)]
        out.payload["primitive_decomposition"] = [d.to_json() for d in decs]
        for d in decs:
            dims = ", ".join(f"P^{d.degree - 2 * j}:{a}" for j, (a, _) in sorted(d.dimension_identity.items()))
            out.check("chl-b", d.passed, f"degree {d.degree}: {dims}")
    return out


def cmd_hr(args) -> Outcome:
    ring = _ring(args)
    omega = _class_arg(args.omega, "--class")
    out = Outcome({"command": "hr", "ring": ring.name, "n": ring.n})
    hr_reports, pol_reports = [], []
    for l in range(ring.n + 1):
        rep = lefschetz.hodge_riemann_check(ring, omega, l)
        hr_reports.append(rep.to_json())
        sig = "; ".join(f"({b.bidegree[0]},{b.bidegree[1]}) "
                        f"[{' '.join(_gauss(x) for x in (b.matrix[0] if len(b.matrix) == 1 else []))}]"
                        if len(b.matrix) == 1 else f"({b.bidegree[0]},{b.bidegree[1]}) dim {len(b.matrix)}"
                        for b in rep.blocks if b.matrix)
        out.check("chl-c", rep.passed, f"degree {l}: {sig or 'no primitive classes'}")
        slc = lefschetz.HodgeStructureSlice.primitive(ring, omega, l)
        if slc.vectors:
            pol = lefschetz.polarization_check(slc, lefschetz.hr_polarization(ring, omega, l))
            pol_reports.append(pol.to_json())
            out.check("defpol", pol.passed, f"weight {l}: Psi {pol.psi_parity}, Psi~ positive {pol.positive}")
    out.payload["hodge_riemann"] = hr_reports
    out.payload["polarization"] = pol_reports
    return out


def cmd_diamond(args) -> Outcome:
    ring = _ring(args)
    rep = lefschetz.hodge_diamond(ring)
    out = Outcome({"command": "diamond", **rep.to_json()})
    out.payload.pop("checks")
    out.lines.extend(rep.text().splitlines())
    out.lines.append(f"betti {rep.betti}")
    for name, ok in rep.checks.items():
        out.check(name, ok)
    return out


def cmd_contract(args) -> Outcome:
    if args.m is None:
        raise UsageError("--m is required")
    _in_range("--m", args.m, 1, MAX_M)
    entries = _matrix(args.matrix)
    if entries is None:
        raise UsageError("--matrix is required")
    M = degeneration.IntersectionMatrix(args.m, tuple(map(tuple, entries)))
    v = degeneration.contractibility_check(M)
    out = Outcome({"command": "contract", "input": M.to_json(), "result": v.to_json()})
    out.check("grmu", v.consistent, f"{v.verdict}; minors of (-1)^m E: {', '.join(_rat(x) for x in v.minors)}")
    return out


def cmd_limit(args) -> Outcome:
    if not args.ring:
        args.ring = "blowup_P2"
    ring = _ring(args)
    M = _class_arg(args.M, "--M")
    L = _class_arg(args.L, "--L")
    if M is None or L is None:
        if ring.name != "blowup_P2":
            raise UsageError("--M and --L are required for this ring")
        M = M if M is not None else {"h": 1}
        L = L if L is not None else {"h": 2, "e": -1}
    exc = _class_arg(args.exceptional, "--exceptional")
    eps = _eps_list(args.eps, args.eps_count)
    trace = degeneration.primitive_limit(ring, M, L, eps, exceptional=exc)
    out = Outcome({"command": "limit", "trace": trace.to_json()})
    for s in trace.steps:
        out.lines.append(f"      eps={_rat(s.eps)}: dim {s.dim}, gap {s.gap:.3e}")
    out.check("eqbn", trace.dims_constant and trace.limit_dim_ok,
              f"dim P = {trace.expected_dim} = b_2m - b_2m-2 at every eps")
    out.check("apprxu", trace.monotone, "gap distance non-increasing")
    vals = [_gauss(x) for row in trace.polarization_matrix for x in row]
    out.check("defpol", trace.polarization_ok, f"(-1)^m Psi on P_M: [{' '.join(vals)}]")
    if exc:
        out.check("grmu", trace.exceptional["in_primitive"] and trace.exceptional["positive"],
                  "exceptional classes primitive with positive twisted intersection matrix")
    return out


COMMANDS = {
    "star": (cmd_star, "Hodge star table on a metric"),
    "kahler-check": (cmd_kahler, "Kähler identity suite on the flat torus"),
    "torus": (cmd_torus, "Betti numbers, pairings and Hodge decomposition on T^m"),
    "lefschetz": (cmd_lefschetz, "hard Lefschetz and primitive decomposition"),
    "hr": (cmd_hr, "Hodge-Riemann forms and polarizations"),
    "diamond": (cmd_diamond, "Hodge diamond with its identities"),
    "contract": (cmd_contract, "contractibility criterion for an intersection matrix"),
    "limit": (cmd_limit, "limit of (M+eps L)-primitive subspaces"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodgekit", description="Exact Hodge-theoretic checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--out", help="write the report here instead of stdout")
        if name in ("lefschetz", "hr", "diamond", "limit"):
            p.add_argument("--ring", help="builtin (pn:3, torus:2, quadric, blowup_p2, ...) or ring JSON file")
        if name in ("lefschetz", "hr", "diamond", "limit", "kahler-check"):
            p.add_argument("--n", type=int, help=f"complex dimension (<= {MAX_N})")
        if name in ("star", "torus", "contract"):
            p.add_argument("--m", type=int, help=f"real dimension or half-dimension (<= {MAX_M})")
        if name in ("kahler-check", "torus"):
            p.add_argument("--max-mode", type=int, help=f"Fourier box |k|_inf bound (<= {MAX_MODE})")
        if name in ("star", "contract"):
            p.add_argument("--matrix", help="JSON rows or a file (Gram matrix or intersection matrix)")
        if name in ("lefschetz", "hr"):
            p.add_argument("--class", dest="omega", help='Lefschetz class, e.g. \'{"h": 1}\'')
        if name == "limit":
            p.add_argument("--M", help="class M (default h on blowup_P2)")
            p.add_argument("--L", help="ample class L (default 2h-e on blowup_P2)")
            p.add_argument("--eps", help="comma-separated positive rationals")
            p.add_argument("--eps-count", type=int, default=10, help="use 2^-j, j=1..count when --eps is absent")
            p.add_argument("--exceptional", help="JSON list of classes expected in P_M")
    return parser


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        payload = dict(outcome.payload, passed=not outcome.failures)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    status = "all checks passed" if not outcome.failures else "failed: " + ", ".join(outcome.failures)
    return "\n".join(outcome.lines + [status]) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = COMMANDS[args.command][0]
    try:
        outcome = handler(args)
    except (UsageError, lefschetz.RingCertificationError, ValueError, TypeError, OSError) as exc:
        print(f"hodgekit {args.command}: {exc}", file=sys.stderr)
        return 2
    text = render(outcome, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if outcome.failures:
        print(f"hodgekit {args.command}: violated {', '.join(outcome.failures)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
