"""Command-line interface.

Every subcommand reads optional defaults from ``--config FILE`` (INI syntax,
section named after the command, keys named after the long flags with dashes
or underscores); explicit flags override file values.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import chain, characters, diagrams, evolution, freeprob, limitshape, pausing, simulate, thoma
from .groups import TableError, builtin_names, plancherel_weights, resolve_group, table_to_dict

SEED_ENV = "RESIND_SEED"


# --- helpers ---------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, complex):
        return repr(x.real) if abs(x.imag) < 1e-15 else f"{x.real!r}{x.imag:+r}j"
    return repr(float(x))


def _write_csv(rows: list[dict], out) -> None:
    if not rows:
        return
    w = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (_fmt(v) if not isinstance(v, str) else v) for k, v in r.items()})


def _emit(rows: list[dict], path: str | None) -> None:
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            _write_csv(rows, fh)
    else:
        _write_csv(rows, sys.stdout)


# --- verify / spectrum / characters / tables ----------------------------------------

def _suite(n: int, table, cap: int, fault: bool = False) -> list[tuple[str, bool]]:
    out = []
    cm = chain.build(n, table, cap=cap)
    if fault and len(cm.states) > 1:
        row = cm.p[0]
        j = next(iter(k for k in row if k != 0), 1)
        row[j] = row.get(j, Fraction(0)) + Fraction(1, 10**6)
        row[0] = row.get(0, Fraction(0)) - Fraction(1, 10**6)
    tag = f"{table.name} n={n}"
    out.append((f"{tag}: row sums of P, P_down, P_up equal 1",
                all(s == 1 for w in ("p", "p_down", "p_up") for s in cm.row_sums(w))))
    out.append((f"{tag}: detailed balance", chain.verify_detailed_balance(cm).ok))
    ok = all(chain.explicit_entry(a, b, table) == cm.entry(i, j)
             for i, a in enumerate(cm.states) for j, b in enumerate(cm.states))
    out.append((f"{tag}: explicit entries equal P_down P_up", ok))
    out.append((f"{tag}: eigenvectors from characters", chain.verify_spectrum(cm).ok))
    total = sum(diagrams.multi_dim(s, table) ** 2 for s in cm.states)
    out.append((f"{tag}: sum of dim^2 equals n! |T|^n", total == math.factorial(n) * table.order**n))
    ok = True
    for lam in cm.states:
        d = diagrams.multi_dim(lam, table)
        down = sum(table.dims[z] * diagrams.multi_dim(nu, table) for nu, z in diagrams.cells(lam))
        ok &= down == d
        up = sum(table.dims[z] * diagrams.multi_dim(mu, table) for mu, z in diagrams.covers(lam))
        ok &= up == (n + 1) * table.order * d
    out.append((f"{tag}: branching identities", ok))
    ok = all(
        characters.cycle_character(lam, k, th, table) == characters.wreath_normalized_character(
            lam, characters.ClassType.cycle(k, th, table.n_classes), n, table)
        for lam in cm.states for k in range(1, n + 1) for th in range(table.n_classes))
    out.append((f"{tag}: single-cycle character formula", ok))
    return out


def cmd_verify(args) -> int:
    groups = [args.group] if args.group else ["trivial", "z2", "s3", "d4"]
    t0 = time.perf_counter()
    results = []
    for g in groups:
        table = resolve_group(g)
        if not table.exact:
            results.append((f"{table.name}: table is exact", False))
            continue
        nmax = args.n if args.n else (5 if table.order <= 2 else 3)
        for n in range(1, nmax + 1):
            results += _suite(n, table, max(args.cap, nmax), fault=args.inject_fault)
    ok = True
    for size in range(9):
        for nu in diagrams.partitions(size):
            r = freeprob.moments_to_cumulants(diagrams.transition_measure(nu).moments(3))
            ok &= r[0] == 0 and r[1] == size and r[2] == characters.sigma((2,), nu)
    results.append(("transition measures: R_1 = 0, R_2 = |nu|, R_3 = Sigma_2(nu), |nu| <= 8", ok))
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    failed = sum(1 for _, ok in results if not ok)
    print(f"{len(results) - failed}/{len(results)} checks passed in {time.perf_counter() - t0:.1f}s")
    return 1 if failed else 0


def cmd_spectrum(args) -> int:
    table = resolve_group(args.group)
    cm = chain.build(args.n, table, cap=args.cap)
    rep = chain.verify_spectrum(cm)
    for rho, ev, ok in rep.checks:
        label = ";".join(",".join(map(str, e)) or "-" for e in rho.entries)
        print(f"{'PASS' if ok else 'FAIL'}  rho={label}  eigenvalue={ev}")
    bal = chain.verify_detailed_balance(cm)
    print(f"{'PASS' if bal.ok else 'FAIL'}  detailed balance ({bal.checked} pairs)")
    return 0 if rep.ok and bal.ok else 1


def cmd_characters(args) -> int:
    table = resolve_group(args.group)
    states, types, rows = characters.character_table(args.n, table)
    cols = ["state"] + [";".join(",".join(map(str, e)) or "-" for e in t.entries) for t in types]
    out = [dict(zip(cols, [diagrams.format_multi(s, table)] + [str(v) for v in row]))
           for s, row in zip(states, rows)]
    _emit(out, args.out)
    return 0


def cmd_tables(args) -> int:
    if args.show:
        print(json.dumps(table_to_dict(resolve_group(args.show)), indent=1))
        return 0
    for name in builtin_names():
        t = resolve_group(name)
        print(f"{name}\torder={t.order}\tclasses={t.n_classes}\texact={t.exact}")
    return 0


# --- simulate ----------------------------------------------------------------------

def _pausing(args) -> pausing.PausingTime:
    if args.pausing == "exponential":
        return pausing.Exponential(args.m)
    if args.pausing == "gamma":
        return pausing.Gamma(args.shape, args.m / args.shape)
    if args.pausing == "stable":
        return pausing.OneSidedStable(args.alpha)
    raise ValueError(f"unknown pausing law {args.pausing!r}")


def _sim_config(args) -> simulate.SimConfig:
    table = resolve_group(args.group)
    if args.ensemble == "plancherel":
        ens = simulate.Plancherel()
    elif args.state:
        ens = simulate.Delta(diagrams.parse_multi(args.state, table))
    else:
        entries = [diagrams.YoungDiagram(())] * table.n_irreps
        entries[0] = diagrams.square_diagram(args.n)
        ens = simulate.Delta(diagrams.MultiDiagram(tuple(entries)))
    clock = pausing.ClockMode(args.clock, args.alpha)
    return simulate.SimConfig(args.n, table, ens, _pausing(args), clock, tuple(_floats(args.t)),
                              args.samples, args.K, args.seed, args.workers)


def _zrow(t, lab, stat, mc, th, se) -> dict:
    diff = abs(mc - th)
    # deterministic statistics (e.g. at t = 0) have SE at rounding level
    if se <= 1e-12 * max(1.0, abs(th)):
        score = 0.0 if diff <= 1e-9 * max(1.0, abs(th)) else math.inf
    else:
        score = diff / se
    return {"t": t, "zeta": lab, "stat": stat, "mc": float(mc), "theory": float(th),
            "se": float(se), "z_score": score}


def theory_comparison(cfg: simulate.SimConfig, rep: simulate.SimReport) -> list[dict]:
    """|MC - theory| / SE per (zeta, k, t), with theory started from the
    initial state's rescaled cumulants (semicircle for Plancherel)."""
    s2 = [float(w) for w in plancherel_weights(cfg.table)]
    K1 = cfg.K + 1
    if isinstance(cfg.ensemble, simulate.Delta):
        init = [simulate.scaled_cumulants(nu, cfg.n, K1) for nu in cfg.ensemble.state]
    else:
        init = [np.array([0.0, s] + [0.0] * (K1 - 2)) for s in s2]
    mode = "diffusive" if cfg.clock.mode == "diffusive" else "stable"
    rows = []
    for i, t in enumerate(rep.t_grid):
        a = [pausing.a_limit(k, t, mode, m=cfg.pausing.mean if mode == "diffusive" else 1.0,
                             alpha=cfg.clock.alpha) for k in range(1, K1)]
        for z, lab in enumerate(rep.irreps):
            th = (1 - a[0]) * s2[z] + a[0] * init[z][1]
            rows.append(_zrow(t, lab, "size", rep.size_mean[i, z], th, rep.size_se[i, z]))
            for j in range(2, K1 + 1):
                th = (1 - a[0]) * s2[z] + a[0] * init[z][1] if j == 2 else a[j - 2] * init[z][j - 1]
                rows.append(_zrow(t, lab, f"R{j}", rep.r_mean[i, z, j - 2], th, rep.r_se[i, z, j - 2]))
    return rows


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rep = simulate.estimate(cfg)
    (out / "report.csv").write_text(rep.to_csv())
    (out / "report.json").write_text(rep.to_json())
    buf = io.StringIO()
    _write_csv(theory_comparison(cfg, rep), buf)
    (out / "comparison.csv").write_text(buf.getvalue())
    effective = dict(rep.config, workers=cfg.workers, out=str(out))
    print(json.dumps(effective, sort_keys=True))
    return 0


# --- theory / shape ---------------------------------------------------------------

def _preset(args):
    table = resolve_group(args.group)
    kw = {}
    for key in ("a", "b", "c"):
        val = getattr(args, key)
        if val is not None:
            kw[key] = _floats(val)
    return evolution.ensemble_preset(args.preset, table, r=args.r, rp=args.rp, K=args.K, **kw)


def cmd_theory(args) -> int:
    if args.what == "a":
        rows = []
        for k in [int(x) for x in _floats(args.k)]:
            for t in _floats(args.t):
                rows.append({"k": k, "t": t, "mode": args.mode,
                             "a": pausing.a_limit(k, t, args.mode, m=args.m, alpha=args.alpha)})
        _emit(rows, args.out)
        return 0
    p = _preset(args)
    if args.what == "evolve":
        spec = p.spec(args.clock, args.m)
        rows = []
        for t in _floats(args.t):
            cums = evolution.evolve_cumulants(spec, t)
            levy = ([evolution.levy_flow_exponential(l, t, args.m, s) for l, s in zip(spec.levy, spec.sigma2)]
                    if args.clock == "exponential" else
                    [evolution.levy_flow_stable(l, t, s) for l, s in zip(spec.levy, spec.sigma2)])
            for z, lab in enumerate(p.table.irrep_labels):
                row = {"t": t, "zeta": lab}
                row.update({f"R{j}": cums[z][j] for j in range(1, p.K + 1)})
                row.update({f"M{j}": levy[z].moment(j) for j in range(p.K - 1)})
                rows.append(row)
        _emit(rows, args.out)
        return 0
    # ensemble
    fam = thoma.ThomaFamily(p)
    om = fam.at(args.n)
    rows = []
    lim = thoma.initial_cumulants_from_family(fam, p.K)
    for z, lab in enumerate(p.table.irrep_labels):
        row = {"zeta": lab, "n": args.n, "c": float(om.c[z]), "alpha_1": float(om.first(z))}
        mom = thoma.rescaled_thoma_moments(fam, args.n, z, p.K - 2)
        row.update({f"M{j}_n": v for j, v in enumerate(mom)})
        row.update({f"R{j}_limit": float(lim[z][j]) for j in range(1, p.K + 1)})
        rows.append(row)
    _emit(rows, args.out)
    return 0


def _svg(curves: list[tuple[str, np.ndarray, np.ndarray]], path: Path) -> None:
    xs = np.concatenate([c[1] for c in curves])
    ys = np.concatenate([c[2] for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = 0.0, float(ys.max())
    W, H, pad = 640.0, 400.0, 20.0
    sx = (W - 2 * pad) / (x1 - x0 or 1)
    sy = (H - 2 * pad) / (y1 - y0 or 1)
    colors = ["#1b6ca8", "#d1495b", "#66a182", "#edae49", "#00798c", "#30638e", "#003d5b", "#8d6a9f"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W:.0f} {H:.0f}">',
             f'<rect width="{W:.0f}" height="{H:.0f}" fill="white"/>']
    for i, (label, x, y) in enumerate(curves):
        pts = " ".join(f"{pad + (a - x0) * sx:.2f},{H - pad - (b - y0) * sy:.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline fill="none" stroke="{colors[i % len(colors)]}" stroke-width="1.5" '
                     f'points="{pts}"><title>{label}</title></polyline>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def cmd_shape(args) -> int:
    p = _preset(args)
    spec = p.spec(args.clock, args.m)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    curves = []
    for t in _floats(args.t):
        shapes = limitshape.shapes_at_time(spec, t)
        for lab, d in zip(p.table.irrep_labels, shapes):
            rows = [{"x": float(a), "omega": float(b)} for a, b in zip(d.x, d.omega)]
            with open(out / f"shape_{lab}_t{t:g}.csv", "w", newline="") as fh:
                _write_csv(rows, fh)
            curves.append((f"{lab} t={t:g}", d.x, d.omega))
    if args.svg:
        _svg(curves, out / "shapes.svg")
    print(f"wrote {len(curves)} curves to {out}")
    return 0


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="resind", description=__doc__.splitlines()[0], allow_abbrev=False)
    ap.add_argument("--config", help="INI file with one section per command")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="exact identity suites")
    v.add_argument("--n", type=int, default=0, help="largest n (default 5 for |T| <= 2, else 3)")
    v.add_argument("--group", default=None, help="builtin name or JSON file (default: all exact builtins)")
    v.add_argument("--cap", type=int, default=chain.DEFAULT_CAP)
    v.add_argument("--inject-fault", type=_bool, nargs="?", const=True, default=False)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="Monte Carlo estimates of sizes and cumulants")
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--group", default="trivial")
    s.add_argument("--ensemble", choices=["delta", "plancherel"], default="delta")
    s.add_argument("--state", default=None, help='multi-diagram literal, e.g. "triv:3,2;sign:1"')
    s.add_argument("--pausing", choices=["exponential", "gamma", "stable"], default="exponential")
    s.add_argument("--m", type=float, default=1.0)
    s.add_argument("--shape", type=float, default=2.0, help="gamma shape")
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--clock", choices=["diffusive", "stable"], default="diffusive")
    s.add_argument("--t", default="0,0.5,1")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--K", type=int, default=5)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="sim_out")
    s.set_defaults(func=cmd_simulate)

    th = sub.add_parser("theory", help="a_k(t), evolved cumulants, Thoma families")
    th.add_argument("what", choices=["a", "evolve", "ensemble"])
    th.add_argument("--k", default="1,2,3")
    th.add_argument("--t", default="0,0.5,1")
    th.add_argument("--mode", choices=["diffusive", "stable"], default="diffusive")
    th.add_argument("--alpha", type=float, default=0.5)
    th.add_argument("--m", type=float, default=1.0)
    th.add_argument("--n", type=int, default=10000)
    _preset_args(th)
    th.add_argument("--out", default=None)
    th.set_defaults(func=cmd_theory)

    sh = sub.add_parser("shape", help="averaged limit shapes as CSV and SVG")
    _preset_args(sh)
    sh.add_argument("--m", type=float, default=1.0)
    sh.add_argument("--t", default="0,0.5,1,2")
    sh.add_argument("--out", default="shapes")
    sh.add_argument("--svg", type=_bool, default=True)
    sh.set_defaults(func=cmd_shape)

    c = sub.add_parser("characters", help="normalized character table as CSV")
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--group", default="trivial")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_characters)

    sp = sub.add_parser("spectrum", help="check eigenvectors and detailed balance")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--group", default="trivial")
    sp.add_argument("--cap", type=int, default=chain.DEFAULT_CAP)
    sp.set_defaults(func=cmd_spectrum)

    tb = sub.add_parser("tables", help="list builtin group tables")
    tb.add_argument("--show", default=None, help="print one table as JSON")
    tb.set_defaults(func=cmd_tables)
    return ap


def _preset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=["P1", "P2", "P3"], default="P1")
    p.add_argument("--group", default="trivial")
    p.add_argument("--clock", choices=list(evolution.CLOCKS), default="exponential")
    p.add_argument("--a", default=None, help="per-irrep list")
    p.add_argument("--b", default=None)
    p.add_argument("--c", default=None)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--rp", type=float, default=1.0)
    p.add_argument("--K", type=int, default=8)


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not cp.read(known.config):
        raise SystemExit(f"config file not found: {known.config}")
    command = next((a for a in rest if not a.startswith("-")), None)
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    if command not in subs.choices or not cp.has_section(command):
        return
    sp = subs.choices[command]
    dests = {a.dest: a for a in sp._actions}
    values = {}
    for key, raw in cp.items(command):
        dest = key.replace("-", "_")
        if dest not in dests:
            raise SystemExit(f"unknown key {key!r} in section [{command}]")
        act = dests[dest]
        values[dest] = act.type(raw) if act.type else raw
        if act.choices and values[dest] not in act.choices:
            raise SystemExit(f"invalid value {raw!r} for {key!r}")
    sp.set_defaults(**values)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    if hasattr(args, "seed") and args.seed is None:
        args.seed = _default_seed()
    try:
        return int(args.func(args) or 0)
    except (TableError, evolution.PresetError, chain.CapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
