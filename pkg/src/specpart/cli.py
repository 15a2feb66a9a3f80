"""Command-line entry point: ``specpart <command> [options]``.

Every command writes delimited-text tables (and, with ``--format svg|both``,
SVG images) into ``--out``. Each table starts with ``#`` header lines holding
the full run configuration and its hash, and no output depends on wall-clock
time, so identical configurations give identical files.

Exit codes: 0 success, 1 configuration error, 2 resolution error,
3 convergence failure, 4 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction


from . import bounds, eigen, geometry, magnetic, nodal, partition, rect, render
from .errors import ConfigError, SpecpartError
from .report import reports_to_csv, summary_table

log = logging.getLogger("specpart")

NAMED_DOMAINS = {
    "sq1": lambda: geometry.SQ1,
    "hexa1": lambda: geometry.HEXA1,
    "t1": lambda: geometry.T1,
    "disk1": lambda: geometry.DISK1,
    "square": lambda: geometry.DomainSpec.rectangle(1, 1),
    "disk": lambda: geometry.DomainSpec.disk(1.0),
}


def parse_domain(text):
    """Named domain, ``rectangle:a,b``, ``disk:r``, ``polygon:sides,area`` or a ``key = value`` file."""
    t = text.strip()
    if t.lower() in NAMED_DOMAINS:
        return NAMED_DOMAINS[t.lower()]()
    kind, _, args = t.partition(":")
    try:
        vals = [float(x) for x in args.split(",")] if args else []
        if kind == "rectangle" and len(vals) == 2:
            return geometry.DomainSpec.rectangle(*vals)
        if kind == "disk" and len(vals) == 1:
            return geometry.DomainSpec.disk(vals[0])
        if kind == "polygon" and len(vals) == 2:
            return geometry.DomainSpec.regular_polygon(int(vals[0]), vals[1])
    except ValueError as exc:
        raise ConfigError(f"bad domain {text!r}: {exc}") from exc
    if os.path.isfile(t):
        with open(t) as f:
            return geometry.DomainSpec.from_text(f.read())
    raise ConfigError(f"unknown domain {text!r}")


def parse_poles(text):
    if not text:
        return ()
    try:
        return tuple(tuple(float(v) for v in p.split(",")) for p in text.split(";") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad pole list {text!r}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="specpart", description="Spectral partitions and nodal domains on planar grids.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, domain=True, default_domain="square"):
        if domain:
            sp.add_argument("--domain", default=default_domain)
        sp.add_argument("--h", type=float, default=None, help="grid spacing")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="specpart_out")
        sp.add_argument("--format", choices=("csv", "svg", "both"), default="csv")

    sp = sub.add_parser("spectrum", help="rectangle spectrum, Courant-sharp scan, Pleijel sequence")
    sp.add_argument("--a", default="1")
    sp.add_argument("--b", default="1")
    sp.add_argument("--k", type=int, default=20)
    sp.add_argument("--lam-max", type=float, default=None)
    sp.add_argument("--theta-count", type=int, default=256)
    common(sp, domain=False)

    sp = sub.add_parser("solve", help="lowest Dirichlet eigenpairs of a domain")
    sp.add_argument("--k", type=int, default=6)
    common(sp)

    sp = sub.add_parser("nodal", help="theta-sweep of nodal counts for a square eigenspace")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--theta-count", type=int, default=256)
    common(sp, domain=False)

    sp = sub.add_parser("partition", help="minimal k-partition search")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--p", type=float, nargs="*", default=list(partition.DEFAULT_P_SCHEDULE))
    sp.add_argument("--restarts", type=int, default=4)
    common(sp, default_domain="disk")

    sp = sub.add_parser("bipartite", help="bipartite approximation of a partition")
    sp.add_argument("--checkpoint", default=None)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--eps", type=float, nargs="*", default=[8, 4, 2], help="multiples of h")
    sp.add_argument("--restarts", type=int, default=4)
    common(sp, default_domain="disk")

    sp = sub.add_parser("tiling-bound", help="upper bound from a k-cell tiling")
    sp.add_argument("--k", type=int, default=100)
    sp.add_argument("--cell", choices=("hexagon", "square"), default="hexagon")
    common(sp, default_domain="sq1")

    sp = sub.add_parser("ab", help="Aharonov-Bohm spectrum, Pleijel scan, characterization")
    sp.add_argument("--poles", default="0,0")
    sp.add_argument("--cuts", default="")
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--checkpoint", default=None)
    common(sp, default_domain="disk")

    sp = sub.add_parser("bounds", help="inequality suite on the built-in domains")
    sp.add_argument("--C", type=float, default=1.0)
    common(sp, domain=False)

    sp = sub.add_parser("constants", help="Pleijel, hexagonal, Bourgain and Steinerberger constants")
    sp.add_argument("--c", type=float, default=0.1)
    sp.add_argument("--C", type=float, default=1.0)
    common(sp, domain=False)
    return p


# ---------------------------------------------------------------------------
# output helpers


def config_of(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "verbose", "format")}
    return cfg


def config_hash(cfg):
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


class Output:
    def __init__(self, args):
        self.dir = args.out
        self.fmt = args.format
        self.cfg = config_of(args)
        self.hash = config_hash(self.cfg)
        os.makedirs(self.dir, exist_ok=True)
        self.files = []

    def header(self):
        return [f"config = {json.dumps(self.cfg, sort_keys=True)}", f"config_hash = {self.hash}"]

    def table(self, name, rows, fields=None):
        if self.fmt == "svg":
            return
        fields = fields or (list(rows[0].keys()) if rows else [])
        buf = io.StringIO()
        for line in self.header():
            buf.write(f"# {line}\n")
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        self._write(name, buf.getvalue())

    def text(self, name, content):
        if self.fmt != "svg":
            self._write(name, content)

    def svg(self, name, content):
        if self.fmt in ("svg", "both"):
            self._write(name, content)

    def _write(self, name, content):
        path = os.path.join(self.dir, name)
        with open(path, "w") as f:
            f.write(content)
        self.files.append(path)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v)
    return v


def _num(text):
    """Exact Fraction for rational input, float otherwise."""
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def _mask(domain, h, k=1):
    if h is None:
        h = partition.default_partition_spacing(domain, k) if k > 1 else eigen.default_spacing(domain)
    return geometry.rasterize(domain, h)


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(args, out):
    a, b = _num(args.a), _num(args.b)
    rows = [{"rank": e.rank, "m": e.m, "n": e.n, "value": e.value, "multiplicity": e.multiplicity,
             "mu": rect.mu_product(e.m, e.n)} for e in rect.rect_spectrum(a, b, args.k)]
    out.table("spectrum.csv", rows)
    if args.lam_max:
        rows = [r.__dict__ for r in rect.courant_sharp_scan(a, b, args.lam_max, theta_count=args.theta_count)]
        out.table("courant.csv", rows)
    ratio = float(b) / float(a)
    seq = rect.pleijel_limit_sequence(ratio, 8)
    out.table("pleijel.csv", [{"n": n, "m": m, "quotient": q, "gap": abs(q - 2 / math.pi)}
                              for (n, m), q in zip(seq.convergents, seq.quotients)])


def cmd_solve(args, out):
    domain = parse_domain(args.domain)
    mask = _mask(domain, args.h)
    op = eigen.assemble_dirichlet_laplacian(mask, boundary="linear")
    pairs = eigen.lowest_eigenpairs(op, args.k)
    rows = []
    for j, p in enumerate(pairs, start=1):
        nd = nodal.nodal_domains(p.vector, mask)
        rows.append({"j": j, "value": p.value, "scaled": p.value * geometry.area(domain),
                     "residual": p.residual, "mu": nd.count})
        out.svg(f"eigenfunction_{j}.svg", render.partition_svg(mask, p.vector, nodal.boundary_set(nd),
                                                              signed=True))
    out.table("eigenpairs.csv", rows)
    print(f"lambda_1 = {pairs[0].value:.8g} (h = {mask.h:.4g}, N = {mask.n})")


def cmd_nodal(args, out):
    res = nodal.theta_sweep_max_domains(args.m, args.n, args.theta_count)
    out.table("sweep.csv", [{"theta": t, "mu": mu} for t, mu in res.table])
    out.table("max.csv", [{"m": args.m, "n": args.n, "max_mu": res.max_mu, "argmax_theta": res.argmax_theta}])
    mask = nodal.square_mask(nodal._sweep_nodes(max(args.m, args.n)))
    v = nodal.combine_square_eigenfunctions(args.m, args.n, res.argmax_theta, mask)
    nd = nodal.nodal_domains(v, mask)
    out.svg("max_nodal.svg", render.partition_svg(mask, nd.labels, nodal.boundary_set(nd)))
    print(f"max mu = {res.max_mu} at theta = {res.argmax_theta:.6f}")


def _partition_rows(part):
    return [{"cell": i, "energy": e, "area": a} for i, (e, a) in enumerate(zip(part.energies, part.areas()), 1)]


def _optimize(args, domain):
    cfg = partition.OptimizerConfig(p_schedule=tuple(getattr(args, "p", partition.DEFAULT_P_SCHEDULE)),
                                    restarts=args.restarts, seed=args.seed, h=args.h)
    return partition.optimize_minimal_partition(domain, args.k, cfg)


def cmd_partition(args, out):
    domain = parse_domain(args.domain)
    part = _optimize(args, domain)
    bs = nodal.boundary_set(part)
    pts = nodal.critical_points(bs)
    out.table("energies.csv", _partition_rows(part))
    out.table("history.csv", [{"p": P, "iteration": it, "Lambda_p": v, "Lambda": L}
                              for P, it, v, L in part.history])
    out.table("critical_points.csv", [{"x": p.position[0], "y": p.position[1], "valence": p.valence}
                                      for p in pts], ["x", "y", "valence"])
    partition.save_checkpoint(part, os.path.join(out.dir, "partition.txt"), domain,
                              p=math.inf, seed=args.seed,
                              extra={"config_hash": out.hash})
    out.svg("partition.svg", render.partition_svg(part.mask, part.labels, bs, pts))
    print(f"Lambda = {part.Lambda:.8g}, odd critical points = {nodal.odd_count(pts)}")


def _load_or_optimize(args):
    if args.checkpoint:
        part, _ = partition.load_checkpoint(args.checkpoint)
        return part
    return _optimize(args, parse_domain(args.domain))


def cmd_bipartite(args, out):
    part = _load_or_optimize(args)
    L = part.Lambda
    rows = []
    for e in args.eps:
        bp = partition.bipartite_approximation(part, e * part.mask.h)
        res = nodal.is_bipartite(bp)
        rows.append({"eps_over_h": e, "Lambda": bp.Lambda, "gap": bp.Lambda - L, "bipartite": res.bipartite})
        out.svg(f"bipartite_{e:g}.svg", render.partition_svg(bp.mask, bp.labels, nodal.boundary_set(bp)))
    out.table("bipartite.csv", rows)
    print(f"input Lambda = {L:.8g}; gaps = " + ", ".join(f"{r['gap']:.4g}" for r in rows))


def cmd_tiling(args, out):
    domain = parse_domain(args.domain)
    tb = partition.tiling_upper_bound(domain, args.k, args.cell)
    out.table("tiling.csv", [{"k": tb.k, "cell": tb.cell_kind, "Lambda": tb.Lambda, "A_Lambda_over_k": tb.normalized,
                              "cell_area": tb.cell_area, "cell_energy": tb.cell_energy,
                              "lambda_hexa1": bounds.pleijel_constants().lambda_hexa1}])
    print(f"A*Lambda/k = {tb.normalized:.6g}")


def cmd_ab(args, out):
    if args.checkpoint:
        part, _ = partition.load_checkpoint(args.checkpoint)
        rep = magnetic.verify_magnetic_characterization(part)
        out.text("characterization.csv", reports_to_csv([rep], out.header()))
        print(summary_table([rep]))
        return
    domain = parse_domain(args.domain)
    mask = _mask(domain, args.h)
    poles = tuple(magnetic.snap_to_plaquette(mask, p) for p in parse_poles(args.poles))
    cuts = tuple(c for c in args.cuts.split(",") if c) if args.cuts else ()
    cfg = magnetic.PoleConfig(poles, cuts)
    rows = magnetic.ab_pleijel_scan(mask, cfg, args.n_max)
    out.table("ab_scan.csv", [{"n": r.n, "value": r.value, "mu": r.mu, "mu_over_n": r.ratio,
                               "tail_max": r.running_max, "valences": list(r.valences)} for r in rows])
    spec = magnetic.ab_spectrum(mask, cfg, 1)
    nd = spec.nodal(1)
    out.svg("ab_ground.svg", render.partition_svg(mask, spec.vectors[:, 0], nodal.boundary_set(nd),
                                                  poles=poles, signed=True))
    print(f"lambda_1^AB = {rows[0].value:.8g}; max mu/n = {max(r.ratio for r in rows):.4g}")


def cmd_bounds(args, out):
    reps = bounds.standard_reports()
    if args.C != 1.0:
        reps += [bounds.bdpv_check(geometry.SQ1, args.C)]
    out.text("bounds.csv", reports_to_csv(reps, out.header()))
    table = summary_table(reps)
    out.text("summary.txt", table + "\n")
    print(table)


def cmd_constants(args, out):
    c = bounds.pleijel_constants()
    bs = bounds.bourgain_sup()
    st = bounds.steinerberger_factor(args.c, args.C)
    rows = [
        {"name": "nu_Pl", "value": c.nu_pl},
        {"name": "nu_Hex (conjectural optimum)", "value": c.nu_hex},
        {"name": "lambda(Disk1)/lambda(Hexa1)", "value": c.ratio},
        {"name": "2/pi", "value": c.polterovich},
        {"name": "lambda(Disk1)", "value": c.lambda_disk1},
        {"name": "lambda(Hexa1)", "value": c.lambda_hexa1},
        {"name": "bourgain delta0", "value": bs.delta0},
        {"name": "bourgain sup b - 1", "value": bs.excess},
        {"name": "bourgain argmax", "value": bs.argmax},
        {"name": "steinerberger factor", "value": st.factor},
        {"name": "steinerberger branch", "value": st.branch},
        {"name": "steinerberger crossing", "value": str(bounds.steinerberger_crossing(args.C))},
    ]
    out.table("constants.csv", rows)
    for r in rows:
        print(f"{r['name']:<32} {_fmt(r['value'])}")


COMMANDS = {
    "spectrum": cmd_spectrum, "solve": cmd_solve, "nodal": cmd_nodal, "partition": cmd_partition,
    "bipartite": cmd_bipartite, "tiling-bound": cmd_tiling, "ab": cmd_ab, "bounds": cmd_bounds,
    "constants": cmd_constants,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ConfigError("missing command")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        out = Output(args)
        COMMANDS[args.command](args, out)
        return 0
    except SpecpartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
