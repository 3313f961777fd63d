"""Command-line front end: bases, Margolis homology, Ext charts and verification suites."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import ENGINE_VERSION
from .browngitler import build_bg, build_q_quotient, ell
from .comodule import Comodule, build_a_mod_en, e_deg, margolis_homology, split_s_q, trivial_comodule
from .errors import CoopsError, UsageError
from .fp_linalg import check_prime
from .milnor import Monomial, format_monomial, sort_key

FORMATS = ("tsv", "json", "svg")
ENGINES = ("koszul", "cobar", "both")
VERIFY_SUITES = ("hopf", "sequences", "splitting", "margolis", "tables", "all")


@dataclass
class SessionConfig:
    p: int
    t_max: int
    output_dir: Optional[Path]
    format: str
    cache: bool
    threads: int

    def validate(self):
        check_prime(self.p)
        if self.t_max < 0:
            raise UsageError("--tmax must be >= 0")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format}")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")


# ---------------------------------------------------------------------------
# targets


@dataclass
class Target:
    kind: str
    index: Optional[int] = None

    def descriptor(self) -> str:
        return self.kind if self.index is None else f"{self.kind} {self.index}"


def _target(args) -> Target:
    found = []
    for kind in ("a_mod_en", "ell", "m2", "bp2", "qquot", "exterior"):
        v = getattr(args, kind, None)
        if v is not None:
            if v < 0:
                raise UsageError(f"--{kind.replace('_', '-')} needs a non-negative index")
            found.append(Target(kind.replace("_", "-"), v))
    for kind in ("fp", "s_summand", "q_summand"):
        if getattr(args, kind, False):
            found.append(Target(kind.replace("_", "-")))
    if len(found) != 1:
        raise UsageError("give exactly one target")
    return found[0]


def _split_source(p: int, t_max: int):
    # S and Q are complete sum |Q_i| below the build cap
    return split_s_q(build_a_mod_en(p, 2, t_max + sum(e_deg(p, i) for i in range(3)) + e_deg(p, 2)))


def build_target(tg: Target, p: int, t_max: int, n: Optional[int] = None) -> Comodule:
    """The comodule named by a target, as an E(n)-comodule when n is given."""
    k = tg.index
    if tg.kind == "a-mod-en":
        return build_a_mod_en(p, k, t_max + e_deg(p, k), coalgebra_n=n)
    if tg.kind == "ell":
        return ell(p, k, coalgebra_n=2 if n is None else n)
    if tg.kind == "m2":
        return build_bg(p, 2, k, "M", n).comodule
    if tg.kind == "bp2":
        return build_bg(p, 2, k, "N", n).comodule
    if tg.kind == "qquot":
        c = build_q_quotient(p, k).comodule
        if n is not None and n != c.n:
            raise UsageError("the quotient Q^j A//E(1) is only built over E(2)")
        return c
    if tg.kind == "fp":
        return trivial_comodule(p, 2 if n is None else n)
    if tg.kind == "exterior":
        from .ext import exterior_on
        nn = max(k, 2) if n is None else n
        if k > nn:
            raise UsageError(f"t{k} is not primitive over E({nn})")
        return exterior_on(p, nn, k)
    rep = _split_source(p, t_max)
    if tg.kind == "s-summand":
        return rep.summand_S.comodule
    return rep.summand_Q


def basis_lines(c: Comodule, t_max: Optional[int] = None) -> List[str]:
    """Basis in the global monomial order; truncated modules are cut at t_max."""
    if c.top is None:
        t_max = None
    mons = [m for t, b in c.basis.items() if t_max is None or t <= t_max for m in b]
    if all(isinstance(m, Monomial) for m in mons):
        mons.sort(key=lambda m: sort_key(m, c.p))
        return [format_monomial(m) for m in mons]
    return [str(m) for t in sorted(c.basis) if t_max is None or t <= t_max for m in c.basis[t]]


# ---------------------------------------------------------------------------
# output


def emit(text: str, name: str, cfg: SessionConfig) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output_dir is None:
        sys.stdout.write(text)
        return
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / name
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(path)


def _slug(tg: Target) -> str:
    return tg.descriptor().replace(" ", "")


# ---------------------------------------------------------------------------
# cache


def cache_dir() -> Path:
    env = os.environ.get("COOPS_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "coops"


def cache_key(p: int, module: str, t_max: int, s_max: int, n: int) -> str:
    blob = json.dumps([p, module, t_max, s_max, n, ENGINE_VERSION])
    return hashlib.sha256(blob.encode()).hexdigest()


def chart_to_payload(chart) -> dict:
    return {
        "version": ENGINE_VERSION,
        "p": chart.p, "module": chart.module, "n": chart.n, "window": list(chart.window),
        "dims": [[s, t, d] for (s, t), d in sorted(chart.dims.items())],
        "generators": [[s, t, g] for (s, t), g in sorted(chart.generators.items())],
        "v_mult": {str(i): [[s, t, m.shape[1], m.tolist()] for (s, t), m in sorted(cells.items())]
                   for i, cells in sorted(chart.v_mult.items())},
    }


def chart_from_payload(d: dict):
    from .ext import ExtChart
    v_mult = {}
    for i, cells in d["v_mult"].items():
        v_mult[int(i)] = {(s, t): np.array(m, dtype=np.int64).reshape(-1, cols) for s, t, cols, m in cells}
    return ExtChart(d["p"], d["module"], d["n"], tuple(d["window"]),
                    {(s, t): dim for s, t, dim in d["dims"]},
                    {(s, t): g for s, t, g in d["generators"]}, v_mult, None)


def cache_load(key: str):
    path = cache_dir() / f"{key}.json"
    if not path.exists():
        return None
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return None
    if d.get("version") != ENGINE_VERSION or d.get("key") != key:
        return None
    return chart_from_payload(d)


def cache_store(key: str, chart) -> None:
    d = chart_to_payload(chart)
    d["key"] = key
    path = cache_dir()
    path.mkdir(parents=True, exist_ok=True)
    tmp = path / f"{key}.tmp"
    tmp.write_text(json.dumps(d, sort_keys=True) + "\n", encoding="utf-8")
    tmp.replace(path / f"{key}.json")


# ---------------------------------------------------------------------------
# commands


def cmd_basis(args, cfg: SessionConfig) -> int:
    tg = _target(args)
    c = build_target(tg, cfg.p, cfg.t_max)
    emit("\n".join(basis_lines(c, cfg.t_max)), f"basis_p{cfg.p}_{_slug(tg)}.txt", cfg)
    return 0


def cmd_margolis(args, cfg: SessionConfig) -> int:
    tg = _target(args)
    c = build_target(tg, cfg.p, cfg.t_max)
    if not 0 <= args.q <= c.n:
        raise UsageError(f"--q must lie in 0..{c.n}")
    h = margolis_homology(c, args.q, (0, cfg.t_max))
    lines = ["t\tdim"] + [f"{t}\t{h.dims.get(t, 0)}" for t in range(cfg.t_max + 1)]
    emit("\n".join(lines), f"margolis_p{cfg.p}_{_slug(tg)}_Q{args.q}.tsv", cfg)
    return 0


def _koszul_chart(c: Comodule, n: int, s_max: int, t_max: int, key: Optional[str], cfg: SessionConfig):
    from .ext import build_koszul, ext_dims, v_multiplication
    if cfg.cache and key:
        hit = cache_load(key)
        if hit is not None:
            return hit
    chart = ext_dims(build_koszul(c, n), s_max, t_max)
    for i in range(n + 1):
        v_multiplication(chart, i)
    if cfg.cache and key:
        cache_store(key, chart)
    return chart


def render(chart, fmt: str) -> str:
    from .ext import chart_json, chart_svg, chart_tsv
    return {"tsv": chart_tsv, "json": chart_json, "svg": chart_svg}[fmt](chart)


def cmd_table(args, cfg: SessionConfig) -> int:
    from .ext import compare_with_golden, format_table, load_golden
    emit(format_table(cfg.p, args.jmax), f"table_p{cfg.p}_j{args.jmax}.tsv", cfg)
    try:
        golden = load_golden(cfg.p)
    except FileNotFoundError:
        print(f"no bundled golden table for p={cfg.p}", file=sys.stderr)
        return 0
    deltas = compare_with_golden(cfg.p, args.jmax, golden)
    text = "".join(d.line() + "\n" for d in deltas) or "no differences\n"
    if cfg.output_dir is None:
        sys.stderr.write(text)
    else:
        emit(text, f"table_p{cfg.p}_j{args.jmax}.diff", cfg)
    return 1 if any(d.status == "delta" for d in deltas) else 0


def cmd_ext(args, cfg: SessionConfig) -> int:
    from .ext import cobar_ext_oracle, diff_charts
    if args.table:
        return cmd_table(args, cfg)
    tg = _target(args)
    if args.smax < 0:
        raise UsageError("--smax must be >= 0")
    c = build_target(tg, cfg.p, cfg.t_max, args.over)
    n = c.n if args.over is None else args.over
    key = cache_key(cfg.p, tg.descriptor(), cfg.t_max, args.smax, n)
    stem = f"ext_p{cfg.p}_{_slug(tg)}"
    if args.engine == "cobar":
        chart = cobar_ext_oracle(c, args.smax, cfg.t_max, n)
        emit(render(chart, cfg.format), f"{stem}_cobar.{cfg.format}", cfg)
        return 0
    chart = _koszul_chart(c, n, args.smax, cfg.t_max, key, cfg)
    emit(render(chart, cfg.format), f"{stem}.{cfg.format}", cfg)
    if args.engine == "both":
        other = cobar_ext_oracle(c, args.smax, cfg.t_max, n)
        diff = diff_charts(chart, other)
        if diff:
            lines = ["s\tt\tkoszul\tcobar"] + [f"{s}\t{t}\t{a}\t{b}" for s, t, a, b in diff]
            out = cfg.output_dir or Path(".")
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"{stem}.diff"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            print(f"engines disagree in {len(diff)} cells; see {path}", file=sys.stderr)
            return 1
    return 0


def _jmax(j: Optional[int], suite: str) -> int:
    if j is not None:
        return j
    return 9 if suite == "tables" else 3


def cmd_verify(args, cfg: SessionConfig) -> int:
    from .suites import SUITES, run_suite
    names = list(SUITES) if args.suite == "all" else [args.suite]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        results = list(pool.map(lambda s: run_suite(s, cfg.p, cfg.t_max, _jmax(args.jmax, s)), names))
    checks = [c for r in results for c in r]
    lines = ["suite\tcheck\tstatus\tdetail"] + [c.line() for c in checks]
    emit("\n".join(lines), f"verify_p{cfg.p}_{args.suite}.tsv", cfg)
    return 1 if any(c.status == "fail" for c in checks) else 0


# ---------------------------------------------------------------------------
# argument parsing


def _common(sp):
    sp.add_argument("-p", type=int, default=3, help="odd prime")
    sp.add_argument("--tmax", type=int, default=None, help="internal degree cap")
    sp.add_argument("--output-dir", type=Path, default=None, help="write files here instead of stdout")
    sp.add_argument("--format", default="tsv", help="tsv, json or svg")
    sp.add_argument("--cache", action=argparse.BooleanOptionalAction, default=False,
                    help="reuse charts from the on-disk cache (COOPS_CACHE_DIR)")
    sp.add_argument("--threads", type=int, default=1)


def _targets(sp, extra: bool = False):
    g = sp.add_argument_group("target")
    g.add_argument("--a-mod-en", type=int, metavar="N", help="A//E(N)")
    g.add_argument("--ell", type=int, metavar="J", help="Brown-Gitler comodule l_J")
    g.add_argument("--m2", type=int, metavar="K", help="M_2(K)")
    g.add_argument("--bp2", type=int, metavar="J", help="Brown-Gitler comodule BP<2>_J")
    g.add_argument("--qquot", type=int, metavar="J", help="Q^J A//E(1)")
    g.add_argument("--s-summand", action="store_true", help="length >= 3 summand S of A//E(2)")
    g.add_argument("--q-summand", action="store_true", help="complementary summand Q of A//E(2)")
    if extra:
        g.add_argument("--fp", action="store_true", help="the trivial comodule F_p")
        g.add_argument("--exterior", type=int, metavar="I", help="E(t_I) with Q_I t_I = 1")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coops", description="Comodules over the odd-primary dual Steenrod algebra")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("basis", help="monomial basis of a comodule")
    _common(sp)
    _targets(sp)
    sp.set_defaults(func=cmd_basis, tmax_default=60)

    sp = sub.add_parser("margolis", help="Q_i Margolis homology dimensions")
    _common(sp)
    _targets(sp)
    sp.add_argument("--q", type=int, required=True, metavar="I")
    sp.set_defaults(func=cmd_margolis, tmax_default=60)

    sp = sub.add_parser("ext", help="Ext chart over E(n)")
    _common(sp)
    _targets(sp, extra=True)
    sp.add_argument("--engine", choices=ENGINES, default="koszul")
    sp.add_argument("--smax", type=int, default=4)
    sp.add_argument("--over", type=int, default=None, metavar="N", help="compute over E(N)")
    sp.add_argument("--table", action="store_true", help="regenerate the generator table and diff with the golden file")
    sp.add_argument("--jmax", type=int, default=9)
    sp.set_defaults(func=cmd_ext, tmax_default=40)

    sp = sub.add_parser("verify", help="run invariant suites")
    _common(sp)
    sp.add_argument("--suite", choices=VERIFY_SUITES, default="all")
    sp.add_argument("--jmax", type=int, default=None, help="default 3, or 9 for the tables suite")
    sp.set_defaults(func=cmd_verify, tmax_default=300)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = SessionConfig(args.p, args.tmax if args.tmax is not None else args.tmax_default,
                        args.output_dir, args.format, args.cache, args.threads)
    try:
        cfg.validate()
        return args.func(args, cfg)
    except CoopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
