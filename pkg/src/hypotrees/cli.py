"""Command-line entry point: build states, verify them, export trees.

Exit codes: 0 success, 1 a check failed, 2 usage error (including missing
or unreadable state files), 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .construction import (
    ConstructionError,
    ConstructionState,
    base_case,
    build_gadgets,
    compute_ktilde,
    select_target,
    split_at,
    state_from_doc,
    state_to_doc,
    step,
)
from .core.analysis import bare_path_bound_after_deletion, max_bare_path
from .core.dot import to_dot
from .core.tree import ColoredTree
from .verify import CheckReport, VerifyParams, check_all

ENV_PREFIX = "HYPOTREES_"
EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
EXPORTABLE = ("T", "S", "T_tilde", "S_tilde")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    steps: int = 2
    depth: int | None = None
    ext_len: int = 6
    budget: int = 10**7
    out: Path = Path("out")
    fmt: str = "dot"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise UsageError("--steps must be non-negative")
        if self.depth is not None and self.depth < 0:
            raise UsageError("--depth must be non-negative")
        if self.ext_len < 0 or self.budget <= 0:
            raise UsageError("--ext-len must be non-negative and --budget positive")

    @property
    def params(self) -> VerifyParams:
        return VerifyParams(self.depth, self.ext_len, self.budget)


def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name, default)


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def state_path(out: Path, n: int) -> Path:
    return out / f"state_{n}.json"


def load_state(out: Path, n: int) -> ConstructionState:
    path = state_path(out, n)
    try:
        return state_from_doc(json.loads(path.read_text()))
    except FileNotFoundError:
        raise UsageError(f"{path} not found; run `hypotrees build` first") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a valid state file: {exc}") from None


# -- commands ------------------------------------------------------------------


def cmd_build(cfg: Config) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    st = base_case()
    state_path(cfg.out, 0).write_text(_dump(state_to_doc(st)))
    for n in range(cfg.steps):
        try:
            st = step(st)
        except ConstructionError as exc:
            raise ConstructionError(f"step {n} -> {n + 1}: {exc}") from exc
        state_path(cfg.out, st.n).write_text(_dump(state_to_doc(st)))
        print(f"state {st.n}: k = {st.k}, b = {st.b}, root pieces {len(st.T.root_piece.tree)} vertices")
    return EXIT_OK


def verify_states(cfg: Config) -> list[CheckReport]:
    states = [load_state(cfg.out, n) for n in range(cfg.steps + 1)]
    nxt_file = state_path(cfg.out, cfg.steps + 1)
    nxt = load_state(cfg.out, cfg.steps + 1) if nxt_file.exists() else None
    reports = []
    for n, st in enumerate(states):
        following = states[n + 1] if n < cfg.steps else nxt
        reports.append(check_all(st, cfg.params, states[n - 1] if n else None, following))
    return reports


def cmd_verify(cfg: Config) -> int:
    reports = verify_states(cfg)
    summary = []
    for rep in reports:
        folder = cfg.out / f"report_{rep.n}"
        folder.mkdir(parents=True, exist_ok=True)
        (folder / "report.json").write_text(rep.to_json())
        (folder / "report.md").write_text(rep.to_markdown())
        failed = [r.name for r in rep.results if r.failed]
        summary.append({"n": rep.n, "ok": rep.ok, "failed": failed})
        verdict = "pass" if rep.ok else "FAIL " + ", ".join(failed)
        print(f"state {rep.n}: {verdict}")
    (cfg.out / "summary.json").write_text(_dump(summary))
    return EXIT_OK if all(s["ok"] for s in summary) else EXIT_CHECK


def export_tree(cfg: Config, what: str, n: int) -> ColoredTree:
    st = load_state(cfg.out, n)
    if what in ("T", "S"):
        return st.side(what).expand(cfg.depth or 0)
    side, target = select_target(st)
    split = split_at(st, side, target)
    g = build_gadgets(st, split, compute_ktilde(st, split))
    return g.T_tilde if what == "T_tilde" else g.S_tilde


def cmd_export(cfg: Config, what: str, n: int) -> int:
    if what not in EXPORTABLE:
        raise UsageError(f"unknown tree {what!r}; choose from {', '.join(EXPORTABLE)}")
    t = export_tree(cfg, what, n)
    cfg.out.mkdir(parents=True, exist_ok=True)
    name = f"{what}_{n}" + (f"_d{cfg.depth}" if what in ("T", "S") and cfg.depth is not None else "")
    if cfg.fmt == "dot":
        path = cfg.out / f"{name}.dot"
        path.write_text(to_dot(t, name))
    else:
        path = cfg.out / f"{name}.json"
        path.write_text(_dump(t.to_doc()))
    print(path)
    return EXIT_OK


def random_tree(rng: random.Random, n: int) -> ColoredTree:
    """A random tree on ``n`` vertices, each new vertex joined to an earlier one."""
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    return ColoredTree.from_edges(range(n), edges, root=0)


def cmd_selftest(cfg: Config, trees: int) -> int:
    """Randomised check that deleting an edge at most doubles the longest bare path."""
    rng = random.Random(cfg.seed)
    bad = 0
    for _ in range(trees):
        t = random_tree(rng, rng.randint(2, 40))
        k = max_bare_path(t).exact
        bad += sum(bare_path_bound_after_deletion(t, e) > 2 * k for e in t.edges())
    print(f"{trees} random trees (seed {cfg.seed}): {bad} edges violate the bound")
    return EXIT_OK if bad == 0 else EXIT_CHECK


# -- argument handling ---------------------------------------------------------


def parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--steps", type=int, default=int(_env("STEPS", 2)))
    depth = _env("DEPTH", None)
    common.add_argument("--depth", type=int, default=int(depth) if depth else None)
    common.add_argument("--ext-len", type=int, default=int(_env("EXT_LEN", 6)))
    common.add_argument("--budget", type=int, default=int(_env("BUDGET", 10**7)))
    common.add_argument("--out", type=Path, default=Path(_env("OUT", "out")))
    common.add_argument("--format", dest="fmt", choices=("dot", "json"), default=_env("FORMAT", "dot"))
    common.add_argument("--seed", type=int, default=int(_env("SEED", 0)))

    p = argparse.ArgumentParser(prog="hypotrees", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="write state_0.json .. state_<steps>.json")
    sub.add_parser("verify", parents=[common], help="check states 0..steps and write reports")
    ex = sub.add_parser("export", parents=[common], help="write one tree as DOT or JSON")
    ex.add_argument("what", help=f"one of {', '.join(EXPORTABLE)}")
    ex.add_argument("--state", type=int, default=0, help="state index (default 0)")
    st = sub.add_parser("selftest", parents=[common], help="randomised bare-path deletion test")
    st.add_argument("--trees", type=int, default=500)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = Config(args.steps, args.depth, args.ext_len, args.budget, args.out, args.fmt, args.seed)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "export":
            return cmd_export(cfg, args.what, args.state)
        return cmd_selftest(cfg, args.trees)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # anything else is a bug or a construction failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
