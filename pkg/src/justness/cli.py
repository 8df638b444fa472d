"""Command-line client.

Talks to the HTTP service; by default an in-process instance, or a
running server via --server.  Term arguments are either literal process
syntax or a path to a .proc/.ccs file in the corpus format (`# dialect:`
and `# term:` header comments plus definitions).

Lasso files are JSON: {"stem": [...], "cycle": [...]} with derivation
name-trees as steps, or {"abstract": true, "stem": [[src,label,tgt],..]}.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app)


def _call(ctx, path: str, payload: dict) -> dict:
    with _client(ctx.obj.get("server")) as client:
        resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(1)
    return resp.json()


def _term_args(term: str, dialect: str, defs: str | None) -> dict:
    """Accept a literal term or a corpus-format file path."""
    path = Path(term)
    if path.suffix in (".proc", ".ccs") and path.exists():
        term_line, dialect_line, defs_lines = None, None, []
        for line in path.read_text().splitlines():
            s = line.strip()
            if s.startswith("# dialect:"):
                dialect_line = s.split(":", 1)[1].strip()
            elif s.startswith("# term:"):
                term_line = s.split(":", 1)[1].strip()
            else:
                defs_lines.append(line)
        if term_line is None:
            click.echo(f"error: {path} has no '# term:' line", err=True)
            sys.exit(1)
        return {"term": term_line,
                "dialect": dialect_line or dialect,
                "defs": "\n".join(defs_lines)}
    out = {"term": term, "dialect": dialect, "defs": ""}
    if defs:
        out["defs"] = Path(defs).read_text()
    return out


def _load_lasso(lasso_file: str | None) -> dict:
    if not lasso_file:
        return {"stem": [], "cycle": [], "abstract": False}
    text = sys.stdin.read() if lasso_file == "-" else Path(lasso_file).read_text()
    data = json.loads(text)
    return {"stem": data.get("stem", []), "cycle": data.get("cycle", []),
            "abstract": bool(data.get("abstract", False))}


def _blocking(b: str | None) -> list[str]:
    if not b:
        return []
    return [s.strip() for s in b.split(",") if s.strip()]


def _emit(data: dict, fmt: str, text_fn=None):
    if fmt == "json" or text_fn is None:
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        click.echo(text_fn(data))


_dialect_opt = click.option(
    "--dialect", default="ccs",
    type=click.Choice(["ccs", "abc", "abcd", "ccss", "ccss-enc"]),
    help="Process calculus dialect.")
_defs_opt = click.option("--defs", default=None, type=click.Path(exists=True),
                         help="Agent definitions file.")
_format_opt = click.option("--format", "fmt", default="text",
                           type=click.Choice(["text", "json"]))
_variant_opt = click.option(
    "--variant", default="dyn",
    type=click.Choice(["dyn", "dyn-direct", "static", "c",
                       "static-prime", "c-prime", "gh"]),
    help="Concurrency relation variant.")
_blocking_opt = click.option("--B", "-B", "blocking", default="",
                             help="Comma-separated blocking labels "
                                  "(receives are implied).")


@click.group()
@click.option("--server", default=None, envvar="JUSTNESS_SERVER",
              help="Base URL of a running service; in-process by default.")
@click.pass_context
def main(ctx, server):
    """Transition systems with concurrency and justness checking."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.argument("term")
@_dialect_opt
@_defs_opt
@_format_opt
@click.pass_context
def parse(ctx, term, dialect, defs, fmt):
    """Parse a term and print its canonical form."""
    data = _call(ctx, "/parse", _term_args(term, dialect, defs))
    _emit(data, fmt, lambda d: d["printed"])


@main.command()
@click.argument("term")
@_dialect_opt
@_defs_opt
@click.option("--bound", default=1000, help="Maximum number of states.")
@click.option("--dot", is_flag=True, help="Emit Graphviz DOT.")
@_format_opt
@click.pass_context
def lts(ctx, term, dialect, defs, bound, dot, fmt):
    """Explore the reachable transition system."""
    payload = _term_args(term, dialect, defs) | {"bound": bound, "dot": dot}
    data = _call(ctx, "/lts", payload)
    if dot:
        click.echo(data["dot"])
        return

    def text(d):
        lt = d["ltsc"]
        lines = [f"{len(lt['states'])} states, "
                 f"{len(lt['derivations'])} derivations"]
        for i, s in enumerate(lt["states"]):
            lines.append(f"  s{i}: {s}")
        for t in lt["derivations"]:
            lines.append(f"  s{t['source']} --{t['label']}--> s{t['target']}"
                         f"   [{t['class']}] {t['name']}")
        return "\n".join(lines)

    _emit(data, fmt, text)


@main.command()
@click.argument("term")
@_dialect_opt
@_defs_opt
@click.option("--bound", default=1000)
@_variant_opt
@click.option("--csv", "as_csv", is_flag=True, help="Emit the matrix as CSV.")
@_format_opt
@click.pass_context
def conc(ctx, term, dialect, defs, bound, variant, as_csv, fmt):
    """Pairwise concurrency matrix of all reachable derivations."""
    payload = _term_args(term, dialect, defs) | {"bound": bound,
                                                 "variant": variant}
    data = _call(ctx, "/conc", payload)
    if as_csv:
        click.echo(data["csv"], nl=False)
        return

    def text(d):
        names, matrix = d["derivations"], d["matrix"]
        lines = []
        for n, row in zip(names, matrix):
            marks = "".join("." if v is None else ("1" if v else "0")
                            for v in row)
            lines.append(f"{marks}  {n}")
        return "\n".join(lines)

    _emit(data, fmt, text)


def _verdict_text(d):
    head = "holds" if d["holds"] else "fails"
    return f"{head}  blocking={{{', '.join(d['blocking_used'])}}}\n" \
           + json.dumps(d["witness"], indent=2, sort_keys=True)


@main.command()
@click.argument("term")
@click.argument("lasso_file", required=False)
@_dialect_opt
@_defs_opt
@_blocking_opt
@click.option("--variant", default="static",
              type=click.Choice(["dyn", "static", "c",
                                 "static-prime", "c-prime"]))
@click.option("--coinductive", is_flag=True,
              help="Use the operator-directed coinductive decision.")
@_format_opt
@click.pass_context
def just(ctx, term, lasso_file, dialect, defs, blocking, variant,
         coinductive, fmt):
    """Decide justness of a lasso (empty path if no file given)."""
    payload = _term_args(term, dialect, defs) | {
        "lasso": _load_lasso(lasso_file), "blocking": _blocking(blocking),
        "variant": variant, "coinductive": coinductive}
    data = _call(ctx, "/just", payload)
    _emit(data, fmt, _verdict_text)


@main.command()
@click.argument("term")
@click.argument("lasso_file", required=False)
@_dialect_opt
@_defs_opt
@_blocking_opt
@click.option("--variant", default="static",
              type=click.Choice(["dyn", "static", "c",
                                 "static-prime", "c-prime"]))
@click.option("--coinductive", is_flag=True)
@_format_opt
@click.pass_context
def sigjust(ctx, term, lasso_file, dialect, defs, blocking, variant,
            coinductive, fmt):
    """Decide sigjustness (emission-aware justness) of a lasso."""
    payload = _term_args(term, dialect, defs) | {
        "lasso": _load_lasso(lasso_file), "blocking": _blocking(blocking),
        "variant": variant, "coinductive": coinductive}
    data = _call(ctx, "/sigjust", payload)
    _emit(data, fmt, _verdict_text)


@main.command()
@click.argument("term")
@click.argument("lasso_file", required=False)
@_dialect_opt
@_defs_opt
@_blocking_opt
@click.option("--mode", default="weak",
              type=click.Choice(["strong", "weak", "j"]))
@click.option("--family", default="conc",
              type=click.Choice(["conc", "per-action", "per-transition",
                                 "progress"]),
              help="Built-in task family.")
@click.option("--tasks", "tasks_file", default=None,
              type=click.Path(exists=True),
              help="JSON task file: name -> derivation indices.")
@click.option("--bound", default=1000)
@_format_opt
@click.pass_context
def fair(ctx, term, lasso_file, dialect, defs, blocking, mode, family,
         tasks_file, bound, fmt):
    """Decide strong/weak/J fairness of a lasso over a task family."""
    payload = _term_args(term, dialect, defs) | {
        "lasso": _load_lasso(lasso_file), "blocking": _blocking(blocking),
        "mode": mode, "family": family, "bound": bound}
    if tasks_file:
        payload["tasks"] = json.loads(Path(tasks_file).read_text())
    data = _call(ctx, "/fair", payload)
    _emit(data, fmt, _verdict_text)


@main.command()
@click.argument("term")
@click.argument("lasso_file", required=False)
@_dialect_opt
@_defs_opt
@_blocking_opt
@_variant_opt
@click.option("--budget", default=10000)
@_format_opt
@click.pass_context
def extend(ctx, term, lasso_file, dialect, defs, blocking, variant, budget,
           fmt):
    """Extend a finite path into a just lasso."""
    payload = _term_args(term, dialect, defs) | {
        "prefix": _load_lasso(lasso_file), "blocking": _blocking(blocking),
        "variant": variant, "budget": budget}
    data = _call(ctx, "/extend", payload)
    _emit(data, fmt,
          lambda d: f"{d['pretty']}\n"
                    f"just: {d['verdict']['holds']}")


@main.command()
@click.argument("term")
@click.argument("lasso_file", required=False)
@_dialect_opt
@_defs_opt
@_variant_opt
@_format_opt
@click.pass_context
def minb(ctx, term, lasso_file, dialect, defs, variant, fmt):
    """Least blocking set under which the lasso is just."""
    payload = _term_args(term, dialect, defs) | {
        "lasso": _load_lasso(lasso_file), "variant": variant}
    data = _call(ctx, "/minb", payload)
    _emit(data, fmt, lambda d: ", ".join(d["blocking"]) or "(empty)")


@main.command()
@click.argument("suites", nargs=-1)
@click.option("--seed", default=7)
@click.option("--size", default=None, type=int,
              help="Random systems per suite (suite default if omitted).")
@_format_opt
@click.pass_context
def check(ctx, suites, seed, size, fmt):
    """Run named theorem suites over the built-in corpus; exit 1 on failure."""
    payload = {"suites": list(suites), "seed": seed, "size": size}
    data = _call(ctx, "/check", payload)
    if fmt == "json":
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        for r in data["results"]:
            status = "pass" if r["passed"] else "FAIL"
            click.echo(f"{status}  {r['name']}  ({r['checked']} checks)")
            for f in r["failures"]:
                click.echo(f"      {json.dumps(f, sort_keys=True)}")
    if not data["passed"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
