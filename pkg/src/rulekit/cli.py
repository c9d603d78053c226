"""Command-line interface: check rules headlessly, inspect how a rule
compiles, format rule text, query completions, and launch the service."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import assist
from .grammar import And, ElementNode, Leaf, parse_rule, render_rule
from .querycomp import compile_rule, render_xpath
from .workspace import (
    RuleCheck,
    canonical_json,
    check_rule,
    load_ruleset,
    scan_project,
)

DEFAULT_RULES_FILE = "design-rules.json"


def _rules_path(project: str, rules: str | None) -> Path:
    return Path(rules) if rules else Path(project) / DEFAULT_RULES_FILE


@click.group()
def main():
    """Author and check design rules against a Java project."""


def _print_diagnostics(diags, indent="  "):
    for d in diags:
        hint = f" ({d.hint})" if d.hint else ""
        click.echo(f"{indent}{d.severity.value}: {d.message} "
                   f"[{d.span.start}..{d.span.end}]{hint}")


def _text_report(rule_id: str, title: str, check: RuleCheck) -> str:
    lines = [f"rule {rule_id}: {title}".rstrip().rstrip(":")]
    if check.status == "skipped":
        lines.append("  skipped: rule text has errors")
        for d in check.diagnostics:
            lines.append(f"    {d.severity.value}: {d.message}")
        return "\n".join(lines)
    r = check.result
    lines.append(
        f"  files considered: {r.filesConsidered}  "
        f"satisfied: {len(r.satisfied)}  violated: {len(r.violated)}"
    )
    if r.filterMatchedZero:
        lines.append("  warning: the file filter matched no files")
    for m in r.violated:
        s = m.span
        first = m.snippetText.splitlines()[0] if m.snippetText else ""
        lines.append(f"  violation {s.file}:{s.startLine}:{s.startCol}  {first}")
    return "\n".join(lines)


@main.command()
@click.option("--project", envvar="RULEKIT_PROJECT", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Project root to scan (env: RULEKIT_PROJECT).")
@click.option("--rules", "rules_file", type=click.Path(),
              help=f"Ruleset file (default: <project>/{DEFAULT_RULES_FILE}).")
@click.option("--rule", "rule_id", help="Check a single rule by id.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--fail-on-violation", is_flag=True,
              help="Exit nonzero when any checked rule has violations.")
def check(project, rules_file, rule_id, fmt, fail_on_violation):
    """Check rules against the project and report matches and violations."""
    ruleset = load_ruleset(_rules_path(project, rules_file))
    index = scan_project(project)
    records = ruleset.rules
    if rule_id is not None:
        rec = ruleset.get(rule_id)
        if rec is None:
            raise click.ClickException(f"no rule {rule_id!r} in the ruleset")
        records = [rec]
    checks = {rec.id: check_rule(index, rec) for rec in records}
    any_violation = any(
        c.status == "ok" and c.result.violated for c in checks.values()
    )
    if fmt == "json":
        if rule_id is not None:
            click.echo(canonical_json(checks[rule_id].to_dict()), nl=False)
        else:
            click.echo(
                canonical_json({rid: c.to_dict() for rid, c in checks.items()}),
                nl=False,
            )
    else:
        for rec in records:
            click.echo(_text_report(rec.id, rec.title, checks[rec.id]))
    if fail_on_violation and any_violation:
        sys.exit(1)


def _ast_lines(node, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(node, ElementNode):
        bits = [node.kind.surface]
        if node.value is not None:
            bits.append(f'"{node.value}"')
        out = [f"{pad}element {' '.join(bits)}"]
        if node.with_expr is not None:
            out.append(f"{pad}  with:")
            out.extend(_ast_lines(node.with_expr, indent + 2))
        if node.parent is not None:
            out.append(f"{pad}  of:")
            out.extend(_ast_lines(node.parent, indent + 2))
        return out
    if isinstance(node, Leaf):
        return _ast_lines(node.element, indent)
    op = "and" if isinstance(node, And) else "or"
    out = [f"{pad}{op}:"]
    out.extend(_ast_lines(node.left, indent + 1))
    out.extend(_ast_lines(node.right, indent + 1))
    return out


@main.command()
@click.argument("rule_text")
def explain(rule_text):
    """Show how a rule parses and compiles, including both XPath queries."""
    result = parse_rule(rule_text)
    if not result.ok:
        click.echo("rule text does not parse:")
        _print_diagnostics(result.diagnostics)
        sys.exit(1)
    ast = result.ast
    pair = compile_rule(ast)
    click.echo(f"canonical: {render_rule(ast)}")
    click.echo(f"element of interest: {pair.eoi_kind.surface}")
    click.echo("quantifier:")
    for line in _ast_lines(ast.quantifier, 1):
        click.echo(line)
    click.echo("constraint:")
    for line in _ast_lines(ast.constraint, 1):
        click.echo(line)
    click.echo(f"quantifier xpath: {render_xpath(pair.quantifier)}")
    click.echo(f"constraint xpath: {render_xpath(pair.constraint)}")


@main.command()
@click.argument("rule_text")
def fmt(rule_text):
    """Print the canonical form of a rule."""
    result = parse_rule(rule_text)
    if not result.ok:
        _print_diagnostics(result.diagnostics, indent="")
        sys.exit(1)
    click.echo(render_rule(result.ast))


@main.command()
@click.option("--text", required=True, help="Rule text being edited.")
@click.option("--cursor", type=int, default=-1,
              help="Cursor offset (default: end of text).")
def complete(text, cursor):
    """List grammar-valid next tokens at the cursor."""
    at = len(text) if cursor < 0 else cursor
    for s in assist.complete(text, at):
        click.echo(f"{s.token}\t{s.doc}")


@main.command()
@click.option("--port", type=int, default=8765)
@click.option("--host", default="127.0.0.1")
@click.option("--project", envvar="RULEKIT_PROJECT", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--rules", "rules_file", type=click.Path())
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False),
              help="Serve a built web UI from this directory at /ui.")
def serve(port, host, project, rules_file, ui_dir):
    """Run the authoring/checking service for the web UI."""
    from .service import serve as run

    run(port, project, str(_rules_path(project, rules_file)), host=host,
        ui_dir=ui_dir)


if __name__ == "__main__":
    main()
