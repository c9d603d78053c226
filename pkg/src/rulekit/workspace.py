"""Ruleset persistence, project scanning, and batch rule checking.

The ruleset lives in one human-editable JSON file (an array of records
under a schemaVersion); unknown fields in the file survive a rewrite.
Scanning builds a per-file index of parse results keyed by content hash so
a re-scan only re-parses files that changed.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .diagnostics import Diagnostic
from .evaluator import EvalResult, FileFilter, evaluate
from .grammar import parse_rule
from .javaparse import CodeTree, JavaParseError, parse_java
from .querycomp import compile_rule

SCHEMA_VERSION = 1

_RECORD_FIELDS = ("id", "title", "description", "tags", "fileFilter", "ruleText", "modelSnapshot")


def canonical_json(obj) -> str:
    """The one JSON serialization used by both the CLI and the service, so
    their outputs can be compared byte for byte."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class RulesetError(ValueError):
    def __init__(self, message: str, bad_indices: list[int] | None = None):
        super().__init__(message)
        self.bad_indices = bad_indices or []


@dataclass
class RuleRecord:
    id: str
    title: str = ""
    description: str = ""
    tags: list[str] = field(default_factory=list)
    fileFilter: FileFilter = field(default_factory=FileFilter)
    ruleText: str = ""
    modelSnapshot: dict | None = None
    extra: dict = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "tags": list(self.tags),
            "fileFilter": self.fileFilter.to_dict(),
            "ruleText": self.ruleText,
        }
        if self.modelSnapshot is not None:
            d["modelSnapshot"] = self.modelSnapshot
        for k, v in self.extra.items():
            if k not in d:
                d[k] = v
        return d

    @staticmethod
    def from_dict(d: dict) -> "RuleRecord":
        rec = RuleRecord(
            id=str(d["id"]),
            title=str(d.get("title", "")),
            description=str(d.get("description", "")),
            tags=[str(t) for t in d.get("tags", [])],
            fileFilter=FileFilter.from_dict(d.get("fileFilter")),
            ruleText=str(d.get("ruleText", "")),
            modelSnapshot=d.get("modelSnapshot"),
            extra={k: v for k, v in d.items() if k not in _RECORD_FIELDS},
        )
        result = parse_rule(rec.ruleText)
        if not result.ok:
            rec.diagnostics = result.diagnostics
        return rec


@dataclass
class Ruleset:
    rules: list[RuleRecord] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    def get(self, rule_id: str) -> RuleRecord | None:
        for r in self.rules:
            if r.id == rule_id:
                return r
        return None

    def to_dict(self) -> dict:
        d = {"schemaVersion": self.schema_version,
             "rules": [r.to_dict() for r in self.rules]}
        for k, v in self.extra.items():
            if k not in d:
                d[k] = v
        return d


def load_ruleset(path: str | Path) -> Ruleset:
    """Load rules from disk.  A structurally broken file raises
    RulesetError naming the offending record indices; records whose
    ruleText does not parse load with attached diagnostics instead of
    being dropped."""
    p = Path(path)
    if not p.exists():
        return Ruleset()
    try:
        data = json.loads(p.read_text("utf-8"))
    except json.JSONDecodeError as e:
        raise RulesetError(f"ruleset file {p} is not valid JSON: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("rules"), list):
        raise RulesetError(f"ruleset file {p} must be an object with a 'rules' array")
    bad: list[int] = []
    rules: list[RuleRecord] = []
    for i, raw in enumerate(data["rules"]):
        if not isinstance(raw, dict) or "id" not in raw:
            bad.append(i)
            continue
        rules.append(RuleRecord.from_dict(raw))
    if bad:
        raise RulesetError(
            f"ruleset file {p} has malformed records at indices {bad}", bad
        )
    seen = set()
    for i, r in enumerate(rules):
        if r.id in seen:
            raise RulesetError(f"duplicate rule id {r.id!r} at index {i}", [i])
        seen.add(r.id)
    extra = {k: v for k, v in data.items() if k not in ("schemaVersion", "rules")}
    return Ruleset(rules, int(data.get("schemaVersion", SCHEMA_VERSION)), extra)


def save_ruleset(path: str | Path, ruleset: Ruleset) -> None:
    Path(path).write_text(canonical_json(ruleset.to_dict()), "utf-8")


# ---------------------------------------------------------------------------
# Project index


@dataclass
class FileEntry:
    contentHash: str
    tree: CodeTree | None
    error: str | None = None
    warnings: list[Diagnostic] = field(default_factory=list)


@dataclass
class ProjectIndex:
    rootDir: str
    files: dict[str, FileEntry] = field(default_factory=dict)
    builtAt: float = 0.0

    def trees(self) -> list[CodeTree]:
        return [e.tree for _, e in sorted(self.files.items()) if e.tree is not None]

    def summary(self) -> dict:
        return {
            "rootDir": self.rootDir,
            "files": [
                {
                    "path": p,
                    "ok": e.tree is not None,
                    "error": e.error,
                    "warnings": len(e.warnings),
                }
                for p, e in sorted(self.files.items())
            ],
        }


def scan_project(
    root_dir: str | Path,
    include_extensions: tuple[str, ...] = (".java",),
    previous: ProjectIndex | None = None,
) -> ProjectIndex:
    """Parse every matching file under root_dir into an index.  Entries
    whose content hash is unchanged are taken over from `previous`."""
    root = Path(root_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"project root {root} does not exist")
    index = ProjectIndex(rootDir=str(root), builtAt=time.time())
    for f in sorted(root.rglob("*")):
        if not f.is_file() or f.suffix not in include_extensions:
            continue
        rel = f.relative_to(root).as_posix()
        try:
            source = f.read_text("utf-8")
        except (OSError, UnicodeDecodeError) as e:
            index.files[rel] = FileEntry("", None, error=str(e))
            continue
        digest = hashlib.sha256(source.encode("utf-8")).hexdigest()
        if previous is not None:
            old = previous.files.get(rel)
            if old is not None and old.contentHash == digest:
                index.files[rel] = old
                continue
        try:
            tree, warnings = parse_java(source, rel)
            index.files[rel] = FileEntry(digest, tree, warnings=warnings)
        except JavaParseError as e:
            index.files[rel] = FileEntry(digest, None, error=str(e))
    return index


# ---------------------------------------------------------------------------
# Batch checking


@dataclass
class RuleCheck:
    status: str  # ok | skipped
    result: EvalResult | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def to_dict(self) -> dict:
        d: dict = {"status": self.status}
        if self.result is not None:
            d["result"] = self.result.to_dict()
        if self.diagnostics:
            d["diagnostics"] = [x.to_dict() for x in self.diagnostics]
        return d


def check_rule(index: ProjectIndex, record: RuleRecord,
               file_filter: FileFilter | None = None) -> RuleCheck:
    result = parse_rule(record.ruleText)
    if not result.ok:
        return RuleCheck("skipped", diagnostics=result.diagnostics)
    pair = compile_rule(result.ast)
    filt = file_filter if file_filter is not None else record.fileFilter
    return RuleCheck("ok", result=evaluate(pair, index.trees(), filt))


def check_all(index: ProjectIndex, rules: list[RuleRecord]) -> dict[str, RuleCheck]:
    """Evaluate every rule; unparseable rules come back as skipped entries
    instead of failing the batch."""
    return {r.id: check_rule(index, r) for r in rules}
