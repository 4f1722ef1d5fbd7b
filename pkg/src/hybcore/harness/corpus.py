"""The shipped program corpus and its expected-outcome fixtures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..frontend import parse
from ..params import DEFAULT_PARAMS, EvalParams
from ..syntax import Comp
from ..typecheck import check_program

DEFAULT_T = 10.0


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    source: str
    term: Comp
    T: float = DEFAULT_T
    params: EvalParams = DEFAULT_PARAMS
    exact: bool = False
    expect: dict = field(default_factory=dict)


def corpus_dir() -> Path:
    return Path(str(resources.files("hybcore") / "corpus"))


def load_program(path: str | Path) -> Comp:
    """Parse and typecheck a program file."""
    term = parse(Path(path).read_text())
    check_program(term)
    return term


def load_corpus(directory: str | Path | None = None, base: EvalParams = DEFAULT_PARAMS) -> list[CorpusEntry]:
    """Every ``*.hc`` file in the directory, sorted by id, with settings from
    an optional ``manifest.json`` next to them."""
    root = Path(directory) if directory is not None else corpus_dir()
    manifest: dict = {}
    if (root / "manifest.json").exists():
        manifest = json.loads((root / "manifest.json").read_text())
    defaults = manifest.get("defaults", {})
    settings = manifest.get("programs", {})
    entries = []
    for path in sorted(root.glob("*.hc")):
        pid = path.stem
        info = settings.get(pid, {})
        params = base.with_(**{**defaults, **info.get("params", {})})
        source = path.read_text()
        term = parse(source)
        check_program(term)
        entries.append(
            CorpusEntry(
                id=pid,
                source=source,
                term=term,
                T=float(info.get("T", DEFAULT_T)),
                params=params,
                exact=bool(info.get("exact", False)),
                expect=info.get("expect", {}),
            )
        )
    return entries


def corpus_entry(pid: str) -> CorpusEntry:
    for entry in load_corpus():
        if entry.id == pid:
            return entry
    raise KeyError(pid)
