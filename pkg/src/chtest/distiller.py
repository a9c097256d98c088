"""Derive change objects from program snapshots.

The first snapshot becomes a run of additions; each later snapshot is
diffed against its predecessor at class, method and invocation
granularity. Matching is purely by subject id, so a rename is a Remove
followed by an Add.
"""
from __future__ import annotations

from dataclasses import dataclass

from .config import DEFAULT_CONFIG, TestConfig
from .frontend import ast as A
from .frontend.entities import class_order, extract_entities
from .frontend.printer import method_to_str
from .model import (Change, ChangeKind, ChangeModel, ChangeModelError, ResolutionMode, Subject,
                    SubjectKind, class_id, method_id, polymorphic_relink)

_KIND_RANK = {SubjectKind.CLASS: 0, SubjectKind.METHOD: 1, SubjectKind.INVOCATION: 2}


class InconsistentBase(ChangeModelError):
    """The old snapshot does not describe the model's alive subjects."""


def distill_initial(p: A.Program, mode: ResolutionMode = ResolutionMode(),
                    cfg: TestConfig = DEFAULT_CONFIG) -> ChangeModel:
    model = ChangeModel(mode)
    for subject in extract_entities(p, mode.include_constructors, cfg):
        model.record(ChangeKind.ADD, subject)
    return model


def _method_texts(p: A.Program) -> dict[str, str]:
    return {method_id(c.name, m.name, m.arity): method_to_str(m)
            for c in p.classes.values() for m in c.methods}


def _class_rank(p: A.Program) -> dict[str, int]:
    return {class_id(c.name): i for i, c in enumerate(class_order(p))}


def distill_delta(model: ChangeModel, old: A.Program, new: A.Program,
                  cfg: TestConfig = DEFAULT_CONFIG) -> list[Change]:
    """Append the changes turning ``old`` into ``new`` and return them.

    Order: Removes (invocations, then methods, then subclasses before their
    superclasses), class Adds and Modifies, method Adds and Modifies,
    invocation Adds. Dependents are therefore always removed before the
    subjects they hang off.
    """
    inc = model.mode.include_constructors
    old_subjects = {s.id: s for s in extract_entities(old, inc, cfg)}
    alive = model.alive_subjects()
    if alive != old_subjects:
        missing = sorted(set(old_subjects) ^ set(alive))[:5]
        differing = sorted(k for k in set(old_subjects) & set(alive) if old_subjects[k] != alive[k])[:5]
        raise InconsistentBase(f"old snapshot does not match the model (ids {missing}, "
                               f"attributes {differing})")
    new_subjects = {s.id: s for s in extract_entities(new, inc, cfg)}
    old_texts, new_texts = _method_texts(old), _method_texts(new)
    old_rank, new_rank = _class_rank(old), _class_rank(new)

    removed = [s for sid, s in old_subjects.items() if sid not in new_subjects]
    # subclasses first so no removed class is still somebody's live superclass
    removed.sort(key=lambda s: (-_KIND_RANK[s.kind], -old_rank.get(s.id, 0), s.id))
    added = [s for sid, s in new_subjects.items() if sid not in old_subjects]
    added.sort(key=lambda s: (_KIND_RANK[s.kind], new_rank.get(s.id, 0), s.id))

    modified: list[Subject] = []
    for sid, s in new_subjects.items():
        if sid not in old_subjects:
            continue
        before = old_subjects[sid]
        if s.kind is SubjectKind.METHOD and (before != s or old_texts[sid] != new_texts[sid]):
            modified.append(s)
        elif s.kind is SubjectKind.CLASS and before != s:
            modified.append(s)
    modified.sort(key=lambda s: (_KIND_RANK[s.kind], new_rank.get(s.id, 0), s.id))

    out: list[Change] = []
    for s in removed:
        out.append(model.record(ChangeKind.REMOVE, s))
    for kind in (SubjectKind.CLASS, SubjectKind.METHOD):
        for s in added:
            if s.kind is kind:
                out.append(model.record(ChangeKind.ADD, s))
        for s in modified:
            if s.kind is kind:
                out.append(model.record(ChangeKind.MODIFY, s))
    for s in added:
        if s.kind is SubjectKind.INVOCATION:
            out.append(model.record(ChangeKind.ADD, s))
    return out


def distill_history(snapshots: list[A.Program], mode: ResolutionMode = ResolutionMode(),
                    cfg: TestConfig = DEFAULT_CONFIG) -> ChangeModel:
    """Distill a sequence of snapshots into one model."""
    if not snapshots:
        return ChangeModel(mode)
    model = distill_initial(snapshots[0], mode, cfg)
    for old, new in zip(snapshots, snapshots[1:]):
        distill_delta(model, old, new, cfg)
    return model


@dataclass
class DeltaSummary:
    added: int = 0
    modified: int = 0
    removed: int = 0

    @classmethod
    def of(cls, changes: list[Change]) -> "DeltaSummary":
        out = cls()
        for c in changes:
            if c.kind is ChangeKind.ADD:
                out.added += 1
            elif c.kind is ChangeKind.MODIFY:
                out.modified += 1
            else:
                out.removed += 1
        return out


def describe_delta(changes: list[Change]) -> str:
    """Human-readable delta summary, one change per line."""
    s = DeltaSummary.of(changes)
    lines = [f"{len(changes)} changes: {s.added} added, {s.modified} modified, {s.removed} removed"]
    lines += [f"  {c}" for c in changes]
    return "\n".join(lines) + "\n"


__all__ = ["distill_initial", "distill_delta", "distill_history", "describe_delta",
           "polymorphic_relink", "InconsistentBase", "DeltaSummary"]

