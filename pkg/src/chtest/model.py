"""First-class change objects over class/method/invocation subjects.

A :class:`ChangeModel` is an append-only list of Add/Modify/Remove changes.
Each change records the earlier changes it depends on: structural parents
(method -> class, invocation -> method, Modify/Remove -> the Add of the same
subject) and, for invocation additions, the additions of every method the
invocation may call.

Callee links are also kept as a live index. An invocation can be recorded
before a method it may call (e.g. a subclass override added in a later
snapshot); such late links cannot be ``dependsOn`` edges because edges only
point backwards, so they live in the index only. ``invocational_dependees``
reads the index.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Iterable, Iterator, Optional


class SubjectKind(str, Enum):
    CLASS = "Class"
    METHOD = "Method"
    INVOCATION = "Invocation"


class ChangeKind(str, Enum):
    ADD = "Add"
    MODIFY = "Modify"
    REMOVE = "Remove"


class Resolution(str, Enum):
    STATIC = "static"
    POLYMORPHIC = "poly"


@dataclass(frozen=True)
class ResolutionMode:
    resolution: Resolution = Resolution.STATIC
    include_constructors: bool = False

    @classmethod
    def static(cls, include_constructors: bool = False) -> "ResolutionMode":
        return cls(Resolution.STATIC, include_constructors)

    @classmethod
    def poly(cls, include_constructors: bool = False) -> "ResolutionMode":
        return cls(Resolution.POLYMORPHIC, include_constructors)

    @property
    def polymorphic(self) -> bool:
        return self.resolution is Resolution.POLYMORPHIC

    def flipped(self) -> "ResolutionMode":
        other = Resolution.STATIC if self.polymorphic else Resolution.POLYMORPHIC
        return ResolutionMode(other, self.include_constructors)


# -- subject ids ------------------------------------------------------------

def class_id(name: str) -> str:
    return f"class:{name}"


def method_id(class_name: str, name: str, arity: int) -> str:
    return f"method:{class_name}.{name}/{arity}"


def invocation_id(owner_method_id: str, signature: str, ordinal: int) -> str:
    """``inv:Owner.meth/N#<signature>#<ordinal>``.

    The signature names the call's target as the resolver saw it
    (``Recv.name/arity``, ``super:Recv.name/arity`` or ``new:C/arity``);
    the ordinal counts earlier calls with the same signature in the body.
    """
    return f"inv:{owner_method_id[len('method:'):]}#{signature}#{ordinal}"


def class_name_of(cid: str) -> str:
    return cid[len("class:"):]


@dataclass(frozen=True)
class Subject:
    id: str
    kind: SubjectKind
    identifier: str
    arity: int = 0
    ownerId: Optional[str] = None
    superclassId: Optional[str] = None
    staticReceiverClassId: Optional[str] = None
    isAbstract: bool = False
    isTest: bool = False
    isConstructor: bool = False
    isSuper: bool = False

    @property
    def signature(self) -> tuple[str, int]:
        return (self.identifier, self.arity)


@dataclass(frozen=True)
class Change:
    changeId: int
    kind: ChangeKind
    subjectId: str
    dependsOn: frozenset[int] = field(default_factory=frozenset)

    def __str__(self) -> str:
        return f"#{self.changeId} {self.kind.value}({self.subjectId})"


# -- errors ------------------------------------------------------------------

class ChangeModelError(Exception):
    pass


class UnknownOwner(ChangeModelError):
    pass


class DeadSubject(ChangeModelError):
    pass


class DuplicateAdd(ChangeModelError):
    pass


class AliveDependents(ChangeModelError):
    pass


class NotAMethodAddition(ChangeModelError):
    pass


class MalformedDocument(ChangeModelError):
    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


# -- the model ---------------------------------------------------------------

class ChangeModel:
    """Append-only change store with dependency indexes.

    Single writer while it is being built; all queries are pure.
    """

    def __init__(self, mode: ResolutionMode = ResolutionMode()):
        self.mode = mode
        self.changes: list[Change] = []
        self.subjects: dict[str, Subject] = {}
        # subject version installed by each Add/Modify (Remove: removed version)
        self.versions: dict[int, Subject] = {}
        self._alive: dict[str, int] = {}  # subject id -> its live Add
        self._children: dict[str, set[str]] = {}  # alive structural children
        self._parent: dict[int, int] = {}  # hierarchical-parent index
        self._methods_by_sig: dict[tuple[str, int], set[str]] = {}
        self._invs_by_sig: dict[tuple[str, int], set[str]] = {}
        self._links: dict[int, frozenset[int]] = {}  # inv Add -> callee method Adds
        self._dependees: dict[int, set[int]] = {}  # method Add -> inv Adds

    # -- basic queries --

    def __len__(self) -> int:
        return len(self.changes)

    def __iter__(self) -> Iterator[Change]:
        return iter(self.changes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChangeModel):
            return NotImplemented
        return (self.mode == other.mode and self.changes == other.changes
                and self.versions == other.versions)

    def change(self, change_id: int) -> Change:
        if not 1 <= change_id <= len(self.changes):
            raise KeyError(change_id)
        return self.changes[change_id - 1]

    def subject_of(self, c: Change) -> Subject:
        return self.versions.get(c.changeId) or self.subjects[c.subjectId]

    def is_alive(self, subject_id: str) -> bool:
        return subject_id in self._alive

    def add_of(self, subject_id: str) -> Optional[Change]:
        cid = self._alive.get(subject_id)
        return None if cid is None else self.changes[cid - 1]

    def alive_subjects(self) -> dict[str, Subject]:
        return {sid: self.subjects[sid] for sid in sorted(self._alive)}

    def alive_children(self, subject_id: str) -> set[str]:
        return set(self._children.get(subject_id, ()))

    def alive_methods_of(self, cid: str) -> list[str]:
        return sorted(s for s in self._children.get(cid, ())
                      if self.subjects[s].kind is SubjectKind.METHOD)

    def links(self, inv_add: Change) -> frozenset[int]:
        """Current callee method-Adds of an invocation Add."""
        return self._links.get(inv_add.changeId, frozenset())

    # -- recording --

    def record(self, kind: ChangeKind, subject: Subject) -> Change:
        """Append a change, computing its dependencies; see ``record_change``."""
        kind = ChangeKind(kind)
        sid = subject.id
        deps: set[int] = set()
        parent: Optional[int] = None
        if kind is ChangeKind.ADD:
            if sid in self._alive:
                raise DuplicateAdd(f"{sid} is already alive")
            parent = self._container_add(subject)
            if parent is not None:
                deps.add(parent)
            if subject.kind is SubjectKind.CLASS and subject.superclassId is not None:
                self._check_acyclic(sid, subject.superclassId)
        else:
            if sid not in self._alive:
                raise DeadSubject(f"{kind.value} of {sid}, which is not alive")
            old = self.subjects[sid]
            if kind is ChangeKind.MODIFY:
                if (old.kind, old.ownerId) != (subject.kind, subject.ownerId):
                    raise ChangeModelError(f"Modify cannot change kind or owner of {sid}")
                if subject.kind is SubjectKind.INVOCATION and subject != old:
                    raise ChangeModelError("invocations are immutable; use Remove/Add")
                if subject.kind is SubjectKind.CLASS and subject.superclassId is not None:
                    self._check_acyclic(sid, subject.superclassId)
            else:
                if self._children.get(sid):
                    raise AliveDependents(
                        f"Remove of {sid} with alive dependents {sorted(self._children[sid])}")
                subject = old
            parent = self._alive[sid]
            deps.add(parent)

        change_id = len(self.changes) + 1
        if kind is ChangeKind.ADD and subject.kind is SubjectKind.INVOCATION:
            callees = self._callee_adds(subject)
            deps |= callees
        change = Change(change_id, kind, sid, frozenset(deps))
        self.changes.append(change)
        self.versions[change_id] = subject
        if parent is not None:
            self._parent[change_id] = parent
        self._apply(change, subject)
        return change

    def _container_add(self, subject: Subject) -> Optional[int]:
        if subject.kind is SubjectKind.CLASS:
            return None
        expected = SubjectKind.CLASS if subject.kind is SubjectKind.METHOD else SubjectKind.METHOD
        owner = subject.ownerId
        if owner is None or owner not in self._alive or self.subjects[owner].kind is not expected:
            raise UnknownOwner(f"{subject.id}: owner {owner!r} is not an alive {expected.value}")
        return self._alive[owner]

    def _check_acyclic(self, sid: str, sup: str) -> None:
        seen = {sid}
        cur: Optional[str] = sup
        while cur is not None and cur in self.subjects:
            if cur in seen:
                raise ChangeModelError(f"class hierarchy cycle through {sid}")
            seen.add(cur)
            cur = self.subjects[cur].superclassId

    def _apply(self, change: Change, subject: Subject) -> None:
        sid = subject.id
        sig = subject.signature
        if change.kind is ChangeKind.ADD:
            self.subjects[sid] = subject
            self._alive[sid] = change.changeId
            if subject.ownerId is not None:
                self._children.setdefault(subject.ownerId, set()).add(sid)
            if subject.kind is SubjectKind.METHOD:
                self._methods_by_sig.setdefault(sig, set()).add(sid)
                self._relink_sig(sig)
            elif subject.kind is SubjectKind.INVOCATION:
                self._invs_by_sig.setdefault(sig, set()).add(sid)
                self._set_links(change.changeId, self._callee_adds(subject))
        elif change.kind is ChangeKind.MODIFY:
            self.subjects[sid] = subject
            if subject.kind is SubjectKind.METHOD:
                self._relink_sig(sig)
            elif subject.kind is SubjectKind.CLASS:
                self._relink_all()
        else:
            add_id = self._alive.pop(sid)
            if subject.ownerId is not None:
                self._children[subject.ownerId].discard(sid)
            self._children.pop(sid, None)
            if subject.kind is SubjectKind.METHOD:
                self._methods_by_sig[sig].discard(sid)
                self._relink_sig(sig)
            elif subject.kind is SubjectKind.INVOCATION:
                self._invs_by_sig[sig].discard(sid)
                self._set_links(add_id, frozenset())
            else:
                self._relink_all()

    def _set_links(self, inv_add: int, callees: frozenset[int]) -> None:
        for m in self._links.get(inv_add, ()):
            self._dependees[m].discard(inv_add)
        if callees:
            self._links[inv_add] = callees
            for m in callees:
                self._dependees.setdefault(m, set()).add(inv_add)
        else:
            self._links.pop(inv_add, None)

    def _relink_sig(self, sig: tuple[str, int]) -> None:
        for inv in self._invs_by_sig.get(sig, ()):
            self._set_links(self._alive[inv], self._callee_adds(self.subjects[inv]))

    def _relink_all(self) -> None:
        for invs in self._invs_by_sig.values():
            for inv in invs:
                self._set_links(self._alive[inv], self._callee_adds(self.subjects[inv]))

    def _callee_adds(self, inv: Subject) -> frozenset[int]:
        return frozenset(self._alive[m] for m in self.candidate_callees(inv))

    # -- resolution --

    def candidate_callees(self, inv: Subject, mode: Optional[ResolutionMode] = None) -> set[str]:
        """Alive method subjects that ``inv`` may call under ``mode``."""
        if inv.kind is not SubjectKind.INVOCATION:
            raise ValueError(f"{inv.id} is not an invocation")
        mode = mode or self.mode
        recv = inv.staticReceiverClassId
        if inv.isConstructor:
            if not mode.include_constructors or recv is None:
                return set()
            target = method_id(class_name_of(recv), inv.identifier, inv.arity)
            return {target} if target in self._alive else set()
        if inv.isSuper:
            found = self._lookup(recv, inv.identifier, inv.arity, concrete=True)
            return {found} if found else set()
        if mode.polymorphic:
            return {m for m in self._methods_by_sig.get(inv.signature, ())
                    if not self.subjects[m].isConstructor}
        found = self._lookup(recv, inv.identifier, inv.arity)
        return {found} if found else set()

    def _lookup(self, cid: Optional[str], name: str, arity: int, concrete: bool = False) -> Optional[str]:
        seen = set()
        while cid is not None and cid in self._alive and cid not in seen:
            seen.add(cid)
            mid = method_id(class_name_of(cid), name, arity)
            if mid in self._alive:
                m = self.subjects[mid]
                if not m.isConstructor and not (concrete and m.isAbstract):
                    return mid
            cid = self.subjects[cid].superclassId
        return None

    # -- dependency traversal --

    def hierarchical_dependencies(self, c: Change) -> list[Change]:
        """Structural chain above ``c``: its Add (for Modify/Remove), then
        the container Adds up to the class. Callee edges are not followed."""
        chain = []
        cur = self._parent.get(c.changeId)
        while cur is not None:
            chain.append(self.changes[cur - 1])
            cur = self._parent.get(cur)
        return chain

    def invocational_dependees(self, method_add: Change) -> set[Change]:
        """Alive invocation Adds currently linked to ``method_add``."""
        subj = self.subject_of(method_add)
        if method_add.kind is not ChangeKind.ADD or subj.kind is not SubjectKind.METHOD:
            raise NotAMethodAddition(str(method_add))
        return {self.changes[i - 1] for i in self._dependees.get(method_add.changeId, ())}

    def unresolved_invocations(self) -> list[str]:
        return sorted(s for s, cid in self._alive.items()
                      if self.subjects[s].kind is SubjectKind.INVOCATION and cid not in self._links)

    # -- rebuild / relink --

    def index_snapshot(self) -> dict:
        """Every derived index, normalized for comparison."""
        return {
            "alive": dict(sorted(self._alive.items())),
            "parent": dict(sorted(self._parent.items())),
            "children": {k: sorted(v) for k, v in sorted(self._children.items()) if v},
            "links": {k: sorted(v) for k, v in sorted(self._links.items())},
            "dependees": {k: sorted(v) for k, v in sorted(self._dependees.items()) if v},
        }

    def rebuilt(self, mode: Optional[ResolutionMode] = None) -> "ChangeModel":
        """Replay the change list into a fresh model (optionally another mode)."""
        out = ChangeModel(mode or self.mode)
        for c in self.changes:
            out.record(c.kind, self.versions[c.changeId])
        return out

    # -- serialization --

    def to_document(self) -> dict:
        subjects = []
        for c in self.changes:
            if c.kind is not ChangeKind.REMOVE:
                rec = _subject_to_json(self.versions[c.changeId])
                rec["sinceChange"] = c.changeId
                subjects.append(rec)
        return {
            "mode": {"resolution": self.mode.resolution.value,
                     "includeConstructors": self.mode.include_constructors},
            "subjects": subjects,
            "changes": [{"changeId": c.changeId, "kind": c.kind.value, "subjectId": c.subjectId,
                         "dependsOn": sorted(c.dependsOn)} for c in self.changes],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n"


def _subject_to_json(s: Subject) -> dict:
    d = asdict(s)
    d["kind"] = s.kind.value
    return d


_SUBJECT_FIELDS = {f.name for f in fields(Subject)}


def record_change(model: ChangeModel, kind: ChangeKind, subject: Subject) -> Change:
    """Append ``kind(subject)`` to ``model`` with its dependency edges.

    Raises UnknownOwner, DeadSubject, DuplicateAdd or AliveDependents when
    the change would violate the model invariants.
    """
    return model.record(kind, subject)


def candidate_callees(model: ChangeModel, invocation: Subject,
                      mode: Optional[ResolutionMode] = None) -> set[str]:
    return model.candidate_callees(invocation, mode)


def hierarchical_dependencies(model: ChangeModel, c: Change) -> list[Change]:
    return model.hierarchical_dependencies(c)


def find_method_addition(model: ChangeModel, chain: Iterable[Change]) -> Optional[Change]:
    """First Add of a Method subject in ``chain``, or None above method level."""
    for c in chain:
        if c.kind is ChangeKind.ADD and model.subject_of(c).kind is SubjectKind.METHOD:
            return c
    return None


def enclosing_method_add(model: ChangeModel, c: Change) -> Optional[Change]:
    return find_method_addition(model, [c, *model.hierarchical_dependencies(c)])


def invocational_dependees(model: ChangeModel, method_add: Change) -> set[Change]:
    return model.invocational_dependees(method_add)


def polymorphic_relink(model: ChangeModel) -> ChangeModel:
    """The same change history with invocation edges recomputed under the
    other resolution mode."""
    return model.rebuilt(model.mode.flipped())


def serialize(model: ChangeModel) -> str:
    return model.dumps()


def _line_of(text: str, needle: str) -> Optional[int]:
    pos = text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def deserialize(text: str) -> ChangeModel:
    """Parse a change-model document, replaying it to rebuild the indexes.

    Raises MalformedDocument with a line number (when locatable) and the
    offending field path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise MalformedDocument("top level must be an object", line=1)
    for key in ("subjects", "changes"):
        if not isinstance(doc.get(key), list):
            raise MalformedDocument("missing or not an array", field=key)
    mode_doc = doc.get("mode", {})
    try:
        mode = ResolutionMode(Resolution(mode_doc.get("resolution", "static")),
                              bool(mode_doc.get("includeConstructors", False)))
    except (ValueError, AttributeError):
        raise MalformedDocument("bad resolution mode", field="mode") from None

    versions: dict[int, Subject] = {}
    for i, rec in enumerate(doc["subjects"]):
        path = f"subjects[{i}]"
        if not isinstance(rec, dict):
            raise MalformedDocument("not an object", field=path)
        rec = dict(rec)
        since = rec.pop("sinceChange", None)
        unknown = set(rec) - _SUBJECT_FIELDS
        if unknown:
            raise MalformedDocument(f"unknown fields {sorted(unknown)}", field=path)
        try:
            rec["kind"] = SubjectKind(rec["kind"])
            subj = Subject(**rec)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad subject: {exc}", _line_of(text, f'"{rec.get("id")}"'),
                                    path) from None
        if not isinstance(since, int) or since in versions:
            raise MalformedDocument("missing or duplicate sinceChange", field=f"{path}.sinceChange")
        versions[since] = subj

    model = ChangeModel(mode)
    latest: dict[str, Subject] = {}
    for i, rec in enumerate(doc["changes"]):
        path = f"changes[{i}]"
        try:
            cid = rec["changeId"]
            kind = ChangeKind(rec["kind"])
            sid = rec["subjectId"]
            deps = rec["dependsOn"]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad change: {exc}", field=path) from None
        line = _line_of(text, f'"changeId": {cid}')
        if cid != i + 1:
            raise MalformedDocument(f"changeId {cid} out of sequence", line, f"{path}.changeId")
        if not isinstance(deps, list) or any(not isinstance(d, int) or not 1 <= d < cid for d in deps):
            raise MalformedDocument(f"dependency on unknown or later changeId in {deps}",
                                    line, f"{path}.dependsOn")
        if kind is ChangeKind.REMOVE:
            subj = latest.get(sid)
        else:
            subj = versions.get(cid)
        if subj is None or subj.id != sid:
            raise MalformedDocument(f"no subject version for {sid}", line, f"{path}.subjectId")
        try:
            c = model.record(kind, subj)
        except ChangeModelError as exc:
            raise MalformedDocument(str(exc), line, path) from None
        if c.dependsOn != frozenset(deps):
            raise MalformedDocument(
                f"dependsOn {sorted(deps)} disagrees with recomputed {sorted(c.dependsOn)}",
                line, f"{path}.dependsOn")
        latest[sid] = subj
    if set(versions) - {c.changeId for c in model.changes if c.kind is not ChangeKind.REMOVE}:
        raise MalformedDocument("subject version refers to no Add/Modify change", field="subjects")
    return model

