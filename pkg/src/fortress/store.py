"""Fortress sharing store: records, users, backpacks, journal persistence.

Persistence is a newline-delimited JSON journal: every mutation appends
one line and the whole in-memory index is rebuilt by replaying the file
on startup.  A single lock serializes writers; reads hand out snapshots.
Session tokens live in memory only and expire after thirty days.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field

from . import dsl
from .model import (
    Action,
    ActionKind,
    Condition,
    ConditionKind,
    EntityClass,
    Fortress,
    FsmEdge,
    FsmNode,
)
from .rng import Rng

BACKPACK_LIMIT = 10
RECENT_LIMIT = 120
SESSION_TTL_SECONDS = 30 * 24 * 60 * 60
ANONYMOUS_AUTHOR = "dork"


# -- Errors -------------------------------------------------------------------


class StoreError(Exception):
    code = "StoreError"


class ValidationFailed(StoreError):
    code = "ValidationFailed"

    def __init__(self, errors):
        super().__init__("fortress text does not compile")
        self.errors = list(errors)


class UnknownId(StoreError):
    code = "UnknownId"


class UnknownParent(StoreError):
    code = "UnknownParent"


class UnknownEntity(StoreError):
    code = "UnknownEntity"


class UsernameTaken(StoreError):
    code = "UsernameTaken"


class BadCredentials(StoreError):
    code = "BadCredentials"


class BackpackFull(StoreError):
    code = "BackpackFull"


class NoCriteria(StoreError):
    code = "NoCriteria"


# -- Records ------------------------------------------------------------------


@dataclass
class FortressRecord:
    id: int
    fortress_text: str
    name: str
    author: str
    notes: str
    parent_id: int | None
    created_at: float
    play_count: int = 0
    has_player: bool = False


@dataclass
class UserAccount:
    username: str
    password_digest: str
    email: str | None = None
    backpack: list[EntityClass] = field(default_factory=list)


@dataclass
class _Session:
    username: str
    issued_at: float


# -- Entity class (de)serialization for the journal and the API ---------------


def class_to_dict(cls: EntityClass) -> dict:
    return {
        "char": cls.char,
        "name": cls.name,
        "nodes": [
            {
                "index": n.index,
                "kind": n.action.kind.value,
                "target": n.action.target,
            }
            for n in cls.nodes
        ],
        "edges": [
            {
                "src": e.src,
                "dst": e.dst,
                "kind": e.condition.kind.value,
                "target": e.condition.target,
                "count": e.condition.count,
            }
            for e in cls.edges
        ],
    }


def class_from_dict(data: dict) -> EntityClass:
    nodes = [
        FsmNode(n["index"], Action(ActionKind(n["kind"]), n.get("target")))
        for n in data["nodes"]
    ]
    edges = [
        FsmEdge(
            e["src"],
            e["dst"],
            Condition(ConditionKind(e["kind"]), e.get("target"), e.get("count")),
        )
        for e in data["edges"]
    ]
    return EntityClass(data["char"], data["name"], nodes, edges)


# -- Password hashing ----------------------------------------------------------


def _hash_password(password: str, salt: bytes | None = None) -> str:
    salt = salt if salt is not None else secrets.token_bytes(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt, n=2**14, r=8, p=1, dklen=32
    )
    return f"scrypt${salt.hex()}${digest.hex()}"


def _verify_password(password: str, stored: str) -> bool:
    try:
        scheme, salt_hex, digest_hex = stored.split("$")
        if scheme != "scrypt":
            return False
        recomputed = _hash_password(password, bytes.fromhex(salt_hex))
    except (ValueError, TypeError):
        return False
    return secrets.compare_digest(recomputed, stored)


# -- Backpack placement ---------------------------------------------------------


@dataclass(frozen=True)
class PlacementReport:
    dropped_nodes: tuple[int, ...] = ()
    dropped_edges: tuple[tuple[int, int], ...] = ()


def backpack_place(
    entity: EntityClass, fortress_chars: set[str], rng: Rng
) -> tuple[EntityClass, PlacementReport]:
    """Rewrite a backpack entity's targets to fit a destination fortress.

    Every node or edge target character that is not present in the
    destination (the fortress's characters plus the entity's own) is
    replaced by a uniform random choice over that set.  A replacement
    never creates a duplicate (kind, target) node signature; when no
    legal choice remains the node is dropped, along with edges touching
    it, and the drops are reported.  Node indices are re-packed so the
    result is structurally valid.
    """
    legal_chars = sorted(fortress_chars | {entity.char})

    signatures: set[tuple] = set()
    kept_nodes: list[FsmNode] = []
    dropped_nodes: list[int] = []
    for node in sorted(entity.nodes, key=lambda n: n.index):
        action = node.action
        if action.target is not None and action.target not in legal_chars:
            candidates = [
                c for c in legal_chars if (action.kind, c) not in signatures
            ]
            if not candidates:
                dropped_nodes.append(node.index)
                continue
            action = Action(action.kind, rng.choice(candidates))
        if action.signature in signatures:
            # Possible when an already-legal target collides with an
            # earlier rewrite; the later node is the one that gives way.
            dropped_nodes.append(node.index)
            continue
        signatures.add(action.signature)
        kept_nodes.append(FsmNode(node.index, action))

    renumber = {node.index: i for i, node in enumerate(kept_nodes)}
    nodes = [FsmNode(renumber[n.index], n.action) for n in kept_nodes]

    edges: list[FsmEdge] = []
    dropped_edges: list[tuple[int, int]] = []
    for edge in entity.edges:
        if edge.src not in renumber or edge.dst not in renumber:
            dropped_edges.append((edge.src, edge.dst))
            continue
        condition = edge.condition
        if condition.target is not None and condition.target not in legal_chars:
            condition = Condition(
                condition.kind, rng.choice(legal_chars), condition.count
            )
        edges.append(FsmEdge(renumber[edge.src], renumber[edge.dst], condition))

    placed = EntityClass(entity.char, entity.name, nodes, edges)
    report = PlacementReport(tuple(dropped_nodes), tuple(dropped_edges))
    return placed, report


# -- Store ----------------------------------------------------------------------


class FortressStore:
    """Journal-backed index of fortress records and user accounts."""

    def __init__(self, path: str | None = None):
        self.path = path
        self._lock = threading.Lock()
        self._records: dict[int, FortressRecord] = {}
        self._users: dict[str, UserAccount] = {}
        self._sessions: dict[str, _Session] = {}
        self._parsed: dict[int, Fortress] = {}
        self._next_id = 1
        if path is not None and os.path.exists(path):
            self._replay()

    # -- journal ----------------------------------------------------------

    def _replay(self) -> None:
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    self._apply(json.loads(line))

    def _append(self, entry: dict) -> None:
        if self.path is None:
            return
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry, separators=(",", ":")) + "\n")

    def _apply(self, entry: dict) -> None:
        match entry["kind"]:
            case "fortress":
                record = FortressRecord(
                    id=entry["id"],
                    fortress_text=entry["text"],
                    name=entry["name"],
                    author=entry["author"],
                    notes=entry["notes"],
                    parent_id=entry["parent_id"],
                    created_at=entry["created_at"],
                    has_player=entry["has_player"],
                )
                self._records[record.id] = record
                self._next_id = max(self._next_id, record.id + 1)
            case "play":
                self._records[entry["id"]].play_count += 1
            case "user":
                self._users[entry["username"]] = UserAccount(
                    username=entry["username"],
                    password_digest=entry["password_digest"],
                    email=entry["email"],
                )
            case "backpack_add":
                user = self._users[entry["username"]]
                user.backpack.append(class_from_dict(entry["entity"]))
            case unknown:
                raise ValueError(f"unknown journal entry kind {unknown!r}")

    # -- fortress records ---------------------------------------------------

    def submit(
        self,
        text: str,
        author: str | None = None,
        parent_id: int | None = None,
    ) -> FortressRecord:
        """Validate, canonicalize, and file a fortress; returns the record."""
        try:
            fortress = dsl.parse(text)
        except dsl.CompileFailure as failure:
            raise ValidationFailed(failure.errors) from None
        canonical = dsl.serialize(fortress)
        with self._lock:
            if parent_id is not None and parent_id not in self._records:
                raise UnknownParent(f"no fortress with id {parent_id}")
            record = FortressRecord(
                id=self._next_id,
                fortress_text=canonical,
                name=fortress.name,
                author=author or ANONYMOUS_AUTHOR,
                notes=fortress.notes,
                parent_id=parent_id,
                created_at=time.time(),
                has_player=fortress.has_player,
            )
            self._next_id += 1
            self._records[record.id] = record
            self._parsed[record.id] = fortress
            self._append(
                {
                    "kind": "fortress",
                    "id": record.id,
                    "text": record.fortress_text,
                    "name": record.name,
                    "author": record.author,
                    "notes": record.notes,
                    "parent_id": record.parent_id,
                    "created_at": record.created_at,
                    "has_player": record.has_player,
                }
            )
            return record

    def get(self, fortress_id: int) -> FortressRecord:
        record = self._records.get(fortress_id)
        if record is None:
            raise UnknownId(f"no fortress with id {fortress_id}")
        return record

    def parsed(self, fortress_id: int) -> Fortress:
        if fortress_id not in self._parsed:
            self._parsed[fortress_id] = dsl.parse(self.get(fortress_id).fortress_text)
        return self._parsed[fortress_id]

    def recent(self, limit: int = RECENT_LIMIT) -> list[FortressRecord]:
        limit = max(1, min(limit, RECENT_LIMIT))
        newest_first = sorted(self._records.values(), key=lambda r: -r.id)
        return newest_first[:limit]

    def search(
        self, username: str | None = None, fortress_name: str | None = None
    ) -> list[FortressRecord]:
        if not username and not fortress_name:
            raise NoCriteria("search needs a username or a fortress name")
        hits = []
        for record in sorted(self._records.values(), key=lambda r: -r.id):
            if username and username.lower() not in record.author.lower():
                continue
            if fortress_name and fortress_name.lower() not in record.name.lower():
                continue
            hits.append(record)
        return hits

    def lineage(self, fortress_id: int) -> list[int]:
        """Chain of ancestor ids ending at `fortress_id`, root first."""
        record = self.get(fortress_id)
        chain = [record.id]
        while record.parent_id is not None:
            record = self.get(record.parent_id)
            chain.append(record.id)
        chain.reverse()
        return chain

    def record_play(self, fortress_id: int) -> int:
        with self._lock:
            record = self.get(fortress_id)
            record.play_count += 1
            self._append({"kind": "play", "id": record.id})
            return record.play_count

    def node_stats(self) -> dict[str, int]:
        """Occurrences of every action kind across all stored definitions."""
        counts = {kind.value: 0 for kind in ActionKind}
        for record in self._records.values():
            fortress = self.parsed(record.id)
            for cls in fortress.classes.values():
                for node in cls.nodes:
                    counts[node.action.kind.value] += 1
        return counts

    # -- users and sessions ---------------------------------------------------

    def register(
        self, username: str, password: str, email: str | None = None
    ) -> UserAccount:
        with self._lock:
            if username in self._users:
                raise UsernameTaken(f"username {username!r} is taken")
            user = UserAccount(username, _hash_password(password), email)
            self._users[username] = user
            self._append(
                {
                    "kind": "user",
                    "username": username,
                    "password_digest": user.password_digest,
                    "email": email,
                }
            )
            return user

    def login(self, username: str, password: str) -> str:
        user = self._users.get(username)
        if user is None or not _verify_password(password, user.password_digest):
            raise BadCredentials("unknown username or wrong password")
        token = secrets.token_hex(16)
        with self._lock:
            self._sessions[token] = _Session(username, time.time())
        return token

    def session_user(self, token: str) -> UserAccount | None:
        session = self._sessions.get(token)
        if session is None:
            return None
        if time.time() - session.issued_at > SESSION_TTL_SECONDS:
            del self._sessions[token]
            return None
        return self._users.get(session.username)

    def user(self, username: str) -> UserAccount:
        account = self._users.get(username)
        if account is None:
            raise BadCredentials(f"no user {username!r}")
        return account

    # -- backpacks ---------------------------------------------------------------

    def backpack_add(
        self, username: str, fortress_id: int, entity_char: str
    ) -> list[EntityClass]:
        """Copy one entity class from a stored fortress into a backpack."""
        with self._lock:
            user = self.user(username)
            if len(user.backpack) >= BACKPACK_LIMIT:
                raise BackpackFull(f"backpack holds at most {BACKPACK_LIMIT} entities")
            fortress = self.parsed(fortress_id)
            cls = fortress.classes.get(entity_char)
            if cls is None:
                raise UnknownEntity(
                    f"fortress {fortress_id} defines no entity {entity_char!r}"
                )
            copy = class_from_dict(class_to_dict(cls))
            user.backpack.append(copy)
            self._append(
                {
                    "kind": "backpack_add",
                    "username": username,
                    "entity": class_to_dict(copy),
                }
            )
            return list(user.backpack)
