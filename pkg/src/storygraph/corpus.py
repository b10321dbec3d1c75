"""Post ingestion, deduplication and boolean keyword scoping.

The first pipeline stage: load posts from JSONL or CSV, drop malformed
records with a warning tally, and restrict the corpus to one event with a
boolean query (``boston AND bombing``).
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import textkit


class CorpusError(Exception):
    """Unrecoverable ingestion problem (unreadable file, bad format)."""


class QueryError(Exception):
    """Query text failed to parse or violates query invariants."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at char {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Post:
    id: str
    text: str
    created_at: float = 0.0
    author: str = ""
    is_repost: bool = False
    repost_of: str | None = None


@dataclass
class Corpus:
    """Ordered, id-unique collection of posts. Read-only after load."""

    posts: list[Post]
    source_uri: str = ""

    def __len__(self) -> int:
        return len(self.posts)

    def __iter__(self):
        return iter(self.posts)

    def __getitem__(self, i: int) -> Post:
        return self.posts[i]

    def ids(self) -> list[str]:
        return [p.id for p in self.posts]


def _parse_created_at(value) -> float:
    if value is None or value == "":
        return 0.0
    if isinstance(value, (int, float)):
        return float(value)
    dt = datetime.fromisoformat(str(value).replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _make_post(record: dict) -> Post:
    post_id = str(record.get("id", "")).strip()
    text = str(record.get("text", ""))
    if not post_id:
        raise ValueError("missing id")
    if not text.strip():
        raise ValueError("empty text")
    return Post(
        id=post_id,
        text=text,
        created_at=_parse_created_at(record.get("created_at")),
        author=str(record.get("author", "") or ""),
        is_repost=bool(record.get("is_repost", False)),
        repost_of=record.get("repost_of") or None,
    )


def load_corpus(path: str | Path, format: str = "jsonl") -> tuple[Corpus, int]:
    """Load posts record-by-record; malformed records are skipped.

    Returns (corpus, warning_count). Duplicate ids keep the first
    occurrence; every skip (malformed or duplicate) counts one warning.
    """
    path = Path(path)
    if format not in ("jsonl", "csv"):
        raise CorpusError(f"unknown corpus format: {format!r}")
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc

    posts: list[Post] = []
    seen: set[str] = set()
    warnings = 0

    def add(record: dict):
        nonlocal warnings
        try:
            post = _make_post(record)
        except (ValueError, TypeError):
            warnings += 1
            return
        if post.id in seen:
            warnings += 1
            return
        seen.add(post.id)
        posts.append(post)

    if format == "jsonl":
        for line in raw.splitlines():
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                warnings += 1
                continue
            if not isinstance(record, dict):
                warnings += 1
                continue
            add(record)
    else:
        reader = csv.DictReader(raw.splitlines())
        if reader.fieldnames is None or "id" not in reader.fieldnames or "text" not in reader.fieldnames:
            raise CorpusError(f"{path}: CSV must have a header row with id,text columns")
        for row in reader:
            add({k: v for k, v in row.items() if k is not None})

    return Corpus(posts=posts, source_uri=str(path)), warnings


# --- boolean queries -------------------------------------------------------

@dataclass(frozen=True)
class Term:
    word: str


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Node", ...]


Node = Term | Not | And | Or


@dataclass(frozen=True)
class BooleanQuery:
    root: Node

    def matches(self, post: Post) -> bool:
        tokens = frozenset(textkit.tokenize(textkit.normalize(post.text)))
        return _eval(self.root, tokens)


def _eval(node: Node, tokens: frozenset[str]) -> bool:
    if isinstance(node, Term):
        return node.word in tokens
    if isinstance(node, Not):
        return not _eval(node.child, tokens)
    if isinstance(node, And):
        return all(_eval(c, tokens) for c in node.children)
    return any(_eval(c, tokens) for c in node.children)


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def _lex(src: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start()) for m in _TOKEN_RE.finditer(src)]


class _Parser:
    """Recursive descent over: or := and (OR and)*; and := unary (AND unary)*;
    unary := NOT unary | '(' or ')' | term. AND binds tighter than OR."""

    def __init__(self, src: str):
        self.src = src
        self.tokens = _lex(src)
        self.pos = 0

    def peek(self) -> tuple[str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, int]:
        tok = self.peek()
        if tok is None:
            raise QueryError("unexpected end of query", len(self.src))
        self.pos += 1
        return tok

    def parse(self) -> Node:
        node = self.or_expr()
        tok = self.peek()
        if tok is not None:
            raise QueryError(f"unexpected token {tok[0]!r}", tok[1])
        return node

    def or_expr(self) -> Node:
        children = [self.and_expr()]
        while self.peek() is not None and self.peek()[0] == "OR":
            self.take()
            children.append(self.and_expr())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def and_expr(self) -> Node:
        children = [self.unary()]
        while self.peek() is not None and self.peek()[0] == "AND":
            self.take()
            children.append(self.unary())
        return children[0] if len(children) == 1 else And(tuple(children))

    def unary(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise QueryError("unexpected end of query", len(self.src))
        word, offset = tok
        if word == "NOT":
            self.take()
            return Not(self.unary())
        if word == "(":
            self.take()
            node = self.or_expr()
            closing = self.peek()
            if closing is None or closing[0] != ")":
                raise QueryError("missing closing parenthesis", offset)
            self.take()
            return node
        if word in (")", "AND", "OR"):
            raise QueryError(f"unexpected token {word!r}", offset)
        self.take()
        return Term(word.lower())


def _has_positive_term(node: Node) -> bool:
    if isinstance(node, Term):
        return True
    if isinstance(node, Not):
        return False
    return any(_has_positive_term(c) for c in node.children)


def parse_query(src: str) -> BooleanQuery:
    """Parse an infix boolean query.

    Keywords AND/OR/NOT are case-sensitive; terms match case-insensitively
    at the word-token level. A query must keep at least one TERM outside
    any NOT, otherwise it would match the unbounded complement.
    """
    if not src or not src.strip():
        raise QueryError("empty query")
    root = _Parser(src).parse()
    if not _has_positive_term(root):
        raise QueryError("query needs at least one term not under NOT")
    return BooleanQuery(root)


def filter_corpus(corpus: Corpus, query: BooleanQuery) -> Corpus:
    """Posts matching the query, in corpus order."""
    return Corpus(
        posts=[p for p in corpus.posts if query.matches(p)],
        source_uri=corpus.source_uri,
    )


def collapse_duplicate_texts(corpus: Corpus) -> tuple[Corpus, int]:
    """Optionally fold posts whose normalized text is identical (retweets).

    Keeps the first post of each text; returns (corpus, collapsed_count).
    """
    seen: dict[str, str] = {}
    kept: list[Post] = []
    collapsed = 0
    for post in corpus.posts:
        key = textkit.normalize(post.text)
        if key in seen:
            collapsed += 1
            continue
        seen[key] = post.id
        kept.append(post)
    return Corpus(posts=kept, source_uri=corpus.source_uri), collapsed
