"""Per-package textual content as token bags, plus cosine similarity.

Each package carries up to five bag-of-words channels extracted from
its source: field names, method names, comments, method usage, and
variable definitions.  Bags map lowercase tokens to positive counts.

Corpus file format::

    #version 10.4.1.0
    bag org.apache.derby.catalog comments
      sql 2
      read 1

    bag org.apache.derby.catalog methods
      get 3

A record is a ``bag <node> <channel>`` line followed by indented
``<token> <count>`` lines; it ends at a blank line, the next ``bag``
line, or end of file.  Lines starting with ``#`` are comments (the
first one may carry the version id).

Extractor authors should normalize tokens the way :func:`tokenize`
does: split identifiers on camelCase and underscores, lowercase, and
drop one-character and purely numeric tokens.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ParseError

TokenBag = dict[str, int]

CHANNELS = ("fields", "methods", "comments", "method_usage", "variable_defs")


@dataclass
class ContentCorpus:
    """Immutable-by-convention map of (node, channel) to token bags."""

    version_id: str = ""
    bags: dict[tuple[str, str], TokenBag] = field(default_factory=dict)

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(node for node, _ in self.bags)

    def bag(self, node: str, channel: str) -> TokenBag:
        """The node's own bag for one channel; empty when absent."""
        return self.bags.get((node, channel), {})


def package_bag(
    corpus: ContentCorpus, node: str, channel: str, *, hierarchy: bool = True
) -> TokenBag:
    """Token bag for a package on one channel.

    With ``hierarchy`` on, counts are summed over the node and every
    corpus node nested under it (name prefixed by ``node + "."``),
    mirroring the recursive union of sub-package contents.  Missing
    nodes yield empty bags.
    """
    if not hierarchy:
        return dict(corpus.bag(node, channel))
    total: Counter[str] = Counter(corpus.bag(node, channel))
    prefix = node + "."
    for (other, ch), bag in corpus.bags.items():
        if ch == channel and other.startswith(prefix):
            total.update(bag)
    return dict(total)


def cosine_similarity(a: Mapping[str, int], b: Mapping[str, int]) -> float:
    """Cosine of the two count vectors; 0.0 when either bag is empty.

    Terms are summed in sorted token order so the result is exactly
    symmetric and reproducible.
    """
    if not a or not b:
        return 0.0
    common = sorted(a.keys() & b.keys())
    if not common:
        return 0.0
    dot = sum(a[token] * b[token] for token in common)
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    return dot / (norm_a * norm_b)


_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")
_NON_WORD = re.compile(r"[^A-Za-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Split identifiers/text into normalized tokens.

    camelCase and snake_case are split, everything is lowercased, and
    tokens shorter than 2 characters or purely numeric are dropped.
    """
    tokens: list[str] = []
    for chunk in _NON_WORD.split(text):
        if not chunk:
            continue
        for part in _CAMEL_BOUNDARY.split(chunk):
            part = part.lower()
            if len(part) >= 2 and not part.isdigit():
                tokens.append(part)
    return tokens


def bag_from_text(text: str) -> TokenBag:
    """Convenience for extractor code: tokenize and count."""
    return dict(Counter(tokenize(text)))


def load_corpus(path: str | Path) -> ContentCorpus:
    path = Path(path)
    return parse_corpus(path.read_text(encoding="utf-8"), path=str(path))


def parse_corpus(text: str, *, path: str | None = None) -> ContentCorpus:
    version_id = ""
    bags: dict[tuple[str, str], Counter[str]] = {}
    current: Counter[str] | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            current = None
            continue
        if stripped.startswith("#"):
            parts = stripped.split(maxsplit=1)
            if parts[0] == "#version" and len(parts) > 1:
                version_id = parts[1].strip()
            continue
        indented = raw[0].isspace()
        parts = stripped.split()
        if not indented and parts[0] == "bag":
            if len(parts) != 3:
                raise ParseError(
                    f"expected 'bag <node> <channel>', got {stripped!r}",
                    path=path,
                    line=lineno,
                )
            node, channel = parts[1], parts[2]
            if channel not in CHANNELS:
                raise ParseError(
                    f"unknown channel {channel!r}; valid channels: {', '.join(CHANNELS)}",
                    path=path,
                    line=lineno,
                )
            current = bags.setdefault((node, channel), Counter())
        elif indented:
            if current is None:
                raise ParseError(
                    "token line outside of a 'bag' record", path=path, line=lineno
                )
            if len(parts) != 2:
                raise ParseError(
                    f"expected '<token> <count>', got {stripped!r}", path=path, line=lineno
                )
            token = parts[0].lower()
            try:
                count = int(parts[1])
            except ValueError:
                raise ParseError(
                    f"count must be an integer, got {parts[1]!r}", path=path, line=lineno
                ) from None
            if count <= 0:
                raise ParseError(
                    f"count must be positive, got {count}", path=path, line=lineno
                )
            current[token] += count
        else:
            raise ParseError(
                f"expected 'bag' record or indented token line, got {stripped!r}",
                path=path,
                line=lineno,
            )
    return ContentCorpus(version_id, {key: dict(bag) for key, bag in bags.items() if bag})


def serialize_corpus(corpus: ContentCorpus) -> str:
    """Canonical corpus text: records and tokens in lexicographic order."""
    lines = [f"#version {corpus.version_id}"]
    for node, channel in sorted(corpus.bags):
        lines.append(f"bag {node} {channel}")
        for token, count in sorted(corpus.bags[(node, channel)].items()):
            lines.append(f"  {token} {count}")
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def save_corpus(corpus: ContentCorpus, path: str | Path) -> None:
    Path(path).write_text(serialize_corpus(corpus), encoding="utf-8")


def check_corpus_against_graph(corpus: ContentCorpus, nodes: Iterable[str]) -> list[str]:
    """Corpus nodes missing from the companion graph (warn, don't fail)."""
    known = set(nodes)
    return sorted(n for n in corpus.nodes if n not in known)
