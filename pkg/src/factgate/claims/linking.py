"""Entity linking against a knowledge-base alias table.

Exact normalized match wins with score 1.0; otherwise the best character
trigram Jaccard similarity at or above the threshold (default 0.6) links
fuzzily; below that the entity stays unlinked with score 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from factgate.claims.model import EntityKind, EntityRef, normalize_surface

DEFAULT_LINK_THRESHOLD = 0.6


def char_trigrams(text: str) -> frozenset[str]:
    norm = normalize_surface(text)
    if len(norm) < 3:
        return frozenset([norm]) if norm else frozenset()
    return frozenset(norm[i : i + 3] for i in range(len(norm) - 2))


def trigram_jaccard(a: str, b: str) -> float:
    ta, tb = char_trigrams(a), char_trigrams(b)
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


@dataclass
class AliasTable:
    """Alias -> canonical entity lookup, loaded from a TSV file.

    File format: ``canonical_id<TAB>kind<TAB>alias`` (one alias per line;
    an id may appear on many lines).
    """

    exact: dict[str, tuple[str, EntityKind]] = field(default_factory=dict)
    aliases: list[tuple[str, str, EntityKind]] = field(default_factory=list)

    def add(self, canonical_id: str, kind: EntityKind, alias: str) -> None:
        norm = normalize_surface(alias)
        if not norm:
            return
        self.exact.setdefault(norm, (canonical_id, kind))
        self.aliases.append((alias, canonical_id, kind))

    @classmethod
    def load(cls, path: str | Path) -> "AliasTable":
        table = cls()
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            canonical_id, kind_name, alias = parts
            table.add(canonical_id, EntityKind[kind_name.strip().upper()], alias)
        return table

    def __len__(self) -> int:
        return len(self.aliases)


def link_entity(
    surface_form: str,
    alias_table: AliasTable | None,
    threshold: float = DEFAULT_LINK_THRESHOLD,
) -> EntityRef:
    """Resolve a surface form to an EntityRef.

    Returns an unlinked EntityRef (score 0) when no alias reaches the
    similarity threshold or no table is loaded.
    """
    if alias_table is None or len(alias_table) == 0:
        return EntityRef.unlinked(surface_form)

    norm = normalize_surface(surface_form)
    hit = alias_table.exact.get(norm)
    if hit is not None:
        canonical_id, kind = hit
        return EntityRef(canonical_id, surface_form, kind, 1.0)

    best_score = 0.0
    best: tuple[str, EntityKind] | None = None
    for alias, canonical_id, kind in alias_table.aliases:
        score = trigram_jaccard(surface_form, alias)
        if score > best_score:
            best_score = score
            best = (canonical_id, kind)
    if best is not None and best_score >= threshold:
        canonical_id, kind = best
        return EntityRef(canonical_id, surface_form, kind, best_score)
    return EntityRef.unlinked(surface_form)
