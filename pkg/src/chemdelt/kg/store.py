"""Indexed in-memory triple store.

Three sorted permutation indexes (SPO, POS, OSP) back pattern matching; a
bound pattern becomes a contiguous range scan on the index with the longest
bound prefix. Reads are safe to share across threads; writes require external
serialization (many-readers / one-writer contract).
"""

from __future__ import annotations

import bisect
from collections import Counter
from typing import Iterator

from .model import Iri, Term, TermError, Triple, term_key


class GraphStore:
    def __init__(self) -> None:
        self._by_key: dict[tuple, Triple] = {}
        self._spo: list[tuple] = []
        self._pos: list[tuple] = []
        self._osp: list[tuple] = []
        self._subjects: Counter = Counter()
        self._predicates: Counter = Counter()

    def __len__(self) -> int:
        return len(self._by_key)

    def __contains__(self, t: Triple) -> bool:
        return (t.subject.value, t.predicate.value, term_key(t.object)) in self._by_key

    def __iter__(self) -> Iterator[Triple]:
        """Triples in canonical (subject, predicate, object) order."""
        for key in self._spo:
            yield self._by_key[key]

    def insert(self, t: Triple) -> bool:
        """Add a triple; returns True iff it was not already present."""
        if not isinstance(t, Triple):
            raise TermError(f"not a triple: {t!r}")
        s, p, okey = t.subject.value, t.predicate.value, term_key(t.object)
        key = (s, p, okey)
        if key in self._by_key:
            return False
        self._by_key[key] = t
        bisect.insort(self._spo, key)
        bisect.insort(self._pos, (p, okey, s))
        bisect.insort(self._osp, (okey, s, p))
        self._subjects[s] += 1
        self._predicates[p] += 1
        return True

    def insert_all(self, triples) -> int:
        return sum(1 for t in triples if self.insert(t))

    def match(self, s: Iri | None = None, p: Iri | None = None, o: Term | None = None) -> list[Triple]:
        """All triples matching the bound positions, in canonical order."""
        for name, term in (("subject", s), ("predicate", p)):
            if term is not None and not isinstance(term, Iri):
                raise TermError(f"{name} pattern must be an IRI: {term!r}")
        okey = term_key(o) if o is not None else None

        if s is not None and p is not None:
            prefix: tuple = (s.value, p.value) + ((okey,) if o is not None else ())
            keys = self._scan(self._spo, prefix)
        elif s is not None and o is not None:
            keys = [(e[1], e[2], e[0]) for e in self._scan(self._osp, (okey, s.value))]
        elif s is not None:
            keys = self._scan(self._spo, (s.value,))
        elif p is not None and o is not None:
            keys = [(e[2], e[0], e[1]) for e in self._scan(self._pos, (p.value, okey))]
        elif p is not None:
            keys = [(e[2], e[0], e[1]) for e in self._scan(self._pos, (p.value,))]
        elif o is not None:
            keys = [(e[1], e[2], e[0]) for e in self._scan(self._osp, (okey,))]
        else:
            keys = self._spo
        return [self._by_key[k] for k in sorted(keys)]

    @staticmethod
    def _scan(index: list[tuple], prefix: tuple) -> list[tuple]:
        lo = bisect.bisect_left(index, prefix)
        n = len(prefix)
        out = []
        for i in range(lo, len(index)):
            entry = index[i]
            if entry[:n] != prefix:
                break
            out.append(entry)
        return out

    def objects(self, s: Iri, p: Iri) -> list[Term]:
        return [t.object for t in self.match(s=s, p=p)]

    def subjects(self, p: Iri, o: Term) -> list[Iri]:
        return [t.subject for t in self.match(p=p, o=o)]

    def stats(self) -> dict[str, int]:
        return {
            "triples": len(self._by_key),
            "distinctSubjects": len(self._subjects),
            "distinctPredicates": len(self._predicates),
        }
