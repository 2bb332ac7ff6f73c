"""Group presentations and the exact-algebra oracles used to verify them.

A presentation is a list of generator names plus relator words over those
generators. Words are stored exactly as parsed (possibly unreduced);
reduction is explicit. Everything here is exact integer arithmetic, so the
homology and homomorphism-count invariants derived from a presentation can
serve as trusted oracles for the geometric pipeline.

Presentation file format (UTF-8 text)::

    # comment to end of line
    gens: a b c
    rel: a b a' b'
    rel: c c c

One ``gens:`` line (before any ``rel:`` line) fixes generator indices
1..n in order. A relator token is a generator name, optionally followed
by ``'`` for its inverse. Blank lines are ignored.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

Letter = tuple[int, int]  # (generator index >= 1, sign in {+1, -1})
Word = tuple[Letter, ...]
IntegerMatrix = list[list[int]]

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_TOKEN_RE = re.compile(r"\S+")


class ParseError(ValueError):
    """Presentation file syntax or reference error, with location."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EnumerationBudgetError(RuntimeError):
    """Raised when a homomorphism count would exceed its tuple budget."""


@dataclass(frozen=True)
class Presentation:
    """Finite group presentation: generator names and relator words."""

    names: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("presentation needs at least one generator")
        n = len(self.names)
        for rel in self.relators:
            for gen, sign in rel:
                if not 1 <= gen <= n:
                    raise ValueError(f"generator index {gen} out of range 1..{n}")
                if sign not in (1, -1):
                    raise ValueError(f"letter sign must be +-1, got {sign}")

    @property
    def generator_count(self) -> int:
        return len(self.names)

    def word_text(self, word: Word) -> str:
        return " ".join(
            self.names[g - 1] + ("" if s == 1 else "'") for g, s in word
        )


def parse_presentation(text: str) -> Presentation:
    """Parse a presentation file; see the module docstring for the format."""
    names: list[str] = []
    index_of: dict[str, int] = {}
    relators: list[Word] = []
    seen_gens = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(0), m.start() + 1) for m in _TOKEN_RE.finditer(line)]
        if not tokens:
            continue
        head, col = tokens[0]
        if head == "gens:":
            if seen_gens:
                raise ParseError("duplicate gens: line", lineno, col)
            seen_gens = True
            if len(tokens) == 1:
                raise ParseError("empty generator list", lineno, col)
            for name, ncol in tokens[1:]:
                if not _NAME_RE.match(name):
                    raise ParseError(f"bad generator name {name!r}", lineno, ncol)
                if name in index_of:
                    raise ParseError(f"duplicate generator {name!r}", lineno, ncol)
                index_of[name] = len(names) + 1
                names.append(name)
        elif head == "rel:":
            if not seen_gens:
                raise ParseError("rel: before gens:", lineno, col)
            word: list[Letter] = []
            for tok, tcol in tokens[1:]:
                sign = 1
                name = tok
                if tok.endswith("'"):
                    sign = -1
                    name = tok[:-1]
                if not _NAME_RE.match(name):
                    raise ParseError(f"bad token {tok!r}", lineno, tcol)
                if name not in index_of:
                    raise ParseError(f"unknown generator {name!r}", lineno, tcol)
                word.append((index_of[name], sign))
            relators.append(tuple(word))
        else:
            raise ParseError(f"expected gens: or rel:, got {head!r}", lineno, col)
    if not seen_gens:
        raise ParseError("empty generator list", max(1, text.count("\n") + 1), 1)
    return Presentation(names=tuple(names), relators=tuple(relators))


def free_reduce(word: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[Letter] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def truncate_presentation(pres: Presentation, k: int) -> Presentation:
    """Same generators, first k relators."""
    if not 0 <= k <= len(pres.relators):
        raise ValueError(
            f"relator count {k} out of range 0..{len(pres.relators)}"
        )
    return Presentation(names=pres.names, relators=pres.relators[:k])


def relator_matrix(pres: Presentation) -> IntegerMatrix:
    """Exponent-sum matrix: one row per relator, one column per generator."""
    rows = []
    for rel in pres.relators:
        row = [0] * pres.generator_count
        for gen, sign in rel:
            row[gen - 1] += sign
        rows.append(row)
    return rows


def _smallest_pivot(m: IntegerMatrix, t: int) -> tuple[int, int] | None:
    best = None
    for i in range(t, len(m)):
        for j in range(t, len(m[0])):
            if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(matrix: IntegerMatrix) -> list[int]:
    """Diagonal of the Smith normal form as nonnegative integers d1 | d2 | ...

    Exact arbitrary-precision arithmetic throughout; pivots are chosen by
    smallest nonzero absolute value. Trailing zeros pad the diagonal to
    min(rows, cols).
    """
    m = [[int(x) for x in row] for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if any(len(row) != cols for row in m):
        raise ValueError("ragged matrix")
    diag: list[int] = []
    t = 0
    while t < min(rows, cols):
        if _smallest_pivot(m, t) is None:
            break
        while True:
            pi, pj = _smallest_pivot(m, t)  # type: ignore[misc]
            m[t], m[pi] = m[pi], m[t]
            if pj != t:
                for row in m:
                    row[t], row[pj] = row[pj], row[t]
            if m[t][t] < 0:
                m[t] = [-x for x in m[t]]
            p = m[t][t]
            dirty = False
            for i in range(t + 1, rows):
                q = m[i][t] // p
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[t])]
                if m[i][t]:
                    dirty = True
            for j in range(t + 1, cols):
                q = m[t][j] // p
                if q:
                    for i in range(rows):
                        m[i][j] -= q * m[i][t]
                if m[t][j]:
                    dirty = True
            if dirty:
                continue
            # Pivot must divide the remaining submatrix; if not, pull the
            # offending row up and keep reducing (the pivot strictly shrinks).
            offender = None
            for i in range(t + 1, rows):
                if any(m[i][j] % p for j in range(t + 1, cols)):
                    offender = i
                    break
            if offender is None:
                break
            m[t] = [a + b for a, b in zip(m[t], m[offender])]
        diag.append(abs(m[t][t]))
        t += 1
    return diag + [0] * (min(rows, cols) - len(diag))


def first_homology(pres: Presentation) -> tuple[int, list[int]]:
    """Abelianization as (free rank, invariant factors > 1)."""
    diag = smith_normal_form(relator_matrix(pres))
    nonzero = [d for d in diag if d != 0]
    rank = pres.generator_count - len(nonzero)
    torsion = [d for d in nonzero if d > 1]
    return rank, torsion


@dataclass(frozen=True)
class FiniteGroupTable:
    """Finite group as an explicit multiplication table on 0..n-1."""

    name: str
    table: tuple[tuple[int, ...], ...]
    identity: int
    inverses: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def validate(self) -> None:
        """Check the table is a group: closure, identity, inverses, associativity."""
        n = self.order
        for row in self.table:
            if len(row) != n or any(not 0 <= x < n for x in row):
                raise ValueError(f"{self.name}: table is not closed on 0..{n - 1}")
        e = self.identity
        for a in range(n):
            if self.table[e][a] != a or self.table[a][e] != a:
                raise ValueError(f"{self.name}: {e} is not an identity")
            if self.table[a][self.inverses[a]] != e:
                raise ValueError(f"{self.name}: bad inverse for {a}")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                        raise ValueError(f"{self.name}: not associative at {(a, b, c)}")

    def evaluate(self, word: Word, assignment: list[int]) -> int:
        """Image of a word when generator i maps to assignment[i] (1-based)."""
        acc = self.identity
        for gen, sign in word:
            g = assignment[gen]
            if sign < 0:
                g = self.inverses[g]
            acc = self.table[acc][g]
        return acc


def cyclic_group(n: int) -> FiniteGroupTable:
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroupTable(
        name=f"Z{n}",
        table=table,
        identity=0,
        inverses=tuple((-a) % n for a in range(n)),
    )


def symmetric_group_3() -> FiniteGroupTable:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}

    def compose(p, q):  # (p o q)(x) = p(q(x))
        return tuple(p[q[x]] for x in range(3))

    table = tuple(tuple(index[compose(p, q)] for q in perms) for p in perms)
    inverses = []
    for p in perms:
        inv = [0] * 3
        for x in range(3):
            inv[p[x]] = x
        inverses.append(index[tuple(inv)])
    return FiniteGroupTable(
        name="S3", table=table, identity=index[(0, 1, 2)], inverses=tuple(inverses)
    )


def dihedral_group_4() -> FiniteGroupTable:
    """Symmetries of the square, order 8; element 2*a + b is r^a s^b."""

    def mul(x, y):
        a1, b1 = divmod(x, 2)
        a2, b2 = divmod(y, 2)
        a = (a1 + (a2 if b1 == 0 else -a2)) % 4
        return 2 * a + ((b1 + b2) % 2)

    table = tuple(tuple(mul(x, y) for y in range(8)) for x in range(8))
    inverses = []
    for x in range(8):
        inv = next(y for y in range(8) if mul(x, y) == 0)
        inverses.append(inv)
    return FiniteGroupTable(name="D4", table=table, identity=0, inverses=tuple(inverses))


def standard_oracle_groups() -> tuple[FiniteGroupTable, ...]:
    """The finite quotient targets used as presentation-invariant oracles."""
    groups = (symmetric_group_3(), cyclic_group(2), cyclic_group(4), dihedral_group_4())
    for g in groups:
        g.validate()
    return groups


def count_homomorphisms(
    pres: Presentation, group: FiniteGroupTable, budget: int = 10_000_000
) -> int:
    """Exact number of homomorphisms from the presented group into `group`.

    Plain nested enumeration over generator images with early relator
    pruning: a relator is checked as soon as its last generator is
    assigned. Deterministic.
    """
    n = pres.generator_count
    if group.order**n > budget:
        raise EnumerationBudgetError(
            f"{group.order}^{n} tuples exceeds budget {budget}"
        )
    by_depth: list[list[Word]] = [[] for _ in range(n + 1)]
    for rel in pres.relators:
        depth = max((g for g, _ in rel), default=0)
        by_depth[depth].append(rel)
    if any(by_depth[0]):
        # Empty relators evaluate to the identity and constrain nothing.
        by_depth[0] = []
    assignment = [group.identity] * (n + 1)

    def extend(k: int) -> int:
        if k > n:
            return 1
        total = 0
        for g in range(group.order):
            assignment[k] = g
            if all(
                group.evaluate(rel, assignment) == group.identity
                for rel in by_depth[k]
            ):
                total += extend(k + 1)
        return total

    return extend(1)
