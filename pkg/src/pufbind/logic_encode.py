"""Encode a table of parameter triples as Boolean sum-of-products expressions.

The pipeline: fix a bit width for parameter values (build_tobin), carve the
space of k-bit assignments into one class per table row (build_partition),
turn the classes into a pair of truth tables (derive_truth_tables) where
the second table reroutes some classes to a designated suboptimal row,
synthesize one SOP expression per output bit (synthesize_sop), and shrink
them (minimize).  Expressions have a canonical text form; equality of the
canonical text is what the recovery path hashes and checks.

Conventions: an assignment is an int whose k-bit big-endian expansion is
(a_0 .. a_{k-1}) with a_j feeding variable x_j; an output word is an int
whose width-bit big-endian expansion is (b_0 .. b_{width-1}).
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from random import Random

from .bitops import derive_seed
from .errors import CapacityError, ParameterError

MAX_VARS = 20
EXACT_MINIMIZE_MAX_VARS = 12


# ---------------------------------------------------------------------------
# parameter tables and value encoding


@dataclass(frozen=True)
class ParamTable:
    """Row 0 is the preferred triple; rows 1..m are the alternatives."""

    triples: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        triples = tuple(tuple(t) for t in self.triples)
        object.__setattr__(self, "triples", triples)
        if any(len(t) != 3 for t in triples):
            raise ParameterError("every row must hold exactly three values")
        if self.m <= 2:
            raise ParameterError("need more than two alternative rows")
        if triples[0] in triples[1:]:
            raise ParameterError("row 0 must not repeat among the alternatives")

    @property
    def m(self) -> int:
        return len(self.triples) - 1


def _as_int(v):
    if isinstance(v, bool):
        return None
    if isinstance(v, int):
        return v
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return None


@dataclass(frozen=True)
class ToBinTable:
    """Total bijection-plus-padding between values and n-bit codes.

    Integer mode encodes a value as its own binary expansion; index mode
    numbers the distinct values in first-appearance order.  Either way the
    decode direction is total: codes outside the used set map to
    themselves (integer mode) or to the raw index (index mode).
    """

    n: int
    mode: str  # "integer" | "index"
    values: tuple = ()

    def encode_value(self, v) -> int:
        if self.mode == "integer":
            iv = _as_int(v)
            if iv is None or not 0 <= iv < (1 << self.n):
                raise ParameterError(f"value {v!r} not encodable in integer mode")
            return iv
        try:
            return self.values.index(v)
        except ValueError:
            raise ParameterError(f"value {v!r} unknown to this encoding") from None

    def decode_value(self, code: int):
        if not 0 <= code < (1 << self.n):
            raise ParameterError(f"code {code} out of range for n={self.n}")
        if self.mode == "integer":
            return code
        if code < len(self.values):
            return self.values[code]
        return code  # padding code: decoded as its raw index

    def encode_triple(self, triple) -> int:
        out = 0
        for v in triple:
            out = (out << self.n) | self.encode_value(v)
        return out

    def decode_triple(self, word: int) -> tuple:
        mask = (1 << self.n) - 1
        parts = [(word >> (2 * self.n)) & mask, (word >> self.n) & mask, word & mask]
        return tuple(self.decode_value(p) for p in parts)


def build_tobin(table: ParamTable, n: int | None = None) -> ToBinTable:
    values = []
    for t in table.triples:
        for v in t:
            if v not in values:
                values.append(v)
    if n is None:
        n = max(4, int(math.floor(math.log2(len(values)))) + 1)
    if n < 1:
        raise ParameterError("n must be positive")
    ints = [_as_int(v) for v in values]
    if all(iv is not None and 0 <= iv < (1 << n) for iv in ints):
        return ToBinTable(n=n, mode="integer")
    if len(values) > (1 << n):
        raise ParameterError(f"{len(values)} distinct values exceed 2^{n} codes")
    return ToBinTable(n=n, mode="index", values=tuple(values))


def tobin_to_dict(tb: ToBinTable) -> dict:
    doc = {"mode": tb.mode, "bits": tb.n}
    if tb.mode == "index":
        doc["values"] = list(tb.values)
    return doc


def tobin_from_dict(doc: dict) -> ToBinTable:
    return ToBinTable(
        n=doc["bits"], mode=doc["mode"], values=tuple(doc.get("values", ()))
    )


# ---------------------------------------------------------------------------
# assignment partitions


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty classes covering all k-bit assignments."""

    k: int
    classes: tuple[frozenset, ...]

    def __post_init__(self):
        total = 1 << self.k
        seen = set()
        for cls in self.classes:
            if not cls:
                raise ParameterError("every class must be nonempty")
            if seen & cls:
                raise ParameterError("classes must be disjoint")
            seen |= cls
        if len(seen) != total or any(not 0 <= a < total for a in seen):
            raise ParameterError("classes must cover exactly the k-bit space")

    @property
    def m(self) -> int:
        return len(self.classes) - 1

    def class_of(self, assignment: int) -> int:
        for i, cls in enumerate(self.classes):
            if assignment in cls:
                return i
        raise ParameterError(f"assignment {assignment} outside the partition")


def build_partition(k: int, m: int, r: int, seed: int = 0) -> Partition:
    """Seeded shuffle plus round-robin deal; r lands in class 0.

    The deal treats r as class 0's first card, so the class sizes stay as
    even as the count allows.
    """
    if m <= 2:
        raise ParameterError("need more than two alternative classes")
    if k > MAX_VARS:
        raise CapacityError(f"k={k} beyond supported width {MAX_VARS}")
    min_k = int(math.floor(math.log2(m + 1))) + 1
    if (1 << k) < m + 1 or k < min_k:
        raise CapacityError(f"k={k} too small for {m + 1} classes (need k >= {min_k})")
    if not 0 <= r < (1 << k):
        raise ParameterError("r must be a k-bit assignment")
    others = [a for a in range(1 << k) if a != r]
    Random(derive_seed("partition", seed)).shuffle(others)
    buckets: list[list[int]] = [[] for _ in range(m + 1)]
    buckets[0].append(r)
    for j, a in enumerate(others):
        buckets[(j + 1) % (m + 1)].append(a)
    return Partition(k=k, classes=tuple(frozenset(b) for b in buckets))


# ---------------------------------------------------------------------------
# truth tables


@dataclass
class TruthTable:
    k: int
    width: int
    values: list[int]  # length 2^k, each an output word


@dataclass
class TruthTables:
    f: TruthTable
    f_prime: TruthTable


def derive_truth_tables(
    table: ParamTable,
    part: Partition,
    tb: ToBinTable,
    c: int,
    keep: str = "low",
) -> TruthTables:
    """Map every assignment to its class's triple (f) and to the fallback
    variant (f_prime) in which some classes are rerouted to triple c.

    keep="low" leaves classes 1..c intact and reroutes the rest, so a
    fallback evaluation can only yield triples 1..c.  keep="high" leaves
    classes c..m intact and reroutes classes 0..c-1, yielding triples
    c..m.  Class 0 is rerouted either way: the fallback never returns the
    preferred triple.
    """
    m = table.m
    if part.m != m:
        raise ParameterError("partition and table disagree on m")
    if not 1 < c <= m:
        raise ParameterError(f"c must lie in (1, {m}], got {c}")
    if keep not in ("low", "high"):
        raise ParameterError("keep must be 'low' or 'high'")
    width = 3 * tb.n
    codes = [tb.encode_triple(t) for t in table.triples]
    kept = range(1, c + 1) if keep == "low" else range(c, m + 1)

    f = [0] * (1 << part.k)
    fp = [0] * (1 << part.k)
    for i, cls in enumerate(part.classes):
        word = codes[i]
        word_p = word if i in kept else codes[c]
        for a in cls:
            f[a] = word
            fp[a] = word_p
    return TruthTables(
        f=TruthTable(k=part.k, width=width, values=f),
        f_prime=TruthTable(k=part.k, width=width, values=fp),
    )


# ---------------------------------------------------------------------------
# SOP expressions


@dataclass(frozen=True)
class Term:
    """Product of literals: variable x_j participates when care bit
    (k-1-j) is set; its polarity is the matching value bit."""

    care: int
    value: int


@dataclass(frozen=True)
class SopExprList:
    num_vars: int
    exprs: tuple[tuple[Term, ...], ...]


def term_text(term: Term, num_vars: int) -> str:
    if term.care == 0:
        return "1"
    lits = []
    for j in range(num_vars):
        bit = 1 << (num_vars - 1 - j)
        if term.care & bit:
            lits.append(f"x{j}" if term.value & bit else f"~x{j}")
    return "".join(lits)


def make_exprs(num_vars: int, exprs) -> SopExprList:
    """Normalize: dedupe terms and sort them by their text form."""
    if not 1 <= num_vars <= MAX_VARS:
        raise ParameterError(f"num_vars must lie in [1, {MAX_VARS}]")
    full = (1 << num_vars) - 1
    norm = []
    for terms in exprs:
        cleaned = set()
        for t in terms:
            if t.care & ~full or t.value & ~t.care:
                raise ParameterError(f"term {t} malformed for {num_vars} variables")
            cleaned.add(t)
        norm.append(tuple(sorted(cleaned, key=lambda t: term_text(t, num_vars))))
    return SopExprList(num_vars=num_vars, exprs=tuple(norm))


def synthesize_sop(t: TruthTable) -> SopExprList:
    """One expression per output bit: the sum of that bit's full minterms."""
    if t.k > MAX_VARS:
        raise CapacityError(f"k={t.k} beyond supported width {MAX_VARS}")
    full = (1 << t.k) - 1
    top = 1 << (t.width - 1)
    exprs: list[list[Term]] = [[] for _ in range(t.width)]
    for a, word in enumerate(t.values):
        for i in range(t.width):
            if word & (top >> i):
                exprs[i].append(Term(full, a))
    return make_exprs(t.k, exprs)


def eval_exprs(exprs: SopExprList, assignment: int) -> int:
    """Output word for one assignment (bit i set iff expression i fires)."""
    if not 0 <= assignment < (1 << exprs.num_vars):
        raise ParameterError(
            f"assignment must be a {exprs.num_vars}-bit value, got {assignment}"
        )
    out = 0
    for terms in exprs.exprs:
        out <<= 1
        if any((assignment & t.care) == t.value for t in terms):
            out |= 1
    return out


def literal_count(exprs: SopExprList) -> int:
    return sum(t.care.bit_count() for terms in exprs.exprs for t in terms)


def canonical_text(exprs: SopExprList) -> str:
    """Expressions joined by ';', terms by '+', a constant-false one is '0'."""
    parts = []
    for terms in exprs.exprs:
        if not terms:
            parts.append("0")
        else:
            parts.append("+".join(term_text(t, exprs.num_vars) for t in terms))
    return ";".join(parts)


def hash_exprs(exprs: SopExprList) -> bytes:
    return hashlib.sha256(canonical_text(exprs).encode()).digest()


_LIT_RE = re.compile(r"(~?)x(\d+)")


def parse_exprs(text: str, num_vars: int) -> SopExprList:
    """Inverse of canonical_text; raises ParameterError on anything off."""
    exprs = []
    for part in text.split(";"):
        if part == "0":
            exprs.append(())
            continue
        terms = []
        for term_str in part.split("+"):
            if term_str == "1":
                terms.append(Term(0, 0))
                continue
            care = value = 0
            pos = 0
            for match in _LIT_RE.finditer(term_str):
                if match.start() != pos:
                    raise ParameterError(f"cannot parse term {term_str!r}")
                pos = match.end()
                j = int(match.group(2))
                if j >= num_vars:
                    raise ParameterError(f"variable x{j} out of range")
                bit = 1 << (num_vars - 1 - j)
                if care & bit:
                    raise ParameterError(f"variable x{j} repeats in {term_str!r}")
                care |= bit
                if not match.group(1):
                    value |= bit
            if pos != len(term_str) or care == 0:
                raise ParameterError(f"cannot parse term {term_str!r}")
            terms.append(Term(care, value))
        exprs.append(terms)
    return make_exprs(num_vars, exprs)


# ---------------------------------------------------------------------------
# minimization


def _cover_set(term: Term, full: int):
    """All minterms a term covers (iterates subsets of the dash mask)."""
    dash = full & ~term.care
    s = dash
    while True:
        yield term.value | s
        if s == 0:
            break
        s = (s - 1) & dash


def _on_set(terms, full: int) -> set[int]:
    on = set()
    for t in terms:
        on.update(_cover_set(t, full))
    return on


def _prime_implicants(k: int, on_set: set[int]) -> list[tuple[int, int]]:
    """Quine-McCluskey merge; cubes are (value, dash) with dashed bits 0."""
    cur: dict[tuple[int, int], set[int]] = defaultdict(set)
    for m in on_set:
        cur[(0, m.bit_count())].add(m)
    primes = []
    while cur:
        nxt: dict[tuple[int, int], set[int]] = defaultdict(set)
        used = set()
        for (dash, ones), vals in cur.items():
            partner = cur.get((dash, ones + 1))
            if not partner:
                continue
            for v in vals:
                for j in range(k):
                    bit = 1 << j
                    if dash & bit or v & bit:
                        continue
                    if (v | bit) in partner:
                        nxt[(dash | bit, ones)].add(v)
                        used.add((v, dash))
                        used.add((v | bit, dash))
        for (dash, ones), vals in cur.items():
            for v in vals:
                if (v, dash) not in used:
                    primes.append((v, dash))
        cur = nxt
    return primes


def _greedy_cover(primes, on_set: set[int]) -> list[tuple[int, int]]:
    on_mask = 0
    for m in on_set:
        on_mask |= 1 << m
    entries = []
    for v, dash in primes:
        cov = 0
        s = dash
        while True:
            cov |= 1 << (v | s)
            if s == 0:
                break
            s = (s - 1) & dash
        entries.append((cov, v, dash))
    # big cubes first; (value, dash) breaks ties deterministically
    entries.sort(key=lambda e: (-e[0].bit_count(), e[1], e[2]))

    chosen = []
    uncovered = on_mask
    while uncovered:
        best = None
        best_n = 0
        live = []
        for e in entries:
            n = (e[0] & uncovered).bit_count()
            if n:
                live.append(e)
                if n > best_n:
                    best, best_n = e, n
        chosen.append(best)
        uncovered &= ~best[0]
        entries = live
    return chosen


def _redundancy_prune(chosen, on_mask: int):
    keep = list(chosen)
    changed = True
    while changed:
        changed = False
        for i in range(len(keep) - 1, -1, -1):
            others = 0
            for j, e in enumerate(keep):
                if j != i:
                    others |= e[0]
            if (on_mask & ~others) == 0 and len(keep) > 1:
                del keep[i]
                changed = True
                break
    return keep


def _minimize_exact(k: int, on_set: set[int]) -> list[Term]:
    full = (1 << k) - 1
    primes = _prime_implicants(k, on_set)
    on_mask = 0
    for m in on_set:
        on_mask |= 1 << m
    chosen = _greedy_cover(primes, on_set)
    chosen = _redundancy_prune(chosen, on_mask)
    return [Term(full & ~dash, v) for _, v, dash in chosen]


def _expand_terms(k: int, terms, on_set: set[int]) -> list[Term]:
    full = (1 << k) - 1
    expanded = []
    seen = set()
    for t in terms:
        care, value = t.care, t.value
        for j in range(k):
            bit = 1 << j
            if not care & bit:
                continue
            cand = Term(care & ~bit, value & ~bit)
            if all(m in on_set for m in _cover_set(cand, full)):
                care, value = cand.care, cand.value
        cube = (value, care)
        if cube not in seen:
            seen.add(cube)
            expanded.append(Term(care, value))
    return expanded


def _minimize_heuristic(k: int, terms, on_set: set[int]) -> list[Term]:
    """Iterated expand/reduce for widths past the exact cutoff."""
    full = (1 << k) - 1
    on_mask = 0
    for m in on_set:
        on_mask |= 1 << m
    best = list(terms)
    current = list(terms)
    for _ in range(2):
        current = _expand_terms(k, current, on_set)
        entries = [(sum(1 << m for m in _cover_set(t, full)), t.value, full & ~t.care) for t in current]
        entries.sort(key=lambda e: (-e[0].bit_count(), e[1], e[2]))
        chosen = []
        uncovered = on_mask
        for e in entries:
            if e[0] & uncovered:
                chosen.append(e)
                uncovered &= ~e[0]
        chosen = _redundancy_prune(chosen, on_mask)
        current = [Term(full & ~dash, v) for _, v, dash in chosen]
        if _count(current) < _count(best):
            best = list(current)
    return best


def _count(terms) -> int:
    return sum(t.care.bit_count() for t in terms)


def minimize(exprs: SopExprList) -> SopExprList:
    """Shrink every expression; the result stays truth-table-equal and
    never carries more literals than the input."""
    k = exprs.num_vars
    full = (1 << k) - 1
    out = []
    for terms in exprs.exprs:
        if not terms:
            out.append(())
            continue
        on = _on_set(terms, full)
        if len(on) == (1 << k):
            candidate = [Term(0, 0)]
        elif k <= EXACT_MINIMIZE_MAX_VARS:
            candidate = _minimize_exact(k, on)
        else:
            candidate = _minimize_heuristic(k, terms, on)
        if _count(candidate) > _count(terms):
            candidate = list(terms)
        out.append(candidate)
    return make_exprs(k, out)
