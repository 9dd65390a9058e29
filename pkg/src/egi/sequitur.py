"""Sequitur grammar induction over numerosity-reduced SAX tokens.

Digram matching uses the word only; offsets are payload and are recovered
after induction by walking the parse tree of ``R0``, so every terminal keeps
the offset of the input token it stands for.
"""

from __future__ import annotations

import gc
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Union

from .discretize import Token, TokenSequence

Symbol = Union[str, int]  # terminal word or rule id


class _Symbol:
    __slots__ = ("prev", "next", "value", "rule")

    def __init__(self, value):
        # value: str (terminal), _Rule (non-terminal) or None (guard)
        self.value = value
        self.prev = None
        self.next = None
        self.rule = None


class _Rule:
    __slots__ = ("guard", "count", "uid")

    def __init__(self, uid: int):
        g = _Symbol(None)
        g.rule = self
        g.prev = g.next = g
        self.guard = g
        self.count = 0
        self.uid = uid

    @property
    def first(self) -> _Symbol:
        return self.guard.next

    @property
    def last(self) -> _Symbol:
        return self.guard.prev

    def body(self):
        s = self.guard.next
        while s is not self.guard:
            yield s
            s = s.next


class _Inducer:
    def __init__(self):
        self.digrams: dict[tuple, _Symbol] = {}
        self._rules: list[_Rule] = []
        self.start = self._new_rule()

    def _new_rule(self) -> _Rule:
        r = _Rule(len(self._rules))
        self._rules.append(r)
        return r

    def dispose(self) -> None:
        """Unlink every node so reference counting frees the structure."""
        self.digrams.clear()
        for r in self._rules:
            s = r.guard.next
            while s is not None and s is not r.guard:
                s.prev, s = None, s.next
            r.guard.next = r.guard.prev = r.guard.rule = None
        self._rules.clear()

    @staticmethod
    def _symbol(value) -> _Symbol:
        s = _Symbol(value)
        if isinstance(value, _Rule):
            value.count += 1
        return s

    # linked-list plumbing -------------------------------------------------

    def _delete_digram(self, s: _Symbol) -> None:
        nxt = s.next
        if s.value is None or nxt is None or nxt.value is None:
            return
        key = (s.value, nxt.value)
        if self.digrams.get(key) is s:
            del self.digrams[key]

    def _join(self, left: _Symbol, right: _Symbol) -> None:
        if left.next is not None:
            self._delete_digram(left)
            # overlapping triples (x x x): only one of the two digrams is
            # indexed, so re-register the survivor when its twin goes away
            rp, rn = right.prev, right.next
            if (rp is not None and rn is not None and right.value is not None
                    and right.value == rp.value and right.value == rn.value):
                self.digrams[(right.value, rn.value)] = right
            lp, ln = left.prev, left.next
            if (lp is not None and ln is not None and left.value is not None
                    and left.value == ln.value and left.value == lp.value):
                self.digrams[(lp.value, left.value)] = lp
        left.next = right
        right.prev = left

    def _insert_after(self, left: _Symbol, s: _Symbol) -> None:
        self._join(s, left.next)
        self._join(left, s)

    def _remove(self, s: _Symbol) -> None:
        self._join(s.prev, s.next)
        self._delete_digram(s)
        if isinstance(s.value, _Rule):
            s.value.count -= 1
        s.prev = s.next = None

    # the algorithm ---------------------------------------------------------

    def push(self, word: str) -> None:
        tail = self.start.last
        self._insert_after(tail, self._symbol(word))
        self._check(self.start.last.prev)

    def _check(self, s: _Symbol) -> bool:
        nxt = s.next
        if nxt is None or s.value is None or nxt.value is None:
            return False
        key = (s.value, nxt.value)
        m = self.digrams.get(key)
        if m is None or m.next is None or (m.value, m.next.value) != key:
            self.digrams[key] = s
            return False
        if m is s:
            return False
        if m.next is not s and s.next is not m:
            self._match(s, m)
        return True

    def _match(self, s: _Symbol, m: _Symbol) -> None:
        if (m.prev.value is None and m.next.next.value is None
                and m.prev.rule is not self.start):
            r = m.prev.rule
            self._substitute(s, r)
        else:
            r = self._new_rule()
            self._insert_after(r.last, self._symbol(s.value))
            self._insert_after(r.last, self._symbol(s.next.value))
            self._substitute(m, r)
            self._substitute(s, r)
            self.digrams[(r.first.value, r.first.next.value)] = r.first
        # rule utility: both ends of the matched digram may now be used once
        for end in ("first", "last"):
            sym = getattr(r, end)
            if isinstance(sym.value, _Rule) and sym.value.count == 1:
                self._expand(sym)

    def _substitute(self, s: _Symbol, r: _Rule) -> None:
        q = s.prev
        self._remove(q.next)
        self._remove(q.next)
        self._insert_after(q, self._symbol(r))
        if not self._check(q):
            self._check(q.next)

    def _expand(self, s: _Symbol) -> None:
        """Inline the body of a rule referenced only by ``s``."""
        left, right = s.prev, s.next
        r: _Rule = s.value
        first, last = r.first, r.last
        self._delete_digram(s)
        # retire the rule: empty body, no references
        r.guard.next = r.guard.prev = r.guard
        r.count = 0
        s.prev = s.next = None
        self._join(left, first)
        self._join(last, right)
        if not self._check(left):
            self._check(last)

    def live_rules(self) -> list[_Rule]:
        seen = {self.start.uid: self.start}
        stack = [self.start]
        while stack:
            rule = stack.pop()
            for sym in rule.body():
                if isinstance(sym.value, _Rule) and sym.value.uid not in seen:
                    seen[sym.value.uid] = sym.value
                    stack.append(sym.value)
        return [seen[k] for k in sorted(seen)]


@dataclass(frozen=True)
class Grammar:
    """Induced grammar.

    ``rules`` maps ids ``1..k`` to bodies whose symbols are terminal words
    (``str``) or rule ids (``int``). ``top`` is the compressed ``R0`` with
    terminals as :class:`Token`. ``occurrences`` lists every use of a rule,
    including nested ones, as ``(first_offset, last_offset + 1)`` in window
    index space.
    """

    rules: dict[int, tuple[Symbol, ...]]
    top: tuple[Token | int, ...]
    tokens: TokenSequence
    occurrences: dict[int, list[tuple[int, int]]]

    def body(self, rule: int) -> tuple[Symbol, ...]:
        if rule == 0:
            return tuple(s if isinstance(s, int) else s.word for s in self.top)
        try:
            return self.rules[rule]
        except KeyError:
            raise KeyError(f"unknown rule R{rule}") from None

    @property
    def size(self) -> int:
        """Total symbols across R0 and every rule body."""
        return len(self.top) + sum(len(b) for b in self.rules.values())

    def to_text(self) -> str:
        def fmt(sym) -> str:
            if isinstance(sym, int):
                return f"R{sym}"
            if isinstance(sym, Token):
                return f"{sym.word}_{sym.offset}"
            return sym

        lines = ["R0 -> " + ",".join(fmt(s) for s in self.top)]
        for rid in sorted(self.rules):
            lines.append(f"R{rid} -> " + ",".join(fmt(s) for s in self.rules[rid]))
        return "\n".join(lines)


@contextmanager
def gc_paused():
    """Suspend cyclic garbage collection.

    Induction allocates many small linked nodes; generational passes over a
    large heap would make long runs superlinear. The inducer unlinks its own
    cycles, so nothing is left for the collector.
    """
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def induce(tokens: TokenSequence | list[Token]) -> Grammar:
    """Run Sequitur over ``tokens`` in one left-to-right pass."""
    if not isinstance(tokens, TokenSequence):
        tokens = TokenSequence.from_tokens(tokens)
    if len(tokens) == 0:
        raise ValueError("cannot induce a grammar from an empty token sequence")

    inducer = _Inducer()
    with gc_paused():
        for word in tokens.words:
            inducer.push(word)

    live = inducer.live_rules()
    ids = {r.uid: i for i, r in enumerate(live)}  # R0 keeps id 0

    def conv(sym: _Symbol) -> Symbol:
        return ids[sym.value.uid] if isinstance(sym.value, _Rule) else sym.value

    rules = {ids[r.uid]: tuple(conv(s) for s in r.body()) for r in live[1:]}
    top_syms = [conv(s) for s in inducer.start.body()]
    inducer.dispose()

    length = _expanded_lengths(rules)
    # nonterminal children of each rule with their position inside its expansion
    children: dict[int, list[tuple[int, int]]] = {}
    for rid, body in rules.items():
        kids, p = [], 0
        for sym in body:
            if isinstance(sym, int):
                kids.append((sym, p))
                p += length[sym]
            else:
                p += 1
        children[rid] = kids

    offsets = tokens.offsets
    occurrences: dict[int, list[tuple[int, int]]] = {rid: [] for rid in rules}
    top: list[Token | int] = []
    stack: list[tuple[int, int]] = []
    pos = 0
    for sym in top_syms:
        if isinstance(sym, str):
            top.append(Token(sym, offsets[pos]))
            pos += 1
        else:
            top.append(sym)
            stack.append((sym, pos))
            pos += length[sym]
    assert pos == len(tokens), "grammar does not expand to its input"
    while stack:
        rid, p = stack.pop()
        occurrences[rid].append((offsets[p], offsets[p + length[rid] - 1] + 1))
        stack.extend((c, p + rel) for c, rel in children[rid])
    for occ in occurrences.values():
        occ.sort()
    return Grammar(rules, tuple(top), tokens, occurrences)


def _expanded_lengths(rules: dict[int, tuple[Symbol, ...]]) -> dict[int, int]:
    """Terminal count of every rule's full expansion, without recursion."""
    length: dict[int, int] = {}
    for root in rules:
        stack = [root]
        while stack:
            rid = stack[-1]
            if rid in length:
                stack.pop()
                continue
            pending = [c for c in rules[rid] if isinstance(c, int) and c not in length]
            if pending:
                stack.extend(pending)
            else:
                length[rid] = sum(length[c] if isinstance(c, int) else 1 for c in rules[rid])
                stack.pop()
    return length


def expand(grammar: Grammar, rule: int) -> list[str]:
    """Fully expand a rule (``0`` for the top-level sequence) to terminal words."""
    out: list[str] = []
    stack = [iter(grammar.body(rule))]
    while stack:
        sym = next(stack[-1], None)
        if sym is None:
            stack.pop()
        elif isinstance(sym, int):
            stack.append(iter(grammar.body(sym)))
        else:
            out.append(sym)
    return out


def rule_spans(grammar: Grammar, n: int, total_windows: int | None = None) -> list[tuple[int, int, int]]:
    """Time-point span ``[start, end)`` of every rule occurrence, R0 excluded.

    An occurrence covering windows ``first .. last`` spans points
    ``[first, last + n)``.
    """
    limit = None if total_windows is None else total_windows - 1 + n
    spans = []
    for rid in sorted(grammar.occurrences):
        for first, stop in grammar.occurrences[rid]:
            end = stop - 1 + n
            if limit is not None:
                end = min(end, limit)
            spans.append((rid, first, end))
    return spans
