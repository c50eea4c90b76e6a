"""Automata layer: Thompson NFAs, powerset DFAs, complement, and the
product-traversal inclusion decision procedure.

Transitions are labeled with character *sets*.  Before two automata are
compared, the classes of both are refined into a partition of disjoint
blocks, and DFAs are built over those blocks, so a transition on '\\w' and a
transition on '\\d' line up on the shared block {0..9}.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import frontend
from .errors import AlphabetMismatch, IncompleteAutomaton, MalformedExpression
from .frontend import (
    NormalizedExpr,
    PostfixProgram,
    RawPattern,
    TokenKind,
)

EPS_LABEL = None  # transition label for ε edges


@dataclass(frozen=True)
class Nfa:
    """Thompson NFA: one start state, one accept state, dense int ids."""

    n_states: int
    start: int
    accept: int
    transitions: tuple  # (src, label, dst); label is a frozenset or EPS_LABEL

    @property
    def classes(self) -> set[frozenset]:
        return {label for _, label, _ in self.transitions if label is not EPS_LABEL}

    def chars(self) -> frozenset:
        out = set()
        for cls in self.classes:
            out |= cls
        return frozenset(out)

    def accepts(self, s: str) -> bool:
        """Direct NFA simulation; used for cross-checks, not production."""
        eps = {i: set() for i in range(self.n_states)}
        step = {i: [] for i in range(self.n_states)}
        for src, label, dst in self.transitions:
            if label is EPS_LABEL:
                eps[src].add(dst)
            else:
                step[src].append((label, dst))
        current = _closure({self.start}, eps)
        for c in s:
            nxt = set()
            for q in current:
                for label, dst in step[q]:
                    if c in label:
                        nxt.add(dst)
            current = _closure(nxt, eps)
            if not current:
                return False
        return self.accept in current


def _closure(states, eps):
    out = set(states)
    todo = list(states)
    while todo:
        q = todo.pop()
        for r in eps[q]:
            if r not in out:
                out.add(r)
                todo.append(r)
    return out


@dataclass(frozen=True)
class Dfa:
    n_states: int
    start: int
    accepting: frozenset
    transitions: dict  # (state, block) -> state; block is a frozenset of chars
    alphabet: tuple  # disjoint blocks, sorted by lowest code point
    complete: bool = False
    sink: int | None = None

    def step(self, state, block):
        return self.transitions.get((state, block))

    def accepts(self, s: str) -> bool:
        lookup = {}
        for block in self.alphabet:
            for c in block:
                lookup[c] = block
        state = self.start
        for c in s:
            block = lookup.get(c)
            if block is None:
                return False
            state = self.transitions.get((state, block))
            if state is None:
                return False
        return state in self.accepting


@dataclass(frozen=True)
class InclusionVerdict:
    included: bool
    witness: str | None = None
    flagged_approximate: bool = False

    def __post_init__(self):
        assert (self.witness is not None) == (not self.included)


# ---------------------------------------------------------------------------
# Alphabet partitioning
# ---------------------------------------------------------------------------

def partition_classes(classes) -> tuple:
    """Refine a family of character sets into disjoint blocks covering their
    union.  Every input class is then a union of blocks."""
    blocks: list[frozenset] = []
    for cls in classes:
        rest = set(cls)
        new_blocks = []
        for b in blocks:
            inter = b & cls
            if not inter or inter == b:
                new_blocks.append(b)
            else:
                new_blocks.append(inter)
                new_blocks.append(b - cls)
            rest -= b
        if rest:
            new_blocks.append(frozenset(rest))
        blocks = new_blocks
    return tuple(sorted(blocks, key=lambda b: min(b)))


def pair_alphabet(a: Nfa, b: Nfa) -> tuple:
    """Partition alphabet of a compared pair of expressions."""
    return partition_classes(list(a.classes) + list(b.classes))


# ---------------------------------------------------------------------------
# Thompson construction
# ---------------------------------------------------------------------------

def thompson(prog: PostfixProgram) -> Nfa:
    """Stack evaluation of a postfix program into the four basic fragments.

    Concatenation merges the first fragment's accept state with the second
    fragment's start state; alternation and star add two fresh states each.
    """
    counter = [0]

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    # fragment: (start, accept, transitions list)
    stack = []
    for tok in prog.tokens:
        kind = tok.kind
        if kind is TokenKind.SYMBOL or kind is TokenKind.EPSILON:
            s, e = fresh(), fresh()
            label = tok.chars if kind is TokenKind.SYMBOL else EPS_LABEL
            stack.append((s, e, [(s, label, e)]))
        elif kind is TokenKind.STAR:
            if not stack:
                raise MalformedExpression("star without operand")
            s1, e1, t1 = stack.pop()
            s, e = fresh(), fresh()
            t1 += [(s, EPS_LABEL, s1), (s, EPS_LABEL, e),
                   (e1, EPS_LABEL, s1), (e1, EPS_LABEL, e)]
            stack.append((s, e, t1))
        elif kind is TokenKind.CONCAT:
            if len(stack) < 2:
                raise MalformedExpression("binary operator underflow")
            s2, e2, t2 = stack.pop()
            s1, e1, t1 = stack.pop()
            # Merge e1 with s2 (Thompson concatenation without an ε edge).
            t2 = [(e1 if a == s2 else a, lbl, e1 if b == s2 else b) for a, lbl, b in t2]
            e2 = e1 if e2 == s2 else e2
            stack.append((s1, e2, t1 + t2))
        elif kind is TokenKind.ALT:
            if len(stack) < 2:
                raise MalformedExpression("binary operator underflow")
            s2, e2, t2 = stack.pop()
            s1, e1, t1 = stack.pop()
            s, e = fresh(), fresh()
            trans = t1 + t2 + [(s, EPS_LABEL, s1), (s, EPS_LABEL, s2),
                               (e1, EPS_LABEL, e), (e2, EPS_LABEL, e)]
            stack.append((s, e, trans))
        else:
            raise MalformedExpression("parenthesis in postfix program")
    if len(stack) != 1:
        raise MalformedExpression(f"postfix program leaves {len(stack)} values")
    start, accept, transitions = stack[0]

    # Renumber to dense ids in first-use order.
    ids = {}

    def rid(q):
        if q not in ids:
            ids[q] = len(ids)
        return ids[q]

    rid(start)
    renum = tuple((rid(a), lbl, rid(b)) for a, lbl, b in transitions)
    rid(accept)
    return Nfa(n_states=len(ids), start=ids[start], accept=ids[accept], transitions=renum)


# ---------------------------------------------------------------------------
# Powerset construction
# ---------------------------------------------------------------------------

def powerset(nfa: Nfa, alphabet: tuple | None = None) -> Dfa:
    """Determinize over ε-closure subsets, reachable states only.

    `alphabet` must be a partition refining the NFA's classes; by default the
    NFA's own partition alphabet is used.
    """
    if alphabet is None:
        alphabet = partition_classes(nfa.classes)
    eps = {i: set() for i in range(nfa.n_states)}
    step = {i: [] for i in range(nfa.n_states)}
    for src, label, dst in nfa.transitions:
        if label is EPS_LABEL:
            eps[src].add(dst)
        else:
            for block in alphabet:
                if block <= label:
                    step[src].append((block, dst))
                elif block & label:
                    raise AlphabetMismatch("alphabet does not refine NFA classes")

    start_set = frozenset(_closure({nfa.start}, eps))
    ids = {start_set: 0}
    order = [start_set]
    transitions = {}
    i = 0
    while i < len(order):
        current = order[i]
        i += 1
        by_block: dict = {}
        for q in current:
            for block, dst in step[q]:
                by_block.setdefault(block, set()).add(dst)
        for block in alphabet:
            if block not in by_block:
                continue
            nxt = frozenset(_closure(by_block[block], eps))
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            transitions[(ids[current], block)] = ids[nxt]
    accepting = frozenset(ids[s] for s in order if nfa.accept in s)
    complete = all((q, b) in transitions for q in range(len(order)) for b in alphabet)
    return Dfa(
        n_states=len(order),
        start=0,
        accepting=accepting,
        transitions=transitions,
        alphabet=alphabet,
        complete=complete,
        sink=None,
    )


def complete(dfa: Dfa, sigma: tuple) -> Dfa:
    """Make the transition function total over `sigma` via a non-accepting
    sink.  Idempotent when the DFA is already complete over sigma."""
    sigma = tuple(sorted(set(sigma), key=lambda b: min(b)))
    if not set(dfa.alphabet) <= set(sigma):
        raise AlphabetMismatch("completion alphabet misses symbols used by the DFA")
    missing = [(q, b) for q in range(dfa.n_states) for b in sigma
               if (q, b) not in dfa.transitions]
    if not missing and dfa.alphabet == sigma:
        return replace(dfa, complete=True)
    transitions = dict(dfa.transitions)
    sink = dfa.n_states
    for q, b in missing:
        transitions[(q, b)] = sink
    n = dfa.n_states
    if missing:
        n += 1
        for b in sigma:
            transitions[(sink, b)] = sink
    else:
        sink = dfa.sink
    return Dfa(
        n_states=n,
        start=dfa.start,
        accepting=dfa.accepting,
        transitions=transitions,
        alphabet=sigma,
        complete=True,
        sink=sink,
    )


def complement(dfa: Dfa) -> Dfa:
    """Swap accepting and non-accepting states of a complete DFA."""
    if not dfa.complete:
        raise IncompleteAutomaton("complement requires a complete DFA")
    accepting = frozenset(range(dfa.n_states)) - dfa.accepting
    return replace(dfa, accepting=accepting, sink=None)


# ---------------------------------------------------------------------------
# Inclusion
# ---------------------------------------------------------------------------

def _require_comparable(a: Dfa, b: Dfa):
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch("DFAs are not over the same partition alphabet")
    if not (a.complete and b.complete):
        raise IncompleteAutomaton("inclusion requires complete DFAs")


def _witness_from(pred, pair):
    labels = []
    while pred[pair] is not None:
        pair, block = pred[pair]
        labels.append(min(block))
    return "".join(reversed(labels))


def inclusion(superset_complement: Dfa, candidate: Dfa) -> InclusionVerdict:
    """Optimized product traversal: depth-first over pairs (p, q), failing as
    soon as a reachable pair is accepting in both automata.

    `superset_complement` must already be the complement of the superset DFA.
    A doubly-accepting pair means the candidate accepts a string the superset
    rejects; the traversal path to it is replayed into a witness, one
    representative character (lowest code point) per block.
    """
    _require_comparable(superset_complement, candidate)
    alphabet = superset_complement.alphabet
    start = (superset_complement.start, candidate.start)
    stack = [start]
    pred = {start: None}
    marked = set()
    while stack:
        p, q = stack.pop()
        if (p, q) in marked:
            continue
        marked.add((p, q))
        if p in superset_complement.accepting and q in candidate.accepting:
            return InclusionVerdict(included=False, witness=_witness_from(pred, (p, q)))
        for block in alphabet:
            nxt = (superset_complement.step(p, block), candidate.step(q, block))
            if nxt not in marked:
                if nxt not in pred:
                    pred[nxt] = ((p, q), block)
                stack.append(nxt)
    return InclusionVerdict(included=True)


def inclusion_unoptimized(a1: Dfa, a2: Dfa) -> InclusionVerdict:
    """Reference procedure: complement a1, build the explicit product
    automaton over the full state cross product, and search for a path from
    the start pair to an accepting pair (breadth-first)."""
    _require_comparable(a1, a2)
    comp = complement(a1)
    alphabet = comp.alphabet
    product_states = [(p, q) for p in range(comp.n_states) for q in range(a2.n_states)]
    product_trans = {
        ((p, q), block): (comp.step(p, block), a2.step(q, block))
        for p, q in product_states
        for block in alphabet
    }
    goal = {(p, q) for p, q in product_states
            if p in comp.accepting and q in a2.accepting}
    start = (comp.start, a2.start)
    pred = {start: None}
    queue = [start]
    i = 0
    while i < len(queue):
        pair = queue[i]
        i += 1
        if pair in goal:
            return InclusionVerdict(included=False, witness=_witness_from(pred, pair))
        for block in alphabet:
            nxt = product_trans[(pair, block)]
            if nxt not in pred:
                pred[nxt] = (pair, block)
                queue.append(nxt)
    return InclusionVerdict(included=True)


def alphabet_subset(candidate: Nfa, superset: Nfa) -> bool:
    """Σ precondition: every character the candidate can match must be
    matchable by the superset."""
    return candidate.chars() <= superset.chars()


# ---------------------------------------------------------------------------
# Pattern-level pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompiledPattern:
    """A pattern carried through parse → postfix → NFA once; DFAs are built
    per comparison because they depend on the pair's partition alphabet."""

    pattern: str
    expr: NormalizedExpr
    postfix: PostfixProgram
    nfa: Nfa

    @property
    def approximate(self):
        return self.expr.approximate


def compile_pattern(pattern: str | RawPattern) -> CompiledPattern:
    text = pattern.text if isinstance(pattern, RawPattern) else pattern
    expr = frontend.parse(text)
    postfix = frontend.to_postfix(expr)
    return CompiledPattern(pattern=text, expr=expr, postfix=postfix, nfa=thompson(postfix))


def compile_postfix(prog: PostfixProgram) -> CompiledPattern:
    expr = NormalizedExpr(tokens=prog.tokens, approximate=False, stripped_features=())
    return CompiledPattern(pattern=str(prog), expr=expr, postfix=prog, nfa=thompson(prog))


def _foreign_witness(candidate: Nfa, allowed: frozenset) -> str:
    """Shortest string accepted by the candidate that uses a character the
    superset cannot match.  Thompson fragments are trim, so one exists
    whenever the Σ gate fails."""
    alphabet = partition_classes(candidate.classes)
    dfa = powerset(candidate, alphabet)
    # BFS over (state, seen-foreign-char) pairs.
    start = (dfa.start, False)
    pred = {start: None}
    queue = [start]
    i = 0
    while i < len(queue):
        state, seen = queue[i]
        i += 1
        if seen and state in dfa.accepting:
            labels = []
            node = (state, seen)
            while pred[node] is not None:
                node, c = pred[node]
                labels.append(c)
            return "".join(reversed(labels))
        for block in alphabet:
            nxt_state = dfa.step(state, block)
            if nxt_state is None:
                continue
            foreign = block - allowed
            # Prefer a foreign representative when the block offers one.
            for use_foreign in (True, False):
                chars = foreign if use_foreign else (block & allowed)
                if not chars:
                    continue
                nxt = (nxt_state, seen or use_foreign)
                if nxt not in pred:
                    pred[nxt] = ((state, seen), min(chars))
                    queue.append(nxt)
    raise AssertionError("Σ gate failed but no witness found in a trim NFA")


def decide_inclusion(superset: CompiledPattern, candidate: CompiledPattern,
                     use_reference: bool = False) -> InclusionVerdict:
    """Full decision: Σ gate, pair partition, completion, complement, product
    traversal.  `use_reference` switches to the unoptimized procedure."""
    flagged = superset.approximate or candidate.approximate
    if not alphabet_subset(candidate.nfa, superset.nfa):
        witness = _foreign_witness(candidate.nfa, superset.nfa.chars())
        return InclusionVerdict(included=False, witness=witness, flagged_approximate=flagged)
    sigma = pair_alphabet(superset.nfa, candidate.nfa)
    sup_dfa = complete(powerset(superset.nfa, sigma), sigma)
    cand_dfa = complete(powerset(candidate.nfa, sigma), sigma)
    if use_reference:
        verdict = inclusion_unoptimized(sup_dfa, cand_dfa)
    else:
        verdict = inclusion(complement(sup_dfa), cand_dfa)
    return replace(verdict, flagged_approximate=flagged)


def check_inclusion(superset: str, candidate: str, use_reference: bool = False) -> InclusionVerdict:
    """Convenience wrapper over raw pattern strings: is L(candidate) ⊆
    L(superset)?"""
    return decide_inclusion(compile_pattern(superset), compile_pattern(candidate),
                            use_reference=use_reference)


# ---------------------------------------------------------------------------
# GraphViz dumps
# ---------------------------------------------------------------------------

def nfa_to_dot(nfa: Nfa, name="nfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  hidden [shape=none label=""];']
    for q in range(nfa.n_states):
        shape = "doublecircle" if q == nfa.accept else "circle"
        lines.append(f"  {q} [shape={shape}];")
    lines.append(f"  hidden -> {nfa.start};")
    for src, label, dst in nfa.transitions:
        text = "eps" if label is EPS_LABEL else frontend.format_charset(label)
        lines.append(f'  {src} -> {dst} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines)


def dfa_to_dot(dfa: Dfa, name="dfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  hidden [shape=none label=""];']
    for q in range(dfa.n_states):
        shape = "doublecircle" if q in dfa.accepting else "circle"
        lines.append(f"  {q} [shape={shape}];")
    lines.append(f"  hidden -> {dfa.start};")
    for (src, block), dst in sorted(dfa.transitions.items(), key=lambda kv: (kv[0][0], min(kv[0][1]))):
        lines.append(f'  {src} -> {dst} [label="{frontend.format_charset(block)}"];')
    lines.append("}")
    return "\n".join(lines)
