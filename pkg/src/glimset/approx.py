"""Round-based enumeration of mixing SFT approximations.

Total computable predicates presenting a Pi-0-2 subshift (with a Pi-0-1
subsystem) or a Delta-0-2 subshift are turned into streams of mixing
SFT approximations: triples (X_m, Y_m, w_m) in the Pi-0-2 case, pairs
(X_m, w_m) in the Delta-0-2 case.  The enumeration algorithms are
round-based and deterministic; a round budget truncates the infinite
stream at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Union

from .sft import Sft, is_mixing, mixing_distance
from .words import Alphabet, Word

__all__ = [
    "Pi02Spec",
    "Delta02Spec",
    "ApproxTriple",
    "pi02_enumerate",
    "delta02_enumerate",
    "delta02_predicate",
    "slowdown",
    "builtin_pi02",
    "builtin_delta02",
    "BUILTIN_SPECS",
]


@dataclass(frozen=True)
class Pi02Spec:
    """Predicates presenting a Pi-0-2 subshift X with a Pi-0-1 subsystem Y.

    Parameters
    ----------
    phi_x : callable (Word, k, l) -> bool
        L(X) = { w : for all k there is l with phi_x(w, k, l) }.
    phi_y : callable (Word, k) -> bool
        L(Y) = { w : phi_y(w, k) for all k }.
    alphabet : Alphabet

    Both predicates must be total and deterministic.  phi_y must carve
    out a nonempty subshift; rejecting the empty word is reported as an
    error during enumeration.
    """

    phi_x: Callable[[Word, int, int], bool]
    phi_y: Callable[[Word, int], bool]
    alphabet: Alphabet


@dataclass(frozen=True)
class Delta02Spec:
    """Two predicate presentations of the same Delta-0-2 subshift X.

    phi_plus presents it as a Pi-0-2 set and phi_minus presents the
    complement of L(X) the same way:

    L(X) = { w : for all k there is l with phi_plus(w, k, l) }
         = { w : there is k such that phi_minus(w, k, l) fails for all l }.
    """

    phi_plus: Callable[[Word, int, int], bool]
    phi_minus: Callable[[Word, int, int], bool]
    alphabet: Alphabet


@dataclass(frozen=True)
class ApproxTriple:
    """One emitted approximation stage.

    Fields
    ------
    X : Sft
        A mixing SFT approximation.
    Y : Sft or None
        A nonincreasing SFT over-approximation of the subsystem
        (absent in the Delta-0-2 stream).
    w : Word
        A word of L(X) highlighted at this stage.
    m : int
        Emission index within the run.
    window, mixing_dist : int
        Recorded size data of X.
    """

    X: Sft
    Y: Optional[Sft]
    w: Word
    m: int
    window: int
    mixing_dist: int

    @property
    def scale(self) -> int:
        """max(window, mixing distance, |w|), the stage's size."""
        return max(self.window, self.mixing_dist, len(self.w))


# ---------------------------------------------------------------------
# shared plumbing: word streams and memoized SFT queries
# ---------------------------------------------------------------------


def _word_stream(alphabet: Alphabet) -> Iterator[Word]:
    """All words in length order, lexicographic within a length."""
    for n in itertools.count():
        for tup in itertools.product(alphabet.symbols, repeat=n):
            yield Word(alphabet, tup)


_words_upto_cache: dict = {}


def _words_upto(alphabet: Alphabet, p: int) -> list:
    key = (alphabet, p)
    if key not in _words_upto_cache:
        out = []
        for n in range(p + 1):
            for tup in itertools.product(alphabet.symbols, repeat=n):
                out.append(Word(alphabet, tup))
        _words_upto_cache[key] = out
    return _words_upto_cache[key]


_sft_pool: dict = {}
_mixing_cache: dict = {}
_mixdist_cache: dict = {}
_lang_cache: dict = {}


def _pooled_sft(alphabet: Alphabet, forbidden, window=None) -> Sft:
    X = Sft(alphabet, forbidden, window=window)
    return _sft_pool.setdefault(X, X)


def _mixing(X: Sft) -> bool:
    if X not in _mixing_cache:
        _mixing_cache[X] = is_mixing(X)
    return _mixing_cache[X]


def _mixdist(X: Sft) -> int:
    if X not in _mixdist_cache:
        _mixdist_cache[X] = mixing_distance(X)
    return _mixdist_cache[X]


def _language(X: Sft, n: int) -> frozenset:
    key = (X, n)
    if key not in _lang_cache:
        _lang_cache[key] = frozenset(X.language(n))
    return _lang_cache[key]


def _subshift_leq(Y: Sft, X: Sft) -> bool:
    """Y a subsystem of X, decided by language inclusion at window width."""
    if Y.is_empty():
        return True
    j = max(X.window, Y.window)
    return _language(Y, j) <= _language(X, j)


# ---------------------------------------------------------------------
# canonical mixing sub-SFT
# ---------------------------------------------------------------------


def _scc_partition(n: int, adj: Sequence[Sequence[int]]) -> list:
    """Strongly connected components (iterative Tarjan), deterministic."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list = []
    comps = []
    counter = [0]

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for out_i in range(ei, len(adj[v])):
                u = adj[v][out_i]
                if index[u] == -1:
                    work[-1] = (v, out_i + 1)
                    work.append((u, 0))
                    advanced = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                comps.append(sorted(comp))
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def _occurs_in_component(graph, comp: set, w: Word) -> bool:
    k = graph.width
    if len(w) == 0:
        return True
    if len(w) < k:
        return any(
            graph.vertex_ranks[c][i : i + len(w)] == w.ranks
            for c in comp
            for i in range(k - len(w) + 1)
        )
    vid = graph.vertex_ids.get(w.ranks[: k])
    if vid is None or vid not in comp:
        return False
    for a in w.ranks[k:]:
        vid = graph.step(vid, a)
        if vid is None or vid not in comp:
            return False
    return True


_canonical_cache: dict = {}


def _canonical_mixing_sub_sft(alphabet, forbidden, w: Word):
    """The canonical mixing sub-SFT of `forbid(forbidden)` containing w.

    Candidates are the nontrivial strongly connected components of the
    pruned width-window graph through which w can be read; among the
    aperiodic ones the largest is chosen (ties: least vertex word), and
    it is re-presented as an SFT by additionally forbidding the other
    width-window words.  Returns None when no candidate exists.
    """
    forbidden = frozenset(forbidden)
    key = (alphabet, forbidden, w)
    if key in _canonical_cache:
        return _canonical_cache[key]

    result = None
    if not any(len(f) == 0 for f in forbidden):
        base = _pooled_sft(alphabet, forbidden)
        if not base.is_empty() and base.contains_word(w):
            G = base.graph(base.window)
            nv = len(G.vertex_ranks)
            adj = [sorted({j for _, j in row}) for row in G.out_edges]
            best = None
            for comp in _scc_partition(nv, adj):
                cset = set(comp)
                has_edge = any(
                    j in cset for i in comp for _, j in G.out_edges[i]
                )
                if not has_edge or not _occurs_in_component(G, cset, w):
                    continue
                others = [
                    G.vertex_ranks[i] for i in range(nv) if i not in cset
                ]
                extra = [base._word(r) for r in others]
                cand = _pooled_sft(
                    alphabet, forbidden | frozenset(extra), window=base.window
                )
                if cand.is_empty() or not _mixing(cand):
                    continue
                rank_key = (-len(comp), G.vertex_ranks[comp[0]])
                if best is None or rank_key < best[0]:
                    best = (rank_key, cand)
            if best is not None:
                result = best[1]

    _canonical_cache[key] = result
    return result


# ---------------------------------------------------------------------
# Pi-0-2 enumeration
# ---------------------------------------------------------------------


def pi02_enumerate(spec: Pi02Spec, rounds: int) -> list:
    """Run the four-step Pi-0-2 approximation rounds.

    Each round adds the next word (length order, lexicographic within a
    length) to the memory, fires the memory words through phi_x, tries
    to emit a triple for every queued word, and grows the forbidden set
    of the Y-side through phi_y failures.

    Parameters
    ----------
    spec : Pi02Spec
    rounds : int >= 1

    Returns
    -------
    list of ApproxTriple
        All triples emitted within the budget, in emission order.  May
        be empty for small budgets.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    A = spec.alphabet
    stream = _word_stream(A)

    counters: dict = {}  # w -> [k_w, l_w], insertion = length-lex order
    queue: dict = {}  # w -> k'_w, insertion order
    forb_y: set = set()  # the Y-side forbidden set F
    phi_y_next: dict = {}  # w -> next k to test
    maxlen = 0
    emitted: list = []

    for i in range(rounds):
        u = next(stream)
        counters[u] = [0, 0]
        maxlen = max(maxlen, len(u))

        # fire words through phi_x
        for w, kl in counters.items():
            if spec.phi_x(w, kl[0], kl[1]):
                kl[0] += 1
                kl[1] = 0
                if w not in queue:
                    queue[w] = kl[0]
            else:
                kl[1] += 1

        # try to emit for each queued word
        for w in list(queue):
            p = max(queue[w], len(w))
            if p > maxlen:
                # every word of length maxlen+1 <= p still has k = 0,
                # so the candidate SFT is empty; skip cheaply
                continue
            fp = [
                v
                for v in _words_upto(A, p)
                if counters.get(v, (0,))[0] <= p
            ]
            X = _canonical_mixing_sub_sft(A, fp, w)
            if X is None:
                continue
            if any(len(v) == 0 for v in forb_y):
                raise ValueError(
                    "phi_y rejects the empty word: the Y subshift is empty"
                )
            Y = _pooled_sft(A, frozenset(forb_y))
            if not _subshift_leq(Y, X):
                continue
            del queue[w]
            emitted.append(
                ApproxTriple(X, Y, w, len(emitted), X.window, _mixdist(X))
            )

        # grow the Y-side forbidden set from phi_y failures.  The word
        # universe is capped at the longest memory word; every length is
        # still reached eventually, so the limit behaviour is unchanged.
        for v in _words_upto(A, min(i, maxlen)):
            if v in forb_y:
                continue
            k = phi_y_next.get(v, 0)
            while k <= i:
                if not spec.phi_y(v, k):
                    forb_y.add(v)
                    break
                k += 1
            phi_y_next[v] = k

    return emitted


# ---------------------------------------------------------------------
# Delta-0-2 enumeration
# ---------------------------------------------------------------------


class _Race:
    """Resumable k/l race of a fire-and-reset predicate."""

    __slots__ = ("k", "l", "done")

    def __init__(self):
        self.k = 0
        self.l = 0
        self.done = 0

    def advance(self, phi, w: Word, n: int) -> int:
        while self.done < n:
            if phi(w, self.k, self.l):
                self.k += 1
                self.l = 0
            else:
                self.l += 1
            self.done += 1
        return self.k


def delta02_predicate(spec: Delta02Spec, w: Word, n: int) -> bool:
    """The combined limit predicate of a Delta-0-2 spec.

    Runs n fire-and-reset checks of phi_plus and of phi_minus and
    returns the truth value of k_plus > k_minus.  For every word this
    converges: eventually true for w in L(X), eventually false outside.
    """
    plus = _Race().advance(spec.phi_plus, w, n)
    minus = _Race().advance(spec.phi_minus, w, n)
    return plus > minus


def delta02_enumerate(spec: Delta02Spec, rounds: int) -> list:
    """Run the two-step Delta-0-2 approximation rounds.

    Each round adds the next word to the memory, splits the memory by
    the combined predicate at the current round index into a positive
    part Q and forbidden part F, and for each w in Q emits (X_p, w)
    with the largest |w| <= p <= maxlen such that forbidding the short
    words of F yields a mixing SFT whose languages up to p agree
    exactly with Q.

    Returns a list of ApproxTriple with Y = None.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    A = spec.alphabet
    stream = _word_stream(A)

    memory: list = []
    races_plus: dict = {}
    races_minus: dict = {}
    emitted: list = []

    for i in range(rounds):
        u = next(stream)
        memory.append(u)
        races_plus[u] = _Race()
        races_minus[u] = _Race()

        positive = []
        negative = []
        for w in memory:
            kp = races_plus[w].advance(spec.phi_plus, w, i)
            km = races_minus[w].advance(spec.phi_minus, w, i)
            (positive if kp > km else negative).append(w)
        if not positive:
            continue
        n = max(len(w) for w in memory)
        by_len: dict = {}
        for w in positive:
            by_len.setdefault(len(w), set()).add(w)

        stages = []
        valid_flags = []
        for p in range(n + 1):
            fp = [v for v in negative if len(v) <= p]
            if any(len(v) == 0 for v in fp):
                stages.append(None)
                valid_flags.append(False)
                continue
            X = _pooled_sft(A, frozenset(fp))
            ok = not X.is_empty() and _mixing(X)
            if ok:
                for j in range(p + 1):
                    if _language(X, j) != frozenset(by_len.get(j, ())):
                        ok = False
                        break
            stages.append(X)
            valid_flags.append(ok)

        for w in positive:
            for p in range(n, len(w) - 1, -1):
                if valid_flags[p] and stages[p].contains_word(w):
                    X = stages[p]
                    emitted.append(
                        ApproxTriple(
                            X, None, w, len(emitted), X.window, _mixdist(X)
                        )
                    )
                    break

    return emitted


# ---------------------------------------------------------------------
# slowdown re-indexing
# ---------------------------------------------------------------------


def slowdown(schedule: Union[Callable[[int], int], Sequence[int]], triples):
    """Re-index an emitted sequence through a slow schedule.

    The schedule s must be nondecreasing with unit steps:
    s(m) <= s(m+1) <= s(m) + 1 (validated on the evaluated range).  The
    result is triples[s(0)], triples[s(1)], ... truncated when s leaves
    the index range of `triples` (or at the end of a sequence-valued
    schedule).  A callable schedule that fails to reach the end within
    1000 * (len(triples) + 1) steps is rejected.

    Examples
    --------
    >>> slowdown(lambda m: m, [10, 20, 30])
    [10, 20, 30]
    >>> slowdown(lambda m: m // 2, [10, 20])
    [10, 10, 20, 20]
    """
    triples = list(triples)
    if callable(schedule):
        limit = 1000 * (len(triples) + 1)

        def values():
            for m in range(limit):
                yield schedule(m)
            raise ValueError("schedule advances too slowly to terminate")

        source = values()
    else:
        source = iter(list(schedule))

    out = []
    prev = None
    for v in source:
        if not isinstance(v, int) or v < 0:
            raise ValueError("schedule values must be nonnegative integers")
        if prev is not None and not prev <= v <= prev + 1:
            raise ValueError(
                "schedule must satisfy s(m) <= s(m+1) <= s(m)+1"
            )
        if v >= len(triples):
            break
        out.append(triples[v])
        prev = v
    return out


# ---------------------------------------------------------------------
# built-in specs
# ---------------------------------------------------------------------


def _golden_legal(w: Word) -> bool:
    return all(
        not (w.ranks[i] == 1 and w.ranks[i + 1] == 1)
        for i in range(len(w) - 1)
    )


def _even_legal(w: Word) -> bool:
    """No interior maximal run of 1s (0 on both sides) of odd length."""
    r = w.ranks
    n = len(r)
    i = 0
    while i < n:
        if r[i] != 1:
            i += 1
            continue
        j = i
        while j < n and r[j] == 1:
            j += 1
        if i > 0 and j < n and (j - i) % 2 == 1:
            return False
        i = j
    return True


def _all_zero(w: Word) -> bool:
    return all(rank == 0 for rank in w.ranks)


#: Bundled step-counter machines for the halting-flavoured toy spec:
#: (name, number of steps after which the machine halts, or None).
BUNDLED_MACHINES = (
    ("counts-to-thirty", 30),
    ("halts-immediately", 0),
    ("loops-forever", None),
)


def _halts_within(machine, k: int) -> bool:
    _, steps = machine
    return steps is not None and steps <= k


def _pi02_factories():
    bin2 = Alphabet("01")

    def goldenmean():
        return Pi02Spec(
            phi_x=lambda w, k, l: _golden_legal(w),
            phi_y=lambda w, k: _all_zero(w),
            alphabet=bin2,
        )

    def evenshift():
        return Pi02Spec(
            phi_x=lambda w, k, l: _even_legal(w),
            phi_y=lambda w, k: _all_zero(w),
            alphabet=bin2,
        )

    def halting():
        # words with "11" count as legal only while the probe machine
        # has not yet halted within k steps; the limit is the golden
        # mean when it halts, the full shift when it loops.
        probe = BUNDLED_MACHINES[0]
        return Pi02Spec(
            phi_x=lambda w, k, l: _golden_legal(w)
            or not _halts_within(probe, k),
            phi_y=lambda w, k: _all_zero(w),
            alphabet=bin2,
        )

    return {
        "goldenmean": goldenmean,
        "evenshift": evenshift,
        "halting": halting,
    }


def _delta02_factories():
    bin2 = Alphabet("01")

    def from_language(legal):
        return Delta02Spec(
            phi_plus=lambda w, k, l: legal(w),
            phi_minus=lambda w, k, l: not legal(w),
            alphabet=bin2,
        )

    return {
        "goldenmean": lambda: from_language(_golden_legal),
        "evenshift": lambda: from_language(_even_legal),
    }


_PI02_BUILTINS = _pi02_factories()
_DELTA02_BUILTINS = _delta02_factories()

#: Names accepted by the CLI for each mode.
BUILTIN_SPECS = {
    "pi02": tuple(sorted(_PI02_BUILTINS)),
    "delta02": tuple(sorted(_DELTA02_BUILTINS)),
}


def builtin_pi02(name: str) -> Pi02Spec:
    """A named built-in Pi-0-2 spec (see BUILTIN_SPECS['pi02'])."""
    try:
        return _PI02_BUILTINS[name]()
    except KeyError:
        raise ValueError(
            "unknown pi02 spec %r (have: %s)"
            % (name, ", ".join(sorted(_PI02_BUILTINS)))
        ) from None


def builtin_delta02(name: str) -> Delta02Spec:
    """A named built-in Delta-0-2 spec (see BUILTIN_SPECS['delta02'])."""
    try:
        return _DELTA02_BUILTINS[name]()
    except KeyError:
        raise ValueError(
            "unknown delta02 spec %r (have: %s)"
            % (name, ", ".join(sorted(_DELTA02_BUILTINS)))
        ) from None
