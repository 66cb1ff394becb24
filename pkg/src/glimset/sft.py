"""Subshifts of finite type and the finite symbolic-dynamics toolkit.

An :class:`Sft` is an alphabet, a finite forbidden set, and a window
size.  On top of it: language enumeration through pruned Rauzy graphs,
transitivity/mixing decisions, the mixing distance, exact-length gluing
words, unbordered words inside the subshift, and synthesis of periodic
points with prescribed least period and prescribed subwords.

All graph work happens on tuples of symbol ranks; :class:`Word` objects
appear only at the API boundary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from .words import Alphabet, Word, is_unbordered, lyndon_conjugate


class EmptySftError(ValueError):
    """The subshift has no points, so the query is undefined."""


class NotMixingError(ValueError):
    """The operation requires a (topologically) mixing SFT."""


class GluingError(RuntimeError):
    """A construction the theory guarantees could not be completed."""


class Sft:
    """A subshift of finite type given by forbidden words.

    Parameters
    ----------
    alphabet : Alphabet
    forbidden : iterable of Word or str
        Finite set of forbidden words (each nonempty).
    window : int, optional
        Window size; must be >= the longest forbidden word.  Defaults to
        ``max(1, longest forbidden word length)``.

    Examples
    --------
    >>> from glimset.words import Alphabet
    >>> golden = Sft(Alphabet("01"), ["11"])
    >>> golden.window
    2
    >>> sorted(str(w) for w in golden.language(2))
    ['00', '01', '10']
    """

    def __init__(self, alphabet: Alphabet, forbidden=(), window: int | None = None):
        self.alphabet = alphabet
        words = []
        for f in forbidden:
            f = alphabet.word(f)
            if len(f) == 0:
                raise ValueError("forbidden words must be nonempty")
            words.append(f)
        self.forbidden = frozenset(words)
        longest = max((len(f) for f in self.forbidden), default=0)
        if window is None:
            window = max(1, longest)
        if window < 1 or window < longest:
            raise ValueError(
                "window must be positive and >= the longest forbidden word"
            )
        self.window = window
        self._forbidden_ranks = frozenset(f.ranks for f in self.forbidden)
        self._maxf = longest
        self._graphs: dict[int, "RauzyGraph"] = {}

    def __eq__(self, other):
        return (
            isinstance(other, Sft)
            and self.alphabet == other.alphabet
            and self.forbidden == other.forbidden
            and self.window == other.window
        )

    def __hash__(self):
        return hash((self.alphabet, self.forbidden, self.window))

    def __repr__(self):
        return "Sft(%r, forbidden=%r, window=%d)" % (
            self.alphabet,
            sorted(str(f) for f in self.forbidden),
            self.window,
        )

    # ----- internals on rank tuples -----------------------------------

    def _ok_suffix(self, ranks) -> bool:
        """No forbidden word ends at the last position of ``ranks``."""
        n = len(ranks)
        for j in range(1, min(self._maxf, n) + 1):
            if ranks[n - j :] in self._forbidden_ranks:
                return False
        return True

    def locally_admissible(self, ranks) -> bool:
        """No forbidden factor anywhere in the rank tuple."""
        return all(self._ok_suffix(ranks[: i + 1]) for i in range(len(ranks)))

    def _word(self, ranks) -> Word:
        syms = self.alphabet.symbols
        return Word(self.alphabet, tuple(syms[r] for r in ranks))

    def graph(self, width: int) -> "RauzyGraph":
        """The pruned Rauzy graph of the given width (cached)."""
        if width not in self._graphs:
            self._graphs[width] = RauzyGraph(self, width)
        return self._graphs[width]

    # ----- language ----------------------------------------------------

    def language(self, n: int) -> set:
        """All length-``n`` words of the language L(X).

        Computed from the pruned Rauzy graph, so every returned word is
        genuinely extendable to a bi-infinite point of X, not merely
        free of forbidden factors.
        """
        if n < 0:
            raise ValueError("n must be >= 0")
        if self.is_empty():
            return set()
        if n == 0:
            return {Word(self.alphabet, ())}
        m = max(n, self.window - 1)
        verts = self.graph(m).vertex_ranks
        if m == n:
            return {self._word(v) for v in verts}
        out = set()
        for v in verts:
            for i in range(m - n + 1):
                out.add(self._word(v[i : i + n]))
        return out

    def contains_word(self, w) -> bool:
        """Membership of a finite word in L(X)."""
        w = self.alphabet.word(w)
        if len(w) == 0:
            return not self.is_empty()
        k = max(self.window - 1, 1)
        g = self.graph(k)
        if len(w) < k:
            return any(
                v[i : i + len(w)] == w.ranks
                for v in g.vertex_ranks
                for i in range(k - len(w) + 1)
            )
        vid = g.vertex_ids.get(w.ranks[:k])
        return vid is not None and g.walk(vid, w.ranks[k:]) is not None

    def is_empty(self) -> bool:
        return not self.graph(self.window).vertex_ranks

    def is_finite(self) -> bool:
        """Finitely many points: the pruned graph is a union of cycles."""
        g = self.graph(self.window)
        return all(len(row) == 1 for row in g.out_edges)


class RauzyGraph:
    """The width-``m`` Rauzy graph of an SFT, pruned to its essential part.

    Vertices are the locally admissible length-``m`` words surviving
    iterated removal of in-degree-0 / out-degree-0 vertices, i.e.
    exactly the words lying on bi-infinite paths.  An edge
    ``u -a-> v`` exists when ``u + a`` ends with ``v`` and introduces no
    forbidden factor.  Stepping by a label is deterministic.
    """

    def __init__(self, sft: Sft, width: int):
        if width < 0:
            raise ValueError("width must be >= 0")
        self.sft = sft
        self.width = width
        asize = len(sft.alphabet)

        verts = []

        def extend(prefix):
            if len(prefix) == width:
                verts.append(prefix)
                return
            for a in range(asize):
                nxt = prefix + (a,)
                if sft._ok_suffix(nxt):
                    extend(nxt)

        extend(())

        vset = set(verts)
        while True:
            out_deg = dict.fromkeys(vset, 0)
            in_deg = dict.fromkeys(vset, 0)
            for v in vset:
                for a in range(asize):
                    ext = v + (a,)
                    tgt = ext[1:] if width else ()
                    if tgt in vset and sft._ok_suffix(ext):
                        out_deg[v] += 1
                        in_deg[tgt] += 1
            dead = {v for v in vset if out_deg[v] == 0 or in_deg[v] == 0}
            if not dead:
                break
            vset -= dead

        self.vertex_ranks = tuple(sorted(vset))
        self.vertex_ids = {v: i for i, v in enumerate(self.vertex_ranks)}
        out_edges = []
        for v in self.vertex_ranks:
            row = []
            for a in range(asize):
                ext = v + (a,)
                tgt = ext[1:] if width else ()
                j = self.vertex_ids.get(tgt)
                if j is not None and sft._ok_suffix(ext):
                    row.append((a, j))
            out_edges.append(tuple(row))
        self.out_edges = tuple(out_edges)
        self._reach: list | None = None

    # ----- views -------------------------------------------------------

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.sft._word(v) for v in self.vertex_ranks)

    @property
    def edges(self) -> frozenset:
        """All labeled edges as (source Word, label, target Word)."""
        syms = self.sft.alphabet.symbols
        return frozenset(
            (self.sft._word(u), syms[a], self.sft._word(self.vertex_ranks[j]))
            for i, u in enumerate(self.vertex_ranks)
            for a, j in self.out_edges[i]
        )

    def step(self, vid: int, a: int) -> int | None:
        """Follow the (unique) edge labeled ``a``, or None."""
        for b, j in self.out_edges[vid]:
            if b == a:
                return j
        return None

    def walk(self, vid: int, ranks) -> int | None:
        """Follow a label sequence; None as soon as an edge is missing."""
        for a in ranks:
            vid = self.step(vid, a)
            if vid is None:
                return None
        return vid

    # ----- connectivity -------------------------------------------------

    def strongly_connected(self) -> bool:
        n = len(self.vertex_ranks)
        if n == 0:
            return False
        fwd = [{j for _, j in row} for row in self.out_edges]
        bwd = [set() for _ in range(n)]
        for i, row in enumerate(self.out_edges):
            for _, j in row:
                bwd[j].add(i)

        def closure(adj):
            seen = {0}
            stack = [0]
            while stack:
                for j in adj[stack.pop()]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            return seen

        return len(closure(fwd)) == n and len(closure(bwd)) == n

    def cycle_gcd(self) -> int:
        """gcd of all cycle lengths; assumes strong connectivity."""
        n = len(self.vertex_ranks)
        dist = [None] * n
        dist[0] = 0
        order = [0]
        g = 0
        for i in order:
            for _, j in self.out_edges[i]:
                if dist[j] is None:
                    dist[j] = dist[i] + 1
                    order.append(j)
                else:
                    g = gcd(g, dist[i] + 1 - dist[j])
        return abs(g)

    def reach_masks(self, max_len: int) -> list:
        """R[L][i] = bitmask of vertices reachable from ``i`` in exactly
        ``L`` steps, for L = 0..max_len (cached, grown on demand)."""
        n = len(self.vertex_ranks)
        if self._reach is None:
            self._reach = [[1 << i for i in range(n)]]
        R = self._reach
        while len(R) <= max_len:
            prev = R[-1]
            cur = []
            for row in self.out_edges:
                m = 0
                for _, j in row:
                    m |= prev[j]
                cur.append(m)
            R.append(cur)
        return R


# ---------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------


def language(X: Sft, n: int) -> set:
    """See :meth:`Sft.language`."""
    return X.language(n)


def _require_nonempty(X: Sft):
    if X.is_empty():
        raise EmptySftError("the subshift is empty")


def is_transitive(X: Sft) -> bool:
    """Strong connectivity of the pruned Rauzy graph at window width."""
    _require_nonempty(X)
    return X.graph(X.window).strongly_connected()


def is_mixing(X: Sft) -> bool:
    """Transitive with cycle-length gcd 1 (checked at window width)."""
    _require_nonempty(X)
    g = X.graph(X.window)
    return g.strongly_connected() and g.cycle_gcd() == 1


def _prefix_masks(X: Sft, G: RauzyGraph, length: int) -> list:
    """Bitmasks T_p = { z : the label walk p succeeds from z }, one per
    word p of the given length (deduplicated)."""
    masks = {}
    nv = len(G.vertex_ranks)
    for p in X.language(length):
        m = 0
        for z in range(nv):
            if G.walk(z, p.ranks) is not None:
                m |= 1 << z
        masks[p.ranks] = m
    return list(masks.values())


def mixing_distance(X: Sft) -> int:
    """The least n0 such that every pair of words of length n0 glues at
    every length n >= n0.

    Verified by reachability masks up to the Wielandt primitivity bound
    (|V|-1)^2 + 1, beyond which every length is realizable (asserted).
    Returns 0 when even length-0 gluing works for all window-width
    pairs (full-shift-like degenerate case).
    """
    if not is_mixing(X):
        raise NotMixingError("mixing distance undefined: X is not mixing")
    k = X.window
    G = X.graph(k)
    nv = len(G.vertex_ranks)
    wielandt = (nv - 1) ** 2 + 1
    full = (1 << nv) - 1

    # Grow reachability masks until the first all-full level e (the
    # primitive exponent).  Full levels stay full (each mask is a union
    # of full masks), so lengths beyond e never need explicit checks;
    # primitivity theory bounds e by the Wielandt number, asserted here.
    e = 0
    while True:
        R = G.reach_masks(e)
        if all(m == full for m in R[e]):
            break
        e += 1
        assert e <= wielandt, "primitivity bound violated"

    # Degenerate convention: u·v in L(X) for all window-width pairs
    # (a length-k path from u spells exactly u·v).
    if e <= k:
        return 0

    # v's constraint on the glue depends only on its length-(k-1) prefix
    # (or on v itself when |v| < k); u's only on its length-k suffix
    # vertex (or on the vertices ending with u when |u| < k).
    long_tmasks = _prefix_masks(X, G, k - 1) if k > 1 else [full]

    for n0 in range(1, e + k + 2):
        if n0 >= k:
            ok = all(
                R[n][x] & t
                for n in range(n0, e)
                for x in range(nv)
                for t in long_tmasks
            )
        else:
            ends = {}
            for u in X.language(n0):
                m = 0
                for z, vr in enumerate(G.vertex_ranks):
                    if vr[k - n0 :] == u.ranks:
                        m |= 1 << z
                ends[u.ranks] = m
            tmasks = _prefix_masks(X, G, n0)
            ok = True
            for n in range(n0, e):
                rows = []
                for mask in ends.values():
                    row = 0
                    for x in range(nv):
                        if mask >> x & 1:
                            row |= R[n][x]
                    rows.append(row)
                if not all(row & t for row in rows for t in tmasks):
                    ok = False
                    break
        if ok:
            return n0
    raise AssertionError("no mixing distance up to the full-mask level")


def _sources_mask(X: Sft, G: RauzyGraph, u: Word) -> int:
    """Vertices that can sit at the right edge of an occurrence of u."""
    k = G.width
    m = 0
    if len(u) >= k:
        x = G.vertex_ids.get(u.ranks[len(u) - k :])
        if x is not None:
            m = 1 << x
    else:
        for z, vr in enumerate(G.vertex_ranks):
            if vr[k - len(u) :] == u.ranks:
                m |= 1 << z
    return m


def glue(X: Sft, u, w, m: int):
    """The lexicographically least v with |v| = m and u·v·w in L(X).

    Parameters
    ----------
    X : Sft
    u, w : Word or str
        Both must belong to L(X) (checked; ValueError otherwise).
    m : int >= 0

    Returns
    -------
    Word or None
        None when no gluing word of that exact length exists.

    Examples
    --------
    >>> from glimset.words import Alphabet
    >>> golden = Sft(Alphabet("01"), ["11"])
    >>> str(glue(golden, "1", "1", 1))
    '0'
    >>> glue(golden, "1", "1", 0) is None
    True
    """
    u = X.alphabet.word(u)
    w = X.alphabet.word(w)
    if m < 0:
        raise ValueError("gluing length must be >= 0")
    if not X.contains_word(u):
        raise ValueError("u is not in L(X): %r" % (str(u),))
    if not X.contains_word(w):
        raise ValueError("w is not in L(X): %r" % (str(w),))
    G = X.graph(X.window)
    nv = len(G.vertex_ranks)

    # completability sets, position m down to 0
    C = [0] * (m + 1)
    for z in range(nv):
        if G.walk(z, w.ranks) is not None:
            C[m] |= 1 << z
    for j in range(m - 1, -1, -1):
        mask = 0
        for z in range(nv):
            if any(C[j + 1] >> t & 1 for _, t in G.out_edges[z]):
                mask |= 1 << z
        C[j] = mask

    S = _sources_mask(X, G, u) & C[0]
    if not S:
        return None
    out = []
    for j in range(m):
        for a in range(len(X.alphabet)):
            nxt = 0
            for z in range(nv):
                if S >> z & 1:
                    t = G.step(z, a)
                    if t is not None:
                        nxt |= 1 << t
            nxt &= C[j + 1]
            if nxt:
                out.append(a)
                S = nxt
                break
        else:  # pragma: no cover - C-sets make this unreachable
            return None
    return X._word(tuple(out))


def _first_returns(G: RauzyGraph, pid: int, max_len: int, cap: int = 500_000):
    """Label words of first-return paths at vertex ``pid`` with length
    <= max_len, in (length, lex) order."""
    out = []
    budget = [cap]

    def rec(vid, labels):
        budget[0] -= 1
        if budget[0] < 0:
            raise GluingError("first-return enumeration exploded")
        if labels and vid == pid:
            out.append(tuple(labels))
            return
        if len(labels) >= max_len:
            return
        for a, j in G.out_edges[vid]:
            labels.append(a)
            rec(j, labels)
            labels.pop()

    rec(pid, [])
    return sorted(out, key=lambda t: (len(t), t))


def unbordered_word_in(X: Sft, m: int) -> Word:
    """An unbordered word v in L(X) with m <= |v| < m + 2k.

    Here ``k = max(window, mixing_distance(X))``.  Built from two
    non-commuting first-return words c (shortest, |c| <= k) and d
    (|d| <= 2k) at a vertex on a shortest cycle: the Lyndon conjugate
    of a suitable c^i d^j is unbordered, belongs to L(X), and lands in
    the length window.  Every candidate is re-verified before being
    returned.

    Raises
    ------
    NotMixingError / EmptySftError / ValueError
        When X is not an infinite mixing SFT or m < 2k.
    GluingError
        When no second first-return word exists up to 2k (X is then a
        single cycle, hence finite).
    """
    if not is_mixing(X):
        raise NotMixingError("need a mixing SFT")
    if X.is_finite():
        raise ValueError("X is finite: no unbordered words of every length")
    k = max(X.window, mixing_distance(X))
    if m < 2 * k:
        raise ValueError("need m >= 2k = %d" % (2 * k,))
    G = X.graph(X.window)
    nv = len(G.vertex_ranks)

    # lex-least vertex on a shortest cycle
    best = None
    for z in range(nv):
        R = G.reach_masks(nv)
        for L in range(1, nv + 1):
            if R[L][z] >> z & 1:
                if best is None or L < best[0]:
                    best = (L, z)
                break
    girth, pid = best
    returns = _first_returns(G, pid, max_len=2 * k)
    if not returns:
        raise GluingError("no first returns up to length 2k")
    c = returns[0]
    if len(c) > k:
        raise GluingError("shortest first return exceeds k")
    ds = [r for r in returns[1:] if c + r != r + c]
    if not ds:
        raise GluingError(
            "no second first return up to 2k: X behaves like a single cycle"
        )

    for d in ds:
        for L in range(m, m + 2 * k):
            for i in range(1, L // len(c) + 1):
                rem = L - i * len(c)
                if rem >= len(d) and rem % len(d) == 0:
                    cand = X._word(c * i + d * (rem // len(d)))
                    v = lyndon_conjugate(cand)
                    if (
                        v is not None
                        and is_unbordered(v)
                        and X.contains_word(v)
                    ):
                        return v
    raise GluingError("unbordered candidate scan exhausted")  # pragma: no cover


@dataclass(frozen=True)
class PeriodicPoint:
    """A periodic configuration ``...seed seed seed...``."""

    seed: Word

    @property
    def period(self) -> int:
        return len(self.seed)

    def least_period(self) -> int:
        """Least period of the bi-infinite point (a divisor of |seed|)."""
        n = self.period
        r = self.seed.ranks
        for d in range(1, n + 1):
            if n % d == 0 and all(r[i] == r[(i + d) % n] for i in range(n)):
                return d
        raise AssertionError("unreachable")

    def in_sft(self, X: Sft) -> bool:
        """Membership of the periodic point in X (scan of seed·seed)."""
        if len(self.seed) == 0:
            return False
        ranks = self.seed.ranks * max(2, -(-X.window // len(self.seed)) + 1)
        return X.locally_admissible(ranks)


def periodic_point_with_subwords(X: Sft, W, n: int) -> PeriodicPoint:
    """A periodic point of X with least period exactly n containing
    every word of W.

    The seed is ``u a v b``: u chains the words of W (sorted
    lexicographically) with length-k lex-least gluing words, v is an
    unbordered word with ``n - N - 4k < |v| <= n - N - 2k``, a and b are
    gluing words of length k and n - |uav|.  Requires
    ``n > 2N + 8k`` where ``N = k(|W|-1) + sum of |w|`` and
    ``k = max(window, mixing_distance)``.

    All three postconditions (least period exactly n, W containment,
    membership in X) are re-verified directly before returning.
    """
    if not is_mixing(X):
        raise NotMixingError("need a mixing SFT")
    if X.is_finite():
        raise ValueError("X is finite")
    k = max(X.window, mixing_distance(X))
    Wlist = sorted(X.alphabet.word(w) for w in W)
    if not Wlist:
        raise ValueError("W must be nonempty")
    for w in Wlist:
        if len(w) == 0:
            raise ValueError("W must not contain the empty word")
        if not X.contains_word(w):
            raise ValueError("%r is not in L(X)" % (str(w),))
    N = k * (len(Wlist) - 1) + sum(len(w) for w in Wlist)
    if n <= 2 * N + 8 * k:
        raise ValueError("need n > 2N + 8k = %d" % (2 * N + 8 * k,))

    u = Wlist[0]
    for wnext in Wlist[1:]:
        g = glue(X, u, wnext, k)
        if g is None:
            raise GluingError("mixing-distance gluing failed")
        u = u + g + wnext
    assert len(u) == N

    v = unbordered_word_in(X, n - N - 4 * k + 1)
    assert n - N - 4 * k < len(v) <= n - N - 2 * k

    a = glue(X, u, v, k)
    if a is None:
        raise GluingError("gluing a failed")
    blen = n - N - k - len(v)
    assert k <= blen < 3 * k
    b = glue(X, v, u, blen)
    if b is None:
        raise GluingError("gluing b failed")

    seed = u + a + v + b
    assert len(seed) == n
    point = PeriodicPoint(seed)

    # direct postcondition audit
    if not point.in_sft(X):
        raise GluingError("constructed point leaves X")
    if point.least_period() != n:
        raise GluingError("least period is not exactly n")
    text = seed.symbols
    for w in Wlist:
        if not any(
            text[i : i + len(w)] == w.symbols for i in range(n - len(w) + 1)
        ):
            raise GluingError("W containment failed")
    return point


def sft_approximation(oracle, n: int, alphabet: Alphabet) -> Sft:
    """The width-n SFT approximation of the subshift an oracle describes.

    Forbids exactly the length-n words the membership oracle rejects.
    """
    if n < 1:
        raise ValueError("approximation width must be positive")
    forbidden = []
    for tup in itertools.product(alphabet.symbols, repeat=n):
        w = Word(alphabet, tup)
        if not oracle(w):
            forbidden.append(w)
    return Sft(alphabet, forbidden, window=n)


# ---------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------


def format_sft(X: Sft) -> str:
    """Canonical text form: alphabet tokens, window size, one forbidden
    word per line; '#' starts a comment."""
    lines = [" ".join(X.alphabet.symbols), str(X.window)]
    lines += sorted(str(f) for f in X.forbidden)
    return "\n".join(lines) + "\n"


def parse_sft(text: str) -> Sft:
    """Inverse of :func:`format_sft` (comments and blank lines ignored)."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line)
    if len(rows) < 2:
        raise ValueError("SFT text needs an alphabet line and a window line")
    alphabet = Alphabet(rows[0].split())
    window = int(rows[1])
    forbidden = [alphabet.word(r) for r in rows[2:]]
    return Sft(alphabet, forbidden, window=window)
