"""Combinatorics-on-words primitives.

Periods, the Fine and Wilf periodicity theorem, primitivity, Lyndon
conjugates, borders, and the local-to-global periodicity argument used
when reconstructing the period of a configuration from its windows.
Everything here is a pure function on immutable values.
"""

from __future__ import annotations

from math import gcd


class Alphabet:
    """An ordered finite alphabet.

    The construction order of the symbols is *the* order: it defines
    lexicographic comparisons and every deterministic tie-break in the
    rest of the library.

    Parameters
    ----------
    symbols : iterable of str
        Distinct, nonempty tokens.  Single-character tokens give compact
        string rendering; multi-character tokens are rendered
        comma-separated.

    Examples
    --------
    >>> ab = Alphabet("ab")
    >>> len(ab)
    2
    >>> ab.index("b")
    1
    """

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols):
        syms = tuple(str(s) for s in symbols)
        if not syms:
            raise ValueError("alphabet must contain at least one symbol")
        if any(not s for s in syms):
            raise ValueError("alphabet tokens must be nonempty")
        if len(set(syms)) != len(syms):
            raise ValueError("alphabet tokens must be distinct: %r" % (syms,))
        self.symbols = syms
        self._index = {s: i for i, s in enumerate(syms)}

    def index(self, symbol: str) -> int:
        return self._index[symbol]

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol):
        return symbol in self._index

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return "Alphabet(%r)" % (list(self.symbols),)

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def word(self, text) -> "Word":
        """Parse a word from its string form (or any symbol iterable).

        Single-character alphabets read one symbol per character;
        alphabets with multi-character tokens expect comma-separated
        tokens.  The empty string is the empty word.
        """
        if isinstance(text, Word):
            if text.alphabet != self:
                raise ValueError("word belongs to a different alphabet")
            return text
        if isinstance(text, str):
            if text == "":
                return Word(self, ())
            if self.single_char and "," not in text:
                return Word(self, tuple(text))
            return Word(self, tuple(tok for tok in text.split(",")))
        return Word(self, tuple(text))


class Word:
    """A finite word over an :class:`Alphabet`.

    Supports length, indexing, slicing, concatenation with ``+``,
    repetition with ``*``, and lexicographic comparison in the
    alphabet's order.
    """

    __slots__ = ("alphabet", "symbols", "ranks")

    def __init__(self, alphabet: Alphabet, symbols=()):
        syms = tuple(symbols)
        for s in syms:
            if s not in alphabet:
                raise ValueError("symbol %r not in %r" % (s, alphabet))
        self.alphabet = alphabet
        self.symbols = syms
        self.ranks = tuple(alphabet.index(s) for s in syms)

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.alphabet, self.symbols[i])
        return self.symbols[i]

    def __iter__(self):
        return iter(self.symbols)

    def __add__(self, other):
        other = self.alphabet.word(other)
        return Word(self.alphabet, self.symbols + other.symbols)

    def __mul__(self, n: int):
        return Word(self.alphabet, self.symbols * n)

    def __eq__(self, other):
        return (
            isinstance(other, Word)
            and self.alphabet == other.alphabet
            and self.symbols == other.symbols
        )

    def __hash__(self):
        return hash((self.alphabet, self.symbols))

    def _cmp_key(self, other):
        if not isinstance(other, Word) or other.alphabet != self.alphabet:
            raise TypeError("cannot compare words over different alphabets")
        return other.ranks

    def __lt__(self, other):
        return self.ranks < self._cmp_key(other)

    def __le__(self, other):
        return self.ranks <= self._cmp_key(other)

    def __gt__(self, other):
        return self.ranks > self._cmp_key(other)

    def __ge__(self, other):
        return self.ranks >= self._cmp_key(other)

    def __str__(self):
        if self.alphabet.single_char:
            return "".join(self.symbols)
        return ",".join(self.symbols)

    def __repr__(self):
        return "Word(%r)" % (str(self),)

    def rotate(self, k: int) -> "Word":
        """The conjugate starting at position ``k`` (cyclic shift left)."""
        n = len(self)
        if n == 0:
            return self
        k %= n
        return Word(self.alphabet, self.symbols[k:] + self.symbols[:k])


def has_period(w: Word, p: int) -> bool:
    """Whether ``w[i] == w[i+p]`` whenever both sides are defined.

    Vacuously true for ``p >= len(w)``; :func:`periods` restricts to the
    conventional range ``1..len(w)``.
    """
    if p < 1:
        raise ValueError("period must be positive")
    s = w.symbols
    return all(s[i] == s[i + p] for i in range(len(s) - p))


def periods(w: Word) -> set:
    """All periods of ``w`` in ``[1, len(w)]``.

    Parameters
    ----------
    w : Word

    Returns
    -------
    set of int
        Exactly ``{ p in [1, len(w)] : w is p-periodic }``; empty for
        the empty word, and always containing ``len(w)`` otherwise.

    Examples
    --------
    >>> ab = Alphabet("ab")
    >>> sorted(periods(ab.word("abab")))
    [2, 4]
    >>> sorted(periods(ab.word("aaa")))
    [1, 2, 3]
    """
    return {p for p in range(1, len(w) + 1) if has_period(w, p)}


def least_period(w: Word) -> int:
    """The least period of a nonempty word (plain scan over p = 1..|w|)."""
    if len(w) == 0:
        raise ValueError("the empty word has no least period")
    for p in range(1, len(w) + 1):
        if has_period(w, p):
            return p
    raise AssertionError("unreachable: |w| is always a period")


def fine_wilf_implies(w: Word, p: int, q: int) -> bool:
    """Whether the Fine and Wilf theorem applies to ``(w, p, q)``.

    Returns true iff ``w`` has periods ``p`` and ``q`` *and*
    ``len(w) >= p + q - gcd(p, q)``.  When true, the caller may rely on
    ``gcd(p, q)`` being a period of ``w`` as well; that conclusion is
    asserted internally before returning.

    Examples
    --------
    >>> ab = Alphabet("ab")
    >>> fine_wilf_implies(ab.word("ababab"), 2, 4)
    True
    >>> fine_wilf_implies(ab.word("aabaa"), 3, 4)  # |w| = 5 < 3 + 4 - 1
    False
    """
    if p < 1 or q < 1:
        raise ValueError("periods must be positive")
    g = gcd(p, q)
    applies = len(w) >= p + q - g and has_period(w, p) and has_period(w, q)
    if applies:
        # The theorem's conclusion; a failure here would be a genuine bug.
        assert has_period(w, g), "Fine-Wilf conclusion failed for %r" % (w,)
    return applies


def _require_nonempty(w: Word):
    if len(w) == 0:
        raise ValueError("operation undefined on the empty word")


def is_primitive(w: Word) -> bool:
    """Whether ``w`` is not a proper power ``z**n`` with ``n >= 2``.

    Examples
    --------
    >>> ab = Alphabet("ab")
    >>> is_primitive(ab.word("abab"))
    False
    >>> is_primitive(ab.word("aab"))
    True
    """
    _require_nonempty(w)
    n = len(w)
    return not any(n % d == 0 and has_period(w, d) for d in range(1, n))


def lyndon_conjugate(w: Word):
    """The lexicographically minimal conjugate of a primitive word.

    Returns ``None`` when ``w`` is not primitive.  For primitive ``w``
    the result is a conjugate of ``w``, minimal among all conjugates in
    the alphabet's order, and unbordered.

    Examples
    --------
    >>> ab = Alphabet("ab")
    >>> str(lyndon_conjugate(ab.word("baa")))
    'aab'
    >>> lyndon_conjugate(ab.word("abab")) is None
    True
    """
    _require_nonempty(w)
    if not is_primitive(w):
        return None
    return min((w.rotate(k) for k in range(len(w))), key=lambda v: v.ranks)


def is_unbordered(w: Word) -> bool:
    """Whether no proper nonempty prefix of ``w`` is also a suffix.

    Equivalently, the least period of ``w`` is ``len(w)``.

    Examples
    --------
    >>> ab = Alphabet("ab")
    >>> is_unbordered(ab.word("aab"))
    True
    >>> is_unbordered(ab.word("aba"))
    False
    """
    _require_nonempty(w)
    s = w.symbols
    return all(s[:k] != s[-k:] for k in range(1, len(s)))


def local_periodicity_witness(x: Word, n: int):
    """Local periodicity of every window, with a global witness.

    Checks whether every length-``2n`` factor of ``x`` has some period
    ``q <= n``.  When that holds, the whole of ``x`` is ``q``-periodic
    for some ``q <= n``; the returned witness is verified by a direct
    check before returning, so ``(True, None)`` is impossible.

    Parameters
    ----------
    x : Word
        A finite window of a configuration; must satisfy ``len(x) >= 2n``.
    n : int
        Positive local-periodicity bound.

    Returns
    -------
    (bool, int or None)
        ``(True, q)`` with ``q <= n`` a verified period of ``x``, or
        ``(False, None)``.

    Examples
    --------
    >>> ab = Alphabet("ab")
    >>> local_periodicity_witness(ab.word("ab") * 8, 2)
    (True, 2)
    >>> local_periodicity_witness(ab.word("aaaabaaaa" + "a" * 7), 2)
    (False, None)
    """
    if n < 1:
        raise ValueError("local periodicity bound must be positive")
    if len(x) < 2 * n:
        raise ValueError("window too short: need |x| >= 2n")
    win = 2 * n
    for i in range(len(x) - win + 1):
        factor = x[i : i + win]
        if not any(has_period(factor, q) for q in range(1, n + 1)):
            return (False, None)
    q = least_period(x)
    # Local periodicity everywhere propagates to the whole window; the
    # verified witness below is the point of the function.
    assert q <= n and has_period(x, q)
    return (True, q)
