"""Walled cellular automaton whose settled segments enumerate halting machines.

Rows are divided by permanent walls (born from ``I`` seeds, as in
:mod:`glimset.walls`) into segments.  Each wall runs a finite controller
over the segment to its *left*.  A segment of length ``ell`` settles to

* ``$ bin(n) $^k`` when machine ``n`` of a fixed enumeration halts within
  ``m`` steps, where ``(n, m) = pairing(ell)`` and ``k = ell - len(bin(n)) - 1``,
* ``$^ell`` otherwise,

after which the controller erases itself and the row is a fixed point.
So the set of words ``$ bin(n) $`` visible in settled rows is exactly the
halting set of the enumeration (up to the finite prefix actually bundled).

The controller is a single head on a third layer, composed with the
cleaning layer of :mod:`glimset.walls`:

1. *wait-walk* -- one round trip along the segment at speed 1/4, slower
   than every cleaning signal, so all sweeps die before any tape mark is
   written;
2. *length decoding* -- the inverse Cantor pairing is computed in unary by
   diagonal passes: a block grows one cell per pass at the right wall
   while each pass retires one dead cell per block cell at the left end;
   the pass that runs out of room reveals ``(n, m)``;
3. *budgeted simulation* -- machine ``n`` is run on a mirrored tape in the
   segment with ``m`` tick tokens fenced off at the right; running out of
   ticks or tape space both mean "did not halt within m" (space-outs are
   provably impossible for runs that do halt within ``m``);
4. *printing* -- the head sweeps right once, writing the certificate or
   all-blank content on the main layer and erasing its own layer.

Heads ignore cleaning sweeps (a sweep scrubs tape marks only on headless
cells), walls block all head traffic, and any malformed local situation
collapses the head into a right-moving eraser, so debris cannot forge a
halting certificate: certificates are only ever written by a completed
simulation.  Segments of length 0 or 1 are below the pairing range and
simply settle to blanks.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from math import isqrt
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .engine import CompiledRule, LayeredAlphabet, LayeredConfiguration, step
from .walls import (
    C_DEL_L,
    C_DEL_R,
    C_SO_L0,
    C_SO_R0,
    CLEANING_SYMBOLS,
    M_BLANK,
    M_I,
    M_W,
    cleaning_next,
)
from .words import Alphabet, Word

__all__ = [
    "DEMO_MACHINES_TEXT",
    "PAIRING_RANGE",
    "PairingFn",
    "SIGMA1_MAIN_SYMBOLS",
    "SIGMA1_TIME_FACTOR",
    "TmEnumeration",
    "TmMachine",
    "bin_word",
    "build_sigma1_rule",
    "demo_enumeration",
    "eventual_segment_content",
    "format_tm_file",
    "pairing",
    "parse_tm_file",
    "read_segments",
    "settled_segments",
    "sigma1_alphabet",
    "sigma1_budget",
    "sigma1_seed",
    "stabilize",
    "unpairing",
]


# ---------------------------------------------------------------------
# machines
# ---------------------------------------------------------------------

MOVES = ("L", "R", "S")
BLANK = "."


def _check_token(tok: str, what: str) -> str:
    if not tok or any(c.isspace() for c in tok) or "|" in tok or "/" in tok:
        raise ValueError("bad %s token %r" % (what, tok))
    return tok


@dataclass
class TmMachine:
    """A Turing machine on a one-way infinite, initially blank tape.

    Parameters
    ----------
    name : str
        Identifier used in machine files.
    initial, final : str
        Start state and the unique halting state.  The machine *halts by
        entering* ``final``; if ``initial == final`` it halts in 0 steps.
    rules : dict
        ``(state, read) -> (state', write, move)`` with ``move`` one of
        ``"L"``, ``"R"``, ``"S"``.  A missing entry hangs the machine
        forever (it never halts).  Moving left on cell 0 stays on cell 0.

    Notes
    -----
    The blank symbol is ``"."``.  These conventions are shared verbatim
    by the in-row simulation, so the pure interpreter below is a faithful
    oracle for the automaton.
    """

    name: str
    initial: str
    final: str
    rules: Dict[Tuple[str, str], Tuple[str, str, str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_token(self.name, "machine name")
        _check_token(self.initial, "state")
        _check_token(self.final, "state")
        for (q, s), (q2, s2, mv) in self.rules.items():
            for tok, what in ((q, "state"), (q2, "state"),
                              (s, "symbol"), (s2, "symbol")):
                _check_token(tok, what)
            if mv not in MOVES:
                raise ValueError("bad move %r in machine %s" % (mv, self.name))

    @property
    def states(self) -> frozenset:
        qs = {self.initial, self.final}
        for (q, _s), (q2, _s2, _mv) in self.rules.items():
            qs.add(q)
            qs.add(q2)
        return frozenset(qs)

    @property
    def symbols(self) -> frozenset:
        ss = {BLANK}
        for (_q, s), (_q2, s2, _mv) in self.rules.items():
            ss.add(s)
            ss.add(s2)
        return frozenset(ss)

    def halt_time(self, cap: int) -> Optional[int]:
        """Number of steps to reach ``final`` on empty input, or None.

        Only the first ``cap`` steps are attempted.
        """
        if self.initial == self.final:
            return 0
        tape: Dict[int, str] = {}
        pos, q = 0, self.initial
        for t in range(1, cap + 1):
            rule = self.rules.get((q, tape.get(pos, BLANK)))
            if rule is None:
                return None
            q, write, move = rule
            if write == BLANK:
                tape.pop(pos, None)
            else:
                tape[pos] = write
            if move == "R":
                pos += 1
            elif move == "L":
                pos = max(0, pos - 1)
            if q == self.final:
                return t
        return None

    def halts_within(self, m: int) -> bool:
        return self.halt_time(m) is not None


class TmEnumeration:
    """A finite, indexed prefix of an enumeration of machines.

    Indices at or beyond ``len(enum)`` are treated as machines that never
    halt, so every pairing value dispatches somewhere; this is the desk
    scale stand-in for a genuine universal enumeration.
    """

    def __init__(self, machines: Sequence[TmMachine]):
        self.machines = tuple(machines)
        names = [m.name for m in self.machines]
        if len(set(names)) != len(names):
            raise ValueError("duplicate machine names: %r" % (names,))

    def __len__(self) -> int:
        return len(self.machines)

    def __getitem__(self, n: int) -> TmMachine:
        return self.machines[n]

    def __iter__(self) -> Iterator[TmMachine]:
        return iter(self.machines)

    def halts_within(self, n: int, m: int) -> bool:
        if n < 0:
            raise ValueError("machine index must be >= 0")
        if n >= len(self.machines):
            return False
        return self.machines[n].halts_within(m)

    def content_hash(self) -> str:
        return hashlib.sha256(format_tm_file(self).encode()).hexdigest()


# ---------------------------------------------------------------------
# machine files
# ---------------------------------------------------------------------

def parse_tm_file(text: str) -> TmEnumeration:
    """Parse an enumeration from its textual form.

    One machine per blank-line-separated block::

        machine <name>
        initial <state>
        final <state>
        <state> <read> <state'> <write> <L|R|S>
        ...

    ``#`` starts a comment.  The blank tape symbol is spelled ``.``.
    """
    machines = []
    block: List[List[str]] = []

    def flush() -> None:
        if not block:
            return
        header: Dict[str, str] = {}
        rules: Dict[Tuple[str, str], Tuple[str, str, str]] = {}
        for toks in block:
            if toks[0] in ("machine", "initial", "final"):
                if len(toks) != 2:
                    raise ValueError("bad header line %r" % " ".join(toks))
                if toks[0] in header:
                    raise ValueError("duplicate %r line" % toks[0])
                header[toks[0]] = toks[1]
            elif len(toks) == 5:
                key = (toks[0], toks[1])
                if key in rules:
                    raise ValueError("duplicate transition for %r" % (key,))
                rules[key] = (toks[2], toks[3], toks[4])
            else:
                raise ValueError("bad transition line %r" % " ".join(toks))
        for need in ("machine", "initial", "final"):
            if need not in header:
                raise ValueError("machine block missing %r line" % need)
        machines.append(TmMachine(header["machine"], header["initial"],
                                  header["final"], rules))
        block.clear()

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            flush()
            continue
        block.append(line.split())
    flush()
    if not machines:
        raise ValueError("no machine blocks found")
    return TmEnumeration(machines)


def format_tm_file(enum: TmEnumeration) -> str:
    """Canonical textual form; ``parse_tm_file`` round-trips it."""
    blocks = []
    for mach in enum:
        lines = ["machine %s" % mach.name,
                 "initial %s" % mach.initial,
                 "final %s" % mach.final]
        for (q, s), (q2, s2, mv) in sorted(mach.rules.items()):
            lines.append("%s %s %s %s %s" % (q, s, q2, s2, mv))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


DEMO_MACHINES_TEXT = """\
# bundled demo enumeration
# 0: halts immediately (initial state is final)
machine halt-now
initial h
final h

# 1: writes 1s marching right forever
machine glider
initial r
final z
r . r 1 R

# 2: bounces off the left tape edge, halts in 2 steps
machine edge-bounce
initial s0
final h
s0 . s1 . L
s1 . h . S

# 3: writes 101, walks back reading it, halts in 7 steps
machine zigzag
initial w0
final h
w0 . w1 1 R
w1 . w2 0 R
w2 . w3 1 R
w3 . rA . L
rA 1 rB 1 L
rB 0 rC 0 L
rC 1 h 1 S

# 4: flips between two states in place forever
machine blinker
initial p
final z
p . q . S
q . p . S
"""


def demo_enumeration() -> TmEnumeration:
    """The five bundled machines (halting pattern: yes, no, yes, yes, no)."""
    return parse_tm_file(DEMO_MACHINES_TEXT)


# ---------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------

PAIRING_RANGE = 10_000


class PairingFn:
    """Bijection between segment lengths and (machine, budget) pairs.

    The classical Cantor walk over diagonals, shifted by two: lengths 0
    and 1 cannot host any certificate (``$ bin(n)`` alone needs two
    cells), so the walk starts at length 2.  On diagonal ``d`` the pairs
    are ``(0, d), (1, d - 1), ..., (d, 0)``.  The shift keeps the length
    constraint ``ell - (len(bin(n)) + 1) >= 0`` valid everywhere: on
    diagonal ``d`` the worst case is ``n = d`` at ``ell = T(d) + d + 2``
    with ``T`` triangular, and ``T(d) + d + 2 >= len(bin(d)) + 1`` for
    all ``d``.
    """

    def __init__(self, max_length: int = PAIRING_RANGE):
        self.max_length = max_length

    def __call__(self, length: int) -> Tuple[int, int]:
        if not 2 <= length <= self.max_length:
            raise ValueError("length %r outside pairing range [2, %d]"
                             % (length, self.max_length))
        r = length - 2
        d = (isqrt(8 * r + 1) - 1) // 2
        n = r - d * (d + 1) // 2
        return n, d - n

    def inverse(self, n: int, m: int) -> int:
        if n < 0 or m < 0:
            raise ValueError("pair indices must be >= 0")
        d = n + m
        length = d * (d + 1) // 2 + n + 2
        if length > self.max_length:
            raise ValueError("pair (%d, %d) maps past the range cap %d"
                             % (n, m, self.max_length))
        return length


pairing = PairingFn()


def unpairing(n: int, m: int) -> int:
    """Length of the segment encoding the pair ``(n, m)``."""
    return pairing.inverse(n, m)


def bin_word(n: int) -> str:
    """Binary expansion, most significant bit first; ``bin_word(0) == "0"``."""
    if n < 0:
        raise ValueError("binary words are defined for n >= 0")
    return format(n, "b")


_SEGMENT_ALPHABET = Alphabet(("$", "0", "1"))


def eventual_segment_content(length: int, enum: TmEnumeration) -> Word:
    """Settled content of a clean segment, computed without the automaton.

    Parameters
    ----------
    length : int
        Segment length, at least 2 (below that the pairing is undefined
        and the automaton just blanks the segment).
    enum : TmEnumeration
        The machine enumeration driving the rule.

    Returns
    -------
    Word
        ``$ bin(n) $^k`` if machine ``n`` halts within ``m`` steps where
        ``(n, m) = pairing(length)``, else ``$^length``.
    """
    n, m = pairing(length)
    if enum.halts_within(n, m):
        bits = bin_word(n)
        if len(bits) + 1 > length:
            raise AssertionError("pairing violated the length constraint")
        text = "$" + bits + "$" * (length - len(bits) - 1)
    else:
        text = "$" * length
    return Word(_SEGMENT_ALPHABET, text)


# ---------------------------------------------------------------------
# the controller head
# ---------------------------------------------------------------------

class _Act(NamedTuple):
    sym: str                      # tape symbol left on the head's own cell
    stay: Optional[tuple]         # head state staying here
    carry: Optional[tuple]        # head state handed to the front cell
    write: Optional[str]          # main-layer symbol printed on this cell


_ERASER = ("eraser",)


class _Controller:
    """State chart of the per-segment head.

    Tape marks: ``.`` free, ``a`` retired, ``b``/``B`` block (plain /
    shuttle-marked), ``c`` tick token, ``g`` fence between simulation
    space and tick tokens, ``t<s>`` machine tape symbol ``s``, ``h...``
    the head-position mark of the simulated machine.

    Every decision of a moving head depends only on its own cell and the
    cell it faces, so a target cell can replay its neighbours' steps to
    accept arrivals; this keeps the composed rule radius 1.
    """

    def __init__(self, enum: TmEnumeration):
        self.enum = enum
        self.E = len(enum)
        self.sat = self.E + 2  # block counter cap; past it the index is out of range
        msyms = sorted({s for mach in enum for s in mach.symbols if s != BLANK})
        self.tape_syms = ([".", "a", "b", "B", "c", "g"]
                          + ["t" + s for s in msyms]
                          + ["h."] + ["ht" + s for s in msyms])
        heads: List[tuple] = []
        for k in range(4):
            heads.append(("waitL", k))
        for k in range(4):
            heads.append(("waitR", k))
        heads += [("initL",), ("initA1",), ("initA2",),
                  ("pseek",), ("shret",), ("shdot",), ("pnorm",)]
        for bias in (0, 1):
            heads.append(("abL", bias))
            for cnt in range(self.sat + 1):
                heads.append(("absweep", bias, cnt))
        for n in range(self.E):
            heads += [("abg", n), ("abgw", n), ("abc", n), ("sentry", n)]
            for q in sorted(enum[n].states):
                heads += [("sat", n, q), ("toctr", n, q), ("back", n, q)]
        for n in range(-1, self.E):
            heads.append(("wseek", n))
        for n in range(self.E):
            for i in range(len(bin_word(n)) + 1):
                heads.append(("emit", n, i))
        heads += [("fill",), _ERASER]
        self.heads = heads

    # -- helpers -------------------------------------------------------

    @staticmethod
    def _msym(tape: str) -> Optional[str]:
        """Machine symbol stored in a tape mark, or None if not simulable."""
        if tape == ".":
            return BLANK
        if tape.startswith("t"):
            return tape[1:]
        return None

    @staticmethod
    def _tape(msym: str) -> str:
        return "." if msym == BLANK else "t" + msym

    def _dispatch(self, bias: int, cnt: int, has_block: bool) -> tuple:
        """Abort-sweep endpoint: route on the recovered pair.

        ``n = cnt - bias``; no block cells left means ``m = 0``, where
        only machines whose initial state is final can halt.
        """
        n = cnt - bias
        if cnt >= self.sat or n < 0 or n >= self.E:
            return ("wseek", -1)
        mach = self.enum[n]
        if mach.initial == mach.final:
            return ("wseek", n)
        if not has_block:
            return ("wseek", -1)
        return ("abg", n)

    # -- geometry ------------------------------------------------------

    def direction(self, hs: tuple, sym: str) -> str:
        """Which neighbour the head faces this step: L, R or S."""
        kind = hs[0]
        if kind in ("waitL", "waitR"):
            if hs[1] < 3:
                return "S"
            return "L" if kind == "waitL" else "R"
        if kind in ("initL", "abL", "abg", "sentry", "wseek", "shdot", "pnorm"):
            return "L"
        if kind in ("initA2", "abgw"):
            return "S"
        if kind == "back":
            if sym.startswith("h"):
                mach = self.enum[hs[1]]
                gamma = self._msym(sym[1:])
                if gamma is None:
                    return "S"
                rule = mach.rules.get((hs[2], gamma))
                if rule is None or rule[0] == mach.final or rule[2] == "S":
                    return "S"
                # the in-row tape is mirrored: machine R is row L
                return "L" if rule[2] == "R" else "R"
            return "L"
        return "R"

    # -- the step table --------------------------------------------------

    def act(self, hs: tuple, sym: str, fw_wall: bool, fw_sym: Optional[str],
            fw_head: bool) -> _Act:
        """One head step.  ``fw_*`` describe the faced cell (pre-step)."""
        kind = hs[0]
        erase = _Act(".", _ERASER, None, None)
        if kind == "waitL":
            k = hs[1]
            if k < 3:
                return _Act(sym, ("waitL", k + 1), None, None)
            if fw_wall:
                return _Act(sym, ("waitR", 0), None, None)
            return _Act(sym, None, ("waitL", 0), None)
        if kind == "waitR":
            k = hs[1]
            if k < 3:
                return _Act(sym, ("waitR", k + 1), None, None)
            if fw_wall:
                return _Act(sym, ("initL",), None, None)
            return _Act(sym, None, ("waitR", 0), None)
        if kind == "initL":
            if fw_wall:
                return _Act(sym, ("initA1",), None, None)
            return _Act(sym, None, ("initL",), None)
        if kind == "initA1":
            if fw_wall:  # one-cell segment: nothing to decode
                return _Act(sym, ("fill",), None, None)
            return _Act("a", None, ("initA2",), None)
        if kind == "initA2":
            return _Act("a", ("pseek",), None, None)
        if kind == "pseek":
            if sym == ".":
                if fw_wall or fw_sym in ("b", "B"):
                    return _Act("B", ("shret",), None, None)  # plant, pre-marked
                return _Act(sym, None, ("pseek",), None)
            if sym == "a":
                if fw_wall or fw_sym in ("b", "B"):
                    return _Act(sym, ("abL", 0), None, None)  # no room at all
                return _Act(sym, None, ("pseek",), None)
            return erase
        if kind == "shret":
            if sym == "b":
                return _Act("B", ("shdot",), None, None)
            if sym in (".", "a", "B"):
                if fw_wall:
                    if sym == "B":
                        return _Act(sym, ("pnorm",), None, None)  # pass done
                    return erase
                return _Act(sym, None, ("shret",), None)
            return erase
        if kind == "shdot":
            if sym in ("b", "B"):
                if fw_wall:
                    return erase
                return _Act(sym, None, ("shdot",), None)
            if sym == ".":
                if fw_wall or fw_sym == "a":
                    return _Act("a", ("shret",), None, None)  # retire one cell
                if fw_sym == ".":
                    return _Act(sym, None, ("shdot",), None)
                return erase
            if sym == "a":
                return _Act(sym, ("abL", 1), None, None)  # famine mid-pass
            return erase
        if kind == "pnorm":
            if sym == "B":
                if fw_wall:
                    return erase
                return _Act("b", None, ("pnorm",), None)
            if sym in (".", "a"):
                return _Act(sym, ("pseek",), None, None)
            return erase
        if kind == "abL":
            if fw_wall:
                return _Act(sym, ("absweep", hs[1], 0), None, None)
            return _Act(sym, None, ("abL", hs[1]), None)
        if kind == "absweep":
            bias, cnt = hs[1], hs[2]
            if sym in (".", "a", "B"):
                cnt2 = min(cnt + 1, self.sat) if sym == "B" else cnt
                if fw_wall:
                    return _Act(".", self._dispatch(bias, cnt2, False), None, None)
                return _Act(".", None, ("absweep", bias, cnt2), None)
            if sym == "b":
                return _Act(sym, self._dispatch(bias, cnt, True), None, None)
            return erase
        if kind == "abg":
            if fw_wall:
                return erase
            return _Act(sym, None, ("abgw", hs[1]), None)
        if kind == "abgw":
            return _Act("g", ("abc", hs[1]), None, None)
        if kind == "abc":
            n = hs[1]
            if sym == "g":
                if fw_wall:
                    return erase
                return _Act(sym, None, ("abc", n), None)
            if sym == "b":
                if fw_wall:
                    return _Act("c", ("sentry", n), None, None)
                return _Act("c", None, ("abc", n), None)
            return erase
        if kind == "sentry":
            n = hs[1]
            if sym == "c":
                return _Act(sym, None, ("sentry", n), None)
            if sym == "g":
                if fw_wall:
                    return erase
                return _Act(sym, None, ("sat", n, self.enum[n].initial), None)
            return erase
        if kind == "sat":
            n, q = hs[1], hs[2]
            if self._msym(sym) is None:
                return erase
            return _Act("h" + sym, None, ("toctr", n, q), None)
        if kind == "toctr":
            n, q = hs[1], hs[2]
            if sym == "c":
                return _Act(".", ("back", n, q), None, None)  # one tick spent
            if sym in (".", "g") or sym.startswith("t"):
                if fw_wall:
                    return _Act(sym, ("wseek", -1), None, None)  # ticks exhausted
                return _Act(sym, None, ("toctr", n, q), None)
            return erase
        if kind == "back":
            n, q = hs[1], hs[2]
            if sym.startswith("h"):
                mach = self.enum[n]
                gamma = self._msym(sym[1:])
                if gamma is None:
                    return erase
                rule = mach.rules.get((q, gamma))
                if rule is None:
                    return _Act(self._tape(gamma), ("wseek", -1), None, None)
                q2, s2, mv = rule
                out = self._tape(s2)
                if q2 == mach.final:
                    return _Act(out, ("wseek", n), None, None)  # halted in budget
                if mv == "S":
                    return _Act(out, ("sat", n, q2), None, None)
                if mv == "R":  # machine right = row left
                    if fw_wall:
                        return _Act(out, ("wseek", -1), None, None)  # out of space
                    return _Act(out, None, ("sat", n, q2), None)
                if fw_wall:
                    return erase
                if fw_sym == "g":  # machine left on cell 0: stay put
                    return _Act(out, ("sat", n, q2), None, None)
                return _Act(out, None, ("sat", n, q2), None)
            if sym in (".", "g") or sym.startswith("t"):
                if fw_wall:
                    return erase
                return _Act(sym, None, ("back", n, q), None)
            return erase
        if kind == "wseek":
            x = hs[1]
            if fw_wall:
                if x >= 0:
                    return _Act(sym, ("emit", x, 0), None, None)
                return _Act(sym, ("fill",), None, None)
            return _Act(sym, None, ("wseek", x), None)
        if kind == "emit":
            n, i = hs[1], hs[2]
            seq = "$" + bin_word(n)
            nxt = ("emit", n, i + 1) if i + 1 < len(seq) else ("fill",)
            if fw_wall:
                return _Act(".", None, None, seq[i])
            return _Act(".", None, nxt, seq[i])
        if kind == "fill":
            if fw_wall:
                return _Act(".", None, None, "$")
            return _Act(".", None, ("fill",), "$")
        if kind == "eraser":
            if fw_wall:
                return _Act(".", None, None, None)
            return _Act(".", None, _ERASER, None)
        return erase


def _state_name(hs: tuple) -> str:
    return ":".join(str(p) for p in hs)


# ---------------------------------------------------------------------
# the composed rule
# ---------------------------------------------------------------------

SIGMA1_MAIN_SYMBOLS = ("$", "0", "1", "I", "W")
_MAIN_CLASS = (M_BLANK, M_BLANK, M_BLANK, M_I, M_W)
_SWEPT = (C_SO_R0, C_SO_L0, C_DEL_R, C_DEL_L)


def sigma1_alphabet(enum: TmEnumeration) -> LayeredAlphabet:
    """Main x cleaning x controller alphabet for the given enumeration."""
    prog = _Controller(enum)
    comp = list(prog.tape_syms)
    for hs in prog.heads:
        name = _state_name(hs)
        for s in prog.tape_syms:
            comp.append(name + "|" + s)
    return LayeredAlphabet([
        ("main", Alphabet(SIGMA1_MAIN_SYMBOLS)),
        ("cleaning", Alphabet(CLEANING_SYMBOLS)),
        ("comp", Alphabet(tuple(comp))),
    ])


def build_sigma1_rule(enum: TmEnumeration) -> CompiledRule:
    """Compile the walled enumeration automaton for ``enum``.

    The rule composes three layers: the main symbols ``$ 0 1 I W``, the
    wall cleaning layer, and the controller layer described in the module
    docstring.  The state space is far too large to tabulate, so the rule
    is compiled in memoised-function flavour.
    """
    prog = _Controller(enum)
    alphabet = sigma1_alphabet(enum)
    n_tape = len(prog.tape_syms)
    n_comp = n_tape * (len(prog.heads) + 1)
    n_clean = len(CLEANING_SYMBOLS)
    block = n_clean * n_comp

    # comp code <-> (head state or None, tape symbol)
    comp_pairs: List[Tuple[Optional[tuple], str]] = [
        (None, s) for s in prog.tape_syms]
    for hs in prog.heads:
        for s in prog.tape_syms:
            comp_pairs.append((hs, s))
    comp_code = {pair: i for i, pair in enumerate(comp_pairs)}
    assert alphabet.total == len(SIGMA1_MAIN_SYMBOLS) * block
    assert alphabet.encode(("I", CLEANING_SYMBOLS[0], prog.tape_syms[0])) \
        == 3 * block  # main layer is the most significant

    I_MAIN, W_MAIN = 3, 4
    main_of = {"$": 0, "0": 1, "1": 2}
    waitl3 = ("waitL", 3)

    def fn(window: Tuple[int, int, int]) -> int:
        mi_l, rem = divmod(window[0], block)
        cl_l, cp_l = divmod(rem, n_comp)
        mi_c, rem = divmod(window[1], block)
        cl_c, cp_c = divmod(rem, n_comp)
        mi_r, rem = divmod(window[2], block)
        cl_r, cp_r = divmod(rem, n_comp)
        cls_l, cls_c, cls_r = (_MAIN_CLASS[mi_l], _MAIN_CLASS[mi_c],
                               _MAIN_CLASS[mi_r])
        ncls, nclean = cleaning_next(cls_l, cl_l, cls_c, cl_c, cls_r, cl_r)
        swept = nclean in _SWEPT
        lhs, lsym = comp_pairs[cp_l]
        chs, csym = comp_pairs[cp_c]
        rhs, rsym = comp_pairs[cp_r]
        l_wall = cls_l != M_BLANK
        r_wall = cls_r != M_BLANK
        mwrite = None
        if mi_c == I_MAIN:
            # a newborn wall hosts a fresh controller, whatever was here
            nhs, nsym = ("waitL", 0), "."
        elif cls_c != M_BLANK:
            # persisting wall: only the wait family may ride it
            nhs, nsym = None, "."
            if chs is not None and chs[0] == "waitL":
                if chs[1] < 3:
                    nhs = ("waitL", chs[1] + 1)
                elif l_wall:
                    nhs = ("waitR", 0)
            elif chs is not None and chs[0] == "waitR" and chs[1] < 3:
                nhs = ("waitR", chs[1] + 1)
                # waitR at 3 retires: both segment ends are walls
        elif chs is not None:
            d = prog.direction(chs, csym)
            if d == "S":
                a = prog.act(chs, csym, False, None, False)
            elif d == "L":
                a = prog.act(chs, csym, l_wall, lsym, lhs is not None)
            else:
                a = prog.act(chs, csym, r_wall, rsym, rhs is not None)
            if a.carry is not None and not (l_wall if d == "L" else r_wall) \
                    and (lhs if d == "L" else rhs) is not None:
                nhs, nsym = _ERASER, "."  # refused: the faced cell is occupied
            else:
                nhs, nsym, mwrite = a.stay, a.sym, a.write
        else:
            arrivals = []
            if lhs is not None and not l_wall \
                    and prog.direction(lhs, lsym) == "R":
                a = prog.act(lhs, lsym, False, csym, False)
                if a.carry is not None:
                    arrivals.append(a.carry)
            if rhs is not None:
                if r_wall:
                    if rhs == waitl3:  # birth descent off the wall
                        arrivals.append(("waitL", 0))
                elif prog.direction(rhs, rsym) == "L":
                    a = prog.act(rhs, rsym, False, csym, False)
                    if a.carry is not None:
                        arrivals.append(a.carry)
            if len(arrivals) == 1:
                nhs, nsym = arrivals[0], csym
            elif arrivals:
                nhs, nsym = _ERASER, "."
            else:
                nhs, nsym = None, csym
        if nhs is None and swept and nsym != ".":
            nsym = "."  # sweeps scrub unattended tape marks
        if ncls == M_W:
            nmain = W_MAIN
        elif ncls == M_I:
            nmain = I_MAIN
        elif swept:
            nmain = 0
        elif mwrite is not None:
            nmain = main_of[mwrite]
        elif mi_c < 3:
            nmain = mi_c
        else:
            nmain = 0
        return (nmain * n_clean + nclean) * n_comp + comp_code[(nhs, nsym)]

    return CompiledRule.from_function(
        fn, radius=1, states=alphabet.total,
        descriptor="sigma1-ca-v1:" + enum.content_hash()[:12])


# ---------------------------------------------------------------------
# seeds and settling
# ---------------------------------------------------------------------

def sigma1_seed(alphabet: LayeredAlphabet,
                lengths: Sequence[int]) -> LayeredConfiguration:
    """Cyclic clean seed ``I $^l0 I $^l1 ...`` (one wall before each run).

    Each ``I`` becomes the wall serving the blank run to its *left*, so
    ``lengths[i]`` is handled by the wall seeded at position ``i + 1``
    of the wall list (cyclically).
    """
    if not lengths:
        raise ValueError("need at least one segment length")
    seed_i = alphabet.encode(("I", ".", "."))
    blank = alphabet.encode(("$", ".", "."))
    cells: List[int] = []
    for length in lengths:
        if length < 0:
            raise ValueError("segment lengths must be >= 0")
        cells.append(seed_i)
        cells.extend([blank] * length)
    return LayeredConfiguration(alphabet, cells, "cyclic")


def read_segments(config: LayeredConfiguration) -> List[Tuple[int, str]]:
    """Main-layer contents of the wall-delimited segments of a cyclic row.

    Returns ``(start, text)`` pairs where ``start`` indexes the cell just
    after a wall; zero-length segments between adjacent walls are kept.
    """
    alphabet = config.alphabet
    mains = [alphabet.decode(int(c))[0] for c in config.cells]
    walls = [i for i, m in enumerate(mains) if m in ("I", "W")]
    if not walls:
        raise ValueError("row has no walls")
    size = len(mains)
    out = []
    for j, w in enumerate(walls):
        nxt = walls[(j + 1) % len(walls)]
        span = (nxt - w - 1) % size
        text = "".join(mains[(w + 1 + k) % size] for k in range(span))
        out.append(((w + 1) % size, text))
    return out


SIGMA1_TIME_FACTOR = 6  # measured worst 1.56x (ell^2 + 8 ell + 16) over ell <= 128


def sigma1_budget(lengths: Sequence[int]) -> int:
    """Settling-time budget for a clean seed with the given segment lengths."""
    worst = max(lengths)
    return SIGMA1_TIME_FACTOR * (worst * worst + 8 * worst + 16)


def stabilize(rule: CompiledRule, config: LayeredConfiguration,
              max_steps: int) -> Tuple[LayeredConfiguration, int]:
    """Run until the row is a fixed point of the rule.

    Returns
    -------
    (config, t) : the fixed row and the first time it appeared.

    Raises
    ------
    RuntimeError if no fixed point shows up within ``max_steps``.
    """
    cur = config
    for t in range(1, max_steps + 1):
        nxt = step(rule, cur)
        if np.array_equal(nxt.cells, cur.cells):
            return cur, t - 1
        cur = nxt
    raise RuntimeError("no fixed point within %d steps" % max_steps)


def settled_segments(lengths: Sequence[int], enum: Optional[TmEnumeration] = None,
                     rule: Optional[CompiledRule] = None,
                     alphabet: Optional[LayeredAlphabet] = None,
                     budget: Optional[int] = None) -> List[Tuple[int, str]]:
    """Settle a clean seed and read its segments.

    Convenience wrapper: builds the demo rule unless given one, runs the
    seed ``I $^l0 I $^l1 ...`` to its fixed point and returns
    ``read_segments`` of the settled row.
    """
    if enum is None:
        enum = demo_enumeration()
    if alphabet is None:
        alphabet = sigma1_alphabet(enum)
    if rule is None:
        rule = build_sigma1_rule(enum)
    seed = sigma1_seed(alphabet, lengths)
    fixed, _t = stabilize(rule, seed, budget or sigma1_budget(lengths))
    return read_segments(fixed)
