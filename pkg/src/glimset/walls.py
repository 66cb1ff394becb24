"""Debris-cleaning wall protocol and the ternary clock component.

Every initialization symbol ``I`` turns into a guarded wall at time 1
and launches signal pairs both ways: a fast outer signal ``s_o`` (speed
1/4) that erases everything it meets that is not another ``s_o`` or a
guarded wall, and a slow inner signal ``s_i`` (speed 1/5) behind it.
When two outer signals collide they anchor in place and send speed-1
auxiliary signals back onto their inner signals; whichever auxiliary
returns later reveals the pair with the greater gap, which cannot have
been launched at time 1 (an ``s_o`` and ``s_i`` never share a cell), so
that pair is deleted and the other resumes.  Equal gaps - in particular
two genuine pairs - mutually vanish.  See STATE_CHART for the full
transition ladder and `parse_seed` for the row notation used in tests.

The clock component is a ternary odometer on digits {0,1,2,3} where 3
is "a 0 holding a carry": the leftmost digit of a run increments every
step, the others exactly when their left neighbour shows 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from numba import njit

from .engine import CompiledRule, LayeredAlphabet, LayeredConfiguration
from .words import Alphabet

__all__ = [
    "CleaningState",
    "Segment",
    "CLEANING_STATES",
    "CLEANING_SYMBOLS",
    "FORMATTING_TIME_FACTOR",
    "MAIN_SYMBOLS",
    "STATE_CHART",
    "build_cleaning_rule",
    "CleaningFragment",
    "walls_alphabet",
    "walls_rule",
    "parse_seed",
    "extract_segments",
    "is_formatted",
    "clock_component",
    "clock_predictor",
    "clock_next",
    "cleaning_next",
]

# ---------------------------------------------------------------------
# state codes
#
# Main-layer classes (standalone rows use them directly; composed rules
# map their own Main symbols onto these three classes before calling
# cleaning_next):
M_BLANK, M_I, M_W = 0, 1, 2
MAIN_SYMBOLS = ("$", "I", "W")

# Cleaning-layer codes.  Direction suffix R/L is the direction of
# motion; phases count occupancy steps (speed 1/4 and 1/5 movers).
C_BLANK = 0
C_GY0, C_GY1, C_GY2, C_GY3 = 1, 2, 3, 4  # wall guard, young: s_i launch timer
C_GUARD = 5
C_SO_R0, C_SO_R3 = 6, 9
C_SO_L0, C_SO_L3 = 10, 13
C_SI_R0, C_SI_R4 = 14, 18
C_SI_L0, C_SI_L4 = 19, 23
C_AUXO_R, C_AUXO_L = 24, 25  # auxiliary, outbound from an anchor
C_AUXB_R, C_AUXB_L = 26, 27  # auxiliary, returning to its anchor
C_HALF_L_F, C_HALF_L_W, C_HALF_L_R = 28, 29, 30  # left anchor half
C_HALF_R_F, C_HALF_R_W, C_HALF_R_R = 31, 32, 33  # right anchor half
C_CTR_F, C_CTR_W, C_CTR_RL, C_CTR_RR = 34, 35, 36, 37  # one-cell anchor
C_RES_L, C_RES_R = 38, 39  # comparison resolved; winner side tag
C_DEL_R, C_DEL_L = 40, 41
N_CLEANING = 42

CLEANING_SYMBOLS = (
    ".",
    "gy0", "gy1", "gy2", "gy3",
    "G",
    "soR0", "soR1", "soR2", "soR3",
    "soL0", "soL1", "soL2", "soL3",
    "siR0", "siR1", "siR2", "siR3", "siR4",
    "siL0", "siL1", "siL2", "siL3", "siL4",
    "auxoR", "auxoL", "auxbR", "auxbL",
    "hLf", "hLw", "hLr",
    "hRf", "hRw", "hRr",
    "ctF", "ctW", "ctL", "ctR",
    "resL", "resR",
    "delR", "delL",
)
assert len(CLEANING_SYMBOLS) == N_CLEANING


@dataclass(frozen=True)
class CleaningState:
    """One Cleaning-Layer state, decoded.

    A cell holds exactly one cleaning state, so an s_o and an s_i are
    never both present in one cell by representation.
    """

    code: int
    kind: str       # blank|guard-young|guard|so|si|aux-out|aux-back|
                    # half|center|resolved|delete
    direction: str  # 'R', 'L' or ''
    phase: int      # occupancy phase, -1 when not applicable

    @property
    def name(self) -> str:
        return CLEANING_SYMBOLS[self.code]


def _decode_cleaning(code: int) -> CleaningState:
    if code == C_BLANK:
        return CleaningState(code, "blank", "", -1)
    if C_GY0 <= code <= C_GY3:
        return CleaningState(code, "guard-young", "", code - C_GY0)
    if code == C_GUARD:
        return CleaningState(code, "guard", "", -1)
    if C_SO_R0 <= code <= C_SO_R3:
        return CleaningState(code, "so", "R", code - C_SO_R0)
    if C_SO_L0 <= code <= C_SO_L3:
        return CleaningState(code, "so", "L", code - C_SO_L0)
    if C_SI_R0 <= code <= C_SI_R4:
        return CleaningState(code, "si", "R", code - C_SI_R0)
    if C_SI_L0 <= code <= C_SI_L4:
        return CleaningState(code, "si", "L", code - C_SI_L0)
    if code in (C_AUXO_R, C_AUXO_L):
        return CleaningState(code, "aux-out", "R" if code == C_AUXO_R else "L", -1)
    if code in (C_AUXB_R, C_AUXB_L):
        return CleaningState(code, "aux-back", "R" if code == C_AUXB_R else "L", -1)
    if C_HALF_L_F <= code <= C_HALF_L_R:
        return CleaningState(code, "half", "L", code - C_HALF_L_F)
    if C_HALF_R_F <= code <= C_HALF_R_R:
        return CleaningState(code, "half", "R", code - C_HALF_R_F)
    if C_CTR_F <= code <= C_CTR_RR:
        return CleaningState(code, "center", "", code - C_CTR_F)
    if code in (C_RES_L, C_RES_R):
        return CleaningState(code, "resolved", "R" if code == C_RES_R else "L", -1)
    if code in (C_DEL_R, C_DEL_L):
        return CleaningState(code, "delete", "R" if code == C_DEL_R else "L", -1)
    raise ValueError("bad cleaning code %r" % code)


CLEANING_STATES = tuple(_decode_cleaning(c) for c in range(N_CLEANING))


# ---------------------------------------------------------------------
# the transition ladder
# ---------------------------------------------------------------------


@njit(cache=True)
def cleaning_next(lm, lc, cm, cc, rm, rc):  # pragma: no cover - jitted
    """Next (main-class, cleaning) pair of the middle cell.

    Main arguments are the three-way classes M_BLANK/M_I/M_W; composed
    rules classify their own Main symbols before calling.
    """
    # ----- walls and initialization symbols --------------------------
    if cm == M_I:
        # every I becomes a guarded wall and (via neighbour rules)
        # launches s_o now and s_i four steps later
        return M_W, C_GY0
    if cm == M_W:
        if C_GY0 <= cc <= C_GY3:
            return M_W, (cc + 1 if cc < C_GY3 else C_GUARD)
        if cc == C_GUARD:
            return M_W, C_GUARD
        # unguarded (debris) wall: erased by an arriving outer signal
        # (a newborn signal emitted from an adjacent I counts as one)
        in_l = lc == C_SO_R3 or lm == M_I
        in_r = rc == C_SO_L3 or rm == M_I
        if in_l and in_r:
            if lm == M_I and rm == M_I:
                return M_BLANK, C_BLANK  # two newborn sweeps clash: wipe
            return M_BLANK, C_CTR_F  # both sweeps claim the cell at once
        if in_l:
            return M_BLANK, C_SO_R0
        if in_r:
            return M_BLANK, C_SO_L0
        return M_W, C_BLANK

    guarded_l = lm == M_I or (lm == M_W and C_GY0 <= lc <= C_GUARD)
    guarded_r = rm == M_I or (rm == M_W and C_GY0 <= rc <= C_GUARD)
    wall_l = lm != M_BLANK
    wall_r = rm != M_BLANK
    so_in_l = lc == C_SO_R3          # an s_o arrives from the left
    so_in_r = rc == C_SO_L3
    born_l = lm == M_I               # a newborn wall launches s_o here
    born_r = rm == M_I
    del_in_l = lc == C_DEL_R
    del_in_r = rc == C_DEL_L

    # an adjacent inner signal (or wall) means a gap so small the
    # auxiliary round-trip is instantaneous: treat it as already
    # returned.  Walls reflect auxiliaries like any non-blank content.
    si_by_l = lc == C_AUXB_R or (C_SI_R0 <= lc <= C_SI_R4) or wall_l
    si_by_r = rc == C_AUXB_L or (C_SI_L0 <= rc <= C_SI_L4) or wall_r

    # ----- anchor machinery ------------------------------------------
    if C_HALF_L_F <= cc <= C_RES_R:
        # a third outer signal erases anchor machinery like any data
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        if C_HALF_L_F <= cc <= C_HALF_L_R:
            if not (C_HALF_R_F <= rc <= C_HALF_R_R):
                return M_BLANK, C_BLANK  # orphaned half decays
            if cc == C_HALF_L_F:
                return M_BLANK, C_HALF_L_W
            if cc == C_HALF_L_W:
                if rc == C_HALF_R_R:
                    return M_BLANK, C_DEL_L  # other side returned first: we lose
                if si_by_l:
                    return M_BLANK, C_HALF_L_R
                return M_BLANK, C_HALF_L_W
            # cc == C_HALF_L_R
            if rc == C_HALF_R_R:
                return M_BLANK, C_BLANK  # tie: both pairs vanish
            if rc == C_HALF_R_W:
                return M_BLANK, C_SO_R0  # we won: resume the sweep
            return M_BLANK, C_HALF_L_R
        if C_HALF_R_F <= cc <= C_HALF_R_R:
            if not (C_HALF_L_F <= lc <= C_HALF_L_R):
                return M_BLANK, C_BLANK
            if cc == C_HALF_R_F:
                return M_BLANK, C_HALF_R_W
            if cc == C_HALF_R_W:
                if lc == C_HALF_L_R:
                    return M_BLANK, C_DEL_R
                if si_by_r:
                    return M_BLANK, C_HALF_R_R
                return M_BLANK, C_HALF_R_W
            if lc == C_HALF_L_R:
                return M_BLANK, C_BLANK
            if lc == C_HALF_L_W:
                return M_BLANK, C_SO_L0
            return M_BLANK, C_HALF_R_R
        if cc == C_CTR_F:
            return M_BLANK, C_CTR_W
        if cc == C_CTR_W:
            if si_by_l and si_by_r:
                return M_BLANK, C_BLANK  # tie
            if si_by_l:
                return M_BLANK, C_CTR_RL
            if si_by_r:
                return M_BLANK, C_CTR_RR
            return M_BLANK, C_CTR_W
        if cc == C_CTR_RL:
            if si_by_r:
                return M_BLANK, C_RES_L
            return M_BLANK, C_CTR_RL
        if cc == C_CTR_RR:
            if si_by_l:
                return M_BLANK, C_RES_R
            return M_BLANK, C_CTR_RR
        if cc == C_RES_L:
            return M_BLANK, C_SO_R0  # winner resumes; neighbour spawns delete
        if cc == C_RES_R:
            return M_BLANK, C_SO_L0

    # ----- outer signals ----------------------------------------------
    if C_SO_R0 <= cc <= C_SO_R3:
        if C_SO_L0 <= rc <= C_SO_L3:
            return M_BLANK, C_HALF_L_F  # head-on contact: anchor
        if guarded_r:
            return M_BLANK, C_BLANK  # absorbed by a guarded wall
        if cc < C_SO_R3:
            return M_BLANK, cc + 1
        # departing; a gy3 wall on our left launches the s_i into us
        if lc == C_GY3 and lm == M_W:
            return M_BLANK, C_SI_R0
        return M_BLANK, C_BLANK
    if C_SO_L0 <= cc <= C_SO_L3:
        if C_SO_R0 <= lc <= C_SO_R3:
            return M_BLANK, C_HALF_R_F
        if guarded_l:
            return M_BLANK, C_BLANK
        if cc < C_SO_L3:
            return M_BLANK, cc + 1
        if rc == C_GY3 and rm == M_W:
            return M_BLANK, C_SI_L0
        return M_BLANK, C_BLANK

    # ----- inner signals ----------------------------------------------
    if C_SI_R0 <= cc <= C_SI_R4:
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0  # swept from behind
        if del_in_l or del_in_r:
            return M_BLANK, C_BLANK  # hunted down after a lost comparison
        if C_SI_L0 <= rc <= C_SI_L4:
            return M_BLANK, C_BLANK  # counterparts meet: both vanish
        if rc == C_SO_L3:
            return M_BLANK, C_SO_L0  # an arriving opposing s_o sweeps us
        if cc < C_SI_R4:
            return cm, cc + 1
        if wall_r:
            return cm, C_BLANK  # absorbed at any wall
        if rm == M_BLANK and rc == C_BLANK:
            return cm, C_BLANK  # depart
        return cm, C_SI_R4  # wait in place (passive)
    if C_SI_L0 <= cc <= C_SI_L4:
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        if del_in_l or del_in_r:
            return M_BLANK, C_BLANK
        if C_SI_R0 <= lc <= C_SI_R4:
            return M_BLANK, C_BLANK
        if lc == C_SO_R3:
            return M_BLANK, C_SO_R0
        if cc < C_SI_L4:
            return cm, cc + 1
        if wall_l:
            return cm, C_BLANK
        if lm == M_BLANK and lc == C_BLANK:
            return cm, C_BLANK
        return cm, C_SI_L4

    # ----- auxiliary and delete signals ---------------------------------
    if cc == C_AUXO_R:
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        if rm != M_BLANK or rc != C_BLANK:
            return cm, C_AUXB_L  # reflect on the first non-blank cell
        return cm, C_BLANK
    if cc == C_AUXO_L:
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0
        if lm != M_BLANK or lc != C_BLANK:
            return cm, C_AUXB_R
        return cm, C_BLANK
    if cc == C_AUXB_R:
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        return cm, C_BLANK  # moved on, was absorbed, or lost its anchor
    if cc == C_AUXB_L:
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0
        return cm, C_BLANK
    if cc == C_DEL_R:
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        return M_BLANK, C_BLANK  # always moves (arrival handled by target)
    if cc == C_DEL_L:
        if so_in_l or born_l:
            return M_BLANK, C_SO_R0
        if so_in_r or born_r:
            return M_BLANK, C_SO_L0
        return M_BLANK, C_BLANK

    # ----- blank or junk cells: arrivals and spawns ---------------------
    # double events first (mirror-symmetric annihilations)
    if (so_in_l or born_l) and (so_in_r or born_r):
        if born_l and born_r:
            return M_BLANK, C_BLANK  # length-1 segment: spawns clash, wipe
        return M_BLANK, C_CTR_F
    if born_l or so_in_l:
        return M_BLANK, C_SO_R0
    if born_r or so_in_r:
        return M_BLANK, C_SO_L0
    if del_in_l and del_in_r:
        return M_BLANK, C_BLANK
    if del_in_l:
        return M_BLANK, C_DEL_R
    if del_in_r:
        return M_BLANK, C_DEL_L
    spawn_si_l = lc == C_GY3 and lm == M_W
    spawn_si_r = rc == C_GY3 and rm == M_W
    if spawn_si_l and spawn_si_r:
        return M_BLANK, C_BLANK
    if spawn_si_l:
        return cm, C_SI_R0
    if spawn_si_r:
        return cm, C_SI_L0
    if cm == M_BLANK and cc == C_BLANK:
        si_in_l = lc == C_SI_R4
        si_in_r = rc == C_SI_L4
        if si_in_l and si_in_r:
            return M_BLANK, C_BLANK
        if si_in_l:
            return M_BLANK, C_SI_R0
        if si_in_r:
            return M_BLANK, C_SI_L0
        if lc == C_AUXO_R:
            return M_BLANK, C_AUXO_R
        if rc == C_AUXO_L:
            return M_BLANK, C_AUXO_L
        if rc == C_AUXB_L:
            return M_BLANK, C_AUXB_L
        if lc == C_AUXB_R:
            return M_BLANK, C_AUXB_R
        # fresh anchors spawn the outbound auxiliaries
        if rc == C_HALF_L_F or rc == C_CTR_F:
            return M_BLANK, C_AUXO_L
        if lc == C_HALF_R_F or lc == C_CTR_F:
            return M_BLANK, C_AUXO_R
        # resolved one-cell anchors spawn the delete toward the loser
        if lc == C_RES_L:
            return M_BLANK, C_DEL_R
        if rc == C_RES_R:
            return M_BLANK, C_DEL_L
        return M_BLANK, C_BLANK
    # junk cleaning state in an unrecognized context decays; junk Main
    # data persists until swept
    return cm, C_BLANK


@njit(cache=True)
def _build_walls_table(table):  # pragma: no cover - jitted
    n = 3 * N_CLEANING
    for l in range(n):
        lm, lc = l // N_CLEANING, l % N_CLEANING
        for c in range(n):
            cm, cc = c // N_CLEANING, c % N_CLEANING
            for r in range(n):
                rm, rc = r // N_CLEANING, r % N_CLEANING
                nm, nc = cleaning_next(lm, lc, cm, cc, rm, rc)
                table[(l * n + c) * n + r] = nm * N_CLEANING + nc


# ---------------------------------------------------------------------
# public builders
# ---------------------------------------------------------------------


class CleaningFragment:
    """The cleaning protocol packaged for composition.

    `transition` is the raw jitted (main-class, cleaning) step usable
    inside larger kernels; `standalone_rule()` tabulates the protocol
    over the plain {$, I, W} x Cleaning alphabet.  `swept(new_cleaning)`
    tells composed rules when to blank their other layers: exactly when
    an eraser (s_o or a delete signal) has just entered the cell.
    """

    def __init__(self, base: LayeredAlphabet):
        names = base.layer_names()
        if "main" not in names or "cleaning" not in names:
            raise ValueError("base alphabet needs 'main' and 'cleaning' layers")
        main = base.alphabet_of("main")
        for sym in ("I", "W", "$"):
            if sym not in main.symbols:
                raise ValueError("main layer must contain %r" % sym)
        if base.alphabet_of("cleaning").symbols != CLEANING_SYMBOLS:
            raise ValueError("cleaning layer must carry the %d protocol states"
                             % N_CLEANING)
        self.base = base
        self.transition = cleaning_next

    @staticmethod
    def main_class(symbol: str) -> int:
        if symbol == "I":
            return M_I
        if symbol == "W":
            return M_W
        return M_BLANK

    @staticmethod
    def swept(new_cleaning: int) -> bool:
        return new_cleaning in (C_SO_R0, C_SO_L0, C_DEL_R, C_DEL_L)

    def standalone_rule(self) -> CompiledRule:
        return walls_rule()


def build_cleaning_rule(base: LayeredAlphabet) -> CleaningFragment:
    """Wire the cleaning protocol to a layered alphabet.

    ``base`` must have a "main" layer containing $, I and W and a
    "cleaning" layer carrying exactly the protocol states.
    """
    return CleaningFragment(base)


def walls_alphabet() -> LayeredAlphabet:
    """The standalone two-layer alphabet of the wall protocol."""
    return LayeredAlphabet(
        [("main", Alphabet(MAIN_SYMBOLS)),
         ("cleaning", Alphabet(CLEANING_SYMBOLS))]
    )


# Empirical formatting horizon.  Over randomized debris ensembles
# (cyclic rows, n <= 160, mixed stray-wall and stray-signal debris, two
# hundred samples) the worst first-format time observed was 4.73 * n;
# the factor below leaves comfortable headroom and is what tests and
# the census harness assert against.
FORMATTING_TIME_FACTOR = 8

_WALLS_RULE_CACHE: List[CompiledRule] = []


def walls_rule() -> CompiledRule:
    """The tabulated radius-1 wall-protocol rule (126 states)."""
    if not _WALLS_RULE_CACHE:
        n = 3 * N_CLEANING
        table = np.empty(n ** 3, dtype=np.uint8)
        _build_walls_table(table)
        _WALLS_RULE_CACHE.append(
            CompiledRule.from_table(table, radius=1, states=n,
                                    descriptor="walls-protocol-v1")
        )
    return _WALLS_RULE_CACHE[0]


# ---------------------------------------------------------------------
# seeds
# ---------------------------------------------------------------------


def parse_seed(text: str, length: Optional[int] = None,
               boundary: str = "cyclic") -> LayeredConfiguration:
    """Parse compact seed notation into a wall-protocol row.

    Tokens are whitespace-separated: a Main symbol ($, I, W), optionally
    followed by a repeat count (``$9``), or ``$*`` which pads the row to
    ``length`` cells (split evenly over multiple ``$*``).  A token may
    carry a cleaning state after a slash, e.g. ``$/soL0`` or ``W/G``.

    Examples
    --------
    >>> c = parse_seed("$* I $9 I $*", length=32)
    >>> len(c)
    32
    """
    alphabet = walls_alphabet()
    tokens = text.split()
    parts: List[Tuple[int, int]] = []  # (code, count); count -1 = filler
    fillers = 0
    for tok in tokens:
        clean = "."
        if "/" in tok:
            tok, clean = tok.split("/", 1)
        if tok.endswith("*"):
            main = tok[:-1]
            if main != "$" or clean != ".":
                raise ValueError("only blank $* fillers are supported")
            parts.append((-1, -1))
            fillers += 1
            continue
        main = tok[0]
        count = 1
        if len(tok) > 1:
            count = int(tok[1:])
        if main not in MAIN_SYMBOLS:
            raise ValueError("unknown main symbol %r" % main)
        if clean not in CLEANING_SYMBOLS:
            raise ValueError("unknown cleaning state %r" % clean)
        code = alphabet.encode((main, clean))
        parts.append((code, count))
    fixed = sum(count for code, count in parts if code >= 0)
    if fillers:
        if length is None:
            raise ValueError("fillers need an explicit row length")
        pad = length - fixed
        if pad < 0:
            raise ValueError("row longer than the requested length")
        share, extra = divmod(pad, fillers)
    cells: List[int] = []
    blank = alphabet.encode(("$", "."))
    seen_fill = 0
    for code, count in parts:
        if code < 0:
            n = share + (1 if seen_fill < extra else 0)
            seen_fill += 1
            cells.extend([blank] * n)
        else:
            cells.extend([code] * count)
    if length is not None and len(cells) != length:
        raise ValueError("seed expands to %d cells, expected %d"
                         % (len(cells), length))
    background = blank if boundary == "fixed" else None
    return LayeredConfiguration(alphabet, cells, boundary, background)


# ---------------------------------------------------------------------
# segments
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """A wall-delimited interval [left, right] of a row."""

    left: int
    right: int
    birth: Optional[int]
    origin: str  # "initialized-by-I" | "preexisting" | "unknown"

    @property
    def span(self) -> int:
        """Number of interior cells."""
        return self.right - self.left - 1


def _wall_positions(config: LayeredConfiguration) -> List[int]:
    alphabet = config.alphabet
    main = alphabet.alphabet_of("main")
    w_rank = main.index("W")
    stride = alphabet.stride_of("main")
    size = alphabet.size_of("main")
    out = []
    for i, code in enumerate(config.cells):
        code = int(code)
        if alphabet.is_blank(code):
            continue
        if (code // stride) % size == w_rank:
            out.append(i)
    return out


def extract_segments(config: LayeredConfiguration,
                     birth_times: Optional[dict] = None) -> List[Segment]:
    """Maximal wall-delimited intervals of a row, left to right.

    Origin is read from the wall's guard state when the row carries a
    cleaning layer (guarded walls were initialized by an I), otherwise
    "unknown".  ``birth_times`` optionally maps wall position -> birth
    step, as recovered from a trace.
    """
    walls = _wall_positions(config)
    alphabet = config.alphabet
    has_cleaning = "cleaning" in alphabet.layer_names()
    segments = []
    for left, right in zip(walls, walls[1:]):
        if has_cleaning:
            guards = []
            for pos in (left, right):
                c = alphabet.project(int(config.cells[pos]), "cleaning")
                guards.append(c in ("G", "gy0", "gy1", "gy2", "gy3"))
            origin = "initialized-by-I" if all(guards) else "preexisting"
        else:
            origin = "unknown"
        birth = None
        if birth_times is not None:
            births = [birth_times.get(left), birth_times.get(right)]
            if None not in births:
                birth = max(births)
        segments.append(Segment(left, right, birth, origin))
    return segments


def is_formatted(config: LayeredConfiguration, segment: Segment) -> bool:
    """Whether a segment's interior is fully blank on the wall layers."""
    alphabet = config.alphabet
    main = alphabet.alphabet_of("main")
    cleaning = alphabet.alphabet_of("cleaning")
    m_stride, m_size = alphabet.stride_of("main"), alphabet.size_of("main")
    c_stride, c_size = alphabet.stride_of("cleaning"), alphabet.size_of("cleaning")
    m_blank, c_blank = main.index("$"), cleaning.index(".")
    for code in config.cells[segment.left + 1 : segment.right]:
        code = int(code)
        if alphabet.is_blank(code):
            continue
        if (code // m_stride) % m_size != m_blank:
            return False
        if (code // c_stride) % c_size != c_blank:
            return False
    return True


# ---------------------------------------------------------------------
# ternary clock
# ---------------------------------------------------------------------

CK_NONE = 0  # no clock on this cell (the left border)


@njit(cache=True)
def clock_next(left, cell):  # pragma: no cover - jitted
    """Next clock digit (codes: 0 = no clock, 1..4 = digits 0..3)."""
    if cell == CK_NONE:
        return CK_NONE
    increment = left == CK_NONE or left == 4  # border or a carry (digit 3)
    if increment:
        digit = cell - 1
        return (digit + 1 if digit < 3 else 1) + 1
    if cell == 4:  # a 3 is a 0 holding a carry: it rests to 0
        return 1
    return cell


def clock_predictor(t: int, j: int) -> int:
    """Digit of zero-initialized clock cell j (0-based) at time t.

    Cell j first moves at T_j = j + 3^j; afterwards its real-time cycle
    of length 3^(j+1) is 3^j ones, 3^j twos, one 3 and 3^j - 1 zeros.
    """
    tj = j + 3 ** j
    if t < tj:
        return 0
    tau = (t - tj) % 3 ** (j + 1)
    block = 3 ** j
    if tau == 2 * block:
        return 3
    if tau > 2 * block:
        return 0
    return 1 + tau // block


_CLOCK_RULE_CACHE: List[CompiledRule] = []


def _clock_rule() -> CompiledRule:
    if not _CLOCK_RULE_CACHE:
        table = np.empty(125, dtype=np.uint8)
        for l in range(5):
            for c in range(5):
                for r in range(5):
                    table[(l * 5 + c) * 5 + r] = clock_next(l, c)
        _CLOCK_RULE_CACHE.append(
            CompiledRule.from_table(table, radius=1, states=5,
                                    descriptor="ternary-clock-v1")
        )
    return _CLOCK_RULE_CACHE[0]


def clock_component(width: int) -> Tuple[CompiledRule, Callable[[int, int], int],
                                         LayeredConfiguration]:
    """A zero-initialized clock run plus its analytic predictor.

    Returns (rule, predictor, configuration): the configuration is a
    fixed-background row holding `width` clock digits bordered by
    undefined-clock cells; predictor(t, j) gives the digit of cell j at
    time t for cross-checking.  The rightmost cell is eventually
    periodic with period 3^width and shows the digit 3 exactly once per
    period.

    Cells store codes, not digits: code 0 is the undefined-clock border
    '.', code d+1 is digit d.  Cell j of the returned configuration
    lives at row index j + 1, so ``row[j + 1] - 1 == predictor(t, j)``
    for every recorded time t.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    clock_alphabet = LayeredAlphabet(
        [("clock", Alphabet([".", "0", "1", "2", "3"]))]
    )
    cells = [0, *([1] * width), 0]  # '.'-bordered zero digits
    config = LayeredConfiguration(clock_alphabet, cells, "fixed", background=0)
    return _clock_rule(), clock_predictor, config


STATE_CHART = """\
Cleaning-layer state chart (42 states; Main classes $, I, W)
============================================================

Movers carry a direction (R/L = direction of motion) and an occupancy
phase; a mover sits in its cell for (phases) steps, then advances.

  blank '.'            empty cleaning slot
  gy0..gy3             newborn wall guard; counts four steps, then G;
                       neighbours launch s_i when they see gy3
  G                    permanent wall guard (walls made from I)
  soR0-3 / soL0-3      outer signal, speed 1/4
  siR0-4 / siL0-4      inner signal, speed 1/5 (passive: erases nothing)
  auxoR/auxoL          anchor auxiliary, outbound at speed 1
  auxbR/auxbL          auxiliary returning to its anchor at speed 1
  hLf hLw hLr          left half of a two-cell anchor (fresh/waiting/returned)
  hRf hRw hRr          right half
  ctF ctW ctL ctR      one-cell anchor (fresh / waiting / left returned /
                       right returned)
  resL resR            one-cell anchor resolved; tag = winning side
  delR delL            delete signal hunting a losing pair's s_i

Productions
-----------
 t=1   every I becomes W+gy0 and its neighbours become s_o moving away;
       two I's at distance 2 clash-spawn onto the middle cell, which is
       wiped instead.
 t=5   cells next to a gy3 wall become s_i moving away (the s_o departs
       the same step); gy3 -> G.

Sweep
-----
 s_o advancing into a cell deletes all its content (every layer); it
 deletes unguarded walls, is absorbed by guarded walls (and by I), and
 anchors when meeting an opposing s_o: adjacent contact makes the two
 cells anchor halves; simultaneous entry into one cell makes a one-cell
 anchor.  s_o also overwrites anchor machinery and auxiliaries - only
 another s_o or a guarded wall stops it.

Comparison
----------
 A fresh anchor launches an auxiliary outward on each side.  An
 auxiliary reflects on the first non-blank cell (normally the pair's
 own s_i, else a wall) and returns.  An s_i or a wall standing directly
 beside the anchor counts as an instantaneous return (a gap too small
 for a round trip).  First return wins: the anchor reconstitutes the winner's
 s_o (sweep resumes) and sends a delete signal at the losing side,
 which erases the first s_i it meets and vanishes.  Simultaneous
 returns are a tie: both pairs vanish (this is the "merely vanish" of
 two genuine pairs, whose gaps are always equal; two equally-gapped
 forged pairs are deleted symmetrically as well).  Orphaned anchor
 halves decay; one-cell anchors are mortal because any surviving s_o
 overwrites them.

Inner signals
-------------
 s_i advances only onto fully blank cells, waits otherwise, and
 vanishes when meeting: its counterpart s_i, an opposing s_o (which
 deletes it), a delete signal, or any wall (absorbed without deleting).

Wall protection (design decision)
---------------------------------
 Walls created from I carry a permanent guard on the cleaning layer and
 absorb outer signals.  The timing-only protection argument is fragile
 once comparisons pause signals; the guard realizes the stated
 invariant (I-walls persist forever) structurally.  Guards arise only
 from I at time 1; debris walls are unguarded and get erased by the
 sweep.
"""
