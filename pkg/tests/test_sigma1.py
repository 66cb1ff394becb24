"""Tests for the halting-enumeration automaton.

Expected settled contents are computed two independent ways: the frozen
strings below are derived by hand from the pairing walk and the bundled
machines' halting times (themselves hand-steppable in under ten steps),
while ``eventual_segment_content`` recomputes them with a pure tape
interpreter.  The automaton is then required to agree with both.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glimset.engine import run, step
from glimset.sigma1 import (
    PAIRING_RANGE,
    PairingFn,
    TmEnumeration,
    TmMachine,
    bin_word,
    build_sigma1_rule,
    demo_enumeration,
    eventual_segment_content,
    format_tm_file,
    pairing,
    parse_tm_file,
    read_segments,
    settled_segments,
    sigma1_alphabet,
    sigma1_budget,
    sigma1_seed,
    stabilize,
    unpairing,
)


@pytest.fixture(scope="module")
def enum():
    return demo_enumeration()


@pytest.fixture(scope="module")
def alphabet(enum):
    return sigma1_alphabet(enum)


@pytest.fixture(scope="module")
def rule(enum):
    return build_sigma1_rule(enum)


# ---------------------------------------------------------------------
# machines
# ---------------------------------------------------------------------

# Hand-checked halting times of the bundled machines.  edge-bounce pins
# down the left-edge convention (moving left on cell 0 stays put) and
# zigzag the read-back of previously written symbols.
DEMO_HALTS = {0: 0, 1: None, 2: 2, 3: 7, 4: None}


def test_demo_halt_times(enum):
    assert len(enum) == 5
    for n, want in DEMO_HALTS.items():
        assert enum[n].halt_time(1000) == want


def test_halts_within_boundaries(enum):
    assert enum.halts_within(0, 0)          # initial state is final
    assert not enum.halts_within(2, 1)      # halts at exactly 2
    assert enum.halts_within(2, 2)
    assert enum.halts_within(3, 7)
    assert not enum.halts_within(3, 6)
    assert not enum.halts_within(4, 10_000)  # blinker loops forever
    assert not enum.halts_within(99, 10_000)  # beyond the finite prefix
    with pytest.raises(ValueError):
        enum.halts_within(-1, 5)


def test_missing_transition_hangs():
    mach = TmMachine("stuck", "a", "z", {("a", "."): ("b", "1", "R")})
    assert mach.halt_time(500) is None


def test_machine_validation():
    with pytest.raises(ValueError):
        TmMachine("bad name", "a", "z")
    with pytest.raises(ValueError):
        TmMachine("m", "a", "z", {("a", "."): ("z", ".", "X")})
    with pytest.raises(ValueError):
        TmMachine("m", "a|b", "z")


def test_tm_file_round_trip(enum):
    text = format_tm_file(enum)
    again = parse_tm_file(text)
    assert format_tm_file(again) == text
    assert again.content_hash() == enum.content_hash()


def test_tm_file_errors():
    with pytest.raises(ValueError):
        parse_tm_file("machine m\ninitial a\n")         # no final line
    with pytest.raises(ValueError):
        parse_tm_file("machine m\ninitial a\nfinal z\na . z\n")  # short line
    with pytest.raises(ValueError):
        parse_tm_file("machine m\ninitial a\nfinal z\n"
                      "a . z . S\na . z 1 S\n")         # duplicate key
    with pytest.raises(ValueError):
        parse_tm_file("# only comments\n")


def test_tm_file_comments_and_blanks():
    enum = parse_tm_file("# header\nmachine m # trailing\ninitial a\nfinal a\n\n\n")
    assert enum[0].halt_time(1) == 0


def test_duplicate_machine_names():
    mach = TmMachine("m", "a", "a")
    with pytest.raises(ValueError):
        TmEnumeration([mach, mach])


# ---------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------

def test_pairing_small_table():
    # first two diagonals of the shifted Cantor walk, by hand
    want = {2: (0, 0), 3: (0, 1), 4: (1, 0), 5: (0, 2), 6: (1, 1), 7: (2, 0)}
    for ell, nm in want.items():
        assert pairing(ell) == nm


def test_pairing_round_trip_full_range():
    seen = set()
    for ell in range(2, PAIRING_RANGE + 1):
        n, m = pairing(ell)
        assert unpairing(n, m) == ell
        assert (n, m) not in seen
        seen.add((n, m))


def test_pairing_length_constraint():
    # every decoded pair leaves room for "$ bin(n)" in the segment
    for ell in range(2, PAIRING_RANGE + 1):
        n, _m = pairing(ell)
        assert ell - (len(bin_word(n)) + 1) >= 0


def test_pairing_range_errors():
    for bad in (-3, 0, 1, PAIRING_RANGE + 1):
        with pytest.raises(ValueError):
            pairing(bad)
    with pytest.raises(ValueError):
        unpairing(-1, 0)
    with pytest.raises(ValueError):
        unpairing(PAIRING_RANGE, 0)  # lands far past the cap
    small = PairingFn(max_length=10)
    with pytest.raises(ValueError):
        small(11)


@given(st.integers(0, 60), st.integers(0, 60))
def test_pairing_inverse_property(n, m):
    assert pairing(unpairing(n, m)) == (n, m)


def test_bin_word():
    assert bin_word(0) == "0"
    assert bin_word(1) == "1"
    assert bin_word(2) == "10"
    assert bin_word(11) == "1011"
    with pytest.raises(ValueError):
        bin_word(-1)


# ---------------------------------------------------------------------
# the settled-content oracle
# ---------------------------------------------------------------------

# Hand-frozen from the pairing table and DEMO_HALTS: ell=2,3,5 decode to
# machine 0 (halts at once), ell=4 to the glider, ell=7 to edge-bounce
# with budget 0 < 2, ell=14 to (2, 2) which just halts, ell=22 to the
# out-of-prefix index 5.
ORACLE_FROZEN = {
    2: "$0",
    3: "$0$",
    4: "$$$$",
    5: "$0$$$",
    7: "$" * 7,
    14: "$10" + "$" * 11,
    22: "$" * 22,
}


def test_oracle_frozen_values(enum):
    for ell, want in ORACLE_FROZEN.items():
        assert "".join(eventual_segment_content(ell, enum)) == want


def test_oracle_rejects_tiny_segments(enum):
    with pytest.raises(ValueError):
        eventual_segment_content(1, enum)


# ---------------------------------------------------------------------
# the automaton against the oracle
# ---------------------------------------------------------------------

def test_automaton_matches_oracle_30_lengths(enum, alphabet, rule):
    for ell in range(2, 32):
        lengths = (ell, ell + 1)
        fixed, _t = stabilize(rule, sigma1_seed(alphabet, lengths),
                              sigma1_budget(lengths))
        got = dict(read_segments(fixed))
        assert got[1] == "".join(eventual_segment_content(ell, enum)), ell
        # the wrap-around segment is served by the first wall
        assert got[ell + 2] == "".join(eventual_segment_content(ell + 1, enum)), ell


def test_automaton_deep_budget_paths(enum, alphabet, rule):
    # ell=60 decodes to (3, 7): zigzag halts at exactly its budget;
    # ell=100 decodes to (7, 6): index past the block-counter saturation
    for ell in (60, 100):
        lengths = (ell, ell + 1)
        fixed, _t = stabilize(rule, sigma1_seed(alphabet, lengths),
                              sigma1_budget(lengths))
        got = dict(read_segments(fixed))
        assert got[1] == "".join(eventual_segment_content(ell, enum))
    assert pairing(60) == (3, 7)


def test_settled_segments_wrapper(enum, alphabet, rule):
    segs = settled_segments((14, 4), enum, rule=rule, alphabet=alphabet)
    assert segs == [(1, "$10" + "$" * 11), (16, "$$$$")]


def test_degenerate_segments_blank_out(enum, alphabet, rule):
    # lengths 0 and 1 sit below the pairing range; they settle to blanks
    segs = settled_segments((0, 1, 5), enum, rule=rule, alphabet=alphabet)
    assert segs == [(1, ""), (2, "$"), (4, "$0$$$")]


def test_settled_row_is_fixed_point(enum, alphabet, rule):
    lengths = (14, 15)
    fixed, t = stabilize(rule, sigma1_seed(alphabet, lengths),
                         sigma1_budget(lengths))
    trace = run(rule, fixed, 2 * t + 10)
    assert np.array_equal(trace.rows[0], trace.rows[-1])


def test_walls_are_permanent(alphabet, rule):
    cur = sigma1_seed(alphabet, (9, 12))
    for _t in range(400):
        cur = step(rule, cur)
        mains = [alphabet.decode(int(c))[0] for c in cur.cells]
        assert {i for i, m in enumerate(mains) if m in ("I", "W")} == {0, 10}


def test_blocking_words_shield_the_left_segment(alphabet, rule):
    # junk right of the serving wall must never influence the cells to
    # its left: the wall's main and cleaning trajectories are fixed and
    # heads neither cross nor read through walls.
    base = sigma1_seed(alphabet, (11, 13)).cells.copy()
    wall = 12
    rng = np.random.default_rng(7)
    histories = []
    for _trial in range(3):
        cells = base.copy()
        cells[wall + 1:] = rng.integers(0, alphabet.total,
                                        size=cells.size - wall - 1)
        cur = sigma1_seed(alphabet, (11, 13))
        cur = type(cur)(alphabet, cells, "cyclic")
        rows = []
        for _t in range(400):
            rows.append(cur.cells[:wall].copy())
            cur = step(rule, cur)
        histories.append(np.array(rows))
    assert all(np.array_equal(histories[0], h) for h in histories[1:])
    # and the clean-seeded left segment still settles to its content
    assert "".join(alphabet.decode(int(c))[0] for c in cur.cells[1:wall]) \
        == "".join(eventual_segment_content(11, demo_enumeration()))


def test_seed_validation(alphabet):
    with pytest.raises(ValueError):
        sigma1_seed(alphabet, ())
    with pytest.raises(ValueError):
        sigma1_seed(alphabet, (3, -1))


def test_read_segments_requires_walls(alphabet):
    cfg = sigma1_seed(alphabet, (4,))
    blank = alphabet.encode(("$", ".", "."))
    cells = np.full(6, blank)
    with pytest.raises(ValueError):
        read_segments(type(cfg)(alphabet, cells, "cyclic"))


def test_stabilize_budget_error(alphabet, rule):
    seed = sigma1_seed(alphabet, (8, 9))
    with pytest.raises(RuntimeError):
        stabilize(rule, seed, 10)
