import math

import pytest

from glimset.approx import (
    BUILTIN_SPECS,
    BUNDLED_MACHINES,
    Delta02Spec,
    Pi02Spec,
    builtin_delta02,
    builtin_pi02,
    delta02_enumerate,
    delta02_predicate,
    pi02_enumerate,
    slowdown,
)
from glimset.sft import is_mixing, language, mixing_distance
from glimset.words import Alphabet, Word

BIN = Alphabet("01")
AB = Alphabet("ab")

GOLDEN_WORDS_UPTO_3 = {
    "",
    "0",
    "1",
    "00",
    "01",
    "10",
    "000",
    "001",
    "010",
    "100",
    "101",
}


def golden_pi02_spec():
    return Pi02Spec(
        phi_x=lambda w, k, l: "11" not in str(w),
        phi_y=lambda w, k: str(w) == "0" * len(w),
        alphabet=BIN,
    )


def golden_delta02_spec():
    legal = lambda w: "11" not in str(w)
    return Delta02Spec(
        phi_plus=lambda w, k, l: legal(w),
        phi_minus=lambda w, k, l: not legal(w),
        alphabet=BIN,
    )


# --- Pi-0-2 -----------------------------------------------------------


@pytest.fixture(scope="module")
def golden_pi02_run():
    return pi02_enumerate(golden_pi02_spec(), 500)


def test_pi02_golden_emits_all_short_words(golden_pi02_run):
    emitted = {str(t.w) for t in golden_pi02_run}
    assert GOLDEN_WORDS_UPTO_3 <= emitted
    assert all("11" not in w for w in emitted)


def test_pi02_invariants(golden_pi02_run):
    assert golden_pi02_run
    for t in golden_pi02_run[:: max(1, len(golden_pi02_run) // 60)]:
        assert is_mixing(t.X)
        assert t.X.contains_word(t.w)
        assert t.window == t.X.window
        assert t.mixing_dist == mixing_distance(t.X)
        j = max(t.X.window, t.Y.window)
        assert language(t.Y, j) <= language(t.X, j)


def test_pi02_y_monotone(golden_pi02_run):
    for a, b in zip(golden_pi02_run, golden_pi02_run[1:]):
        assert a.Y.forbidden <= b.Y.forbidden
        j = max(a.Y.window, b.Y.window)
        assert language(b.Y, j) <= language(a.Y, j)


def test_pi02_emission_indices(golden_pi02_run):
    assert [t.m for t in golden_pi02_run] == list(range(len(golden_pi02_run)))


def test_pi02_rejecting_letter():
    spec = Pi02Spec(
        phi_x=lambda w, k, l: "b" not in str(w),
        phi_y=lambda w, k: set(str(w)) <= {"a"},
        alphabet=AB,
    )
    triples = pi02_enumerate(spec, 80)
    assert triples
    for t in triples:
        assert "b" not in str(t.w)


def test_pi02_determinism():
    a = pi02_enumerate(golden_pi02_spec(), 120)
    b = pi02_enumerate(golden_pi02_spec(), 120)
    assert a == b


def test_pi02_empty_y_is_an_error():
    spec = Pi02Spec(
        phi_x=lambda w, k, l: "11" not in str(w),
        phi_y=lambda w, k: len(w) > 0,  # rejects the empty word: Y empty
        alphabet=BIN,
    )
    with pytest.raises(ValueError):
        pi02_enumerate(spec, 30)


def test_pi02_rounds_validation():
    with pytest.raises(ValueError):
        pi02_enumerate(golden_pi02_spec(), 0)


# --- Delta-0-2 --------------------------------------------------------


@pytest.fixture(scope="module")
def golden_delta02_run():
    return delta02_enumerate(golden_delta02_spec(), 400)


def test_delta02_predicate_trivial_race():
    spec = Delta02Spec(
        phi_plus=lambda w, k, l: True,
        phi_minus=lambda w, k, l: False,
        alphabet=BIN,
    )
    w = BIN.word("01")
    for n in range(2, 21):
        assert delta02_predicate(spec, w, n)


def test_delta02_golden_tail_language(golden_delta02_run):
    triples = golden_delta02_run
    assert triples
    tail = triples[3 * len(triples) // 4 :]
    want = {"00", "01", "10"}
    for t in tail:
        assert {str(v) for v in language(t.X, 2)} == want
    tail_words = {str(t.w) for t in tail}
    assert GOLDEN_WORDS_UPTO_3 <= tail_words


def test_delta02_golden_only_legal_words(golden_delta02_run):
    for t in golden_delta02_run:
        assert "11" not in str(t.w)
        assert t.Y is None
        assert t.X.contains_word(t.w)


def test_delta02_invariants(golden_delta02_run):
    run = golden_delta02_run
    for t in run[:: max(1, len(run) // 60)]:
        assert is_mixing(t.X)
        assert t.window == t.X.window
        assert t.mixing_dist == mixing_distance(t.X)


def test_delta02_determinism():
    a = delta02_enumerate(golden_delta02_spec(), 150)
    b = delta02_enumerate(golden_delta02_spec(), 150)
    assert a == b


# --- slowdown ---------------------------------------------------------


def test_slowdown_identity(golden_delta02_run):
    triples = golden_delta02_run[:40]
    assert slowdown(lambda m: m, triples) == list(triples)


def test_slowdown_half_repeats(golden_delta02_run):
    triples = golden_delta02_run[:10]
    out = slowdown(lambda m: m // 2, triples)
    assert len(out) == 20
    assert out[::2] == list(triples) and out[1::2] == list(triples)


def test_slowdown_rejects_bad_schedule():
    with pytest.raises(ValueError):
        slowdown(lambda m: 2 * m, [1, 2, 3, 4, 5])
    with pytest.raises(ValueError):
        slowdown([0, 0, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        slowdown(lambda m: 0, [1, 2, 3])  # never terminates


def test_slowdown_scale_audit(golden_pi02_run):
    triples = golden_pi02_run
    scales = [t.scale for t in triples]
    sched = []
    idx = 0
    m = 0
    while math.log2(m + 2) < scales[0]:
        m += 1
    sched.extend([0] * (m + 1))
    while idx + 1 < len(scales) and len(sched) < 5000:
        m = len(sched)
        if scales[idx + 1] <= math.log2(m + 2):
            idx += 1
        sched.append(idx)
    out = slowdown(sched, triples)
    assert out
    for m, t in enumerate(out):
        assert t.scale <= math.log2(m + 2)


# --- built-ins --------------------------------------------------------


def test_builtin_registry():
    assert set(BUILTIN_SPECS["pi02"]) == {"goldenmean", "evenshift", "halting"}
    assert set(BUILTIN_SPECS["delta02"]) == {"goldenmean", "evenshift"}
    with pytest.raises(ValueError):
        builtin_pi02("nope")
    with pytest.raises(ValueError):
        builtin_delta02("nope")


def test_builtin_goldenmean_matches_handrolled():
    ours = pi02_enumerate(golden_pi02_spec(), 100)
    theirs = pi02_enumerate(builtin_pi02("goldenmean"), 100)
    assert ours == theirs


def test_builtin_evenshift_delta():
    triples = delta02_enumerate(builtin_delta02("evenshift"), 300)
    assert triples
    tail = triples[3 * len(triples) // 4 :]
    # the even shift has every length-3 word except "010"
    want = {"000", "001", "011", "100", "101", "110", "111"}
    for t in tail[:: max(1, len(tail) // 40)]:
        assert {str(v) for v in language(t.X, 3)} == want


def test_builtin_halting_fires_then_freezes():
    assert BUNDLED_MACHINES[0][1] == 30
    triples = pi02_enumerate(builtin_pi02("halting"), 80)
    assert triples
    # while the probe machine has not halted, words with "11" fire and
    # get emitted; they stop firing after its halting time
    assert any("11" in str(t.w) for t in triples)
    assert all(is_mixing(t.X) for t in triples[:: max(1, len(triples) // 30)])


def test_word_stream_order():
    from glimset.approx import _word_stream

    stream = _word_stream(BIN)
    first = [str(next(stream)) for _ in range(7)]
    assert first == ["", "0", "1", "00", "01", "10", "11"]
