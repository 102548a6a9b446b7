import hashlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pufbind.errors import CapacityError, ParameterError
from pufbind.fixtures import (
    REFERENCE_C,
    REFERENCE_KEEP,
    reference_partition,
    reference_table,
)
from pufbind.logic_encode import (
    ParamTable,
    SopExprList,
    Term,
    TruthTable,
    build_partition,
    build_tobin,
    canonical_text,
    derive_truth_tables,
    eval_exprs,
    hash_exprs,
    literal_count,
    make_exprs,
    minimize,
    parse_exprs,
    synthesize_sop,
    tobin_from_dict,
    tobin_to_dict,
)


def _tt_equal(a: SopExprList, b: SopExprList) -> bool:
    assert a.num_vars == b.num_vars
    return all(eval_exprs(a, x) == eval_exprs(b, x) for x in range(1 << a.num_vars))


def _pipeline(keep):
    table = reference_table()
    tb = build_tobin(table)
    tts = derive_truth_tables(table, reference_partition(), tb, REFERENCE_C, keep=keep)
    return table, tb, tts


# --- parameter tables -------------------------------------------------------


def test_table_needs_three_alternatives():
    with pytest.raises(ParameterError):
        ParamTable(((1, 2, 3), (4, 5, 6), (7, 8, 9)))


def test_table_rejects_duplicate_preferred_row():
    with pytest.raises(ParameterError):
        ParamTable(((1, 2, 3), (4, 5, 6), (1, 2, 3), (7, 8, 9)))


def test_table_rejects_short_rows():
    with pytest.raises(ParameterError):
        ParamTable(((1, 2), (3, 4), (5, 6), (7, 8)))


# --- value encoding ---------------------------------------------------------


def test_tobin_reference_codes():
    table, tb, _ = _pipeline("low")
    assert tb.mode == "integer" and tb.n == 4
    assert tb.encode_triple((2, 3, 5)) == 0b0010_0011_0101
    assert tb.encode_triple((8, 6, 3)) == 0b1000_0110_0011
    assert tb.decode_triple(0b0010_0011_0101) == (2, 3, 5)
    assert tb.decode_triple(0b0001_0000_1001) == (1, 0, 9)


def test_tobin_round_trip_all_rows():
    table = reference_table()
    tb = build_tobin(table)
    for t in table.triples:
        assert tb.decode_triple(tb.encode_triple(t)) == t


def test_tobin_padding_codes_decode_to_raw_value():
    tb = build_tobin(reference_table())
    # 15 is not a table value; integer mode hands the raw number back
    assert tb.decode_value(15) == 15


def test_tobin_index_mode_for_floats():
    table = ParamTable(((0.5, 2.0, 30), (0.25, 1.0, 15), (1.0, 4.0, 60), (0.125, 0.5, 8)))
    tb = build_tobin(table)
    assert tb.mode == "index"
    for t in table.triples:
        assert tb.decode_triple(tb.encode_triple(t)) == t
    doc = tobin_to_dict(tb)
    assert doc["mode"] == "index"
    back = tobin_from_dict(doc)
    assert back.decode_triple(back.encode_triple(table.triples[0])) == table.triples[0]


def test_tobin_width_guard():
    table = ParamTable(((1, 2, 3), (4, 5, 6), (7, 8, 9), (10, 11, 12)))
    with pytest.raises(ParameterError):
        build_tobin(table, n=3)  # 12 needs four bits; only 2^3 codes


@given(st.integers(0, 2**12 - 1))
@settings(max_examples=50, deadline=None)
def test_tobin_decode_total(word):
    tb = build_tobin(reference_table())
    triple = tb.decode_triple(word)
    assert len(triple) == 3


# --- partitions -------------------------------------------------------------


def test_partition_reference_classes():
    part = reference_partition()
    assert [sorted(cls) for cls in part.classes] == [[0, 3], [1, 2], [4, 5], [6, 7]]


def test_partition_properties_random_seeds():
    for seed in range(50):
        part = build_partition(4, 4, r=seed % 16, seed=seed)
        seen = set()
        for cls in part.classes:
            assert cls
            assert not (seen & cls)
            seen |= cls
        assert seen == set(range(16))
        assert part.class_of(seed % 16) == 0


def test_partition_capacity_errors():
    with pytest.raises(CapacityError):
        build_partition(2, 4, r=0)  # 2^2 < 5
    with pytest.raises(CapacityError):
        build_partition(3, 7, r=0)  # needs k >= 4
    with pytest.raises(CapacityError):
        build_partition(21, 3, r=0)


def test_partition_r_must_fit():
    with pytest.raises(ParameterError):
        build_partition(3, 3, r=8)


# --- truth tables -----------------------------------------------------------

F_WORDS = {
    0: 0b0010_0011_0101,
    3: 0b0010_0011_0101,
    1: 0b0011_0011_0000,
    2: 0b0011_0011_0000,
    4: 0b0001_0000_1001,
    5: 0b0001_0000_1001,
    6: 0b1000_0110_0011,
    7: 0b1000_0110_0011,
}


def test_truth_table_values_match_reference():
    _, _, tts = _pipeline(REFERENCE_KEEP)
    for a, word in F_WORDS.items():
        assert tts.f.values[a] == word
    # keep="high": the first two classes reroute to row 2, the rest stay
    for a in (0, 3, 1, 2):
        assert tts.f_prime.values[a] == 0b0001_0000_1001
    for a in (4, 5, 6, 7):
        assert tts.f_prime.values[a] == F_WORDS[a]


def test_fallback_keep_low_reaches_low_rows_only():
    table, tb, tts = _pipeline("low")
    codes = {tb.encode_triple(t) for t in table.triples[1 : REFERENCE_C + 1]}
    assert set(tts.f_prime.values) == codes


def test_fallback_never_contains_preferred_row():
    for keep in ("low", "high"):
        table, tb, tts = _pipeline(keep)
        assert tb.encode_triple(table.triples[0]) not in set(tts.f_prime.values)


def test_c_range_validation():
    table = reference_table()
    tb = build_tobin(table)
    part = reference_partition()
    for bad_c in (0, 1, 4):
        with pytest.raises(ParameterError):
            derive_truth_tables(table, part, tb, bad_c)
    with pytest.raises(ParameterError):
        derive_truth_tables(table, part, tb, 2, keep="middle")


# --- SOP synthesis and evaluation -------------------------------------------


def test_reference_empty_care_sets():
    _, _, tts = _pipeline(REFERENCE_KEEP)
    phi = synthesize_sop(tts.f)
    assert phi.exprs[1] == ()
    assert phi.exprs[4] == ()
    assert canonical_text(SopExprList(3, (phi.exprs[1],))) == "0"


def test_synthesized_matches_table_exhaustively():
    for keep in ("low", "high"):
        _, _, tts = _pipeline(keep)
        for tt in (tts.f, tts.f_prime):
            exprs = synthesize_sop(tt)
            for x in range(8):
                assert eval_exprs(exprs, x) == tt.values[x]


def test_eval_rejects_wide_assignment():
    _, _, tts = _pipeline("low")
    exprs = synthesize_sop(tts.f)
    with pytest.raises(ParameterError):
        eval_exprs(exprs, 8)


def test_eval_constant_zero():
    exprs = make_exprs(3, [[], []])
    assert eval_exprs(exprs, 5) == 0


# --- minimization -----------------------------------------------------------


def test_minimize_absorbs_free_variable():
    # x0 x1 ~x2 + x0 x1 x2 collapses to x0 x1
    terms = (Term(0b111, 0b110), Term(0b111, 0b111))
    exprs = make_exprs(3, [terms])
    mini = minimize(exprs)
    assert canonical_text(mini) == "x0x1"
    assert _tt_equal(exprs, mini)


def test_minimize_keeps_constants():
    zero = make_exprs(3, [[]])
    assert minimize(zero).exprs[0] == ()
    full = make_exprs(2, [[Term(0b11, v) for v in range(4)]])
    assert canonical_text(minimize(full)) == "1"


def test_minimize_never_raises_literal_count():
    from random import Random

    rng = Random(99)
    for _ in range(30):
        k = rng.randint(2, 6)
        values = [rng.randrange(2) for _ in range(1 << k)]
        tt = TruthTable(k=k, width=1, values=values)
        syn = synthesize_sop(tt)
        mini = minimize(syn)
        assert literal_count(mini) <= literal_count(syn)
        assert _tt_equal(syn, mini)


def test_minimize_heuristic_path_above_exact_limit():
    from random import Random

    rng = Random(7)
    k = 13  # one past the exact-minimizer ceiling
    on = sorted(rng.sample(range(1 << k), 40))
    tt = TruthTable(k=k, width=1, values=[1 if x in set(on) else 0 for x in range(1 << k)])
    syn = synthesize_sop(tt)
    mini = minimize(syn)
    assert literal_count(mini) <= literal_count(syn)
    for x in on[:10]:
        assert eval_exprs(mini, x) == 1
    for x in range(100):
        assert eval_exprs(mini, x) == tt.values[x]


# --- canonical text, parsing, hashing ---------------------------------------


def test_canonical_text_layout():
    exprs = make_exprs(3, [
        [Term(0b110, 0b100), Term(0b101, 0b001)],
        [],
        [Term(0b111, 0b111)],
    ])
    assert canonical_text(exprs) == "x0~x1+~x0x2;0;x0x1x2"


def test_parse_round_trip():
    text = "x0~x1+~x0x2;0;x0x1x2;1"
    exprs = parse_exprs(text, 3)
    assert canonical_text(exprs) == text


@given(st.integers(2, 5), st.data())
@settings(max_examples=40, deadline=None)
def test_parse_canonical_round_trip_property(k, data):
    terms = data.draw(
        st.lists(
            st.tuples(st.integers(0, (1 << k) - 1), st.integers(0, (1 << k) - 1)),
            max_size=6,
        )
    )
    exprs = make_exprs(k, [[Term(c, v & c) for c, v in terms]])
    text = canonical_text(exprs)
    back = parse_exprs(text, k)
    assert canonical_text(back) == text
    assert _tt_equal(exprs, back)


def test_parse_rejects_garbage():
    for bad in ("x0x0", "x9", "x0+ x1", "y0", "~", "x0;;x1"):
        with pytest.raises(ParameterError):
            parse_exprs(bad, 3)


def test_hash_is_sha256_of_canonical_text():
    exprs = make_exprs(3, [[Term(0b111, 0b110), Term(0b111, 0b111)]])
    expected = hashlib.sha256(canonical_text(exprs).encode()).digest()
    assert hash_exprs(exprs) == expected


def test_hash_changes_with_semantics():
    a = make_exprs(3, [[Term(0b111, 0b110)]])
    b = make_exprs(3, [[Term(0b111, 0b010)]])
    assert hash_exprs(a) != hash_exprs(b)
