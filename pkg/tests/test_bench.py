import pytest

from pufbind.bench import bench_to_csv, run_bench, summarize
from pufbind.errors import ParameterError


@pytest.fixture(scope="module")
def small_rows():
    return run_bench(k_values=[4, 6], m_values=[3], reps=2, seed=0, eval_rounds=10)


def test_one_row_per_rep_and_pair(small_rows):
    keys = [(r.k, r.m, r.rep) for r in small_rows]
    assert keys == [(4, 3, 0), (4, 3, 1), (6, 3, 0), (6, 3, 1)]


def test_rows_carry_positive_measurements(small_rows):
    for row in small_rows:
        assert row.expr_literal_count > 0
        assert row.eval_time_ns > 0
        assert row.bundle_bytes > 100


def test_literal_count_grows_with_k(small_rows):
    by_k = summarize(small_rows)
    assert by_k[(6, 3)]["literal_mean"] > by_k[(4, 3)]["literal_mean"]


def test_determinism(small_rows):
    again = run_bench(k_values=[4, 6], m_values=[3], reps=2, seed=0, eval_rounds=10)
    assert [(r.k, r.m, r.rep, r.expr_literal_count, r.bundle_bytes) for r in again] == [
        (r.k, r.m, r.rep, r.expr_literal_count, r.bundle_bytes) for r in small_rows
    ]


def test_incompatible_pairs_are_skipped():
    # k=3 offers 8 assignments, m=15 needs 16 classes
    assert run_bench(k_values=[3], m_values=[15], reps=1, eval_rounds=5) == []


def test_parameter_validation():
    with pytest.raises(ParameterError):
        run_bench(k_values=[], m_values=[3])
    with pytest.raises(ParameterError):
        run_bench(k_values=[4], m_values=[])
    with pytest.raises(ParameterError):
        run_bench(k_values=[4], m_values=[3], reps=0)


def test_csv_layout(small_rows):
    text = bench_to_csv(small_rows)
    lines = text.splitlines()
    assert lines[0] == "# pufbind bench v1"
    assert lines[1] == "k,m,rep,expr_literal_count,eval_time_ns,bundle_bytes"
    detail = [l for l in lines[2:] if l.split(",")[2] not in ("mean", "std")]
    summary = [l for l in lines[2:] if l.split(",")[2] in ("mean", "std")]
    assert len(detail) == len(small_rows)
    assert len(summary) == 2 * len(summarize(small_rows))
    first = detail[0].split(",")
    assert first[0] == "4" and first[1] == "3" and first[2] == "0"


def test_summary_stats(small_rows):
    stats = summarize(small_rows)
    assert set(stats) == {(4, 3), (6, 3)}
    for s in stats.values():
        assert s["literal_std"] >= 0.0
        assert s["eval_ns_mean"] > 0.0
        assert s["bundle_bytes_mean"] > 0.0


def test_plot_smoke(tmp_path, small_rows):
    pytest.importorskip("matplotlib")
    from pufbind.bench import plot_bench

    out = tmp_path / "bench.png"
    plot_bench(small_rows, out)
    assert out.exists() and out.stat().st_size > 0
