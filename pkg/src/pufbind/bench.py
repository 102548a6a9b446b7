"""Scaling benchmark: expression size and evaluation cost versus k and m.

Each run builds a real bundle around a synthetic table (one fast
noiseless enrollment is shared across runs), then records the literal
count of the minimized real expressions, the mean wall time of a single
expression evaluation, and the serialized bundle size.  Growth in k blows
the expressions up roughly exponentially; growth in m at fixed k mostly
reshuffles class contents and barely moves evaluation cost.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import dataclass
from io import StringIO
from random import Random

from . import binding
from .binding import bind, bundle_to_dict, recover_exprs
from .enrollment import SamplingPlan, enroll
from .errors import ParameterError
from .logic_encode import ParamTable, eval_exprs, literal_count
from .sram_sim import new_device

_VALUE_RANGE = 12  # keeps the value encoding at n=4 across every m swept


@dataclass
class BenchRow:
    k: int
    m: int
    rep: int
    expr_literal_count: int
    eval_time_ns: float
    bundle_bytes: int


def _random_table(m: int, rng: Random) -> ParamTable:
    triples = []
    seen = set()
    while len(triples) < m + 1:
        t = (rng.randrange(_VALUE_RANGE), rng.randrange(_VALUE_RANGE), rng.randrange(_VALUE_RANGE))
        if t not in seen:
            seen.add(t)
            triples.append(t)
    return ParamTable(tuple(triples))


def _shared_record(max_k: int):
    key_len = binding.ENC_KEY_LEN + max(2, math.ceil(max_k / 8))
    device = new_device(314159, cell_count=64, stable_fraction=1.0, epsilon=0.0)
    plan = SamplingPlan(startups_per_temperature=2)
    return enroll(device, plan, sz=32, hd=1, key_len=key_len, seed=314159)


def run_bench(
    k_values,
    m_values,
    reps: int = 3,
    seed: int = 0,
    eval_rounds: int = 100,
) -> list[BenchRow]:
    """Full cross product of k_values x m_values, skipping invalid pairs."""
    k_values = sorted(set(k_values))
    m_values = sorted(set(m_values))
    if not k_values or not m_values or reps < 1:
        raise ParameterError("need nonempty k and m ranges and reps >= 1")
    rec = _shared_record(max(k_values))
    rows = []
    for k in k_values:
        for m in m_values:
            if k < int(math.floor(math.log2(m + 1))) + 1:
                continue  # partition cannot host m+1 classes at this width
            for rep in range(reps):
                rng = Random((k, m, rep, seed).__repr__())
                table = _random_table(m, rng)
                bundle = bind(table, rec, k=k, seed=rng.randrange(2**31))
                phi = recover_exprs(bundle, rec.key[: binding.ENC_KEY_LEN])
                assignments = [rng.randrange(1 << k) for _ in range(eval_rounds)]
                t0 = time.perf_counter_ns()
                for a in assignments:
                    eval_exprs(phi, a)
                elapsed = time.perf_counter_ns() - t0
                doc = json.dumps(bundle_to_dict(bundle), separators=(",", ":"))
                rows.append(
                    BenchRow(
                        k=k,
                        m=m,
                        rep=rep,
                        expr_literal_count=literal_count(phi),
                        eval_time_ns=elapsed / eval_rounds,
                        bundle_bytes=len(doc.encode()),
                    )
                )
    return rows


def summarize(rows: list[BenchRow]) -> dict:
    """Mean/std of literal count and eval time per (k, m)."""
    groups: dict[tuple[int, int], list[BenchRow]] = {}
    for r in rows:
        groups.setdefault((r.k, r.m), []).append(r)
    out = {}
    for key, members in sorted(groups.items()):
        lits = [r.expr_literal_count for r in members]
        times = [r.eval_time_ns for r in members]
        out[key] = {
            "literal_mean": statistics.fmean(lits),
            "literal_std": statistics.pstdev(lits),
            "eval_ns_mean": statistics.fmean(times),
            "eval_ns_std": statistics.pstdev(times),
            "bundle_bytes_mean": statistics.fmean(r.bundle_bytes for r in members),
        }
    return out


def bench_to_csv(rows: list[BenchRow]) -> str:
    buf = StringIO()
    buf.write("# pufbind bench v1\n")
    buf.write("k,m,rep,expr_literal_count,eval_time_ns,bundle_bytes\n")
    for r in rows:
        buf.write(f"{r.k},{r.m},{r.rep},{r.expr_literal_count},{r.eval_time_ns:.1f},{r.bundle_bytes}\n")
    for (k, m), s in summarize(rows).items():
        buf.write(f"{k},{m},mean,{s['literal_mean']:.1f},{s['eval_ns_mean']:.1f},{s['bundle_bytes_mean']:.1f}\n")
        buf.write(f"{k},{m},std,{s['literal_std']:.1f},{s['eval_ns_std']:.1f},\n")
    return buf.getvalue()


def plot_bench(rows: list[BenchRow], path: str) -> None:
    """Literal count and eval time versus k (one line per m)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    summary = summarize(rows)
    ms = sorted({m for _, m in summary})
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for m in ms:
        ks = sorted(k for k, mm in summary if mm == m)
        ax1.plot(ks, [summary[(k, m)]["literal_mean"] for k in ks], marker="o", label=f"m={m}")
        ax2.plot(ks, [summary[(k, m)]["eval_ns_mean"] for k in ks], marker="o", label=f"m={m}")
    for ax, ylabel in ((ax1, "literal count"), (ax2, "eval time (ns)")):
        ax.set_xlabel("k")
        ax.set_ylabel(ylabel)
        ax.set_yscale("log")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
