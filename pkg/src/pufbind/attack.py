"""Attack harnesses against a protected bundle.

Two adversaries.  The static one holds only the bundle: it can enumerate
the cleartext fallback expressions over all assignments and learn which
suboptimal triples a copied installation may land on, but nothing in the
bundle evaluates to the preferred triple.  The dynamic one additionally
holds a leaked copy of the real expressions and a clone of the plant: it
enumerates both expression lists, takes the set difference of the decoded
triples, and ranks those candidates by simulated settling time, which
recovers the preferred triple at a simulation cost that scales with the
size of the difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .binding import ProtectedBundle
from .errors import ParameterError
from .logic_encode import SopExprList, eval_exprs, hash_exprs
from .pid_sim import DEFAULT_HORIZON, PidConfig, PlantModel, simulate


@dataclass
class AttackReport:
    scenario: str
    s_prime: list  # triples reachable through the fallback expressions
    s: list | None = None  # triples reachable through the real expressions
    s_minus: list | None = None  # s without s_prime: the candidates to try
    best_triple: tuple | None = None
    effort: dict = field(default_factory=dict)


def _image(bundle: ProtectedBundle, exprs: SopExprList) -> set:
    return {
        bundle.tobin.decode_triple(eval_exprs(exprs, a))
        for a in range(1 << bundle.k)
    }


def _ordered(triples) -> list:
    return sorted(triples)


def static_enumerate(bundle: ProtectedBundle) -> AttackReport:
    """Enumerate the fallback expressions over every assignment."""
    s_prime = _image(bundle, bundle.phi_prime)
    return AttackReport(
        scenario="static",
        s_prime=_ordered(s_prime),
        effort={"evaluations": 1 << bundle.k, "simulations": 0},
    )


def clone_dynamic_attack(
    bundle: ProtectedBundle,
    leaked_phi: SopExprList,
    plant: PlantModel,
    cfg: PidConfig | None = None,
    horizon: int = DEFAULT_HORIZON,
) -> AttackReport:
    """Rank the candidate triples by settling time on a cloned plant.

    leaked_phi must be the bundle's real expression list; the hash check
    enforces that precondition.
    """
    if hash_exprs(leaked_phi) != bundle.hash_value:
        raise ParameterError("leaked expressions do not match the bundle hash")
    if cfg is None:
        from .fixtures import demo_loop_config

        cfg = demo_loop_config()

    s = _image(bundle, leaked_phi)
    s_prime = _image(bundle, bundle.phi_prime)
    candidates = _ordered(s - s_prime)

    best = None
    best_settling = math.inf
    for triple in candidates:
        row_cfg = PidConfig(
            kp=triple[0],
            ki=triple[1],
            kd=triple[2],
            dt=cfg.dt,
            set_point=cfg.set_point,
            safe_lower=cfg.safe_lower,
            safe_upper=cfg.safe_upper,
        )
        trace = simulate(plant, row_cfg, horizon)
        settling = trace.metrics(cfg.set_point, cfg.dt).settling_steps
        if settling < best_settling:
            best, best_settling = triple, settling
    return AttackReport(
        scenario="clone_dynamic",
        s=_ordered(s),
        s_prime=_ordered(s_prime),
        s_minus=candidates,
        best_triple=best,
        effort={"evaluations": 2 * (1 << bundle.k), "simulations": len(candidates)},
    )


def report_to_dict(report: AttackReport) -> dict:
    return {
        "scenario": report.scenario,
        "s": [list(t) for t in report.s] if report.s is not None else None,
        "s_prime": [list(t) for t in report.s_prime],
        "s_minus": [list(t) for t in report.s_minus] if report.s_minus is not None else None,
        "best_triple": list(report.best_triple) if report.best_triple else None,
        "effort": report.effort,
    }
