"""HTTP face of the toolkit: a thin FastAPI wrapper over the core calls.

Every endpoint is stateless; devices, enrollment records, and bundles
travel as the same JSON documents the core serializers produce, so a
vendor can drive the whole provisioning flow with nothing but this API.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..attack import clone_dynamic_attack, report_to_dict, static_enumerate
from ..bench import bench_to_csv, run_bench
from ..binding import bind, bundle_from_dict, bundle_to_dict, recover_values
from ..bitops import pack_bits
from ..enrollment import (
    SamplingPlan,
    enroll,
    record_from_dicts,
    secret_to_dict,
    verify_enrollment,
)
from ..errors import ParameterError, PufbindError
from ..fixtures import demo_loop_config, demo_plant
from ..fuzzy_extractor import helper_to_dict
from ..logic_encode import ParamTable, parse_exprs
from ..pid_sim import PidConfig, PlantModel, simulate, trace_to_csv
from ..sram_sim import Temperature, clone_device, device_from_dict, device_to_dict, new_device, startup
from . import schemas


def _doc(loader, doc: dict, what: str):
    # malformed documents surface as 400s, not 500s
    try:
        return loader(doc)
    except PufbindError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"bad {what} document: {exc}") from exc


def _plant(spec: schemas.PlantSpec | None) -> PlantModel:
    if spec is None:
        return demo_plant()
    return PlantModel(gain=spec.gain, tau=spec.tau, initial=spec.initial)


def _loop_config(spec: schemas.LoopSpec | None, kp: float, ki: float, kd: float) -> PidConfig:
    base = demo_loop_config()
    if spec is None:
        return PidConfig(
            kp=kp, ki=ki, kd=kd,
            dt=base.dt, set_point=base.set_point,
            safe_lower=base.safe_lower, safe_upper=base.safe_upper,
        )
    return PidConfig(
        kp=kp, ki=ki, kd=kd,
        dt=spec.dt, set_point=spec.set_point,
        safe_lower=spec.safe_lower, safe_upper=spec.safe_upper,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="pufbind service", version=__version__)

    @app.exception_handler(PufbindError)
    async def _pufbind_error(request: Request, exc: PufbindError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    async def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/device/new", response_model=schemas.DeviceResponse)
    async def device_new(req: schemas.NewDeviceRequest) -> schemas.DeviceResponse:
        dev = new_device(
            req.seed,
            cell_count=req.cell_count,
            stable_fraction=req.stable_fraction,
            epsilon=req.epsilon,
        )
        return schemas.DeviceResponse(device=device_to_dict(dev))

    @app.post("/device/clone", response_model=schemas.DeviceResponse)
    async def device_clone(req: schemas.CloneDeviceRequest) -> schemas.DeviceResponse:
        dev = _doc(device_from_dict, req.device, "device")
        return schemas.DeviceResponse(device=device_to_dict(clone_device(dev, req.seed)))

    @app.post("/device/startup", response_model=schemas.StartupResponse)
    async def device_startup(req: schemas.StartupRequest) -> schemas.StartupResponse:
        dev = _doc(device_from_dict, req.device, "device")
        sample = startup(dev, Temperature(req.temperature), req.noise_seed)
        return schemas.StartupResponse(
            bits=pack_bits(sample.bits).hex(),
            cell_count=int(sample.bits.size),
            temperature=req.temperature,
        )

    @app.post("/enroll", response_model=schemas.EnrollResponse)
    async def do_enroll(req: schemas.EnrollRequest) -> schemas.EnrollResponse:
        dev = _doc(device_from_dict, req.device, "device")
        plan = SamplingPlan(
            startups_per_temperature=req.startups_per_temperature,
            temperatures=tuple(Temperature(t) for t in req.temperatures),
        )
        rec = enroll(
            dev, plan,
            sz=req.sz, hd=req.hd, key_len=req.key_len,
            threshold=req.threshold, seed=req.seed,
        )
        return schemas.EnrollResponse(
            helper=helper_to_dict(rec.helper),
            secret=secret_to_dict(rec),
            offset=rec.offset,
            stable_count=int(rec.sm.sum()),
        )

    @app.post("/enroll/verify", response_model=schemas.VerifyResponse)
    async def do_verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
        dev = _doc(device_from_dict, req.device, "device")
        rec = _doc(lambda d: record_from_dicts(d["helper"], d["secret"]),
                   {"helper": req.helper, "secret": req.secret}, "enrollment")
        report = verify_enrollment(dev, rec, trials=req.trials, cutoff=req.cutoff, seed=req.seed)
        return schemas.VerifyResponse(
            trials=report.trials,
            failures=report.failures,
            failure_rate=report.failure_rate,
            cutoff=report.cutoff,
            passed=report.passed,
        )

    @app.post("/bind", response_model=schemas.BundleResponse)
    async def do_bind(req: schemas.BindRequest) -> schemas.BundleResponse:
        table = ParamTable(tuple(tuple(row) for row in req.table))
        rec = _doc(lambda d: record_from_dicts(d["helper"], d["secret"]),
                   {"helper": req.helper, "secret": req.secret}, "enrollment")
        key_record = None
        if (req.key_helper is None) != (req.key_secret is None):
            raise ParameterError("key_helper and key_secret must be given together")
        if req.key_helper is not None:
            key_record = _doc(lambda d: record_from_dicts(d["helper"], d["secret"]),
                              {"helper": req.key_helper, "secret": req.key_secret}, "key enrollment")
        bundle = bind(table, rec, k=req.k, c=req.c, seed=req.seed,
                      keep=req.keep, key_record=key_record)
        return schemas.BundleResponse(bundle=bundle_to_dict(bundle))

    @app.post("/run", response_model=schemas.RunResponse)
    async def do_run(req: schemas.RunRequest) -> schemas.RunResponse:
        bundle = _doc(bundle_from_dict, req.bundle, "bundle")
        dev = _doc(device_from_dict, req.device, "device")
        sample = startup(dev, Temperature(req.temperature), req.noise_seed)
        triple = recover_values(bundle, sample.bits)
        cfg = _loop_config(req.loop, *(float(v) for v in triple))
        trace = simulate(_plant(req.plant), cfg, req.horizon)
        metrics = trace.metrics(cfg.set_point, cfg.dt)
        settling = metrics.settling_steps
        return schemas.RunResponse(
            triple=triple,
            settling_steps=None if math.isinf(settling) else settling,
            overshoot_ratio=metrics.overshoot_ratio,
            integral_squared_error=metrics.integral_squared_error,
            trace_csv=trace_to_csv(trace),
        )

    @app.post("/attack/static", response_model=schemas.AttackResponse)
    async def attack_static(req: schemas.StaticAttackRequest) -> schemas.AttackResponse:
        bundle = _doc(bundle_from_dict, req.bundle, "bundle")
        return schemas.AttackResponse(**report_to_dict(static_enumerate(bundle)))

    @app.post("/attack/clone", response_model=schemas.AttackResponse)
    async def attack_clone(req: schemas.CloneAttackRequest) -> schemas.AttackResponse:
        bundle = _doc(bundle_from_dict, req.bundle, "bundle")
        phi = parse_exprs(req.phi, bundle.k)
        cfg = _loop_config(req.loop, 0.0, 0.0, 0.0)
        report = clone_dynamic_attack(bundle, phi, _plant(req.plant), cfg, req.horizon)
        return schemas.AttackResponse(**report_to_dict(report))

    @app.post("/bench", response_model=schemas.BenchResponse)
    async def do_bench(req: schemas.BenchRequest) -> schemas.BenchResponse:
        rows = run_bench(req.k_values, req.m_values, reps=req.reps, seed=req.seed)
        return schemas.BenchResponse(
            rows=[schemas.BenchRowModel(**vars(r)) for r in rows],
            csv=bench_to_csv(rows),
        )

    return app


app = create_app()
