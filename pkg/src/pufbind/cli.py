"""Command line client for the provisioning service.

Every subcommand talks HTTP to a running service when --url is given and
otherwise drives the same app in process, so the CLI needs no server to
be useful.  Exit codes: 0 success, 1 a request was rejected or a check
failed, 2 bad command line usage.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

import click
import httpx


def _fmt_num(x) -> str:
    return str(int(x)) if isinstance(x, float) and x.is_integer() else str(x)


class ServiceClient:
    """Tiny sync facade; in-process ASGI by default, remote with url."""

    def __init__(self, url: str | None):
        self.url = url

    def _request(self, method: str, path: str, payload: dict | None):
        async def go():
            if self.url is None:
                from .service import create_app

                transport = httpx.ASGITransport(app=create_app())
                async with httpx.AsyncClient(
                    transport=transport, base_url="http://pufbind.internal", timeout=None
                ) as client:
                    return await client.request(method, path, json=payload)
            async with httpx.AsyncClient(base_url=self.url, timeout=None) as client:
                return await client.request(method, path, json=payload)

        try:
            resp = asyncio.run(go())
        except httpx.HTTPError as exc:
            raise click.ClickException(f"request failed: {exc}") from exc
        if resp.status_code >= 400:
            try:
                detail = resp.json()["detail"]
            except Exception:
                detail = resp.text
            raise click.ClickException(f"{path}: {detail}")
        return resp.json()

    def get(self, path: str) -> dict:
        return self._request("GET", path, None)

    def post(self, path: str, payload: dict) -> dict:
        return self._request("POST", path, payload)


def _load_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read {what} from {path}: {exc}") from exc


def _write_json(path: str, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise click.UsageError(f"expected a comma separated integer list, got {text!r}") from exc


@click.group()
@click.option("--url", default=None, help="Base URL of a running service; in-process when omitted.")
@click.pass_context
def main(ctx: click.Context, url: str | None) -> None:
    """Bind tuned controller gains to a hardware fingerprint."""
    ctx.obj = ServiceClient(url)


@main.command("simulate-device")
@click.option("--seed", type=int, required=True, help="Device seed (or clone seed with --clone-of).")
@click.option("--cell-count", type=int, default=4096, show_default=True)
@click.option("--stable-fraction", type=float, default=0.85, show_default=True)
@click.option("--epsilon", type=float, default=0.001, show_default=True)
@click.option("--clone-of", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Existing device document; builds a clone with the same build parameters.")
@click.option("--out", type=click.Path(dir_okay=False), default="device.json", show_default=True)
@click.pass_obj
def cmd_simulate_device(client: ServiceClient, seed, cell_count, stable_fraction, epsilon, clone_of, out) -> None:
    """Create a fresh simulated device, or a clone of an existing one."""
    if clone_of is not None:
        resp = client.post("/device/clone", {"device": _load_json(clone_of, "device"), "seed": seed})
        kind = f"clone of {clone_of}"
    else:
        resp = client.post("/device/new", {
            "seed": seed, "cell_count": cell_count,
            "stable_fraction": stable_fraction, "epsilon": epsilon,
        })
        kind = "device"
    _write_json(out, resp["device"])
    click.echo(f"wrote {out} ({kind}, {resp['device']['cell_count']} cells)")


@main.command("enroll")
@click.option("--device", "device_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--sz", type=int, default=256, show_default=True)
@click.option("--hd", type=int, default=2, show_default=True)
@click.option("--key-len", type=int, default=18, show_default=True)
@click.option("--threshold", type=float, default=0.999, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--startups", type=int, default=100, show_default=True,
              help="Startups sampled per temperature.")
@click.option("--temps", default="room", show_default=True,
              help="Comma separated temperatures to sample (low,room,high).")
@click.option("--helper-out", type=click.Path(dir_okay=False), default="helper.json", show_default=True)
@click.option("--secret-out", type=click.Path(dir_okay=False), default="secret.json", show_default=True)
@click.option("--verify/--no-verify", default=True, show_default=True,
              help="Re-check recovery on fresh startups after enrolling.")
@click.pass_obj
def cmd_enroll(client: ServiceClient, device_path, sz, hd, key_len, threshold, seed,
               startups, temps, helper_out, secret_out, verify) -> None:
    """Enroll a device: pick a stable window, lock a fresh key to it."""
    device = _load_json(device_path, "device")
    resp = client.post("/enroll", {
        "device": device, "sz": sz, "hd": hd, "key_len": key_len,
        "threshold": threshold, "seed": seed,
        "startups_per_temperature": startups,
        "temperatures": [t.strip() for t in temps.split(",") if t.strip()],
    })
    _write_json(helper_out, resp["helper"])
    _write_json(secret_out, resp["secret"])
    click.echo(f"enrolled window offset={resp['offset']} stable={resp['stable_count']}/{sz}")
    click.echo(f"wrote {helper_out} and {secret_out}")
    if verify:
        report = client.post("/enroll/verify", {
            "device": device, "helper": resp["helper"], "secret": resp["secret"],
        })
        click.echo(f"verify: {report['failures']}/{report['trials']} failures "
                   f"(cutoff {report['cutoff']:g})")
        if not report["passed"]:
            raise click.ClickException("enrollment verification failed")


@main.command("bind")
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSON list of [kp, ki, kd] rows; row 0 is the preferred one.")
@click.option("--helper", "helper_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--secret", "secret_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--k", type=int, required=True, help="Width of the encoded assignment in bits.")
@click.option("--c", type=int, default=None, help="Classes kept reachable by clones (defaults to all).")
@click.option("--keep", type=click.Choice(["low", "high"]), default="low", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--key-helper", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--key-secret", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default="bundle.json", show_default=True)
@click.pass_obj
def cmd_bind(client: ServiceClient, table_path, helper_path, secret_path, k, c, keep,
             seed, key_helper, key_secret, out) -> None:
    """Encode a gain table against an enrollment; reruns are byte identical."""
    payload = {
        "table": _load_json(table_path, "table"),
        "helper": _load_json(helper_path, "helper"),
        "secret": _load_json(secret_path, "secret"),
        "k": k, "c": c, "keep": keep, "seed": seed,
    }
    if key_helper is not None:
        payload["key_helper"] = _load_json(key_helper, "key helper")
    if key_secret is not None:
        payload["key_secret"] = _load_json(key_secret, "key secret")
    resp = client.post("/bind", payload)
    _write_json(out, resp["bundle"])
    click.echo(f"wrote {out} (k={k}, hash {resp['bundle']['hashValue'][:16]}...)")


@main.command("run")
@click.option("--bundle", "bundle_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--device", "device_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--temperature", type=click.Choice(["low", "room", "high"]), default="room", show_default=True)
@click.option("--noise-seed", type=int, default=0, show_default=True)
@click.option("--plant-gain", type=float, default=None, help="Plant gain (with --plant-tau).")
@click.option("--plant-tau", type=float, default=None, help="Plant time constant.")
@click.option("--plant-initial", type=float, default=0.0, show_default=True)
@click.option("--horizon", type=int, default=5000, show_default=True)
@click.option("--trace-out", type=click.Path(dir_okay=False), default="trace.csv", show_default=True)
@click.pass_obj
def cmd_run(client: ServiceClient, bundle_path, device_path, temperature, noise_seed,
            plant_gain, plant_tau, plant_initial, horizon, trace_out) -> None:
    """Recover gains from one startup and run the loop with them."""
    if (plant_gain is None) != (plant_tau is None):
        raise click.UsageError("--plant-gain and --plant-tau must be given together")
    payload = {
        "bundle": _load_json(bundle_path, "bundle"),
        "device": _load_json(device_path, "device"),
        "temperature": temperature, "noise_seed": noise_seed, "horizon": horizon,
    }
    if plant_gain is not None:
        payload["plant"] = {"gain": plant_gain, "tau": plant_tau, "initial": plant_initial}
    resp = client.post("/run", payload)
    kp, ki, kd = resp["triple"]
    click.echo(f"recovered gains: kp={_fmt_num(kp)} ki={_fmt_num(ki)} kd={_fmt_num(kd)}")
    settling = resp["settling_steps"]
    click.echo(f"settling steps: {'never' if settling is None else int(settling)}")
    click.echo(f"overshoot ratio: {resp['overshoot_ratio']:.4f}")
    click.echo(f"integral squared error: {resp['integral_squared_error']:.6g}")
    Path(trace_out).write_text(resp["trace_csv"])
    click.echo(f"wrote {trace_out}")


@main.group("attack")
def cmd_attack() -> None:
    """Adversary harnesses against a published bundle."""


def _echo_report(report: dict) -> None:
    click.echo(f"scenario: {report['scenario']}")
    if report.get("s") is not None:
        click.echo(f"recoverable set ({len(report['s'])}): {report['s']}")
    click.echo(f"fallback set ({len(report['s_prime'])}): {report['s_prime']}")
    if report.get("s_minus") is not None:
        click.echo(f"hidden candidates ({len(report['s_minus'])}): {report['s_minus']}")
    if report.get("best_triple") is not None:
        click.echo(f"best candidate: {report['best_triple']}")
    click.echo(f"effort: {report['effort']}")


@cmd_attack.command("static")
@click.option("--bundle", "bundle_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Optional JSON report path.")
@click.pass_obj
def cmd_attack_static(client: ServiceClient, bundle_path, out) -> None:
    """Enumerate everything the public fallback expressions reveal."""
    report = client.post("/attack/static", {"bundle": _load_json(bundle_path, "bundle")})
    _echo_report(report)
    if out is not None:
        _write_json(out, report)
        click.echo(f"wrote {out}")


@cmd_attack.command("clone")
@click.option("--bundle", "bundle_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--phi", "phi_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Text file holding the leaked real expression list.")
@click.option("--plant-gain", type=float, default=None)
@click.option("--plant-tau", type=float, default=None)
@click.option("--plant-initial", type=float, default=0.0, show_default=True)
@click.option("--horizon", type=int, default=5000, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Optional JSON report path.")
@click.pass_obj
def cmd_attack_clone(client: ServiceClient, bundle_path, phi_path, plant_gain, plant_tau,
                     plant_initial, horizon, out) -> None:
    """Rank leaked candidates by simulated settling time on a clone."""
    if (plant_gain is None) != (plant_tau is None):
        raise click.UsageError("--plant-gain and --plant-tau must be given together")
    payload = {
        "bundle": _load_json(bundle_path, "bundle"),
        "phi": Path(phi_path).read_text().strip(),
        "horizon": horizon,
    }
    if plant_gain is not None:
        payload["plant"] = {"gain": plant_gain, "tau": plant_tau, "initial": plant_initial}
    report = client.post("/attack/clone", payload)
    _echo_report(report)
    if out is not None:
        _write_json(out, report)
        click.echo(f"wrote {out}")


@main.command("bench")
@click.option("--k-values", default="4,6,8,10,12", show_default=True)
@click.option("--m-values", default="3", show_default=True)
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="bench.csv", show_default=True)
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None,
              help="Optional PNG plot of the sweep (needs matplotlib).")
@click.pass_obj
def cmd_bench(client: ServiceClient, k_values, m_values, reps, seed, out, plot_path) -> None:
    """Sweep k and m and record expression size, eval time, bundle size."""
    resp = client.post("/bench", {
        "k_values": _int_list(k_values), "m_values": _int_list(m_values),
        "reps": reps, "seed": seed,
    })
    Path(out).write_text(resp["csv"])
    click.echo(f"wrote {out} ({len(resp['rows'])} rows)")
    if plot_path is not None:
        from .bench import BenchRow, plot_bench

        plot_bench([BenchRow(**row) for row in resp["rows"]], plot_path)
        click.echo(f"wrote {plot_path}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def cmd_serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("pufbind.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
