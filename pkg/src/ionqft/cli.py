"""Command-line client for the run service.

Each subcommand assembles a run configuration (built-in reference
defaults, optional JSON config file, IONQFT_* environment overrides,
then --set assignments), posts it to the in-process HTTP service and
renders the result as CSV or JSON.  Outputs are byte-identical for
identical configurations: metadata lives in an isolated comment header
and contains no timestamps.

Exit codes: 0 success, 2 configuration error, 3 physics-domain
violation, 4 numerical failure.
"""

import asyncio
import copy
import json
import os
import sys

import click
import httpx

from . import __version__
from .service.app import create_app
from .service.models import DEFAULT_CONFIG_DICT
from .service.runners import RUNNERS

ENV_PREFIX = "IONQFT_"

_RUN_HELP = {
    "chain": "Equilibrium ion positions of the axial crystal.",
    "modes": "Transverse phonon spectrum of the chain.",
    "dispersion": "Homogeneous-chain dispersion across the Brillouin zone.",
    "couplings": "Spin-spin couplings at the five reference detunings.",
    "propagator": "Lattice propagator against its pole-plus-cut form.",
    "rg-flow": "One-loop flow of mass and quartic in cutoff units.",
    "rg-critical": "Fluctuation-induced shift of the zigzag transition.",
    "drive": "Stiffness dressing under a parametric drive.",
    "dynamics": "Spin-echo coupling readout on the effective model.",
    "sense-impulsive": "Kernel reconstruction by parity interferometry.",
    "sense-harmonic": "Full spin-phonon echo dynamics (brute-force oracle).",
}


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _assign(tree: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = tree
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise click.ClickException(f"cannot override below non-table key '{part}'")
    node[parts[-1]] = value


def _env_overrides() -> list[tuple[str, object]]:
    found = []
    for name in sorted(os.environ):
        if not name.startswith(ENV_PREFIX):
            continue
        dotted = name[len(ENV_PREFIX):].lower().replace("__", ".")
        found.append((dotted, _parse_value(os.environ[name])))
    return found


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        _fail(2, f"config file {path} is not valid JSON: {exc}")
    except OSError as exc:
        _fail(2, f"cannot read config file {path}: {exc}")
    if not isinstance(data, dict):
        _fail(2, f"config file {path} must hold a JSON object")
    # a previous run's JSON output re-ingests through its embedded config
    if "metadata" in data and isinstance(data["metadata"], dict):
        embedded = data["metadata"].get("config")
        if isinstance(embedded, dict):
            return embedded
    return data


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def resolve_config(config_path: str | None, set_items: tuple[str, ...]) -> dict:
    """Layer defaults, config file, environment, then --set assignments."""
    if config_path is None:
        tree = copy.deepcopy(DEFAULT_CONFIG_DICT)
    else:
        tree = _load_config_file(config_path)
    for dotted, value in _env_overrides():
        _assign(tree, dotted, value)
    for item in set_items:
        if "=" not in item:
            _fail(2, f"--set expects path.key=value, got '{item}'")
        dotted, _, raw = item.partition("=")
        _assign(tree, dotted.strip(), _parse_value(raw))
    return tree


def call_service(name: str, config: dict) -> tuple[int, dict]:
    """POST one run to the in-process service and return (status, payload)."""

    async def _go() -> tuple[int, dict]:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://service.internal"
        ) as client:
            resp = await client.post(f"/run/{name}", json=config)
            return resp.status_code, resp.json()

    return asyncio.run(_go())


def _format_cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.11e}"
    return str(value)


def render_csv(payload: dict) -> str:
    meta = payload["metadata"]
    lines = [
        f"# tool: {meta['tool']} {meta['version']}",
        f"# config_sha256: {meta['config_sha256']}",
        f"# units: {meta['units']}",
        f"# notes: {payload['notes']}",
        ",".join(payload["columns"]),
    ]
    for row in payload["rows"]:
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        click.echo(text, nl=False)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _run_command(name: str, config_path, set_items, out_path, fmt) -> None:
    config = resolve_config(config_path, set_items)
    status, payload = call_service(name, config)
    if status != 200:
        err = payload.get("error", {})
        _fail(
            int(err.get("exit_code", 4)),
            err.get("message", f"service returned HTTP {status}"),
        )
    resolved = payload["metadata"]["config"]
    chosen_fmt = fmt or resolved["output"]["format"]
    chosen_out = out_path or resolved["output"]["path"]
    text = render_csv(payload) if chosen_fmt == "csv" else render_json(payload)
    _emit(text, chosen_out)


@click.group(help=__doc__)
@click.version_option(version=__version__, prog_name="ionqft")
def main() -> None:
    pass


def _register(name: str) -> None:
    @main.command(name=name, help=_RUN_HELP[name])
    @click.option(
        "--config",
        "config_path",
        type=click.Path(),
        default=None,
        help="JSON run configuration (defaults to the built-in reference chain).",
    )
    @click.option(
        "--set",
        "set_items",
        multiple=True,
        metavar="PATH.KEY=VALUE",
        help="Override one configuration leaf (repeatable).",
    )
    @click.option("--out", "out_path", type=click.Path(), default=None, help="Output file.")
    @click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default=None,
        help="Output format (overrides the config).",
    )
    def _cmd(config_path, set_items, out_path, fmt, _name=name) -> None:
        _run_command(_name, config_path, set_items, out_path, fmt)


for _name in RUNNERS:
    _register(_name)


if __name__ == "__main__":
    main()
