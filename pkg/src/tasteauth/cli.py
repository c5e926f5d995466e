"""Command line tools: strength reports, FP/FN curves, simulation, serving."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analytics, simulation
from .challenge import AuthPolicy
from .enrollment import EnrollmentPolicy
from .errors import TasteAuthError


def _parse_policy(text: str) -> AuthPolicy:
    """Parse "d=8,dhr=2,s=4" plus optional mode=/threshold=/margin= pairs."""
    fields: dict[str, object] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise click.BadParameter(f"expected key=value, got {part!r}")
        key, _, raw = part.partition("=")
        key = key.strip().lower()
        raw = raw.strip()
        if key == "d":
            fields["images_per_screen"] = int(raw)
        elif key == "dhr":
            fields["keys_per_screen"] = int(raw)
        elif key == "s":
            fields["screens_per_session"] = int(raw)
        elif key == "margin":
            fields["margin"] = int(raw)
        elif key == "mode":
            fields["mode"] = raw
        elif key == "threshold":
            fields["threshold"] = int(raw)
        elif key == "interactive":
            fields["interactive"] = raw.lower() in ("1", "true", "yes")
        else:
            raise click.BadParameter(f"unknown policy field {key!r}")
    return AuthPolicy(**fields)


def _read_totals(path: str) -> list[int]:
    """Read session totals from a file: JSON array, or one integer per line."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return []
    if text.startswith("["):
        return [int(v) for v in json.loads(text)]
    return [int(line) for line in text.splitlines() if line.strip()]


@click.group()
def main() -> None:
    """Aesthetic-preference authentication toolkit."""


@main.command()
@click.option("--d", "images_per_screen", default=8, show_default=True, type=int)
@click.option("--dhr", "keys_per_screen", default=2, show_default=True, type=int)
@click.option("--s", "screens_per_session", default=4, show_default=True, type=int)
@click.option("--json", "as_json", is_flag=True, help="emit the full report as JSON")
def strength(images_per_screen, keys_per_screen, screens_per_session, as_json):
    """Report the password-equivalent strength of a screen policy."""
    try:
        report = analytics.password_bits(
            images_per_screen, keys_per_screen, screens_per_session
        )
    except TasteAuthError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        return
    click.echo(
        f"{screens_per_session} screens of {keys_per_screen}/{images_per_screen}: "
        f"{report.printed_bits} bits ({report.total_bits:.2f} exact), "
        f"comparable to a {report.comparable}"
    )


@main.command()
@click.option("--legit", "legit_path", required=True, type=click.Path(exists=True))
@click.option("--attacker", "attacker_path", required=True, type=click.Path(exists=True))
@click.option("--policy", "policy_text", default="d=8,dhr=2,s=4", show_default=True)
@click.option("--out", "out_path", default="-", show_default=True)
def fpfn(legit_path, attacker_path, policy_text, out_path):
    """Write a false-positive/false-negative CSV from two total files."""
    policy = _parse_policy(policy_text)
    try:
        curve = analytics.fpfn_curves(
            _read_totals(legit_path), _read_totals(attacker_path), policy.max_total
        )
    except TasteAuthError as exc:
        raise click.ClickException(str(exc))
    csv_text = analytics.curves_to_csv([curve])
    if out_path == "-":
        click.echo(csv_text, nl=False)
    else:
        Path(out_path).write_text(csv_text, encoding="utf-8")
        click.echo(f"wrote {out_path}")


@main.command()
@click.option("--policy", "policy_text", default="d=8,dhr=2,s=4", show_default=True)
@click.option("--margin", default=None, type=int, help="override the policy margin")
@click.option(
    "--preset",
    default="humanlike",
    show_default=True,
    type=click.Choice(sorted(simulation.PRESETS)),
)
@click.option("--attackers", default="uniform,population", show_default=True)
@click.option("--trials", default=200, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", default="-", show_default=True)
def simulate(policy_text, margin, preset, attackers, trials, seed, out_path):
    """Run a synthetic-rater study and write the JSON report."""
    policy = _parse_policy(policy_text)
    if margin is not None:
        policy = AuthPolicy(**{**policy.to_dict(), "margin": margin})
    enrollment_policy = EnrollmentPolicy(margin=policy.margin)
    kinds = tuple(k.strip() for k in attackers.split(",") if k.strip())
    for kind in kinds:
        if kind not in simulation.ATTACKER_KINDS:
            raise click.BadParameter(
                f"unknown attacker {kind!r}; choose from {sorted(simulation.ATTACKER_KINDS)}"
            )
    config = simulation.MonteCarloConfig(
        policy=policy,
        enrollment_policy=enrollment_policy,
        preset=simulation.PRESETS[preset],
        attacker_kinds=kinds,
        n_trials=trials,
        seed=seed,
    )
    try:
        report = simulation.monte_carlo(config)
    except TasteAuthError as exc:
        raise click.ClickException(str(exc))
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path == "-":
        click.echo(text)
    else:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote {out_path}")


@main.command()
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--addr", default=None, help="host:port to bind (default 127.0.0.1:8000)")
def serve(config_path, addr):
    """Run the HTTP service."""
    import os

    import uvicorn

    from .api import build_service, config_from_env, create_app
    from .service import ServiceConfig

    if config_path:
        config = ServiceConfig.from_file(config_path)
        data_dir = os.environ.get("TASTEAUTH_DATA_DIR")
        if data_dir:
            config.data_dir = data_dir
    else:
        config = config_from_env()
    addr = addr or os.environ.get("TASTEAUTH_ADDR") or "127.0.0.1:8000"
    host, _, port = addr.partition(":")
    app = create_app(build_service(config))
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
