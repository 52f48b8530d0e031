"""Command-line front end: ``trak <command> ...``.

Exit codes: 0 on success, 1 when the input is well formed but the
computation rejects it (invalid track, illegal move, open subshift), 2 on
IO or usage errors.  Commands that write files put a ``manifest.json`` next
to their outputs; the outputs themselves depend only on the manifest inputs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click

from . import __version__
from .dyadic import BitSequence, DyadicError, dyadic_pressure, zeta
from .measures import MeasureError, cone_dimension, is_recurrent, is_transversely_recurrent
from .moves import MoveError, parse_moves, replay
from .symbolic import SubshiftError, WordError, build_subshift, from_json, is_transitive, tight_core, to_dot, to_json
from .thermo import PressureBudgetError, contraction_check, count_orbits, pressure, tight_cycles
from .track import TrackError, is_orientable, parse_track, serialize_track, topological_type

DOMAIN_ERRORS = (TrackError, MeasureError, MoveError, SubshiftError, WordError, DyadicError, PressureBudgetError)


class InputError(click.ClickException):
    exit_code = 2


class DomainError(click.ClickException):
    exit_code = 1


def fixture_dir() -> Path:
    env = os.environ.get("TRAK_FIXTURES")
    return Path(env) if env else Path(__file__).with_name("fixtures")


def resolve(path: str) -> Path:
    """A readable file: ``path`` itself, else the same name under the fixture directory."""
    p = Path(path)
    if p.is_file():
        return p
    rel = Path(*p.parts[1:]) if p.parts and p.parts[0] == "fixtures" else p
    q = fixture_dir() / rel
    if q.is_file():
        return q
    raise InputError(f"cannot read {path}")


def read_text(path: str) -> tuple[str, str]:
    """Contents and sha256 of an input file."""
    p = resolve(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


def load_track(path: str):
    text, digest = read_text(path)
    try:
        return parse_track(text), digest
    except TrackError as exc:
        raise DomainError(f"{path}: {exc}") from exc


def load_subshift(path: str):
    text, digest = read_text(path)
    try:
        return from_json(text), digest
    except (KeyError, ValueError, TrackError) as exc:
        raise DomainError(f"{path}: not a subshift file ({exc})") from exc


@dataclass
class RunManifest:
    command: str
    arguments: dict
    seed: int | None = None
    inputs: dict = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0

    def write(self, directory: Path) -> None:
        (directory / "manifest.json").write_text(json.dumps(asdict(self), indent=1, sort_keys=True) + "\n")


def out_dir(path: str) -> Path:
    d = Path(path)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create {path}: {exc}") from exc
    return d


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def emit(as_json: bool, payload: dict, text: str) -> None:
    click.echo(json.dumps(payload, sort_keys=True) if as_json else text)


def run_parallel(fn, items: list, threads: int) -> list:
    """``[fn(x) for x in items]`` on ``threads`` workers, in input order."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


json_option = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
threads_option = click.option("--threads", default=1, show_default=True, type=click.IntRange(1), help="Worker count.")


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except DOMAIN_ERRORS as exc:
            raise DomainError(str(exc)) from exc


@click.group(cls=_Group)
@click.version_option(__version__)
def main():
    """Train tracks, splitting moves and their symbolic dynamics."""


@main.command()
@click.argument("path")
@json_option
def validate(path, as_json):
    """Check a track file."""
    t, _ = load_track(path)
    ty = topological_type(t)
    emit(
        as_json,
        {"valid": True, "branches": t.num_branches, "switches": len(t.switches), "type": str(ty)},
        f"valid branches={t.num_branches} switches={len(t.switches)}",
    )


@main.command("type")
@click.argument("path")
@json_option
def type_cmd(path, as_json):
    """Print the topological type, genus and measure-cone dimension."""
    t, _ = load_track(path)
    ty = topological_type(t)
    dim = cone_dimension(t)
    emit(
        as_json,
        {"type": str(ty), "polygons": list(ty.polygon_orders), "punctures": ty.punctures, "genus": ty.genus, "dimV": dim},
        f"{ty} g={ty.genus} dimV={dim}",
    )


@main.command()
@click.argument("path")
@json_option
def cone(path, as_json):
    """Recurrence and the dimension of the transverse measure cone."""
    t, _ = load_track(path)
    rec, _ = is_recurrent(t)
    trec, _ = is_transversely_recurrent(t)
    dim = cone_dimension(t)
    payload = {"recurrent": rec, "transversely_recurrent": trec, "orientable": is_orientable(t), "dim": dim}
    emit(as_json, payload, f"recurrent={str(rec).lower()} dim={dim}")


@main.command()
@click.argument("track")
@click.argument("script")
@click.option("--out", required=True, help="Output directory.")
@json_option
def moves(track, script, out, as_json):
    """Replay a move script; write the final track and the carrying matrix."""
    start = time.perf_counter()
    t, h_track = load_track(track)
    text, h_script = read_text(script)
    try:
        end, mat = replay(t, parse_moves(text))
    except MoveError as exc:
        raise DomainError(str(exc)) from exc
    d = out_dir(out)
    (d / "track.trk").write_text(serialize_track(end))
    (d / "matrix.csv").write_text(mat.to_csv())
    RunManifest("moves", {"track": track, "script": script}, None, {"track": h_track, "script": h_script},
                wall_time=time.perf_counter() - start).write(d)
    ty = topological_type(end)
    emit(as_json, {"type": str(ty), "branches": end.num_branches, "out": str(d)}, f"{ty} branches={end.num_branches}")


@main.command()
@click.argument("track", default="sphere5.trk")
@click.option("--budget", default=10_000, show_default=True, type=click.IntRange(1), help="Letter budget.")
@click.option("--numbered/--unnumbered", default=False, show_default=True, help="Letters keep branch numbers.")
@click.option("--out", required=True, help="Output directory.")
@json_option
def subshift(track, budget, numbered, out, as_json):
    """Build the subshift generated by full splits from a seed track."""
    start = time.perf_counter()
    t, digest = load_track(track)
    s = build_subshift([t], node_budget=budget, numbered=numbered)
    d = out_dir(out)
    (d / "subshift.dot").write_text(to_dot(s))
    (d / "subshift.json").write_text(to_json(s))
    RunManifest("subshift", {"track": track, "budget": budget, "numbered": numbered}, None, {"track": digest},
                wall_time=time.perf_counter() - start).write(d)
    core = tight_core(s).size if s.closed else None
    emit(as_json, {"letters": s.size, "closed": s.closed, "core_letters": core, "transitive": s.closed and is_transitive(s),
                   "out": str(d)},
         f"letters={s.size} closed={str(s.closed).lower()}" + (f" core={core}" if core is not None else ""))
    if not s.closed:
        sys.exit(1)


@main.command("pressure")
@click.argument("subshift_json")
@click.option("--s", "s_values", multiple=True, type=float, default=(0.0,), show_default=True, help="Multiplier of the roof.")
@click.option("--n", "n_values", multiple=True, type=click.IntRange(1), required=True, help="Word length.")
@click.option("--out", required=True, help="Output directory.")
@threads_option
@json_option
def pressure_cmd(subshift_json, s_values, n_values, out, threads, as_json):
    """Bounds on the partition sums Z_n for the potential -s * roof."""
    start = time.perf_counter()
    s, digest = load_subshift(subshift_json)
    jobs = [(n, sv) for n in n_values for sv in s_values]
    try:
        results = run_parallel(lambda job: pressure(s, job[1], job[0]), jobs, threads)
    except PressureBudgetError as exc:
        raise DomainError(str(exc)) from exc
    rows = [[r.n, r.s, r.cylinders, r.Z_lower, r.Z_upper, r.rate_lower, r.rate_upper] for r in results]
    header = ["n", "s", "cylinders", "Z_lower", "Z_upper", "rate_lower", "rate_upper"]
    d = out_dir(out)
    (d / "pressure.csv").write_text(csv_text(header, rows))
    RunManifest("pressure", {"subshift": subshift_json, "s": list(s_values), "n": list(n_values)}, None,
                {"subshift": digest}, wall_time=time.perf_counter() - start).write(d)
    emit(as_json, {"rows": [dict(zip(header, r)) for r in rows]}, csv_text(header, rows).rstrip("\n"))


@main.command()
@click.argument("subshift_json")
@click.option("--R", "r_max", type=float, required=True, help="Largest translation length.")
@click.option("--step", type=float, default=0.5, show_default=True, help="Bin width.")
@click.option("--max-len", type=click.IntRange(1), default=6, show_default=True, help="Longest closed word.")
@click.option("--out", required=True, help="Output directory.")
@json_option
def orbits(subshift_json, r_max, step, max_len, out, as_json):
    """Count primitive closed words by translation length."""
    start = time.perf_counter()
    s, digest = load_subshift(subshift_json)
    try:
        oc = count_orbits(s, r_max, step, max_len)
    except (SubshiftError, WordError) as exc:
        raise DomainError(str(exc)) from exc
    d = out_dir(out)
    (d / "orbits.csv").write_text(csv_text(["R", "count"], [[r, c] for r, c in oc.table]))
    RunManifest("orbits", {"subshift": subshift_json, "R": r_max, "step": step, "max_len": max_len}, None,
                {"subshift": digest}, wall_time=time.perf_counter() - start).write(d)
    exponent = None if math.isnan(oc.exponent) else oc.exponent
    emit(as_json, {"table": oc.table, "skipped": oc.skipped, "exponent": exponent,
                   "complete_below": oc.complete_below},
         "\n".join(f"{r} {c}" for r, c in oc.table))


@main.command()
@click.argument("subshift_json")
@click.option("--seed", type=int, required=True, help="RNG seed (required).")
@click.option("--base", type=click.IntRange(0), default=0, show_default=True, help="Base letter of the cycles.")
@click.option("--words", type=click.IntRange(1), default=5, show_default=True, help="Number of tight cycles.")
@click.option("--trials", type=click.IntRange(1), default=200, show_default=True, help="Measure pairs per cycle.")
@click.option("--out", required=True, help="Output directory.")
@threads_option
@json_option
def contraction(subshift_json, seed, base, words, trials, out, threads, as_json):
    """Check strict contraction of the min-ratio along tight cycles."""
    start = time.perf_counter()
    s, digest = load_subshift(subshift_json)
    try:
        cycles = tight_cycles(s, base, words, seed)
        reports = run_parallel(lambda k: contraction_check(s, cycles[k], trials, seed + k), list(range(len(cycles))), threads)
    except (SubshiftError, WordError) as exc:
        raise DomainError(str(exc)) from exc
    header = ["word", "length", "trials", "strict_increases", "fixed_points", "violations", "delta_hat", "kappa_hat"]
    rows = [[" ".join(map(str, r.word)), len(r.word), r.trials, r.strict_increases, r.fixed_points, r.violations,
             float(r.delta_hat), float(r.kappa_hat)] for r in reports]
    d = out_dir(out)
    (d / "contraction.csv").write_text(csv_text(header, rows))
    (d / "rng.json").write_text(json.dumps({"seed": seed, "generator": "random.Random",
                                            "per_word_seeds": [seed + k for k in range(len(cycles))]},
                                           indent=1, sort_keys=True) + "\n")
    RunManifest("contraction", {"subshift": subshift_json, "base": base, "words": words, "trials": trials}, seed,
                {"subshift": digest}, wall_time=time.perf_counter() - start).write(d)
    emit(as_json, {"rows": [dict(zip(header, r)) for r in rows]}, csv_text(header, rows).rstrip("\n"))
    if any(r.violations for r in reports):
        sys.exit(1)


@main.group()
def dyadic():
    """The dyadic roof function on the 0/1 shift."""


@dyadic.command("zeta")
@click.option("--bits", required=True, help='Sequence as "L|bits.bits|R", e.g. "0|1.1|0".')
@click.option("--tol", type=float, default=1e-12, show_default=True)
@json_option
def dyadic_zeta(bits, tol, as_json):
    """Evaluate the roof function with a certified error bound."""
    try:
        v = zeta(BitSequence.from_string(bits), tol)
    except DyadicError as exc:
        raise InputError(str(exc)) from exc
    emit(as_json, {"value": v.value, "error_bound": v.error_bound}, f"{v.value!r} +- {v.error_bound:.3g}")


@dyadic.command("pressure")
@click.option("--n", "n_values", multiple=True, type=click.IntRange(1, 24), required=True, help="Cylinder length.")
@click.option("--csv", "csv_path", required=True, help="Output CSV path.")
@threads_option
@json_option
def dyadic_pressure_cmd(n_values, csv_path, threads, as_json):
    """Bracketing partition sums over all n-cylinders."""
    start = time.perf_counter()
    results = run_parallel(dyadic_pressure, list(n_values), threads)
    header = ["n", "Z_lower", "Z_upper", "Z_extremal", "harmonic_bound", "rate_lower", "rate_upper"]
    rows = [[r.n, r.Z_lower, r.Z_upper, r.Z_extremal, r.harmonic, r.rate_lower, r.rate] for r in results]
    path = Path(csv_path)
    d = out_dir(str(path.parent) if str(path.parent) else ".")
    path.write_text(csv_text(header, rows))
    RunManifest("dyadic pressure", {"n": list(n_values), "csv": path.name}, None, {},
                wall_time=time.perf_counter() - start).write(d)
    emit(as_json, {"rows": [dict(zip(header, r)) for r in rows]}, csv_text(header, rows).rstrip("\n"))


if __name__ == "__main__":
    main()
