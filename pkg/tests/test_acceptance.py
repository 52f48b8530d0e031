"""End-to-end acceptance checks, one test per criterion at its stated tolerance."""

import json
import math
import random
import time
from fractions import Fraction

import numpy as np
from click.testing import CliRunner

from trak import is_orientable, topological_type
from trak.cli import main
from trak.dyadic import BitSequence, dyadic_pressure, zeta
from trak.measures import cone_dimension, is_recurrent, satisfies_switch_conditions, vertex_cycle_vectors
from trak.moves import CarryingMatrix, MoveError, SplitChoice, lift_measure, losing_ends, shift, split, split_resolve
from trak.perron import perron_root
from trak.symbolic import build_subshift, is_transitive, tight_core, word_count_matrix
from trak.thermo import (
    BlockSystem,
    birkhoff_table,
    block_variation_profile,
    contraction_check,
    pressure,
    roof_table,
    tight_cycles,
    tight_words_upto,
    tight_weight_ratio,
)
from trak.track import TrackError, classify_branch, large_branches

from conftest import FIXTURES, corpus, fixture, record


def cone_point(t, rng, rays=None):
    rays = rays or vertex_cycle_vectors(t)
    coeffs = [Fraction(rng.randint(1, 1000), rng.randint(1, 97)) for _ in rays]
    return {b: sum(c * r[i] for c, r in zip(coeffs, rays)) for i, b in enumerate(t.branches)}


def test_criterion_01_dimension_formulas():
    tracks = corpus() + [fixture(n) for n in ("sphere5.trk", "genus2max.trk", "genus2one.trk", "twistconn.trk")]
    start = time.perf_counter()
    bad = []
    genera = set()
    recurrent = 0
    for t in tracks:
        if not is_recurrent(t)[0]:
            continue
        recurrent += 1
        ty = topological_type(t)
        genera.add(ty.genus)
        ell = len(ty.polygon_orders)
        expected = 2 * ty.genus - 1 + ell if is_orientable(t) else 2 * ty.genus - 2 + ty.punctures + ell
        dim = cone_dimension(t)
        if dim != expected:
            bad.append((str(ty), dim, expected))
        if all(k == 1 for k in ty.polygon_orders) and not is_orientable(t):
            if dim != 6 * ty.genus - 6 + 2 * ty.punctures:
                bad.append(("maximal", str(ty), dim))
    elapsed = time.perf_counter() - start
    ok = not bad and recurrent >= 10 and {0, 1, 2} <= genera and elapsed < 1
    record(1, ok, f"{recurrent} recurrent tracks, genera {sorted(genera)}, mismatches {bad}, {elapsed:.2f}s")


def test_criterion_02_split_weight_law():
    rng = random.Random(2024)
    tracks = [t for t in corpus() + [fixture("sphere5.trk"), fixture("genus2max.trk")] if is_recurrent(t)[0]]
    rays = {id(t): vertex_cycle_vectors(t) for t in tracks}
    done = law = total_ok = 0
    while done < 1000:
        t = rng.choice(tracks)
        mu = cone_point(t, rng, rays[id(t)])
        tot = sum(mu.values())
        mu = {b: x / tot for b, x in mu.items()}
        e = rng.choice(large_branches(t))
        d = split_resolve(t, e, mu)
        if d == "C":
            continue
        new, mat = split(t, SplitChoice(e, d))
        lifted = lift_measure(t, e, d, mu)
        done += 1
        losers = [h[0] for h in losing_ends(t, e, d)]
        law += (mu[e] == lifted[e] + sum(lifted[b] for b in losers)) and mat.apply(lifted) == mu and all(
            x >= 0 for x in lifted.values()) and satisfies_switch_conditions(new, lifted)
        total_ok += Fraction(1, 2) <= sum(lifted.values()) <= 1
    record(2, law == total_ok == 1000, f"identity held {law}/1000, total in [1/2,1] {total_ok}/1000")


def test_criterion_03_roof_bounds(sphere5_subshift):
    s = sphere5_subshift
    p = s.num_branches
    cap = p * math.log(2)
    cylinders = over_cap = 0
    for length in range(2, 9):
        table = roof_table(s, length)
        cylinders += len(table.words)
        over_cap += int((~table.below_cap).sum()) + int((table.upper > cap + 1e-12).sum())
    short_tight = tight_words_upto(s, 8)
    # a cylinder of length <= 8 contains a tight block only if some tight word has length <= 8
    cycles = tight_cycles(s, 0, 5, seed=1)
    weights_ok = all(tight_weight_ratio(s, c + (c[0],)) >= Fraction(p + 1, p) for c in cycles)
    positive_ok = all(roof_table_positive(s, c) for c in cycles)
    ok = over_cap == 0 and weights_ok and positive_ok and not short_tight
    record(3, ok, f"{cylinders} cylinders, {over_cap} above p log 2, tight words of length <= 8: {len(short_tight)}, "
                  f"tight blocks with weight >= (p+1)/p: {weights_ok}, positive roof on tight blocks: {positive_ok}")


def roof_table_positive(s, cycle):
    from trak.thermo import roof_bounds

    return roof_bounds(s, cycle + (cycle[0],)).lower_ratio > 1


def test_criterion_04_carrying_monotonicity():
    rng = random.Random(77)
    tracks = [t for t in corpus() + [fixture("sphere5.trk")] if is_recurrent(t)[0]]
    trials = violations = 0
    while trials < 1000:
        t = rng.choice(tracks)
        cur, mat = t, CarryingMatrix.identity(t.branches)
        for _ in range(rng.randint(1, 10)):
            options = [("split", e, d) for e in large_branches(cur) for d in "LR"]
            options += [("shift", b) for b in cur.branches if classify_branch(cur, b) == "mixed"]
            step = rng.choice(options)
            try:
                cur, m = split(cur, SplitChoice(step[1], step[2])) if step[0] == "split" else shift(cur, step[1])
            except (MoveError, TrackError):
                continue
            mat = mat @ m
        if not is_recurrent(cur)[0]:
            continue
        rays = vertex_cycle_vectors(cur)
        nu = cone_point(cur, rng, rays)
        mu = cone_point(cur, rng, rays)
        a0 = max(mu[b] / nu[b] for b in cur.branches) * Fraction(rng.randint(100, 150), 100)
        pm, pn = mat.apply(mu), mat.apply(nu)
        violations += sum(1 for b in t.branches if pm[b] > a0 * pn[b])
        trials += 1
    record(4, violations == 0, f"{trials} trials, {violations} violations")


def test_criterion_05_contraction(sphere5_subshift):
    s = sphere5_subshift
    cycles = tight_cycles(s, 0, 5, seed=11)
    reports = [contraction_check(s, c, 200, seed=100 + k) for k, c in enumerate(cycles)]
    violations = sum(r.violations for r in reports)
    delta = min(r.delta_hat for r in reports)
    kappa = min(r.kappa_hat for r in reports)
    ok = violations == 0 and delta > 0 and kappa > 1 and all(r.trials == 200 for r in reports)
    record(5, ok, f"5 tight words x 200 trials, violations {violations}, delta_hat {float(delta):.4g}, "
                  f"kappa_hat {float(kappa):.4g}")


def test_criterion_06_variation_decay(sphere5_subshift):
    start = time.perf_counter()
    s = sphere5_subshift
    cycles = tight_cycles(s, 0, 2, seed=1)
    prof = block_variation_profile(BlockSystem(s, 0, list(cycles)), 14)
    elapsed = time.perf_counter() - start
    ok = prof.theta < 1 and prof.r_squared >= 0.9 and elapsed < 300
    record(6, ok, f"theta {prof.theta:.3g}, R^2 {prof.r_squared:.5f}, n <= 14, {elapsed:.1f}s")


def test_criterion_07_transitivity(sphere5_subshift):
    lines = []
    ok = is_transitive(sphere5_subshift)
    lines.append(f"sphere5: {sphere5_subshift.size} letters, transitive={ok}")
    for path in sorted((FIXTURES / "corpus").glob("*.trk")):
        t = fixture(f"corpus/{path.name}")
        s = build_subshift([t], node_budget=800, numbered=False)
        if not s.closed:
            lines.append(f"{path.stem}: not closed within 800 letters")
            continue
        core = tight_core(s)
        if core.size == 0:
            lines.append(f"{path.stem}: no tight component")
            continue
        good = is_transitive(core)
        ok &= good
        lines.append(f"{path.stem}: core {core.size}/{s.size}, transitive={good}")
    record(7, ok, "; ".join(lines))


def dfs_counts(a, i, n):
    counts = np.zeros(len(a), dtype=object)
    stack = [(i, 0)]
    succ = [[j for j, x in enumerate(row) if x] for row in a]
    while stack:
        v, d = stack.pop()
        if d == n:
            counts[v] += 1
            continue
        stack.extend((w, d + 1) for w in succ[v])
    return counts


def test_criterion_08_word_counts(sphere5_subshift):
    s = sphere5_subshift
    mismatches = 0
    for n in range(1, 7):
        power = word_count_matrix(s, n)
        for i in range(s.size):
            mismatches += int((power[i] != dfs_counts(s.transition, i, n)).sum())
    record(8, mismatches == 0, f"all {s.size}x{s.size} entries for n <= 6, {mismatches} mismatches")


def test_criterion_09_pressure_sanity(sphere5_subshift):
    s = sphere5_subshift
    log_lam = math.log(perron_root(s.transition).value)
    rate12 = pressure(s, 0.0, 12).rate_lower
    gap = abs(rate12 - log_lam)
    n = 8
    table = birkhoff_table(s, n)
    rates = [pressure(s, x, n, table=table) if x else pressure(s, 0.0, n) for x in (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)]
    monotone = all(b.rate_lower <= a.rate_lower and b.rate_upper <= a.rate_upper for a, b in zip(rates, rates[1:]))
    record(9, gap <= 0.05 and monotone,
           f"rate at s=0, n=12: {rate12:.4f} vs log lambda_A {log_lam:.4f} (gap {gap:.3f}, tolerance 0.05); "
           f"monotone in s at n={n}: {monotone}")


def test_criterion_10_dyadic_entropy():
    start = time.perf_counter()
    results = [dyadic_pressure(n) for n in range(1, 21)]
    elapsed = time.perf_counter() - start
    last = results[-1]
    rate_ok = abs(last.rate) <= 0.15 and abs(last.rate_lower) <= 0.15
    over = [r.n for r in results if r.Z_lower > r.harmonic]
    ok = rate_ok and not over and elapsed < 120
    record(10, ok, f"n=20 rate in [{last.rate_lower:.4f}, {last.rate:.4f}]; Z_n exceeds the harmonic-block bound "
                   f"for n in {over}; n=20: Z_lower {last.Z_lower:.4f} > bound {last.harmonic:.4f}; {elapsed:.1f}s")


def test_criterion_11_dyadic_extremes():
    ones = [zeta(BitSequence({}, 0, 0)), zeta(BitSequence({-2: 1, -1: 1}, 1, 0)), zeta(BitSequence({0: 1, 3: 1}, 0, 1))]
    exact_one = all(v.value == 1.0 and v.error_bound == 0.0 for v in ones)
    # x[-1] = x[0] = 1 with zeros further left; bits right of 0 do not enter
    rng = random.Random(11)
    family = [zeta(BitSequence({-1: 1, 0: 1}), 1e-12)]
    for _ in range(20):
        win = {-1: 1, 0: 1} | {i: rng.randint(0, 1) for i in range(1, 12)}
        family.append(zeta(BitSequence(win, 0, rng.randint(0, 1)), 1e-12))
    top = max(abs(v.value - math.log2(3)) for v in family)
    record(11, exact_one and top <= 1e-9, f"zero tails give exactly 1: {exact_one}; log2(3) family error {top:.2e}")


def test_criterion_12_determinism(tmp_path):
    runner = CliRunner()

    def invoke(*args):
        res = runner.invoke(main, [str(a) for a in args])
        return res.exit_code, res.output

    script = tmp_path / "script.mv"
    t = fixture("genus2max.trk")
    script.write_text(f"moves v1\nsplit {large_branches(t)[0]} R\nsplit {large_branches(t)[1]} L\n")
    mismatches = []
    base = {}
    for run_id, threads in (("a", 1), ("b", 3)):
        d = tmp_path / run_id
        out = {
            "validate": invoke("validate", "fixtures/sphere5.trk"),
            "type": invoke("type", "fixtures/sphere5.trk", "--json"),
            "cone": invoke("cone", "fixtures/genus2one.trk", "--json"),
            "moves": invoke("moves", "fixtures/genus2max.trk", script, "--out", d / "moves"),
            "subshift": invoke("subshift", "fixtures/sphere5.trk", "--out", d / "sub"),
        }
        sj = d / "sub" / "subshift.json"
        out["pressure"] = invoke("pressure", sj, "--n", 2, "--n", 4, "--s", 0, "--s", 1, "--out", d / "p", "--threads", threads)
        out["orbits"] = invoke("orbits", sj, "--R", 3, "--max-len", 5, "--out", d / "o")
        out["contraction"] = invoke("contraction", sj, "--seed", 9, "--words", 2, "--trials", 20, "--out", d / "c",
                                    "--threads", threads)
        out["zeta"] = invoke("dyadic", "zeta", "--bits", "1|0110.101|0")
        out["dyadic"] = invoke("dyadic", "pressure", "--n", 6, "--n", 10, "--csv", d / "dy" / "z.csv", "--threads", threads)
        files = {}
        for f in sorted(d.rglob("*")):
            if f.is_file():
                data = f.read_bytes()
                if f.name == "manifest.json":
                    m = json.loads(data)
                    m.pop("wall_time")
                    m["arguments"] = {k: v for k, v in m["arguments"].items() if k not in ("out",)}
                    data = json.dumps(m, sort_keys=True).replace(str(d), "<out>").encode()
                files[str(f.relative_to(d))] = data
        out = {k: (code, text.replace(str(d), "<out>")) for k, (code, text) in out.items()}
        if not base:
            base = {"out": out, "files": files}
            continue
        mismatches += [k for k in out if out[k] != base["out"][k]]
        mismatches += [k for k in files if files[k] != base["files"].get(k)]
        mismatches += [k for k in base["files"] if k not in files]
    failing = [k for k, (code, _) in base["out"].items() if code != 0]
    record(12, not mismatches and not failing,
           f"{len(base['files'])} output files and {len(base['out'])} commands compared across threads 1 and 3; "
           f"mismatches {mismatches}; nonzero exits {failing}")
