"""Command-line front end.

Exit codes: 0 success, 1 a verification suite failed, 2 invalid input,
3 budget exhausted, 4 a bound guard or solver invariant failed.
"""

from __future__ import annotations

import csv
import json
import statistics
import sys
import time
from fractions import Fraction

import click

from . import __version__
from .errors import BoundGuard, BudgetExhausted, DFactorError, InvalidInstance, SolverInvariantViolated
from .graph_core import instance_from_json, load_instance
from .rng import RngStream

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_BUDGET, EXIT_GUARD = 0, 1, 2, 3, 4
SUITES = ("expectation", "bijection", "sandwich", "uniformity", "solver-fixed-point")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _run_guarded(fn):
    try:
        return fn()
    except (BoundGuard, SolverInvariantViolated) as exc:
        msg = str(exc)
        _fail(EXIT_GUARD, msg if "oracle" in msg else f"{msg} (rerun with --bound-provider oracle)")
    except BudgetExhausted as exc:
        _fail(EXIT_BUDGET, str(exc))
    except (InvalidInstance, ValueError, KeyError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
    except DFactorError as exc:
        _fail(EXIT_INPUT, str(exc))


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def build_instance(instance_file, n, d, delta, forbidden_file, seed):
    """Exactly one source: an instance file, or ``--n``/``--d`` with optional forbidden pairs."""
    if instance_file is not None:
        if n is not None or d is not None or delta is not None or forbidden_file is not None:
            raise InvalidInstance("--instance excludes --n, --d, --delta and --forbidden")
        return instance_from_json(_read_json(instance_file))
    if n is None or d is None:
        raise InvalidInstance("give --instance, or both --n and --d")
    if delta is not None and forbidden_file is not None:
        raise InvalidInstance("--delta and --forbidden are alternatives")
    if forbidden_file is not None:
        obj = _read_json(forbidden_file)
        pairs = obj.get("forbidden", []) if isinstance(obj, dict) else obj
        return load_instance(n, d, pairs)
    if delta:
        from .regular_gen import random_regular_forbidden
        return load_instance(n, d, random_regular_forbidden(n, delta, RngStream(seed, (1,))))
    return load_instance(n, d, ())


def instance_options(fn):
    opts = [
        click.option("--instance", "instance_file", type=click.Path(dir_okay=False), default=None,
                     help="Instance JSON with n, d and forbidden pairs."),
        click.option("--n", type=int, default=None, help="Number of vertices."),
        click.option("--d", type=int, default=None, help="Target degree."),
        click.option("--delta", type=int, default=None,
                     help="Generate a random regular forbidden graph of this degree."),
        click.option("--forbidden", "forbidden_file", type=click.Path(dir_okay=False), default=None,
                     help="JSON list of forbidden pairs."),
        click.option("--seed", type=int, default=0, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _sampler(inst, algorithm, provider, engine, seed, restart_budget, step_budget):
    from .samplers import Sampler, SamplerConfig
    cfg = SamplerConfig(algorithm=algorithm, provider=provider, engine=engine, seed=seed,
                        restart_budget=restart_budget, step_budget=step_budget)
    return Sampler(inst, cfg)


@click.group()
@click.version_option(version=__version__, prog_name="dfactor")
def main():
    """Sample d-factors of a host graph given by its forbidden pairs."""


@main.command()
@instance_options
@click.option("--algorithm", type=click.Choice(["easy", "uniform", "approx"]), default="uniform", show_default=True)
@click.option("--samples", type=int, default=1, show_default=True)
@click.option("--bound-provider", "provider", type=click.Choice(["analytic", "oracle"]), default="analytic",
              show_default=True)
@click.option("--engine", type=click.Choice(["naive", "cached"]), default="naive", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--restart-budget", type=int, default=10_000, show_default=True)
@click.option("--step-budget", type=int, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Factor output (default stdout).")
@click.option("--telemetry", type=click.Path(dir_okay=False), default=None,
              help="Telemetry JSON file (default stderr).")
def sample(instance_file, n, d, delta, forbidden_file, seed, algorithm, samples, provider, engine, fmt,
           restart_budget, step_budget, jobs, output, telemetry):
    """Draw factors; one sorted edge list per factor."""
    from .samplers import sample_many

    def go():
        inst = build_instance(instance_file, n, d, delta, forbidden_file, seed)
        if samples < 0:
            raise InvalidInstance("--samples must be nonnegative")
        smp = _sampler(inst, algorithm, provider, engine, seed, restart_budget, step_budget)
        keys, tele = sample_many(inst, count=samples, rng=RngStream(seed), sampler=smp, jobs=jobs,
                                 keys_only=True)
        return keys, tele

    keys, tele = _run_guarded(go)
    if fmt == "json":
        text = json.dumps([[list(e) for e in k] for k in keys]) + "\n"
    else:
        text = "\n".join("\n".join(f"{u} {v}" for u, v in k) + "\n" for k in keys)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    report = json.dumps(tele.to_json(), sort_keys=True)
    if telemetry:
        with open(telemetry, "w") as fh:
            fh.write(report + "\n")
    else:
        click.echo(report, err=True)


def _verify_suite(suite, inst, algorithm, provider, samples, seed):
    from . import oracle
    if suite == "expectation":
        rep = oracle.expectation_check(inst)
        return rep["ok"], rep
    if suite == "bijection":
        rep = oracle.bijection_check(inst)
        return rep.ok, {"graphs": rep.graphs, "checked": rep.checked, "mismatches": rep.mismatches[:5]}
    if suite == "sandwich":
        rep = oracle.sandwich(inst)
        return rep["ok"], {"rows": len(rep["rows"]), "violations": rep["violations"]}
    if suite == "uniformity":
        from .samplers import Sampler, SamplerConfig, sample_many
        support = oracle.enumerate_d_factors(inst)
        bounds = None
        if algorithm != "approx" and provider == "oracle":
            bounds = oracle.strata_extrema(inst)
        smp = Sampler(inst, SamplerConfig(algorithm=algorithm, provider=provider, seed=seed), bounds=bounds)
        keys, _ = sample_many(inst, count=samples, rng=RngStream(seed), sampler=smp, keys_only=True)
        rep = oracle.uniformity_test(keys, support, seed)
        ok = rep.chi2_valid and rep.p_value >= 1e-3
        return ok, {"support": rep.support, "samples": rep.samples, "tv": rep.tv, "chi2": rep.chi2,
                    "p_value": rep.p_value, "min_expected": rep.min_expected}
    if suite == "solver-fixed-point":
        from .bounds import make_table
        from .solver import equalization_residuals, fixed_point_residuals, solve_parameters, validate_parameters
        table = make_table(inst, provider)
        params = solve_parameters(table)
        fp = fixed_point_residuals(params, table)
        eq = equalization_residuals(params, table)
        val = validate_parameters(params, table)
        ok = all(r == 0 for r in fp) and all(r == 0 for _, _, r in eq) and val["ok"]
        return ok, {"i1": params.i1, "eps": str(params.eps), "fixed_point_zero": all(r == 0 for r in fp),
                    "equalization_zero": all(r == 0 for _, _, r in eq), "failures": val["failures"]}
    raise InvalidInstance(f"unknown suite {suite!r}")


@main.command()
@instance_options
@click.option("--suite", "suites", type=click.Choice([*SUITES, "all"]), multiple=True, required=True)
@click.option("--algorithm", type=click.Choice(["easy", "uniform", "approx"]), default="easy", show_default=True)
@click.option("--bound-provider", "provider", type=click.Choice(["analytic", "oracle"]), default="oracle",
              show_default=True)
@click.option("--samples", type=int, default=20_000, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def verify(instance_file, n, d, delta, forbidden_file, seed, suites, algorithm, provider, samples, fmt):
    """Run oracle suites on a small instance; exit 1 if any fails."""
    names = SUITES if "all" in suites else suites

    def go():
        inst = build_instance(instance_file, n, d, delta, forbidden_file, seed)
        if "solver-fixed-point" in names and inst.delta and not inst.regular_complement:
            raise InvalidInstance("the solver needs a regular forbidden graph")
        out = {}
        for s in names:
            prov = "analytic" if s == "solver-fixed-point" and provider == "oracle" and inst.n > 12 else provider
            out[s] = _verify_suite(s, inst, algorithm, prov, samples, seed)
        return out

    results = _run_guarded(go)
    ok = all(r[0] for r in results.values())
    if fmt == "json":
        click.echo(json.dumps({s: {"pass": r[0], **r[1]} for s, r in results.items()}, default=str, sort_keys=True))
    else:
        for s, (passed, detail) in results.items():
            click.echo(f"{s}: {'pass' if passed else 'FAIL'} {json.dumps(detail, default=str, sort_keys=True)}")
    sys.exit(EXIT_OK if ok else EXIT_FAILED)


def bench_rows(algorithms, ns, d, delta, samples, seed, provider="analytic"):
    """Per-sample wall-clock statistics for each (algorithm, n)."""
    from .samplers import Sampler, SamplerConfig
    from .regular_gen import random_regular_forbidden
    rows = []
    for n in ns:
        pairs = random_regular_forbidden(n, delta, RngStream(seed, (1,))) if delta else []
        inst = load_instance(n, d, pairs)
        for alg in algorithms:
            smp = Sampler(inst, SamplerConfig(algorithm=alg, provider=provider, seed=seed))
            base = RngStream(seed)
            times, restarts = [], 0
            for k in range(samples):
                t0 = time.perf_counter()
                _, tele = smp.run(base.child(k))
                times.append((time.perf_counter() - t0) * 1000)
                restarts += tele.restarts
            rows.append({"algorithm": alg, "n": n, "d": d, "delta": delta, "samples": samples,
                         "mean_ms": statistics.fmean(times), "median_ms": statistics.median(times),
                         "max_ms": max(times), "restarts": restarts})
    return rows


BENCH_COLUMNS = ("algorithm", "n", "d", "delta", "samples", "mean_ms", "median_ms", "max_ms", "restarts")


@main.command()
@click.option("--algorithm", "algorithms", type=click.Choice(["easy", "uniform", "approx"]), multiple=True,
              default=("approx",), show_default=True)
@click.option("--n", "ns", type=int, multiple=True, default=(1000, 10_000, 100_000), show_default=True)
@click.option("--d", type=int, default=3, show_default=True)
@click.option("--delta", type=int, default=3, show_default=True)
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--bound-provider", "provider", type=click.Choice(["analytic", "oracle"]), default="analytic")
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="CSV file (default stdout).")
def bench(algorithms, ns, d, delta, samples, seed, provider, output):
    """Time samplers over a grid of n and write CSV."""
    rows = _run_guarded(lambda: bench_rows(algorithms, ns, d, delta, samples, seed, provider))
    fh = open(output, "w", newline="") if output else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.3f}" if isinstance(v, float) else v) for k, v in r.items()})
    finally:
        if output:
            fh.close()


@main.command("solve-params")
@instance_options
@click.option("--bound-provider", "provider", type=click.Choice(["analytic", "oracle"]), default="analytic",
              show_default=True)
@click.option("--eps", default=None, help="Override epsilon (a rational such as 1/125).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
def solve_params(instance_file, n, d, delta, forbidden_file, seed, provider, eps, fmt):
    """Solve the type probabilities; exit 4 if an invariant fails."""
    from .bounds import make_table
    from .solver import solve_parameters, validate_parameters

    def go():
        inst = build_instance(instance_file, n, d, delta, forbidden_file, seed)
        table = make_table(inst, provider)
        params = solve_parameters(table, None if eps is None else Fraction(eps))
        return params, validate_parameters(params, table)

    params, val = _run_guarded(go)
    if fmt == "json":
        click.echo(json.dumps({
            "i1": params.i1, "eps": str(params.eps), "x": [str(x) for x in params.x],
            "rho": {f"{t}:{i}": str(v) for (t, i), v in sorted(params.rho.items())},
            "validation": val,
        }, sort_keys=True))
    else:
        click.echo(params.to_csv(), nl=False)
        click.echo(json.dumps(val, sort_keys=True), err=True)
    sys.exit(EXIT_OK if val["ok"] else EXIT_GUARD)


if __name__ == "__main__":  # pragma: no cover
    main()
