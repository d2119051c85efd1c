"""Command-line harness for the factorization benchmarks.

Six subcommands drive the library end to end and emit deterministic
tab-separated tables::

    runtime        wall-clock timing of the randomized factorizations
    spectrum       singular-value estimates per algorithm and index
    lowrank        low-rank reconstruction error curves (both norms)
    image          PGM reconstruction at given ranks, plus error records
    norm-ratio     estimated-to-exact spectral-norm ratios
    verify-bounds  the full inequality suite; exit 1 on any strict violation

Shared conventions:

* every row carries the full parameter tuple needed to regenerate it;
* the first output line is a ``#`` comment with the tool version and the
  resolved configuration, followed by a header row;
* identical (configuration, seed) produce byte-identical tables, except for
  the timing columns of ``runtime``;
* numbers are serialized with :func:`repr` so round-tripping is exact.

Flags may also be supplied through ``--config`` as ``key=value`` lines
(``#`` comments allowed); explicit flags override the file, and unknown keys
are rejected.  The default output directory is the current directory,
overridable with the ``PBPQLP_OUT_DIR`` environment variable.

Exit codes: 0 success, 1 bound violation, 2 usage error, 3 input or format
error, 4 resource refusal.
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import pbp_qlp
from .analysis import (
    ALGORITHMS,
    DETERMINISTIC_ALGORITHMS,
    RANDOMIZED_ALGORITHMS,
    error_curve,
    factorize,
    l2_norm_ratio,
    low_rank_approx,
    singular_value_estimates,
)
from .bounds import BoundContext, BoundReport, eval_deterministic_bounds, eval_highprob_bounds
from .exceptions import (
    ContextError,
    ConvergenceError,
    MatrixInputError,
    ParameterError,
    PgmFormatError,
    ResourceLimitError,
)
from .hansen import HANSEN_NAMES
from .linalg import spectral_norm
from .matgen import SpectrumSpec
from .pgm import write_pgm
from .validation import check_count, check_index_range

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_RESOURCE = 4

#: Environment variable naming the default output directory.
OUT_DIR_ENV = "PBPQLP_OUT_DIR"

#: Bytes per dense float64 entry times the working copies a factorization
#: needs (input, sketch products, reconstruction); the refusal threshold is
#: ``MEMORY_FACTOR * n1 * n2`` against ``--mem-cap``.
MEMORY_FACTOR = 3 * 8

#: Default memory cap in bytes; admits square inputs up to order 2500.
DEFAULT_MEM_CAP = MEMORY_FACTOR * 2500 * 2500

#: The spectrum command can also plot the first-stage diagonal of the
#: two-sided factorization; it is a series, not a standalone algorithm.
R_VALUES_SERIES = "r_values"

#: Keys accepted in a ``--config`` file (flag names, dashes or underscores).
CONFIG_KEYS = (
    "matrix",
    "n",
    "k",
    "d",
    "q",
    "alg",
    "seed",
    "trials",
    "out",
    "format",
    "mem_cap",
    "no_reorth",
    "p",
    "upsilon",
)

#: Hook applied to each trial's factors in ``verify-bounds`` before
#: evaluation.  Tests monkeypatch this to corrupt factors and assert the
#: suite catches the damage; production runs leave it ``None``.
_FACTOR_HOOK = None


# ---------------------------------------------------------------------------
# flag parsing and config resolution


def _parse_int_list(text, name):
    out = []
    for piece in str(text).split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            out.append(int(piece))
        except ValueError:
            raise ParameterError(
                f"{name}: expected comma-separated integers, got {text!r}"
            ) from None
    if not out:
        raise ParameterError(f"{name}: expected at least one integer, got {text!r}")
    return out


def _parse_str_list(text, name):
    out = [piece.strip() for piece in str(text).split(",") if piece.strip()]
    if not out:
        raise ParameterError(f"{name}: expected at least one entry, got {text!r}")
    return out


def _parse_d_spec(text):
    """Parse ``--d``: either absolute sizes ``20,30`` or ``frac:0.04,0.2``."""
    text = str(text).strip()
    if text.lower().startswith("frac:"):
        fractions = []
        for piece in text[len("frac:"):].split(","):
            piece = piece.strip()
            if not piece:
                continue
            try:
                value = float(piece)
            except ValueError:
                raise ParameterError(
                    f"d: expected comma-separated fractions after 'frac:', got {text!r}"
                ) from None
            if not 0.0 < value <= 1.0:
                raise ParameterError(f"d: fractions must lie in (0, 1], got {value}")
            fractions.append(value)
        if not fractions:
            raise ParameterError(f"d: expected at least one fraction, got {text!r}")
        return ("frac", fractions)
    return ("abs", _parse_int_list(text, "d"))


def _resolve_d_list(d_spec, limit):
    """Turn a parsed ``--d`` value into concrete sizes for one matrix."""
    kind, values = d_spec
    if kind == "abs":
        return [check_index_range(v, "d", 1, limit) for v in values]
    return [min(limit, max(1, int(round(f * limit)))) for f in values]


def _parse_bool(text, name):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"{name}: expected a boolean, got {text!r}")


def _read_config_file(path):
    text = Path(path).read_text(encoding="utf-8")
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip().lower().replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ParameterError(
                f"{path}:{lineno}: unknown config key {key!r}; "
                f"valid keys: {', '.join(CONFIG_KEYS)}"
            )
        values[key] = value.strip()
    return values


class _Resolver:
    """Merge CLI flags over config-file values over per-command defaults."""

    def __init__(self, args):
        self.args = args
        self.config = _read_config_file(args.config) if args.config else {}

    def raw(self, key, default=None):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.config.get(key)
        if value is None:
            value = default
        return value

    def integer(self, key, default, minimum=0):
        value = self.raw(key)
        if value is None:
            return default
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise ParameterError(f"{key}: expected an integer, got {value!r}") from None
        return check_count(value, key, minimum=minimum)

    def floating(self, key, default):
        value = self.raw(key)
        if value is None:
            return default
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ParameterError(f"{key}: expected a number, got {value!r}") from None

    def int_list(self, key, default):
        value = self.raw(key)
        if value is None:
            return list(default) if default is not None else None
        return _parse_int_list(value, key)

    def str_list(self, key, default):
        value = self.raw(key)
        if value is None:
            return list(default)
        return _parse_str_list(value, key)

    def boolean(self, key, default=False):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.config.get(key)
            if value is not None:
                value = _parse_bool(value, key)
        return default if value is None else bool(value)


def _single(values, name):
    if values is None:
        raise ParameterError(f"{name} is required for this command")
    if len(values) != 1:
        raise ParameterError(f"{name}: expected a single value, got {values!r}")
    return values[0]


def _check_algorithms(algs, allowed, command):
    for alg in algs:
        if alg not in allowed:
            raise ParameterError(
                f"{command}: unknown or unsupported algorithm {alg!r}; "
                f"choose from {', '.join(allowed)}"
            )
    return algs


def _check_workload(n1, n2, cap):
    required = MEMORY_FACTOR * int(n1) * int(n2)
    if required > cap:
        raise ResourceLimitError(
            f"refusing a {n1} x {n2} dense workload: it needs about {required} bytes "
            f"({MEMORY_FACTOR} bytes per entry including working copies), which exceeds "
            f"the memory cap of {cap} bytes; raise --mem-cap to proceed"
        )


# ---------------------------------------------------------------------------
# output helpers


def _output_path(out, command):
    if out:
        path = Path(out)
    else:
        base = Path(os.environ.get(OUT_DIR_ENV, "."))
        path = base / f"{command.replace('-', '_')}.dsv"
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _cell(value):
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_table(path, command, config_pairs, header, rows):
    config_echo = " ".join(f"{key}={value}" for key, value in config_pairs)
    lines = [f"# pbpqlp {__version__} {command} {config_echo}".rstrip()]
    lines.append("\t".join(header))
    for row in rows:
        if len(row) != len(header):
            raise AssertionError("row width disagrees with header")
        lines.append("\t".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _format_check(resolver):
    fmt = str(resolver.raw("format", "dsv")).strip().lower()
    if fmt != "dsv":
        raise ParameterError(f"format: only 'dsv' is supported, got {fmt!r}")
    return fmt


def _echo_list(values):
    return ",".join(str(v) for v in values)


def _echo_d(d_spec):
    kind, values = d_spec
    if kind == "frac":
        return "frac:" + _echo_list(values)
    return _echo_list(values)


# ---------------------------------------------------------------------------
# shared experiment plumbing


def _series_jobs(algs, q_list):
    """(alg, q) pairs to run: deterministic algorithms once, at q = 0."""
    jobs = []
    for alg in algs:
        if alg in DETERMINISTIC_ALGORITHMS:
            jobs.append((alg, 0))
        else:
            jobs.extend((alg, q) for q in q_list)
    return jobs


def _build_matrix(spec_text, n, seed):
    spec = SpectrumSpec.parse(spec_text, n=n, seed=seed)
    return spec, spec.build()


def _matrix_order(resolver, matrix):
    """Resolve --n; the image family reads its size from the file instead."""
    values = resolver.int_list("n", None)
    if str(matrix).strip().partition(":")[0].lower() == "image":
        return 0 if values is None else _single(values, "n")
    return _single(values, "n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_runtime(resolver):
    _format_check(resolver)
    matrix = resolver.raw("matrix", "lowrank")
    n_list = resolver.int_list("n", None)
    if n_list is None:
        raise ParameterError("runtime: --n is required (comma list of matrix orders)")
    d_spec = _parse_d_spec(resolver.raw("d", "frac:0.2"))
    q_list = resolver.int_list("q", (0,))
    algs = _check_algorithms(
        resolver.str_list("alg", RANDOMIZED_ALGORITHMS), RANDOMIZED_ALGORITHMS, "runtime"
    )
    seed = resolver.integer("seed", 0)
    trials = resolver.integer("trials", 5, minimum=1)
    cap = resolver.integer("mem_cap", DEFAULT_MEM_CAP, minimum=1)
    reorth = not resolver.boolean("no_reorth")

    rows = []
    for n in n_list:
        check_count(n, "n", minimum=2)
        _check_workload(n, n, cap)
        _, a = _build_matrix(matrix, n, seed)
        for d in _resolve_d_list(d_spec, min(a.shape)):
            for q in q_list:
                for alg in algs:
                    factorize(a, alg, d, q=q, seed=seed, reorthonormalize=reorth)
                    samples = []
                    for t in range(trials):
                        start = time.perf_counter_ns()
                        factorize(a, alg, d, q=q, seed=seed + 1 + t, reorthonormalize=reorth)
                        samples.append(time.perf_counter_ns() - start)
                    rows.append(
                        (
                            "runtime",
                            alg,
                            a.shape[0],
                            a.shape[1],
                            d,
                            q,
                            seed,
                            trials,
                            float(statistics.median(samples)),
                            float(statistics.fmean(samples)),
                        )
                    )

    path = _output_path(resolver.raw("out"), "runtime")
    config = [
        ("matrix", matrix),
        ("n", _echo_list(n_list)),
        ("d", _echo_d(d_spec)),
        ("q", _echo_list(q_list)),
        ("alg", _echo_list(algs)),
        ("seed", seed),
        ("trials", trials),
        ("reorth", int(reorth)),
    ]
    header = (
        "experiment",
        "alg",
        "n1",
        "n2",
        "d",
        "q",
        "seed",
        "trials",
        "median_ns",
        "mean_ns",
    )
    _write_table(path, "runtime", config, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _spectrum_series(a, alg, d, q, seed, reorth):
    if alg == R_VALUES_SERIES:
        factors = pbp_qlp(a, d, q=q, seed=seed, reorthonormalize=reorth)
        return factors.r_values
    factors = factorize(a, alg, d, q=q, seed=seed, reorthonormalize=reorth)
    return singular_value_estimates(factors)[:d]


def _cmd_spectrum(resolver):
    _format_check(resolver)
    matrix = resolver.raw("matrix", "lowrank")
    n = _matrix_order(resolver, matrix)
    seed = resolver.integer("seed", 0)
    spec, a = _build_matrix(matrix, n, seed)
    cap = resolver.integer("mem_cap", DEFAULT_MEM_CAP, minimum=1)
    _check_workload(a.shape[0], a.shape[1], cap)

    d = _single(
        _resolve_d_list(_parse_d_spec(resolver.raw("d", "30")), min(a.shape)), "d"
    )
    q_list = resolver.int_list("q", (0,))
    allowed = ALGORITHMS + (R_VALUES_SERIES,)
    algs = _check_algorithms(resolver.str_list("alg", allowed), allowed, "spectrum")
    reorth = not resolver.boolean("no_reorth")

    rows = []
    for alg, q in _series_jobs(algs, q_list):
        series = _spectrum_series(a, alg, d, q, seed, reorth)
        for index, value in enumerate(series, 1):
            rows.append(
                ("spectrum", alg, a.shape[0], a.shape[1], d, q, seed, index, float(value))
            )

    path = _output_path(resolver.raw("out"), "spectrum")
    config = [
        ("matrix", spec.describe()),
        ("n", n),
        ("d", d),
        ("q", _echo_list(q_list)),
        ("alg", _echo_list(algs)),
        ("seed", seed),
        ("reorth", int(reorth)),
    ]
    header = ("experiment", "alg", "n1", "n2", "d", "q", "seed", "index", "value")
    _write_table(path, "spectrum", config, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_lowrank(resolver):
    _format_check(resolver)
    matrix = resolver.raw("matrix", "lowrank")
    n = _matrix_order(resolver, matrix)
    seed = resolver.integer("seed", 0)
    spec, a = _build_matrix(matrix, n, seed)
    cap = resolver.integer("mem_cap", DEFAULT_MEM_CAP, minimum=1)
    _check_workload(a.shape[0], a.shape[1], cap)

    d_raw = resolver.raw("d")
    if d_raw is None:
        raise ParameterError("lowrank: --d is required (rank list or frac: list)")
    d_spec = _parse_d_spec(d_raw)
    d_list = _resolve_d_list(d_spec, min(a.shape))
    q_list = resolver.int_list("q", (0,))
    algs = _check_algorithms(resolver.str_list("alg", ALGORITHMS), ALGORITHMS, "lowrank")
    reorth = not resolver.boolean("no_reorth")

    rows = []
    for alg, q in _series_jobs(algs, q_list):
        records = error_curve(a, alg, d_list, q=q, seed=seed, reorthonormalize=reorth)
        for record in records:
            for metric in ("spectral_error", "frobenius_error"):
                rows.append(
                    (
                        "lowrank",
                        alg,
                        a.shape[0],
                        a.shape[1],
                        record["d"],
                        q,
                        seed,
                        metric,
                        float(record[metric]),
                    )
                )

    path = _output_path(resolver.raw("out"), "lowrank")
    config = [
        ("matrix", spec.describe()),
        ("n", n),
        ("d", _echo_d(d_spec)),
        ("q", _echo_list(q_list)),
        ("alg", _echo_list(algs)),
        ("seed", seed),
        ("reorth", int(reorth)),
    ]
    header = ("experiment", "alg", "n1", "n2", "d", "q", "seed", "metric", "value")
    _write_table(path, "lowrank", config, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_image(resolver):
    _format_check(resolver)
    matrix = resolver.raw("matrix")
    if matrix is None:
        raise ParameterError("image: --matrix image:<path.pgm> is required")
    seed = resolver.integer("seed", 0)
    spec = SpectrumSpec.parse(matrix, n=0, seed=seed)
    if spec.family != "image":
        raise ParameterError(
            f"image: --matrix must use the image family, got {spec.describe()!r}"
        )
    a = spec.build()
    cap = resolver.integer("mem_cap", DEFAULT_MEM_CAP, minimum=1)
    _check_workload(a.shape[0], a.shape[1], cap)

    limit = min(a.shape)
    ranks = [check_index_range(r, "k", 1, limit) for r in resolver.int_list("k", (80,))]
    q_list = resolver.int_list("q", (0,))
    algs = _check_algorithms(resolver.str_list("alg", ALGORITHMS), ALGORITHMS, "image")
    reorth = not resolver.boolean("no_reorth")

    path = _output_path(resolver.raw("out"), "image")
    stem = Path(spec.params["path"]).stem
    rows = []
    for alg, q in _series_jobs(algs, q_list):
        base = factorize(a, alg, limit) if alg in DETERMINISTIC_ALGORITHMS else None
        for rank in ranks:
            if base is not None:
                approx = low_rank_approx(base, rank=rank)
            else:
                factors = factorize(a, alg, rank, q=q, seed=seed, reorthonormalize=reorth)
                approx = low_rank_approx(factors)
            artifact = path.parent / f"{stem}_{alg}_q{q}_r{rank}.pgm"
            write_pgm(np.clip(approx, 0.0, 1.0), artifact)
            residual = a - approx
            frobenius = float(np.linalg.norm(residual))
            spectral = spectral_norm(residual)
            for metric, value in (
                ("frobenius_error", frobenius),
                ("spectral_error", spectral),
            ):
                rows.append(
                    (
                        "image",
                        alg,
                        a.shape[0],
                        a.shape[1],
                        rank,
                        q,
                        seed,
                        metric,
                        value,
                        artifact.name,
                    )
                )

    config = [
        ("matrix", spec.describe()),
        ("k", _echo_list(ranks)),
        ("q", _echo_list(q_list)),
        ("alg", _echo_list(algs)),
        ("seed", seed),
        ("reorth", int(reorth)),
    ]
    header = (
        "experiment",
        "alg",
        "n1",
        "n2",
        "d",
        "q",
        "seed",
        "metric",
        "value",
        "artifact",
    )
    _write_table(path, "image", config, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _norm_ratio_specs(resolver, seed):
    """Expand --matrix for norm-ratio; hansen accepts a comma list or 'all'."""
    matrix = resolver.raw("matrix", "hansen:all")
    n = _single(resolver.int_list("n", (1000,)), "n")
    family, _, rest = str(matrix).strip().partition(":")
    if family.lower() == "hansen":
        names = [piece.strip().lower() for piece in rest.split(",") if piece.strip()]
        if not names or names == ["all"]:
            names = list(HANSEN_NAMES)
        return [SpectrumSpec.parse(f"hansen:{name}", n=n, seed=seed) for name in names]
    return [SpectrumSpec.parse(matrix, n=n, seed=seed)]


def _cmd_norm_ratio(resolver):
    _format_check(resolver)
    seed = resolver.integer("seed", 0)
    specs = _norm_ratio_specs(resolver, seed)
    cap = resolver.integer("mem_cap", DEFAULT_MEM_CAP, minimum=1)
    q_list = resolver.int_list("q", (0, 2))
    algs = _check_algorithms(
        resolver.str_list("alg", ("cpqr", "pqlp", "pbp_qlp")), ALGORITHMS, "norm-ratio"
    )
    reorth = not resolver.boolean("no_reorth")
    d_raw = resolver.raw("d")
    d = None if d_raw is None else _single(_parse_int_list(d_raw, "d"), "d")

    rows = []
    for spec in specs:
        a = spec.build()
        _check_workload(a.shape[0], a.shape[1], cap)
        d_used = min(20, min(a.shape)) if d is None else d
        for alg, q in _series_jobs(algs, q_list):
            ratio = l2_norm_ratio(a, alg, q=q, seed=seed, d=d, reorthonormalize=reorth)
            rows.append(
                (
                    "norm-ratio",
                    alg,
                    a.shape[0],
                    a.shape[1],
                    d_used,
                    q,
                    seed,
                    spec.describe(),
                    "l2_norm_ratio",
                    float(ratio),
                )
            )

    path = _output_path(resolver.raw("out"), "norm-ratio")
    config = [
        ("matrix", ",".join(spec.describe() for spec in specs)),
        ("n", specs[0].n),
        ("d", "default" if d is None else d),
        ("q", _echo_list(q_list)),
        ("alg", _echo_list(algs)),
        ("seed", seed),
        ("reorth", int(reorth)),
    ]
    header = (
        "experiment",
        "alg",
        "n1",
        "n2",
        "d",
        "q",
        "seed",
        "matrix",
        "metric",
        "value",
    )
    _write_table(path, "norm-ratio", config, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_verify_bounds(resolver):
    _format_check(resolver)
    matrix = resolver.raw("matrix", "lowrank")
    n = _matrix_order(resolver, matrix)
    seed = resolver.integer("seed", 0)
    spec, a = _build_matrix(matrix, n, seed)
    cap = resolver.integer("mem_cap", DEFAULT_MEM_CAP, minimum=1)
    _check_workload(a.shape[0], a.shape[1], cap)

    k = _single(resolver.int_list("k", (20,)), "k")
    d = _single(
        _resolve_d_list(_parse_d_spec(resolver.raw("d", "30")), min(a.shape)), "d"
    )
    p = resolver.integer("p", 5)
    upsilon = resolver.floating("upsilon", 0.05)
    q_list = resolver.int_list("q", (0,))
    trials = resolver.integer("trials", 100, minimum=1)
    reorth = not resolver.boolean("no_reorth")
    algs = resolver.str_list("alg", ("pbp_qlp",))
    if algs != ["pbp_qlp"]:
        raise ParameterError(
            "verify-bounds: the inequality suite applies to pbp_qlp only"
        )

    entries = []
    for q in q_list:
        ctx = BoundContext.from_matrix(a, k=k, d=d, p=p, q=q, upsilon=upsilon)
        for trial in range(trials):
            trial_seed = seed + trial
            factors = pbp_qlp(a, d, q=q, seed=trial_seed, reorthonormalize=reorth)
            if _FACTOR_HOOK is not None:
                factors = _FACTOR_HOOK(factors)
            try:
                report = eval_deterministic_bounds(a, factors, ctx)
            except ContextError as exc:
                raise ContextError(f"trial seed {trial_seed}: {exc}") from exc
            entries.extend(report.entries)
        entries.extend(eval_highprob_bounds(a, trials, ctx, seed=seed).entries)

    report = BoundReport(entries)
    path = _output_path(resolver.raw("out"), "verify-bounds")
    config = [
        ("matrix", spec.describe()),
        ("n", n),
        ("k", k),
        ("d", d),
        ("p", p),
        ("q", _echo_list(q_list)),
        ("upsilon", upsilon),
        ("seed", seed),
        ("trials", trials),
        ("reorth", int(reorth)),
    ]
    _write_table(path, "verify-bounds", config, BoundReport.HEADER, report.to_rows())
    print(f"wrote {path} ({len(report.entries)} rows)")

    violations = report.violations()
    if violations:
        for entry in violations[:10]:
            print(
                f"bound violation: {entry.bound} seed={entry.seed} q={entry.q} "
                f"lhs={entry.lhs!r} rhs={entry.rhs!r}",
                file=sys.stderr,
            )
        if len(violations) > 10:
            print(f"... and {len(violations) - 10} more", file=sys.stderr)
        print(f"{len(violations)} strict bound violation(s)", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


_COMMANDS = {
    "runtime": _cmd_runtime,
    "spectrum": _cmd_spectrum,
    "lowrank": _cmd_lowrank,
    "image": _cmd_image,
    "norm-ratio": _cmd_norm_ratio,
    "verify-bounds": _cmd_verify_bounds,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="pbpqlp",
        description="Benchmark harness for randomized rank-revealing factorizations.",
    )
    parser.add_argument("--version", action="version", version=f"pbpqlp {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in _COMMANDS:
        sub = subparsers.add_parser(command, help=f"run the {command} experiment")
        sub.add_argument("--matrix", help="matrix spec, family[:params]")
        sub.add_argument("--n", help="matrix order (comma list for runtime)")
        sub.add_argument("--k", help="target rank (image: comma list of ranks)")
        sub.add_argument("--d", help="sampling sizes: comma list or frac:<list>")
        sub.add_argument("--q", help="power-iteration exponents, comma list")
        sub.add_argument("--alg", help="algorithm ids, comma list")
        sub.add_argument("--seed", help="base seed (trial t uses seed+t)")
        sub.add_argument("--trials", help="number of repetitions")
        sub.add_argument("--out", help="output table path")
        sub.add_argument("--format", help="output format (dsv)")
        sub.add_argument("--config", help="key=value config file; flags override")
        sub.add_argument("--mem-cap", dest="mem_cap", help="memory cap in bytes")
        sub.add_argument(
            "--no-reorth",
            dest="no_reorth",
            action="store_const",
            const=True,
            help="use the unorthonormalized power-iteration variants",
        )
        if command == "verify-bounds":
            sub.add_argument("--p", help="analysis slack, k + p <= d")
            sub.add_argument("--upsilon", help="failure probability of the tail bounds")
    return parser


def main(argv=None):
    try:
        args = _build_parser().parse_args(argv)
        return _COMMANDS[args.command](_Resolver(args))
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (MatrixInputError, PgmFormatError, ContextError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
