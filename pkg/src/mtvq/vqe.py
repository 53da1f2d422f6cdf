"""Sampling VQE: SPSA over two-local ansatz angles against a sampled diagonal H.

Randomness: run ``r`` of a job with master seed ``s`` draws everything
(initial angles, SPSA perturbations, shot sampling) from one PCG64 stream
seeded by ``SeedSequence(s, spawn_key=(r,))``. Runs are therefore independent
of each other and of the order or process in which they execute.
"""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import SimulationError, ValidationError
from .exact import ground_state
from .hamiltonian import (
    ProblemSpec,
    bits_to_index,
    cost_table,
    format_bitstring,
    index_to_bits,
    parse_bitstring,
    total_cost,
)
from .statevector import MAX_QUBITS, exact_probabilities, sample_counts, two_local_state

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.01, 0.1, 0.25, 0.5)
THREADS_ENV = "MTVQ_THREADS"


@dataclass(frozen=True)
class VqeSettings:
    """Optimizer and sampling settings.

    ``shots=None`` evaluates expectations from exact probabilities (the
    infinite-shot limit). ``a=None`` calibrates the SPSA step gain at the
    initial point so that the first update has magnitude ``target_step``.
    ``A=None`` means 10% of ``iterations``.
    """

    iterations: int = 300
    shots: int | None = 1024
    runs: int = 128
    master_seed: int = 0
    a: float | None = None
    c: float = 0.1
    A: float | None = None
    alpha: float = 0.602
    gamma: float = 0.101
    target_step: float = 0.15
    calibration_samples: int = 25
    resample_only: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        if self.shots is not None and self.shots < 1:
            raise ValidationError(f"shots must be >= 1, got {self.shots}")
        if self.runs < 1:
            raise ValidationError(f"runs must be >= 1, got {self.runs}")
        if self.c <= 0:
            raise ValidationError("perturbation gain c must be positive")

    @property
    def stability(self) -> float:
        return 0.1 * self.iterations if self.A is None else self.A


@dataclass(frozen=True)
class Distribution:
    """Sparse probability map over measured bitstrings."""

    probabilities: Mapping[str, float]
    n_qubits: int

    def __post_init__(self):
        total = sum(self.probabilities.values())
        if self.probabilities and abs(total - 1.0) > 1e-9:
            raise ValidationError(f"probabilities sum to {total}, not 1")

    @classmethod
    def from_counts(cls, counts: np.ndarray, n_qubits: int) -> Distribution:
        shots = int(counts.sum())
        idx = np.flatnonzero(counts)
        return cls({format_bitstring(b): counts[i] / shots
                    for i, b in zip(idx, index_to_bits(idx, n_qubits))}, n_qubits)

    def argmax(self, spec: ProblemSpec | None = None) -> str:
        """Most probable bitstring; ties go to lower H (if spec given), then lexicographic."""
        top = max(self.probabilities.values())
        tied = sorted(b for b, p in self.probabilities.items() if p == top)
        if spec is not None and len(tied) > 1:
            table = _h_lookup(spec)
            tied.sort(key=lambda b: (table(b), b))
        return tied[0]


@dataclass
class RunResult:
    run_index: int
    parameters: np.ndarray
    distribution: Distribution
    trace: np.ndarray = field(repr=False)


class RunError(SimulationError):
    def __init__(self, run_index: int, cause: BaseException):
        super().__init__(f"run {run_index} failed: {cause}")
        self.run_index = run_index


def make_rng(master_seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(run_index,))))


def _h_lookup(spec: ProblemSpec) -> Callable[[str], float]:
    return lambda b: float(total_cost(b, spec))


def expectation(counts, shots: int, spec: ProblemSpec, h_table: np.ndarray | None = None) -> float:
    """Shot-weighted mean of H.

    ``counts`` is either a mapping bitstring -> count or a dense array indexed
    by basis index. Passing real-valued probabilities with ``shots=1`` gives
    the exact expectation.
    """
    if isinstance(counts, Mapping):
        total = sum(counts.values())
        if not math.isclose(total, shots, rel_tol=0, abs_tol=1e-9):
            raise ValidationError(f"counts sum to {total} but shots={shots}")
        if h_table is None:
            return sum(c * float(total_cost(b, spec)) for b, c in counts.items()) / shots
        return sum(c * h_table[bits_to_index(parse_bitstring(b))] for b, c in counts.items()) / shots
    counts = np.asarray(counts)
    if not math.isclose(float(counts.sum()), shots, rel_tol=0, abs_tol=1e-9):
        raise ValidationError(f"counts sum to {counts.sum()} but shots={shots}")
    table = cost_table(spec) if h_table is None else h_table
    return float(counts @ table) / shots


def spsa_minimize(objective: Callable[[np.ndarray], float], theta0, settings: VqeSettings,
                  rng: np.random.Generator,
                  callback: Callable[[int, np.ndarray, float], None] | None = None) -> np.ndarray:
    """Run ``settings.iterations`` SPSA steps and return the final parameters.

    Gains: a_k = a / (k + 1 + A)**alpha, c_k = c / (k + 1)**gamma, with
    Rademacher perturbations. ``callback(k, theta, f_est)`` receives the mean
    of the two perturbed evaluations of step ``k``.
    """
    theta = np.array(theta0, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValidationError("initial parameters must be finite")
    A, c = settings.stability, settings.c

    def evaluate(x, k):
        value = float(objective(x))
        if not math.isfinite(value):
            raise SimulationError(f"objective returned {value} at iteration {k}")
        return value

    a = settings.a
    if a is None:
        mags = []
        for _ in range(settings.calibration_samples):
            delta = rng.choice((-1.0, 1.0), size=theta.shape)
            diff = evaluate(theta + c * delta, -1) - evaluate(theta - c * delta, -1)
            mags.append(abs(diff) / (2 * c))
        mean_mag = float(np.mean(mags))
        a = settings.target_step * (A + 1) ** settings.alpha / mean_mag if mean_mag > 0 else settings.target_step
        log.debug("calibrated SPSA a=%.5g from mean gradient magnitude %.5g", a, mean_mag)

    for k in range(settings.iterations):
        ak = a / (k + 1 + A) ** settings.alpha
        ck = c / (k + 1) ** settings.gamma
        delta = rng.choice((-1.0, 1.0), size=theta.shape)
        f_plus = evaluate(theta + ck * delta, k)
        f_minus = evaluate(theta - ck * delta, k)
        grad = (f_plus - f_minus) / (2 * ck) * delta
        theta = theta - ak * grad
        if callback is not None:
            callback(k, theta, 0.5 * (f_plus + f_minus))
    return theta


def _check_vqe_size(spec: ProblemSpec) -> None:
    if spec.n_qubits > MAX_QUBITS:
        raise SimulationError(f"{spec.n_qubits} qubits exceeds the simulator bound of {MAX_QUBITS}")


def _sampled_objective(spec: ProblemSpec, shots: int | None, h_table: np.ndarray,
                       rng: np.random.Generator) -> Callable[[np.ndarray], float]:
    n = spec.n_qubits

    def objective(theta):
        probs = exact_probabilities(two_local_state(theta, n))
        if shots is None:
            return float(probs @ h_table)
        return float(sample_counts(probs, shots, rng) @ h_table) / shots

    return objective


def _final_distribution(theta, spec: ProblemSpec, settings: VqeSettings,
                        rng: np.random.Generator) -> Distribution:
    probs = exact_probabilities(two_local_state(theta, spec.n_qubits))
    if settings.shots is None:
        idx = np.flatnonzero(probs > 0)
        total = probs[idx].sum()
        return Distribution({format_bitstring(b): float(probs[i] / total)
                             for i, b in zip(idx, index_to_bits(idx, spec.n_qubits))}, spec.n_qubits)
    return Distribution.from_counts(sample_counts(probs, settings.shots, rng), spec.n_qubits)


def run_vqe(spec: ProblemSpec, settings: VqeSettings, run_index: int,
            h_table: np.ndarray | None = None) -> RunResult:
    """One optimize-then-sample run on its own random stream."""
    _check_vqe_size(spec)
    table = cost_table(spec) if h_table is None else h_table
    rng = make_rng(settings.master_seed, run_index)
    n_params = 2 * spec.n_qubits
    theta0 = rng.uniform(-2 * np.pi, 2 * np.pi, size=n_params)
    trace = np.empty(settings.iterations)

    def record(k, _theta, f_est):
        trace[k] = f_est

    objective = _sampled_objective(spec, settings.shots, table, rng)
    theta = spsa_minimize(objective, theta0, settings, rng, callback=record)
    return RunResult(run_index, theta, _final_distribution(theta, spec, settings, rng), trace)


def _resample(spec: ProblemSpec, settings: VqeSettings, base: RunResult, run_index: int) -> RunResult:
    rng = make_rng(settings.master_seed, run_index)
    return RunResult(run_index, base.parameters, _final_distribution(base.parameters, spec, settings, rng),
                     base.trace)


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _run_one(args) -> RunResult:
    spec, settings, run_index, table = args
    try:
        return run_vqe(spec, settings, run_index, table)
    except Exception as exc:  # re-raised with the run index attached
        raise RunError(run_index, exc) from exc


def run_many(spec: ProblemSpec, settings: VqeSettings, workers: int | None = None) -> list[RunResult]:
    """``settings.runs`` results ordered by run index.

    Default mode performs independent optimizations per run. With
    ``resample_only`` a single optimization (run 0) is re-sampled per run.
    """
    _check_vqe_size(spec)
    table = cost_table(spec)
    if settings.resample_only:
        base = _run_one((spec, settings, 0, table))
        return [base] + [_resample(spec, settings, base, r) for r in range(1, settings.runs)]
    jobs = [(spec, settings, r, table) for r in range(settings.runs)]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or settings.runs == 1:
        return [_run_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, settings.runs)) as pool:
        return list(pool.map(_run_one, jobs))


def aggregate(results: Sequence[RunResult] | Iterable[Distribution]) -> Distribution:
    """Per-bitstring mean over runs (absent = 0), renormalised."""
    dists = [r.distribution if isinstance(r, RunResult) else r for r in results]
    if not dists:
        raise ValidationError("cannot aggregate an empty result list")
    n = dists[0].n_qubits
    if any(d.n_qubits != n for d in dists):
        raise ValidationError("all runs must have the same qubit count")
    sums: dict[str, float] = {}
    # sort keys so the floating-point reduction does not depend on run order
    for key in sorted(set().union(*(d.probabilities for d in dists))):
        sums[key] = math.fsum(d.probabilities.get(key, 0.0) for d in dists) / len(dists)
    total = math.fsum(sums.values())
    return Distribution({k: v / total for k, v in sums.items()}, n)


def success_count(results: Sequence[RunResult], spec: ProblemSpec, minimizers: Iterable[str] | None = None) -> int:
    """Runs whose final-distribution argmax is an exact ground state."""
    targets = set(ground_state(spec).configurations if minimizers is None else minimizers)
    return sum(r.distribution.argmax(spec) in targets for r in results)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    successes: int
    runs: int


def alpha_sweep(spec: ProblemSpec, alphas: Sequence[float] = DEFAULT_ALPHAS,
                settings: VqeSettings = VqeSettings(), workers: int | None = None) -> list[SweepRow]:
    rows = []
    for alpha in alphas:
        if not 0.0 <= alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
        s = spec.with_alpha(alpha)
        results = run_many(s, settings, workers)
        rows.append(SweepRow(alpha, success_count(results, s), settings.runs))
        log.info("alpha=%g: %d/%d", alpha, rows[-1].successes, settings.runs)
    return rows


# -- CSV output ----------------------------------------------------------------

def write_distribution_csv(dist: Distribution, spec: ProblemSpec, path: str | Path) -> None:
    rows = [(b, float(_h_lookup(spec)(b)), p) for b, p in dist.probabilities.items()]
    rows.sort(key=lambda r: (round(r[1], 9), r[0]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bitstring", "hamiltonian", "probability"])
        for b, h, p in rows:
            w.writerow([b, f"{h:.6f}", f"{p:.6f}"])


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "successes", "runs"])
        for r in rows:
            w.writerow([f"{r.alpha:.6f}", r.successes, r.runs])
