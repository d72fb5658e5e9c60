"""Convergence and long-time studies built on the EWI solver.

Every driver takes a :class:`StudySpec` and returns plain records; writing
CSV is left to the caller (see :mod:`fracklein.csvio`).  Independent cells
can run in worker processes; results are always gathered in cell order.
"""

from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .ewi_solver import SolveConfig, StepFailure, solve, solve_oscillatory
from .fractional_ops import ModelParams, Regime
from .observables import ErrorRecord, convergence_order, energy_series, h_alpha_half_error, running_max
from .spectral_grid import GridError, SpectralField, SpectralGrid, forward_transform
from .state_transform import KgeState

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# selector -> (bounds, dims)
DATA_DOMAINS = {
    "eq-5.1.1": (((0.0, TWO_PI),), 1),
    "eq-5.2.1": (((0.0, 1.0), (0.0, TWO_PI)), 2),
    "sec-5.3-complex": (((0.0, 1.0),), 1),
}


def default_grid(selector: str, shape) -> SpectralGrid:
    bounds, dims = DATA_DOMAINS[selector]
    shape = (shape,) * dims if np.isscalar(shape) else tuple(shape)
    return SpectralGrid(bounds, shape)


def builtin_initial_data(selector: str, grid: SpectralGrid) -> KgeState:
    """Sample one of the built-in initial conditions on ``grid``.

    ``eq-5.1.1``        psi0 = 3/(2+cos^2 x),  psi1 = 3/(4+cos^2 x)        on (0, 2pi)
    ``eq-5.2.1``        psi0 = 2/(1+cos^2 s),  psi1 = 3/(2+2cos^2 s),
                        s = 2 pi x + y                                      on (0,1)x(0,2pi)
    ``sec-5.3-complex`` psi0 = x^2(x-1)^2+3,
                        psi1 = x(x-1)(2x-1) + 3i cos(2 pi x)               on (0, 1)
    """
    if selector not in DATA_DOMAINS:
        raise KeyError(f"unknown initial data {selector!r}; choose from {sorted(DATA_DOMAINS)}")
    bounds, dims = DATA_DOMAINS[selector]
    if grid.dims != dims or not np.allclose(grid.bounds, bounds, rtol=0, atol=1e-14):
        raise GridError(f"initial data {selector!r} lives on {bounds}, grid has {grid.bounds}")
    nodes = grid.nodes()
    if selector == "eq-5.1.1":
        (x,) = nodes
        c2 = np.cos(x) ** 2
        psi0, psi1 = 3.0 / (2.0 + c2), 3.0 / (4.0 + c2)
    elif selector == "eq-5.2.1":
        x, y = nodes
        c2 = np.cos(TWO_PI * x + y) ** 2
        psi0, psi1 = 2.0 / (1.0 + c2), 3.0 / (2.0 + 2.0 * c2)
    else:
        (x,) = nodes
        psi0 = x**2 * (x - 1) ** 2 + 3.0
        psi1 = x * (x - 1) * (2 * x - 1) + 3j * np.cos(TWO_PI * x)
    return KgeState(forward_transform(psi0, grid), forward_transform(psi1, grid), 0.0)


@dataclass(frozen=True)
class StudySpec:
    """Parameters of one study.

    ``steps`` holds time steps: ``tau`` for the unscaled studies and
    ``lambda`` for the oscillatory table.  ``tau_ref``/``N_ref`` default to
    ``min(steps)/10`` and (spatial studies) ``2*max(Ns)``; temporal studies
    compare against a reference on the same grid so that spatial errors cancel.
    """

    kind: str
    alphas: tuple[float, ...] = (2.0,)
    eps_list: tuple[float, ...] = (1.0,)
    steps: tuple[float, ...] = (1e-2,)
    Ns: tuple[int, ...] = (128,)
    beta: float = 1.0
    p: int = 1
    regime: Regime = Regime.COMPLEX_POWER
    data: str = "eq-5.1.1"
    t_final: float | None = None
    tau_ref: float | None = None
    N_ref: int | None = None
    n_samples: int = 64
    shape_2d: tuple[int, int] = (32, 64)
    dump_times: tuple[float, ...] = (0.0, 2.0, 8.0, 32.0, 128.0)
    custom_initial: KgeState | None = None
    workers: int = 1
    max_steps: int = 10**7
    cache_dir: str | None = None

    KINDS = ("temporal", "spatial", "long-time", "energy", "oscillatory-table", "field-dump-2d")

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        for name in ("alphas", "eps_list", "steps", "Ns", "dump_times"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self.validate()

    def validate(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"kind must be one of {self.KINDS}, got {self.kind!r}")
        for name in ("alphas", "eps_list", "steps", "Ns"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if any(s <= 0 for s in self.steps):
            raise ValueError("steps must be positive")
        if self.tau_ref is not None and self.tau_ref > min(self.steps) / 10 * (1 + 1e-12):
            raise ValueError(f"tau_ref={self.tau_ref} must be <= min(steps)/10={min(self.steps) / 10}")
        if self.kind == "spatial" and self.N_ref is not None and self.N_ref < 2 * max(self.Ns):
            raise ValueError(f"N_ref={self.N_ref} must be >= 2*max(Ns)={2 * max(self.Ns)}")
        if self.data == "custom" and self.custom_initial is None:
            raise ValueError("data='custom' needs custom_initial")
        for e in self.eps_list:
            ModelParams(alpha=self.alphas[0], beta=self.beta, eps=e, p=self.p)

    @property
    def reference_step(self) -> float:
        return self.tau_ref if self.tau_ref is not None else min(self.steps) / 10

    def params(self, alpha: float, eps: float, regime: Regime | None = None) -> ModelParams:
        return ModelParams(alpha=alpha, beta=self.beta, eps=eps, p=self.p,
                           regime=regime or self.regime)

    def grid(self, N) -> SpectralGrid:
        if self.data == "custom":
            g0 = self.custom_initial.grid
            shape = (N,) * g0.dims if np.isscalar(N) else tuple(N)
            return SpectralGrid(g0.bounds, shape)
        return default_grid(self.data, N)

    def initial(self, grid: SpectralGrid) -> KgeState:
        if self.data == "custom":
            from .spectral_grid import resample
            st = self.custom_initial
            return KgeState(resample(st.psi, grid), resample(st.eta, grid), 0.0)
        return builtin_initial_data(self.data, grid)

    def horizon(self, eps: float) -> float:
        if self.t_final is not None:
            return self.t_final
        if eps == 0:
            raise ValueError("eps = 0 has no natural horizon; set t_final")
        return 1.0 / eps ** (2 * self.p)


# ---------------------------------------------------------------------------
# process-parallel map and reference cache


def _pmap(fn, tasks, workers: int):
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _checksum(arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()[:16]


class ReferenceCache:
    """Reference snapshots keyed by a content hash of their settings.

    Entries live in memory and, when ``directory`` is set, as ``.npz`` files.
    """

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else None
        self._mem: dict[str, tuple[list[float], list[np.ndarray]]] = {}
        self.checksums: dict[str, str] = {}

    @staticmethod
    def key(**settings) -> str:
        text = repr(sorted((k, repr(v)) for k, v in settings.items()))
        return hashlib.sha256(text.encode()).hexdigest()[:20]

    def get(self, key: str):
        if key in self._mem:
            return self._mem[key]
        if self.directory is not None:
            path = self.directory / f"ref_{key}.npz"
            if path.exists():
                with np.load(path) as z:
                    entry = (list(z["times"]), list(z["psi"]))
                self._mem[key] = entry
                self.checksums[key] = _checksum(entry[1])
                return entry
        return None

    def put(self, key: str, times, psis):
        entry = (list(times), [np.asarray(p) for p in psis])
        self._mem[key] = entry
        self.checksums[key] = _checksum(entry[1])
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            np.savez(self.directory / f"ref_{key}.npz", times=np.asarray(times),
                     psi=np.stack(entry[1]))
        return entry


_DEFAULT_CACHE = ReferenceCache()


def _cache_for(spec: StudySpec) -> ReferenceCache:
    if spec.cache_dir:
        return ReferenceCache(spec.cache_dir)
    return _DEFAULT_CACHE


# ---------------------------------------------------------------------------
# single runs (top level so that worker processes can pickle them)


@dataclass
class RunResult:
    times: list[float]
    psi: list[np.ndarray]
    energies: list[float] = field(default_factory=list)
    iters_max: int = 0
    failed: str | None = None


def _run(task) -> RunResult:
    spec, alpha, eps, step, N, times, oscillatory = task
    grid = spec.grid(N)
    init = spec.initial(grid)
    horizon = 1.0 if oscillatory and spec.t_final is None else spec.horizon(eps)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            if oscillatory:
                params = spec.params(alpha, eps, Regime.OSCILLATORY)
                s = params.strength
                init = KgeState(init.psi, init.eta * (1.0 / s), 0.0)
                cfg = SolveConfig(params, grid, step, horizon, snapshot_times=times,
                                  record_energy=False, max_steps=spec.max_steps)
                traj = solve_oscillatory(cfg, init)
            else:
                params = spec.params(alpha, eps)
                cfg = SolveConfig(params, grid, step, horizon, snapshot_times=times,
                                  record_energy=True, max_steps=spec.max_steps)
                traj = solve(cfg, init)
    except StepFailure as exc:
        return RunResult([], [], failed=str(exc))
    psi = [st.psi.coeffs for st in traj.states]
    if not all(np.all(np.isfinite(c)) for c in psi):
        return RunResult(traj.times, psi, traj.energies, traj.iters_max, failed="non-finite solution")
    return RunResult(traj.times, psi, traj.energies, traj.iters_max)


def _exact_linear(spec: StudySpec, alpha, N, times) -> RunResult:
    grid = spec.grid(N)
    init = spec.initial(grid)
    u0, u1 = init.psi.values(), init.eta.values()
    psis = []
    for t in times:
        u, _ = oracle.linear_flow(u0, u1, grid.bounds, alpha, spec.beta, t)
        psis.append(forward_transform(u, grid, real_valued=init.psi.real_valued).coeffs)
    return RunResult(list(times), psis)


def _initial_tag(spec: StudySpec) -> str:
    if spec.data != "custom":
        return spec.data
    st = spec.custom_initial
    return _checksum([st.psi.coeffs, st.eta.coeffs, np.asarray(st.grid.bounds)])


def _reference(spec: StudySpec, alpha, eps, N, times, oscillatory=False) -> tuple[RunResult, str]:
    cache = _cache_for(spec)
    key = ReferenceCache.key(alpha=alpha, beta=spec.beta, eps=eps, p=spec.p,
                             regime=spec.regime.value, data=spec.data, N=N,
                             step=spec.reference_step, times=tuple(times),
                             osc=oscillatory, t_final=spec.t_final, init=_initial_tag(spec))
    hit = cache.get(key)
    if hit is None:
        if eps == 0 and not oscillatory:
            res = _exact_linear(spec, alpha, N, times)
        else:
            res = _run((spec, alpha, eps, spec.reference_step, N, tuple(times), oscillatory))
            if res.failed:
                raise StepFailure(f"reference run failed: {res.failed}")
        hit = cache.put(key, res.times, res.psi)
    return RunResult(*hit), cache.checksums[key]


def _sample_times(horizon: float, n_samples: int, coarsest: float) -> tuple[float, ...]:
    stride = max(1, int(round(horizon / coarsest / n_samples)))
    dt = stride * coarsest
    k = int(math.floor(horizon / dt + 1e-9))
    times = [j * dt for j in range(1, k + 1)]
    if not times or abs(times[-1] - horizon) > 1e-9 * horizon:
        times.append(horizon)
    return tuple(times)


def _errors(run: RunResult, ref: RunResult, grid_num: SpectralGrid, grid_ref: SpectralGrid,
            alpha: float) -> tuple[list[float], list[float]]:
    """Errors at the snapshot times shared by ``run`` and ``ref`` (matched by time)."""
    ts, es = [], []
    for t, a in zip(run.times, run.psi):
        for tr, b in zip(ref.times, ref.psi):
            if abs(tr - t) <= 1e-9 * max(1.0, abs(t)):
                ts.append(t)
                es.append(h_alpha_half_error(SpectralField(grid_num, a),
                                             SpectralField(grid_ref, b), alpha))
                break
    return ts, es


# ---------------------------------------------------------------------------
# studies


@dataclass
class OscillatoryTable:
    alpha: float
    eps: list[float]
    steps: list[float]
    e1: np.ndarray
    order: np.ndarray
    records: list[ErrorRecord]
    reference_checksums: dict[float, str]

    def layout_rows(self) -> list[list[str]]:
        """Rows in the printed table layout: one error row and one order row per eps."""
        head = ["e1(r=1)"] + [f"{s:.6g}" for s in self.steps]
        rows = [head]
        for i, e in enumerate(self.eps):
            rows.append([f"eps={e:.6g}"] + [f"{v:.2e}" for v in self.e1[i]])
            rows.append(["order", "-"] + [f"{v:.2f}" for v in self.order[i, 1:]])
        return rows


def oscillatory_table_spec(alpha: float, eps0: float = 1.0, lam0: float = 0.05, rows: int = 5,
                           cols: int = 5, N: int = 128, **kw) -> StudySpec:
    return StudySpec(kind="oscillatory-table", alphas=(alpha,),
                     eps_list=tuple(eps0 / 2**k for k in range(rows)),
                     steps=tuple(lam0 / 4**j for j in range(cols)), Ns=(N,), p=1,
                     regime=Regime.OSCILLATORY, data=kw.pop("data", "sec-5.3-complex"),
                     t_final=kw.pop("t_final", 1.0), **kw)


def run_oscillatory_table(spec: StudySpec) -> list[OscillatoryTable]:
    """Errors ``e1(r = t_final)`` for every (eps, lambda) cell, one table per alpha.

    Cells whose solve fails are reported as NaN.
    """
    if spec.kind != "oscillatory-table":
        raise ValueError("spec.kind must be 'oscillatory-table'")
    N = spec.Ns[0]
    grid = spec.grid(N)
    T = spec.t_final if spec.t_final is not None else 1.0
    tables = []
    for alpha in spec.alphas:
        refs, sums = {}, {}
        for eps in spec.eps_list:
            refs[eps], sums[eps] = _reference(spec, alpha, eps, N, (T,), oscillatory=True)
        tasks = [(spec, alpha, eps, lam, N, (T,), True) for eps in spec.eps_list for lam in spec.steps]
        runs = _pmap(_run, tasks, spec.workers)
        ne, nl = len(spec.eps_list), len(spec.steps)
        e1 = np.full((ne, nl), np.nan)
        order = np.full((ne, nl), np.nan)
        records = []
        for idx, run in enumerate(runs):
            i, j = divmod(idx, nl)
            eps, lam = spec.eps_list[i], spec.steps[j]
            if run.failed is None:
                e1[i, j] = _errors(run, refs[eps], grid, grid, alpha)[1][-1]
            else:
                log.info("cell eps=%g lambda=%g failed: %s", eps, lam, run.failed)
            if j > 0:
                order[i, j] = convergence_order(e1[i, j - 1], e1[i, j], spec.steps[j - 1] / lam)
            records.append(ErrorRecord(eps=eps, tau=lam, alpha=alpha, p=spec.p, e1=e1[i, j],
                                       e1_max=e1[i, j], order=None if j == 0 else order[i, j],
                                       beta=spec.beta, N=N, t_final=T, iters_max=run.iters_max))
        tables.append(OscillatoryTable(alpha, list(spec.eps_list), list(spec.steps), e1, order,
                                       records, sums))
    return tables


@dataclass
class LongTimeCurve:
    alpha: float
    eps: float
    tau: float
    times: np.ndarray
    e1: np.ndarray
    e1_max: np.ndarray
    reference_checksum: str = ""


def run_long_time_study(spec: StudySpec) -> list[LongTimeCurve]:
    """Running-max error curves up to ``1/eps^(2p)`` (or ``t_final``) for each (alpha, eps, tau).

    Errors are sampled at about ``n_samples`` common times; for ``eps = 0``
    the reference is the exact linear flow.
    """
    curves = []
    for alpha in spec.alphas:
        for eps in spec.eps_list:
            H = spec.horizon(eps)
            coarsest = max(spec.steps)
            times = _sample_times(H, spec.n_samples, coarsest)
            ref, chk = _reference(spec, alpha, eps, spec.Ns[0], times)
            tasks = [(spec, alpha, eps, tau, spec.Ns[0], times, False) for tau in spec.steps]
            grid = spec.grid(spec.Ns[0])
            for tau, run in zip(spec.steps, _pmap(_run, tasks, spec.workers)):
                if run.failed:
                    raise StepFailure(f"alpha={alpha} eps={eps} tau={tau}: {run.failed}")
                t, e = map(np.asarray, _errors(run, ref, grid, grid, alpha))
                emax = np.asarray([m for _, m in running_max(zip(t, e))])
                curves.append(LongTimeCurve(alpha, eps, tau, t, e, emax, chk))
    return curves


def long_time_ratios(curves: list[LongTimeCurve]) -> dict[tuple[float, float], list[float]]:
    """``e1_max(eps_k)/e1_max(eps_{k+1})`` at each curve's horizon, per (alpha, tau)."""
    out: dict[tuple[float, float], list[float]] = {}
    groups: dict[tuple[float, float], list[LongTimeCurve]] = {}
    for c in curves:
        groups.setdefault((c.alpha, c.tau), []).append(c)
    for key, cs in groups.items():
        cs = sorted(cs, key=lambda c: -c.eps)
        out[key] = [a.e1_max[-1] / b.e1_max[-1] for a, b in zip(cs, cs[1:])]
    return out


def long_time_records(curves: list[LongTimeCurve], spec: StudySpec) -> list[ErrorRecord]:
    return [ErrorRecord(eps=c.eps, tau=c.tau, alpha=c.alpha, p=spec.p, e1=float(c.e1[-1]),
                        e1_max=float(c.e1_max[-1]), beta=spec.beta, N=spec.Ns[0],
                        t_final=float(c.times[-1])) for c in curves]


def run_temporal_study(spec: StudySpec) -> list[ErrorRecord]:
    """Error at ``t_final`` (default ``1/eps^(2p)``) against a fine-step reference
    on the same grid, with orders between adjacent step sizes."""
    records = []
    N = spec.Ns[0]
    grid = spec.grid(N)
    for alpha in spec.alphas:
        for eps in spec.eps_list:
            H = spec.horizon(eps)
            coarsest = max(spec.steps)
            times = _sample_times(H, spec.n_samples, coarsest)
            if any(abs(t / s - round(t / s)) > 1e-6 for t in times for s in spec.steps):
                times = (H,)
            ref, _ = _reference(spec, alpha, eps, N, times)
            tasks = [(spec, alpha, eps, tau, N, times, False) for tau in spec.steps]
            prev = None
            for tau, run in zip(spec.steps, _pmap(_run, tasks, spec.workers)):
                if run.failed:
                    e, emax, it = math.nan, math.nan, None
                else:
                    _, es = _errors(run, ref, grid, grid, alpha)
                    e, emax, it = es[-1], max(es), run.iters_max
                order = None if prev is None else convergence_order(prev[1], e, prev[0] / tau)
                dev = None
                if run.energies:
                    dev = max(r.relative_deviation for r in energy_series(run.times, run.energies))
                records.append(ErrorRecord(eps=eps, tau=tau, alpha=alpha, p=spec.p, e1=e,
                                           e1_max=emax, order=order, beta=spec.beta, N=N,
                                           t_final=H, energy_dev=dev, iters_max=it))
                prev = (tau, e)
    return records


def run_spatial_study(spec: StudySpec) -> list[ErrorRecord]:
    """Error at ``t_final`` versus N, against a reference on ``N_ref`` nodes with
    the same time step (so temporal errors largely cancel)."""
    tau = min(spec.steps)
    N_ref = spec.N_ref or 2 * max(spec.Ns)
    if N_ref < 2 * max(spec.Ns):
        raise ValueError("N_ref must be at least twice the largest N")
    records = []
    for alpha in spec.alphas:
        for eps in spec.eps_list:
            H = spec.horizon(eps)
            ref = _run((spec, alpha, eps, tau, N_ref, (), False))
            if ref.failed:
                raise StepFailure(f"reference run failed: {ref.failed}")
            gref = spec.grid(N_ref)
            tasks = [(spec, alpha, eps, tau, N, (), False) for N in spec.Ns]
            prev = None
            for N, run in zip(spec.Ns, _pmap(_run, tasks, spec.workers)):
                e = math.nan if run.failed else h_alpha_half_error(
                    SpectralField(spec.grid(N), run.psi[-1]), SpectralField(gref, ref.psi[-1]), alpha)
                order = None if prev is None else convergence_order(prev[1], e, N / prev[0])
                records.append(ErrorRecord(eps=eps, tau=tau, alpha=alpha, p=spec.p, e1=e, e1_max=e,
                                           order=order, beta=spec.beta, N=N, t_final=H,
                                           iters_max=run.iters_max))
                prev = (N, e)
    return records


@dataclass
class EnergyStudy:
    alpha: float
    eps: float
    tau: float
    series: list

    @property
    def max_deviation(self) -> float:
        return max(r.relative_deviation for r in self.series)


def run_energy_study(spec: StudySpec) -> list[EnergyStudy]:
    """Energy sampled at about ``n_samples`` times up to the horizon."""
    out = []
    for alpha in spec.alphas:
        for eps in spec.eps_list:
            H = spec.horizon(eps)
            tasks = []
            for tau in spec.steps:
                times = _sample_times(H, spec.n_samples, tau)
                tasks.append((spec, alpha, eps, tau, spec.Ns[0], times, False))
            for tau, run in zip(spec.steps, _pmap(_run, tasks, spec.workers)):
                if run.failed:
                    raise StepFailure(f"alpha={alpha} eps={eps} tau={tau}: {run.failed}")
                out.append(EnergyStudy(alpha, eps, tau, energy_series(run.times, run.energies)))
    return out


def energy_records(studies: list[EnergyStudy], spec: StudySpec) -> list[ErrorRecord]:
    recs = []
    prev = {}
    for s in studies:
        key = (s.alpha, s.eps)
        order = None
        if key in prev:
            order = convergence_order(prev[key][1], s.max_deviation, prev[key][0] / s.tau)
        prev[key] = (s.tau, s.max_deviation)
        recs.append(ErrorRecord(eps=s.eps, tau=s.tau, alpha=s.alpha, p=spec.p, e1=None, e1_max=None,
                                order=order, beta=spec.beta, N=spec.Ns[0],
                                t_final=s.series[-1].time, energy_dev=s.max_deviation))
    return recs


@dataclass
class FieldDump:
    alpha: float
    times: list[float]
    values: list[np.ndarray]
    x: np.ndarray
    y: np.ndarray
    max_imag: float
    energy_dev: float


def run_field_dump_2d(spec: StudySpec, output: str | Path | None = None) -> list[FieldDump]:
    """Grid values at ``dump_times`` for each alpha (2D data on (0,1)x(0,2pi) by default).

    When ``output`` is given each dump is written to ``dump2d_alpha<alpha>.npz``.
    """
    tau = spec.steps[0]
    eps = spec.eps_list[0]
    times = tuple(sorted(t for t in spec.dump_times if t > 0))
    T = spec.t_final if spec.t_final is not None else max(times)
    times = tuple(t for t in times if t <= T)
    grid = spec.grid(spec.shape_2d)
    if grid.dims != 2:
        raise GridError("field dumps need 2D initial data")
    x, y = grid.axis_nodes(0), grid.axis_nodes(1)
    out = []
    for alpha in spec.alphas:
        params = spec.params(alpha, eps)
        cfg = SolveConfig(params, grid, tau, T, snapshot_times=times, max_steps=spec.max_steps)
        traj = solve(cfg, spec.initial(grid))
        vals, imag = [], 0.0
        for st in traj.states:
            v = np.fft.ifftn(st.psi.coeffs) * grid.size
            imag = max(imag, float(np.max(np.abs(v.imag))))
            vals.append(v.real.copy())
        dev = max(r.relative_deviation for r in energy_series(traj.times, traj.energies))
        dump = FieldDump(alpha, list(traj.times), vals, x, y, imag, dev)
        out.append(dump)
        if output is not None:
            path = Path(output)
            path.mkdir(parents=True, exist_ok=True)
            np.savez(path / f"dump2d_alpha{alpha:g}.npz", x=x, y=y, times=np.asarray(dump.times),
                     psi=np.stack(vals))
    return out
