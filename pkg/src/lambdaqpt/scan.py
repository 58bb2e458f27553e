"""Parameter-plane scans: fidelity susceptibility, entropies, SAS-vs-exact fidelity and simplex data.

Every scan point is computed independently (optionally in a process pool),
rows are sorted into grid order and written with fixed ``%.12g`` formatting,
so identical inputs give byte-identical CSV files.  Wall times go to a
``.timings.csv`` sidecar to keep the main file reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import exact, meanfield, qinfo, sas
from . import svg as svgmod
from .hilbert import FockCutoffs, build_space
from .operators import ModelParams

METHODS = ("exact", "sas", "meanfield")
SECTOR_POLICIES = ("ee", "eo", "oe", "oo", "auto")
DIRECTIONS = (("x13", (1.0, 0.0)), ("x23", (0.0, 1.0)), ("diag", (1.0, 1.0)))
CHI_FLOOR = 1e-12
ENTROPY_X13 = (0.1, 1.0, 1.5, 2.5, 3.5)

COLUMNS = (
    "x13", "x23", "mu13", "mu23", "method", "sector", "region", "energy",
    "f_min", "direction", "chi", "ln_chi", "d_b",
    "sl_matter", "svn_matter", "sl_one_atom", "p1", "p2", "p3",
    "f_sas_exact", "nmax1", "nmax2", "delta_e", "edge", "error",
)


# ---------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and math.isfinite(self.step)):
            raise ValueError("axis bounds must be finite")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.hi < self.lo:
            raise ValueError(f"hi {self.hi} below lo {self.lo}")
        if self.lo < 0:
            raise ValueError("dimensionless couplings are non-negative")

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``lo:hi:step``, or a single value for a one-point axis."""
        parts = [float(p) for p in str(text).split(":")]
        if len(parts) == 1:
            return cls(parts[0], parts[0], 1.0)
        if len(parts) != 3:
            raise ValueError(f"expected lo:hi:step, got {text!r}")
        return cls(*parts)

    @property
    def values(self) -> np.ndarray:
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return np.round(self.lo + self.step * np.arange(n), 12)


@dataclass(frozen=True)
class ScanGrid:
    x13: Axis = Axis(0.0, 3.0, 0.05)
    x23: Axis = Axis(0.0, 3.0, 0.05)
    n_atoms: int = 2
    method: str = "sas"
    sector: str = "ee"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.sector not in SECTOR_POLICIES:
            raise ValueError(f"sector must be one of {SECTOR_POLICIES}")
        if self.n_atoms < 1:
            raise ValueError("need at least one atom")

    def points(self) -> list[tuple[float, float]]:
        """Grid order: x13 outer, x23 inner."""
        return [(float(a), float(b)) for a in self.x13.values for b in self.x23.values]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.x13.values), len(self.x23.values)


@dataclass(frozen=True)
class ScanOptions:
    dx: float = 1e-3
    tol: float = 1e-8
    susceptibility: bool = True
    compare: bool = False

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


# ---------------------------------------------------------------------------
# single-point solvers


@dataclass
class PointState:
    """Matter density matrix and bookkeeping for one method at one coupling."""

    energy: float
    rho: np.ndarray
    sector: str
    cutoffs: FockCutoffs | None = None
    delta_e: float = math.nan
    edge: float = math.nan
    minima: list = field(default_factory=list, repr=False)
    one_atom: np.ndarray | None = None


def _coupled(params: ModelParams, x) -> ModelParams:
    return params.with_dimensionless(float(x[0]), float(x[1]))


def solve_point(method: str, params: ModelParams, sector: str = "ee", tol: float = 1e-8,
                reference: PointState | None = None) -> PointState:
    """Ground state of ``params`` by one method.

    ``reference`` (a state at a nearby coupling) fixes the photon cutoffs of
    exact solves and seeds the SAS minimiser with its local minima.
    """
    n = params.n_atoms
    if method == "meanfield":
        sol = meanfield.ground_solution(params)
        psi = sas.expand_matter_coherent(sol.trial.gamma, n)
        return PointState(sol.energy_per_atom, np.outer(psi, psi), "coherent",
                          one_atom=meanfield.coherent_one_atom_rdm(sol.trial))
    if method == "exact":
        if reference is None:
            conv = exact.converge_cutoffs(params, sector, tol=tol, edge_tol=tol)
            g, de, edge = conv.solution, conv.delta_energy, conv.edge
        else:
            space = build_space(n, reference.cutoffs, params.config)
            g = exact.ground_state(space, params, sector)
            de, edge = math.nan, exact.edge_occupation(space, g.state)
        return PointState(g.energy_per_atom, exact.matter_rdm(g.space, g.state), g.sector or "full",
                          g.cutoffs, de, edge)
    if method == "sas":
        ev = sas.SasEvaluator(params)
        if reference is None:
            starts, kw = None, {}
        else:
            starts, kw = [sas.trial_to_vector(t) for t, _ in reference.minima], {"n_random": 0, "step": 0.01}
        if sector == "auto":
            if reference is not None:
                sector = reference.sector
                m = sas.minimize_sas(params, sector, evaluator=ev, starts=starts, **kw)
            else:
                m = sas.best_sector(params, evaluator=ev)
        else:
            m = sas.minimize_sas(params, sector, evaluator=ev, starts=starts, **kw)
        return PointState(m.energy_per_atom, m.rdm, m.sector, ev.cutoffs, minima=m.local_minima)
    raise ValueError(f"unknown method {method!r}")


def one_atom_of(state: PointState, n_atoms: int) -> np.ndarray:
    if state.one_atom is not None:
        return state.one_atom
    return qinfo.one_atom_from_matter(state.rho, n_atoms)


def min_fidelity_point(method: str, params: ModelParams, x, dx: float = 1e-3, sector: str = "ee",
                       tol: float = 1e-8, base: PointState | None = None):
    """Smallest fidelity between rho_M(x) and its three displaced neighbours.

    Returns ``(F_min, chi, direction)`` with chi = 2 (1 - F_min) / |delta|^2 and
    |delta| the Euclidean length of the winning displacement.
    """
    if not dx > 0:
        raise ValueError("dx must be positive")
    x = (float(x[0]), float(x[1]))
    if base is None:
        base = solve_point(method, _coupled(params, x), sector, tol)
    best = None
    for name, (a, b) in DIRECTIONS:
        p2 = _coupled(params, (x[0] + a * dx, x[1] + b * dx))
        other = solve_point(method, p2, sector, tol, reference=base)
        f = qinfo.fidelity(base.rho, other.rho)
        norm = dx * math.hypot(a, b)
        if best is None or f < best[0]:
            best = (f, qinfo.susceptibility_from_fidelity(f, norm), name)
    return best


# ---------------------------------------------------------------------------
# rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            v = 0.0
        return "%.12g" % v
    return str(v)


def _clean(text: str) -> str:
    return " ".join(str(text).split())[:300]


def evaluate_point(params: ModelParams, x, method: str, sector: str = "ee",
                   options: ScanOptions = ScanOptions()) -> dict:
    """All per-point quantities as a row dictionary; failures land in ``error``."""
    p = _coupled(params, x)
    row = {c: None for c in COLUMNS}
    row.update(x13=float(x[0]), x23=float(x[1]), mu13=p.mu_a, mu23=p.mu_b, method=method)
    row["region"] = meanfield.ground_solution(p).region
    try:
        st = solve_point(method, p, sector, options.tol)
        row.update(sector=st.sector, energy=st.energy)
        if st.cutoffs is not None:
            row.update(nmax1=st.cutoffs.nmax1, nmax2=st.cutoffs.nmax2)
        if method == "exact":
            row.update(delta_e=st.delta_e, edge=st.edge)
        one = one_atom_of(st, p.n_atoms)
        probs = np.clip(np.real(np.diag(one)), 0.0, None)
        probs = probs / probs.sum()
        row.update(
            sl_matter=qinfo.linear_entropy(st.rho),
            svn_matter=qinfo.vn_entropy(st.rho),
            sl_one_atom=qinfo.linear_entropy(one),
            p1=probs[0], p2=probs[1], p3=probs[2],
        )
        if options.susceptibility:
            f, chi, direction = min_fidelity_point(method, params, x, options.dx, sector, options.tol, base=st)
            row.update(f_min=f, direction=direction, chi=chi, ln_chi=math.log(max(chi, CHI_FLOOR)),
                       d_b=qinfo.bures_from_fidelity(f))
        if options.compare and method in ("sas", "exact"):
            other = solve_point("exact" if method == "sas" else "sas", p, st.sector, options.tol)
            row["f_sas_exact"] = qinfo.fidelity(st.rho, other.rho)
        row["error"] = ""
    except Exception as exc:  # noqa: BLE001 - recorded per point, scan continues
        row["error"] = _clean(f"{type(exc).__name__}: {exc}")
    return row


def format_row(row: dict) -> list[str]:
    return [_fmt(row.get(c)) for c in COLUMNS]


def _task(args):
    params, x, method, sector, options = args
    t0 = time.perf_counter()
    row = evaluate_point(params, x, method, sector, options)
    return x, format_row(row), time.perf_counter() - t0


def _csv_line(cells) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(cells)
    return buf.getvalue()


def fingerprint(params: ModelParams, grid: ScanGrid, options: ScanOptions) -> str:
    blob = json.dumps({"params": asdict(params), "grid": asdict(grid), "options": asdict(options)}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def compute_rows(params: ModelParams, grid: ScanGrid, options: ScanOptions = ScanOptions(),
                 threads: int = 1, partial: Path | None = None) -> list[list[str]]:
    """Formatted rows in grid order, resuming from and appending to ``partial``."""
    points = grid.points()
    done: dict[tuple[float, float], list[str]] = {}
    fp = fingerprint(params, grid, options)
    if partial is not None and partial.exists():
        with partial.open(encoding="utf-8", newline="") as fh:
            lines = fh.read().split("\n")
        if lines and lines[0] == f"# {fp}":
            for rec in csv.reader(lines[1:]):
                if len(rec) == len(COLUMNS) + 1:
                    done[(float(rec[1]), float(rec[2]))] = rec[1:]
        else:
            partial.unlink()
    key = {(float(_fmt(a)), float(_fmt(b))): (a, b) for a, b in points}
    done = {key[k]: v for k, v in done.items() if k in key}
    todo = [x for x in points if x not in done]
    timings: dict[tuple[float, float], float] = {}
    sink = None
    if partial is not None:
        fresh = not partial.exists()
        sink = partial.open("a", encoding="utf-8", newline="")
        if fresh:
            sink.write(f"# {fp}\n")
    try:
        jobs = ((params, x, grid.method, grid.sector, options) for x in todo)
        if threads > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                results = pool.map(_task, jobs, chunksize=max(1, len(todo) // (8 * threads)))
                for x, cells, dt in results:
                    done[x], timings[x] = cells, dt
                    if sink:
                        sink.write(_csv_line(["r", *cells]))
                        sink.flush()
        else:
            for job in jobs:
                x, cells, dt = _task(job)
                done[x], timings[x] = cells, dt
                if sink:
                    sink.write(_csv_line(["r", *cells]))
                    sink.flush()
    finally:
        if sink:
            sink.close()
    compute_rows.last_timings = [(x, timings.get(x, math.nan)) for x in points]
    return [done[x] for x in points]


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _write_timings(path: Path, timings) -> None:
    write_csv(path, ("x13", "x23", "wall_time_s"), [(_fmt(a), _fmt(b), "%.4f" % t) for (a, b), t in timings])


def rows_to_arrays(rows, grid: ScanGrid, column: str) -> np.ndarray:
    """Reshape one numeric column of grid-ordered rows to (n13, n23)."""
    idx = COLUMNS.index(column)
    vals = np.array([float(r[idx]) if r[idx] not in ("", None) else math.nan for r in rows])
    return vals.reshape(grid.shape)


# ---------------------------------------------------------------------------
# ridge extraction and distances

_AXES = ((1, 0), (0, 1), (1, 1), (1, -1))


def ridge_mask(values: np.ndarray) -> np.ndarray:
    """True where a point beats both neighbours along at least one of the four grid axes."""
    v = np.asarray(values, dtype=float)
    n, m = v.shape
    mask = np.zeros_like(v, dtype=bool)
    for di, dj in _AXES:
        for i in range(n):
            for j in range(m):
                a, b = (i - di, j - dj), (i + di, j + dj)
                if not (0 <= a[0] < n and 0 <= b[0] < n and 0 <= a[1] < m and 0 <= b[1] < m):
                    continue
                c = v[i, j]
                if math.isfinite(c) and c > v[a] and c > v[b]:
                    mask[i, j] = True
    return mask


def main_ridge(mask: np.ndarray) -> np.ndarray:
    """Largest 8-connected component of a ridge mask."""
    from scipy import ndimage

    lab, n = ndimage.label(mask, structure=np.ones((3, 3)))
    if n == 0:
        return np.zeros_like(mask)
    sizes = ndimage.sum(mask, lab, index=np.arange(1, n + 1))
    return lab == (1 + int(np.argmax(sizes)))


def separates(ridge: np.ndarray, cells) -> bool:
    """Whether the given grid cells fall in distinct 4-connected components of the complement."""
    from scipy import ndimage

    lab, _ = ndimage.label(~ridge)
    ids = [lab[c] for c in cells]
    return all(i > 0 for i in ids) and len(set(ids)) == len(ids)


def line_peaks(xs: np.ndarray, ys: np.ndarray) -> list[float]:
    """Interior local maxima of a sampled curve, refined by a parabola through three points."""
    out = []
    for i in range(1, len(ys) - 1):
        a, b, c = ys[i - 1], ys[i], ys[i + 1]
        if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(c)):
            continue
        if b > a and b > c:
            h = xs[i + 1] - xs[i]
            den = a - 2 * b + c
            off = 0.5 * (a - c) / den if den != 0 else 0.0
            out.append(float(xs[i] + off * h))
    return out


def hausdorff_1d(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def matched_distance(peaks, crossings) -> float:
    """Largest distance from a separatrix crossing to its nearest ridge peak on the same line.

    Peaks without a nearby crossing are extra finite-size transitions and are
    not penalised; a crossing with no peak at all gives ``inf``.
    """
    p, c = np.asarray(peaks, float), np.asarray(crossings, float)
    if c.size == 0:
        return 0.0
    if p.size == 0:
        return math.inf
    return float(np.abs(c[:, None] - p[None, :]).min(axis=1).max())


def sweep_line_distances(params: ModelParams, grid: ScanGrid, ln_chi: np.ndarray, ridge: np.ndarray,
                         threshold: float = 1.5, metric: str = "matched") -> dict[tuple[str, float], float]:
    """Per-line distance between ridge peaks and mean-field separatrix crossings.

    Lines are grid rows and columns, keyed by (swept axis, fixed value).  Along
    each line the peaks of ln chi that belong to ``ridge`` are compared with the
    mean-field crossings, keeping only positions where max(x13, x23) >
    ``threshold``.  ``metric`` is ``"matched"`` (see :func:`matched_distance`)
    or ``"hausdorff"`` (symmetric, so extra peaks count too).
    """
    if metric not in ("matched", "hausdorff"):
        raise ValueError(f"unknown metric {metric!r}")
    dist = matched_distance if metric == "matched" else hausdorff_1d
    x13, x23 = grid.x13.values, grid.x23.values
    out = {}
    for axis, fixed_vals, moving in (("x23", x13, x23), ("x13", x23, x13)):
        for k, c in enumerate(fixed_vals):
            if axis == "x23":
                prof, on = ln_chi[k, :], ridge[k, :]
            else:
                prof, on = ln_chi[:, k], ridge[:, k]
            peaks = [t for t in line_peaks(moving, prof)
                     if on[int(np.argmin(np.abs(moving - t)))]]
            mf = meanfield.separatrix_crossings(params, "x_b" if axis == "x23" else "x_a", float(c),
                                                float(moving[0]), float(moving[-1]))
            keep = lambda t: max(c, t) > threshold  # noqa: E731
            peaks = [t for t in peaks if keep(t)]
            mf = [t for t in mf if keep(t)]
            if not mf and (metric == "matched" or not peaks):
                continue
            out[(axis, round(float(c), 10))] = dist(peaks, mf)
    return out


def ridge_rows(grid: ScanGrid, ln_chi: np.ndarray, mask: np.ndarray) -> list[list[str]]:
    rows = []
    for i, a in enumerate(grid.x13.values):
        for j, b in enumerate(grid.x23.values):
            if mask[i, j]:
                rows.append([_fmt(float(a)), _fmt(float(b)), _fmt(float(ln_chi[i, j]))])
    return rows


# ---------------------------------------------------------------------------
# operations


@dataclass
class ScanResult:
    csv: Path
    rows: list
    grid: ScanGrid
    ridge_csv: Path | None = None
    svg: Path | None = None
    extra: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return rows_to_arrays(self.rows, self.grid, name)


def _prepare(out, name: str) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def run_scan(params: ModelParams, grid: ScanGrid, out=".", options: ScanOptions | None = None,
             svg: bool = False, threads: int = 1, name: str = "scan") -> ScanResult:
    """Fidelity-susceptibility scan over the (x13, x23) plane.

    Writes ``<name>.csv``, ``<name>_ridge.csv``, a timings sidecar and with
    ``svg`` a heatmap of ln chi with the mean-field separatrices overlaid.
    """
    if params.n_atoms != grid.n_atoms:
        params = params.with_(n_atoms=grid.n_atoms)
    options = options or ScanOptions(compare=False)
    target = _prepare(out, f"{name}.csv")
    partial = target.with_suffix(".csv.partial")
    rows = compute_rows(params, grid, options, threads, partial)
    write_csv(target, COLUMNS, rows)
    _write_timings(target.with_suffix(".timings.csv"), compute_rows.last_timings)
    if partial.exists():
        partial.unlink()
    result = ScanResult(target, rows, grid)
    if options.susceptibility and min(grid.shape) >= 3:
        ln_chi = result.column("ln_chi")
        mask = ridge_mask(ln_chi)
        result.ridge_csv = write_csv(target.with_name(f"{name}_ridge.csv"), ("x13", "x23", "ln_chi"),
                                     ridge_rows(grid, ln_chi, mask))
        if svg:
            curves = [meanfield.separatrix(params, b, n=200, x_max=grid.x13.hi)
                      for b in meanfield.BOUNDARIES[params.config]]
            result.svg = svgmod.heatmap(target.with_suffix(".svg"), grid.x13.values, grid.x23.values, ln_chi,
                                        title=f"ln chi, N_a={params.n_atoms}, {grid.method}", overlay=curves)
    elif svg and options.compare:
        result.svg = _compare_svg(result, target.with_suffix(".svg"))
    return result


def sweep_entropy(params: ModelParams, x13_values=ENTROPY_X13, x23: Axis = Axis(0.0, 3.0, 0.05),
                  methods=("sas", "exact"), sector: str = "ee", out=".", options: ScanOptions | None = None,
                  svg: bool = False, threads: int = 1, name: str = "entropy") -> ScanResult:
    """Entropies and susceptibility along x23 sweeps at fixed x13, one block per method."""
    options = options or ScanOptions()
    target = _prepare(out, f"{name}.csv")
    rows, timings = [], []
    for method in methods:
        for a in x13_values:
            g = ScanGrid(Axis(float(a), float(a), 1.0), x23, params.n_atoms, method, sector)
            partial = target.with_name(f"{name}.{method}.{_fmt(float(a))}.partial")
            rows += compute_rows(params, g, options, threads, partial)
            timings += compute_rows.last_timings
            if partial.exists():
                partial.unlink()
    write_csv(target, COLUMNS, rows)
    _write_timings(target.with_suffix(".timings.csv"), timings)
    result = ScanResult(target, rows, ScanGrid(Axis(0, 0, 1), x23, params.n_atoms, methods[0], sector))
    if svg:
        series = {}
        m_idx, a_idx, b_idx, s_idx = (COLUMNS.index(c) for c in ("method", "x13", "x23", "sl_matter"))
        for method in methods:
            for a in x13_values:
                sel = [r for r in rows if r[m_idx] == method and float(r[a_idx]) == float(_fmt(float(a)))]
                series[f"{method} x13={a:g}"] = (np.array([float(r[b_idx]) for r in sel]),
                                                 np.array([float(r[s_idx] or "nan") for r in sel]))
        result.svg = svgmod.line_plot(target.with_suffix(".svg"), series, title=f"S_L(matter), N_a={params.n_atoms}",
                                      ylabel="S_L")
    return result


def compare_sas_exact(params: ModelParams, grid: ScanGrid, out=".", tol: float = 1e-8, svg: bool = False,
                      threads: int = 1, name: str = "compare") -> ScanResult:
    """Fidelity between SAS and exact matter RDMs at every grid point."""
    g = ScanGrid(grid.x13, grid.x23, grid.n_atoms, "sas", grid.sector)
    return run_scan(params, g, out, ScanOptions(tol=tol, susceptibility=False, compare=True), svg, threads, name)


def _compare_svg(result: ScanResult, path: Path) -> Path:
    f = result.column("f_sas_exact")
    g = result.grid
    if min(g.shape) > 1:
        return svgmod.heatmap(path, g.x13.values, g.x23.values, f, title="F(SAS, exact)")
    along = g.x23.values if g.shape[0] == 1 else g.x13.values
    return svgmod.line_plot(path, {"F": (along, f.ravel())}, title="F(SAS, exact)",
                            xlabel="x23" if g.shape[0] == 1 else "x13", ylabel="F")


SIMPLEX_COLUMNS = ("x13", "x23", "method", "p1", "p2", "p3", "u", "v", "sl_one_atom", "error")


def sample_simplex(params: ModelParams, grid: ScanGrid, methods=("exact", "sas"), out=".", tol: float = 1e-8,
                   svg: bool = False, threads: int = 1, name: str = "simplex") -> ScanResult:
    """Occupation probabilities of the one-atom RDM embedded in the triangle.

    ``extra['disk_counts']`` holds, per method, the number of points whose
    one-atom RDM has 1/2 <= S_L <= 2/3.  For the diagonal SAS and exact RDMs
    that is the inscribed disk of the triangle.
    """
    target = _prepare(out, f"{name}.csv")
    opts = ScanOptions(tol=tol, susceptibility=False)
    rows, groups, counts = [], {}, {}
    idx = {c: COLUMNS.index(c) for c in ("x13", "x23", "p1", "p2", "p3", "sl_one_atom", "error")}
    for method in methods:
        g = ScanGrid(grid.x13, grid.x23, grid.n_atoms, method, grid.sector)
        partial = target.with_name(f"{name}.{method}.partial")
        raw = compute_rows(params, g, opts, threads, partial)
        if partial.exists():
            partial.unlink()
        pts, count = [], 0
        for r in raw:
            if r[idx["error"]]:
                rows.append([r[idx["x13"]], r[idx["x23"]], method, "", "", "", "", "", "", r[idx["error"]]])
                continue
            p = np.array([float(r[idx[k]]) for k in ("p1", "p2", "p3")])
            u, v = qinfo.simplex_embed(p)
            # entropy of the full one-atom RDM: coherent states are pure but off-diagonal
            sl = float(r[idx["sl_one_atom"]])
            count += int(0.5 - 1e-12 <= sl <= 2.0 / 3.0 + 1e-12)
            pts.append((u, v))
            rows.append([r[idx["x13"]], r[idx["x23"]], method, *(_fmt(float(t)) for t in (*p, u, v, sl)), ""])
        groups[method] = np.array(pts)
        counts[method] = count
    write_csv(target, SIMPLEX_COLUMNS, rows)
    result = ScanResult(target, rows, grid, extra={"disk_counts": counts})
    if svg:
        result.svg = svgmod.simplex_scatter(target.with_suffix(".svg"), groups, title=f"N_a={params.n_atoms}")
    return result


def meanfield_tables(params: ModelParams, grid: ScanGrid, out=".", n: int = 256, svg: bool = False,
                     name: str = "meanfield") -> tuple[Path, Path]:
    """Ground region per grid point plus sampled separatrix curves."""
    target = _prepare(out, f"{name}.csv")
    rows = []
    for a, b in grid.points():
        sol = meanfield.ground_solution(params.with_dimensionless(a, b))
        g = sol.trial.unit_gamma
        rows.append([_fmt(a), _fmt(b), sol.region, _fmt(sol.energy_per_atom), _fmt(sol.trial.r1),
                     _fmt(sol.trial.r2), *(_fmt(float(t * t)) for t in g)])
    write_csv(target, ("x13", "x23", "region", "energy", "r1", "r2", "p1", "p2", "p3"), rows)
    sep_rows = []
    curves = []
    for b in meanfield.BOUNDARIES[params.config]:
        pts = meanfield.separatrix(params, b, n=n, x_max=max(grid.x13.hi, 1.0))
        curves.append(pts)
        sep_rows += [[b, _fmt(float(u)), _fmt(float(v))] for u, v in pts]
    sep = write_csv(target.with_name(f"{name}_separatrix.csv"), ("boundary", "x13", "x23"), sep_rows)
    if svg:
        codes = {r: i for i, r in enumerate(meanfield.REGIONS[params.config])}
        vals = np.array([codes[r[2]] for r in rows], dtype=float).reshape(grid.shape)
        svgmod.heatmap(target.with_suffix(".svg"), grid.x13.values, grid.x23.values, vals,
                       title="mean-field regions", overlay=curves)
    return target, sep


def default_threads() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))

