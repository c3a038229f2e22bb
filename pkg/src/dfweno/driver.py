"""Run loop, convergence study, max-Mach robustness sweep, and snapshot
writers.

A run advances one case from its initial field to its time or step
horizon, tracking the feedback factors between steps, and stops at the
first non-physical state with the failing step, cell, and variable
recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from pathlib import Path

import numpy as np

from .cases import (
    CaseSpec,
    apply_boundary,
    exact_solution,
    fixed_step,
    get_case,
    initial_field,
    make_mesh,
    sweep_value_for_mach,
)
from .flux_gks import GksParams
from .config import RunConfig, format_config
from .pipeline import (
    BC_CODES,
    alpha_from_averages_1d,
    alpha_from_averages_2d,
    dilate_alpha_1d,
    dilate_alpha_2d,
    fill_ghosts_alpha_1d,
    fill_ghosts_alpha_2d,
)
from .recon import ReconConfig
from .state import Field1D, Field2D, GammaModel, primitives_from_conserved_array
from .timestep import StepContext, StepReport, advance, compute_dt

_TIME_EPS = 1e-12


@dataclass
class RunResult:
    """Final state of one run plus the per-step report stream."""

    field: Field1D | Field2D
    alpha: np.ndarray
    t: float
    steps: int
    ok: bool
    reason: str = ""
    where: tuple = ()
    reports: list[StepReport] = dfield(default_factory=list)

    @property
    def alpha_interior(self) -> np.ndarray:
        ng = self.field.mesh.ng
        if self.alpha.ndim == 1:
            return self.alpha[ng:ng + self.field.mesh.nx]
        return self.alpha[ng:ng + self.field.mesh.nx,
                          ng:ng + self.field.mesh.ny]


def _sweep_value(config: RunConfig, spec: CaseSpec):
    if spec.sweep_param is None:
        return None
    return getattr(config, spec.sweep_param)


def _make_context(config: RunConfig, spec: CaseSpec, mesh) -> StepContext:
    recon_cfg = ReconConfig(d_high=config.d_h, d_low=config.d_l,
                            alpha_thres=config.alpha_thres)
    common = dict(gm=GammaModel(config.gamma), cfg=recon_cfg,
                  mode=config.recon, flux=config.flux_name(),
                  ng=mesh.ng, nx=mesh.nx, dx=mesh.dx,
                  bcx=BC_CODES[spec.bcx])
    if spec.collision_free:
        common["gks"] = GksParams(c1=0.0, c2=0.0)
    if spec.ndim == 1:
        return StepContext(**common)
    return StepContext(ny=mesh.ny, dy=mesh.dy, bcy=BC_CODES[spec.bcy],
                       **common)


def _init_alpha(field, spec: CaseSpec, gamma: float) -> np.ndarray:
    """Seed the feedback factors from the initial field.

    A t=0 discontinuity sits on a single interface, so the average-jump
    factor marks only the two adjacent cells; one spreading pass widens the
    mark enough for the three-cell reconstruction guard to see it on the
    very first stage.  Factors refreshed after a step need no spreading
    because an evolved jump already occupies several cells.
    """
    mesh = field.mesh
    if spec.ndim == 1:
        alpha = np.ones(field.data.shape[0])
        code = alpha_from_averages_1d(field.data, mesh.ng, mesh.nx, gamma,
                                      alpha)
        fill_ghosts_alpha_1d(alpha, mesh.ng, BC_CODES[spec.bcx])
        dilate_alpha_1d(alpha, mesh.ng, mesh.nx)
        fill_ghosts_alpha_1d(alpha, mesh.ng, BC_CODES[spec.bcx])
    else:
        alpha = np.ones(field.data.shape[:2])
        code = alpha_from_averages_2d(field.data, mesh.ng, mesh.nx, mesh.ny,
                                      gamma, alpha)
        fill_ghosts_alpha_2d(alpha, mesh.ng, BC_CODES[spec.bcx],
                             BC_CODES[spec.bcy])
        dilate_alpha_2d(alpha, mesh.ng, mesh.nx, mesh.ny)
        fill_ghosts_alpha_2d(alpha, mesh.ng, BC_CODES[spec.bcx],
                             BC_CODES[spec.bcy])
    if code != 0:
        raise ValueError("non-physical initial field")
    return alpha


def run(config: RunConfig, on_step=None) -> RunResult:
    """Advance a case to its horizon, emitting snapshots per the config.

    on_step(step_index, t, field, alpha) is called after each successful
    step.  Snapshots are written only for completed runs.
    """
    spec = get_case(config.case)
    mesh = make_mesh(spec, config.nx, config.ny)
    fld = initial_field(spec, mesh, _sweep_value(config, spec))
    apply_boundary(fld, spec)
    ctx = _make_context(config, spec, mesh)
    alpha = _init_alpha(fld, spec, config.gamma)

    t_end = config.t_end if config.t_end is not None else spec.t_end
    max_steps = config.max_steps if config.max_steps is not None \
        else spec.max_steps
    if t_end is None and max_steps is None:
        raise ValueError(f"case {spec.name!r} needs t_end or max_steps")
    cfl = config.cfl if config.cfl is not None else spec.cfl
    # The smooth accuracy cases march with a fixed dt tied to dx; an
    # explicit cfl in the config switches back to the adaptive step.
    fixed_dt = None
    if config.cfl is None:
        fixed_dt = fixed_step(spec, mesh, config.flux_name())

    out_tokens = config.format_tokens()
    out_dir = Path(config.out_dir)

    t = 0.0
    steps = 0
    reports: list[StepReport] = []
    ok = True
    reason = ""
    where: tuple = ()
    while True:
        if t_end is not None and t >= t_end - _TIME_EPS * max(1.0, t_end):
            break
        if max_steps is not None and steps >= max_steps:
            break
        dt = fixed_dt if fixed_dt is not None \
            else compute_dt(fld.data, cfl, ctx)
        if t_end is not None:
            dt = min(dt, t_end - t)
        report = advance(fld.data, alpha, dt, ctx)
        reports.append(report)
        if not report.ok:
            ok = False
            reason = f"step {steps + 1}: {report.reason}"
            where = report.where
            break
        t += dt
        steps += 1
        if on_step is not None:
            on_step(steps, t, fld, alpha)
        if ok and out_tokens and config.snapshot_every \
                and steps % config.snapshot_every == 0:
            _emit(fld, alpha, out_tokens, out_dir, f"step_{steps:06d}",
                  config)
    result = RunResult(fld, alpha, t, steps, ok, reason, where, reports)
    if ok and out_tokens:
        _emit(fld, alpha, out_tokens, out_dir, "final", config)
    return result


def _emit(fld, alpha, tokens, out_dir: Path, stem: str, config: RunConfig):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config_echo.txt").write_text(format_config(config),
                                             encoding="utf-8")
    ng = fld.mesh.ng
    if "csv" in tokens:
        write_snapshot(fld, "csv", out_dir / f"{stem}.csv", config.gamma)
        if alpha.ndim == 1:
            a = alpha[ng:ng + fld.mesh.nx]
        else:
            a = alpha[ng:ng + fld.mesh.nx, ng:ng + fld.mesh.ny]
        write_alpha_csv(fld.mesh, a, out_dir / f"alpha_{stem}.csv")
    if "vtk" in tokens:
        write_snapshot(fld, "vtk", out_dir / f"{stem}.vtk", config.gamma)


# ---------------------------------------------------------------------------
# snapshot writers


def _g17(x: float) -> str:
    return "%.17g" % x


def write_snapshot(fld, fmt: str, path, gamma: float = 1.4) -> None:
    """Write one field snapshot; csv holds cell-center rows, vtk a legacy
    ASCII structured-points dataset of the primitive fields."""
    if fmt == "csv":
        _write_csv(fld, Path(path), gamma)
    elif fmt == "vtk":
        _write_vtk(fld, Path(path), gamma)
    else:
        raise ValueError(f"unknown snapshot format {fmt!r}")


def _write_csv(fld, path: Path, gamma: float) -> None:
    q = primitives_from_conserved_array(fld.interior, gamma)
    mesh = fld.mesh
    lines = []
    if isinstance(fld, Field1D):
        lines.append("x,rho,u,p")
        x = mesh.centers()
        for i in range(mesh.nx):
            lines.append(",".join(
                _g17(v) for v in (x[i], q[i, 0], q[i, 1], q[i, 3])))
    else:
        lines.append("x,y,rho,u,v,p")
        x = mesh.centers_x()
        y = mesh.centers_y()
        for i in range(mesh.nx):
            for j in range(mesh.ny):
                lines.append(",".join(
                    _g17(v) for v in (x[i], y[j], q[i, j, 0], q[i, j, 1],
                                      q[i, j, 2], q[i, j, 3])))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write snapshot {path}: {e}") from e


def write_alpha_csv(mesh, alpha_interior: np.ndarray, path) -> None:
    """Feedback-factor field at cell centers."""
    path = Path(path)
    lines = []
    if alpha_interior.ndim == 1:
        lines.append("x,alpha")
        x = mesh.centers()
        for i in range(mesh.nx):
            lines.append(f"{_g17(x[i])},{_g17(alpha_interior[i])}")
    else:
        lines.append("x,y,alpha")
        x = mesh.centers_x()
        y = mesh.centers_y()
        for i in range(mesh.nx):
            for j in range(mesh.ny):
                lines.append(
                    f"{_g17(x[i])},{_g17(y[j])},{_g17(alpha_interior[i, j])}")
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write snapshot {path}: {e}") from e


def _write_vtk(fld, path: Path, gamma: float) -> None:
    q = primitives_from_conserved_array(fld.interior, gamma)
    mesh = fld.mesh
    two_d = isinstance(fld, Field2D)
    nx = mesh.nx
    ny = mesh.ny if two_d else 1
    dx = mesh.dx
    dy = mesh.dy if two_d else 1.0
    oy = mesh.y0 + 0.5 * mesh.dy if two_d else 0.0
    head = [
        "# vtk DataFile Version 3.0",
        "cell-centered primitive fields",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {nx} {ny} 1",
        f"ORIGIN {_g17(mesh.x0 + 0.5 * dx)} {_g17(oy)} 0",
        f"SPACING {_g17(dx)} {_g17(dy)} 1",
        f"POINT_DATA {nx * ny}",
    ]
    if not two_d:
        q = q[:, None, :]
    body = []
    for comp, name in ((0, "rho"), (1, "u"), (2, "v"), (3, "p")):
        body.append(f"SCALARS {name} double 1")
        body.append("LOOKUP_TABLE default")
        # VTK point order: x varies fastest
        for j in range(ny):
            for i in range(nx):
                body.append(_g17(q[i, j, comp]))
    try:
        path.write_text("\n".join(head + body) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write snapshot {path}: {e}") from e


def read_snapshot_csv(path) -> dict[str, np.ndarray]:
    """Read a snapshot CSV back into column arrays keyed by header name."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, k] for k, name in enumerate(header)}


# ---------------------------------------------------------------------------
# convergence study


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    l1: float
    l2: float
    linf: float
    l1_order: float | None = None
    l2_order: float | None = None
    linf_order: float | None = None


def convergence_study(config: RunConfig, mesh_sizes) -> list[ConvergenceRow]:
    """Density-error norms against the exact cell averages over a mesh
    sequence, with orders from successive size-doubling ratios."""
    spec = get_case(config.case)
    rows: list[ConvergenceRow] = []
    prev: ConvergenceRow | None = None
    for n in mesh_sizes:
        overrides = {"nx": int(n), "format": "", "snapshot_every": 0}
        if spec.ndim == 2:
            overrides["ny"] = int(n)
        cfg = config.with_overrides(**overrides)
        result = run(cfg)
        if not result.ok:
            raise RuntimeError(
                f"convergence run at N={n} failed: {result.reason}")
        t_end = cfg.t_end if cfg.t_end is not None else spec.t_end
        exact = exact_solution(spec, result.field.mesh, t_end)
        if exact is None:
            raise ValueError(f"case {spec.name!r} has no exact solution")
        diff = np.abs(result.field.interior[..., 0] - exact[..., 0])
        l1 = float(diff.mean())
        l2 = float(math.sqrt((diff * diff).mean()))
        linf = float(diff.max())
        row = ConvergenceRow(int(n), l1, l2, linf)
        if prev is not None:
            ratio = math.log2(int(n) / prev.n)

            def order(e_prev, e_cur):
                if e_prev <= 0.0 or e_cur <= 0.0:
                    return None
                return math.log2(e_prev / e_cur) / ratio

            row = ConvergenceRow(
                int(n), l1, l2, linf,
                order(prev.l1, l1), order(prev.l2, l2),
                order(prev.linf, linf))
        rows.append(row)
        prev = row
    return rows


def write_convergence_csv(rows, path) -> None:
    lines = ["n,l1,l1_order,l2,l2_order,linf,linf_order"]
    for r in rows:
        cells = [str(r.n)]
        for err, order in ((r.l1, r.l1_order), (r.l2, r.l2_order),
                           (r.linf, r.linf_order)):
            cells.append(_g17(err))
            cells.append("" if order is None else _g17(order))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# max-Mach robustness sweep


@dataclass
class SweepOutcome:
    """Result of a max-Mach search.

    status "ok" carries the largest surviving grid value; "all_survive"
    and "all_fail" are inconclusive and carry the tested boundary.
    """

    status: str
    max_mach: float | None
    boundary: float | None
    evaluations: list[tuple[float, bool]]


def bisect_max_survivor(lo: float, hi: float, resolution: float,
                        survives) -> SweepOutcome:
    """Largest value on the lo + k*resolution grid for which survives()
    holds, assuming survival is monotone (survivors below failures)."""
    if not hi > lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    if not resolution > 0.0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    kmax = int(round((hi - lo) / resolution))
    if kmax < 1 or abs(lo + kmax * resolution - hi) > 1e-9:
        raise ValueError(
            f"range [{lo}, {hi}] is not a multiple of resolution "
            f"{resolution}")
    evaluations: list[tuple[float, bool]] = []
    cache: dict[int, bool] = {}

    def probe(k: int) -> bool:
        if k not in cache:
            value = lo + k * resolution
            cache[k] = bool(survives(value))
            evaluations.append((value, cache[k]))
        return cache[k]

    if not probe(0):
        return SweepOutcome("all_fail", None, lo, evaluations)
    if probe(kmax):
        return SweepOutcome("all_survive", None, hi, evaluations)
    good, bad = 0, kmax
    while bad - good > 1:
        mid = (good + bad) // 2
        if probe(mid):
            good = mid
        else:
            bad = mid
    return SweepOutcome("ok", lo + good * resolution, None, evaluations)


def max_mach_sweep(config: RunConfig, lo: float, hi: float,
                   resolution: float = 0.1, survives=None) -> SweepOutcome:
    """Bisect for the largest Mach number whose run completes its horizon.

    survives(ma) may be injected for testing; the default maps Ma to the
    case's sweep parameter and runs the solver without file output.
    """
    spec = get_case(config.case)
    if survives is None:
        if spec.sweep_param is None:
            raise ValueError(f"case {spec.name!r} has no sweep parameter")

        def survives(ma: float) -> bool:
            value = sweep_value_for_mach(spec, ma)
            cfg = config.with_overrides(
                format="", snapshot_every=0, **{spec.sweep_param: value})
            return run(cfg).ok

    return bisect_max_survivor(lo, hi, resolution, survives)


def write_sweep_csv(outcome: SweepOutcome, path) -> None:
    lines = ["mach,survived"]
    for value, flag in sorted(outcome.evaluations):
        lines.append(f"{_g17(value)},{int(flag)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
