"""External MILP solvers driven through LP files.

Every adapter is invoked with a model file and a parameter file and must
leave a solution file behind (format: :func:`parse_solution_file`). The
parameter file is ``key = value`` lines using HiGHS option names::

    time_limit = 600
    threads = 1
    mip_rel_gap = 0.0001      (only when a gap target is set)
"""

from __future__ import annotations

import importlib.util
import logging
import os
import platform
import re
import shutil
import subprocess
import sys
import tempfile
import time
from pathlib import Path

from ..model import ModelIR, emit_lp
from .solution import Solution, SolveLimits, SolverError, Status, parse_solution_file

log = logging.getLogger(__name__)

#: Overrides the executable of the selected backend.
SOLVER_PATH_ENV = "SGCLUST_SOLVER_PATH"

MODEL_FILE = "model.lp"
PARAMS_FILE = "params.txt"
SOLUTION_FILE = "solution.sol"
LOG_FILE = "solver.log"

_GAP_LINE = re.compile(r"^\s*Gap:\s+(\S+)", re.M)


def write_params(limits: SolveLimits, path: Path) -> None:
    lines = [f"time_limit = {limits.time_limit:g}", f"threads = {limits.threads}"]
    if limits.mip_gap_target is not None:
        lines.append(f"mip_rel_gap = {limits.mip_gap_target:g}")
    path.write_text("\n".join(lines) + "\n")


def read_params(path: Path) -> dict[str, str]:
    out = {}
    for ln in Path(path).read_text().splitlines():
        if "=" in ln and not ln.lstrip().startswith("#"):
            k, v = ln.split("=", 1)
            out[k.strip()] = v.strip()
    return out


class SolverBackend:
    name = "abstract"

    def __init__(self, executable: str | None = None) -> None:
        self._executable = executable

    def executable(self) -> str:
        raise NotImplementedError

    def command(self, model: Path, params: Path, solution: Path) -> list[str]:
        raise NotImplementedError

    def solve(self, m: ModelIR, limits: SolveLimits, workdir: str | Path | None = None) -> Solution:
        """Write ``m``, run the solver, parse its solution file.

        With ``workdir`` the model, parameter, solution and log files are
        kept there; otherwise a temporary directory is used.
        """
        if workdir is None:
            with tempfile.TemporaryDirectory(prefix="sgclust-") as tmp:
                return self._solve_in(m, limits, Path(tmp))
        path = Path(workdir)
        path.mkdir(parents=True, exist_ok=True)
        return self._solve_in(m, limits, path)

    def _solve_in(self, m: ModelIR, limits: SolveLimits, wd: Path) -> Solution:
        model, params, sol_path, log_path = (wd / MODEL_FILE, wd / PARAMS_FILE,
                                             wd / SOLUTION_FILE, wd / LOG_FILE)
        model.write_text(emit_lp(m))
        write_params(limits, params)
        if sol_path.exists():
            sol_path.unlink()
        cmd = self.command(model, params, sol_path)
        log.debug("running %s", " ".join(cmd))
        start = time.perf_counter()
        timed_out = False
        with open(log_path, "w") as fh:
            try:
                proc = subprocess.run(cmd, stdout=fh, stderr=subprocess.STDOUT,
                                      timeout=limits.time_limit + 60)
                rc = proc.returncode
            except subprocess.TimeoutExpired:
                timed_out, rc = True, None
            except OSError as exc:
                raise SolverError(f"cannot run {self.name} backend: {exc}") from exc
        elapsed = time.perf_counter() - start
        if not sol_path.exists() or not sol_path.read_text().strip():
            if timed_out:
                return Solution(Status.UNKNOWN, solve_seconds=elapsed, backend=self.name)
            raise SolverError(f"{self.name} exited with code {rc} without a solution file "
                              f"(log: {log_path})")
        gap = _GAP_LINE.findall(log_path.read_text())
        sol = parse_solution_file(sol_path.read_text(), m, float(gap[-1]) if gap else None)
        sol.solve_seconds = elapsed
        sol.backend = self.name
        return sol


class CbcBackend(SolverBackend):
    """COIN-OR CBC. Parameters are passed on its command line."""

    name = "cbc"

    def executable(self) -> str:
        if self._executable is not None:
            if os.path.isfile(self._executable) and os.access(self._executable, os.X_OK):
                return self._executable
            raise SolverError(f"solver executable {self._executable!r} not found or not executable")
        for cand in (os.environ.get(SOLVER_PATH_ENV), shutil.which("cbc"), _bundled_cbc()):
            if cand and os.path.isfile(cand) and os.access(cand, os.X_OK):
                return cand
        raise SolverError("CBC executable not found; set SGCLUST_SOLVER_PATH or install cbc")

    def command(self, model: Path, params: Path, solution: Path) -> list[str]:
        opts = read_params(params)
        cmd = [self.executable(), str(model), "sec", opts["time_limit"], "threads", opts["threads"]]
        if "mip_rel_gap" in opts:
            cmd += ["ratio", opts["mip_rel_gap"]]
        return cmd + ["solve", "solu", str(solution)]


class HighsBackend(SolverBackend):
    """HiGHS through the bundled runner script (reads LP + HiGHS options file)."""

    name = "highs"

    def executable(self) -> str:
        return self._executable or os.environ.get(SOLVER_PATH_ENV) or sys.executable

    def command(self, model: Path, params: Path, solution: Path) -> list[str]:
        exe = self.executable()
        if exe == sys.executable:
            return [exe, "-m", "sgclust.solver.highs_runner", str(model), str(params), str(solution)]
        return [exe, str(model), str(params), str(solution)]


def _bundled_cbc() -> str | None:
    # pulp ships a CBC build; only its location is used, never pulp's API
    spec = importlib.util.find_spec("pulp")
    if spec is None or not spec.submodule_search_locations:
        return None
    root = Path(next(iter(spec.submodule_search_locations))) / "solverdir" / "cbc"
    arch = {"x86_64": "i64", "amd64": "i64", "aarch64": "arm64", "arm64": "arm64"}.get(
        platform.machine().lower(), "i32")
    osdir = {"linux": "linux", "darwin": "osx", "win32": "win"}.get(sys.platform, sys.platform)
    path = root / osdir / arch / ("cbc.exe" if osdir == "win" else "cbc")
    return str(path) if path.is_file() else None


BACKENDS = {"cbc": CbcBackend, "highs": HighsBackend}


def get_backend(spec: str = "cbc") -> SolverBackend:
    """Backend by name, or a CBC-compatible executable given by path."""
    if spec in BACKENDS:
        return BACKENDS[spec]()
    if os.sep in spec or os.path.exists(spec):
        return CbcBackend(spec)
    raise SolverError(f"unknown backend {spec!r}; choose from {sorted(BACKENDS)} or give a path")


def solve(m: ModelIR, limits: SolveLimits | None = None, backend: SolverBackend | str = "cbc",
          workdir: str | Path | None = None) -> Solution:
    if isinstance(backend, str):
        backend = get_backend(backend)
    return backend.solve(m, limits or SolveLimits(), workdir)

