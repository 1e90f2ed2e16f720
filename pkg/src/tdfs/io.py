"""CSV serialisation of trajectories and control-field samples (17 significant digits)."""
from __future__ import annotations

import csv
import io
import sys
from pathlib import Path

import numpy as np

from .evolve import Trajectory

TRAJECTORY_HEADER = ("t_gamma", "r", "theta", "rho00", "rho11", "re_rho01", "im_rho01",
                     "purity", "bx", "by", "bz", "re_omega", "im_omega", "fidelity")
CONTROL_HEADER = ("t_gamma", "re_omega", "im_omega", "abs_omega")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    data = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(data)
        return
    Path(path).write_text(data, encoding="utf-8")


def trajectory_rows(traj: Trajectory) -> np.ndarray:
    rho = traj.rho
    b = traj.bloch
    return np.column_stack([
        traj.t, traj.r, traj.theta, rho[:, 0, 0].real, rho[:, 1, 1].real,
        rho[:, 0, 1].real, rho[:, 0, 1].imag, traj.purity, b[:, 0], b[:, 1], b[:, 2],
        traj.omega.real, traj.omega.imag, traj.fidelity,
    ])


def write_trajectory(traj: Trajectory, path) -> None:
    _write(path, TRAJECTORY_HEADER, trajectory_rows(traj))


def read_table(path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(x) for x in row] for row in reader], dtype=float)
    data = data.reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def rows_to_rho(table: dict[str, np.ndarray]) -> np.ndarray:
    off = table["re_rho01"] + 1j * table["im_rho01"]
    rho = np.empty((len(off), 2, 2), dtype=complex)
    rho[:, 0, 0] = table["rho00"]
    rho[:, 1, 1] = table["rho11"]
    rho[:, 0, 1] = off
    rho[:, 1, 0] = np.conj(off)
    return rho


def write_control_table(t, omega, path) -> None:
    omega = np.asarray(omega, dtype=complex)
    _write(path, CONTROL_HEADER, np.column_stack([t, omega.real, omega.imag, np.abs(omega)]))


def read_control_table(path) -> tuple[np.ndarray, np.ndarray]:
    table = read_table(path)
    return table["t_gamma"], table["re_omega"] + 1j * table["im_omega"]
