"""Theta sweeps, noise sweeps and CSV output.

A sweep prepares one state per theta, estimates the global, marginal and
dephased purities with the chosen protocol, and turns them into bounds on
the coherent information and the relative entropy of coherence. Repeated
runs use independent derived seeds; bounds are computed per repetition and
averaged, and the purity error columns are the spread across repetitions.
"""

from __future__ import annotations

import csv
import enum
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from qpb import collective, shadows, tomography
from qpb.linalg import dephase, partial_trace, purity
from qpb.rng import check_seed, derive_seed
from qpb.spectral import coherence_bounds, coherent_info_bounds
from qpb.states import (
    GHZ_LABELS,
    PSI2_LABELS,
    bell_pair,
    c_re_exact,
    coherent_info_exact,
    depolarize,
    format_subsystem,
    ghz_theta,
    parse_subsystem,
    product_psi2,
)

CSV_HEADER = (
    "theta,protocol,subsystem,P_global,P_marginal,P_diag,l_e,u_e,i_exact,"
    "l_c,u_c,cre_exact,P_global_err,P_marginal_err,P_diag_err,clamped"
).split(",")

NOISE_HEADER = (
    "p,theta,subsystem,P_global,P_marginal,P_diag,l_e,u_e,i_exact,l_c,u_c,cre_exact"
).split(",")

DEFAULT_THETAS = "0:pi/2:11"
DEFAULT_SHADOW_M = 20_000
DEFAULT_COLLECTIVE_SHOTS = 100_000
DEFAULT_TOMO_SHOTS = 1_400_000
DEFAULT_REPEATS = 10


class Family(enum.Enum):
    GHZ_THETA = "ghz"
    PRODUCT_PSI2 = "psi2"
    BELL_PAIR = "bell"


class Protocol(enum.Enum):
    EXACT = "Exact"
    SHADOW = "Shadow"
    COLLECTIVE = "Collective"
    TOMOGRAPHY = "Tomography"


FAMILY_LABELS = {
    Family.GHZ_THETA: GHZ_LABELS,
    Family.PRODUCT_PSI2: PSI2_LABELS,
    Family.BELL_PAIR: PSI2_LABELS,
}

DEFAULT_SUBSYSTEMS = {
    Family.GHZ_THETA: ("1", "1,1p", "1,1p,2"),
    Family.PRODUCT_PSI2: ("2",),
    Family.BELL_PAIR: ("2",),
}

_ANGLE = re.compile(
    r"^(?P<sign>[+-])?(?P<num>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*(?P<pi>pi)?\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?$"
)


def parse_angle(expr: str) -> float:
    """Parse ``0.3``, ``pi``, ``pi/4``, ``3pi/20`` or ``3*pi/20`` into radians."""
    text = str(expr).strip().lower().replace("π", "pi")
    m = _ANGLE.match(text)
    if not m or not (m.group("num") or m.group("pi")):
        raise ValueError(f"cannot parse angle {expr!r}")
    value = float(m.group("num")) if m.group("num") else 1.0
    if m.group("pi"):
        value *= math.pi
    if m.group("den"):
        den = float(m.group("den"))
        if den == 0:
            raise ValueError(f"division by zero in angle {expr!r}")
        value /= den
    return -value if m.group("sign") == "-" else value


def parse_grid(text: str, parse: Callable[[str], float] = parse_angle) -> list[float]:
    """``start:end:count`` inclusive grid; a single value gives a one-point grid."""
    parts = str(text).split(":")
    if len(parts) == 1:
        return [parse(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"grid must be start:end:count, got {text!r}")
    start, end = parse(parts[0]), parse(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError("grid count must be at least 1")
    if count == 1:
        return [start]
    return [start + (end - start) * i / (count - 1) for i in range(count)]


def prepare_state(family: Family, theta: float, noise_p: float = 0.0) -> np.ndarray:
    if family is Family.GHZ_THETA:
        rho = ghz_theta(theta)
    elif family is Family.PRODUCT_PSI2:
        rho = product_psi2(theta)
    elif family is Family.BELL_PAIR:
        rho = bell_pair()
    else:  # pragma: no cover
        raise ValueError(f"unsupported family {family}")
    return depolarize(rho, noise_p) if noise_p else rho


@dataclass
class SweepConfig:
    family: Family = Family.GHZ_THETA
    thetas: Sequence[float] = field(default_factory=lambda: parse_grid(DEFAULT_THETAS))
    protocol: Protocol = Protocol.EXACT
    shots: int = DEFAULT_SHADOW_M
    repeats: int = DEFAULT_REPEATS
    seed: int = 0
    subsystems: Sequence[str] | None = None
    noise_p: float = 0.0
    diag_mode: str | None = None
    err_kind: str = "sd"
    threads: int | None = None
    dump_shadows: TextIO | None = None
    dump_counts: TextIO | None = None

    def validate(self) -> None:
        if not self.thetas:
            raise ValueError("theta grid is empty")
        for t in self.thetas:
            if not (-1e-12 <= t <= math.pi / 2 + 1e-12):
                raise ValueError(f"theta {t} outside [0, pi/2]")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if self.protocol is Protocol.SHADOW and self.shots < 2:
            raise ValueError("shadow protocol needs at least 2 snapshots")
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ValueError("noise probability must lie in [0, 1]")
        if self.err_kind not in ("sd", "sem"):
            raise ValueError("err_kind must be 'sd' or 'sem'")
        check_seed(self.seed)
        if self.protocol is Protocol.COLLECTIVE:
            if self.family is Family.GHZ_THETA:
                raise ValueError("the collective protocol measures two-qubit states only")
            for sub in self.subsystem_qubits():
                if len(sub) != 1:
                    raise ValueError("collective marginals are single qubits (subsystem 1 or 2)")
        if self.protocol is Protocol.TOMOGRAPHY:
            n = 4 if self.family is Family.GHZ_THETA else 2
            if self.shots < 3**n:
                raise ValueError(f"tomography needs at least {3**n} shots (one per setting)")

    def subsystem_qubits(self) -> list[tuple[int, ...]]:
        labels = FAMILY_LABELS[self.family]
        specs = self.subsystems or DEFAULT_SUBSYSTEMS[self.family]
        out = [parse_subsystem(s, labels) for s in specs]
        n = len(labels)
        for sub in out:
            if len(sub) >= n:
                raise ValueError("subsystem B must be a proper subset of the register")
        return out


@dataclass
class SweepRow:
    theta: float
    protocol: str
    subsystem: str
    P_global: float
    P_marginal: float
    P_diag: float
    l_e: float
    u_e: float
    i_exact: float
    l_c: float
    u_c: float
    cre_exact: float
    P_global_err: float = 0.0
    P_marginal_err: float = 0.0
    P_diag_err: float = 0.0
    clamped: bool = False


@dataclass
class _Estimate:
    """Purities from one repetition at one theta."""

    P_global: float
    P_diag: float
    P_marginal: dict[tuple[int, ...], float]


def _estimate(
    cfg: SweepConfig, rho: np.ndarray, subs: list[tuple[int, ...]], seed: int
) -> tuple[_Estimate, object]:
    """Purities from one repetition, plus the raw record (shadows or counts) if any."""
    proto = cfg.protocol
    if proto is Protocol.EXACT:
        return _Estimate(
            purity(rho),
            purity(dephase(rho)),
            {b: purity(partial_trace(rho, b)) for b in subs},
        ), None
    if proto is Protocol.SHADOW:
        c = shadows.sample_shadows(rho, cfg.shots, seed)
        mode = cfg.diag_mode or "unbiased"
        return _Estimate(
            shadows.estimate_purity(c),
            shadows.estimate_diagonal_purity(c, mode),
            {b: shadows.estimate_purity(c, b) for b in subs},
        ), c
    if proto is Protocol.COLLECTIVE:
        table = collective.sample_counts(collective.bell_probabilities(rho), cfg.shots, seed)
        mode = cfg.diag_mode or "general"
        return _Estimate(
            collective.purity_from_counts(table),
            collective.diagonal_purity_from_counts(table, mode),
            {b: collective.marginal_purity_from_counts(table, pair=b[0] + 1) for b in subs},
        ), table
    if proto is Protocol.TOMOGRAPHY:
        n = rho.shape[0].bit_length() - 1
        data = tomography.simulate_pauli_dataset(rho, cfg.shots // 3**n, seed)
        est = tomography.reconstruct(data)
        return _Estimate(
            purity(est),
            purity(dephase(est)),
            {b: purity(partial_trace(est, b)) for b in subs},
        ), None
    raise ValueError(f"unsupported protocol {proto}")  # pragma: no cover


def _threads(requested: int | None, tasks: int) -> int:
    cap = requested
    if cap is None:
        env = os.environ.get("QPB_THREADS")
        cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, tasks))


def _spread(values: Sequence[float], kind: str) -> float:
    if len(values) < 2:
        return 0.0
    sd = float(np.std(values, ddof=1))
    return sd / math.sqrt(len(values)) if kind == "sem" else sd


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """One row per (theta, subsystem), ordered by theta then subsystem."""
    cfg.validate()
    subs = cfg.subsystem_qubits()
    labels = FAMILY_LABELS[cfg.family]
    repeats = 1 if cfg.protocol is Protocol.EXACT else cfg.repeats
    states = [prepare_state(cfg.family, t, cfg.noise_p) for t in cfg.thetas]

    tasks = [(i, r) for i in range(len(cfg.thetas)) for r in range(repeats)]

    def work(task):
        i, r = task
        seed = derive_seed(cfg.seed, i, r)
        return _estimate(cfg, states[i], subs, seed), seed

    with ThreadPoolExecutor(max_workers=_threads(cfg.threads, len(tasks))) as pool:
        results = dict(zip(tasks, pool.map(work, tasks)))

    rows: list[SweepRow] = []
    for i, theta in enumerate(cfg.thetas):
        rho = states[i]
        d = rho.shape[0]
        cre = c_re_exact(rho)
        ests = [results[(i, r)][0][0] for r in range(repeats)]
        for r in range(repeats):
            (est, raw), seed = results[(i, r)]
            if cfg.dump_shadows is not None and isinstance(raw, shadows.ShadowCollection):
                shadows.write_shadows(raw, cfg.dump_shadows)
            if cfg.dump_counts is not None and isinstance(raw, collective.BellOutcomeTable):
                collective.write_counts(raw, cfg.dump_counts, seed, theta)
        coh = [coherence_bounds(e.P_global, e.P_diag, d) for e in ests]
        for b in subs:
            ci = [coherent_info_bounds(e.P_global, e.P_marginal[b], d, 2 ** len(b)) for e in ests]
            pg = [e.P_global for e in ests]
            pm = [e.P_marginal[b] for e in ests]
            pd = [e.P_diag for e in ests]
            rows.append(
                SweepRow(
                    theta=theta,
                    protocol=cfg.protocol.value,
                    subsystem=format_subsystem(b, labels),
                    P_global=float(np.mean(pg)),
                    P_marginal=float(np.mean(pm)),
                    P_diag=float(np.mean(pd)),
                    l_e=float(np.mean([x.lower for x in ci])),
                    u_e=float(np.mean([x.upper for x in ci])),
                    i_exact=coherent_info_exact(rho, b),
                    l_c=float(np.mean([x.lower for x in coh])),
                    u_c=float(np.mean([x.upper for x in coh])),
                    cre_exact=cre,
                    P_global_err=_spread(pg, cfg.err_kind),
                    P_marginal_err=_spread(pm, cfg.err_kind),
                    P_diag_err=_spread(pd, cfg.err_kind),
                    clamped=any(x.clamped for x in ci + coh),
                )
            )
    return rows


@dataclass
class NoiseRow:
    p: float
    theta: float
    subsystem: str
    P_global: float
    P_marginal: float
    P_diag: float
    l_e: float
    u_e: float
    i_exact: float
    l_c: float
    u_c: float
    cre_exact: float


def run_noise_sweep(
    p_grid: Iterable[float],
    thetas: Iterable[float] = (math.pi / 20, 3 * math.pi / 20, 5 * math.pi / 20),
    subsystems: Iterable[str] = DEFAULT_SUBSYSTEMS[Family.GHZ_THETA],
) -> list[NoiseRow]:
    """Exact quantities and bounds for (1 - p)|GHZ_theta><GHZ_theta| + p I/16."""
    subs = [parse_subsystem(s, GHZ_LABELS) for s in subsystems]
    thetas = list(thetas)
    rows = []
    for p in p_grid:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"noise probability {p} outside [0, 1]")
        for theta in thetas:
            rho = depolarize(ghz_theta(theta), p)
            pg, pd = purity(rho), purity(dephase(rho))
            coh = coherence_bounds(pg, pd, 16)
            cre = c_re_exact(rho)
            for b in subs:
                pm = purity(partial_trace(rho, b))
                ci = coherent_info_bounds(pg, pm, 16, 2 ** len(b))
                rows.append(
                    NoiseRow(
                        p, theta, format_subsystem(b), pg, pm, pd, ci.lower, ci.upper,
                        coherent_info_exact(rho, b), coh.lower, coh.upper, cre,
                    )
                )
    return rows


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        s = f"{x:.6f}"
        return "0.000000" if s == "-0.000000" else s
    return str(x)


def _emit(rows, header: Sequence[str], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(getattr(row, h)) for h in header])


def emit_csv(rows: Sequence[SweepRow], out: str | TextIO) -> None:
    """Write sweep rows with the fixed header; floats carry six decimals."""
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            _emit(rows, CSV_HEADER, fh)
    else:
        _emit(rows, CSV_HEADER, out)


def emit_noise_csv(rows: Sequence[NoiseRow], out: str | TextIO) -> None:
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            _emit(rows, NOISE_HEADER, fh)
    else:
        _emit(rows, NOISE_HEADER, out)

