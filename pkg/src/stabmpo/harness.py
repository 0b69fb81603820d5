"""Experiment drivers, disorder averaging and file output.

Two studies are provided at configurable scale: brick-wall random Clifford
circuits doped with T gates (entanglement of the layer-evolved state vs a
gate-by-gate baseline, plus the temporal-entropy sweep) and kicked Floquet
dynamics with random magnetization-preserving Cliffords (magnetization
decay against its closed form).  Every realization draws from an RNG
stream keyed by (seed, realization_id), so subsets are stable and runs
are reproducible byte for byte.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import cos, pi, sqrt
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import (
    RotationGate,
    StabMpoCircuit,
    StabMpoCompiler,
    apply_layer,
    t_gate,
    transform_observable,
)
from .clifford import CliffordCircuit, sample_brickwall, sample_u1_clifford
from .dense import GATE_1Q, GATE_2Q, rotation_matrix, run_blocks
from .dense import expectation as dense_expectation
from .mps import Mps, TruncationPolicy
from .pauli import PauliString
from .temporal import horizontal_contract, write_temporal_csv

WORKERS_ENV = "STABMPO_WORKERS"


# ----------------------------------------------------------------------
# configs
# ----------------------------------------------------------------------
@dataclass
class TDopedConfig:
    n: int = 16
    m_layers: int = 10
    depth_d: int = 1
    chi: int = 64
    realizations: int = 20
    seed: int = 1234
    observable: str = ""
    run_baseline: bool = False
    run_temporal: bool = False

    def validate(self) -> None:
        if min(self.n, self.depth_d, self.chi, self.realizations) < 1:
            raise ValueError("all counts must be >= 1")
        # m_layers = 0 is a pure-Clifford circuit: no layers, nothing evolves
        if self.m_layers < 0:
            raise ValueError("m_layers must be >= 0")
        if self.n < 2:
            raise ValueError("need n >= 2")
        obs = self.observable_pauli()
        if not obs.is_hermitian:
            raise ValueError("observable must be Hermitian")

    def observable_pauli(self) -> PauliString:
        if not self.observable:
            return PauliString.single(self.n, self.n // 2, 3)
        p = PauliString.from_literal(self.observable)
        if p.n != self.n:
            raise ValueError("observable length does not match n")
        return p


@dataclass
class FloquetConfig:
    n: int = 12
    epsilon: float = 0.1
    periods: int = 15
    chi: int = 128
    realizations: int = 50
    seed: int = 1234

    def validate(self) -> None:
        if min(self.n, self.periods, self.chi, self.realizations) < 1:
            raise ValueError("all counts must be >= 1")
        if not 0.0 <= self.epsilon <= pi / 2:
            raise ValueError("epsilon must lie in [0, pi/2]")


# ----------------------------------------------------------------------
# sampling helpers (shared with tests and the dense oracle)
# ----------------------------------------------------------------------
def sample_tdoped_blocks(
    n: int, m_layers: int, depth_d: int, rng: np.random.Generator
) -> list[tuple[CliffordCircuit, RotationGate]]:
    """M blocks of (brick-wall Clifford, T at a uniformly random qubit).

    The brick-wall sublayer parity continues across blocks so the stacked
    circuit forms a single wall.
    """
    blocks = []
    parity = 0
    for _ in range(m_layers):
        circ = sample_brickwall(n, depth_d, rng, start_parity=parity)
        parity = (parity + depth_d) % 2
        site = int(rng.integers(n))
        blocks.append((circ, t_gate(site)))
    return blocks


def sample_floquet_blocks(
    n: int, epsilon: float, periods: int, rng: np.random.Generator
) -> list[tuple[CliffordCircuit | None, RotationGate]]:
    """Per period: one U(1) Clifford followed by N single-site X kicks."""
    blocks: list[tuple[CliffordCircuit | None, RotationGate]] = []
    for _ in range(periods):
        circ = sample_u1_clifford(n, rng)
        for j in range(n):
            blocks.append((circ if j == 0 else None, RotationGate(j, 1, pi + 2 * epsilon)))
    return blocks


def realization_rng(seed: int, realization: int) -> np.random.Generator:
    return np.random.default_rng([seed, realization])


# ----------------------------------------------------------------------
# analytic reference and replica-twirl checks
# ----------------------------------------------------------------------
def analytic_magnetization(epsilon: float, m: int) -> float:
    """Closed-form disorder-averaged magnetization (-1)^m cos(2 eps)^m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return (-1.0) ** m * cos(2 * epsilon) ** m


def s_twirl_matrix() -> np.ndarray:
    """Average of S^mu x S^mu* over mu in {0..3}: the |00>,|11> projector."""
    s = np.diag([1.0, 1j]).astype(np.complex128)
    acc = np.zeros((4, 4), dtype=np.complex128)
    power = np.eye(2, dtype=np.complex128)
    for _ in range(4):
        acc += np.kron(power, power.conj())
        power = power @ s
    return acc / 4.0


def kick_channel(epsilon: float) -> np.ndarray:
    """Projected single-site replica channel of one kicked period."""
    proj = s_twirl_matrix()
    r = rotation_matrix(1, pi + 2 * epsilon)
    return proj @ np.kron(r, r.conj()) @ proj


def twirl_s_channel_check(epsilons=(0.0, 0.1, 0.3), atol: float = 1e-12) -> bool:
    """Verify the replica-average identities behind the magnetization law.

    Checks that the phase-gate twirl equals diag(1,0,0,1), that correlated
    CZ pairs leave the projected subspace invariant, and that the kicked
    channel has eigenvalues 1 and -cos(2 eps) on |00> +- |11>.
    """
    proj = s_twirl_matrix()
    if not np.allclose(proj, np.diag([1.0, 0.0, 0.0, 1.0]), atol=atol):
        return False

    # correlated CZ on (system, replica) pairs, qubit order (c, c', t, t')
    from .dense import apply_unitary

    eye16 = np.eye(16, dtype=np.complex128)
    cz_pair = apply_unitary(
        apply_unitary(eye16, GATE_2Q["CZ"], (0, 2), 4), GATE_2Q["CZ"], (1, 3), 4
    )
    p4 = np.kron(proj, proj)
    if not np.allclose(cz_pair @ p4, p4, atol=atol):
        return False

    plus = np.array([1, 0, 0, 1], dtype=np.complex128)
    minus = np.array([1, 0, 0, -1], dtype=np.complex128)
    for eps in epsilons:
        k = kick_channel(eps)
        if not np.allclose(k @ plus, plus, atol=atol):
            return False
        if not np.allclose(k @ minus, -cos(2 * eps) * minus, atol=atol):
            return False
    return True


def dense_oracle_run(n: int, blocks, bits, observable: PauliString | None = None):
    """Full statevector run of a sampled block sequence (oracle-capped).

    Returns the final vector, or the real observable expectation when one
    is given.
    """
    state = run_blocks(blocks, bits)
    if observable is None:
        return state
    val = dense_expectation(state, observable)
    return float(val.real)


# ----------------------------------------------------------------------
# per-realization workers
# ----------------------------------------------------------------------
def _gate_matrix_1q(name: str) -> np.ndarray:
    return GATE_1Q[name]


def _evolve_baseline_gate(state: Mps, g, policy: TruncationPolicy) -> tuple[Mps, float]:
    if g.name in GATE_1Q:
        return state.apply_1q_gate(_gate_matrix_1q(g.name), g.qubits[0]), 0.0
    u = GATE_2Q[g.name]
    a, b = g.qubits
    if b != a + 1:
        raise ValueError("baseline expects adjacent two-qubit gates")
    return state.apply_2q_gate(u, a, policy)


def _tdoped_realization(cfg: TDopedConfig, realization: int) -> dict:
    rng = realization_rng(cfg.seed, realization)
    blocks = sample_tdoped_blocks(cfg.n, cfg.m_layers, cfg.depth_d, rng)
    policy = TruncationPolicy(chi_max=cfg.chi)
    obs = cfg.observable_pauli()
    bits = [0] * cfg.n

    comp = StabMpoCompiler(cfg.n)
    state = Mps.product_state(bits)
    base = Mps.product_state(bits) if cfg.run_baseline else None

    out: dict = {"realization": realization, "hybrid": [], "baseline": [], "temporal": []}
    cum = 0.0
    cum_base = 0.0
    for circ, rot in blocks:
        comp.push_clifford(circ)
        layer = comp.push_rotation(rot)
        state, err = apply_layer(state, layer, policy)
        cum += err
        nu = transform_observable(comp.tableau, obs)
        out["hybrid"].append(
            (
                state.entanglement_entropy(cfg.n // 2),
                state.expect_pauli(nu),
                state.max_bond,
                cum,
                int(state.is_zero),
            )
        )

        if base is not None:
            for g in circ.gates:
                base, gerr = _evolve_baseline_gate(base, g, policy)
                cum_base += gerr
            base = base.apply_1q_gate(
                rotation_matrix(rot.axis, rot.theta), rot.site
            )
            out["baseline"].append(
                (
                    base.entanglement_entropy(cfg.n // 2),
                    base.expect_pauli(obs),
                    base.max_bond,
                    cum_base,
                    int(base.is_zero),
                )
            )

        if cfg.run_temporal:
            snapshot = StabMpoCircuit(cfg.n, list(comp.layers), comp.tableau)
            hres = horizontal_contract(snapshot, obs, bits, policy)
            out["temporal"].append(hres.temporal_entropy_bits)
    return out


def _floquet_realization(cfg: FloquetConfig, realization: int) -> dict:
    rng = realization_rng(cfg.seed, realization)
    policy = TruncationPolicy(chi_max=cfg.chi, renormalize=True)
    theta = pi + 2 * cfg.epsilon

    comp = StabMpoCompiler(cfg.n)
    state = Mps.product_state([0] * cfg.n)
    out: dict = {"realization": realization, "steps": []}
    cum = 0.0
    for _ in range(cfg.periods):
        comp.push_clifford(sample_u1_clifford(cfg.n, rng))
        for j in range(cfg.n):
            layer = comp.push_rotation(RotationGate(j, 1, theta))
            state, err = apply_layer(state, layer, policy)
            cum += err
        mz = 0.0
        for j in range(cfg.n):
            nu = transform_observable(comp.tableau, PauliString.single(cfg.n, j, 3))
            mz += state.expect_pauli(nu)
        out["steps"].append(
            (
                mz / cfg.n,
                state.entanglement_entropy(cfg.n // 2),
                state.max_bond,
                cum,
                int(state.is_zero),
            )
        )
    return out


# ----------------------------------------------------------------------
# aggregation and file output
# ----------------------------------------------------------------------
def _worker_count() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def _run_realizations(worker, cfg, count: int) -> list[dict]:
    workers = _worker_count()
    if workers == 1:
        results = [worker(cfg, r) for r in range(count)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(worker, [cfg] * count, range(count)))
    return sorted(results, key=lambda d: d["realization"])


def mean_stderr(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if len(arr) < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / sqrt(len(arr)))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_lines(path: Path, lines) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_meta(outdir: Path, kind: str, cfg) -> None:
    lines = [f"run={kind}", f"code_version={__version__}"]
    lines += [f"{k}={_fmt(v)}" for k, v in asdict(cfg).items()]
    _write_lines(outdir / "meta.txt", lines)


@dataclass
class RunResult:
    kind: str
    config: object
    rows: list[tuple] = field(default_factory=list)
    aggregate_header: str = ""
    aggregate_rows: list[tuple] = field(default_factory=list)
    temporal_mean: np.ndarray | None = None
    outdir: Path | None = None

    def aggregate_by(self, track: str, m: int) -> tuple:
        for row in self.aggregate_rows:
            if row[0] == track and row[1] == m:
                return row
        raise KeyError((track, m))


_TRAJ_HEADER = (
    "realization,m,track,entropy_bits,observable,max_bond,"
    "cum_truncation_error,zero_state"
)
_AGG_HEADER = (
    "track,m,entropy_mean,entropy_stderr,observable_mean,observable_stderr"
)
_AGG_FLOQUET_HEADER = _AGG_HEADER + ",analytic"


def run_tdoped(cfg: TDopedConfig, outdir: str | Path | None = None) -> RunResult:
    """Run the T-doped study; write meta/trajectory/aggregate (and temporal) CSVs."""
    cfg.validate()
    results = _run_realizations(_tdoped_realization, cfg, cfg.realizations)

    rows = []
    for res in results:
        r = res["realization"]
        for m, vals in enumerate(res["hybrid"], start=1):
            rows.append((r, m, "stabmpo", *vals))
        for m, vals in enumerate(res["baseline"], start=1):
            rows.append((r, m, "baseline", *vals))

    agg_rows = []
    tracks = ["stabmpo"] + (["baseline"] if cfg.run_baseline else [])
    for track in tracks:
        key = "hybrid" if track == "stabmpo" else "baseline"
        for m in range(1, cfg.m_layers + 1):
            ent = [res[key][m - 1][0] for res in results]
            obs = [res[key][m - 1][1] for res in results]
            e_mean, e_err = mean_stderr(ent)
            o_mean, o_err = mean_stderr(obs)
            agg_rows.append((track, m, e_mean, e_err, o_mean, o_err))

    temporal_mean = None
    if cfg.run_temporal and cfg.m_layers > 0:
        stack = np.array([res["temporal"] for res in results])  # (R, m, n)
        temporal_mean = stack.mean(axis=0)

    out = RunResult("tdoped", cfg, rows, _AGG_HEADER, agg_rows, temporal_mean)
    if outdir is not None:
        _write_tdoped_files(out, Path(outdir))
    return out


def run_floquet(cfg: FloquetConfig, outdir: str | Path | None = None) -> RunResult:
    """Run the kicked Floquet study; write meta/trajectory/aggregate CSVs."""
    cfg.validate()
    results = _run_realizations(_floquet_realization, cfg, cfg.realizations)

    rows = []
    for res in results:
        r = res["realization"]
        for m, vals in enumerate(res["steps"], start=1):
            mz, ent, mb, cum, zero = vals
            rows.append((r, m, "stabmpo", ent, mz, mb, cum, zero))

    agg_rows = []
    for m in range(1, cfg.periods + 1):
        ent = [res["steps"][m - 1][1] for res in results]
        mz = [res["steps"][m - 1][0] for res in results]
        e_mean, e_err = mean_stderr(ent)
        o_mean, o_err = mean_stderr(mz)
        agg_rows.append(
            ("stabmpo", m, e_mean, e_err, o_mean, o_err,
             analytic_magnetization(cfg.epsilon, m))
        )

    out = RunResult("floquet", cfg, rows, _AGG_FLOQUET_HEADER, agg_rows)
    if outdir is not None:
        _write_floquet_files(out, Path(outdir))
    return out


def _write_trajectory(outdir: Path, rows) -> None:
    lines = [_TRAJ_HEADER]
    for r, m, track, ent, obs, mb, cum, zero in rows:
        lines.append(
            f"{r},{m},{track},{_fmt(float(ent))},{_fmt(float(obs))},"
            f"{int(mb)},{_fmt(float(cum))},{int(zero)}"
        )
    _write_lines(outdir / "trajectory.csv", lines)


def _write_aggregate(outdir: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        track, m, *vals = row
        lines.append(",".join([track, str(m)] + [_fmt(float(v)) for v in vals]))
    _write_lines(outdir / "aggregate.csv", lines)


def _write_tdoped_files(res: RunResult, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    _write_meta(outdir, "tdoped", res.config)
    _write_trajectory(outdir, res.rows)
    _write_aggregate(outdir, res.aggregate_header, res.aggregate_rows)
    if res.temporal_mean is not None:
        write_temporal_csv(outdir / "temporal.csv", res.temporal_mean)
    res.outdir = outdir


def _write_floquet_files(res: RunResult, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    _write_meta(outdir, "floquet", res.config)
    _write_trajectory(outdir, res.rows)
    _write_aggregate(outdir, res.aggregate_header, res.aggregate_rows)
    res.outdir = outdir


# ----------------------------------------------------------------------
# config files
# ----------------------------------------------------------------------
def parse_config_file(path: str | Path) -> dict:
    """Flat key=value file; '#' starts a comment, blank lines are skipped."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def config_from_sources(cls, file_values: dict, overrides: dict):
    """Build a config dataclass from file values plus CLI overrides."""
    import dataclasses

    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    for key, val in merged.items():
        if key not in fields:
            raise ValueError(f"unknown config key {key!r}")
        ftype = fields[key].type
        if isinstance(val, str):
            if ftype in ("int", int):
                val = int(val)
            elif ftype in ("float", float):
                val = float(val)
            elif ftype in ("bool", bool):
                val = val.lower() in ("1", "true", "yes", "on")
        kwargs[key] = val
    return cls(**kwargs)
