"""Pre-wired experiments: dichromatic two-mode emission, exceptional-point
protected synchronization of two spins, the coupling-angle/temperature phase
scan, and collision-map vs master-equation benchmarks.

Every run is a pure function of its configuration dictionary; there is no
randomness anywhere in the pipeline.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .linalg import dag, expm, kron
from .collision import (
    CollisionSchedule,
    Trajectory,
    build_gates,
    apply_gate,
    joint_hamiltonian,
    make_slot,
)
from .master import (
    euler_step,
    incoherent_action,
    photon_dissipator,
    qme_generator,
)
from .liouville import vec, unvec, vectorize
from .observables import g2, pearson, ZeroVariance
from .reservoir import ReservoirQubitSpec
from .systems import (
    photon_sector,
    spin_ops,
    three_level_model,
    transition_table,
    two_level_model,
    two_spin_model,
)


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


DEFAULTS = {
    "single_qubit": {
        "name": "single_qubit",
        "scenario": "single_qubit",
        "engine": "qme",
        "model": {"omega": 1.0},
        "reservoir": {"theta_q": 0.0, "beta": 1.0, "theta_c": math.pi / 2},
        "schedule": {"g": 1.0, "t_bar": 0.05, "periods": 20000,
                     "shift_enabled": True, "coupling": "resonant"},
        "initial_state": {"type": "maximally_mixed"},
        "recording": {"stride": 10, "store_states": False},
        "integrator": {"kind": "exact", "substeps": 1},
        "spectrum": {"source": "period_average"},
    },
    "dichromatic": {
        "name": "dichromatic",
        "scenario": "dichromatic",
        "engine": "collision",
        "model": {"omega10": 1.0, "omega21": 1.0},
        "photon": {"cutoff": 2, "g_int": 0.4, "kappa": 0.1},
        "reservoir": {"theta_q": math.pi / 6, "beta": 1.0, "theta_c": math.pi / 3},
        "schedule": {"g": 1.0, "t_bar": 0.05, "periods": 1334,
                     "shift_enabled": True, "coupling": "resonant"},
        "initial_state": {"type": "ground_vacuum"},
        "recording": {"stride": 10, "store_states": False},
        "integrator": {"kind": "euler", "substeps": 1},
        "g2": {"pairs": [[1, 1], [2, 2], [1, 2]], "ordering": "normal",
               "lags": [0, 2, 4, 8, 16, 28, 40, 60, 80, 120, 160, 240, 320,
                        480, 600, 900, 1200, 1600, 2000, 2600, 3200, 4000]},
        "spectrum": {"source": "period_average"},
    },
    "qs": {
        "name": "qs",
        "scenario": "qs",
        "engine": "qme",
        "model": {"j_coupling": 0.2, "h_x": 0.5, "h_z": 1.0},
        "reservoir": {"theta_q": 0.55, "beta": 1.0, "phi0": math.pi / 3},
        "schedule": {"g": 2.0, "t_bar": 0.05, "periods": 20000,
                     "shift_enabled": True, "coupling": "resonant"},
        "initial_state": {"type": "antiparallel"},
        "recording": {"stride": 1, "store_states": False},
        "integrator": {"kind": "exact", "substeps": 1},
        "pearson": {"window": 2000},
        "spectrum": {"source": "period_average"},
    },
}


def default_config(scenario):
    import copy
    if scenario not in DEFAULTS:
        raise ConfigError("scenario", f"unknown scenario {scenario!r}")
    return copy.deepcopy(DEFAULTS[scenario])


def merge_config(config):
    """Fill a partial config with scenario defaults and validate."""
    import copy
    scenario = config.get("scenario")
    if scenario not in DEFAULTS:
        raise ConfigError("scenario", f"unknown or missing scenario {scenario!r}")
    merged = copy.deepcopy(DEFAULTS[scenario])
    for key, val in config.items():
        if isinstance(val, dict) and isinstance(merged.get(key), dict):
            merged[key].update(val)
        else:
            merged[key] = val
    _validate(merged)
    return merged


def _require(cond, field, message):
    if not cond:
        raise ConfigError(field, message)


def _validate(cfg):
    sch = cfg["schedule"]
    _require(sch["t_bar"] > 0, "t_bar", f"must be > 0, got {sch['t_bar']}")
    _require(sch["g"] >= 0, "g", f"must be >= 0, got {sch['g']}")
    _require(int(sch["periods"]) >= 0, "periods", "must be >= 0")
    res = cfg["reservoir"]
    _require(res["beta"] >= 0, "beta", f"must be >= 0, got {res['beta']}")
    _require(not isinstance(res["theta_q"], complex), "theta_q", "must be real")
    _require(cfg["engine"] in ("collision", "qme", "both"), "engine",
             f"must be collision|qme|both, got {cfg['engine']!r}")
    if cfg["scenario"] == "dichromatic":
        _require(cfg["photon"]["cutoff"] >= 1, "cutoff", "must be >= 1")
        _require(cfg["photon"]["kappa"] >= 0, "kappa", "must be >= 0")
        for key in ("omega10", "omega21"):
            _require(cfg["model"][key] > 0, key, "must be > 0")
    if cfg["scenario"] == "single_qubit":
        _require(cfg["model"]["omega"] > 0, "omega", "must be > 0")
    if cfg["scenario"] == "qs":
        _require(cfg["pearson"]["window"] >= 2, "window", "must be >= 2")


# ---------------------------------------------------------------------------
# setup assembly


def _qs_theta_c(transition, phi0, theta_q):
    # the modulated angle applies to the ground <-> first-excited transition;
    # every other slot sits at the angle whose sine equals tanh(theta_q)
    if (transition[0], transition[1]) == (0, 1):
        return phi0
    return math.asin(math.tanh(theta_q))


def build_setup(cfg):
    """Model, coupling operator, slots and schedule for a config."""
    res, sch = cfg["reservoir"], cfg["schedule"]
    scenario = cfg["scenario"]
    if scenario == "single_qubit":
        model, a_op = two_level_model(cfg["model"]["omega"])
        angles = lambda tr: res["theta_c"]
    elif scenario == "dichromatic":
        model, a_op = three_level_model(cfg["model"]["omega10"], cfg["model"]["omega21"])
        angles = lambda tr: res["theta_c"]
    elif scenario == "qs":
        model = two_spin_model(cfg["model"]["j_coupling"], cfg["model"]["h_x"],
                               cfg["model"]["h_z"])
        a_op = spin_ops(0)[0]
        angles = lambda tr: _qs_theta_c(tr, res["phi0"], res["theta_q"])
    else:
        raise ConfigError("scenario", f"unknown scenario {scenario!r}")

    table = transition_table(model)
    slots = []
    for tr in table:
        spec = ReservoirQubitSpec(
            omega=tr[2], theta_q=res["theta_q"], beta=res["beta"],
            theta_c=angles(tr))
        slots.append(make_slot(spec, a_op, model, tr))
    schedule = CollisionSchedule(
        slots=slots, g=sch["g"], t_bar=sch["t_bar"], periods=int(sch["periods"]),
        shift_enabled=sch.get("shift_enabled", True),
        coupling=sch.get("coupling", "resonant"))

    sector = None
    if scenario == "dichromatic":
        ph = cfg["photon"]
        sector = photon_sector(cfg["model"]["omega21"], cfg["model"]["omega10"],
                               int(ph["cutoff"]), ph["g_int"], ph["kappa"])
    return model, a_op, schedule, sector


def initial_state(cfg, model, sector=None):
    desc = cfg["initial_state"]
    kind = desc.get("type")
    scenario = cfg["scenario"]
    if scenario == "qs":
        up = np.array([1.0, 0.0], dtype=complex)
        down = np.array([0.0, 1.0], dtype=complex)
        if kind == "antiparallel":
            psi = kron_vec(up, down)
        elif kind == "relative_angle":
            ang = float(desc["angle"])
            n2 = np.array([math.cos(ang / 2), math.sin(ang / 2)], dtype=complex)
            psi = kron_vec(up, n2)
        else:
            raise ConfigError("initial_state", f"unknown type {kind!r} for qs")
        return np.outer(psi, psi.conj())
    if scenario == "dichromatic":
        if kind != "ground_vacuum":
            raise ConfigError("initial_state", f"unknown type {kind!r} for dichromatic")
        dim = model.dim * sector.dim
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    if scenario == "single_qubit":
        if kind == "maximally_mixed":
            return np.eye(2, dtype=complex) / 2
        if kind == "excited":
            return np.diag([0.0, 1.0]).astype(complex)
        if kind == "ground":
            return np.diag([1.0, 0.0]).astype(complex)
        raise ConfigError("initial_state", f"unknown type {kind!r} for single_qubit")
    raise ConfigError("scenario", f"unknown scenario {scenario!r}")


def kron_vec(a, b):
    return np.kron(a, b)


def slot_manifest(schedule: CollisionSchedule):
    """Derived per-slot constants for the run manifest."""
    rows = []
    for k, slot in enumerate(schedule.slots):
        sp = slot.spectral
        rows.append({
            "slot": k,
            "transition": list(slot.transition),
            "omega": slot.qubit.omega,
            "theta_c": slot.qubit.theta_c,
            "gamma_plus": sp.gamma_plus,
            "gamma_minus": sp.gamma_minus,
            "gammabar_plus": sp.gammabar_plus,
            "gammabar_minus": sp.gammabar_minus,
            "delta_plus": sp.delta_plus,
            "delta_minus": sp.delta_minus,
            "b_ab": sp.b_ab,
            "b_ba": sp.b_ba,
            "w_a": sp.w_a,
            "w_b": sp.w_b,
            "beta_bar": sp.beta_bar,
            "mu_b": complex(slot.mu_b).real,
        })
    return rows


# ---------------------------------------------------------------------------
# master-equation engines


def qme_generators(cfg, model, schedule, sector=None):
    """One GeneratorSlot per schedule slot (photon damping included)."""
    gens = []
    for slot in schedule.slots:
        if sector is None:
            gen = qme_generator(model, slot, schedule.g, schedule.t_bar)
        else:
            ipp = np.eye(sector.dim, dtype=complex)
            gen = qme_generator(
                model, slot, schedule.g, schedule.t_bar,
                h_coherent=joint_hamiltonian(model, sector),
                lift=lambda m: kron(m, ipp))
            i_s = np.eye(model.dim, dtype=complex)
            gen.extra_lindblads = [
                (kron(i_s, sector.p1), sector.kappa),
                (kron(i_s, sector.p2), sector.kappa),
            ]
        gens.append(gen)
    return gens


def make_qme_stepper(cfg, gens, t_bar):
    """Stepper (rho, n) -> rho cycling per-slot generators.

    Small spaces use the exact per-slot propagator of the vectorized
    generator; larger ones (or integrator.kind='euler') use the split-step
    form of ``euler_step``.
    """
    kind = cfg.get("integrator", {}).get("kind", "exact")
    substeps = int(cfg.get("integrator", {}).get("substeps", 1))
    dim = gens[0].h_coherent.shape[0]
    if kind == "exact" and dim <= 8:
        props = [expm(t_bar * vectorize(g).matrix) for g in gens]

        def step(rho, n):
            return unvec(props[n % len(props)] @ vec(rho))
        return step

    uc = expm(-1j * gens[0].h_coherent * (t_bar / substeps))
    ucd = dag(uc)

    def step(rho, n):
        gen = gens[n % len(gens)]
        dt = t_bar / substeps
        for _ in range(substeps):
            rho = uc @ (rho + dt * incoherent_action(rho, gen)) @ ucd
        return rho
    return step


def make_collision_stepper(cfg, model, schedule, sector=None):
    """Stepper (rho, n) -> rho applying the cached per-slot collision gates."""
    if sector is None:
        gates = build_gates(model.h_s, schedule)
        dim = model.dim

        def step(rho, n):
            k = n % len(gates)
            return apply_gate(rho, gates[k], schedule.slots[k].rho_q, dim)
        return step

    ipp = np.eye(sector.dim, dtype=complex)
    h_sp = joint_hamiltonian(model, sector)
    gates = build_gates(h_sp, schedule, sys_lift=lambda m: kron(m, ipp))
    dim = model.dim * sector.dim
    t_bar = schedule.t_bar

    def step(rho, n):
        k = n % len(gates)
        rho = apply_gate(rho, gates[k], schedule.slots[k].rho_q, dim)
        return rho + t_bar * photon_dissipator(rho, sector, model.dim)
    return step


def run_stepper(stepper, rho0, n_collisions, t_bar, observables, stride=1,
                store_states=False) -> Trajectory:
    """Drive any stepper, recording normalized observables every ``stride``."""
    rho = np.asarray(rho0, dtype=complex).copy()
    record = set(range(0, n_collisions + 1, stride)) | {n_collisions}
    steps, times, traces = [], [], []
    series = {name: [] for name in observables}
    states = [] if store_states else None

    def snapshot(n):
        tr = complex(np.trace(rho)).real
        steps.append(n)
        times.append(n * t_bar)
        traces.append(tr)
        for name, op in observables.items():
            series[name].append(float(np.real(np.trace(rho @ op))) / tr)
        if store_states:
            states.append(rho.copy())

    snapshot(0)
    for n in range(n_collisions):
        rho = stepper(rho, n)
        if (n + 1) in record:
            snapshot(n + 1)
    traj = Trajectory(
        steps=np.array(steps), times=np.array(times), traces=np.array(traces),
        observables={k: np.array(v) for k, v in series.items()}, states=states)
    traj.final_state = rho
    return traj


# ---------------------------------------------------------------------------
# scenario runs


def _engines(cfg):
    return ("collision", "qme") if cfg["engine"] == "both" else (cfg["engine"],)


def qs_run(config):
    """Two-spin synchronization run; returns trajectories and window stats."""
    cfg = merge_config(config)
    if cfg["scenario"] != "qs":
        raise ConfigError("scenario", "qs_run requires scenario='qs'")
    model, a_op, schedule, _ = build_setup(cfg)
    rho0 = initial_state(cfg, model)
    sx1, sy1, sz1 = spin_ops(0)
    sx2 = spin_ops(1)[0]
    observables = {"sx1": sx1, "sx2": sx2, "sy1": sy1, "sz1": sz1}
    window = int(cfg["pearson"]["window"])
    stride = int(cfg["recording"]["stride"])
    n_coll = schedule.n_collisions

    results = {"config": cfg, "slots": slot_manifest(schedule)}
    for engine in _engines(cfg):
        if engine == "collision":
            stepper = make_collision_stepper(cfg, model, schedule)
        else:
            gens = qme_generators(cfg, model, schedule)
            stepper = make_qme_stepper(cfg, gens, schedule.t_bar)
        traj = run_stepper(stepper, rho0, n_coll, schedule.t_bar, observables,
                           stride=stride,
                           store_states=cfg["recording"].get("store_states", False))
        traj.observables["c12"] = rolling_pearson(
            traj.observables["sx1"], traj.observables["sx2"], window, stride)
        results[engine] = traj
    primary = results[_engines(cfg)[0]]
    a = primary.observables["sx1"]
    w_samples = max(2, window // stride)
    results["c12_final"] = _safe_pearson(
        a[-w_samples:], primary.observables["sx2"][-w_samples:])
    results["amplitude_final"] = float(
        (a[-w_samples:].max() - a[-w_samples:].min()) / 2)
    return results


def rolling_pearson(x, y, window, stride=1):
    """Pearson over the window starting at each recorded step (NaN when the
    window does not fit or a variance degenerates)."""
    w = max(2, window // max(1, stride))
    out = np.full(len(x), np.nan)
    for k in range(0, len(x) - w + 1):
        try:
            out[k] = pearson(x[k:k + w], y[k:k + w])
        except ZeroVariance:
            out[k] = np.nan
    return out


def _safe_pearson(x, y):
    try:
        return pearson(x, y)
    except ZeroVariance:
        return float("nan")


def dichromatic_run(config):
    """Three-level two-mode emission run with photon-number trajectories and
    second-order correlation curves at the final step."""
    cfg = merge_config(config)
    if cfg["scenario"] != "dichromatic":
        raise ConfigError("scenario", "dichromatic_run requires scenario='dichromatic'")
    model, a_op, schedule, sector = build_setup(cfg)
    rho0 = initial_state(cfg, model, sector)
    i_s = np.eye(model.dim, dtype=complex)
    p1 = kron(i_s, sector.p1)
    p2 = kron(i_s, sector.p2)
    observables = {"n1": dag(p1) @ p1, "n2": dag(p2) @ p2}
    n_coll = schedule.n_collisions
    stride = int(cfg["recording"]["stride"])

    results = {"config": cfg, "slots": slot_manifest(schedule)}
    steppers = {}
    for engine in _engines(cfg):
        if engine == "collision":
            steppers[engine] = make_collision_stepper(cfg, model, schedule, sector)
        else:
            gens = qme_generators(cfg, model, schedule, sector)
            steppers[engine] = make_qme_stepper(cfg, gens, schedule.t_bar)
        results[engine] = run_stepper(
            steppers[engine], rho0, n_coll, schedule.t_bar, observables, stride=stride)

    primary = _engines(cfg)[0]
    g2cfg = cfg["g2"]
    mode_ops = {1: p1, 2: p2}
    curves = []
    for pair in g2cfg["pairs"]:
        x1, x2 = int(pair[0]), int(pair[1])
        curves.append(g2(
            results[primary].final_state, mode_ops[x1], mode_ops[x2],
            g2cfg["lags"], steppers[primary], n_base=n_coll,
            ordering=g2cfg.get("ordering", "normal"), pair=(x1, x2)))
    results["g2"] = curves
    return results


def single_qubit_run(config):
    """Minimal one-transition run; reports the stationary population flux."""
    cfg = merge_config(config)
    if cfg["scenario"] != "single_qubit":
        raise ConfigError("scenario", "single_qubit_run requires scenario='single_qubit'")
    model, a_op, schedule, _ = build_setup(cfg)
    rho0 = initial_state(cfg, model)
    observables = {
        "chi_plus": np.diag([0.0, 1.0]).astype(complex),
        "chi_minus": np.diag([1.0, 0.0]).astype(complex),
    }
    results = {"config": cfg, "slots": slot_manifest(schedule)}
    for engine in _engines(cfg):
        if engine == "collision":
            stepper = make_collision_stepper(cfg, model, schedule)
        else:
            gens = qme_generators(cfg, model, schedule)
            stepper = make_qme_stepper(cfg, gens, schedule.t_bar)
        results[engine] = run_stepper(
            stepper, rho0, schedule.n_collisions, schedule.t_bar, observables,
            stride=int(cfg["recording"]["stride"]))
    primary = results[_engines(cfg)[0]]
    sp = schedule.slots[0].spectral
    chi_p = primary.observables["chi_plus"][-1]
    chi_m = primary.observables["chi_minus"][-1]
    results["flux"] = sp.delta_plus * chi_p + sp.delta_minus * chi_m
    results["population_ratio"] = chi_p / chi_m
    return results


def run_scenario(config):
    cfg = merge_config(config)
    return {
        "qs": qs_run,
        "dichromatic": dichromatic_run,
        "single_qubit": single_qubit_run,
    }[cfg["scenario"]](cfg)


# ---------------------------------------------------------------------------
# scans and benchmarks


def _scan_point(args):
    base, phi0, beta, steps = args
    import copy
    cfg = copy.deepcopy(base)
    cfg["reservoir"]["phi0"] = phi0
    cfg["reservoir"]["beta"] = beta
    n_q = 6
    cfg["schedule"]["periods"] = max(1, int(round(steps / n_q)))
    out = qs_run(cfg)
    return {
        "phi0": phi0,
        "beta": beta,
        "temperature": (1.0 / beta) if beta > 0 else float("inf"),
        "steps": out["config"]["schedule"]["periods"] * n_q,
        "amplitude": out["amplitude_final"],
        "c12": out["c12_final"],
    }


def phase_scan(config, workers=1):
    """Amplitude map over (phi0, beta) grid points, merged by grid index."""
    cfg = merge_config(config)
    scan = cfg.get("scan") or {}
    phi0s = scan.get("phi0", [cfg["reservoir"]["phi0"]])
    betas = scan.get("beta")
    if betas is None and "T" in scan:
        betas = [1.0 / t if t > 0 else 50.0 for t in scan["T"]]
    if betas is None:
        betas = [cfg["reservoir"]["beta"]]
    steps = int(scan.get("steps", 50000))
    points = [(cfg, p, b, steps) for p in phi0s for b in betas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_point, points))
    else:
        rows = [_scan_point(p) for p in points]
    threshold = float(scan.get("amplitude_threshold", 1e-3))
    for row in rows:
        row["in_qs_region"] = bool(row["amplitude"] > threshold)
    return rows


def benchmark_map_vs_qme(config):
    """Max deviation of an observable between the two engines per sweep point."""
    cfg = merge_config(config)
    bench = cfg.get("bench") or {}
    parameter = bench.get("parameter", "g")
    if parameter not in ("g", "t_bar"):
        raise ConfigError("bench.parameter", f"must be g|t_bar, got {parameter!r}")
    values = bench.get("values") or ([1.0, 0.5, 0.25] if parameter == "g"
                                     else [0.2, 0.1, 0.05])
    steps = int(bench.get("steps", 4000))
    observable = bench.get("observable", "sx1")
    rows = []
    for val in values:
        import copy
        point = copy.deepcopy(cfg)
        point["engine"] = "both"
        point["schedule"][parameter] = val
        if parameter == "g" and "t_bar" in bench:
            point["schedule"]["t_bar"] = bench["t_bar"]
        if parameter == "t_bar" and "g" in bench:
            point["schedule"]["g"] = bench["g"]
        point["schedule"]["periods"] = max(1, int(round(steps / 6)))
        point["recording"] = {"stride": 1, "store_states": False}
        out = qs_run(point)
        a = out["collision"].observables[observable]
        b = out["qme"].observables[observable]
        rows.append({
            "parameter": parameter,
            "sweep_value": val,
            "steps": len(a) - 1,
            "max_dev": float(np.max(np.abs(a - b))),
        })
    return rows
