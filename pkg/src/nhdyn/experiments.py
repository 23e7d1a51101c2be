"""Experiment configuration, execution and the figure presets.

An :class:`ExperimentConfig` names a model, its parameters, the dephasing
rates, the initial states, a time grid and the outputs to compute.
:func:`run_experiment` turns it into a :class:`ResultBundle`; numerical
failures of individual outputs are recorded in ``bundle.errors`` and never
abort the remaining outputs.
"""

import dataclasses
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics, models, states
from ._accel import backend_name
from .closed_system import classify_regime, evolve_closed
from .errors import ConfigError, NHDynError
from .metrics import ExtractionKind, MetricKind, Trajectory
from .open_system import (DephasingConfig, evolve_open, freezing_diagnostic,
                          liouvillian_spectrum, relaxation_time_open, spectrum_sweep)

VERSION = "0.1.0"

MODELS = ("PT2", "APT2", "APTGeneralN", "Custom")
OUTPUTS = ("trace_distance", "concurrence", "regime", "liouvillian_spectrum",
           "freezing", "extraction")
EXTRACTIONS = ("auto", "period", "relax")
SPECTRUM_CHANNELS = ("local", "collective")
EP_MARGIN = 1e-3

SWEEPABLE = ("a", "b", "theta", "kappa", "s", "gamma_local", "gamma_collective",
             "t_max", "dt")

WORKERS_ENV = "NHDYN_WORKERS"


def _encode_matrix(m):
    m = np.asarray(m, dtype=np.complex128)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _decode_matrix(obj, what):
    try:
        if isinstance(obj, dict):
            m = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
        else:
            m = np.asarray(obj, dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: cannot read matrix ({exc})") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"{what}: expected a square matrix, got shape {m.shape}")
    return m


def _state_spec(obj, what):
    """A named state (``str``) or a custom matrix (nested lists / re-im dict)."""
    if isinstance(obj, str):
        if obj not in states.STATE_NAMES:
            raise ConfigError(f"{what}: unknown state {obj!r}; choose from {states.STATE_NAMES}")
        return obj
    return _decode_matrix(obj, what)


def _state_equal(x, y):
    if isinstance(x, str) or isinstance(y, str):
        return x == y if isinstance(x, str) and isinstance(y, str) else False
    return x.shape == y.shape and np.array_equal(x, y)


@dataclass
class InitialStates:
    """``pair`` feeds the trace distance, ``single`` the concurrence."""

    pair: tuple = ("up_up", "down_down")
    single: object = "bell"

    def to_dict(self):
        enc = (lambda s: s if isinstance(s, str) else _encode_matrix(s))
        return {"pair": [enc(s) for s in self.pair], "single": enc(self.single)}

    @classmethod
    def from_dict(cls, d):
        d = dict(d or {})
        unknown = set(d) - {"pair", "single"}
        if unknown:
            raise ConfigError(f"initial_states: unknown keys {sorted(unknown)}")
        pair = d.get("pair", ["up_up", "down_down"])
        if len(pair) != 2:
            raise ConfigError("initial_states.pair needs exactly two states")
        return cls(tuple(_state_spec(s, "initial_states.pair") for s in pair),
                   _state_spec(d.get("single", "bell"), "initial_states.single"))

    def __eq__(self, other):
        return (isinstance(other, InitialStates)
                and all(_state_equal(x, y) for x, y in zip(self.pair, other.pair))
                and _state_equal(self.single, other.single))


@dataclass
class SpectrumScan:
    """Liouvillian spectra over ``gammas`` on ``channel`` dephasing."""

    gammas: tuple
    channel: str = "collective"

    def __post_init__(self):
        self.gammas = tuple(float(g) for g in self.gammas)
        if not self.gammas:
            raise ConfigError("spectrum.gammas must be non-empty")
        if any(g < 0 or not np.isfinite(g) for g in self.gammas):
            raise ConfigError("spectrum.gammas must be finite and nonnegative")
        if self.channel not in SPECTRUM_CHANNELS:
            raise ConfigError(f"spectrum.channel must be one of {SPECTRUM_CHANNELS}")


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one run.

    ``parameters`` holds ``a`` (PT2), ``b`` (APT2), or ``b, theta, kappa, s,
    n_qubits`` (APTGeneralN).  ``matrix`` is only used by the Custom model.
    """

    name: str
    model: str
    parameters: dict = field(default_factory=dict)
    dephasing: DephasingConfig = field(default_factory=DephasingConfig)
    initial_states: InitialStates = field(default_factory=InitialStates)
    t_max: float = 20.0
    dt: float = 0.01
    outputs: tuple = ("trace_distance", "concurrence")
    extraction: str = "auto"
    spectrum: SpectrumScan | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODELS}")
        self.parameters = {k: float(v) for k, v in dict(self.parameters).items()}
        self.outputs = tuple(self.outputs)
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise ConfigError(f"unknown outputs {bad}; choose from {OUTPUTS}")
        if self.extraction not in EXTRACTIONS:
            raise ConfigError(f"extraction must be one of {EXTRACTIONS}")
        self.t_max = float(self.t_max)
        self.dt = float(self.dt)
        if not (self.dt > 0 and self.t_max > 0 and self.dt < self.t_max):
            raise ConfigError(f"need 0 < dt < t_max, got dt={self.dt}, t_max={self.t_max}")
        required = {"PT2": ("a",), "APT2": ("b",), "APTGeneralN": ("b", "n_qubits"),
                    "Custom": ()}[self.model]
        missing = [k for k in required if k not in self.parameters]
        if missing:
            raise ConfigError(f"model {self.model} needs parameters {missing}")
        if self.model == "Custom":
            if self.matrix is None:
                raise ConfigError("Custom model needs a matrix")
            self.matrix = _decode_matrix(self.matrix, "matrix")
        if not all(np.isfinite(v) for v in self.parameters.values()):
            raise ConfigError("parameters must be finite")

    @property
    def ep_adjacent(self):
        """True when the model sits within 1e-3 of its exceptional point."""
        key = {"PT2": "a", "APT2": "b", "APTGeneralN": "b"}.get(self.model)
        return key is not None and abs(abs(self.parameters[key]) - 1.0) < EP_MARGIN

    def hamiltonian(self):
        p = self.parameters
        if self.model == "PT2":
            return models.pt_two_qubit(p["a"])
        if self.model == "APT2":
            return models.apt_two_qubit(p["b"])
        if self.model == "APTGeneralN":
            n = int(p["n_qubits"])
            if n != p["n_qubits"] or n < 1:
                raise ConfigError("n_qubits must be a positive integer")
            return models.apt_general(n, p["b"], p.get("theta", 0.0), p.get("kappa", 1.0),
                                      p.get("s", 0.0))
        try:
            return models.QubitHamiltonian(self.matrix)
        except ValueError as exc:
            raise ConfigError(f"custom matrix: {exc}") from exc

    def with_value(self, param, value):
        """Copy with one sweepable field replaced."""
        if param not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {param!r}; choose from {SWEEPABLE}")
        value = float(value)
        if param in ("t_max", "dt"):
            return dataclasses.replace(self, **{param: value})
        if param == "gamma_collective":
            deph = DephasingConfig(self.dephasing.gammas_local, value)
            return dataclasses.replace(self, dephasing=deph)
        if param == "gamma_local":
            n = self.hamiltonian().n_qubits
            deph = DephasingConfig((value,) * n, self.dephasing.gamma_collective)
            return dataclasses.replace(self, dephasing=deph)
        if param not in self.parameters and not (
                self.model == "APTGeneralN" and param in ("theta", "kappa", "s")):
            raise ConfigError(f"model {self.model} has no parameter {param!r}")
        params = dict(self.parameters)
        params[param] = value
        return dataclasses.replace(self, parameters=params)

    def to_dict(self):
        d = {
            "name": self.name,
            "model": self.model,
            "parameters": dict(self.parameters),
            "dephasing": {"gammas_local": list(self.dephasing.gammas_local),
                          "gamma_collective": self.dephasing.gamma_collective},
            "initial_states": self.initial_states.to_dict(),
            "t_max": self.t_max,
            "dt": self.dt,
            "outputs": list(self.outputs),
            "extraction": self.extraction,
        }
        if self.spectrum is not None:
            d["spectrum"] = {"gammas": list(self.spectrum.gammas),
                             "channel": self.spectrum.channel}
        if self.matrix is not None:
            d["matrix"] = _encode_matrix(self.matrix)
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
        for key in ("name", "model"):
            if key not in d:
                raise ConfigError(f"configuration is missing {key!r}")
        kw = dict(d)
        deph = kw.get("dephasing") or {}
        try:
            kw["dephasing"] = DephasingConfig(tuple(deph.get("gammas_local", ())),
                                              deph.get("gamma_collective", 0.0))
        except (ValueError, TypeError, AttributeError) as exc:
            raise ConfigError(f"dephasing: {exc}") from exc
        kw["initial_states"] = InitialStates.from_dict(kw.get("initial_states"))
        if kw.get("spectrum") is not None:
            spec = kw["spectrum"]
            kw["spectrum"] = SpectrumScan(tuple(spec.get("gammas", ())),
                                          spec.get("channel", "collective"))
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        mine, theirs = self.to_dict(), other.to_dict()
        return mine == theirs


@dataclass
class ErrorRecord:
    output: str
    kind: str
    message: str


@dataclass
class ResultBundle:
    config: ExperimentConfig
    trajectories: dict = field(default_factory=dict)
    extractions: dict = field(default_factory=dict)
    predictions: dict = field(default_factory=dict)
    regime: object = None
    spectra: list | None = None
    freezing: float | None = None
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.errors

    def to_dict(self):
        def extraction(r):
            return {"kind": r.kind.value, "value": r.value, "fit_quality": r.fit_quality,
                    "window": list(r.window), "flagged": r.flagged, "note": r.note}

        out = {
            "config": self.config.to_dict(),
            "trajectories": {k: {"t": v.times.tolist(), "value": v.values.tolist()}
                             for k, v in self.trajectories.items()},
            "extractions": {k: extraction(v) for k, v in self.extractions.items()},
            "predictions": dict(self.predictions),
            "errors": [dataclasses.asdict(e) for e in self.errors],
            "warnings": list(self.warnings),
            "provenance": dict(self.provenance),
        }
        if self.regime is not None:
            r = self.regime
            out["regime"] = {"kind": r.kind.value, "period": r.period,
                             "relax_rate": r.relax_rate, "delta_e": r.delta_e,
                             "delta_gamma": r.delta_gamma}
        if self.spectra is not None:
            out["spectra"] = [spectrum_row_dict(row) for row in self.spectra]
        if self.freezing is not None:
            out["freezing"] = self.freezing
        return out


def spectrum_row_dict(row):
    return {"gamma": row.gamma, "real_parts": np.asarray(row.real_parts).tolist(),
            "gap": row.gap, "delta_eta": row.delta_eta, "error": row.error}


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch is not None else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def _provenance():
    return {"engine": "nhdyn", "version": VERSION, "backend": backend_name(),
            "timestamp": _timestamp()}


def _record(bundle, output, exc):
    kind = getattr(exc, "kind", "error")
    bundle.errors.append(ErrorRecord(output, kind, str(exc)))


def _evolve(h, deph, rho0, cfg):
    if deph.is_zero:
        return evolve_closed(h, rho0, cfg.t_max, cfg.dt)
    return evolve_open(h, deph, rho0, cfg.t_max, cfg.dt)


def _resolve_state(spec, n_qubits):
    try:
        if isinstance(spec, str):
            return states.named_state(spec, n_qubits)
        rho = states.check_density_matrix(spec)
    except ValueError as exc:
        raise ConfigError(f"initial state: {exc}") from exc
    if rho.shape[0] != 2 ** n_qubits:
        raise ConfigError(f"initial state has shape {rho.shape}, model needs {2 ** n_qubits}")
    return rho


def _scan_dephasing(channel, n_qubits):
    if channel == "local":
        return lambda g: DephasingConfig.local(n_qubits, g)
    return DephasingConfig.collective


def _extraction_kind(cfg, h, deph):
    if cfg.extraction == "period":
        return ExtractionKind.PERIOD
    if cfg.extraction == "relax":
        return ExtractionKind.RELAX_TIME
    # oscillating Hamiltonians keep a (damped) period under dephasing
    if classify_regime(h).relax_rate is None:
        return ExtractionKind.PERIOD
    return ExtractionKind.RELAX_TIME


def predicted_value(cfg, kind):
    """Analytic counterpart of an extracted fingerprint.

    Periods are ``2 pi / |dE|`` of the Hamiltonian, also for open runs where
    they serve as the undamped reference.  Relaxation times are
    ``1 / dGamma`` for closed runs and ``1 / gap`` of the Liouvillian for open
    runs.
    """
    h = cfg.hamiltonian()
    if kind == ExtractionKind.PERIOD:
        return classify_regime(h).period
    if cfg.dephasing.is_zero:
        rate = classify_regime(h).relax_rate
        return None if rate is None else 1.0 / rate
    return relaxation_time_open(liouvillian_spectrum(h, cfg.dephasing))


def run_experiment(cfg):
    """Compute every requested output of ``cfg``.  Deterministic."""
    bundle = ResultBundle(cfg, provenance=_provenance())
    if cfg.ep_adjacent:
        bundle.warnings.append("parameters lie within 1e-3 of the exceptional point")
    try:
        h = cfg.hamiltonian()
    except (NHDynError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    n = h.n_qubits
    deph = cfg.dephasing
    try:
        deph.jump_operators(n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    wanted = set(cfg.outputs)
    need_traj = wanted & {"trace_distance", "concurrence", "extraction"}
    metric_list = [m for m in ("trace_distance", "concurrence") if m in wanted]
    if "extraction" in wanted and not metric_list:
        metric_list = ["trace_distance", "concurrence"] if n == 2 else ["trace_distance"]
    if need_traj:
        for metric in metric_list:
            try:
                if metric == "trace_distance":
                    r1 = _resolve_state(cfg.initial_states.pair[0], n)
                    r2 = _resolve_state(cfg.initial_states.pair[1], n)
                    t, s1 = _evolve(h, deph, r1, cfg)
                    _, s2 = _evolve(h, deph, r2, cfg)
                    values = metrics.trace_distance_series(s1, s2)
                else:
                    if n != 2:
                        raise ConfigError("concurrence needs a two-qubit model")
                    t, s = _evolve(h, deph, _resolve_state(cfg.initial_states.single, n), cfg)
                    values = metrics.concurrence_series(s)
                bundle.trajectories[metric] = Trajectory(t, values, MetricKind(metric))
            except ConfigError:
                raise
            except NHDynError as exc:
                _record(bundle, metric, exc)

    if "extraction" in wanted:
        try:
            kind = _extraction_kind(cfg, h, deph)
        except NHDynError as exc:
            _record(bundle, "extraction", exc)
            kind = None
        if kind is not None:
            for metric, traj in bundle.trajectories.items():
                try:
                    if kind == ExtractionKind.PERIOD:
                        bundle.extractions[metric] = metrics.extract_period(traj)
                    else:
                        bundle.extractions[metric] = metrics.extract_relax_time(traj)
                except NHDynError as exc:
                    _record(bundle, f"extraction:{metric}", exc)
            try:
                bundle.predictions[kind.value] = predicted_value(cfg, kind)
            except NHDynError as exc:
                _record(bundle, "prediction", exc)

    if "regime" in wanted:
        try:
            bundle.regime = classify_regime(h)
        except NHDynError as exc:
            _record(bundle, "regime", exc)

    if "liouvillian_spectrum" in wanted:
        if cfg.spectrum is not None:
            family = _scan_dephasing(cfg.spectrum.channel, n)
            sweep = spectrum_sweep(lambda g: h, family, cfg.spectrum.gammas)
            bundle.spectra = sweep.rows
        else:
            sweep = spectrum_sweep(lambda g: h, lambda g: deph, [0.0])
            bundle.spectra = sweep.rows
        for row in bundle.spectra:
            if row.error:
                bundle.warnings.append(f"spectrum at gamma={row.gamma:g}: {row.error}")

    if "freezing" in wanted:
        # largest population derivative over all computational basis states
        dim = 2 ** n
        vals = []
        for k in range(dim):
            rho = np.zeros((dim, dim), dtype=np.complex128)
            rho[k, k] = 1.0
            vals.append(freezing_diagnostic(h, deph, rho))
        bundle.freezing = float(max(vals))
    return bundle


@dataclass
class SweepResult:
    param: str
    values: tuple
    bundles: list
    summary: dict

    @property
    def ok(self):
        return all(b.ok for b in self.bundles)


def default_workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be positive")
    return n


def run_sweep(base, param, values, workers=None):
    """One bundle per value of ``param``, plus per-metric summary tables.

    Summaries are built when ``base`` requests the extraction output;
    ``summary[metric]`` is a list of ``(param, measured, predicted, rel_err)``
    rows with ``nan`` where a value could not be computed.  Rows follow the
    order of ``values`` whatever the completion order of the workers.
    """
    values = tuple(float(v) for v in values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    configs = [base.with_value(param, v) for v in values]
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            bundles = list(pool.map(run_experiment, configs))
    else:
        bundles = [run_experiment(c) for c in configs]
    summary = {}
    if "extraction" not in base.outputs:
        return SweepResult(param, values, bundles, summary)
    for v, b in zip(values, bundles):
        for metric in ("trace_distance", "concurrence"):
            if metric not in b.trajectories and metric not in b.extractions:
                continue
            ext = b.extractions.get(metric)
            measured = ext.value if ext is not None else np.nan
            pred = np.nan
            if ext is not None and b.predictions.get(ext.kind.value) is not None:
                pred = b.predictions[ext.kind.value]
            rel = abs(measured - pred) / abs(pred) if np.isfinite(measured) and np.isfinite(pred) else np.nan
            summary.setdefault(metric, []).append((v, measured, pred, rel))
    return SweepResult(param, values, bundles, summary)


@dataclass
class Preset:
    name: str
    description: str
    config: ExperimentConfig
    sweep_param: str | None = None
    sweep_values: tuple = ()


def _pt(name, a, **kw):
    return ExperimentConfig(name=name, model="PT2", parameters={"a": a}, **kw)


def _apt(name, b, **kw):
    return ExperimentConfig(name=name, model="APT2", parameters={"b": b}, **kw)


def _custom(name, matrix, **kw):
    return ExperimentConfig(name=name, model="Custom", matrix=np.asarray(matrix), **kw)


BOTH = ("trace_distance", "concurrence", "regime", "extraction")
TD = ("trace_distance", "extraction")
CONC = ("concurrence", "extraction")
FIG6_GAMMAS = tuple(np.round(np.linspace(0.0, 20.0, 201), 10))
OPEN_GAMMAS = (0.0, 0.05, 0.1, 0.2)
COLLECTIVE = DephasingConfig.collective
LOCAL2 = (lambda g: DephasingConfig.local(2, g))


def _build_presets():
    sx, sz = models.SIGMA_X, models.SIGMA_Z
    fig6 = {
        "fig6a": ("Hermitian sigma_x + 0.5 sigma_z", sx + 0.5 * sz),
        "fig6b": ("Hermitian sigma_x", sx),
        "fig6c": ("APT i sigma_x + 0.5 sigma_z", 1j * sx + 0.5 * sz),
        "fig6d": ("PT sigma_x + 0.5i sigma_z", sx + 0.5j * sz),
    }
    p = [
        Preset("fig1a", "PT2 unbroken a=0.4: oscillating trace distance and concurrence",
               _pt("fig1a", 0.4, t_max=30.0, outputs=BOTH)),
        Preset("fig1b", "PT2 broken a=2: relaxation", _pt("fig1b", 2.0, outputs=BOTH)),
        Preset("fig1c", "PT2 period vs a against pi/sqrt(1-a^2)",
               _pt("fig1c", 0.4, t_max=40.0, outputs=BOTH), "a", (0.2, 0.4, 0.6, 0.8)),
        Preset("fig1d", "PT2 relaxation time vs a against 1/(2 sqrt(a^2-1))",
               _pt("fig1d", 2.0, t_max=30.0, outputs=BOTH), "a", (1.25, 1.5, 2.0, 2.5, 3.0)),
        Preset("fig2a", "APT2 unbroken b=0.4: relaxation", _apt("fig2a", 0.4, outputs=BOTH)),
        Preset("fig2b", "APT2 broken b=2: oscillation", _apt("fig2b", 2.0, outputs=BOTH)),
        Preset("fig2c", "APT2 relaxation time vs b against 1/(2 sqrt(1-b^2))",
               _apt("fig2c", 0.4, t_max=30.0, outputs=BOTH), "b", (0.1, 0.3, 0.5, 0.7, 0.9)),
        Preset("fig2d", "APT2 period vs b against pi/sqrt(b^2-1)",
               _apt("fig2d", 2.0, outputs=BOTH), "b", (1.25, 1.5, 2.0, 2.5)),
        Preset("fig3a", "PT2 a=0.75 with and without collective dephasing 0.01",
               _pt("fig3a", 0.75, t_max=40.0, outputs=("trace_distance",)),
               "gamma_collective", (0.0, 0.01)),
        Preset("fig3b", "APT2 b=1.25 with and without collective dephasing 0.01",
               _apt("fig3b", 1.25, t_max=40.0, outputs=("trace_distance",)),
               "gamma_collective", (0.0, 0.01)),
        Preset("fig4a", "APT2 b=0.5 trace distance under collective dephasing",
               _apt("fig4a", 0.5, outputs=TD), "gamma_collective", OPEN_GAMMAS),
        Preset("fig4b", "APT2 b=0.5 trace distance under local dephasing",
               _apt("fig4b", 0.5, outputs=TD), "gamma_local", OPEN_GAMMAS),
        Preset("fig4c", "APT2 b=0.5 extracted tau_o vs collective gamma with 1/gap overlay",
               _apt("fig4c", 0.5, outputs=TD + ("liouvillian_spectrum",)),
               "gamma_collective", (0.0, 0.05, 0.1, 0.2, 0.3, 1.0)),
        Preset("fig4pt_a", "PT2 a=1.25 trace distance under collective dephasing",
               _pt("fig4pt_a", 1.25, outputs=TD), "gamma_collective", OPEN_GAMMAS),
        Preset("fig4pt_b", "PT2 a=1.25 trace distance under local dephasing",
               _pt("fig4pt_b", 1.25, outputs=TD), "gamma_local", OPEN_GAMMAS),
        Preset("fig4pt_c", "PT2 a=1.25 concurrence under collective dephasing",
               _pt("fig4pt_c", 1.25, outputs=CONC), "gamma_collective", OPEN_GAMMAS),
        Preset("fig4pt_d", "PT2 a=1.25 concurrence under local dephasing",
               _pt("fig4pt_d", 1.25, outputs=CONC), "gamma_local", OPEN_GAMMAS),
        Preset("fig5a", "APT2 b=0.5 concurrence under collective dephasing",
               _apt("fig5a", 0.5, outputs=CONC), "gamma_collective", (0.0, 0.05, 0.1)),
        Preset("fig5b", "APT2 b=0.5 concurrence under local dephasing",
               _apt("fig5b", 0.5, outputs=CONC), "gamma_local", (0.0, 0.05, 0.1)),
    ]
    for name, (desc, m) in fig6.items():
        cfg = _custom(name, m, outputs=("liouvillian_spectrum",),
                      spectrum=SpectrumScan(FIG6_GAMMAS, "local"))
        p.append(Preset(name, f"single qubit {desc}: Liouvillian real parts vs gamma", cfg))
    return {x.name: x for x in p}


PRESETS = _build_presets()


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; see list-presets") from None


def run_preset(name, workers=None):
    """Run a preset.  Returns a :class:`SweepResult` for sweep presets,
    otherwise a :class:`ResultBundle`."""
    preset = get_preset(name)
    if preset.sweep_param:
        return run_sweep(preset.config, preset.sweep_param, preset.sweep_values, workers)
    return run_experiment(preset.config)
