"""Command-line interface: JSON config in, JSON result document out.

Commands
--------
entropy     exact/truncated closed form, or nested MC when an "mc" block is given
optimize    maximize conditional entropy over a hyperparameter box or a game simplex
game        finite-game actions: entropy, check_truth_telling, least_favorable,
            bayesimax, risk_profile
asymptotic  large-sample approximation of the conditional entropy
sequence    conditional entropy along geometric growth of one hyperparameter

Configs are strict JSON: unknown keys are rejected and every field is
validated with a path-qualified error.  Results are emitted as a versioned
document; all numbers are finite or encoded as the strings "inf"/"-inf".
Exit codes: 0 success, 1 parse/validation failure, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import asymptotics, conjugate, game as game_mod, mcent, optimizer
from .scores import ScoreKind

__all__ = ["ValidationError", "ParseError", "RunConfig", "parse_config", "run", "main"]

SCHEMA_VERSION = "1"

COMMANDS = ("entropy", "optimize", "game", "asymptotic", "sequence")
FAMILIES = ("normal_normal", "beta_bernoulli", "gamma_poisson")
SCORE_NAMES = {"log": ScoreKind.LOGARITHMIC,
               "quadratic": ScoreKind.QUADRATIC,
               "spherical": ScoreKind.SPHERICAL}
GAME_ACTIONS = ("entropy", "check_truth_telling", "least_favorable",
                "bayesimax", "risk_profile")

_COMMON_KEYS = {"command", "seed", "threads", "out", "emit_per_rep", "csv_out"}
_ALLOWED_KEYS = {
    "entropy": _COMMON_KEYS | {"family", "prior", "model", "n", "mc", "tail_tol"},
    "optimize": _COMMON_KEYS | {"family", "prior", "model", "n", "box", "game", "mc",
                                "tail_tol", "resolution", "starts", "max_evals", "tol"},
    "game": _COMMON_KEYS | {"omega", "likelihood", "score", "prior", "action",
                            "trials", "tol", "resolution", "refine_iters"},
    "asymptotic": _COMMON_KEYS | {"family", "prior", "model", "n", "quad_points",
                                  "method"},
    "sequence": _COMMON_KEYS | {"family", "prior", "model", "n", "param", "factor",
                                "steps", "tail_tol"},
}


class ValidationError(ValueError):
    """A config field is missing, unknown, mistyped, or out of domain."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ParseError(ValueError):
    """The config is not syntactically valid JSON."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class RunConfig:
    """A validated configuration ready to execute."""

    command: str
    data: dict


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _require(data: dict, key: str, path: str = ""):
    if key not in data:
        raise ValidationError(f"{path}{key}", "required field is missing")
    return data[key]


def _check_unknown(data: dict, allowed, path: str = "") -> None:
    for key in data:
        if key not in allowed:
            raise ValidationError(f"{path}{key}", "unknown key")


def _real(value, field: str, *, positive: bool = False,
          nonnegative: bool = False, above_one: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(field, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(field, "must be finite")
    if positive and value <= 0.0:
        raise ValidationError(field, "must be > 0")
    if nonnegative and value < 0.0:
        raise ValidationError(field, "must be >= 0")
    if above_one and value <= 1.0:
        raise ValidationError(field, "must be > 1")
    return value


def _integer(value, field: str, *, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(field, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValidationError(field, f"must be >= {minimum}")
    return value


def _string(value, field: str, choices=None) -> str:
    if not isinstance(value, str):
        raise ValidationError(field, f"expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ValidationError(field, f"must be one of {sorted(choices)}")
    return value


def _boolean(value, field: str) -> bool:
    if not isinstance(value, bool):
        raise ValidationError(field, f"expected a boolean, got {value!r}")
    return value


def _validate_prior_block(data: dict, family: str, path: str = "prior",
                          allow_grid: bool = False) -> dict:
    prior = _require(data, "prior")
    if not isinstance(prior, dict):
        raise ValidationError(path, "expected an object")
    if allow_grid and ("grid" in prior or "weights" in prior):
        _check_unknown(prior, {"grid", "weights"}, f"{path}.")
        grid = _require(prior, "grid", f"{path}.")
        weights = _require(prior, "weights", f"{path}.")
        for key, seq in (("grid", grid), ("weights", weights)):
            if not isinstance(seq, list) or not seq:
                raise ValidationError(f"{path}.{key}", "expected a non-empty array")
            for i, v in enumerate(seq):
                _real(v, f"{path}.{key}[{i}]")
        if len(grid) != len(weights):
            raise ValidationError(path, "grid and weights must have equal length")
        return prior
    if family == "normal_normal":
        _check_unknown(prior, {"mu", "tau2"}, f"{path}.")
        _real(_require(prior, "mu", f"{path}."), f"{path}.mu")
        _real(_require(prior, "tau2", f"{path}."), f"{path}.tau2", positive=True)
    else:
        _check_unknown(prior, {"alpha", "beta"}, f"{path}.")
        _real(_require(prior, "alpha", f"{path}."), f"{path}.alpha", positive=True)
        _real(_require(prior, "beta", f"{path}."), f"{path}.beta", positive=True)
    return prior


def _validate_model_block(data: dict, family: str) -> None:
    if family == "normal_normal":
        model = _require(data, "model")
        if not isinstance(model, dict):
            raise ValidationError("model", "expected an object")
        _check_unknown(model, {"sigma2"}, "model.")
        _real(_require(model, "sigma2", "model."), "model.sigma2", positive=True)
    elif "model" in data:
        raise ValidationError("model", f"family {family!r} takes no model block")


def _validate_mc_block(data: dict) -> None:
    mc = data["mc"]
    if not isinstance(mc, dict):
        raise ValidationError("mc", "expected an object")
    _check_unknown(mc, {"I", "J", "k", "seed", "jitter_scale", "estimator"}, "mc.")
    _integer(_require(mc, "I", "mc."), "mc.I", minimum=2)
    j = _integer(_require(mc, "J", "mc."), "mc.J", minimum=2)
    k = _integer(mc.get("k", 3), "mc.k", minimum=1)
    if k >= j:
        raise ValidationError("mc.k", "must be smaller than mc.J")
    _integer(mc.get("seed", 0), "mc.seed", minimum=0)
    _real(mc.get("jitter_scale", 0.0), "mc.jitter_scale", nonnegative=True)
    _string(mc.get("estimator", "nested"), "mc.estimator", {"nested", "decomposed"})


def _validate_game_block(data: dict, path: str = "") -> None:
    omega = _require(data, "omega", path)
    if not isinstance(omega, list) or len(omega) < 2:
        raise ValidationError(f"{path}omega", "expected an array of at least 2 labels")
    for i, label in enumerate(omega):
        _string(label, f"{path}omega[{i}]")
    lik = _require(data, "likelihood", path)
    if not isinstance(lik, list) or len(lik) != len(omega):
        raise ValidationError(f"{path}likelihood",
                              "expected one row per omega label")
    width = None
    for r, row in enumerate(lik):
        if not isinstance(row, list) or not row:
            raise ValidationError(f"{path}likelihood[{r}]", "expected a non-empty row")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValidationError(f"{path}likelihood[{r}]", "ragged likelihood matrix")
        for c, v in enumerate(row):
            _real(v, f"{path}likelihood[{r}][{c}]", nonnegative=True)
        if abs(sum(row) - 1.0) > 1e-12:
            raise ValidationError(f"{path}likelihood[{r}]", "row must sum to 1")
    _string(_require(data, "score", path), f"{path}score", set(SCORE_NAMES))


def _validate_game_prior(data: dict, size: int) -> None:
    prior = _require(data, "prior")
    if not isinstance(prior, list) or len(prior) != size:
        raise ValidationError("prior", f"expected an array of {size} weights")
    for i, v in enumerate(prior):
        _real(v, f"prior[{i}]", nonnegative=True)
    if abs(sum(prior) - 1.0) > 1e-12:
        raise ValidationError("prior", "weights must sum to 1")


def _family_params(family: str) -> tuple[str, ...]:
    return ("mu", "tau2") if family == "normal_normal" else ("alpha", "beta")


def _validate_common(data: dict) -> None:
    if "seed" in data:
        _integer(data["seed"], "seed", minimum=0)
    if "threads" in data:
        _integer(data["threads"], "threads", minimum=1)
    if "out" in data:
        _string(data["out"], "out")
    if "csv_out" in data:
        _string(data["csv_out"], "csv_out")
    if "emit_per_rep" in data:
        _boolean(data["emit_per_rep"], "emit_per_rep")


def validate_config(data: dict, command: str | None = None) -> RunConfig:
    """Validate a parsed JSON object against the config schema."""
    if not isinstance(data, dict):
        raise ValidationError("$", "config must be a JSON object")
    declared = data.get("command")
    if declared is None and command is None:
        raise ValidationError("command", "required field is missing")
    if declared is not None:
        _string(declared, "command", set(COMMANDS))
        if command is not None and declared != command:
            raise ValidationError(
                "command", f"config says {declared!r} but {command!r} was invoked")
    cmd = command or declared
    _check_unknown(data, _ALLOWED_KEYS[cmd])
    _validate_common(data)

    if cmd == "entropy":
        family = _string(_require(data, "family"), "family", set(FAMILIES))
        _validate_prior_block(data, family)
        _validate_model_block(data, family)
        _integer(_require(data, "n"), "n", minimum=0)
        if "tail_tol" in data:
            if family != "gamma_poisson":
                raise ValidationError("tail_tol", "only used with gamma_poisson")
            _real(data["tail_tol"], "tail_tol", positive=True)
        if "mc" in data:
            _validate_mc_block(data)
    elif cmd == "optimize":
        if ("game" in data) == ("family" in data):
            raise ValidationError(
                "command", "optimize needs exactly one of 'game' or 'family'")
        if "game" in data:
            if not isinstance(data["game"], dict):
                raise ValidationError("game", "expected an object")
            _check_unknown(data["game"], {"omega", "likelihood", "score"}, "game.")
            _validate_game_block(data["game"], "game.")
            for key in ("prior", "model", "n", "box", "mc", "tail_tol"):
                if key in data:
                    raise ValidationError(key, "not used when optimizing a game")
        else:
            family = _string(data["family"], "family", set(FAMILIES))
            _validate_prior_block(data, family)
            _validate_model_block(data, family)
            _integer(_require(data, "n"), "n", minimum=0)
            box = _require(data, "box")
            if not isinstance(box, dict) or not box:
                raise ValidationError("box", "expected a non-empty object")
            searchable = set(_family_params(family)) - {"mu"}
            for name, bounds in box.items():
                if name not in searchable:
                    raise ValidationError(f"box.{name}",
                                          f"not a searchable hyperparameter of {family}")
                if not isinstance(bounds, list) or len(bounds) != 2:
                    raise ValidationError(f"box.{name}", "expected [lower, upper]")
                lo = _real(bounds[0], f"box.{name}[0]", positive=True)
                hi = _real(bounds[1], f"box.{name}[1]", positive=True)
                if lo >= hi:
                    raise ValidationError(f"box.{name}", "needs lower < upper")
            if "tail_tol" in data:
                if family != "gamma_poisson":
                    raise ValidationError("tail_tol", "only used with gamma_poisson")
                _real(data["tail_tol"], "tail_tol", positive=True)
            if "mc" in data:
                _validate_mc_block(data)
        if "resolution" in data:
            _integer(data["resolution"], "resolution", minimum=2)
        if "starts" in data:
            _integer(data["starts"], "starts", minimum=1)
        if "max_evals" in data:
            _integer(data["max_evals"], "max_evals", minimum=1)
        if "tol" in data:
            _real(data["tol"], "tol", positive=True)
    elif cmd == "game":
        _validate_game_block(data)
        action = _string(_require(data, "action"), "action", set(GAME_ACTIONS))
        if action in ("entropy", "check_truth_telling", "least_favorable",
                      "risk_profile"):
            _validate_game_prior(data, len(data["omega"]))
        elif "prior" in data:
            raise ValidationError("prior", "not used by the bayesimax action")
        if "trials" in data:
            if action != "check_truth_telling":
                raise ValidationError("trials", "only used by check_truth_telling")
            _integer(data["trials"], "trials", minimum=1)
        if "tol" in data:
            if action != "least_favorable":
                raise ValidationError("tol", "only used by least_favorable")
            _real(data["tol"], "tol", positive=True)
        for key in ("resolution", "refine_iters"):
            if key in data:
                if action != "bayesimax":
                    raise ValidationError(key, "only used by the bayesimax action")
                _integer(data[key], key, minimum=2)
    elif cmd == "asymptotic":
        family = _string(_require(data, "family"), "family", set(FAMILIES))
        _validate_prior_block(data, family, allow_grid=True)
        _validate_model_block(data, family)
        _integer(_require(data, "n"), "n", minimum=1)
        if "quad_points" in data:
            _integer(data["quad_points"], "quad_points", minimum=2)
        if "method" in data:
            _string(data["method"], "method", {"auto", "analytic", "quadrature"})
    elif cmd == "sequence":
        family = _string(_require(data, "family"), "family", set(FAMILIES))
        _validate_prior_block(data, family)
        _validate_model_block(data, family)
        _integer(_require(data, "n"), "n", minimum=0)
        param = _string(_require(data, "param"), "param")
        if param not in set(_family_params(family)) - {"mu"}:
            raise ValidationError("param",
                                  f"not a growable hyperparameter of {family}")
        if "factor" in data:
            _real(data["factor"], "factor", above_one=True)
        if "steps" in data:
            _integer(data["steps"], "steps", minimum=2)
        if "tail_tol" in data:
            if family != "gamma_poisson":
                raise ValidationError("tail_tol", "only used with gamma_poisson")
            _real(data["tail_tol"], "tail_tol", positive=True)
    return RunConfig(command=cmd, data=data)


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Strictly parse and validate a JSON config document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return validate_config(data, command)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _build_spec(data: dict, family: str):
    prior = data["prior"]
    n = data["n"]
    if family == "normal_normal":
        return conjugate.NormalNormalSpec(mu=prior["mu"], tau2=prior["tau2"],
                                          sigma2=data["model"]["sigma2"], n=n)
    if family == "beta_bernoulli":
        return conjugate.BetaBernoulliSpec(alpha=prior["alpha"], beta=prior["beta"], n=n)
    return conjugate.GammaPoissonSpec(alpha=prior["alpha"], beta=prior["beta"], n=n)


def _build_game(data: dict) -> game_mod.DiscreteGame:
    return game_mod.DiscreteGame(
        omega=tuple(data["omega"]),
        likelihood=np.array(data["likelihood"], dtype=float),
        score=SCORE_NAMES[data["score"]],
    )


def _build_mc_config(mc: dict, seed_override: int | None = None) -> mcent.McConfig:
    return mcent.McConfig(
        outer_reps=mc["I"],
        inner_draws=mc["J"],
        knn_k=mc.get("k", 3),
        seed=seed_override if seed_override is not None else mc.get("seed", 0),
        jitter_scale=mc.get("jitter_scale", 0.0),
    )


def _build_asymptotic_prior(data: dict, family: str):
    prior = data["prior"]
    if "grid" in prior:
        return asymptotics.GridPrior(np.array(prior["grid"], dtype=float),
                                     np.array(prior["weights"], dtype=float))
    if family == "normal_normal":
        return asymptotics.NormalPrior(prior["mu"], prior["tau2"])
    if family == "beta_bernoulli":
        return asymptotics.BetaPrior(prior["alpha"], prior["beta"])
    return asymptotics.GammaPrior(prior["alpha"], prior["beta"])


def _build_fisher_model(data: dict, family: str) -> asymptotics.FisherModel:
    if family == "normal_normal":
        return asymptotics.FisherModel(asymptotics.ModelFamily.NORMAL_KNOWN_VAR,
                                       sigma2=data["model"]["sigma2"])
    if family == "beta_bernoulli":
        return asymptotics.FisherModel(asymptotics.ModelFamily.BERNOULLI)
    return asymptotics.FisherModel(asymptotics.ModelFamily.POISSON)


def _opt_result_outputs(result: optimizer.OptResult, as_weights: bool) -> dict:
    if as_weights:
        argmax = {"weights": [float(v) for v in result.argmax]}
    else:
        argmax = {name: float(v) for name, v in zip(result.names, result.argmax)}
    return {
        "argmax": argmax,
        "value": result.value,
        "evaluations": result.evaluations,
        "status": result.status.value,
    }


def _run_entropy(data: dict) -> tuple[dict, int | None]:
    family = data["family"]
    spec = _build_spec(data, family)
    tail_tol = data.get("tail_tol", 1e-10)
    if "mc" not in data:
        return {"method": "exact",
                "value": conjugate.conditional_entropy(spec, tail_tol)}, None
    cfg = _build_mc_config(data["mc"], data.get("seed"))
    workers = data.get("threads", 1)
    estimator = data["mc"].get("estimator", "nested")
    if estimator == "decomposed":
        est = mcent.decomposed_mc_entropy(spec, cfg, workers=workers)
    else:
        est = mcent.nested_mc_entropy(spec, cfg, workers=workers)
    outputs = {
        "method": "mc_decomposed" if estimator == "decomposed" else "mc",
        "value": est.value,
        "stderr": est.stderr,
        "I": cfg.outer_reps,
        "J": cfg.inner_draws,
        "k": cfg.knn_k,
    }
    if data.get("emit_per_rep", False):
        outputs["per_rep"] = [float(v) for v in est.per_rep]
    return outputs, cfg.seed


def _run_optimize(data: dict) -> tuple[dict, int | None, optimizer.OptResult]:
    kwargs = {}
    if "starts" in data:
        kwargs["starts"] = data["starts"]
    if "max_evals" in data:
        kwargs["max_evals"] = data["max_evals"]
    if "tol" in data:
        kwargs["tol"] = data["tol"]
    if "game" in data:
        game = _build_game(data["game"])
        result = game_mod.find_bayesimax(game, resolution=data.get("resolution", 12),
                                         refine_iters=data.get("max_evals", 2000),
                                         starts=data.get("starts", 8),
                                         tol=data.get("tol", 1e-10))
        return _opt_result_outputs(result, as_weights=True), None, result
    family = data["family"]
    spec = _build_spec(data, family)
    box = {name: (bounds[0], bounds[1]) for name, bounds in data["box"].items()}
    seed = None
    mc = None
    if "mc" in data:
        mc = _build_mc_config(data["mc"], data.get("seed"))
        seed = mc.seed
    result = optimizer.maximize_conditional_entropy(
        spec, box, resolution=data.get("resolution", 9), mc=mc,
        workers=data.get("threads", 1), tail_tol=data.get("tail_tol", 1e-10),
        **kwargs,
    )
    return _opt_result_outputs(result, as_weights=False), seed, result


def _run_game(data: dict) -> tuple[dict, int | None, optimizer.OptResult | None]:
    game = _build_game(data)
    action = data["action"]
    if action == "entropy":
        prior = np.array(data["prior"], dtype=float)
        dec = game_mod.decomposition(game, prior)
        return {"min_bayes_risk": dec.r, "prior_entropy": dec.h,
                "information": dec.i}, None, None
    if action == "check_truth_telling":
        prior = np.array(data["prior"], dtype=float)
        seed = data.get("seed", 0)
        report = game_mod.verify_truth_telling(game, prior,
                                               data.get("trials", 1000), seed)
        return {
            "trials": report.trials,
            "violations": report.violations,
            "ties": report.ties,
            "worst_margin": report.worst_margin,
            "injectivity_suspect": report.injectivity_suspect,
            "passed": report.passed,
        }, seed, None
    if action == "least_favorable":
        prior = np.array(data["prior"], dtype=float)
        report = game_mod.check_least_favorable(game, prior, data.get("tol", 1e-6))
        return {
            "passed": report.passed,
            "sup_risk": report.profile.sup,
            "min_bayes_risk": report.min_bayes_risk,
            "gap": report.gap,
            "per_theta_risk": [float(v) for v in report.profile.per_theta],
        }, None, None
    if action == "bayesimax":
        result = game_mod.find_bayesimax(game, resolution=data.get("resolution", 12),
                                         refine_iters=data.get("refine_iters", 2000))
        outputs = _opt_result_outputs(result, as_weights=True)
        outputs["omega"] = list(game.omega)
        return outputs, None, result
    # risk_profile
    prior = np.array(data["prior"], dtype=float)
    profile = game_mod.risk_profile(game, game_mod.truth_telling_rule(game, prior),
                                    prior)
    return {
        "per_theta_risk": [float(v) for v in profile.per_theta],
        "sup": profile.sup,
        "bayes": profile.bayes,
    }, None, None


def _run_asymptotic(data: dict) -> tuple[dict, int | None]:
    family = data["family"]
    prior = _build_asymptotic_prior(data, family)
    model = _build_fisher_model(data, family)
    method = data.get("method", "auto")
    value = asymptotics.asymptotic_conditional_entropy(
        prior, model, data["n"], quad_points=data.get("quad_points", 256),
        method=method)
    if isinstance(prior, asymptotics.GridPrior):
        method_used = "grid"
    elif method != "quadrature" and asymptotics._analytic_expected_log_root_info(
            prior, model) is not None:
        method_used = "analytic"
    else:
        method_used = "quadrature"
    return {"value": value, "method_used": method_used,
            "bvm_warning": asymptotics.bvm_boundary_warning(prior)}, None


def _run_sequence(data: dict) -> tuple[dict, int | None]:
    family = data["family"]
    spec = _build_spec(data, family)
    result = optimizer.nearly_bayesimax_sequence(
        spec, data["param"], factor=data.get("factor", 10.0),
        steps=data.get("steps", 6), tail_tol=data.get("tail_tol", 1e-10))
    return {
        "param": result.param,
        "points": [{"param_value": pv, "value": v}
                   for pv, v in zip(result.param_values, result.values)],
        "non_decreasing": result.non_decreasing,
        "strictly_increasing": result.strictly_increasing,
    }, None


def run(cfg: RunConfig) -> dict:
    """Execute a validated config and assemble the result document."""
    start = time.perf_counter()
    trace_result: optimizer.OptResult | None = None
    if cfg.command == "entropy":
        outputs, seed = _run_entropy(cfg.data)
    elif cfg.command == "optimize":
        outputs, seed, trace_result = _run_optimize(cfg.data)
    elif cfg.command == "game":
        outputs, seed, trace_result = _run_game(cfg.data)
    elif cfg.command == "asymptotic":
        outputs, seed = _run_asymptotic(cfg.data)
    elif cfg.command == "sequence":
        outputs, seed = _run_sequence(cfg.data)
    else:  # pragma: no cover - validated upstream
        raise ValidationError("command", f"unknown command {cfg.command!r}")
    wall_ms = (time.perf_counter() - start) * 1000.0

    if "csv_out" in cfg.data:
        _write_csv(cfg.data["csv_out"], cfg.command, cfg.data, outputs, trace_result)

    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "inputs": cfg.data,
        "outputs": outputs,
        "wall_time_ms": wall_ms,
        "seed": seed,
    }
    return _encode(doc)


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _encode(obj):
    """Recursively convert to JSON-safe values; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            raise ValueError("refusing to emit NaN in a result document")
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_encode(v) for v in obj.tolist()]
    raise TypeError(f"cannot encode {type(obj).__name__} in a result document")


def serialize(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_value(v: float) -> str:
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _write_csv(path: str, command: str, data: dict, outputs: dict,
               trace_result: optimizer.OptResult | None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if "per_theta_risk" in outputs:
            writer.writerow(["theta_index", "risk"])
            for i, risk in enumerate(outputs["per_theta_risk"]):
                writer.writerow([i, _csv_value(risk)])
        elif trace_result is not None:
            names = trace_result.names or tuple(
                f"p{i}" for i in range(trace_result.argmax.size))
            writer.writerow(["step", *names, "value"])
            for step, (params, value) in enumerate(trace_result.trace):
                writer.writerow([step, *(_csv_value(p) for p in params),
                                 _csv_value(value)])
        else:
            raise ValidationError("csv_out",
                                  f"no tabular output for this {command} invocation")


def _error_doc(kind: str, exc: Exception) -> dict:
    info = {"type": kind, "message": str(exc)}
    if isinstance(exc, ValidationError):
        info["field"] = exc.field
    if isinstance(exc, ParseError):
        info["line"] = exc.line
        info["column"] = exc.column
    return {"error": info}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bayesimax",
        description="Evaluate, estimate, and maximize conditional entropy "
                    "of prior disclosure games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for internal parallelism")
        p.add_argument("--out", default=None,
                       help="write the result document here instead of stdout")
        p.add_argument("--csv", default=None,
                       help="write the tabular output (risk profile or trace) here")
        p.add_argument("--emit-per-rep", action="store_true",
                       help="include per-replicate estimates in the result")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text, args.command)
        data = dict(cfg.data)
        if args.seed is not None:
            if args.seed < 0:
                raise ValidationError("seed", "must be >= 0")
            data["seed"] = args.seed
            if "mc" in data and isinstance(data["mc"], dict):
                data["mc"] = {**data["mc"], "seed": args.seed}
        if args.threads is not None:
            if args.threads < 1:
                raise ValidationError("threads", "must be >= 1")
            data["threads"] = args.threads
        if args.out is not None:
            data["out"] = args.out
        if args.csv is not None:
            data["csv_out"] = args.csv
        if args.emit_per_rep:
            data["emit_per_rep"] = True
        cfg = RunConfig(command=cfg.command, data=data)
        doc = run(cfg)
    except (ParseError, ValidationError) as exc:
        kind = "ParseError" if isinstance(exc, ParseError) else "ValidationError"
        sys.stderr.write(serialize(_error_doc(kind, exc)))
        return 1
    except OSError as exc:
        sys.stderr.write(serialize(_error_doc("IOError", exc)))
        return 1
    except (mcent.DegenerateSampleError, game_mod.ZeroMarginalError,
            RuntimeError, OverflowError, FloatingPointError) as exc:
        sys.stderr.write(serialize(_error_doc(type(exc).__name__, exc)))
        return 2
    except ValueError as exc:
        sys.stderr.write(serialize(_error_doc("ValidationError", exc)))
        return 1

    text = serialize(doc)
    out_path = cfg.data.get("out")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
