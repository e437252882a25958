"""Run configuration: a single JSON document, strictly validated.

Unknown keys are errors (reproducibility beats convenience), and
cross-field consistency is checked before any computation starts: the
chart fixes which solution generators and symmetry data are admissible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from .fields import CHART_EUCLIDEAN, CHART_MINKOWSKI, Grid2
from .symmetry import ConformalSpec

__all__ = ["ConfigError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration; message names the key."""


_TOP_KEYS = {
    "model",
    "space",
    "n",
    "solution",
    "grid",
    "lambda",
    "a_coeffs",
    "gauge",
    "symmetry",
    "outputs",
    "tolerances",
    "suite",
}

_DEFAULT_GRIDS = {
    "euclidean": {"origin": [0.0, 0.0], "spacing": [0.05, 0.05], "dims": [101, 101]},
    "minkowski": {"origin": [0.0, 0.0], "spacing": [0.04, 0.04], "dims": [101, 101]},
}


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


@dataclass
class RunConfig:
    space: str
    n: int
    solution: dict
    grid: Grid2
    lam: complex
    a_coeffs: tuple[float, ...] = ()
    gauge: dict | str = "none"
    symmetry: ConformalSpec | None = None
    outputs: list = dc_field(default_factory=list)
    tolerances: dict = dc_field(default_factory=dict)
    suite: str = "all"

    @property
    def chart(self) -> str:
        return CHART_EUCLIDEAN if self.space == "euclidean" else CHART_MINKOWSKI


def _parse_lambda(raw) -> complex:
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2:
        return complex(float(raw[0]), float(raw[1]))
    raise ConfigError("key 'lambda' must be a number or a [re, im] pair")


def parse_config(obj: dict) -> RunConfig:
    if not isinstance(obj, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(obj, _TOP_KEYS, "configuration")

    model = obj.get("model", "cp")
    if model != "cp":
        raise ConfigError(f"key 'model': unsupported value {model!r}")

    space = obj.get("space")
    if space not in ("euclidean", "minkowski"):
        raise ConfigError("key 'space' must be 'euclidean' or 'minkowski'")

    n = int(obj.get("n", 2))
    if n < 2:
        raise ConfigError("key 'n' must be at least 2")

    sol = obj.get("solution")
    if not isinstance(sol, dict) or "kind" not in sol:
        raise ConfigError("key 'solution' must be an object with a 'kind'")
    kind = sol["kind"]
    if kind == "veronese":
        _reject_unknown(sol, {"kind", "k"}, "solution")
        if space != "euclidean":
            raise ConfigError("key 'solution': veronese requires space = euclidean")
        k = int(sol.get("k", 0))
        if not 0 <= k <= n - 1:
            raise ConfigError(f"key 'solution.k' must lie in 0..{n - 1}")
        solution = {"kind": "veronese", "k": k}
    elif kind == "traveling":
        _reject_unknown(sol, {"kind", "kappa", "omega"}, "solution")
        if space != "minkowski":
            raise ConfigError("key 'solution': traveling requires space = minkowski")
        if n != 2:
            raise ConfigError("key 'n': traveling-wave solutions are implemented for n = 2")
        solution = {
            "kind": "traveling",
            "kappa": float(sol.get("kappa", 2.0)),
            "omega": float(sol.get("omega", 1.0)),
        }
        if solution["kappa"] == 0.0:
            raise ConfigError("key 'solution.kappa' must be nonzero")
    else:
        raise ConfigError(f"key 'solution.kind': unknown value {kind!r}")

    chart = CHART_EUCLIDEAN if space == "euclidean" else CHART_MINKOWSKI
    graw = obj.get("grid", _DEFAULT_GRIDS[space])
    _reject_unknown(graw, {"origin", "spacing", "dims"}, "grid")
    try:
        grid = Grid2(
            chart=chart,
            origin=tuple(float(v) for v in graw.get("origin", [0.0, 0.0])),
            spacing=tuple(float(v) for v in graw.get("spacing", _DEFAULT_GRIDS[space]["spacing"])),
            dims=tuple(int(v) for v in graw.get("dims", [101, 101])),
        )
    except ValueError as exc:
        raise ConfigError(f"key 'grid': {exc}") from exc

    lam = _parse_lambda(obj.get("lambda", [0.5, 0.0]))
    if abs(1 - lam) < 1e-6 or abs(1 + lam) < 1e-6:
        raise ConfigError("key 'lambda' is singular (too close to +1 or -1)")

    a_coeffs = tuple(float(c) for c in obj.get("a_coeffs", []))

    gauge = obj.get("gauge", "none")
    if gauge != "none":
        if not isinstance(gauge, dict) or not ({"preset", "file"} & set(gauge)):
            raise ConfigError("key 'gauge' must be 'none', {'preset': ...} or {'file': ...}")
        _reject_unknown(gauge, {"preset", "file"}, "gauge")

    symmetry = None
    sraw = obj.get("symmetry")
    if sraw is not None:
        _reject_unknown(sraw, {"f", "g"}, "symmetry")
        try:
            symmetry = ConformalSpec.from_json(sraw, chart)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"key 'symmetry': {exc}") from exc

    outputs = obj.get("outputs", [])
    if not isinstance(outputs, list):
        raise ConfigError("key 'outputs' must be a list")
    for i, entry in enumerate(outputs):
        if not isinstance(entry, dict):
            raise ConfigError(f"key 'outputs[{i}]' must be an object")
        _reject_unknown(entry, {"format", "input", "path"}, f"outputs[{i}]")
        if entry.get("format") not in ("obj", "csv", "json"):
            raise ConfigError(f"key 'outputs[{i}].format' must be obj, csv or json")
        for req in ("input", "path"):
            if req not in entry:
                raise ConfigError(f"key 'outputs[{i}].{req}' is required")

    tolerances = obj.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("key 'tolerances' must be an object")
    tolerances = {str(k): float(v) for k, v in tolerances.items()}

    suite = obj.get("suite", "all")

    return RunConfig(
        space=space,
        n=n,
        solution=solution,
        grid=grid,
        lam=lam,
        a_coeffs=a_coeffs,
        gauge=gauge,
        symmetry=symmetry,
        outputs=outputs,
        tolerances=tolerances,
        suite=suite,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return parse_config(obj)
