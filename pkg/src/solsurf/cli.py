"""Command line entry points.

    solsurf solve   --config cfg.json [--out DIR] [--lambda X] [--grid-h H]
    solsurf immerse --config cfg.json [--out DIR] [--lambda X] [--grid-h H]
    solsurf verify  [--suite NAME] [--config cfg.json] [--out DIR]
    solsurf export  --config cfg.json [--out DIR]

Exit codes: 0 success, 1 verification failure, 2 configuration error.
Reports written by ``verify`` are byte-identical across repeated runs of
the same configuration (timings appear only in the human-readable text).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .errors import LambdaSingular
from .fields import (
    Grid2,
    MatrixField,
    interior_max,
    read_field_json,
    trim_margin,
    write_field_json,
    write_scalar_csv,
)
from .geometry import embed_su2, export_obj
from .immersion import (
    ImmersionInputs,
    assemble_tangents,
    conformal_immersion_closed,
    integrate_surface,
    prolong_immersion,
    sym_tafel,
    tangent_check,
)
from .matlie import fro, su_basis
from .sigma import (
    JetField,
    el_residual,
    theta_comm_identity_residual,
    theta_of,
    theta_square_residual,
    traveling_solution,
    u_pair,
    veronese_ladder,
)
from .spectral import (
    euclidean_wave,
    euclidean_wave_dlambda,
    phi_traveling,
    traveling_wave_dlambda,
    wave_diagnostics,
)
from .symmetry import conformal_characteristic
from .verify import SUITE_NAMES, run_suites


def _dump_json(path: str, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"))


def _build_solution(cfg: RunConfig):
    """Returns (jet_field, ladder_or_wave, extras dict)."""
    if cfg.solution["kind"] == "veronese":
        ladder = veronese_ladder(cfg.n, cfg.grid).with_active(cfg.solution["k"])
        j = theta_of(ladder.active_rung, "analytic")
        return j, ladder, {"kind": "veronese", "k": cfg.solution["k"]}
    wave, j = traveling_solution(cfg.solution["kappa"], cfg.solution["omega"], cfg.grid)
    return j, wave, {
        "kind": "traveling",
        "kappa": cfg.solution["kappa"],
        "omega": cfg.solution["omega"],
    }


def _wave_function(cfg: RunConfig, j: JetField, carrier):
    if cfg.solution["kind"] == "veronese":
        return euclidean_wave(j, cfg.solution["k"], cfg.lam)
    return phi_traveling(carrier, j, cfg.lam)


def _gauge_field(cfg: RunConfig, j: JetField) -> MatrixField | None:
    if cfg.gauge == "none":
        return None
    if "preset" in cfg.gauge:
        name = cfg.gauge["preset"]
        basis = su_basis(cfg.n)
        if name == "diag":
            mat = basis.elements[-1]
        elif name == "offdiag":
            mat = basis.elements[0]
        else:
            raise ConfigError(f"key 'gauge.preset': unknown preset {name!r}")
        vals = np.broadcast_to(mat, j.theta.shape).copy()
        return MatrixField(j.grid, vals, 0)
    field, _ = read_field_json(cfg.gauge["file"])
    if field.grid != j.grid:
        raise ConfigError("key 'gauge.file': gauge field grid does not match the run grid")
    return field


def cmd_solve(cfg: RunConfig, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    j, carrier, meta = _build_solution(cfg)
    theta_field = MatrixField(cfg.grid, j.theta, j.margin0)
    write_field_json(os.path.join(outdir, "theta.json"), theta_field)

    summary: dict = {"solution": meta, "grid": cfg.grid.to_json(), "n": cfg.n}
    if meta["kind"] == "veronese":
        jn = theta_of(carrier.active_rung, "numeric-stencil")
        el, em = el_residual(jn)
        summary["el_residual_max"] = interior_max(el, em)
        for m in range(len(carrier)):
            write_field_json(
                os.path.join(outdir, f"ladder_{m}.json"),
                carrier.rungs[m].field,
            )
        summary["ladder_length"] = len(carrier)
        summary["orthogonality_defect"] = carrier.orthogonality_defect()
        summary["completeness_residual"] = carrier.completeness_residual()
        write_scalar_csv(os.path.join(outdir, "el_residual.csv"), cfg.grid, el, em)
    else:
        tvdefect = interior_max(fro(carrier.kappa * j.d1 - j.d2), j.margin1)
        summary["traveling_constraint_defect"] = tvdefect
        el, em = el_residual(j)
        summary["el_residual_max"] = interior_max(el, em)
    sq, m0 = theta_square_residual(j)
    ci, m1 = theta_comm_identity_residual(j)
    summary["theta_square_residual_max"] = interior_max(sq, m0)
    summary["theta_commutator_identity_max"] = interior_max(ci, m1)
    _dump_json(os.path.join(outdir, "solve-summary.json"), summary)
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


def cmd_immerse(cfg: RunConfig, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    j, carrier, meta = _build_solution(cfg)
    wave = _wave_function(cfg, j, carrier)
    u1, u2 = u_pair(j, cfg.lam)

    gauge = _gauge_field(cfg, j)
    char = None
    if cfg.symmetry is not None:
        from .symmetry import make_characteristic

        char = make_characteristic(cfg.symmetry)
    inputs = ImmersionInputs(a_coeffs=cfg.a_coeffs, gauge=gauge, characteristic=char)
    if not inputs.active():
        raise ConfigError(
            "immersion requires at least one of: a_coeffs, gauge, symmetry"
        )
    a, b = assemble_tangents(inputs, j, cfg.lam)
    res = integrate_surface(a, b, wave, u1=u1, u2=u2)
    write_field_json(os.path.join(outdir, "immersion.json"), res.field)
    write_field_json(os.path.join(outdir, "wave.json"), wave.field(), lam=wave.lam)
    from .immersion import linear_independence_report

    inv_phi = wave.inverse()
    t1 = MatrixField(cfg.grid, inv_phi @ a.values @ wave.phi, max(a.margin, wave.margin))
    t2 = MatrixField(cfg.grid, inv_phi @ b.values @ wave.phi, max(b.margin, wave.margin))
    report: dict = {
        "basepoint": list(res.basepoint),
        "compat_defect": res.compat_defect,
        "path_defect": res.path_defect,
        "su_correction": res.su_correction,
        "wave": wave_diagnostics(wave),
        "integrated_tangent_defect": max(tangent_check(res.raw, wave, a, b)),
        "tangent_gram": linear_independence_report(t1, t2),
    }

    if cfg.a_coeffs and gauge is None and char is None:
        if meta["kind"] == "veronese":
            dphi = euclidean_wave_dlambda(j, meta["k"], cfg.lam)
        else:
            dphi = traveling_wave_dlambda(carrier, j, cfg.lam)
        fst, sud = sym_tafel(wave, dphi, inputs.a_value(cfg.lam))
        write_field_json(os.path.join(outdir, "sym_tafel.json"), fst)
        report["sym_tafel_su_distance"] = sud

    if char is not None and not cfg.a_coeffs and gauge is None:
        f_closed, sud = conformal_immersion_closed(cfg.symmetry, j, wave, cfg.lam)
        write_field_json(os.path.join(outdir, "conformal_closed.json"), f_closed)
        report["conformal_closed_su_distance"] = sud
        q = conformal_characteristic(cfg.symmetry, j)
        if meta["kind"] == "veronese":
            builder = lambda jd: euclidean_wave(jd, meta["k"], cfg.lam)  # noqa: E731
        else:
            builder = lambda jd: phi_traveling(carrier, jd, cfg.lam)  # noqa: E731
        calf, sud2 = prolong_immersion(q, j, builder)
        write_field_json(os.path.join(outdir, "prolonged.json"), calf)
        report["prolonged_su_distance"] = sud2
        from .immersion import constant_difference_check
        from .symmetry import frechet_apply, u_functional

        pa = frechet_apply(u_functional(cfg.lam, 1), j, q)
        pb = frechet_apply(u_functional(cfg.lam, 2), j, q)
        defect = max(tangent_check(calf, wave, pa, pb))
        report["prolonged_tangent_defect"] = defect
        report["prolonged_is_fokas_gelfand"] = bool(defect < 1e-6)
        report["closed_vs_prolonged_variation"] = constant_difference_check(
            f_closed, calf
        )[1]
    _dump_json(os.path.join(outdir, "immersion-report.json"), report)
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0


def cmd_verify(cfg: RunConfig | None, suite: str, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    tolerances = cfg.tolerances if cfg is not None else {}
    report = run_suites([suite], tolerances)
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        fh.write(report.json_text())
    with open(os.path.join(outdir, "report.txt"), "w") as fh:
        fh.write(report.text() + "\n")
    print(report.text())
    return 0 if report.passed else 1


def cmd_export(cfg: RunConfig, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    if not cfg.outputs:
        raise ConfigError("key 'outputs' is empty; nothing to export")
    for i, entry in enumerate(cfg.outputs):
        src = entry["input"]
        if not os.path.exists(src):
            raise ConfigError(f"key 'outputs[{i}].input': missing input file {src!r}")
        field, lam = read_field_json(src)
        dst = os.path.join(outdir, entry["path"])
        os.makedirs(os.path.dirname(dst) or ".", exist_ok=True)
        if entry["format"] == "json":
            write_field_json(dst, field, lam)
        elif entry["format"] == "csv":
            write_scalar_csv(dst, field.grid, fro(field.values), field.margin)
        else:
            surface = embed_su2(trim_margin(field))
            export_obj(dst, surface)
        print(f"wrote {dst}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="solsurf",
        description="soliton surfaces in su(N): solve, immerse, verify, export",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "immerse", "verify", "export"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", default="solsurf-out", help="output directory")
        p.add_argument("--lambda", dest="lam", help="override the spectral parameter")
        p.add_argument("--grid-h", dest="grid_h", type=float, help="override grid spacing")
        if name == "verify":
            p.add_argument(
                "--suite",
                default=None,
                help=f"one of: all, {', '.join(SUITE_NAMES)}",
            )
    args = parser.parse_args(argv)

    try:
        cfg = None
        if args.config:
            cfg = load_config(args.config)
        if cfg is not None and args.lam is not None:
            raw = json.loads(args.lam) if args.lam.startswith("[") else float(args.lam)
            cfg.lam = complex(raw) if not isinstance(raw, list) else complex(raw[0], raw[1])
        if cfg is not None and args.grid_h is not None:
            cfg.grid = Grid2(
                chart=cfg.grid.chart,
                origin=cfg.grid.origin,
                spacing=(args.grid_h, args.grid_h),
                dims=cfg.grid.dims,
            )

        if args.command == "verify":
            suite = args.suite or (cfg.suite if cfg is not None else "all")
            if suite != "all" and suite not in SUITE_NAMES:
                raise ConfigError(
                    f"key 'suite': unknown value {suite!r}; "
                    f"choose from all, {', '.join(SUITE_NAMES)}"
                )
            return cmd_verify(cfg, suite, args.out)
        if cfg is None:
            raise ConfigError("--config is required for this command")
        if args.command == "solve":
            return cmd_solve(cfg, args.out)
        if args.command == "immerse":
            return cmd_immerse(cfg, args.out)
        return cmd_export(cfg, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except LambdaSingular as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
