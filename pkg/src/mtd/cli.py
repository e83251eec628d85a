"""Command-line front end: scene-driven runs with reproducible outputs.

Every command writes its outputs plus a run manifest and the resolved
(SI-normalized) scene into the output directory, so a result directory
is self-describing. All numbers in text outputs are fixed to nine
significant digits; identical manifests produce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 physics error,
4 numerics error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .constants import CONST
from .errors import ConfigError, MtdError, NumericsError, PhysicsError
from .fields import SampledField, node_budget, sample
from .gridio import write_grid, write_slice_csv
from .junction import (
    JunctionSetup,
    LaunchSpec,
    interferometer_area,
    splitter_run,
    waveguide_depth,
)
from .reports import fmt9, load_rows, write_json, write_report_csv, write_report_json
from .scene import (
    GuideElement,
    LoopElement,
    SplitterElement,
    parse_scene,
    serialize_scene,
)
from .traps import characterize_row, characterize_trap, potential_field
from .units import parse_point, parse_quantity
from .wavepacket import UniformGrid, evolve, init_gaussian, total_energy, transverse_modes


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtd",
        description="Design and simulate dipole traps, guides and matter-wave "
                    "couplers made from microlens light fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scene", required=True, metavar="FILE")
        p.add_argument("--out", default=None, metavar="DIR")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a scene entry (dotted path)")
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("table", help="characterize a list of trap/guide rows")
    common(p)
    p.add_argument("--rows", required=True, metavar="FILE")

    p = sub.add_parser("fieldmap", help="sample an element's field onto a grid file")
    common(p)
    p.add_argument("--element", required=True)
    p.add_argument("--quantity", choices=["intensity", "potential"], default="intensity")

    p = sub.add_parser("trap", help="characterize one trap element")
    common(p)
    p.add_argument("--element", required=True)

    p = sub.add_parser("modes", help="transverse mode spectrum of a guide element")
    common(p)
    p.add_argument("--element", required=True)
    p.add_argument("--levels", type=int, default=6)

    p = sub.add_parser("propagate", help="evolve a packet in an element's potential")
    common(p)
    p.add_argument("--element", required=True)

    p = sub.add_parser("splitter", help="transport a packet through a splitter element")
    common(p)
    p.add_argument("--element", required=True)

    p = sub.add_parser("area", help="enclosed area of a loop element")
    common(p)
    p.add_argument("--element", required=True)
    return parser


# ---------------------------------------------------------------------------
# scene overrides and run bookkeeping


def _apply_override(tree, dotted: str, raw_value: str):
    value = yaml.safe_load(raw_value)
    keys = dotted.split(".")
    node = tree
    for key in keys[:-1]:
        if isinstance(node, list):
            node = node[int(key)]
        elif isinstance(node, dict):
            node = node.setdefault(key, {})
        else:
            raise ConfigError(f"--set {dotted}: cannot descend into {key!r}")
    last = keys[-1]
    if isinstance(node, list):
        node[int(last)] = value
    elif isinstance(node, dict):
        node[last] = value
    else:
        raise ConfigError(f"--set {dotted}: cannot assign {last!r}")


def _load_scene_with_overrides(path: str, overrides: list[str]):
    scene_path = Path(path)
    if not scene_path.exists():
        raise ConfigError(f"scene file not found: {scene_path}")
    tree = yaml.safe_load(scene_path.read_text(encoding="utf-8"))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        dotted, raw = item.split("=", 1)
        _apply_override(tree, dotted, raw)
    return parse_scene(tree)


def _prepare_out(args, scene) -> Path:
    out = Path(args.out) if args.out else Path.cwd() / f"mtd_{args.command}"
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "schema_version": 1,
        "tool_version": __version__,
        "command": args.command,
        "scene": str(args.scene),
        "overrides": list(args.overrides),
        "jobs": args.jobs,
        "node_budget": node_budget(),
        "deterministic": True,
    }
    for extra in ("rows", "element", "quantity", "levels"):
        if hasattr(args, extra):
            manifest[extra] = getattr(args, extra)
    write_json(out / "manifest.json", manifest)
    (out / "resolved_scene.yaml").write_text(serialize_scene(scene), encoding="utf-8")
    return out


def _run_params(scene, key: str) -> dict:
    params = scene.run.get(key, {})
    if not isinstance(params, dict):
        raise ConfigError(f"scene run.{key} must be a mapping")
    return params


# ---------------------------------------------------------------------------
# commands


def cmd_table(args) -> int:
    scene = _load_scene_with_overrides(args.scene, args.overrides)
    out = _prepare_out(args, scene)
    rows, meta = load_rows(args.rows)

    def one(row):
        try:
            return characterize_row(scene.atom, row), None
        except MtdError as exc:
            placeholder = {"label": row.label, "geometry": row.geometry,
                           "wavelength_m": row.wavelength, "power_W": row.power,
                           "focal_size_m": row.focal_size, "length_m": row.length,
                           "error": str(exc), "depth_K": float("nan"),
                           "omega_r": None, "omega_z": None, "x_r_m": None,
                           "x_z_m": None, "scattering_rate": None,
                           "single_mode_ratio": None, "lamb_dicke_ok": False,
                           "above_doppler": False}
            return placeholder, exc
    if args.jobs > 1 and rows:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, rows))
    else:
        results = [one(row) for row in rows]
    entries = [entry for entry, _ in results]
    failures = [(entry["label"], exc) for entry, exc in results if exc is not None]
    write_report_csv(out / "table_report.csv", entries, meta["depth_scale"])
    write_report_json(out / "table_report.json", entries, meta)
    print(f"wrote {out / 'table_report.csv'} ({len(entries)} rows)")
    if failures:
        for label, exc in failures:
            print(f"row {label!r} failed: {exc}", file=sys.stderr)
        raise failures[0][1]
    return 0


def cmd_fieldmap(args) -> int:
    scene = _load_scene_with_overrides(args.scene, args.overrides)
    out = _prepare_out(args, scene)
    if scene.grid is None:
        raise ConfigError("fieldmap needs a grid section in the scene")
    field = scene.intensity_field(args.element)
    if args.quantity == "potential":
        field = potential_field(field, scene.atom, scene.element_wavelength(args.element))
    sampled = sample(field, scene.grid)
    write_grid(out / "fieldmap.grid", sampled)
    write_slice_csv(out / "fieldmap_slice.csv", sampled, axis="z")
    print(f"wrote {out / 'fieldmap.grid'} shape={sampled.values.shape}")
    return 0


def cmd_trap(args) -> int:
    scene = _load_scene_with_overrides(args.scene, args.overrides)
    out = _prepare_out(args, scene)
    element = scene.element(args.element)
    char = characterize_trap(
        scene.intensity_field(args.element), scene.atom,
        scene.element_wavelength(args.element),
        seed=scene.trap_seed(args.element),
        scale=element.lens.focal_size,
    )
    write_json(out / "trap.json", {"element": args.element, **char.as_dict()})
    print(f"wrote {out / 'trap.json'}: depth {fmt9(char.depth_kelvin * 1e3)} mK, "
          f"omega_r {fmt9(char.omega_r)} 1/s")
    return 0


def cmd_modes(args) -> int:
    scene = _load_scene_with_overrides(args.scene, args.overrides)
    out = _prepare_out(args, scene)
    element = scene.element(args.element)
    if not isinstance(element, GuideElement):
        raise ConfigError("modes needs a guide element")
    u = potential_field(scene.intensity_field(args.element), scene.atom,
                        scene.element_wavelength(args.element))
    waist = element.lens.focal_size
    mid_x, mid_y = element.path.point_at(element.path.length / 2.0)
    tx, ty = element.path.tangent_at(element.path.length / 2.0)
    n_points = int(scene.run.get("modes_points", 4096))
    offsets = np.linspace(-6.0 * waist, 6.0 * waist, n_points)
    xs = mid_x - ty * offsets
    ys = mid_y + tx * offsets
    values = np.asarray(u.values(xs, ys, np.full_like(offsets, element.focal_plane_z)))
    spectrum = transverse_modes(offsets, values, scene.atom.mass, args.levels)
    write_json(out / "modes.json", {
        "element": args.element,
        "levels_J": list(spectrum.energies),
        "bound_count": spectrum.bound_count,
    })
    print(f"wrote {out / 'modes.json'}: {spectrum.bound_count} bound modes")
    return 0


def cmd_propagate(args) -> int:
    scene = _load_scene_with_overrides(args.scene, args.overrides)
    out = _prepare_out(args, scene)
    if scene.grid is None:
        raise ConfigError("propagate needs a grid section in the scene")
    params = _run_params(scene, "propagate")
    for key in ("center", "width", "velocity", "duration"):
        if key not in params:
            raise ConfigError(f"propagate needs run.propagate.{key}")
    u = potential_field(scene.intensity_field(args.element), scene.atom,
                        scene.element_wavelength(args.element))
    (x0, x1), (y0, y1), _ = scene.grid.extents
    dx, dy, _ = scene.grid.spacing_tuple()
    shape = (int(round((x1 - x0) / dx)), int(round((y1 - y0) / dy)))
    grid = UniformGrid.from_extents(((x0, x1), (y0, y1)), shape)
    if int(np.prod(grid.shape)) > node_budget():
        raise ConfigError("propagate grid exceeds the node budget")
    center = parse_point(params["center"], "run.propagate.center", dim=2)
    width = params["width"]
    if isinstance(width, (list, tuple)):
        width = tuple(parse_quantity(w, "length", "run.propagate.width") for w in width)
    else:
        width = parse_quantity(width, "length", "run.propagate.width")
    velocity = tuple(parse_quantity(v, "velocity", "run.propagate.velocity")
                     for v in params["velocity"])
    duration = parse_quantity(params["duration"], "time", "run.propagate.duration")
    samples = int(params.get("samples", 8))

    state = init_gaussian(grid, center, width, velocity, scene.atom.mass)
    v_grid = u.values(*grid.meshes(), np.zeros(grid.shape))
    dt_bound = 0.7 * (np.pi / 4) * CONST.hbar / max(float(np.max(np.abs(v_grid))), 1e-300)
    steps_total = max(int(np.ceil(duration / dt_bound)), samples)
    chunk = max(steps_total // samples, 1)
    dt = duration / (chunk * samples)
    lines = ["time_s,norm,energy_J,mean_x_m,mean_y_m,mean_px,mean_py"]

    def record(s):
        mp = s.mean_position()
        mk = s.mean_momentum()
        lines.append(",".join(fmt9(v) for v in (
            s.time, s.norm(), total_energy(s, v_grid), mp[0], mp[1], mk[0], mk[1])))

    record(state)
    for _ in range(samples):
        state = evolve(state, v_grid, dt, chunk)
        record(state)
    (out / "observables.csv").write_text("\n".join(lines) + "\n", encoding="ascii")
    density = SampledField(
        values=state.density()[:, :, None],
        axes=(grid.axes[0].coords, grid.axes[1].coords, np.array([0.0])),
        spacing=(grid.axes[0].step, grid.axes[1].step, 1.0),
        units="1/m^2",
    )
    write_grid(out / "density.grid", density)
    print(f"wrote {out / 'observables.csv'} ({samples} samples, {chunk * samples} steps)")
    return 0


def cmd_splitter(args) -> int:
    scene = _load_scene_with_overrides(args.scene, args.overrides)
    out = _prepare_out(args, scene)
    element = scene.element(args.element)
    if not isinstance(element, SplitterElement):
        raise ConfigError("splitter needs a splitter element")
    if scene.grid is None:
        raise ConfigError("splitter needs a grid section in the scene")
    params = _run_params(scene, "splitter")
    waist = element.lens.focal_size
    guide_length = parse_quantity(params.get("guide_length", "10 mm"), "length",
                                  "run.splitter.guide_length")
    beam_a = scene.beam(element.beams[0]).source
    beam_b = scene.beam(element.beams[1]).source
    depth_a = waveguide_depth(scene.atom, beam_a.lambdaL, beam_a.power, waist, guide_length)
    depth_b = waveguide_depth(scene.atom, beam_b.lambdaL, beam_b.power, waist, guide_length)
    if abs(depth_a - depth_b) > 1e-6 * depth_a:
        raise ConfigError("splitter guides must carry equal depths")
    (x0, x1), (y0, y1), _ = scene.grid.extents
    setup = JunctionSetup(
        guide_a=element.guide_a, guide_b=element.guide_b, waist=waist,
        depth=depth_a, box=((x0, x1), (y0, y1)),
        port_offset=5.0 * waist,
        split_y=parse_quantity(params.get("split_y", 0.0), "length", "run.splitter.split_y"),
    )
    launch = LaunchSpec(
        guide=str(params.get("guide", "a")),
        speed_recoils=float(params.get("speed_recoils", 5.0)),
        sigma_long=parse_quantity(params.get("sigma_long", "0.8 um"), "length",
                                  "run.splitter.sigma_long"),
        start_x=parse_quantity(params.get("start_x", "-4.6 um"), "length",
                               "run.splitter.start_x"),
        end_x=parse_quantity(params.get("end_x", "8 um"), "length",
                             "run.splitter.end_x"),
    )
    result = splitter_run(setup, scene.atom, launch,
                          samples=int(params.get("samples", 8)))
    write_json(out / "splitter.json", {
        "element": args.element,
        "populations": result.populations.as_dict(),
        "steps": result.steps,
        "dt_s": result.dt,
        "params": result.params,
    })
    lines = ["time_s,norm,energy_J,forward_a,backward_a,forward_b,backward_b,remainder"]
    for t, norm, energy, pops_t in result.timeline:
        lines.append(",".join(fmt9(v) for v in (
            t, norm, energy, pops_t.forward_a, pops_t.backward_a,
            pops_t.forward_b, pops_t.backward_b, pops_t.remainder)))
    (out / "observables.csv").write_text("\n".join(lines) + "\n", encoding="ascii")
    grid = result.grid
    density = SampledField(
        values=result.state.density()[:, :, None],
        axes=(grid.axes[0].coords, grid.axes[1].coords, np.array([0.0])),
        spacing=(grid.axes[0].step, grid.axes[1].step, 1.0),
        units="1/m^2",
    )
    write_grid(out / "density.grid", density)
    pops = result.populations
    print(f"wrote {out / 'splitter.json'}: forward_a={fmt9(pops.forward_a)} "
          f"forward_b={fmt9(pops.forward_b)} remainder={fmt9(pops.remainder)}")
    return 0


def cmd_area(args) -> int:
    scene = _load_scene_with_overrides(args.scene, args.overrides)
    out = _prepare_out(args, scene)
    element = scene.element(args.element)
    if not isinstance(element, LoopElement):
        raise ConfigError("area needs a loop element")
    area = interferometer_area(element.vertices)
    write_json(out / "area.json", {"element": args.element, "area_m2": area,
                                   "area_cm2": area * 1e4})
    print(f"enclosed area: {fmt9(area * 1e4)} cm^2")
    return 0


_COMMANDS = {
    "table": cmd_table,
    "fieldmap": cmd_fieldmap,
    "trap": cmd_trap,
    "modes": cmd_modes,
    "propagate": cmd_propagate,
    "splitter": cmd_splitter,
    "area": cmd_area,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return 3
    except NumericsError as exc:
        print(f"numerics error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
