"""Scene configuration files: load, validate, normalize to SI, serialize.

A scene is a YAML tree with sections ``atom``, ``beams``, ``elements``,
``grid`` and ``run``. Quantities may be unit-suffixed strings ("1 mW",
"780 nm") or bare SI numbers; everything is normalized to SI on load,
so serializing a loaded scene and loading it again yields an identical
scene. The ``run`` section is free-form and passed through untouched;
commands parse what they need from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path

import yaml

from .catalog import AtomSpecies, BeamSource, preset_laser, preset_species
from .errors import ConfigError
from .fields import (
    ArcPath,
    ArraySpec,
    GridSpec,
    GuidePath,
    LensletSpec,
    RingPath,
    ScalarField,
    StraightPath,
    array_field,
    dual_beam_array,
    line_focus,
    spherical_focus,
    splitter_field,
)
from .units import parse_point, parse_quantity

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SceneBeam:
    id: str
    source: BeamSource
    laser: str | None = None


@dataclass(frozen=True)
class SphericalLensletElement:
    id: str
    beam: str
    lens: LensletSpec
    center: tuple[float, float, float]
    kind: str = "spherical_lenslet"


@dataclass(frozen=True)
class LensletArrayElement:
    id: str
    beam: str
    lens: LensletSpec
    array: ArraySpec
    center: tuple[float, float, float]
    kind: str = "lenslet_array"


@dataclass(frozen=True)
class DualBeamArrayElement:
    id: str
    beams: tuple[str, str]
    lens: LensletSpec
    array: ArraySpec
    center: tuple[float, float, float]
    kind: str = "dual_beam_array"


@dataclass(frozen=True)
class GuideElement:
    id: str
    beam: str
    lens: LensletSpec
    path: GuidePath
    focal_plane_z: float
    kind: str = "guide"


@dataclass(frozen=True)
class SplitterElement:
    id: str
    beams: tuple[str, str]
    lens: LensletSpec
    guide_a: GuidePath
    guide_b: GuidePath
    focal_plane_z: float
    kind: str = "splitter"


@dataclass(frozen=True)
class LoopElement:
    id: str
    vertices: tuple[tuple[float, float], ...]
    kind: str = "loop"


SceneElement = (SphericalLensletElement | LensletArrayElement | DualBeamArrayElement
                | GuideElement | SplitterElement | LoopElement)


@dataclass(frozen=True)
class OpticalScene:
    atom: AtomSpecies
    atom_preset: str | None
    beams: tuple[SceneBeam, ...]
    elements: tuple[SceneElement, ...]
    grid: GridSpec | None = None
    run: dict = dc_field(default_factory=dict)

    def beam(self, beam_id: str) -> SceneBeam:
        for b in self.beams:
            if b.id == beam_id:
                return b
        raise ConfigError(f"unknown beam id {beam_id!r}")

    def element(self, element_id: str) -> SceneElement:
        for e in self.elements:
            if e.id == element_id:
                return e
        known = ", ".join(e.id for e in self.elements)
        raise ConfigError(f"unknown element id {element_id!r} (known: {known})")

    def intensity_field(self, element_id: str) -> ScalarField:
        e = self.element(element_id)
        if isinstance(e, SphericalLensletElement):
            return spherical_focus(self.beam(e.beam).source, e.lens, e.center)
        if isinstance(e, LensletArrayElement):
            return array_field(self.beam(e.beam).source, e.lens, e.array, e.center)
        if isinstance(e, DualBeamArrayElement):
            return dual_beam_array(self.beam(e.beams[0]).source,
                                   self.beam(e.beams[1]).source,
                                   e.lens, e.array, e.center)
        if isinstance(e, GuideElement):
            return line_focus(self.beam(e.beam).source, e.lens, e.path, e.focal_plane_z)
        if isinstance(e, SplitterElement):
            return splitter_field(e.guide_a, e.guide_b,
                                  self.beam(e.beams[0]).source,
                                  self.beam(e.beams[1]).source,
                                  e.lens, e.focal_plane_z)
        raise ConfigError(f"element {element_id!r} ({e.kind}) has no light field")

    def element_wavelength(self, element_id: str) -> float:
        e = self.element(element_id)
        if hasattr(e, "beam"):
            return self.beam(e.beam).source.lambdaL
        if hasattr(e, "beams"):
            return self.beam(e.beams[0]).source.lambdaL
        raise ConfigError(f"element {element_id!r} has no beam")

    def trap_seed(self, element_id: str) -> tuple[float, float, float]:
        """Natural starting point for minimum searches on this element."""
        e = self.element(element_id)
        if isinstance(e, (SphericalLensletElement, LensletArrayElement, DualBeamArrayElement)):
            return e.center
        if isinstance(e, GuideElement):
            x, y = e.path.point_at(e.path.length / 2.0)
            return (x, y, e.focal_plane_z)
        if isinstance(e, SplitterElement):
            x, y = e.guide_a.point_at(e.guide_a.length / 2.0)
            return (x, y, e.focal_plane_z)
        raise ConfigError(f"element {element_id!r} has no trap seed")

    def to_dict(self) -> dict:
        atom = ({"species": self.atom_preset} if self.atom_preset else {
            "name": self.atom.name,
            "mass": self.atom.mass,
            "resonance_wavelength": self.atom.lambda0,
            "linewidth": self.atom.gamma,
        })
        return {
            "schema_version": SCHEMA_VERSION,
            "atom": atom,
            "beams": [_beam_dict(b) for b in self.beams],
            "elements": [_element_dict(e) for e in self.elements],
            **({"grid": _grid_dict(self.grid)} if self.grid else {}),
            **({"run": self.run} if self.run else {}),
        }


# ---------------------------------------------------------------------------
# serialization helpers


def _beam_dict(b: SceneBeam) -> dict:
    d = {"id": b.id}
    if b.laser:
        d["laser"] = b.laser
    d.update({
        "wavelength": b.source.lambdaL,
        "power": b.source.power,
        "angle": b.source.angle,
        "polarization": b.source.polarization,
    })
    return d


def _lens_dict(lens: LensletSpec) -> dict:
    return {
        "focal_length": lens.focal_length,
        "aperture": lens.aperture,
        "focal_size": lens.focal_size,
    }


def _path_dict(path: GuidePath) -> dict:
    if isinstance(path, StraightPath):
        return {"kind": "straight", "start": list(path.start),
                "direction": list(path.direction), "length": path.length}
    if isinstance(path, ArcPath):
        return {"kind": "arc", "center": list(path.center), "radius": path.radius,
                "angle_from": path.angle_from, "angle_to": path.angle_to}
    return {"kind": "ring", "center": list(path.center), "radius": path.radius}


def _element_dict(e: SceneElement) -> dict:
    d = {"id": e.id, "kind": e.kind}
    if isinstance(e, SphericalLensletElement):
        d.update(beam=e.beam, **_lens_dict(e.lens), center=list(e.center))
    elif isinstance(e, LensletArrayElement):
        d.update(beam=e.beam, **_lens_dict(e.lens), lattice=e.array.lattice,
                 pitch=e.array.pitch, counts=list(e.array.counts), center=list(e.center))
    elif isinstance(e, DualBeamArrayElement):
        d.update(beams=list(e.beams), **_lens_dict(e.lens), lattice=e.array.lattice,
                 pitch=e.array.pitch, counts=list(e.array.counts), center=list(e.center))
    elif isinstance(e, GuideElement):
        d.update(beam=e.beam, **_lens_dict(e.lens), path=_path_dict(e.path),
                 focal_plane_z=e.focal_plane_z)
    elif isinstance(e, SplitterElement):
        d.update(beams=list(e.beams), **_lens_dict(e.lens),
                 guide_a=_path_dict(e.guide_a), guide_b=_path_dict(e.guide_b),
                 focal_plane_z=e.focal_plane_z)
    elif isinstance(e, LoopElement):
        d.update(vertices=[list(v) for v in e.vertices])
    return d


def _grid_dict(grid: GridSpec) -> dict:
    return {
        "extent": [list(e) for e in grid.extents],
        "spacing": list(grid.spacing_tuple()),
    }


def serialize_scene(scene: OpticalScene) -> str:
    return yaml.safe_dump(scene.to_dict(), sort_keys=False, default_flow_style=None)


# ---------------------------------------------------------------------------
# parsing


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _parse_atom(node, where: str):
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: must be a mapping")
    if "species" in node:
        name = node["species"]
        return preset_species(name), name
    atom = AtomSpecies(
        name=str(_require(node, "name", where)),
        mass=parse_quantity(_require(node, "mass", where), "mass", f"{where}.mass"),
        lambda0=parse_quantity(_require(node, "resonance_wavelength", where), "length",
                               f"{where}.resonance_wavelength"),
        gamma=parse_quantity(_require(node, "linewidth", where), "angular_frequency",
                             f"{where}.linewidth"),
    )
    return atom, None


def _parse_beam(node, where: str) -> SceneBeam:
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: must be a mapping")
    beam_id = str(_require(node, "id", where))
    laser = node.get("laser")
    if "wavelength" in node:
        lam = parse_quantity(node["wavelength"], "length", f"{where}.wavelength")
    elif laser:
        lam = preset_laser(laser)
    else:
        raise ConfigError(f"{where}: needs a wavelength or a laser preset")
    source = BeamSource(
        lambdaL=lam,
        power=parse_quantity(_require(node, "power", where), "power", f"{where}.power"),
        angle=parse_quantity(node.get("angle", 0.0), "angle", f"{where}.angle"),
        polarization=str(node.get("polarization", "lin-x")),
    )
    return SceneBeam(id=beam_id, source=source, laser=laser)


def _parse_lens(node, where: str, kind: str) -> LensletSpec:
    return LensletSpec(
        kind=kind,
        focal_length=parse_quantity(_require(node, "focal_length", where), "length",
                                    f"{where}.focal_length"),
        aperture=parse_quantity(_require(node, "aperture", where), "length",
                                f"{where}.aperture"),
        focal_size=parse_quantity(_require(node, "focal_size", where), "length",
                                  f"{where}.focal_size"),
    )


def _parse_array(node, where: str) -> ArraySpec:
    counts = _require(node, "counts", where)
    if not isinstance(counts, (list, tuple)) or len(counts) != 2:
        raise ConfigError(f"{where}.counts: expected a pair of integers")
    return ArraySpec(
        lattice=str(node.get("lattice", "rectangular")),
        pitch=parse_quantity(_require(node, "pitch", where), "length", f"{where}.pitch"),
        counts=(int(counts[0]), int(counts[1])),
    )


def _parse_path(node, where: str) -> GuidePath:
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: must be a mapping")
    kind = _require(node, "kind", where)
    if kind == "straight":
        direction = _require(node, "direction", where)
        if not isinstance(direction, (list, tuple)) or len(direction) != 2:
            raise ConfigError(f"{where}.direction: expected a pair of numbers")
        return StraightPath(
            start=parse_point(_require(node, "start", where), f"{where}.start", dim=2),
            direction=(float(direction[0]), float(direction[1])),
            length=parse_quantity(_require(node, "length", where), "length",
                                  f"{where}.length"),
        )
    if kind == "arc":
        return ArcPath(
            center=parse_point(_require(node, "center", where), f"{where}.center", dim=2),
            radius=parse_quantity(_require(node, "radius", where), "length",
                                  f"{where}.radius"),
            angle_from=parse_quantity(_require(node, "angle_from", where), "angle",
                                      f"{where}.angle_from"),
            angle_to=parse_quantity(_require(node, "angle_to", where), "angle",
                                    f"{where}.angle_to"),
        )
    if kind == "ring":
        return RingPath(
            center=parse_point(_require(node, "center", where), f"{where}.center", dim=2),
            radius=parse_quantity(_require(node, "radius", where), "length",
                                  f"{where}.radius"),
        )
    raise ConfigError(f"{where}.kind: unknown path kind {kind!r}")


def _parse_element(node, where: str) -> SceneElement:
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: must be a mapping")
    kind = _require(node, "kind", where)
    element_id = str(_require(node, "id", where))
    if kind == "spherical_lenslet":
        return SphericalLensletElement(
            id=element_id,
            beam=str(_require(node, "beam", where)),
            lens=_parse_lens(node, where, "spherical"),
            center=parse_point(node.get("center", [0.0, 0.0, 0.0]), f"{where}.center"),
        )
    if kind == "lenslet_array":
        return LensletArrayElement(
            id=element_id,
            beam=str(_require(node, "beam", where)),
            lens=_parse_lens(node, where, "spherical"),
            array=_parse_array(node, where),
            center=parse_point(node.get("center", [0.0, 0.0, 0.0]), f"{where}.center"),
        )
    if kind == "dual_beam_array":
        beams = _require(node, "beams", where)
        if not isinstance(beams, (list, tuple)) or len(beams) != 2:
            raise ConfigError(f"{where}.beams: expected two beam ids")
        return DualBeamArrayElement(
            id=element_id,
            beams=(str(beams[0]), str(beams[1])),
            lens=_parse_lens(node, where, "spherical"),
            array=_parse_array(node, where),
            center=parse_point(node.get("center", [0.0, 0.0, 0.0]), f"{where}.center"),
        )
    if kind == "guide":
        return GuideElement(
            id=element_id,
            beam=str(_require(node, "beam", where)),
            lens=_parse_lens(node, where, "cylindrical"),
            path=_parse_path(_require(node, "path", where), f"{where}.path"),
            focal_plane_z=parse_quantity(node.get("focal_plane_z", 0.0), "length",
                                         f"{where}.focal_plane_z"),
        )
    if kind == "splitter":
        beams = _require(node, "beams", where)
        if not isinstance(beams, (list, tuple)) or len(beams) != 2:
            raise ConfigError(f"{where}.beams: expected two beam ids")
        return SplitterElement(
            id=element_id,
            beams=(str(beams[0]), str(beams[1])),
            lens=_parse_lens(node, where, "cylindrical"),
            guide_a=_parse_path(_require(node, "guide_a", where), f"{where}.guide_a"),
            guide_b=_parse_path(_require(node, "guide_b", where), f"{where}.guide_b"),
            focal_plane_z=parse_quantity(node.get("focal_plane_z", 0.0), "length",
                                         f"{where}.focal_plane_z"),
        )
    if kind == "loop":
        vertices = _require(node, "vertices", where)
        if not isinstance(vertices, (list, tuple)) or len(vertices) < 3:
            raise ConfigError(f"{where}.vertices: expected at least three points")
        return LoopElement(
            id=element_id,
            vertices=tuple(parse_point(v, f"{where}.vertices[{i}]", dim=2)
                           for i, v in enumerate(vertices)),
        )
    raise ConfigError(f"{where}.kind: unknown element kind {kind!r}")


def _parse_grid(node, where: str) -> GridSpec:
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: must be a mapping")
    extent = _require(node, "extent", where)
    if not isinstance(extent, (list, tuple)) or len(extent) != 3:
        raise ConfigError(f"{where}.extent: expected three (lo, hi) pairs")
    extents = []
    for i, pair in enumerate(extent):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ConfigError(f"{where}.extent[{i}]: expected a (lo, hi) pair")
        extents.append((
            parse_quantity(pair[0], "length", f"{where}.extent[{i}][0]"),
            parse_quantity(pair[1], "length", f"{where}.extent[{i}][1]"),
        ))
    spacing = _require(node, "spacing", where)
    if isinstance(spacing, (list, tuple)):
        if len(spacing) != 3:
            raise ConfigError(f"{where}.spacing: expected one value or three")
        spac = tuple(parse_quantity(s, "length", f"{where}.spacing[{i}]")
                     for i, s in enumerate(spacing))
    else:
        spac = parse_quantity(spacing, "length", f"{where}.spacing")
    return GridSpec(extents=tuple(extents), spacing=spac)


def parse_scene(data: dict, where: str = "scene") -> OpticalScene:
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: top level must be a mapping")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"{where}.schema_version: required and must equal {SCHEMA_VERSION}, got {version!r}"
        )
    atom, preset = _parse_atom(_require(data, "atom", where), f"{where}.atom")
    beams = tuple(_parse_beam(b, f"{where}.beams[{i}]")
                  for i, b in enumerate(data.get("beams", [])))
    seen = set()
    for i, b in enumerate(beams):
        if b.id in seen:
            raise ConfigError(f"{where}.beams[{i}].id: duplicate id {b.id!r}")
        seen.add(b.id)
    elements = tuple(_parse_element(e, f"{where}.elements[{i}]")
                     for i, e in enumerate(data.get("elements", [])))
    seen = set()
    for i, e in enumerate(elements):
        if e.id in seen:
            raise ConfigError(f"{where}.elements[{i}].id: duplicate id {e.id!r}")
        seen.add(e.id)
    beam_ids = {b.id for b in beams}
    for i, e in enumerate(elements):
        refs = []
        if hasattr(e, "beam"):
            refs = [e.beam]
        elif hasattr(e, "beams"):
            refs = list(e.beams)
        for ref in refs:
            if ref not in beam_ids:
                raise ConfigError(
                    f"{where}.elements[{i}]: references unknown beam {ref!r}"
                )
    grid = _parse_grid(data["grid"], f"{where}.grid") if "grid" in data else None
    run = data.get("run", {})
    if run and not isinstance(run, dict):
        raise ConfigError(f"{where}.run: must be a mapping")
    return OpticalScene(atom=atom, atom_preset=preset, beams=beams,
                        elements=elements, grid=grid, run=dict(run))


def loads_scene(text: str) -> OpticalScene:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        place = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ConfigError(f"scene parse error{place}: {exc}") from None
    return parse_scene(data)


def load_scene(path) -> OpticalScene:
    """Load and fully validate a scene file; all quantities come out SI."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scene file not found: {path}")
    return loads_scene(path.read_text(encoding="utf-8"))
