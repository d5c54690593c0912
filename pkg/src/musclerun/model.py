"""Musculoskeletal model schema, validation, and the default planar runner.

A model document is JSON with version tag ``musclerun-model/1`` (schema in
``docs/model-schema.md``).  Serialization is canonical (sorted keys, two
space indent, shortest round-trip floats) so saved files are diffable and
golden-file tests are byte-stable.

The default model is a planar runner: one combined pelvis/torso/head body
plus upper leg, lower leg and foot per side (7 bodies, 9 degrees of
freedom), actuated by 9 muscle groups per leg.  Segment masses and
geometry approximate a 75 kg, 1.8 m adult; they are design constants of
this package, documented inline below, and treated as golden.
"""

from __future__ import annotations

import importlib.resources
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional

from .errors import ModelError

SCHEMA_VERSION = "musclerun-model/1"

#: Reserved parent name for the root joint.
GROUND = "ground"

PLANAR_FREE = "planar_free"
REVOLUTE = "revolute"

Vec2 = tuple[float, float]


@dataclass(frozen=True)
class BodyDef:
    name: str
    mass: float                      # kg
    inertia_zz: float                # kg m^2 about the COM
    com_offset: Vec2                 # m, body frame
    attached_contact_spheres: tuple[str, ...] = ()


@dataclass(frozen=True)
class JointDef:
    name: str
    parent: str
    child: str
    kind: str                        # planar_free | revolute
    anchor_parent: Vec2 = (0.0, 0.0)
    anchor_child: Vec2 = (0.0, 0.0)
    range: Optional[tuple[float, float]] = None   # rad, revolute only, advisory


@dataclass(frozen=True)
class MusclePathPoint:
    body: str
    point: Vec2                      # m, body frame


@dataclass(frozen=True)
class MuscleDef:
    name: str
    f_max_iso: float                 # N
    optimal_fiber_length: float      # m
    tendon_slack_length: float       # m
    pennation_angle_at_optimal: float   # rad
    max_contraction_velocity: float  # optimal fiber lengths / s
    path: tuple[MusclePathPoint, ...]


@dataclass(frozen=True)
class LigamentDef:
    joint: str
    engage_angle_lo: float           # rad
    engage_angle_hi: float           # rad
    stiffness_scale: float           # N m
    exponent_rate: float             # 1/rad


@dataclass(frozen=True)
class ContactSphereDef:
    id: str
    body: str
    center: Vec2                     # m, body frame
    radius: float                    # m


@dataclass(frozen=True)
class ContactParams:
    stiffness: float                 # N / m^exponent
    exponent: float
    dissipation: float               # s/m
    friction: float                  # regularized viscous coefficient
    v_ref: float                     # m/s, tangential regularization speed


@dataclass(frozen=True)
class Station:
    """Named point of interest on a body (feeds the observation vector)."""

    body: str
    point: Vec2


@dataclass(frozen=True)
class ModelDefinition:
    bodies: tuple[BodyDef, ...]
    joints: tuple[JointDef, ...]
    muscles: tuple[MuscleDef, ...]
    ligaments: tuple[LigamentDef, ...]
    contact_spheres: tuple[ContactSphereDef, ...]
    contact_params: ContactParams
    gravity: float                   # m/s^2, magnitude, acts along -y
    tau_act: float                   # s
    tau_deact: float                 # s
    joint_damping: float = 0.0       # N m s/rad, viscous, at every revolute
    baseline_activation: float = 0.0
    tendon_mode: str = "rigid"       # rigid | compliant
    tendon_stiffness_scale: float = 30.0   # F_max_iso per slack length
    stations: tuple[tuple[str, Station], ...] = ()
    poses: tuple[tuple[str, tuple[float, ...]], ...] = ()

    def body(self, name: str) -> BodyDef:
        for b in self.bodies:
            if b.name == name:
                return b
        raise KeyError(name)

    def joint(self, name: str) -> JointDef:
        for j in self.joints:
            if j.name == name:
                return j
        raise KeyError(name)

    def muscle(self, name: str) -> MuscleDef:
        for m in self.muscles:
            if m.name == name:
                return m
        raise KeyError(name)

    def pose(self, name: str) -> tuple[float, ...]:
        for pname, q in self.poses:
            if pname == name:
                return q
        raise KeyError(name)

    def station_map(self) -> dict[str, Station]:
        return dict(self.stations)

    @property
    def revolute_joints(self) -> tuple[JointDef, ...]:
        return tuple(j for j in self.joints if j.kind == REVOLUTE)

    @property
    def ndof(self) -> int:
        return 3 + len(self.revolute_joints)

    @property
    def total_mass(self) -> float:
        return sum(b.mass for b in self.bodies)


# ---------------------------------------------------------------------------
# Validation

def _check(cond, message, path):
    if not cond:
        raise ModelError(message, path=path)


def validate_model(m: ModelDefinition, strict: bool = False) -> list[str]:
    """Check every invariant; raise ModelError on hard violations.

    Topology deviations from the default 7-body/9-DOF/18-muscle profile are
    returned as warnings, or raised when ``strict`` is set.
    """
    body_names = [b.name for b in m.bodies]
    _check(len(set(body_names)) == len(body_names), "duplicate body name", "bodies")
    sphere_ids = [s.id for s in m.contact_spheres]
    _check(len(set(sphere_ids)) == len(sphere_ids), "duplicate sphere id",
           "contact_spheres")

    for i, b in enumerate(m.bodies):
        _check(b.mass > 0, "mass must be > 0", f"bodies[{i}].mass")
        _check(b.inertia_zz > 0, "inertia_zz must be > 0", f"bodies[{i}].inertia_zz")
        for sid in b.attached_contact_spheres:
            _check(sid in sphere_ids, f"unknown contact sphere {sid!r}",
                   f"bodies[{i}].attached_contact_spheres")

    free_joints = [j for j in m.joints if j.kind == PLANAR_FREE]
    children = set()
    for i, j in enumerate(m.joints):
        _check(j.kind in (PLANAR_FREE, REVOLUTE), f"unknown joint kind {j.kind!r}",
               f"joints[{i}].kind")
        parent_ok = j.parent == GROUND if j.kind == PLANAR_FREE else j.parent in body_names
        _check(parent_ok, f"unknown parent body {j.parent!r}", f"joints[{i}].parent")
        _check(j.child in body_names, f"unknown child body {j.child!r}",
               f"joints[{i}].child")
        _check(j.child not in children, f"body {j.child!r} has two parent joints",
               f"joints[{i}].child")
        children.add(j.child)
        if j.kind == REVOLUTE and j.range is not None:
            _check(j.range[0] < j.range[1], "range must be [min, max]",
                   f"joints[{i}].range")
    _check(len(free_joints) == 1, "exactly one planar_free joint required", "joints")
    _check(len(children) == len(body_names), "every body needs a parent joint",
           "joints")

    # Tree connectivity from the root.
    root = free_joints[0].child
    parent_of = {j.child: j.parent for j in m.joints}
    for b in body_names:
        seen, cur = set(), b
        while cur != root:
            _check(cur not in seen, "joint graph has a cycle", "joints")
            seen.add(cur)
            cur = parent_of[cur]
            _check(cur == GROUND or cur in body_names or cur == root,
                   "disconnected body", "joints")
            if cur == GROUND:
                _check(False, f"body {b!r} not connected to root", "joints")

    for i, mu in enumerate(m.muscles):
        _check(mu.f_max_iso > 0, "f_max_iso must be > 0", f"muscles[{i}].f_max_iso")
        _check(mu.optimal_fiber_length > 0, "optimal_fiber_length must be > 0",
               f"muscles[{i}].optimal_fiber_length")
        _check(mu.tendon_slack_length > 0, "tendon_slack_length must be > 0",
               f"muscles[{i}].tendon_slack_length")
        _check(0.0 <= mu.pennation_angle_at_optimal < math.pi / 2,
               "pennation angle must be in [0, pi/2)",
               f"muscles[{i}].pennation_angle_at_optimal")
        _check(mu.max_contraction_velocity > 0, "max_contraction_velocity must be > 0",
               f"muscles[{i}].max_contraction_velocity")
        _check(len(mu.path) >= 2, "path needs at least 2 points", f"muscles[{i}].path")
        for k, pp in enumerate(mu.path):
            _check(pp.body in body_names, f"unknown body {pp.body!r}",
                   f"muscles[{i}].path[{k}].body")

    joint_names = [j.name for j in m.joints]
    for i, lig in enumerate(m.ligaments):
        _check(lig.joint in joint_names, f"unknown joint {lig.joint!r}",
               f"ligaments[{i}].joint")
        _check(m.joint(lig.joint).kind == REVOLUTE, "ligament on non-revolute joint",
               f"ligaments[{i}].joint")
        _check(lig.engage_angle_lo < lig.engage_angle_hi,
               "engage_angle_lo must be < engage_angle_hi", f"ligaments[{i}]")
        _check(lig.stiffness_scale > 0, "stiffness_scale must be > 0",
               f"ligaments[{i}].stiffness_scale")

    for i, s in enumerate(m.contact_spheres):
        _check(s.radius > 0, "radius must be > 0", f"contact_spheres[{i}].radius")
        _check(s.body in body_names, f"unknown body {s.body!r}",
               f"contact_spheres[{i}].body")

    cp = m.contact_params
    _check(cp.stiffness > 0, "stiffness must be > 0", "contact_params.stiffness")
    _check(cp.dissipation >= 0, "dissipation must be >= 0",
           "contact_params.dissipation")
    _check(cp.friction >= 0, "friction must be >= 0", "contact_params.friction")
    _check(m.tau_act > 0 and m.tau_deact > 0, "activation time constants must be > 0",
           "tau_act")
    _check(m.tendon_mode in ("rigid", "compliant"), "tendon_mode must be rigid|compliant",
           "tendon_mode")
    for name, st in m.stations:
        _check(st.body in body_names, f"unknown body {st.body!r}", f"stations.{name}")
    for name, q in m.poses:
        _check(len(q) == m.ndof, f"pose needs {m.ndof} coordinates", f"poses.{name}")

    warnings = []
    if len(m.bodies) != 7:
        warnings.append(f"default profile expects 7 bodies, got {len(m.bodies)}")
    if m.ndof != 9:
        warnings.append(f"default profile expects 9 DOF, got {m.ndof}")
    if len(m.muscles) != 18:
        warnings.append(f"default profile expects 18 muscles, got {len(m.muscles)}")
    if len(m.contact_spheres) != 4:
        warnings.append(
            f"default profile expects 4 contact spheres, got {len(m.contact_spheres)}")
    if warnings and strict:
        raise ModelError("; ".join(warnings), path="topology")
    return warnings


# ---------------------------------------------------------------------------
# Serialization

def _model_to_doc(m: ModelDefinition) -> dict:
    doc = {
        "version": SCHEMA_VERSION,
        "gravity": m.gravity,
        "tau_act": m.tau_act,
        "tau_deact": m.tau_deact,
        "joint_damping": m.joint_damping,
        "baseline_activation": m.baseline_activation,
        "tendon_mode": m.tendon_mode,
        "tendon_stiffness_scale": m.tendon_stiffness_scale,
        "contact_params": asdict(m.contact_params),
        "bodies": [
            {
                "name": b.name,
                "mass": b.mass,
                "inertia_zz": b.inertia_zz,
                "com_offset": list(b.com_offset),
                "attached_contact_spheres": list(b.attached_contact_spheres),
            }
            for b in m.bodies
        ],
        "joints": [
            {
                "name": j.name,
                "parent": j.parent,
                "child": j.child,
                "kind": j.kind,
                "anchor_parent": list(j.anchor_parent),
                "anchor_child": list(j.anchor_child),
                "range": list(j.range) if j.range is not None else None,
            }
            for j in m.joints
        ],
        "muscles": [
            {
                "name": mu.name,
                "f_max_iso": mu.f_max_iso,
                "optimal_fiber_length": mu.optimal_fiber_length,
                "tendon_slack_length": mu.tendon_slack_length,
                "pennation_angle_at_optimal": mu.pennation_angle_at_optimal,
                "max_contraction_velocity": mu.max_contraction_velocity,
                "path": [[pp.body, list(pp.point)] for pp in mu.path],
            }
            for mu in m.muscles
        ],
        "ligaments": [asdict(lig) for lig in m.ligaments],
        "contact_spheres": [
            {"id": s.id, "body": s.body, "center": list(s.center), "radius": s.radius}
            for s in m.contact_spheres
        ],
        "stations": {name: [st.body, list(st.point)] for name, st in m.stations},
        "poses": {name: list(q) for name, q in m.poses},
    }
    return doc


def save_model(m: ModelDefinition) -> str:
    """Canonical serialization: sorted keys, fixed indent, repr floats."""
    return json.dumps(_model_to_doc(m), sort_keys=True, indent=2) + "\n"


def _pair(v, path) -> Vec2:
    if not (isinstance(v, list) and len(v) == 2):
        raise ModelError("expected a 2-vector", path=path)
    return (float(v[0]), float(v[1]))


def load_model(document: str, strict: bool = False) -> ModelDefinition:
    """Parse, validate, and return a ModelDefinition.

    Schema violations raise ModelError naming the offending path.  Default
    topology deviations raise only when ``strict`` is set.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelError(f"not valid JSON: {exc}", path="$") from None
    if not isinstance(doc, dict):
        raise ModelError("document must be an object", path="$")
    if doc.get("version") != SCHEMA_VERSION:
        raise ModelError(f"unsupported version {doc.get('version')!r}", path="version")

    def req(key, path="$"):
        if key not in doc:
            raise ModelError(f"missing field {key!r}", path=path)
        return doc[key]

    try:
        bodies = tuple(
            BodyDef(
                name=str(b["name"]),
                mass=float(b["mass"]),
                inertia_zz=float(b["inertia_zz"]),
                com_offset=_pair(b["com_offset"], f"bodies[{i}].com_offset"),
                attached_contact_spheres=tuple(b.get("attached_contact_spheres", [])),
            )
            for i, b in enumerate(req("bodies"))
        )
        joints = tuple(
            JointDef(
                name=str(j["name"]),
                parent=str(j["parent"]),
                child=str(j["child"]),
                kind=str(j["kind"]),
                anchor_parent=_pair(j["anchor_parent"], f"joints[{i}].anchor_parent"),
                anchor_child=_pair(j["anchor_child"], f"joints[{i}].anchor_child"),
                range=tuple(j["range"]) if j.get("range") is not None else None,
            )
            for i, j in enumerate(req("joints"))
        )
        muscles = tuple(
            MuscleDef(
                name=str(mu["name"]),
                f_max_iso=float(mu["f_max_iso"]),
                optimal_fiber_length=float(mu["optimal_fiber_length"]),
                tendon_slack_length=float(mu["tendon_slack_length"]),
                pennation_angle_at_optimal=float(mu["pennation_angle_at_optimal"]),
                max_contraction_velocity=float(mu["max_contraction_velocity"]),
                path=tuple(
                    MusclePathPoint(body=str(p[0]),
                                    point=_pair(p[1], f"muscles[{i}].path[{k}]"))
                    for k, p in enumerate(mu["path"])
                ),
            )
            for i, mu in enumerate(req("muscles"))
        )
        ligaments = tuple(
            LigamentDef(
                joint=str(lig["joint"]),
                engage_angle_lo=float(lig["engage_angle_lo"]),
                engage_angle_hi=float(lig["engage_angle_hi"]),
                stiffness_scale=float(lig["stiffness_scale"]),
                exponent_rate=float(lig["exponent_rate"]),
            )
            for lig in req("ligaments")
        )
        spheres = tuple(
            ContactSphereDef(
                id=str(s["id"]),
                body=str(s["body"]),
                center=_pair(s["center"], f"contact_spheres[{i}].center"),
                radius=float(s["radius"]),
            )
            for i, s in enumerate(req("contact_spheres"))
        )
        cp = req("contact_params")
        contact_params = ContactParams(
            stiffness=float(cp["stiffness"]),
            exponent=float(cp["exponent"]),
            dissipation=float(cp["dissipation"]),
            friction=float(cp["friction"]),
            v_ref=float(cp["v_ref"]),
        )
        stations = tuple(
            (name, Station(body=str(v[0]), point=_pair(v[1], f"stations.{name}")))
            for name, v in sorted(doc.get("stations", {}).items())
        )
        poses = tuple(
            (name, tuple(float(x) for x in q))
            for name, q in sorted(doc.get("poses", {}).items())
        )
        model = ModelDefinition(
            bodies=bodies,
            joints=joints,
            muscles=muscles,
            ligaments=ligaments,
            contact_spheres=spheres,
            contact_params=contact_params,
            gravity=float(req("gravity")),
            tau_act=float(req("tau_act")),
            tau_deact=float(req("tau_deact")),
            joint_damping=float(doc.get("joint_damping", 0.0)),
            baseline_activation=float(doc.get("baseline_activation", 0.0)),
            tendon_mode=str(doc.get("tendon_mode", "rigid")),
            tendon_stiffness_scale=float(doc.get("tendon_stiffness_scale", 30.0)),
            stations=stations,
            poses=poses,
        )
    except ModelError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ModelError(f"malformed document: {exc!r}", path="$") from None

    validate_model(model, strict=strict)
    return model


# ---------------------------------------------------------------------------
# Default planar runner

# Segment masses [kg] and geometry [m] for a 75 kg, 1.8 m adult.
_HAT_MASS = 50.0          # pelvis + torso + head combined
_THIGH_MASS = 7.5
_SHANK_MASS = 3.5
_FOOT_MASS = 1.5
_THIGH_LEN = 0.43
_SHANK_LEN = 0.43
_PELVIS_H0 = 0.94         # standing pelvis height; feet exactly touch ground

# Hip flexion positive (thigh forward), knee flexion negative, ankle
# dorsiflexion positive.  Ligament engagement bands per joint [rad].
_HIP_BAND = (-0.35, 1.92)
_KNEE_BAND = (-2.09, 0.17)
_ANKLE_BAND = (-0.79, 0.52)
_LIG_SCALE = 10.0         # N m
_LIG_RATE = 5.0           # 1/rad

# Per-leg muscle set: name, F_max_iso [N], optimal fiber length [m],
# pennation at optimal [rad], path as (body, local point) via-points.
# Body names are templates; {s} expands to r/l.
_MUSCLE_TABLE = [
    ("hamstrings", 2594.0, 0.10, 0.26,
     [("pelvis", (-0.06, -0.01)), ("shank_{s}", (-0.035, -0.06))]),
    ("bifemsh", 557.0, 0.11, 0.40,
     [("thigh_{s}", (-0.03, -0.20)), ("shank_{s}", (-0.035, -0.07))]),
    ("glut_max", 1944.0, 0.14, 0.09,
     [("pelvis", (-0.07, 0.06)), ("thigh_{s}", (-0.04, -0.12))]),
    ("iliopsoas", 2342.0, 0.10, 0.14,
     [("pelvis", (0.03, 0.05)), ("pelvis", (0.06, -0.02)),
      ("thigh_{s}", (0.03, -0.10))]),
    ("rect_fem", 1169.0, 0.08, 0.09,
     [("pelvis", (0.04, 0.02)), ("thigh_{s}", (0.055, -0.40)),
      ("shank_{s}", (0.045, -0.07))]),
    ("vasti", 9594.0, 0.09, 0.05,
     [("thigh_{s}", (0.035, -0.15)), ("thigh_{s}", (0.055, -0.40)),
      ("shank_{s}", (0.045, -0.07))]),
    ("gastroc", 2241.0, 0.05, 0.30,
     [("thigh_{s}", (-0.035, -0.40)), ("foot_{s}", (-0.055, -0.03))]),
    ("soleus", 3549.0, 0.04, 0.44,
     [("shank_{s}", (-0.025, -0.15)), ("foot_{s}", (-0.055, -0.03))]),
    ("tib_ant", 1759.0, 0.07, 0.17,
     [("shank_{s}", (0.03, -0.20)), ("foot_{s}", (0.06, -0.01))]),
]


def _reference_origins() -> dict[str, Vec2]:
    """World-frame body origins in the reference pose (all angles zero)."""
    return {
        "pelvis": (0.0, _PELVIS_H0),
        "thigh_r": (0.0, _PELVIS_H0),
        "thigh_l": (0.0, _PELVIS_H0),
        "shank_r": (0.0, _PELVIS_H0 - _THIGH_LEN),
        "shank_l": (0.0, _PELVIS_H0 - _THIGH_LEN),
        "foot_r": (0.0, _PELVIS_H0 - _THIGH_LEN - _SHANK_LEN),
        "foot_l": (0.0, _PELVIS_H0 - _THIGH_LEN - _SHANK_LEN),
    }


def _reference_path_length(path: tuple[MusclePathPoint, ...]) -> float:
    origins = _reference_origins()
    pts = [(origins[p.body][0] + p.point[0], origins[p.body][1] + p.point[1])
           for p in path]
    return sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:]))


def _default_muscles() -> tuple[MuscleDef, ...]:
    muscles = []
    for side in ("r", "l"):
        for name, fmax, lopt, penn, path in _MUSCLE_TABLE:
            pts = tuple(
                MusclePathPoint(body=body.format(s=side), point=pt)
                for body, pt in path
            )
            # Tendon slack chosen so normalized fiber length is exactly 1 in
            # the reference pose.
            slack = _reference_path_length(pts) - lopt * math.cos(penn)
            muscles.append(MuscleDef(
                name=f"{name}_{side}",
                f_max_iso=fmax,
                optimal_fiber_length=lopt,
                tendon_slack_length=slack,
                pennation_angle_at_optimal=penn,
                max_contraction_velocity=10.0,
                path=pts,
            ))
    return tuple(muscles)


def default_model() -> ModelDefinition:
    """The shipped planar runner; identical on every call."""
    bodies = (
        BodyDef("pelvis", _HAT_MASS, 3.4, (0.0, 0.30)),
        BodyDef("thigh_r", _THIGH_MASS, 0.12, (0.0, -0.19)),
        BodyDef("shank_r", _SHANK_MASS, 0.055, (0.0, -0.19)),
        BodyDef("foot_r", _FOOT_MASS, 0.008, (0.06, -0.02),
                ("heel_r", "toe_r")),
        BodyDef("thigh_l", _THIGH_MASS, 0.12, (0.0, -0.19)),
        BodyDef("shank_l", _SHANK_MASS, 0.055, (0.0, -0.19)),
        BodyDef("foot_l", _FOOT_MASS, 0.008, (0.06, -0.02),
                ("heel_l", "toe_l")),
    )
    joints = (
        JointDef("ground_pelvis", GROUND, "pelvis", PLANAR_FREE),
        JointDef("hip_r", "pelvis", "thigh_r", REVOLUTE, range=(-1.2, 2.5)),
        JointDef("knee_r", "thigh_r", "shank_r", REVOLUTE,
                 anchor_parent=(0.0, -_THIGH_LEN), range=(-3.0, 0.8)),
        JointDef("ankle_r", "shank_r", "foot_r", REVOLUTE,
                 anchor_parent=(0.0, -_SHANK_LEN), range=(-1.5, 1.2)),
        JointDef("hip_l", "pelvis", "thigh_l", REVOLUTE, range=(-1.2, 2.5)),
        JointDef("knee_l", "thigh_l", "shank_l", REVOLUTE,
                 anchor_parent=(0.0, -_THIGH_LEN), range=(-3.0, 0.8)),
        JointDef("ankle_l", "shank_l", "foot_l", REVOLUTE,
                 anchor_parent=(0.0, -_SHANK_LEN), range=(-1.5, 1.2)),
    )
    ligaments = tuple(
        LigamentDef(joint=f"{jname}_{side}", engage_angle_lo=band[0],
                    engage_angle_hi=band[1], stiffness_scale=_LIG_SCALE,
                    exponent_rate=_LIG_RATE)
        for side in ("r", "l")
        for jname, band in (("hip", _HIP_BAND), ("knee", _KNEE_BAND),
                            ("ankle", _ANKLE_BAND))
    )
    spheres = tuple(
        ContactSphereDef(id=f"{part}_{side}", body=f"foot_{side}",
                         center=center, radius=0.05)
        for side in ("r", "l")
        for part, center in (("heel", (-0.05, -0.03)), ("toe", (0.18, -0.03)))
    )
    stations = (
        ("head", Station("pelvis", (0.0, 0.62))),
        ("pelvis", Station("pelvis", (0.0, 0.0))),
        ("talus_l", Station("foot_l", (0.0, 0.0))),
        ("talus_r", Station("foot_r", (0.0, 0.0))),
        ("toes_l", Station("foot_l", (0.20, -0.02))),
        ("toes_r", Station("foot_r", (0.20, -0.02))),
        ("torso", Station("pelvis", (0.0, 0.30))),
    )
    reference = (0.0, _PELVIS_H0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    # Balanced crouch for the static-settling check: symmetric near-standing
    # pose with slight knee hyperextension, tuned so the passive model stays
    # supported past 3 s with average vertical contact force near body weight.
    crouch = (0.0, 0.9554359278771164, -0.0079691, -0.02276836, 0.03798331,
              -0.01154876, -0.02276836, 0.03798331, -0.01154876)
    return ModelDefinition(
        bodies=bodies,
        joints=joints,
        muscles=_default_muscles(),
        ligaments=ligaments,
        contact_spheres=spheres,
        contact_params=ContactParams(stiffness=2.5e6, exponent=1.5,
                                     dissipation=1.0, friction=0.9, v_ref=0.1),
        gravity=9.80665,
        tau_act=0.01,
        tau_deact=0.04,
        joint_damping=1.0,
        baseline_activation=0.05,
        stations=stations,
        poses=(("crouch", crouch), ("reference", reference)),
    )


def load_default_file() -> ModelDefinition:
    """Load the shipped golden model file (equal to ``default_model()``)."""
    text = (importlib.resources.files("musclerun.data") / "default_model.json"
            ).read_text()
    return load_model(text, strict=True)
