"""Simulated world description: geometry, geo-reference, reachable shooting
region, sun/illumination state and deterministic dynamic agents.

Scenes are immutable after loading; every function here is pure, so all of
them are safe to call from multiple threads.
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np


class SceneParseError(ValueError):
    """Raised for malformed scene text (bad JSON, wrong value types)."""


class SceneValidationError(ValueError):
    """Raised when a structurally valid scene violates an invariant.

    The message always starts with the offending field path.
    """


@dataclass(frozen=True)
class GeoReference:
    lat0: float
    lon0: float
    alt0: float
    heading_deg: float  # compass bearing of local +x, 0 = North, CW positive

    def validate(self, prefix="georef"):
        if not -90.0 <= self.lat0 <= 90.0:
            raise SceneValidationError(f"{prefix}.lat0: must be in [-90, 90]")
        if not -180.0 <= self.lon0 <= 180.0:
            raise SceneValidationError(f"{prefix}.lon0: must be in [-180, 180]")
        if not 0.0 <= self.heading_deg < 360.0:
            raise SceneValidationError(
                f"{prefix}.heading_deg: must be in [0, 360)")


@dataclass(frozen=True)
class FlatGround:
    albedo: float

    def validate(self, prefix="ground"):
        if not 0.0 <= self.albedo <= 1.0:
            raise SceneValidationError(f"{prefix}.albedo: must be in [0, 1]")


@dataclass(frozen=True)
class Heightfield:
    origin: tuple          # (x, y) of grid corner, meters
    cell_size: float       # meters per cell
    elevations: tuple      # rows x cols of elevation meters
    albedo: float

    def validate(self, prefix="ground"):
        if not 0.0 <= self.albedo <= 1.0:
            raise SceneValidationError(f"{prefix}.albedo: must be in [0, 1]")
        if self.cell_size <= 0:
            raise SceneValidationError(f"{prefix}.cell_size: must be > 0")
        rows = self.elevations
        if len(rows) < 2 or len(rows[0]) < 2:
            raise SceneValidationError(
                f"{prefix}.elevations: need at least a 2x2 grid")
        ncols = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise SceneValidationError(
                    f"{prefix}.elevations: row {i} has {len(row)} entries, "
                    f"expected {ncols} (grid must be rectangular)")

    def grid(self):
        return np.asarray(self.elevations, dtype=np.float64)

    def extent(self):
        """(xmin, xmax, ymin, ymax) covered by the grid."""
        rows = len(self.elevations)
        cols = len(self.elevations[0])
        x0, y0 = self.origin
        return (x0, x0 + (cols - 1) * self.cell_size,
                y0, y0 + (rows - 1) * self.cell_size)


@dataclass(frozen=True)
class Solid:
    center: tuple   # (x, y, z) meters
    size: tuple     # (sx, sy, sz) meters, all > 0
    albedo: tuple   # (r, g, b) in [0, 1]
    landmark: float | None = None  # saliency weight in (0, 1]

    def validate(self, prefix="solid"):
        if any(s <= 0 for s in self.size):
            raise SceneValidationError(
                f"{prefix}.size: all components must be > 0, got {self.size}")
        if any(not 0.0 <= a <= 1.0 for a in self.albedo):
            raise SceneValidationError(
                f"{prefix}.albedo: components must be in [0, 1]")
        if self.landmark is not None and not 0.0 < self.landmark <= 1.0:
            raise SceneValidationError(
                f"{prefix}.landmark: weight must be in (0, 1]")

    def aabb(self):
        c, s = self.center, self.size
        return ((c[0] - s[0] / 2, c[1] - s[1] / 2, c[2] - s[2] / 2),
                (c[0] + s[0] / 2, c[1] + s[1] / 2, c[2] + s[2] / 2))


@dataclass(frozen=True)
class Rect:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def validate(self, prefix="rect"):
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise SceneValidationError(
                f"{prefix}: must have positive area")

    def contains(self, x, y):
        return (self.xmin <= x <= self.xmax) and (self.ymin <= y <= self.ymax)


@dataclass(frozen=True)
class ReachableRegion:
    rects: tuple            # tuple of Rect
    height_range: tuple     # (min_m, max_m)

    def validate(self, prefix="reachable"):
        if not self.rects:
            raise SceneValidationError(
                f"{prefix}.rects: at least one rectangle required")
        for i, r in enumerate(self.rects):
            r.validate(f"{prefix}.rects[{i}]")
        lo, hi = self.height_range
        if lo > hi:
            raise SceneValidationError(
                f"{prefix}.height_range: min must be <= max")


@dataclass(frozen=True)
class AgentRoute:
    kind: str               # "person" or "vehicle"
    polyline: tuple         # ((x, y), ...) with >= 2 points
    speed: float            # m/s, > 0
    count: int
    phase_spread: float     # fraction of route length in [0, 1]

    def validate(self, prefix="agent"):
        if self.kind not in ("person", "vehicle"):
            raise SceneValidationError(
                f"{prefix}.kind: must be 'person' or 'vehicle'")
        if len(self.polyline) < 2:
            raise SceneValidationError(
                f"{prefix}.polyline: need at least 2 points")
        if self.length() <= 0:
            raise SceneValidationError(
                f"{prefix}.polyline: total length must be > 0")
        if self.speed <= 0:
            raise SceneValidationError(f"{prefix}.speed: must be > 0")
        if self.count < 1:
            raise SceneValidationError(f"{prefix}.count: must be >= 1")
        if not 0.0 <= self.phase_spread <= 1.0:
            raise SceneValidationError(
                f"{prefix}.phase_spread: must be in [0, 1]")

    def length(self):
        pts = self.polyline
        return sum(math.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))


@dataclass(frozen=True)
class SkyParams:
    day_zenith: tuple     # linear RGB in [0, 1]
    night_zenith: tuple
    haze: float           # horizon haze factor in [0, 1]

    def validate(self, prefix="sky"):
        for name, col in (("day_zenith", self.day_zenith),
                          ("night_zenith", self.night_zenith)):
            if any(not 0.0 <= c <= 1.0 for c in col):
                raise SceneValidationError(
                    f"{prefix}.{name}: components must be in [0, 1]")
        if not 0.0 <= self.haze <= 1.0:
            raise SceneValidationError(f"{prefix}.haze: must be in [0, 1]")


@dataclass(frozen=True)
class SunState:
    direction: tuple      # unit vector toward the sun, scene frame
    elevation_deg: float
    azimuth_deg: float    # compass, 0 = North, CW positive
    irradiance: float     # [0, 1]
    warmth: float         # [0, 1], 1 = low warm sun


@dataclass(frozen=True)
class SceneDescription:
    name: str
    georef: GeoReference
    ground: object                  # FlatGround | Heightfield
    solids: tuple
    reachable: ReachableRegion
    agents: tuple
    sky: SkyParams
    _route_lengths: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_route_lengths",
            tuple(a.length() for a in self.agents))

    def validate(self):
        self.georef.validate()
        self.ground.validate()
        for i, s in enumerate(self.solids):
            s.validate(f"solids[{i}]")
        self.reachable.validate()
        for i, a in enumerate(self.agents):
            a.validate(f"agents[{i}]")
        self.sky.validate()
        bx0, bx1, by0, by1 = self.horizontal_bounds()
        for i, r in enumerate(self.reachable.rects):
            if r.xmin < bx0 or r.xmax > bx1 or r.ymin < by0 or r.ymax > by1:
                raise SceneValidationError(
                    f"reachable.rects[{i}]: lies outside the scene's "
                    f"horizontal bounds ({bx0}, {bx1}, {by0}, {by1})")
        return self

    def horizontal_bounds(self):
        """(xmin, xmax, ymin, ymax).

        Heightfield scenes are bounded by the grid extent; flat scenes by
        the padded bounding box of everything placed in them.
        """
        if isinstance(self.ground, Heightfield):
            return self.ground.extent()
        xs, ys = [0.0], [0.0]
        for s in self.solids:
            (x0, y0, _), (x1, y1, _) = s.aabb()
            xs += [x0, x1]
            ys += [y0, y1]
        for r in self.reachable.rects:
            xs += [r.xmin, r.xmax]
            ys += [r.ymin, r.ymax]
        for a in self.agents:
            xs += [p[0] for p in a.polyline]
            ys += [p[1] for p in a.polyline]
        pad = max(10.0, 0.5 * max(max(xs) - min(xs), max(ys) - min(ys)))
        return (min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)

    def diagonal(self):
        """Length of the scene's 3D bounding-box diagonal, meters."""
        x0, x1, y0, y1 = self.horizontal_bounds()
        ztop = self.reachable.height_range[1]
        for s in self.solids:
            ztop = max(ztop, s.aabb()[1][2])
        if isinstance(self.ground, Heightfield):
            ztop = max(ztop, float(self.ground.grid().max()))
        return math.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2 + ztop ** 2)

    def highest_landmark(self):
        """The landmark Solid with the largest weight, or None.

        Ties resolve to the first solid in declaration order.
        """
        best = None
        for s in self.solids:
            if s.landmark is not None:
                if best is None or s.landmark > best.landmark:
                    best = s
        return best

    def ground_height(self, x, y):
        """Terrain elevation under (x, y); 0 for flat ground."""
        if isinstance(self.ground, FlatGround):
            return 0.0
        return bilinear_height(self.ground.grid(), self.ground.origin,
                               self.ground.cell_size, x, y)


def bilinear_height(grid, origin, cell, x, y):
    """Bilinearly interpolated heightfield sample, clamped at the edges."""
    rows, cols = grid.shape
    fx = (x - origin[0]) / cell
    fy = (y - origin[1]) / cell
    fx = min(max(fx, 0.0), cols - 1.0)
    fy = min(max(fy, 0.0), rows - 1.0)
    ix = min(int(fx), cols - 2)
    iy = min(int(fy), rows - 2)
    tx = fx - ix
    ty = fy - iy
    h00 = grid[iy, ix]
    h01 = grid[iy, ix + 1]
    h10 = grid[iy + 1, ix]
    h11 = grid[iy + 1, ix + 1]
    return float((h00 * (1 - tx) + h01 * tx) * (1 - ty)
                 + (h10 * (1 - tx) + h11 * tx) * ty)


# ---------------------------------------------------------------------------
# scene file format (JSON syntax, exact field names, unknown keys rejected)

_TOP_KEYS = ("name", "georef", "ground", "solids", "reachable", "agents", "sky")


def _require_keys(obj, allowed, required, where):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise SceneParseError(
            f"{where}: unknown key(s) {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise SceneParseError(
            f"{where}: missing key(s) {sorted(missing)}")


def _num(obj, key, where):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SceneParseError(f"{where}.{key}: expected a number")
    return float(v)


def _vec(obj, key, n, where):
    v = obj[key]
    if (not isinstance(v, list) or len(v) != n
            or any(isinstance(c, bool) or not isinstance(c, (int, float))
                   for c in v)):
        raise SceneParseError(f"{where}.{key}: expected {n} numbers")
    return tuple(float(c) for c in v)


def load_scene(source: str) -> SceneDescription:
    """Parse and validate a scene file.

    Raises SceneParseError for malformed text and SceneValidationError
    (naming the field) for invariant violations.
    """
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"scene file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SceneParseError("scene file must be a JSON object")
    _require_keys(doc, _TOP_KEYS, _TOP_KEYS, "scene")

    if not isinstance(doc["name"], str):
        raise SceneParseError("name: expected a string")

    g = doc["georef"]
    _require_keys(g, ("lat0", "lon0", "alt0", "heading_deg"),
                  ("lat0", "lon0", "alt0", "heading_deg"), "georef")
    georef = GeoReference(_num(g, "lat0", "georef"), _num(g, "lon0", "georef"),
                          _num(g, "alt0", "georef"),
                          _num(g, "heading_deg", "georef"))

    gr = doc["ground"]
    if not isinstance(gr, dict) or "kind" not in gr:
        raise SceneParseError("ground: expected an object with a 'kind' key")
    if gr["kind"] == "flat":
        _require_keys(gr, ("kind", "albedo"), ("kind", "albedo"), "ground")
        ground = FlatGround(_num(gr, "albedo", "ground"))
    elif gr["kind"] == "heightfield":
        _require_keys(gr, ("kind", "origin", "cell_size", "elevations",
                           "albedo"),
                      ("kind", "origin", "cell_size", "elevations", "albedo"),
                      "ground")
        rows = gr["elevations"]
        if not isinstance(rows, list) or not all(
                isinstance(r, list) for r in rows):
            raise SceneParseError("ground.elevations: expected a 2D array")
        ground = Heightfield(
            origin=_vec(gr, "origin", 2, "ground"),
            cell_size=_num(gr, "cell_size", "ground"),
            elevations=tuple(tuple(float(v) for v in r) for r in rows),
            albedo=_num(gr, "albedo", "ground"))
    else:
        raise SceneParseError(
            f"ground.kind: expected 'flat' or 'heightfield', got {gr['kind']!r}")

    solids = []
    if not isinstance(doc["solids"], list):
        raise SceneParseError("solids: expected a list")
    for i, s in enumerate(doc["solids"]):
        where = f"solids[{i}]"
        _require_keys(s, ("center", "size", "albedo", "landmark"),
                      ("center", "size", "albedo"), where)
        solids.append(Solid(
            center=_vec(s, "center", 3, where),
            size=_vec(s, "size", 3, where),
            albedo=_vec(s, "albedo", 3, where),
            landmark=(_num(s, "landmark", where)
                      if "landmark" in s else None)))

    r = doc["reachable"]
    _require_keys(r, ("rects", "height_range"), ("rects", "height_range"),
                  "reachable")
    if not isinstance(r["rects"], list):
        raise SceneParseError("reachable.rects: expected a list")
    rects = []
    for i, rc in enumerate(r["rects"]):
        where = f"reachable.rects[{i}]"
        _require_keys(rc, ("xmin", "xmax", "ymin", "ymax"),
                      ("xmin", "xmax", "ymin", "ymax"), where)
        rects.append(Rect(_num(rc, "xmin", where), _num(rc, "xmax", where),
                          _num(rc, "ymin", where), _num(rc, "ymax", where)))
    reachable = ReachableRegion(
        rects=tuple(rects),
        height_range=_vec(r, "height_range", 2, "reachable"))

    agents = []
    if not isinstance(doc["agents"], list):
        raise SceneParseError("agents: expected a list")
    for i, a in enumerate(doc["agents"]):
        where = f"agents[{i}]"
        _require_keys(a, ("kind", "polyline", "speed", "count",
                          "phase_spread"),
                      ("kind", "polyline", "speed", "count", "phase_spread"),
                      where)
        pl = a["polyline"]
        if not isinstance(pl, list) or len(pl) < 2:
            raise SceneParseError(
                f"{where}.polyline: expected a list of >= 2 points")
        poly = tuple(
            tuple(float(c) for c in p) if isinstance(p, list) and len(p) == 2
            else _bad_point(where) for p in pl)
        count = a["count"]
        if isinstance(count, bool) or not isinstance(count, int):
            raise SceneParseError(f"{where}.count: expected an integer")
        if not isinstance(a["kind"], str):
            raise SceneParseError(f"{where}.kind: expected a string")
        agents.append(AgentRoute(
            kind=a["kind"], polyline=poly,
            speed=_num(a, "speed", where), count=count,
            phase_spread=_num(a, "phase_spread", where)))

    sk = doc["sky"]
    _require_keys(sk, ("day_zenith", "night_zenith", "haze"),
                  ("day_zenith", "night_zenith", "haze"), "sky")
    sky = SkyParams(day_zenith=_vec(sk, "day_zenith", 3, "sky"),
                    night_zenith=_vec(sk, "night_zenith", 3, "sky"),
                    haze=_num(sk, "haze", "sky"))

    scene = SceneDescription(
        name=doc["name"], georef=georef, ground=ground,
        solids=tuple(solids), reachable=reachable, agents=tuple(agents),
        sky=sky)
    return scene.validate()


def _bad_point(where):
    raise SceneParseError(f"{where}.polyline: points must be [x, y] pairs")


def scene_to_dict(scene: SceneDescription) -> dict:
    if isinstance(scene.ground, FlatGround):
        ground = {"kind": "flat", "albedo": scene.ground.albedo}
    else:
        ground = {"kind": "heightfield",
                  "origin": list(scene.ground.origin),
                  "cell_size": scene.ground.cell_size,
                  "elevations": [list(r) for r in scene.ground.elevations],
                  "albedo": scene.ground.albedo}
    solids = []
    for s in scene.solids:
        d = {"center": list(s.center), "size": list(s.size),
             "albedo": list(s.albedo)}
        if s.landmark is not None:
            d["landmark"] = s.landmark
        solids.append(d)
    return {
        "name": scene.name,
        "georef": {"lat0": scene.georef.lat0, "lon0": scene.georef.lon0,
                   "alt0": scene.georef.alt0,
                   "heading_deg": scene.georef.heading_deg},
        "ground": ground,
        "solids": solids,
        "reachable": {
            "rects": [{"xmin": r.xmin, "xmax": r.xmax,
                       "ymin": r.ymin, "ymax": r.ymax}
                      for r in scene.reachable.rects],
            "height_range": list(scene.reachable.height_range)},
        "agents": [{"kind": a.kind, "polyline": [list(p) for p in a.polyline],
                    "speed": a.speed, "count": a.count,
                    "phase_spread": a.phase_spread} for a in scene.agents],
        "sky": {"day_zenith": list(scene.sky.day_zenith),
                "night_zenith": list(scene.sky.night_zenith),
                "haze": scene.sky.haze},
    }


def serialize_scene(scene: SceneDescription) -> str:
    """Canonical scene file text; load_scene(serialize_scene(s)) == s."""
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


# ---------------------------------------------------------------------------
# sun position

SOLAR_TILT_DEG = 23.44


def _day_of_year(t: datetime) -> int:
    return t.timetuple().tm_yday


def solar_declination_deg(t: datetime) -> float:
    n = _day_of_year(t)
    return SOLAR_TILT_DEG * math.sin(2.0 * math.pi * (284 + n) / 365.0)


def solar_hour(georef: GeoReference, t: datetime) -> float:
    """Local solar time in fractional hours, from UTC plus lon/15."""
    t = _as_utc(t)
    utc_h = t.hour + t.minute / 60.0 + t.second / 3600.0 \
        + t.microsecond / 3.6e9
    return (utc_h + georef.lon0 / 15.0) % 24.0


def _as_utc(t: datetime) -> datetime:
    if t.tzinfo is None:
        return t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


def sun_state(georef: GeoReference, t: datetime) -> SunState:
    """Sun direction and illumination state at UTC time t.

    Analytic model: dayofyear declination, hour angle from longitude-shifted
    solar time, azimuth disambiguated by the hour angle's sign. Accurate to
    about a degree, which is plenty for lighting plausibility.
    """
    lat = math.radians(georef.lat0)
    dec = math.radians(solar_declination_deg(_as_utc(t)))
    hour = solar_hour(georef, t)
    ha = math.radians(15.0 * (hour - 12.0))

    sin_el = (math.sin(lat) * math.sin(dec)
              + math.cos(lat) * math.cos(dec) * math.cos(ha))
    sin_el = min(max(sin_el, -1.0), 1.0)
    el = math.asin(sin_el)
    el_deg = math.degrees(el)

    cos_el = math.cos(el)
    if cos_el < 1e-9 or abs(math.cos(lat)) < 1e-9:
        az_deg = 180.0  # zenith/pole: azimuth is arbitrary
    else:
        cos_az = (math.sin(dec) - sin_el * math.sin(lat)) / (cos_el * math.cos(lat))
        cos_az = min(max(cos_az, -1.0), 1.0)
        az_deg = math.degrees(math.acos(cos_az))
        if math.sin(ha) > 0.0:  # afternoon: sun is west of the meridian
            az_deg = 360.0 - az_deg

    rel = math.radians(az_deg - georef.heading_deg)
    direction = (cos_el * math.cos(rel), -cos_el * math.sin(rel), sin_el)

    direct = min(max(sin_el, 0.0), 1.0)
    twilight = min(max((el_deg + 6.0) / 6.0, 0.0), 1.0)
    irradiance = direct + 0.08 * twilight * (1.0 - direct)
    warmth = min(max(1.0 - el_deg / 30.0, 0.0), 1.0) if el_deg >= 0 else 0.0

    return SunState(direction=direction, elevation_deg=el_deg,
                    azimuth_deg=az_deg, irradiance=irradiance, warmth=warmth)


def daylight_window(georef: GeoReference, date: datetime):
    """(sunrise, sunset) UTC datetimes for the date's solar day.

    Falls back to the full civil day when the sun never rises or never sets
    at this latitude.
    """
    date = _as_utc(date)
    noon_solar = 12.0 - georef.lon0 / 15.0
    base = date.replace(hour=0, minute=0, second=0, microsecond=0)
    noon = base + _hours(noon_solar)
    dec = math.radians(solar_declination_deg(noon))
    lat = math.radians(georef.lat0)
    cos_h0 = -math.tan(lat) * math.tan(dec)
    if cos_h0 <= -1.0 or cos_h0 >= 1.0:
        return base, base + _hours(24.0)
    h0 = math.degrees(math.acos(cos_h0)) / 15.0  # half day length, hours
    return noon - _hours(h0), noon + _hours(h0)


def _hours(h):
    from datetime import timedelta
    return timedelta(hours=h)


# ---------------------------------------------------------------------------
# dynamic agents

AGENT_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def _phase_offsets(route: AgentRoute, route_index: int, seed: int):
    length = route.length()
    if route.phase_spread == 0.0:
        return [0.0] * route.count
    rng = np.random.default_rng(
        [seed % (2 ** 63), route_index, 0x5eed])
    draws = rng.random(route.count)
    return [float(u) * route.phase_spread * length for u in draws]


def agent_positions(scene: SceneDescription, t: datetime, seed: int):
    """Positions of every agent at time t.

    Returns a list of (kind, (x, y), heading_deg). Deterministic in
    (scene, t, seed): agents advance at constant speed along their route
    with wraparound, offset by seeded phases spread over the route.
    """
    t = _as_utc(t)
    dt = (t - AGENT_EPOCH).total_seconds()
    out = []
    for ri, route in enumerate(scene.agents):
        length = scene._route_lengths[ri]
        offsets = _phase_offsets(route, ri, seed)
        for off in offsets:
            arc = (off + route.speed * dt) % length
            out.append((route.kind,) + _point_at_arc(route.polyline, arc))
    return out


def _point_at_arc(polyline, arc):
    remaining = arc
    for i in range(len(polyline) - 1):
        a, b = polyline[i], polyline[i + 1]
        seg = math.dist(a, b)
        if seg <= 0:
            continue
        if remaining <= seg:
            f = remaining / seg
            x = a[0] + f * (b[0] - a[0])
            y = a[1] + f * (b[1] - a[1])
            heading = math.degrees(math.atan2(b[1] - a[1], b[0] - a[0]))
            return ((x, y), heading)
        remaining -= seg
    # arc == length lands exactly on the final vertex
    a, b = polyline[-2], polyline[-1]
    heading = math.degrees(math.atan2(b[1] - a[1], b[0] - a[0]))
    return ((b[0], b[1]), heading)


def is_reachable(region: ReachableRegion, p) -> bool:
    """True iff (x, y) is inside any rect and z within the height range."""
    x, y, z = p
    lo, hi = region.height_range
    if not lo <= z <= hi:
        return False
    return any(r.contains(x, y) for r in region.rects)
