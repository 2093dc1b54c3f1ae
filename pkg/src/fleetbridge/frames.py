"""Shared transform tree: anchors, pose composition, geodetic conversion.

Frames are planar (SE(2), z-up, right-handed).  Anchors are root frames;
every other frame hangs off exactly one parent at a time, latest edge
wins.  Geodetic conversion uses an equirectangular local tangent plane
around the anchor's fix, good to sub-centimeter at a few hundred meters
and documented up to 10 km.

Heading convention: compass bearing in degrees, clockwise from true
north, of the frame's +x axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .messages import AnchorRecord, FramedPose, wrap_angle

EARTH_RADIUS_M = 6378137.0  # WGS-84 equatorial radius
GEO_OFFSET_LIMIT_M = 10_000.0


class FrameError(Exception):
    """Base class for transform-tree failures."""


class NoPathError(FrameError):
    """The two frames are not connected through a common root."""


class CycleError(FrameError):
    """Inserting the edge would create a cycle."""


class NoGeoError(FrameError):
    """The anchor carries no geodetic pose."""


def compose(a: FramedPose, b: FramedPose, frame: str = "",
            stamp: float = 0.0) -> FramedPose:
    """SE(2) composition: pose of b's child expressed in a's parent frame."""
    c, s = math.cos(a.yaw), math.sin(a.yaw)
    return FramedPose(frame=frame or a.frame,
                      x=a.x + c * b.x - s * b.y,
                      y=a.y + s * b.x + c * b.y,
                      yaw=wrap_angle(a.yaw + b.yaw),
                      stamp=stamp or max(a.stamp, b.stamp))


def invert(p: FramedPose, frame: str = "") -> FramedPose:
    """SE(2) inverse: the parent's pose expressed in the child frame."""
    c, s = math.cos(p.yaw), math.sin(p.yaw)
    return FramedPose(frame=frame,
                      x=-(c * p.x + s * p.y),
                      y=s * p.x - c * p.y,
                      yaw=wrap_angle(-p.yaw),
                      stamp=p.stamp)


IDENTITY = FramedPose(frame="", x=0.0, y=0.0, yaw=0.0)


@dataclass
class _Edge:
    parent: str
    pose: FramedPose  # child expressed in parent
    stamp: float


class TransformTree:
    """Team-wide graph of timestamped parent->child poses rooted at anchors.

    Single-writer, multi-reader by contract: one ingest actor applies
    updates; readers get values that are never mutated in place.
    """

    def __init__(self):
        self._anchors: dict[str, AnchorRecord] = {}
        self._edges: dict[str, _Edge] = {}  # child -> its one parent edge

    @property
    def anchors(self) -> dict[str, AnchorRecord]:
        return dict(self._anchors)

    def anchor(self, anchor_id: str) -> AnchorRecord | None:
        return self._anchors.get(anchor_id)

    def add_anchor(self, record: AnchorRecord) -> None:
        """Register an anchor; non-root anchors also get a parent edge."""
        self._anchors[record.id] = record
        if record.parent is not None and record.pose_in_parent is not None:
            self.upsert_transform(record.parent, record.id,
                                  record.pose_in_parent,
                                  record.pose_in_parent.stamp)

    def frames(self) -> set[str]:
        names = set(self._anchors)
        for child, edge in self._edges.items():
            names.add(child)
            names.add(edge.parent)
        return names

    def knows(self, frame: str) -> bool:
        return frame in self._anchors or frame in self._edges or any(
            e.parent == frame for e in self._edges.values())

    def upsert_transform(self, parent: str, child: str, pose: FramedPose,
                         stamp: float) -> None:
        """Set the latest pose of child in parent; re-parents if needed.

        Stale updates (older stamp than the stored edge for the same
        parent/child) are ignored.  Rejects edges that would close a cycle.
        """
        if not self.knows(parent) and parent not in self._anchors:
            raise NoPathError(f"parent frame {parent!r} is not in the tree")
        existing = self._edges.get(child)
        if existing is not None and existing.parent == parent \
                and stamp < existing.stamp:
            return
        # Walking up from the new parent must not reach the child.
        hop = parent
        while hop is not None:
            if hop == child:
                raise CycleError(f"edge {parent!r}->{child!r} would close a cycle")
            edge = self._edges.get(hop)
            hop = edge.parent if edge is not None else None
        self._edges[child] = _Edge(parent=parent,
                                   pose=FramedPose(frame=parent, x=pose.x,
                                                   y=pose.y, yaw=pose.yaw,
                                                   stamp=stamp),
                                   stamp=stamp)

    def _root_of(self, frame: str) -> str:
        hop = frame
        while hop in self._edges:
            hop = self._edges[hop].parent
        return hop

    def _pose_in_root(self, frame: str) -> FramedPose:
        """Pose of `frame` expressed in its root, by composing up the chain."""
        chain = []
        hop = frame
        while hop in self._edges:
            chain.append(self._edges[hop].pose)
            hop = self._edges[hop].parent
        pose = IDENTITY
        for edge_pose in reversed(chain):
            pose = compose(pose, edge_pose)
        return FramedPose(frame=hop, x=pose.x, y=pose.y, yaw=pose.yaw,
                          stamp=pose.stamp)

    def lookup(self, from_frame: str, to_frame: str) -> FramedPose:
        """Pose of `to_frame` expressed in `from_frame`."""
        if not self.knows(from_frame):
            raise NoPathError(f"unknown frame {from_frame!r}")
        if not self.knows(to_frame):
            raise NoPathError(f"unknown frame {to_frame!r}")
        if from_frame == to_frame:
            return FramedPose(frame=from_frame, x=0.0, y=0.0, yaw=0.0)
        root_a = self._root_of(from_frame)
        root_b = self._root_of(to_frame)
        if root_a != root_b:
            raise NoPathError(
                f"{from_frame!r} and {to_frame!r} have no common root "
                f"({root_a!r} vs {root_b!r})")
        in_root_a = self._pose_in_root(from_frame)
        in_root_b = self._pose_in_root(to_frame)
        rel = compose(invert(in_root_a), in_root_b)
        return FramedPose(frame=from_frame, x=rel.x, y=rel.y, yaw=rel.yaw,
                          stamp=max(in_root_a.stamp, in_root_b.stamp))

    def closest_anchor(self, agent_frame: str,
                       anchors: list[str] | None = None) -> str:
        """Anchor with minimum planar distance to the agent.

        Ties break to the lexicographically smallest anchor id.
        """
        candidates = sorted(anchors if anchors is not None else self._anchors)
        best_id = None
        best_dist = math.inf
        for anchor_id in candidates:
            try:
                rel = self.lookup(anchor_id, agent_frame)
            except NoPathError:
                continue
            dist = math.hypot(rel.x, rel.y)
            if dist < best_dist:
                best_dist = dist
                best_id = anchor_id
        if best_id is None:
            raise NoPathError(f"{agent_frame!r} is not reachable from any anchor")
        return best_id


def to_geo(anchor: AnchorRecord, local: FramedPose) -> tuple[float, float, float]:
    """Extrapolate (lat deg, lon deg, heading deg) from an anchor-relative pose.

    Consumes nothing but the anchor's geodetic fix and the local pose, so
    it works with no GPS coverage at all.
    """
    if anchor.geo is None:
        raise NoGeoError(f"anchor {anchor.id!r} has no geodetic pose")
    offset = math.hypot(local.x, local.y)
    if offset >= GEO_OFFSET_LIMIT_M:
        raise FrameError(f"offset {offset:.0f} m outside the small-offset regime")
    psi = math.radians(anchor.geo.heading_deg)
    east = local.x * math.sin(psi) - local.y * math.cos(psi)
    north = local.x * math.cos(psi) + local.y * math.sin(psi)
    lat0 = math.radians(anchor.geo.lat_deg)
    lat = anchor.geo.lat_deg + math.degrees(north / EARTH_RADIUS_M)
    lon = anchor.geo.lon_deg + math.degrees(
        east / (EARTH_RADIUS_M * math.cos(lat0)))
    heading = (anchor.geo.heading_deg - math.degrees(local.yaw)) % 360.0
    return (lat, lon, heading)


def from_geo(anchor: AnchorRecord,
             fix: tuple[float, float, float]) -> FramedPose:
    """Exact inverse of to_geo under the same tangent-plane approximation."""
    if anchor.geo is None:
        raise NoGeoError(f"anchor {anchor.id!r} has no geodetic pose")
    lat_deg, lon_deg, heading_deg = fix
    lat0 = math.radians(anchor.geo.lat_deg)
    north = math.radians(lat_deg - anchor.geo.lat_deg) * EARTH_RADIUS_M
    east = math.radians(lon_deg - anchor.geo.lon_deg) \
        * EARTH_RADIUS_M * math.cos(lat0)
    if math.hypot(east, north) >= GEO_OFFSET_LIMIT_M:
        raise FrameError("fix outside the small-offset regime")
    psi = math.radians(anchor.geo.heading_deg)
    x = east * math.sin(psi) + north * math.cos(psi)
    y = -east * math.cos(psi) + north * math.sin(psi)
    yaw = wrap_angle(math.radians(anchor.geo.heading_deg - heading_deg))
    return FramedPose(frame=anchor.id, x=x, y=y, yaw=yaw)
