/**
 * Map-side geodesy: express a root-frame point as lat/lon using a
 * geo-referenced anchor (equirectangular tangent plane, mirroring the
 * backend's conversion so readouts agree with the GeoJSON export).
 */

export const EARTH_RADIUS_M = 6378137.0;

export interface GeoAnchor {
  pose: { x: number; y: number; yaw: number }; // anchor in root frame
  geo: { lat_deg: number; lon_deg: number; heading_deg: number };
}

export function pointToGeo(
  anchor: GeoAnchor,
  x: number,
  y: number,
): { lat: number; lon: number } {
  // root -> anchor-local
  const dx = x - anchor.pose.x;
  const dy = y - anchor.pose.y;
  const c = Math.cos(-anchor.pose.yaw);
  const s = Math.sin(-anchor.pose.yaw);
  const lx = c * dx - s * dy;
  const ly = s * dx + c * dy;
  // anchor-local -> east/north via the anchor's compass heading
  const psi = (anchor.geo.heading_deg * Math.PI) / 180;
  const east = lx * Math.sin(psi) - ly * Math.cos(psi);
  const north = lx * Math.cos(psi) + ly * Math.sin(psi);
  const lat0 = (anchor.geo.lat_deg * Math.PI) / 180;
  const lat = anchor.geo.lat_deg + (north / EARTH_RADIUS_M) * (180 / Math.PI);
  const lon =
    anchor.geo.lon_deg +
    (east / (EARTH_RADIUS_M * Math.cos(lat0))) * (180 / Math.PI);
  return { lat, lon };
}

export function formatGeo(p: { lat: number; lon: number }): string {
  return `${p.lat.toFixed(6)}, ${p.lon.toFixed(6)}`;
}
