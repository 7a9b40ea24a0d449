/**
 * Clickable map of holding sites, drawn straight from /api/map.geojson.
 *
 * A full tile service is deliberately out of scope: features are few
 * (one per distinct coordinate pair), so an SVG dot map with a degree
 * graticule reads fine and keeps the bundle free of map dependencies.
 */
import type { LibraryProperties, MapDoc, MapFeature } from "./types.js";
import { esc, frag } from "./html.js";
import { provenanceLabel } from "./views.js";

export interface Marker {
  /** SVG user units within the 720x360 viewBox. */
  x: number;
  y: number;
  feature: MapFeature;
}

const WIDTH = 720;
const HEIGHT = 360;

// Equirectangular: 2 units per degree of longitude, 2 per degree of latitude.
export function project(lon: number, lat: number): { x: number; y: number } {
  return { x: (lon + 180) * 2, y: (90 - lat) * 2 };
}

export function markers(doc: MapDoc): Marker[] {
  return doc.features.map((feature) => {
    const [lon, lat] = feature.geometry.coordinates;
    return { ...project(lon, lat), feature };
  });
}

function libraryLine(lib: LibraryProperties): string {
  return (
    `<li><a href="#/library/${esc(lib.slug)}">${esc(lib.artist_name)}</a>` +
    ` <span class="muted">(${esc(provenanceLabel(lib.provenance))})</span></li>`
  );
}

/** Popup body: every library held at this point, with provenance. */
export function popupHtml(feature: MapFeature): string {
  const libs = feature.properties.libraries.map(libraryLine).join("");
  return frag(
    `<div class="popup">`,
    feature.properties.site_name
      ? `<h4>${esc(feature.properties.site_name)}</h4>`
      : "",
    `<ul>${libs}</ul>`,
    `</div>`,
  );
}

export function unlocatedHtml(doc: MapDoc): string {
  if (!doc.unlocated.length) return "";
  return frag(
    `<h3>Without a located holding site</h3>`,
    `<ul class="unlocated">${doc.unlocated.map(libraryLine).join("")}</ul>`,
  );
}

export function mapSvg(doc: MapDoc): string {
  const grid: string[] = [];
  for (let lon = -180; lon <= 180; lon += 30) {
    const { x } = project(lon, 0);
    grid.push(`<line x1="${x}" y1="0" x2="${x}" y2="${HEIGHT}" class="graticule"/>`);
  }
  for (let lat = -90; lat <= 90; lat += 30) {
    const { y } = project(0, lat);
    grid.push(`<line x1="0" y1="${y}" x2="${WIDTH}" y2="${y}" class="graticule"/>`);
  }
  const dots = markers(doc)
    .map(
      (m, i) =>
        `<circle class="marker" data-feature="${i}" cx="${m.x}" cy="${m.y}"` +
        ` r="${4 + 2 * (m.feature.properties.libraries.length - 1)}">` +
        `<title>${esc(m.feature.properties.site_name)}</title></circle>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="site-map" role="img"` +
    ` aria-label="map of library holding sites">` +
    `${grid.join("")}${dots}</svg>`
  );
}
