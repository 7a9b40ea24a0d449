import { describe, expect, it } from "vitest";

import { mapSvg, markers, popupHtml, project, unlocatedHtml } from "../src/map.js";
import { client } from "./live.js";

describe("projection", () => {
  it("maps the corners and the origin into the viewBox", () => {
    expect(project(-180, 90)).toEqual({ x: 0, y: 0 });
    expect(project(180, -90)).toEqual({ x: 720, y: 360 });
    expect(project(0, 0)).toEqual({ x: 360, y: 180 });
  });
});

describe("site map", () => {
  it("places one marker per feature", async () => {
    const doc = await client.mapDoc();
    const placed = markers(doc);
    expect(placed).toHaveLength(doc.features.length);
    for (const marker of placed) {
      expect(marker.x).toBeGreaterThanOrEqual(0);
      expect(marker.x).toBeLessThanOrEqual(720);
      expect(marker.y).toBeGreaterThanOrEqual(0);
      expect(marker.y).toBeLessThanOrEqual(360);
    }
    const svg = mapSvg(doc);
    expect(svg.match(/class="marker"/g) ?? []).toHaveLength(doc.features.length);
  });

  it("pops up every library held at a point, with provenance labels", async () => {
    const doc = await client.mapDoc();
    const paris = doc.features[0]!;
    expect(paris.properties.libraries).toHaveLength(2);
    const html = popupHtml(paris);
    expect(html).toContain("Félix Bracquemond");
    expect(html).toContain("Henri Fantin-Latour");
    expect(html).toContain("material fonds");
    expect(html).toContain("inventory");
    expect(html).toContain(`href="#/library/bracquemond"`);
    expect(html).toContain(`href="#/library/fantin"`);
  });

  it("lists unlocated libraries outside the map", async () => {
    const doc = await client.mapDoc();
    const html = unlocatedHtml(doc);
    expect(html).toContain("Odilon Redon");
    expect(html).toContain("sales catalog");
  });
});
