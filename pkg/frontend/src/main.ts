/** DOM wiring: storyline canvas, synchronized text view, and side views. */

import { Api } from "./api.js";
import { shadeColor, storylineGeometry } from "./geometry.js";
import { StoryStore, findSceneByRef, sceneTarget } from "./state.js";
import type { TextPayload } from "./types.js";
import {
  arcDiagram,
  barsGeometry,
  communityColor,
  docColor,
  forceLayout,
} from "./views.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const api = new Api();
const store = new StoryStore(api);
let textPayload: TextPayload | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string | number> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

// --- storyline -------------------------------------------------------------

function renderStoryline(): void {
  const layout = store.layout;
  const host = byId("storyline");
  host.textContent = "";
  if (!layout) return;
  const geometry = storylineGeometry(layout, store.state);
  const [lo, hi] = geometry.extent;
  const pad = 120;
  const indicatorY = geometry.height + 48;
  const svg = svgEl("svg", {
    viewBox: `${lo - pad} -32 ${hi - lo + pad * 2} ${indicatorY + 72}`,
    class: "storyline-svg",
  });

  for (const sep of geometry.separators) {
    svg.appendChild(
      svgEl("line", {
        x1: sep.x, x2: sep.x, y1: -24, y2: indicatorY + 8, class: "separator",
      }),
    );
    const label = svgEl("text", { x: sep.x + 4, y: -12, class: "separator-label" });
    label.textContent = sep.title;
    svg.appendChild(label);
  }

  for (const scene of geometry.scenes) {
    const rect = svgEl("rect", {
      x: scene.x, y: scene.y, width: scene.width, height: scene.height,
      rx: 7, class: scene.selected ? "scene selected" : "scene",
    });
    rect.addEventListener("click", () => onSceneClick(scene.sceneIndex));
    svg.appendChild(rect);
  }

  for (const line of geometry.lifelines) {
    const path = svgEl("path", {
      d: line.path, fill: "none", stroke: line.color,
      "stroke-width": line.width, "stroke-opacity": line.opacity,
      "stroke-linecap": "round", class: "lifeline",
    });
    path.addEventListener("click", () => {
      store.selectEntity(line.entity);
      renderStoryline();
      renderText();
    });
    svg.appendChild(path);
    const label = svgEl("text", {
      x: line.labelX - 6, y: line.labelY + 4,
      "text-anchor": "end", class: "lifeline-label", fill: line.color,
      "fill-opacity": line.opacity,
    });
    label.textContent = line.entity;
    label.addEventListener("click", () => {
      store.selectEntity(line.entity);
      renderStoryline();
      renderText();
    });
    svg.appendChild(label);
  }

  for (const ind of geometry.indicators) {
    const cell = svgEl("rect", {
      x: ind.x - ind.width / 2, y: indicatorY, width: ind.width, height: 14,
      class: "indicator", fill: shadeColor(ind.shade),
    });
    cell.addEventListener("click", () => onSceneClick(ind.sceneIndex));
    svg.appendChild(cell);
  }

  svg.addEventListener("mousemove", (event) => {
    if (!(byId("fisheye-toggle") as HTMLInputElement).checked) return;
    const rect = (svg as unknown as SVGGraphicsElement).getBoundingClientRect();
    const fraction = (event.clientX - rect.left) / Math.max(1, rect.width);
    store.setFisheye(true, lo + fraction * (hi - lo));
    renderStoryline();
  });
  host.appendChild(svg);
}

async function onSceneClick(sceneIndex: number): Promise<void> {
  const target = await store.selectScene(sceneIndex);
  renderStoryline();
  if (target) scrollTextTo(target.kind, target.ref);
}

// --- text view ----------------------------------------------------------------

function renderText(): void {
  const host = byId("text-view");
  host.textContent = "";
  if (!textPayload || !store.layout) return;
  const selected = store.state.selectedEntities;
  const colors = new Map(store.layout.lifelines.map((l) => [l.entity, l.color]));
  for (const section of textPayload.sections) {
    if (section.title) host.appendChild(el("h3", {}, section.title));
    for (let pi = section.range[0]; pi < section.range[1]; pi++) {
      const paragraph = textPayload.paragraphs[pi];
      const p = el("p", { id: `paragraph-${paragraph.index}`, class: "paragraph" });
      for (const sentence of paragraph.sentences) {
        const span = el("span", {
          id: `sentence-${sentence.index}`,
          class: sentence.label === "comparative" ? "sentence comparative" : "sentence",
        });
        const text = paragraph.text.slice(sentence.start, sentence.end);
        const inSentence = paragraph.mentions
          .filter((m) => m.sentence_index === sentence.index)
          .sort((a, b) => a.start - b.start);
        let cursor = 0;
        for (const mention of inSentence) {
          span.appendChild(document.createTextNode(text.slice(cursor, mention.start)));
          const mark = el("mark", { class: "mention", title: mention.canonical });
          mark.textContent = text.slice(mention.start, mention.end);
          if (selected.has(mention.entity)) {
            mark.style.backgroundColor = colors.get(mention.entity) ?? "#ffe08a";
            mark.classList.add("selected");
          }
          span.appendChild(mark);
          cursor = mention.end;
        }
        span.appendChild(document.createTextNode(text.slice(cursor) + " "));
        p.appendChild(span);
      }
      host.appendChild(p);
    }
  }
}

function scrollTextTo(kind: "paragraph" | "sentence", ref: number): void {
  const id = kind === "paragraph" ? `paragraph-${ref}` : `sentence-${ref}`;
  const node = document.getElementById(id);
  if (!node) return;
  document.querySelectorAll(".focused").forEach((n) => n.classList.remove("focused"));
  node.classList.add("focused");
  node.scrollIntoView({ behavior: "smooth", block: "center" });
}

// --- side views ------------------------------------------------------------------

async function renderSideViews(docId: string): Promise<void> {
  const ranking = await api.entities(docId);
  const bars = byId("ranking");
  bars.textContent = "";
  const rows = barsGeometry(ranking.slice(0, 15));
  const svg = svgEl("svg", { viewBox: `0 0 420 ${rows.length * 18 + 4}` });
  for (const bar of rows) {
    const rect = svgEl("rect", {
      x: bar.x, y: bar.y + 2, width: bar.width, height: bar.height, class: "bar",
    });
    rect.addEventListener("click", () => {
      store.selectEntity(bar.entity);
      renderStoryline();
      renderText();
    });
    svg.appendChild(rect);
    const label = svgEl("text", { x: bar.x + 4, y: bar.y + 14, class: "bar-label" });
    label.textContent = bar.label;
    svg.appendChild(label);
  }
  bars.appendChild(svg);

  const graph = await api.cooccurrence(docId, "sentence");
  const force = byId("cooccurrence");
  force.textContent = "";
  const fg = forceLayout(graph, 420, 320);
  const fsvg = svgEl("svg", { viewBox: "0 0 420 320" });
  const positions = new Map(fg.nodes.map((n) => [n.id, n]));
  const maxW = Math.max(1, ...fg.edges.map((e) => e.weight));
  for (const edge of fg.edges) {
    const a = positions.get(edge.a)!;
    const b = positions.get(edge.b)!;
    fsvg.appendChild(svgEl("line", {
      x1: a.x, y1: a.y, x2: b.x, y2: b.y,
      class: "edge", "stroke-width": 0.5 + 3 * (edge.weight / maxW),
    }));
  }
  for (const node of fg.nodes) {
    const circle = svgEl("circle", {
      cx: node.x, cy: node.y, r: node.radius,
      fill: communityColor(node.community), class: "force-node",
    });
    circle.addEventListener("click", () => {
      store.selectEntity(node.id);
      renderStoryline();
      renderText();
    });
    fsvg.appendChild(circle);
    const label = svgEl("text", { x: node.x + node.radius + 2, y: node.y + 3, class: "node-label" });
    label.textContent = node.id;
    fsvg.appendChild(label);
  }
  force.appendChild(fsvg);
}

async function renderCollection(): Promise<void> {
  const host = byId("collection");
  host.textContent = "";
  try {
    const evolution = await api.evolution();
    const arc = arcDiagram(evolution);
    const svg = svgEl("svg", {
      viewBox: `0 -170 ${arc.width} 240`, class: "arc-svg",
    });
    for (const a of arc.arcs) {
      svg.appendChild(svgEl("path", {
        d: a.path, class: "arc", "stroke-width": a.width, fill: "none",
      }));
    }
    for (const node of arc.nodes) {
      svg.appendChild(svgEl("circle", {
        cx: node.x, cy: 0, r: 6, fill: docColor(node.colorIndex),
      }));
      const label = svgEl("text", {
        x: node.x, y: 14, class: "arc-label",
        transform: `rotate(35 ${node.x} 14)`,
      });
      label.textContent = node.label;
      svg.appendChild(label);
    }
    host.appendChild(svg);

    const communities = await api.communities();
    const fg = forceLayout(communities, 640, 420);
    const fsvg = svgEl("svg", { viewBox: "0 0 640 420" });
    const positions = new Map(fg.nodes.map((n) => [n.id, n]));
    for (const edge of fg.edges) {
      const a = positions.get(edge.a)!;
      const b = positions.get(edge.b)!;
      fsvg.appendChild(svgEl("line", { x1: a.x, y1: a.y, x2: b.x, y2: b.y, class: "edge" }));
    }
    for (const node of fg.nodes) {
      fsvg.appendChild(svgEl("circle", {
        cx: node.x, cy: node.y, r: node.radius, fill: communityColor(node.community),
      }));
      const label = svgEl("text", { x: node.x + node.radius + 2, y: node.y + 3, class: "node-label" });
      label.textContent = node.id;
      fsvg.appendChild(label);
    }
    host.appendChild(fsvg);
  } catch {
    host.appendChild(el("p", { class: "empty" }, "No documents in the collection yet."));
  }
}

// --- bootstrapping ------------------------------------------------------------------

async function openDocument(docId: string): Promise<void> {
  await store.open(docId);
  textPayload = await api.text(docId);
  byId("granularity-toggle").textContent = "visualize sentences";
  renderStoryline();
  renderText();
  await renderSideViews(docId);
}

async function bootstrap(): Promise<void> {
  const documents = await api.listDocuments();
  const picker = byId("doc-picker") as HTMLSelectElement;
  picker.textContent = "";
  for (const row of documents) {
    picker.appendChild(el("option", { value: row.doc_id }, `${row.pub_date} — ${row.title}`));
  }
  picker.addEventListener("change", () => void openDocument(picker.value));

  byId("granularity-toggle").addEventListener("click", async () => {
    const layout = await store.toggleGranularity();
    if (!layout) {
      byId("error-banner").textContent =
        `Could not switch view: ${store.lastError ?? "network error"}. Retry.`;
      byId("error-banner").classList.remove("hidden");
      return;
    }
    byId("error-banner").classList.add("hidden");
    byId("granularity-toggle").textContent =
      store.state.granularity === "paragraph" ? "visualize sentences" : "visualize paragraphs";
    renderStoryline();
  });

  byId("fisheye-toggle").addEventListener("change", (event) => {
    const enabled = (event.target as HTMLInputElement).checked;
    store.setFisheye(enabled, store.state.fisheye.focusX);
    renderStoryline();
  });

  byId("collection-tab").addEventListener("click", () => {
    byId("document-panel").classList.add("hidden");
    byId("collection").classList.remove("hidden");
    void renderCollection();
  });
  byId("document-tab").addEventListener("click", () => {
    byId("collection").classList.add("hidden");
    byId("document-panel").classList.remove("hidden");
  });

  if (documents.length) {
    picker.value = documents[0].doc_id;
    await openDocument(documents[0].doc_id);
  }
}

void bootstrap();

// re-exported for integration tooling
export { findSceneByRef, sceneTarget };
