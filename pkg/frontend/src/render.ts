// SVG node-link renderer. Styling mirrors the stored corpus previews:
// uniform vertex color, low-alpha dark edges, straight lines.

const SVG_NS = 'http://www.w3.org/2000/svg';
const MARGIN_FRACTION = 0.05;

export interface Viewport {
  width: number;
  height: number;
}

interface Transform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function fitTransform(positions: [number, number][], viewport: Viewport): Transform {
  const xs = positions.map((p) => p[0]);
  const ys = positions.map((p) => p[1]);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const margin = MARGIN_FRACTION * Math.min(viewport.width, viewport.height);
  const innerW = viewport.width - 2 * margin;
  const innerH = viewport.height - 2 * margin;
  const spanX = maxX - minX;
  const spanY = maxY - minY;
  const span = Math.max(spanX, spanY);
  // All-coincident positions: draw a single centered point, no NaN transforms.
  const scale = span > 0 ? Math.min(innerW / span, innerH / span) : 1;
  const offsetX = margin + (innerW - spanX * scale) / 2 - minX * scale;
  const offsetY = margin + (innerH - spanY * scale) / 2 - minY * scale;
  return { scale, offsetX, offsetY };
}

export function renderLayout(
  positions: [number, number][],
  edges: [number, number][],
  viewport: Viewport,
): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, 'svg') as SVGSVGElement;
  svg.setAttribute('width', String(viewport.width));
  svg.setAttribute('height', String(viewport.height));
  svg.setAttribute('viewBox', `0 0 ${viewport.width} ${viewport.height}`);
  svg.setAttribute('class', 'layout-drawing');
  if (positions.length === 0) {
    return svg;
  }
  const t = fitTransform(positions, viewport);
  const px = (p: [number, number]): [number, number] => [
    p[0] * t.scale + t.offsetX,
    p[1] * t.scale + t.offsetY,
  ];
  const edgeGroup = document.createElementNS(SVG_NS, 'g');
  edgeGroup.setAttribute('stroke', '#1a1a2e');
  edgeGroup.setAttribute('stroke-opacity', '0.25');
  edgeGroup.setAttribute('stroke-width', '1');
  for (const [u, v] of edges) {
    const pu = positions[u];
    const pv = positions[v];
    if (!pu || !pv) continue;
    const [x1, y1] = px(pu);
    const [x2, y2] = px(pv);
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', x1.toFixed(2));
    line.setAttribute('y1', y1.toFixed(2));
    line.setAttribute('x2', x2.toFixed(2));
    line.setAttribute('y2', y2.toFixed(2));
    edgeGroup.appendChild(line);
  }
  svg.appendChild(edgeGroup);
  const nodeGroup = document.createElementNS(SVG_NS, 'g');
  nodeGroup.setAttribute('fill', '#2563eb');
  const radius = Math.max(1.2, Math.min(3, 120 / Math.sqrt(positions.length + 1)));
  for (const p of positions) {
    const [cx, cy] = px(p);
    const circle = document.createElementNS(SVG_NS, 'circle');
    circle.setAttribute('cx', cx.toFixed(2));
    circle.setAttribute('cy', cy.toFixed(2));
    circle.setAttribute('r', radius.toFixed(2));
    nodeGroup.appendChild(circle);
  }
  svg.appendChild(nodeGroup);
  return svg;
}
