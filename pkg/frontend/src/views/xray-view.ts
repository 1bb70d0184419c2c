// X-ray pop-up: a movable window showing one instance's FSM diagram with
// the active node and the last edge taken drawn in green, refreshed on
// every tick. Closing it clears the map highlight via the onClose hook.

import { xray } from "../engine.js";
import { conditionText, actionText } from "../model.js";
import { PlayController } from "../play.js";
import { NodePosition } from "../session.js";
import { button, el, svgEl } from "./dom.js";

const W = 380;
const H = 300;
const NODE_W = 110;
const NODE_H = 30;

function autoPosition(index: number, total: number): NodePosition {
  if (total === 1) return { x: W / 2, y: H / 2 };
  const angle = (2 * Math.PI * index) / total - Math.PI / 2;
  return {
    x: W / 2 + Math.cos(angle) * (W / 2 - 90),
    y: H / 2 + Math.sin(angle) * (H / 2 - 50),
  };
}

type Layout = Map<number, NodePosition>;

function layoutFor(json: string | null, char: string, total: number): Layout {
  const positions: Layout = new Map();
  if (json) {
    try {
      const obj = JSON.parse(json) as Record<string, Record<string, NodePosition>>;
      const inner = obj[char];
      if (inner) {
        // submitted coordinates span the editor canvas; scale to fit here
        for (const [index, pos] of Object.entries(inner)) {
          positions.set(Number(index), { x: (pos.x / 680) * W, y: (pos.y / 440) * H });
        }
      }
    } catch {
      // fall through to the automatic ring
    }
  }
  for (let i = 0; i < total; i++) {
    if (!positions.has(i)) positions.set(i, autoPosition(i, total));
  }
  return positions;
}

export class XrayWindow {
  private root: HTMLElement | null = null;
  private body: HTMLElement | null = null;
  private title: HTMLElement | null = null;

  constructor(
    private readonly layoutJson: string | null,
    private readonly onClose: () => void,
  ) {}

  get isOpen(): boolean {
    return this.root !== null;
  }

  open(controller: PlayController): void {
    if (!this.root) {
      this.title = el("span", {}, "");
      this.body = el("div", { class: "xray-body" });
      const head = el(
        "div",
        { class: "popup-head xray-head" },
        this.title,
        button("×", () => this.close(), "popup-close"),
      );
      this.root = el("div", { class: "popup xray-popup" }, head, this.body);
      head.addEventListener("mousedown", (e) => {
        if ((e.target as HTMLElement).tagName === "BUTTON") return;
        e.preventDefault();
        const startX = e.clientX;
        const startY = e.clientY;
        const rect = this.root!.getBoundingClientRect();
        const onMove = (ev: MouseEvent) => {
          this.root!.style.left = `${rect.left + ev.clientX - startX}px`;
          this.root!.style.top = `${rect.top + ev.clientY - startY}px`;
          this.root!.style.right = "auto";
        };
        const onUp = () => {
          window.removeEventListener("mousemove", onMove);
          window.removeEventListener("mouseup", onUp);
        };
        window.addEventListener("mousemove", onMove);
        window.addEventListener("mouseup", onUp);
      });
      document.body.append(this.root);
    }
    this.update(controller);
  }

  close(): void {
    this.root?.remove();
    this.root = null;
    this.body = null;
    this.title = null;
    this.onClose();
  }

  update(controller: PlayController): void {
    if (!this.root || !this.body || !this.title) return;
    const id = controller.xrayId;
    if (id === null) {
      this.close();
      return;
    }
    const inst = controller.fortress.instances.find((i) => i.id === id);
    if (!inst) {
      this.title.textContent = `#${id} (removed)`;
      this.body.replaceChildren(el("p", {}, "this instance left the simulation"));
      return;
    }
    const [cls, activeNode, lastEdge] = xray(controller.fortress, id);
    this.title.textContent = `#${id} ${cls.char} ${cls.name}`;
    const positions = layoutFor(this.layoutJson, cls.char, cls.nodes.length);
    const svg = svgEl("svg", { width: String(W), height: String(H), class: "fsm-canvas" });
    svg.append(
      svgEl(
        "defs",
        {},
        svgEl(
          "marker",
          {
            id: "xarrow",
            markerWidth: "10",
            markerHeight: "10",
            refX: "8",
            refY: "3",
            orient: "auto",
          },
          svgEl("path", { d: "M0,0 L8,3 L0,6 Z", class: "arrow-head" }),
        ),
      ),
    );
    for (const edge of cls.edges) {
      const a = positions.get(edge.src)!;
      const b = positions.get(edge.dst)!;
      const isLast =
        lastEdge !== null && lastEdge[0] === edge.src && lastEdge[1] === edge.dst;
      const lineClass = isLast ? "edge-line last-edge" : "edge-line";
      let labelX: number;
      let labelY: number;
      if (edge.src === edge.dst) {
        svg.append(
          svgEl("circle", {
            cx: String(a.x),
            cy: String(a.y - NODE_H),
            r: "14",
            class: lineClass,
          }),
        );
        labelX = a.x;
        labelY = a.y - NODE_H - 18;
      } else {
        const dx = b.x - a.x;
        const dy = b.y - a.y;
        const len = Math.hypot(dx, dy) || 1;
        const mx = (a.x + b.x) / 2 + (-dy / len) * 12;
        const my = (a.y + b.y) / 2 + (dx / len) * 12;
        svg.append(
          svgEl("path", {
            d: `M ${a.x} ${a.y} Q ${mx} ${my} ${b.x} ${b.y}`,
            class: lineClass,
            "marker-end": "url(#xarrow)",
          }),
        );
        labelX = mx;
        labelY = my - 5;
      }
      svg.append(
        svgEl(
          "text",
          {
            x: String(labelX),
            y: String(labelY),
            class: isLast ? "edge-label last-edge-label" : "edge-label",
          },
          `${edge.src}-${edge.dst}: ${conditionText(edge.condition)}`,
        ),
      );
    }
    for (const node of cls.nodes) {
      const pos = positions.get(node.index)!;
      const group = svgEl("g", {
        class: node.index === activeNode ? "fsm-node active-node" : "fsm-node",
        transform: `translate(${pos.x - NODE_W / 2}, ${pos.y - NODE_H / 2})`,
      });
      group.append(
        svgEl("rect", { width: String(NODE_W), height: String(NODE_H), rx: "6" }),
        svgEl(
          "text",
          { x: String(NODE_W / 2), y: String(NODE_H / 2 + 4), class: "node-label" },
          `${node.index}: ${actionText(node.action)}`,
        ),
      );
      svg.append(group);
    }
    this.body.replaceChildren(svg);
  }
}
