// Small DOM construction helpers shared by the views.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function button(label: string, onClick: () => void, cls = ""): HTMLButtonElement {
  const node = el("button", cls ? { class: cls } : {}, label);
  node.addEventListener("click", onClick);
  return node;
}

export function option(value: string, label = value): HTMLOptionElement {
  return el("option", { value }, label);
}

export function select(
  values: readonly string[],
  current: string,
  onChange: (value: string) => void,
): HTMLSelectElement {
  const node = el("select", {});
  for (const value of values) {
    node.append(option(value));
  }
  node.value = current;
  node.addEventListener("change", () => onChange(node.value));
  return node;
}

export function labeled(text: string, control: HTMLElement): HTMLLabelElement {
  return el("label", { class: "labeled" }, el("span", {}, text), control);
}

/** Message line for inline mutation feedback; empty text hides it. */
export function messageArea(): {
  node: HTMLElement;
  show(text: string, isError: boolean): void;
  clear(): void;
} {
  const node = el("div", { class: "msg" });
  return {
    node,
    show(text: string, isError: boolean) {
      node.textContent = text;
      node.className = isError ? "msg msg-err" : "msg msg-ok";
    },
    clear() {
      node.textContent = "";
      node.className = "msg";
    },
  };
}
