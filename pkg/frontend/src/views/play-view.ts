// Play screen: the live map with player entities on a cyan background,
// play/pause/reset controls, speed, font and seed settings, the keyboard
// scheme picker (plus the global pause and reset keys), the auto-player
// toggle, the event log panel, and the X-ray pop-up opened by clicking
// an instance on the map.

import { SCHEME_NAMES, SchemeName, inputForKey, isPauseKey, isResetKey } from "../keymap.js";
import { FONT_OPTIONS, SPEED_OPTIONS, renderCells } from "../play.js";
import { AppContext, ViewCleanup } from "./context.js";
import { button, el, labeled, messageArea, select } from "./dom.js";
import { XrayWindow } from "./xray-view.js";

const LOG_TAIL = 250;

export function renderPlayScreen(ctx: AppContext, root: HTMLElement): ViewCleanup {
  const controller = ctx.play;
  if (!controller) {
    root.append(
      el("p", {}, "nothing is playing"),
      button("back to gallery", () => ctx.goto("#/")),
    );
    return;
  }

  const msg = messageArea();
  const mapBox = el("div", { class: "play-map" });
  const logBox = el("div", { class: "log-panel" });
  const statusLine = el("span", { class: "play-status" });
  const playBtn = el("button", {}, "Play");

  const xrayWin = new XrayWindow(ctx.loadLayout(controller.text), () => {
    if (controller.xrayId !== null) {
      controller.xrayId = null;
      drawMap();
    }
  });

  const drawMap = () => {
    mapBox.style.fontFamily = controller.fontFamily;
    mapBox.style.fontSize = `${controller.fontSize}px`;
    mapBox.replaceChildren();
    const cells = renderCells(controller.fortress, controller.xrayId);
    for (let y = 0; y < cells.length; y++) {
      const row = el("div", { class: "play-row" });
      for (let x = 0; x < cells[y].length; x++) {
        const cell = cells[y][x];
        let cls = "play-cell";
        if (cell.player) cls += " player";
        if (cell.xray) cls += " xray-cell";
        const node = el("span", { class: cls }, cell.ch);
        if (cell.instanceId !== null) {
          const id = cell.instanceId;
          node.addEventListener("click", () => {
            controller.xrayId = id;
            xrayWin.open(controller);
            drawMap();
          });
        }
        row.append(node);
      }
      mapBox.append(row);
    }
  };

  const drawLog = () => {
    logBox.style.display = controller.logVisible ? "" : "none";
    if (!controller.logVisible) return;
    logBox.replaceChildren();
    for (const line of controller.logLines.slice(-LOG_TAIL)) {
      logBox.append(el("div", { class: "log-line" }, line));
    }
    logBox.scrollTop = logBox.scrollHeight;
  };

  const drawStatus = () => {
    const reason = controller.terminated;
    statusLine.textContent = reason
      ? `tick ${controller.fortress.tick} · terminated: ${reason}`
      : `tick ${controller.fortress.tick}`;
    playBtn.textContent = controller.playing ? "Pause" : "Play";
  };

  const syncAll = () => {
    drawMap();
    drawLog();
    drawStatus();
    if (xrayWin.isOpen) xrayWin.update(controller);
  };

  const advance = () => {
    controller.tick();
    syncAll();
  };

  let timer: number | undefined;
  const restartTimer = () => {
    if (timer !== undefined) window.clearInterval(timer);
    timer = window.setInterval(() => {
      if (controller.playing) advance();
    }, 1000 / controller.speed);
  };

  playBtn.addEventListener("click", () => {
    if (controller.terminated) return;
    controller.playing = !controller.playing;
    drawStatus();
  });

  const seedInput = el("input", {
    class: "seed-input",
    placeholder: "seed override",
    value: controller.seedOverride?.toString() ?? "",
  });

  const onKey = (e: KeyboardEvent) => {
    const tag = (e.target as HTMLElement).tagName;
    if (tag === "INPUT" || tag === "TEXTAREA" || tag === "SELECT") return;
    if (isPauseKey(e.key)) {
      if (!controller.terminated) controller.playing = !controller.playing;
      drawStatus();
      e.preventDefault();
      return;
    }
    if (isResetKey(e.key)) {
      controller.reset();
      syncAll();
      e.preventDefault();
      return;
    }
    const input = inputForKey(controller.scheme, e.key);
    if (input !== null) {
      controller.bufferInput(input);
      e.preventDefault();
    }
  };
  window.addEventListener("keydown", onKey);

  const settings = el(
    "div",
    { class: "play-settings" },
    labeled(
      "speed",
      select(
        SPEED_OPTIONS.map(String),
        String(controller.speed),
        (v) => {
          controller.speed = Number(v);
          restartTimer();
        },
      ),
    ),
    labeled(
      "font",
      select(FONT_OPTIONS, controller.fontFamily, (v) => {
        controller.fontFamily = v;
        drawMap();
      }),
    ),
    labeled(
      "size",
      select(
        ["12", "14", "18", "24", "32"],
        String(controller.fontSize),
        (v) => {
          controller.fontSize = Number(v);
          drawMap();
        },
      ),
    ),
    labeled(
      "keys",
      select(SCHEME_NAMES, controller.scheme, (v) => {
        controller.scheme = v as SchemeName;
      }),
    ),
  );

  const autoToggle = el("input", { type: "checkbox" });
  autoToggle.checked = controller.autoPlayer;
  autoToggle.addEventListener("change", () => {
    controller.autoPlayer = autoToggle.checked;
  });

  const logToggle = el("input", { type: "checkbox" });
  logToggle.checked = controller.logVisible;
  logToggle.addEventListener("change", () => {
    controller.logVisible = logToggle.checked;
    drawLog();
  });

  const toggles = el(
    "div",
    { class: "play-toggles" },
    labeled("auto-player", autoToggle),
    labeled("event log", logToggle),
    seedInput,
    button("Apply seed & reset", () => {
      if (!controller.setSeedOverride(seedInput.value)) {
        msg.show("seed must be an unsigned 64-bit integer, or empty to clear", true);
        return;
      }
      msg.clear();
      controller.reset();
      syncAll();
    }),
  );

  root.append(
    el(
      "div",
      { class: "play-head" },
      button("← gallery", () => ctx.goto("#/")),
      el(
        "h2",
        {},
        controller.name || "untitled",
        controller.author ? ` by ${controller.author}` : "",
      ),
      playBtn,
      button("Reset", () => {
        controller.reset();
        syncAll();
      }),
      button("Step", () => {
        if (!controller.terminated) advance();
      }),
      statusLine,
    ),
    msg.node,
    settings,
    toggles,
    controller.hasPlayer
      ? el(
          "p",
          { class: "hint" },
          "move with the selected key scheme; P pauses and resumes, R resets",
        )
      : el("p", { class: "hint" }, "P pauses and resumes, R resets"),
    mapBox,
    logBox,
  );
  syncAll();
  restartTimer();

  return () => {
    if (timer !== undefined) window.clearInterval(timer);
    window.removeEventListener("keydown", onKey);
    if (xrayWin.isOpen) xrayWin.close();
  };
}
