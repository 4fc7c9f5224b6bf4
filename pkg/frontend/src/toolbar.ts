import { MODES, type ModeName } from "./types.js";

export interface Toolbar {
  /** Reflect the server's mode without firing the change handler. */
  setActive(mode: string): void;
}

/** Exclusive mode toggle group; the change handler may reject by throwing,
 *  in which case the previous toggle state is restored. */
export function createToolbar(
  container: HTMLElement,
  onSelect: (mode: ModeName) => Promise<void>,
): Toolbar {
  const buttons = new Map<string, HTMLButtonElement>();
  let active = "off";

  function paint(): void {
    for (const [mode, btn] of buttons) {
      btn.classList.toggle("active", mode === active);
    }
  }

  for (const mode of MODES) {
    const btn = document.createElement("button");
    btn.textContent = mode;
    btn.dataset.mode = mode;
    btn.addEventListener("click", async () => {
      const previous = active;
      active = mode;
      paint();
      try {
        await onSelect(mode);
      } catch {
        active = previous; // rejected mode change: revert the toggle
        paint();
      }
    });
    container.appendChild(btn);
    buttons.set(mode, btn);
  }
  paint();

  return {
    setActive(mode: string): void {
      active = mode;
      paint();
    },
  };
}
