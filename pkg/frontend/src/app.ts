/** DOM binding: one rendering loop over the pure view model. */

import { SessionClient } from "./client.js";
import { eventsForInput } from "./events.js";
import { applyError, applyUpdate, initialState, renderModel } from "./view.js";
import type { ViewState } from "./view.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function paint(state: ViewState): void {
  const model = renderModel(state);
  const list = el<HTMLOListElement>("results");
  list.replaceChildren();
  for (const row of model.rows) {
    const li = document.createElement("li");
    li.className = row.guaranteed ? "row guaranteed" : "row possible";

    const label = document.createElement("span");
    label.className = "item";
    label.textContent = row.item;

    const track = document.createElement("span");
    track.className = "track";
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.left = `${row.barStartPct}%`;
    bar.style.width = `${Math.max(1, row.barEndPct - row.barStartPct)}%`;
    track.appendChild(bar);

    const range = document.createElement("span");
    range.className = "range";
    range.textContent =
      row.min === row.max
        ? row.min.toFixed(3)
        : `${row.min.toFixed(3)} … ${row.max.toFixed(3)}`;

    li.append(label, track, range);
    list.appendChild(li);
  }
  const badge = el<HTMLSpanElement>("badge");
  badge.textContent = model.badge;
  badge.className = `badge ${model.badge}`;
  el<HTMLSpanElement>("latency").textContent = model.latencyText;
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = model.banner ?? "";
  banner.hidden = model.banner === null;
}

function start(): void {
  const seekerInput = el<HTMLInputElement>("seeker");
  const startButton = el<HTMLButtonElement>("start");
  const queryInput = el<HTMLInputElement>("query");

  let state = initialState();
  let client: SessionClient | null = null;
  let previousText = "";
  paint(state);

  startButton.addEventListener("click", async () => {
    const seeker = seekerInput.value.trim();
    if (!seeker) {
      return;
    }
    const fresh = new SessionClient(window.location.origin);
    try {
      await fresh.createSession(seeker);
    } catch (err) {
      state = applyError(state, `could not start a session: ${err}`);
      paint(state);
      return;
    }
    client = fresh;
    previousText = "";
    queryInput.value = "";
    queryInput.disabled = false;
    state = { ...initialState(), seeker };
    paint(state);
    queryInput.focus();
  });

  queryInput.addEventListener("input", () => {
    if (!client) {
      return;
    }
    const text = queryInput.value;
    const events = eventsForInput(previousText, text);
    previousText = text;
    state = { ...state, text };
    for (const event of events) {
      client
        .send(event)
        .then((update) => {
          if (update) {
            state = applyUpdate(state, update.result, update.latencyMs);
            paint(state);
          }
        })
        .catch((err) => {
          // non-blocking: the input stays editable
          state = applyError(state, `request failed: ${err}`);
          paint(state);
        });
    }
  });
}

start();
