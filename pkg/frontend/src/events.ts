/** Input text deltas <-> keystroke events.
 *
 * A space emits new_term, any other character emits char, a deletion
 * emits backspace. Edits in the middle of the text are normalized to
 * backspaces down to the common prefix followed by re-typing, so the
 * emitted sequence always reconstructs the input exactly.
 */

import type { KeystrokeEvent } from "./protocol.js";

export function eventsForInput(previous: string, next: string): KeystrokeEvent[] {
  let common = 0;
  const limit = Math.min(previous.length, next.length);
  while (common < limit && previous[common] === next[common]) {
    common += 1;
  }
  const events: KeystrokeEvent[] = [];
  for (let i = previous.length; i > common; i -= 1) {
    events.push({ event: "backspace" });
  }
  for (const ch of next.slice(common)) {
    events.push(ch === " " ? { event: "new_term" } : { event: "char", value: ch });
  }
  return events;
}

/** Reconstruct the input text an event sequence represents. */
export function replayText(events: KeystrokeEvent[]): string {
  let text = "";
  for (const ev of events) {
    if (ev.event === "char") {
      text += ev.value ?? "";
    } else if (ev.event === "new_term") {
      text += " ";
    } else {
      text = text.slice(0, -1);
    }
  }
  return text;
}
