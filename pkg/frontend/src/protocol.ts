/** Wire types of the search service's HTTP/JSON API. */

export type EventKind = "char" | "new_term" | "backspace";

export interface KeystrokeEvent {
  event: EventKind;
  value?: string;
}

export interface ResultEntry {
  item: string;
  /** score bounds as fixed 6-decimal strings */
  min: string;
  max: string;
  status: "guaranteed" | "possible";
}

export interface TopKResult {
  entries: ResultEntry[];
  exact: boolean;
  elapsed_ms: number;
  visited_users: number;
}

export interface SessionOptions {
  k?: number;
  alpha?: number;
  budget_ms?: number | null;
}
