// Live run monitor state. A pure reducer over broadcast records plus a
// snapshot reconcile step for reconnects, so the view never loses or
// duplicates records even when the stream drops mid-run.

import type { SnapshotJson } from "./api.js";

export interface InJson {
  type: "IN";
  tick: number;
  sensor: string;
  event: string;
  value: number | string | null;
  likelihood: number;
}

export interface OutJson {
  type: "OUT";
  tick: number;
  entity: string;
  fn: string;
  arg: number | string | null;
  br: number;
}

export interface CancelJson {
  type: "CANCEL";
  tick: number;
  entity: string;
  fn: string;
  br: number;
}

export interface DeliveryFailJson {
  type: "DELIVERY_FAIL";
  tick: number;
  entity: string;
  fn: string;
  br: number;
  reason: string;
}

export type RecordJson = InJson | OutJson | CancelJson | DeliveryFailJson;

export interface MonitorState {
  records: RecordJson[];
  /** Position of records[0] in the service's full history. */
  baseIndex: number;
  status: string;
  clock: number | null;
  connected: boolean;
}

export function initialMonitor(): MonitorState {
  return { records: [], baseIndex: 0, status: "idle", clock: null, connected: false };
}

export function applyRecord(state: MonitorState, record: RecordJson): MonitorState {
  return { ...state, records: [...state.records, record] };
}

/**
 * Fold a snapshot into the state. Three cases:
 * - we are current: keep our records, refresh status and clock
 * - we missed some and the tail covers the gap: append just the gap
 * - the history restarted (new run) or the gap outruns the tail: adopt
 *   the tail wholesale
 */
export function applySnapshot(state: MonitorState, snap: SnapshotJson): MonitorState {
  const tail = snap.trace_tail as unknown as RecordJson[];
  const total = snap.records_total;
  const have = state.baseIndex + state.records.length;
  const refreshed = {
    ...state,
    status: snap.status,
    clock: snap.clock,
  };
  if (total < have) {
    // shorter history than what we hold: a new run started
    return { ...refreshed, records: [...tail], baseIndex: total - tail.length };
  }
  const missing = total - have;
  if (missing === 0) {
    return refreshed;
  }
  if (missing <= tail.length) {
    return {
      ...refreshed,
      records: [...state.records, ...tail.slice(tail.length - missing)],
    };
  }
  return { ...refreshed, records: [...tail], baseIndex: total - tail.length };
}

export function setConnected(state: MonitorState, connected: boolean): MonitorState {
  return { ...state, connected };
}

// --- derived views ------------------------------------------------------------

export interface EntityLane {
  entity: string;
  cards: (OutJson | CancelJson | DeliveryFailJson)[];
}

/**
 * Commands grouped per entity, one lane per entity in order of first
 * appearance. These are the action cards the monitor renders.
 */
export function entityLanes(records: RecordJson[]): EntityLane[] {
  const lanes = new Map<string, EntityLane>();
  for (const record of records) {
    if (record.type === "IN") {
      continue;
    }
    let lane = lanes.get(record.entity);
    if (!lane) {
      lane = { entity: record.entity, cards: [] };
      lanes.set(record.entity, lane);
    }
    lane.cards.push(record);
  }
  return [...lanes.values()];
}

export function actionCards(records: RecordJson[]): OutJson[] {
  return records.filter((r): r is OutJson => r.type === "OUT");
}

/** Inject and tick controls only make sense against a live machine. */
export function canInject(status: string): boolean {
  return status === "running" || status === "quiescent";
}

export function describeRecord(record: RecordJson): string {
  switch (record.type) {
    case "IN": {
      const value = record.value === null ? "" : `=${record.value}`;
      return `T=${record.tick} IN ${record.sensor}.${record.event}${value}@${record.likelihood}`;
    }
    case "OUT": {
      const arg = record.arg === null ? "" : String(record.arg);
      return `T=${record.tick} OUT ${record.entity}.${record.fn}(${arg}) br=${record.br}`;
    }
    case "CANCEL":
      return `T=${record.tick} CANCEL ${record.entity}.${record.fn} br=${record.br}`;
    case "DELIVERY_FAIL":
      return `T=${record.tick} DELIVERY_FAIL ${record.entity}.${record.fn} br=${record.br} reason=${record.reason}`;
  }
}
