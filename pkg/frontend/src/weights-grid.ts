import { CHANNELS, STATES } from "./models.js";
import type { ChannelName, StateName, WeightMapping } from "./models.js";

export interface Cell {
  state: StateName;
  channel: ChannelName;
  value: number;
  dirty: boolean;
  error: string | null;
}

function cloneMapping(table: WeightMapping): WeightMapping {
  const copy = {} as WeightMapping;
  for (const state of STATES) {
    copy[state] = { ...table[state] };
  }
  return copy;
}

/** Grid state for the weight editor: current values, the last-applied
 * snapshot, per-cell dirty flags and server-reported errors. Evaluation
 * must not be triggered while the grid is dirty. */
export class WeightGridViewModel {
  private applied: WeightMapping;
  private current: WeightMapping;
  private errors = new Map<string, string>();

  constructor(table: WeightMapping) {
    this.applied = cloneMapping(table);
    this.current = cloneMapping(table);
  }

  value(state: StateName, channel: ChannelName): number {
    return this.current[state][channel];
  }

  edit(state: StateName, channel: ChannelName, value: number): void {
    this.current[state][channel] = value;
    this.errors.delete(`${state}.${channel}`);
  }

  isCellDirty(state: StateName, channel: ChannelName): boolean {
    return this.current[state][channel] !== this.applied[state][channel];
  }

  get dirty(): boolean {
    return STATES.some((state) =>
      CHANNELS.some((channel) => this.isCellDirty(state, channel)),
    );
  }

  get canEvaluate(): boolean {
    return !this.dirty;
  }

  /** Client-side sanity: weights must be non-negative integers. */
  localViolations(): string[] {
    const problems: string[] = [];
    for (const state of STATES) {
      for (const channel of CHANNELS) {
        const value = this.current[state][channel];
        if (!Number.isInteger(value) || value < 0) {
          problems.push(`${state}.${channel}: must be a non-negative integer`);
        }
      }
    }
    return problems;
  }

  revert(): void {
    this.current = cloneMapping(this.applied);
    this.errors.clear();
  }

  applyPayload(): WeightMapping {
    return cloneMapping(this.current);
  }

  /** The server accepted the table (its echo is the source of truth). */
  applySucceeded(echoed: WeightMapping): void {
    this.applied = cloneMapping(echoed);
    this.current = cloneMapping(echoed);
    this.errors.clear();
  }

  /** Map server messages ("Cruise.SL: ...") onto cells; grid keeps its
   * edited values so the user can fix them in place. */
  applyFailed(messages: string[]): void {
    this.errors.clear();
    for (const message of messages) {
      const match = message.match(/^([A-Za-z_]+)\.([A-Za-z]+):\s*(.*)$/);
      if (match) {
        this.errors.set(`${match[1]}.${match[2]}`, match[3]);
      } else {
        this.errors.set("", message);
      }
    }
  }

  cellError(state: StateName, channel: ChannelName): string | null {
    return this.errors.get(`${state}.${channel}`) ?? null;
  }

  get tableError(): string | null {
    return this.errors.get("") ?? null;
  }

  cells(): Cell[] {
    const out: Cell[] = [];
    for (const state of STATES) {
      for (const channel of CHANNELS) {
        out.push({
          state,
          channel,
          value: this.current[state][channel],
          dirty: this.isCellDirty(state, channel),
          error: this.cellError(state, channel),
        });
      }
    }
    return out;
  }
}
