import type { Timeline } from "./models.js";

export interface StateBand {
  state: string;
  start: number; // index of first point in the band
  end: number;   // index one past the last point
}

/** Collapse the per-point state column into contiguous bands. */
export function segmentStates(states: string[]): StateBand[] {
  const bands: StateBand[] = [];
  let start = 0;
  for (let i = 1; i <= states.length; i += 1) {
    if (i === states.length || states[i] !== states[start]) {
      bands.push({ state: states[start], start, end: i });
      start = i;
    }
  }
  return bands;
}

/** Indices where the driver input (power, brake) changes. */
export function inputChangeMarkers(power: number[], brake: number[]): number[] {
  const markers: number[] = [];
  for (let i = 1; i < power.length; i += 1) {
    if (power[i] !== power[i - 1] || brake[i] !== brake[i - 1]) {
      markers.push(i);
    }
  }
  return markers;
}

export const STATE_COLOURS: Record<string, string> = {
  Cruise: "#e8f1e9",
  AWS: "#f6d7d2",
  Engine_Check: "#efe3c8",
  Brake_Change: "#dce4f2",
  Speed_Change: "#e6ddf0",
};

/** Draw the speed channels over state-coloured bands onto a canvas. */
export function drawTimeline(canvas: HTMLCanvasElement, timeline: Timeline): void {
  const context = canvas.getContext("2d");
  if (!context) {
    return;
  }
  const { width, height } = canvas;
  context.clearRect(0, 0, width, height);
  const n = timeline.t.length;
  if (n === 0) {
    return;
  }

  const t0 = timeline.t[0];
  const t1 = timeline.t[n - 1] || 1;
  const maxSpeed = Math.max(...timeline.S, ...timeline.SL, ...timeline.SLS) * 1.1 || 1;
  const x = (i: number) => ((timeline.t[i] - t0) / (t1 - t0 || 1)) * width;
  const y = (value: number) => height - (value / maxSpeed) * (height - 14) - 4;

  for (const band of segmentStates(timeline.state)) {
    context.fillStyle = STATE_COLOURS[band.state] ?? "#f0f0f0";
    const left = x(band.start);
    const right = band.end < n ? x(band.end) : width;
    context.fillRect(left, 0, Math.max(right - left, 1), height);
  }

  const series: [keyof Pick<Timeline, "S" | "SL" | "SLS">, string, number][] = [
    ["SL", "#888888", 1],
    ["SLS", "#bb8800", 1],
    ["S", "#1a466b", 2],
  ];
  for (const [key, colour, lineWidth] of series) {
    context.strokeStyle = colour;
    context.lineWidth = lineWidth;
    context.beginPath();
    for (let i = 0; i < n; i += 1) {
      const value = timeline[key][i];
      if (i === 0) {
        context.moveTo(x(i), y(value));
      } else {
        context.lineTo(x(i), y(value));
      }
    }
    context.stroke();
  }

  context.strokeStyle = "rgba(120, 40, 40, 0.45)";
  context.lineWidth = 1;
  for (const marker of inputChangeMarkers(timeline.power, timeline.brake)) {
    const px = x(marker);
    context.beginPath();
    context.moveTo(px, height - 10);
    context.lineTo(px, height);
    context.stroke();
  }
}
