import { STATES } from "./models.js";
import type { EvalReport, StateName, Variant } from "./models.js";

export interface ReportRow {
  state: StateName;
  support: number | null;
  accuracy: Partial<Record<Variant, number>>;
  deltaOwo: number | null;
  deltaOwoPi: number | null;
}

export interface ClaimBadge {
  name: string;
  label: string;
  passed: boolean;
  detail: string;
}

const AWS_FLOOR = 0.98;
const CRUISE_GAIN = 0.05;
const OVERALL_GAIN = 0.03;

function acc(report: EvalReport, state: StateName, variant: Variant): number | null {
  const row = report.states[state];
  return row ? row.accuracy[variant] : null;
}

/** View model for one evaluation report. Deltas and badges are recomputed
 * from the fetched accuracies every time; nothing is reused from an older
 * report (see fromReport's weight-hash guard in the store). */
export class ReportViewModel {
  constructor(
    readonly rows: ReportRow[],
    readonly overall: Record<Variant, number>,
    readonly claims: ClaimBadge[],
    readonly weightHash: string,
    readonly totalRows: number,
  ) {}

  static fromReport(report: EvalReport): ReportViewModel {
    const rows: ReportRow[] = STATES.map((state) => {
      const entry = report.states[state];
      if (!entry) {
        return { state, support: null, accuracy: {}, deltaOwo: null, deltaOwoPi: null };
      }
      return {
        state,
        support: entry.support,
        accuracy: entry.accuracy,
        deltaOwo: entry.accuracy.owo - entry.accuracy.nb,
        deltaOwoPi: entry.accuracy.owo_pi - entry.accuracy.nb,
      };
    });
    return new ReportViewModel(
      rows,
      report.overall,
      computeClaims(report),
      report.metadata.weight_hash,
      report.total_rows,
    );
  }
}

export function computeClaims(report: EvalReport): ClaimBadge[] {
  const claims: ClaimBadge[] = [];
  const add = (name: string, label: string, passed: boolean, detail: string) =>
    claims.push({ name, label, passed, detail });

  const awsAccs = (["nb", "owo", "owo_pi"] as Variant[]).map((v) => acc(report, "AWS", v));
  if (awsAccs.some((a) => a === null)) {
    add("aws_all_variants", "AWS ≥ 98% (all)", false, "AWS absent from test rows");
  } else {
    const worst = Math.min(...(awsAccs as number[]));
    add(
      "aws_all_variants",
      "AWS ≥ 98% (all)",
      worst >= AWS_FLOOR,
      `min AWS accuracy ${(worst * 100).toFixed(2)}%`,
    );
  }

  const cruiseNb = acc(report, "Cruise", "nb");
  const cruisePi = acc(report, "Cruise", "owo_pi");
  add(
    "cruise_owo_pi_gain",
    "Cruise OwO+PI ≥ NB +5",
    cruiseNb !== null && cruisePi !== null && cruisePi >= cruiseNb + CRUISE_GAIN,
    cruiseNb === null || cruisePi === null
      ? "Cruise absent"
      : `${(cruisePi * 100).toFixed(1)}% vs ${(cruiseNb * 100).toFixed(1)}%`,
  );

  for (const [state, name, label] of [
    ["Brake_Change", "brake_change_owo", "Brake OwO ≥ NB"],
    ["Speed_Change", "speed_change_owo", "Speed OwO ≥ NB"],
  ] as [StateName, string, string][]) {
    const nb = acc(report, state, "nb");
    const owo = acc(report, state, "owo");
    add(
      name,
      label,
      nb !== null && owo !== null && owo >= nb,
      nb === null || owo === null
        ? `${state} absent`
        : `${(owo * 100).toFixed(1)}% vs ${(nb * 100).toFixed(1)}%`,
    );
  }

  const ecOwo = acc(report, "Engine_Check", "owo");
  const ecPi = acc(report, "Engine_Check", "owo_pi");
  add(
    "engine_check_pi_gain",
    "EC OwO+PI ≥ OwO",
    ecOwo !== null && ecPi !== null && ecPi >= ecOwo,
    ecOwo === null || ecPi === null
      ? "Engine_Check absent"
      : `${(ecPi * 100).toFixed(1)}% vs ${(ecOwo * 100).toFixed(1)}%`,
  );

  const bestOwo = Math.max(report.overall.owo, report.overall.owo_pi);
  add(
    "overall_best_owo",
    "Overall best OwO ≥ NB +3",
    bestOwo >= report.overall.nb + OVERALL_GAIN,
    `${(bestOwo * 100).toFixed(1)}% vs ${(report.overall.nb * 100).toFixed(1)}%`,
  );

  return claims;
}

/** Cache guarded by weight hash: a report rendered for one table is never
 * reused for another. */
export class ReportStore {
  private cached: ReportViewModel | null = null;

  viewFor(report: EvalReport): ReportViewModel {
    if (this.cached === null || this.cached.weightHash !== report.metadata.weight_hash) {
      this.cached = ReportViewModel.fromReport(report);
    }
    return this.cached;
  }
}
