import type { ApiClient } from "./api.js";
import type { JobRecord } from "./models.js";

export type Sleeper = (ms: number) => Promise<void>;

const defaultSleep: Sleeper = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

/** Poll a job until done/failed. Resolves with the record on success,
 * rejects with the job's error on failure or after timeout. */
export async function pollJob(
  api: ApiClient,
  jobId: string,
  intervalMs = 1000,
  timeoutMs = 120_000,
  sleep: Sleeper = defaultSleep,
): Promise<JobRecord> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const record = await api.getJob(jobId);
    if (record.status === "done") {
      return record;
    }
    if (record.status === "failed") {
      throw new Error(`job ${jobId} failed: ${record.error ?? "unknown error"}`);
    }
    if (Date.now() >= deadline) {
      throw new Error(`job ${jobId} did not finish within ${timeoutMs} ms`);
    }
    await sleep(intervalMs);
  }
}
