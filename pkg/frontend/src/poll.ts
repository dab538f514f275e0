// Job polling with a simple in-flight guard so a method never has two
// concurrent layout jobs.

import type { JobStatus } from './api.js';

export async function pollJob(
  jobId: string,
  fetchJob: (id: string) => Promise<JobStatus>,
  intervalMs = 1000,
  maxAttempts = 600,
): Promise<JobStatus> {
  for (let attempt = 0; attempt < maxAttempts; attempt++) {
    const job = await fetchJob(jobId);
    if (job.status !== 'pending') {
      return job;
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
  throw new Error(`job ${jobId} still pending after ${maxAttempts} polls`);
}

export class InFlightGuard {
  private active = new Set<string>();

  /** Runs the task unless one is already active for the key. */
  async run<T>(key: string, task: () => Promise<T>): Promise<T | undefined> {
    if (this.active.has(key)) {
      return undefined;
    }
    this.active.add(key);
    try {
      return await task();
    } finally {
      this.active.delete(key);
    }
  }

  isActive(key: string): boolean {
    return this.active.has(key);
  }
}
