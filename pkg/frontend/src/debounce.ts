/** Rate limiting for preview requests while scrubbing. */

export interface Canceler {
  (): void;
}

/**
 * Trailing rate limiter: calls run at most once per minIntervalMs, and the
 * latest pending arguments always win. Returns the limited function plus a
 * canceler for teardown.
 */
export function rateLimit<A extends unknown[]>(
  fn: (...args: A) => void,
  minIntervalMs: number,
  now: () => number = () => Date.now(),
  schedule: (cb: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
  cancel: (h: ReturnType<typeof setTimeout>) => void = clearTimeout,
): { call: (...args: A) => void; cancel: Canceler } {
  let lastRun = -Infinity;
  let pending: A | null = null;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const flush = () => {
    timer = null;
    if (pending !== null) {
      const args = pending;
      pending = null;
      lastRun = now();
      fn(...args);
    }
  };

  const call = (...args: A) => {
    const wait = lastRun + minIntervalMs - now();
    if (wait <= 0 && timer === null) {
      lastRun = now();
      fn(...args);
      return;
    }
    pending = args;
    if (timer === null) {
      timer = schedule(flush, Math.max(wait, 0));
    }
  };

  return {
    call,
    cancel: () => {
      if (timer !== null) {
        cancel(timer);
        timer = null;
      }
      pending = null;
    },
  };
}
