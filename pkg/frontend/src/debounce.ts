/** Debouncing and stale-response rejection for preview requests. */

export interface Debounced<A extends unknown[]> {
  call: (...args: A) => void;
  cancel: () => void;
  flush: () => void;
}

/** Trailing-edge debounce: only the last call within the window fires. */
export function debounce<A extends unknown[]>(fn: (...args: A) => void, waitMs: number): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;

  const fire = () => {
    timer = null;
    if (pending !== null) {
      const args = pending;
      pending = null;
      fn(...args);
    }
  };

  return {
    call: (...args: A) => {
      pending = args;
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(fire, waitMs);
    },
    cancel: () => {
      if (timer !== null) clearTimeout(timer);
      timer = null;
      pending = null;
    },
    flush: fire,
  };
}

/**
 * Monotone ticket counter for in-flight requests: a response is rendered
 * only when its ticket is still the newest, so a slow early preview can
 * never overwrite the result of the latest slider position.
 */
export class LatestRequestGate {
  private seq = 0;

  issue(): number {
    return ++this.seq;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.seq;
  }
}
