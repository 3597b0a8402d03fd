/** Minimal observable store with optional web-storage persistence. */

export interface Store<T> {
  get(): T;
  set(value: T): void;
  update(fn: (value: T) => T): void;
  subscribe(listener: (value: T) => void): () => void;
}

export function createStore<T>(initial: T): Store<T> {
  let value = initial;
  const listeners = new Set<(value: T) => void>();
  return {
    get: () => value,
    set(next: T) {
      value = next;
      listeners.forEach((listener) => listener(value));
    },
    update(fn) {
      this.set(fn(value));
    },
    subscribe(listener) {
      listeners.add(listener);
      return () => listeners.delete(listener);
    },
  };
}

/** A store mirrored into web storage, so state survives page reloads. */
export function persistedStore<T>(key: string, initial: T, storage: Storage): Store<T> {
  let start = initial;
  try {
    const raw = storage.getItem(key);
    if (raw !== null) start = JSON.parse(raw) as T;
  } catch {
    /* unreadable snapshot: fall back to the initial value */
  }
  const inner = createStore<T>(start);
  inner.subscribe((value) => {
    try {
      storage.setItem(key, JSON.stringify(value));
    } catch {
      /* storage full or unavailable; keep the in-memory state */
    }
  });
  return inner;
}
