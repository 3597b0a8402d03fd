import { beforeEach, describe, expect, test } from 'vitest';
import { createStore, persistedStore } from '../src/state.js';
import { createBasket, inBasket, toggleBasketEntry } from '../src/basket.js';

beforeEach(() => {
  localStorage.clear();
});

describe('createStore', () => {
  test('notifies subscribers and supports unsubscribe', () => {
    const store = createStore(1);
    const seen: number[] = [];
    const unsubscribe = store.subscribe((value) => seen.push(value));
    store.set(2);
    store.update((value) => value + 1);
    unsubscribe();
    store.set(9);
    expect(seen).toEqual([2, 3]);
    expect(store.get()).toBe(9);
  });
});

describe('persistedStore', () => {
  test('state survives a reload (new store instance)', () => {
    const first = persistedStore('k', { step: 1 }, localStorage);
    first.set({ step: 3 });
    // simulate reload: a fresh store over the same storage key
    const second = persistedStore('k', { step: 1 }, localStorage);
    expect(second.get()).toEqual({ step: 3 });
  });

  test('garbage in storage falls back to the initial value', () => {
    localStorage.setItem('k', '{not json');
    const store = persistedStore('k', 42, localStorage);
    expect(store.get()).toBe(42);
  });
});

describe('basket', () => {
  test('toggle adds and removes, persisted across pages', () => {
    const basket = createBasket(localStorage);
    toggleBasketEntry(basket, { contribution: 'R5', label: 'C1' });
    toggleBasketEntry(basket, { contribution: 'R9', label: 'C2' });
    expect(inBasket(basket, 'R5')).toBe(true);

    const reloaded = createBasket(localStorage);
    expect(reloaded.get().map((e) => e.contribution)).toEqual(['R5', 'R9']);

    toggleBasketEntry(reloaded, { contribution: 'R5', label: 'C1' });
    expect(inBasket(reloaded, 'R5')).toBe(false);
    expect(reloaded.get().map((e) => e.contribution)).toEqual(['R9']);
  });
});
