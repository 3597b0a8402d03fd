/** Comparison selection basket, persisted across pages. */

import { persistedStore, type Store } from './state.js';

export interface BasketEntry {
  contribution: string;
  label: string;
}

export type Basket = Store<BasketEntry[]>;

export function createBasket(storage: Storage): Basket {
  return persistedStore<BasketEntry[]>('scholargraph.basket', [], storage);
}

export function toggleBasketEntry(basket: Basket, entry: BasketEntry): void {
  basket.update((entries) => {
    if (entries.some((e) => e.contribution === entry.contribution)) {
      return entries.filter((e) => e.contribution !== entry.contribution);
    }
    return [...entries, entry];
  });
}

export function inBasket(basket: Basket, contributionId: string): boolean {
  return basket.get().some((e) => e.contribution === contributionId);
}
