/** Restriction basket: the set of SCHEMA / CLAIM_DEF transactions an
 * operator intends to cite as credential restrictions in a proof request.
 * Exports to (and re-imports from) a small versioned JSON document. */

export const SELECTABLE_TYPES = ["schema", "claim_def"] as const;
export type SelectableType = (typeof SELECTABLE_TYPES)[number];

export interface BasketItem {
  seq_no: number;
  txn_type: SelectableType;
  author_did: string;
  schema_name?: string;
  author_alias?: string;
}

export interface RestrictionEntry {
  schema_seq_no?: number;
  claim_def_seq_no?: number;
  schema_name?: string;
  author_did: string;
  author_alias?: string;
}

export interface RestrictionDocument {
  version: "1";
  restrictions: RestrictionEntry[];
}

export class BasketError extends Error {}

export class RestrictionBasket {
  private items = new Map<number, BasketItem>();

  get size(): number {
    return this.items.size;
  }

  list(): BasketItem[] {
    return [...this.items.values()].sort((a, b) => a.seq_no - b.seq_no);
  }

  has(seqNo: number): boolean {
    return this.items.has(seqNo);
  }

  add(item: BasketItem): void {
    if (!SELECTABLE_TYPES.includes(item.txn_type)) {
      throw new BasketError(`only schema/claim_def are selectable, got ${item.txn_type}`);
    }
    if (this.items.has(item.seq_no)) {
      throw new BasketError(`seq ${item.seq_no} already selected`);
    }
    this.items.set(item.seq_no, item);
  }

  remove(seqNo: number): void {
    if (!this.items.delete(seqNo)) {
      throw new BasketError(`seq ${seqNo} not in basket`);
    }
  }

  /** Add if absent, remove if present; returns true when now selected. */
  toggle(item: BasketItem): boolean {
    if (this.items.has(item.seq_no)) {
      this.remove(item.seq_no);
      return false;
    }
    this.add(item);
    return true;
  }

  clear(): void {
    this.items.clear();
  }

  toDocument(): RestrictionDocument {
    const restrictions = this.list().map((item) => {
      const entry: RestrictionEntry = { author_did: item.author_did };
      if (item.txn_type === "schema") {
        entry.schema_seq_no = item.seq_no;
      } else {
        entry.claim_def_seq_no = item.seq_no;
      }
      if (item.schema_name !== undefined) entry.schema_name = item.schema_name;
      if (item.author_alias !== undefined) entry.author_alias = item.author_alias;
      return entry;
    });
    return { version: "1", restrictions };
  }

  static fromDocument(doc: unknown): RestrictionBasket {
    if (typeof doc !== "object" || doc === null) {
      throw new BasketError("restriction document must be an object");
    }
    const d = doc as Partial<RestrictionDocument>;
    if (d.version !== "1" || !Array.isArray(d.restrictions)) {
      throw new BasketError("unsupported restriction document");
    }
    const basket = new RestrictionBasket();
    for (const entry of d.restrictions) {
      const isSchema = entry.schema_seq_no !== undefined;
      const seqNo = isSchema ? entry.schema_seq_no : entry.claim_def_seq_no;
      if (typeof seqNo !== "number" || typeof entry.author_did !== "string") {
        throw new BasketError("malformed restriction entry");
      }
      const item: BasketItem = {
        seq_no: seqNo,
        txn_type: isSchema ? "schema" : "claim_def",
        author_did: entry.author_did,
      };
      if (entry.schema_name !== undefined) item.schema_name = entry.schema_name;
      if (entry.author_alias !== undefined) item.author_alias = entry.author_alias;
      basket.add(item);
    }
    return basket;
  }
}
