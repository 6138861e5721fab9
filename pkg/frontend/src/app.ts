/** Single-page UI: a search box with debounced queries, a result list, a
 * transaction detail pane with client-side audit verification, and the
 * restriction basket. No framework — the page is small enough that direct
 * DOM construction stays readable. */

import { ApiClient, NotFound, SearchHit, ServiceUnavailable, TxnResponse } from "./api.js";
import { BasketItem, RestrictionBasket, SELECTABLE_TYPES, SelectableType } from "./basket.js";
import { debounce } from "./debounce.js";
import { verifyAuditPath } from "./merkle.js";

const TYPE_FILTERS = ["any", "nym", "attrib", "schema", "claim_def", "other"];

export interface AppOptions {
  debounceMs?: number;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export class App {
  readonly basket = new RestrictionBasket();

  private input: HTMLInputElement;
  private typeSelect: HTMLSelectElement;
  private banner: HTMLElement;
  private results: HTMLElement;
  private detail: HTMLElement;
  private basketList: HTMLElement;
  private exportButton: HTMLButtonElement;

  private requestSeq = 0;
  private renderedSeq = 0;
  /** settles when the most recently started async work finishes; tests await it */
  idle: Promise<void> = Promise.resolve();

  constructor(root: HTMLElement, private client: ApiClient, options: AppOptions = {}) {
    root.innerHTML = "";

    this.banner = el("div", "banner hidden", "service unavailable — results may be stale");
    const controls = el("div", "controls");
    this.input = el("input", "search-input");
    this.input.type = "search";
    this.input.placeholder = "search schemas, credential definitions, DID aliases…";
    this.typeSelect = el("select", "type-filter");
    for (const t of TYPE_FILTERS) {
      const opt = el("option", "", t);
      opt.value = t;
      this.typeSelect.append(opt);
    }
    controls.append(this.input, this.typeSelect);

    this.results = el("div", "results empty-state");
    this.results.textContent = "type to search the ledger";
    this.detail = el("div", "detail hidden");

    const basketPane = el("div", "basket");
    basketPane.append(el("h2", "", "restriction basket"));
    this.basketList = el("ul", "basket-list");
    this.exportButton = el("button", "export-button", "export restrictions");
    this.exportButton.disabled = true;
    this.exportButton.addEventListener("click", () => this.downloadExport());
    basketPane.append(this.basketList, this.exportButton);

    root.append(this.banner, controls, this.results, this.detail, basketPane);

    const run = debounce(() => this.runSearch(), options.debounceMs ?? 300);
    this.input.addEventListener("input", () => {
      if (this.input.value.trim() === "") {
        run.cancel();
        this.showEmptyState();
        return;
      }
      run();
    });
    this.typeSelect.addEventListener("change", () => {
      if (this.input.value.trim() !== "") this.runSearch();
    });
  }

  // -- search ----------------------------------------------------------

  private showEmptyState(): void {
    this.requestSeq++; // invalidates any in-flight response
    this.results.className = "results empty-state";
    this.results.textContent = "type to search the ledger";
  }

  private runSearch(): void {
    const q = this.input.value.trim();
    if (q === "") return;
    const seq = ++this.requestSeq;
    this.idle = (async () => {
      try {
        const resp = await this.client.search(q, this.typeSelect.value);
        if (seq <= this.renderedSeq || seq !== this.requestSeq) return; // stale
        this.renderedSeq = seq;
        this.banner.classList.add("hidden");
        this.renderHits(resp.hits, resp.total);
      } catch (err) {
        if (seq !== this.requestSeq) return;
        if (err instanceof ServiceUnavailable) {
          this.banner.classList.remove("hidden");
        } else {
          throw err;
        }
      }
    })();
  }

  private renderHits(hits: SearchHit[], total: number): void {
    this.results.className = "results";
    this.results.innerHTML = "";
    if (hits.length === 0) {
      this.results.textContent = "no matches";
      return;
    }
    const header = el("div", "results-summary", `${total} match${total === 1 ? "" : "es"}`);
    const list = el("ul", "hit-list");
    for (const hit of hits) {
      const li = el("li", "hit");
      li.dataset.seqNo = String(hit.seq_no);
      const badge = el("span", `type-badge type-${hit.txn_type}`, hit.txn_type);
      const title = el(
        "span",
        "hit-title",
        hit.schema_name ?? hit.author_alias ?? `txn ${hit.seq_no}`,
      );
      const meta = el(
        "span",
        "hit-meta",
        `#${hit.seq_no}` +
          (hit.author_alias && hit.schema_name ? ` · ${hit.author_alias}` : "") +
          ` · score ${hit.score.toFixed(3)}`,
      );
      li.append(badge, title, meta);
      li.addEventListener("click", () => this.openDetail(hit.seq_no));
      list.append(li);
    }
    this.results.append(header, list);
  }

  // -- detail pane -----------------------------------------------------

  openDetail(seqNo: number): void {
    this.idle = (async () => {
      let txn: TxnResponse;
      try {
        txn = await this.client.txn(seqNo);
      } catch (err) {
        if (err instanceof NotFound) {
          this.detail.className = "detail";
          this.detail.innerHTML = "";
          this.detail.append(el("p", "not-found", `transaction ${seqNo} not found`));
          return;
        }
        if (err instanceof ServiceUnavailable) {
          this.banner.classList.remove("hidden");
          return;
        }
        throw err;
      }
      this.renderDetail(txn);
      const ok = await verifyAuditPath(txn.raw, txn.audit_path, txn.root_hash);
      const badge = this.detail.querySelector(".audit-badge");
      if (badge) {
        badge.textContent = ok ? "verified" : "failed";
        badge.className = `audit-badge ${ok ? "verified" : "failed"}`;
      }
    })();
  }

  private renderDetail(txn: TxnResponse): void {
    this.detail.className = "detail";
    this.detail.innerHTML = "";
    const e = txn.enriched;
    const head = el("div", "detail-head");
    head.append(
      el("h2", "", `transaction #${txn.seq_no}`),
      el("span", `type-badge type-${e.txn_type}`, e.txn_type),
      el("span", "audit-badge verifying", "verifying…"),
    );
    const facts = el("dl", "enrichment");
    const fact = (label: string, value: string | null) => {
      if (value === null || value === "") return;
      facts.append(el("dt", "", label), el("dd", "", value));
    };
    fact("schema name", e.schema_name);
    fact("schema version", e.schema_version);
    fact("attributes", e.attr_names.join(", "));
    fact("author DID", e.author_did);
    fact("author alias", e.author_alias);
    fact("references schema", e.ref_schema_seq === null ? null : `#${e.ref_schema_seq}`);

    const raw = el("pre", "raw-doc", JSON.stringify(JSON.parse(txn.raw), null, 2));
    this.detail.append(head, facts, raw);

    if ((SELECTABLE_TYPES as readonly string[]).includes(e.txn_type)) {
      const btn = el(
        "button",
        "basket-toggle",
        this.basket.has(txn.seq_no) ? "remove from basket" : "add to basket",
      );
      btn.addEventListener("click", () => {
        const item: BasketItem = {
          seq_no: txn.seq_no,
          txn_type: e.txn_type as SelectableType,
          author_did: e.author_did,
        };
        if (e.schema_name !== null) item.schema_name = e.schema_name;
        if (e.author_alias !== null) item.author_alias = e.author_alias;
        const selected = this.basket.toggle(item);
        btn.textContent = selected ? "remove from basket" : "add to basket";
        this.renderBasket();
      });
      this.detail.append(btn);
    }
  }

  // -- basket ----------------------------------------------------------

  renderBasket(): void {
    this.basketList.innerHTML = "";
    for (const item of this.basket.list()) {
      const li = el("li", "basket-item");
      li.dataset.seqNo = String(item.seq_no);
      li.append(
        el("span", `type-badge type-${item.txn_type}`, item.txn_type),
        el("span", "", `#${item.seq_no} ${item.schema_name ?? item.author_alias ?? ""}`.trim()),
      );
      const remove = el("button", "basket-remove", "×");
      remove.addEventListener("click", () => {
        this.basket.remove(item.seq_no);
        this.renderBasket();
      });
      li.append(remove);
      this.basketList.append(li);
    }
    this.exportButton.disabled = this.basket.size === 0;
  }

  exportDocument(): string {
    return JSON.stringify(this.basket.toDocument(), null, 2);
  }

  importDocument(text: string): void {
    const imported = RestrictionBasket.fromDocument(JSON.parse(text));
    this.basket.clear();
    for (const item of imported.list()) {
      this.basket.add(item);
    }
    this.renderBasket();
  }

  private downloadExport(): void {
    const blob = new Blob([this.exportDocument()], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const a = el("a");
    a.href = url;
    a.download = "restrictions.json";
    a.click();
    URL.revokeObjectURL(url);
  }
}

export function createApp(root: HTMLElement, client: ApiClient, options?: AppOptions): App {
  return new App(root, client, options);
}
