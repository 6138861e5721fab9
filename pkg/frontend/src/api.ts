/** Thin typed wrapper over the credsearch query API. The UI never writes
 * to the service; everything here is a GET. */

export interface SearchHit {
  seq_no: number;
  score: number;
  txn_type: string;
  attr_names: string[];
  author_did: string;
  highlight: string[];
  schema_name?: string;
  schema_version?: string;
  author_alias?: string;
}

export interface SearchResponse {
  total: number;
  took_ms: number;
  hits: SearchHit[];
}

export interface AuditPath {
  leaf_index: number;
  tree_size: number;
  sibling_hashes: string[];
}

export interface EnrichedView {
  txn_type: string;
  schema_name: string | null;
  schema_version: string | null;
  attr_names: string[];
  author_did: string;
  author_alias: string | null;
  ref_schema_seq: number | null;
  txn_time: number | null;
}

export interface TxnResponse {
  seq_no: number;
  raw: string;
  enriched: EnrichedView;
  audit_path: AuditPath;
  root_hash: string;
}

export class ServiceUnavailable extends Error {}
export class NotFound extends Error {}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async get(path: string): Promise<unknown> {
    let resp: Response;
    try {
      resp = await fetch(this.baseUrl + path);
    } catch (err) {
      throw new ServiceUnavailable(String(err));
    }
    if (resp.status === 503) {
      throw new ServiceUnavailable(`service unavailable: ${path}`);
    }
    if (resp.status === 404) {
      throw new NotFound(path);
    }
    if (!resp.ok) {
      throw new Error(`${resp.status} on ${path}`);
    }
    return resp.json();
  }

  async search(q: string, typeFilter: string, limit = 25): Promise<SearchResponse> {
    const params = new URLSearchParams({ q, limit: String(limit) });
    if (typeFilter && typeFilter !== "any") {
      params.set("type", typeFilter);
    }
    return (await this.get(`/search?${params}`)) as SearchResponse;
  }

  async txn(seqNo: number): Promise<TxnResponse> {
    return (await this.get(`/txn/${seqNo}`)) as TxnResponse;
  }

  async stats(): Promise<Record<string, unknown>> {
    return (await this.get("/stats")) as Record<string, unknown>;
  }
}
