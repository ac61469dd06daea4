import type {
  DocumentHandle,
  EvidencePayload,
  NavNodeWire,
  NodeView,
} from "./types.js";

/** Thin fetch client; view fetches are last-focus-wins. */
export class ApiClient {
  private viewEpoch = 0;

  constructor(private readonly baseUrl: string) {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw new Error(`${path}: HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }

  async ingest(source: string, format: "html" | "markdown"): Promise<DocumentHandle> {
    const response = await fetch(`${this.baseUrl}/documents`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ source, format }),
    });
    if (!response.ok) throw new Error(`ingest: HTTP ${response.status}`);
    return (await response.json()) as DocumentHandle;
  }

  async handle(docId: string): Promise<DocumentHandle> {
    return this.get(`/documents/${docId}`);
  }

  async navTree(docId: string): Promise<NavNodeWire> {
    const payload = await this.get<{ root: NavNodeWire }>(
      `/documents/${docId}/tree`
    );
    return payload.root;
  }

  /**
   * Fetch the view for a focus change.  Resolves to null when a newer focus
   * superseded this request (stale responses are dropped, never rendered).
   */
  async view(docId: string, nodeId: string): Promise<NodeView | null> {
    const epoch = ++this.viewEpoch;
    const view = await this.get<NodeView>(
      `/documents/${docId}/view?node=${encodeURIComponent(nodeId)}`
    );
    return epoch === this.viewEpoch ? view : null;
  }

  async evidence(
    docId: string,
    nodeId: string,
    pointIndex: number
  ): Promise<EvidencePayload> {
    return this.get(
      `/documents/${docId}/nodes/${encodeURIComponent(nodeId)}/evidence/${pointIndex}`
    );
  }
}
