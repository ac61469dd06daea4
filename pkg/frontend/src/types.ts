/** Wire types mirroring the papertree HTTP API payloads. */

export interface DocumentHandle {
  doc_id: string;
  title: string;
  node_count: number;
  summarized: boolean;
  status: "ingested" | "summarizing" | "ready" | "partially_degraded";
}

export interface NavNodeWire {
  id: string;
  kind: "section" | "paragraph" | "figure" | "table";
  title: string;
  children: NavNodeWire[];
}

export interface AnchorWire {
  target_node_id: string;
  char_start: number;
  char_end: number;
  match_kind: "exact" | "normalized" | "fuzzy" | "unmatched";
  similarity: number;
}

export interface KeyPointWire {
  point_text: string;
  evidence_text: string;
  anchor: AnchorWire | null;
}

export interface CardWire {
  child_id: string;
  kind: "section" | "paragraph" | "figure" | "table";
  display_title: string;
  key_points: KeyPointWire[];
  can_descend: boolean;
}

export interface SourcePanelText {
  kind: "text";
  text: string;
}

export interface SourcePanelEntry {
  node_id: string;
  title: string;
  points: string[];
}

export interface SourcePanelChildren {
  kind: "children";
  entries: SourcePanelEntry[];
}

export interface NodeView {
  node_id: string;
  breadcrumb: { id: string; title: string }[];
  cards: CardWire[];
  parent_id: string | null;
  contextual: {
    figures: string[];
    source_panel: SourcePanelText | SourcePanelChildren;
  };
}

export interface EvidencePayload {
  evidence_text: string;
  anchor: AnchorWire | null;
  source_excerpt: string;
}
