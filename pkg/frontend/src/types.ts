// Wire types mirroring the review service JSON, field for field.

export interface EntityPayload {
  id: string;
  label: string;
  qualifiers: string[];
  bbox: [number, number, number, number] | null;
  question_mentioned: boolean;
}

export interface EdgePayload {
  subject: string;
  predicate: string;
  object: string;
  kind: "spatial" | "interaction";
  provenance: string;
  grounded: boolean;
}

export interface GraphPayload {
  entities: EntityPayload[];
  edges: EdgePayload[];
}

export interface EvidenceEdge {
  subject: string;
  predicate: string;
  object: string;
  kind: string;
}

export interface ReviewRecord {
  record_id: string;
  image_ref: string;
  kind: string;
  question: string;
  answer: string;
  evidence: EvidenceEdge[];
  final_graph: GraphPayload;
  review_status: string;
  source_tag?: string;
}

export interface StatsPayload {
  total: number;
  unreviewed: number;
  accepted: number;
  rejected: number;
  edited: number;
}

export type DecisionKind = "accept" | "reject" | "edit";

export interface DecisionBody {
  decision: DecisionKind;
  edited_answer?: string;
  reviewer?: string;
}

export function displayName(e: EntityPayload): string {
  return e.qualifiers.length ? `${e.label} ${e.qualifiers.join(" ")}` : e.label;
}
