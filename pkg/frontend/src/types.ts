/** Payload shapes of the what-if service; mirrored, never recomputed here. */

export interface TransactionDraft {
  buyer: string;
  target: string;
  share: number;
  seller?: string;
}

export interface ScenarioDraft {
  strategic: string[];
  foreign: string[];
  public: string[];
  staged: TransactionDraft[];
}

export interface EntityView {
  id: string;
  kind: "person" | "company";
  name: string;
  activity_code: string | null;
  region: string | null;
  strategic: boolean;
  foreign: boolean;
  public: boolean;
}

export interface EdgeView {
  owner: string;
  owned: string;
  share: number;
}

export interface Neighborhood {
  center: string;
  radius: number;
  truncated: boolean;
  entities: EntityView[];
  edges: EdgeView[];
}

export interface WitnessView {
  foreign: string | string[];
  strategic: string;
  control_share: number;
}

export interface VerdictView {
  takeover: boolean;
  witnesses: WitnessView[];
}

export interface LimitView {
  max_share: number;
  binding_strategic: string | null;
}

export interface AcquisitionView {
  holder: string;
  target: string;
  delta: number;
}

export interface CandidateView {
  acquisitions: AcquisitionView[];
  total: number;
  intermediary: string | null;
}

export interface ProtectionView {
  acquisitions: AcquisitionView[];
  residual_risk: boolean;
  options: Record<string, CandidateView[]>;
}

export interface SessionInfo {
  session_id: string;
  graph_id: string;
  scenario: ScenarioDraft;
  staged: TransactionDraft[];
  created: string;
  updated: string;
}

export interface ServiceError {
  code: string;
  message: string;
}

/** A service response kept verbatim: parsed body plus the raw bytes as text. */
export interface Received<T> {
  payload: T;
  rawText: string;
}
