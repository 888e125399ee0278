// Wire types of the compiled narrative bundle (*.bundle.json).

export type Certainty = "definite" | "conditional" | "ambiguous";
export type RectStyle = "solid" | "striped" | "hatched";
export type Verb = "collect" | "share";
export type StepKind =
  | "intro"
  | "facet"
  | "enumerate"
  | "cluster"
  | "ingest"
  | "share_caption"
  | "share_flows"
  | "summary";

export interface AnchorSpan {
  quote: string;
  section_id: string;
  start: number;
  end: number;
  occurrence_index: number;
}

export interface StepData {
  index: number;
  kind: StepKind;
  payload: Record<string, unknown>;
  text_anchor: AnchorSpan | null;
}

export interface RowData {
  actor_id: string;
  rank: number;
  item_count: number;
}

export interface RectData {
  actor_id: string;
  item_id: string;
  verb: Verb;
  certainty: Certainty;
  style: RectStyle;
  quote_anchors: AnchorSpan[];
  expanded: boolean;
}

export interface CategoryData {
  id: string;
  label: string;
  color_token: string;
}

export interface ActorData {
  id: string;
  label: string;
  kind: "owner" | "third_party_class";
  icon_token: string;
}

export interface ItemData {
  id: string;
  label: string;
  category_id: string;
}

export interface Bundle {
  bundle_version: number;
  meta: {
    platform_name: string;
    owner_actor_id: string;
    item_count_n: number;
    build_fingerprint: string;
  };
  steps: StepData[];
  rows: RowData[];
  rects: RectData[];
  anchors: Record<string, AnchorSpan[]>;
  categories: CategoryData[];
  actors: ActorData[];
  items: ItemData[];
}
