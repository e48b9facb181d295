/** Story bundle document types (schema version 1). */

export interface Run {
  text: string;
  role?: string;
}

export interface TextBlock {
  paragraphs: Run[][];
}

export interface Mark {
  id: string;
  type: string;
  color_role?: string;
  [extra: string]: unknown;
}

export interface Shot {
  id: string;
  view_state: { marks: Mark[] };
  text: TextBlock;
  entering_marks: string[];
  interactive: boolean;
}

export type SceneId = "wakes" | "trend" | "matching" | "results";

export interface Scene {
  id: SceneId;
  title: string;
  summary: string;
  interaction: string;
  config: Record<string, unknown>;
  shots: Shot[];
}

export interface SliceEvent {
  id: string;
  lon: number;
  lat: number;
  offset: number;
  distance_km: number;
}

export interface ActorSlice {
  id: string;
  date: string;
  lon: number;
  lat: number;
  events: SliceEvent[];
}

export interface WindowCountsDoc {
  n_pre: number;
  n_post: number;
  trend: number;
}

export interface TrendBins {
  edges: number[];
  offsets: { treatment: number[]; control: number[] };
  default: { half_width: number; treatment: WindowCountsDoc; control: WindowCountsDoc };
  half_width_min: number;
  half_width_max: number;
  invalid_half_widths: number[];
}

export interface CovariateVariable {
  name: string;
  kind: "binary" | "continuous";
  edges: number[];
}

export interface CovariateRow {
  id: string;
  arm: "treatment" | "control";
  values: Record<string, number>;
  n_pre: number;
  trend: number;
  matched: boolean;
  signature: number[];
}

export interface CovariateTable {
  variables: CovariateVariable[];
  rows: CovariateRow[];
  matched_totals: { treatment: number; control: number };
}

export interface HeatCell {
  radius_km: number;
  half_width_days: number;
  estimate: number;
  std_error: number;
  p_value: number;
  n_matched_t: number;
  n_matched_c: number;
  degenerate: boolean;
  side_fraction: number;
}

export interface Heatmap {
  radii: number[];
  half_widths: number[];
  cells: HeatCell[];
  color_domain: [number, number];
  all_degenerate: boolean;
}

export interface Bundle {
  schema_version: string;
  intro: { hook: string; background: string; outline: string[] };
  scenes: Scene[];
  resolution: { summary: string; download_refs: string[]; references: string[] };
  data: {
    actor_slices: { treatment: ActorSlice; control: ActorSlice };
    trend_bins: TrendBins;
    covariate_table: CovariateTable;
    heatmap: Heatmap;
  };
  theme: Record<string, string>;
  meta: {
    seed: number;
    labels: { treatment: string; control: string; dependent: string; region: string };
    data_source: string;
    tile_url_template: string | null;
    actors: { treatment: string; control: string; score: number };
  };
}

export type Arm = "treatment" | "control";
export const ARMS: Arm[] = ["treatment", "control"];
