/** Payload shapes of the analysis API. */

export type Granularity = "paragraph" | "sentence";

export interface SceneJson {
  i: number;
  ref: number;
  entities: string[];
  shade: number;
  rect: [number, number, number, number];
}

export interface LifelineJson {
  entity: string;
  color: string;
  width: number;
  anchors: [number, number][];
}

export interface StorylineJson {
  version: number;
  granularity: Granularity;
  scenes: SceneJson[];
  lifelines: LifelineJson[];
  separators: { x: number; title: string }[];
  indicators: { x: number; shade: number }[];
}

export interface IndexRow {
  doc_id: string;
  title: string;
  pub_date: string;
  color_index: number;
  record_path: string;
}

export interface SentenceRow {
  index: number;
  start: number;
  end: number;
  label: "comparative" | "non_comparative";
  confidence: number;
}

export interface MentionRow {
  entity: string;
  canonical: string;
  sentence_index: number;
  start: number;
  end: number;
  surface: string;
}

export interface ParagraphRow {
  index: number;
  text: string;
  sentences: SentenceRow[];
  mentions: MentionRow[];
}

export interface TextPayload {
  doc_id: string;
  title: string;
  pub_date: string;
  sections: { title: string; kind: string; range: [number, number] }[];
  paragraphs: ParagraphRow[];
}

export interface RankingRow {
  entity: string;
  canonical: string;
  count: number;
  first_sentence_index: number;
}

export interface GraphPayload {
  level: string;
  nodes: { id: string; weight: number; community: number }[];
  edges: { a: string; b: string; weight: number }[];
}

export interface EvolutionPayload {
  nodes: {
    entity: string;
    canonical: string;
    origin_doc: string;
    origin_date: string;
    origin_color_index: number;
    x: number;
  }[];
  arcs: { a: string; b: string; weight: number }[];
}
