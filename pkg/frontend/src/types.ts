/** Plain-data mirrors of the toolkit's wire formats. */

/** One sentence with word tokens and aligned IOB2 tag strings. */
export interface CorpusRecord {
  tokens: string[];
  tags: string[];
  heads?: number[];
  deprels?: string[];
  verb_index?: number;
  [extra: string]: unknown;
}

export type EvalMode = "sd" | "sc";

export interface ScoreTriple {
  precision: number;
  recall: number;
  f1: number;
}

export interface ClassScores extends ScoreTriple {
  true_positive: number;
  predicted_total: number;
  reference_total: number;
}

export interface EvalReport {
  mode: "SD" | "SC";
  per_class: Record<string, ClassScores>;
  micro: ScoreTriple;
  macro: ScoreTriple;
}

/** Demonstrations are records (responses rendered by the toolkit) or explicit [record, response] pairs. */
export type Demonstration = CorpusRecord | [CorpusRecord, string];

export interface PromptSpec {
  query: CorpusRecord;
  options?: string[];
  instruction?: string | null;
  demonstrations?: Demonstration[];
  include_query_response?: boolean;
  verb_field?: boolean;
}

export interface PromptRegion {
  kind: string;
  start: number;
  end: number;
}

export interface PromptLayout {
  text: string;
  regions: PromptRegion[];
  eos_included: boolean;
}

export type Objective = "vanilla" | "src" | "mrc";
export type Reduction = "sum" | "mean";

/** Per-token log-probs plus each token's character span in the prompt text (null = padding/special). */
export interface TokenLogProbs {
  logprobs: number[];
  offsets: ([number, number] | null)[];
  pad_mask?: boolean[];
}

export interface LossResult {
  loss: number;
  empty_target: boolean;
}
