/** Node bindings for the seqlabkit toolkit.
 *
 * Four operations are exposed: strict span evaluation, response
 * parsing+mapping, prompt building, and response-oriented losses. Each
 * delegates to the toolkit CLI over its JSONL interfaces; numbers cross
 * the boundary as JSON doubles, bit-exact in both directions.
 */

import { parseJsonLines, runCli, toJsonl, withTempFiles } from "./bridge.js";
import type {
  CorpusRecord,
  EvalMode,
  EvalReport,
  LossResult,
  Objective,
  PromptLayout,
  PromptSpec,
  Reduction,
  TokenLogProbs,
} from "./types.js";

export { CliError, runCli } from "./bridge.js";
export * from "./types.js";

/** Mirrors the primary package version. */
export const version = "0.1.0";

/** Strict span-based evaluation of predictions against references. */
export async function evaluate(
  refs: CorpusRecord[],
  preds: CorpusRecord[],
  mode: EvalMode = "sc",
): Promise<EvalReport> {
  return withTempFiles(
    { "refs.jsonl": toJsonl(refs), "preds.jsonl": toJsonl(preds) },
    async (paths) => {
      const stdout = await runCli([
        "evaluate", paths["refs.jsonl"], paths["preds.jsonl"], "--mode", mode, "--json",
      ]);
      return JSON.parse(stdout) as EvalReport;
    },
  );
}

/** Parse a generated response and map it onto the tokens as IOB2 tag strings. */
export async function parseAndMap(
  response: string,
  tokens: string[],
  options: string[],
): Promise<string[]> {
  return withTempFiles(
    { "responses.jsonl": toJsonl([{ tokens, response, options }]) },
    async (paths) => {
      const stdout = await runCli(["parse-responses", paths["responses.jsonl"]]);
      const [record] = parseJsonLines<CorpusRecord>(stdout);
      return record.tags;
    },
  );
}

/** Render one prompt spec into its text and labeled regions. */
export async function buildPrompt(spec: PromptSpec): Promise<PromptLayout> {
  return withTempFiles(
    { "spec.json": JSON.stringify(spec) },
    async (paths) => {
      const stdout = await runCli(["render-prompt", paths["spec.json"]]);
      return JSON.parse(stdout) as PromptLayout;
    },
  );
}

/** Response-oriented loss for one layout and its aligned per-token log-probs. */
export async function loss(
  layout: PromptLayout,
  logprobs: TokenLogProbs,
  objective: Objective = "vanilla",
  reduction: Reduction = "sum",
): Promise<number> {
  const result = await lossDetailed(layout, logprobs, objective, reduction);
  return result.loss;
}

/** Like {@link loss} but also reports whether the objective selected no tokens. */
export async function lossDetailed(
  layout: PromptLayout,
  logprobs: TokenLogProbs,
  objective: Objective = "vanilla",
  reduction: Reduction = "sum",
): Promise<LossResult> {
  return withTempFiles(
    {
      "layouts.jsonl": toJsonl([layout]),
      "logprobs.jsonl": toJsonl([logprobs]),
    },
    async (paths) => {
      const stdout = await runCli([
        "loss", paths["layouts.jsonl"], paths["logprobs.jsonl"],
        "--objective", objective, "--reduction", reduction,
      ]);
      const [result] = parseJsonLines<LossResult>(stdout);
      return result;
    },
  );
}
