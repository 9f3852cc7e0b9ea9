/** Subprocess bridge to the toolkit CLI.
 *
 * All behavior lives on the Python side; this module only marshals JSON
 * across the process boundary. Calls are async, so concurrent invocations
 * run in parallel subprocesses without blocking the event loop.
 */

import { execFile } from "node:child_process";
import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Raised when the toolkit CLI exits non-zero; carries its exit code and stderr diagnostics. */
export class CliError extends Error {
  constructor(
    public readonly exitCode: number,
    public readonly stderr: string,
    args: string[],
  ) {
    super(`seqlabkit ${args[0] ?? ""} exited with code ${exitCode}: ${stderr.trim()}`);
    this.name = "CliError";
  }
}

function cliCommand(): { command: string; prefix: string[] } {
  const bin = process.env.SEQLABKIT_BIN;
  if (bin) {
    const parts = bin.split(" ").filter(Boolean);
    return { command: parts[0], prefix: parts.slice(1) };
  }
  return { command: "seqlabkit", prefix: [] };
}

export function runCli(args: string[]): Promise<string> {
  const { command, prefix } = cliCommand();
  return new Promise((resolve, reject) => {
    execFile(
      command,
      [...prefix, ...args],
      { maxBuffer: 64 * 1024 * 1024 },
      (error, stdout, stderr) => {
        if (error) {
          const code = typeof (error as NodeJS.ErrnoException & { code?: unknown }).code === "number"
            ? ((error as unknown as { code: number }).code)
            : 1;
          reject(new CliError(code, stderr || String(error), args));
          return;
        }
        resolve(stdout);
      },
    );
  });
}

/** Write payloads to a scratch directory, run the CLI, clean up. */
export async function withTempFiles<T>(
  files: Record<string, string>,
  fn: (paths: Record<string, string>) => Promise<T>,
): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "seqlabkit-"));
  try {
    const paths: Record<string, string> = {};
    for (const [name, content] of Object.entries(files)) {
      const path = join(dir, name);
      await writeFile(path, content, "utf-8");
      paths[name] = path;
    }
    return await fn(paths);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

export function toJsonl(rows: unknown[]): string {
  return rows.map((row) => JSON.stringify(row)).join("\n") + "\n";
}

export function parseJsonLines<T>(stdout: string): T[] {
  return stdout
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as T);
}
