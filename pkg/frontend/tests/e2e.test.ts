/**
 * End-to-end: build the fixture knowledge graph with the real CLI, serve it
 * with the real API server, and drive the compiled explorer UI against it.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createApp, type ExplorerApp } from "../src/app.js";
import { waitFor } from "./helpers.js";

// vitest runs with cwd = frontend/; the Python package and fixtures live in
// the repository root one level up.
const repoRoot = resolve(process.cwd(), "..");
const fixtures = join(repoRoot, "tests", "fixtures");

let workDir: string;
let server: ChildProcess | null = null;
let base = "";

function cli(...args: string[]): void {
  execFileSync("python3", ["-m", "condkg.cli", ...args], { cwd: repoRoot, stdio: "pipe" });
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "condkg-e2e-"));
  const sentences = join(workDir, "sentences.jsonl");
  const statements = join(workDir, "statements.jsonl");
  const kgDir = join(workDir, "kg");
  cli("ingest", "--corpus", join(fixtures, "corpus.jsonl"), "--out", sentences);
  cli(
    "extract",
    "--sentences",
    sentences,
    "--gold",
    join(fixtures, "gold.tsv"),
    "--out",
    statements,
  );
  cli("build-kg", "--statements", statements, "--sentences", sentences, "--out", kgDir);

  server = spawn("python3", ["-m", "condkg.cli", "serve", "--kg", kgDir, "--addr", "127.0.0.1:0"], {
    cwd: repoRoot,
  });
  const port = await new Promise<number>((resolvePort, rejectPort) => {
    let err = "";
    const timer = setTimeout(() => rejectPort(new Error(`server did not start: ${err}`)), 30_000);
    server!.stderr!.on("data", (chunk: Buffer) => {
      err += chunk.toString();
      const m = err.match(/serving on http:\/\/[^:]+:(\d+)\//);
      if (m) {
        clearTimeout(timer);
        resolvePort(Number(m[1]));
      }
    });
    server!.on("exit", (code) => rejectPort(new Error(`server exited early (${code}): ${err}`)));
  });
  base = `http://127.0.0.1:${port}`;
  const health = await fetch(`${base}/api/health`);
  expect(health.status).toBe(200);
});

afterAll(() => {
  server?.kill();
  if (workDir) {
    rmSync(workDir, { recursive: true, force: true });
  }
});

function chipFor(root: HTMLElement, lemma: string): HTMLButtonElement {
  const chip = [...root.querySelectorAll<HTMLButtonElement>(".chip")].find(
    (c) => c.dataset.lemma === lemma,
  );
  if (!chip) {
    throw new Error(`no chip for ${lemma}`);
  }
  return chip;
}

describe("explorer against the live fixture service", () => {
  let root: HTMLElement;
  let app: ExplorerApp;

  it("search + filters render the four conditional fact edges", async () => {
    document.body.innerHTML = "";
    root = document.createElement("div");
    document.body.append(root);
    app = createApp(root, new ApiClient(base));

    const input = root.querySelector<HTMLInputElement>("#concept-input")!;
    input.value = "apoptosis";
    root.querySelector("form.search")!.dispatchEvent(new Event("submit", { bubbles: true }));
    await waitFor(() => root.querySelectorAll(".edge").length > 0);

    chipFor(root, "increase").click();
    await waitFor(() => app.state.filters.includes("increase") && app.state.appliedSeq >= 2);
    chipFor(root, "reduce").click();
    await waitFor(
      () => app.state.filters.length === 2 && root.querySelectorAll(".edge").length === 4,
    );

    const edges = [...root.querySelectorAll(".edge")];
    expect(edges).toHaveLength(4);
    for (const edgeEl of edges) {
      expect(edgeEl.querySelector(".condition-badge")).not.toBeNull();
    }
    const subjects = new Set(
      [...root.querySelectorAll(".node:not(.center)")].map((n) => n.getAttribute("data-key")),
    );
    expect(subjects).toEqual(
      new Set(["ogd_exposure", "rnai-mediated_knockdown", "inhibition", "pre-ischemic_exercise"]),
    );
  });

  it("clicking an edge shows its conditions and a provenance sentence from the API", async () => {
    const edgeEl = root.querySelector<SVGGElement>(".edge")!;
    edgeEl.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await waitFor(() => root.querySelectorAll("#panel .sentence").length > 0);

    const conditions = [...root.querySelectorAll("#panel .condition")].map((n) => n.textContent);
    expect(conditions.length).toBeGreaterThanOrEqual(1);
    expect(conditions.join(" ")).toContain("apoptosis");

    const sentenceText = root.querySelector("#panel .sentence")!.textContent!;
    const expectedSentences = [
      "OGD exposure increased apoptosis in cortical neurons.",
      "RNAi-mediated knockdown of INHBB increased apoptosis during ischemia.",
      "Inhibition of calcium influx reduced apoptosis in hippocampal slices.",
      "Pre-ischemic exercise reduced apoptosis after transient ischemia.",
    ];
    expect(expectedSentences.some((s) => sentenceText.includes(s))).toBe(true);
  });

  it("re-centering on a neighbor is reversible through browser history", async () => {
    const before = app.state.center!;
    const node = root.querySelector<SVGGElement>('.node[data-key="ogd_exposure"]')!;
    node.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await waitFor(() => app.state.center === "ogd_exposure");
    expect(root.querySelector(".node.center")?.getAttribute("data-key")).toBe("ogd_exposure");
    expect(app.state.expanded).toContain(before);

    window.history.back();
    await waitFor(() => app.state.center === before, 15_000);
    expect(root.querySelector(".node.center")?.getAttribute("data-key")).toBe(before);
    app.destroy();
  });
});
