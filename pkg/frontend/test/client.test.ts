import { execFile } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { promisify } from "node:util";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  ACTION_SIZE,
  MuscleRunEnv,
  OBSERVATION_SIZE,
  ProtocolError,
} from "../src/index.js";

const run = promisify(execFile);

// Constant per-muscle tone (nine values, mirrored to both legs) that
// keeps the model standing for 603 control steps on seed 11 at
// difficulty 0 — long enough to exercise a 500+ step episode.
const TONE_HALF = [
  0.16791190514823529, 0.26291398610126027, 0.15190591506685758,
  0.1277598872501318, 0.3649021997883705, 0.30814400159109434,
  0.35648201777881316, 0.24246279286807854, 0.6682447100606621,
];
const TONE = [...TONE_HALF, ...TONE_HALF];

interface LogRow {
  q: number[];
  qd: number[];
  rewardInc: number;
}

function parseLog(text: string): LogRow[] {
  const lines = text.trim().split("\n");
  // line 0: "# musclerun-log/1 {...meta}", line 1: column header
  const header = lines[1].split(",");
  const col = (name: string) => header.indexOf(name);
  const rows: LogRow[] = [];
  for (const line of lines.slice(2)) {
    const cells = line.split(",").map(Number);
    rows.push({
      q: Array.from({ length: 9 }, (_, i) => cells[col(`q${i}`)]),
      qd: Array.from({ length: 9 }, (_, i) => cells[col(`qd${i}`)]),
      rewardInc: cells[col("reward_inc")],
    });
  }
  return rows;
}

/** Observation slots that mirror generalized coordinates. */
function checkSharedSlots(obs: number[], row: LogRow): void {
  expect(obs[0]).toBe(row.q[2]);
  expect(obs[1]).toBe(row.q[0]);
  expect(obs[2]).toBe(row.q[1]);
  expect(obs[3]).toBe(row.qd[2]);
  expect(obs[4]).toBe(row.qd[0]);
  expect(obs[5]).toBe(row.qd[1]);
  for (let j = 0; j < 6; j++) {
    expect(obs[6 + j]).toBe(row.q[3 + j]);
    expect(obs[12 + j]).toBe(row.qd[3 + j]);
  }
}

describe("MuscleRunEnv", () => {
  let env: MuscleRunEnv;

  beforeAll(async () => {
    env = await MuscleRunEnv.launch();
  }, 60_000);

  afterAll(async () => {
    await env.close();
  });

  it("reports a 41-slot observation layout", () => {
    expect(env.observationLayout).toHaveLength(OBSERVATION_SIZE);
    expect(env.observationLayout[38]).toBe("next_obstacle_dx");
  });

  it("reset and step return 41-slot observations", async () => {
    const { observation, seed } = await env.reset({ difficulty: 0, seed: 1 });
    expect(seed).toBe(1);
    expect(observation).toHaveLength(41);
    expect(observation[38]).toBe(100.0); // no-obstacle sentinel
    const step = await env.step(new Array(ACTION_SIZE).fill(0));
    expect(step.observation).toHaveLength(41);
    expect(step.done).toBe(false);
    expect(typeof step.reward).toBe("number");
  });

  it("rejects actions that are not 18 numbers", async () => {
    await env.reset({ difficulty: 0, seed: 1 });
    await expect(env.step(new Array(17).fill(0))).rejects.toThrow(
      ProtocolError,
    );
  });

  it("server rejects a malformed action with protocol_error", async () => {
    // Bypass the client-side length check to exercise the server's own
    // validation; the connection is sacrificed.
    const raw = await MuscleRunEnv.launch();
    try {
      await raw.reset({ difficulty: 0, seed: 1 });
      (raw as any).send("action", { values: new Array(17).fill(0) });
      await expect((raw as any).recvOrThrow()).rejects.toMatchObject({
        code: "protocol_error",
      });
    } finally {
      await raw.close();
    }
  }, 60_000);

  it("is deterministic across resets and connections", async () => {
    const a = await env.reset({ difficulty: 2, seed: 123 });
    const stepsA = [];
    for (let i = 0; i < 5; i++) {
      stepsA.push(await env.step(TONE));
    }
    const other = await MuscleRunEnv.launch();
    try {
      const b = await other.reset({ difficulty: 2, seed: 123 });
      expect(b.observation).toEqual(a.observation);
      for (let i = 0; i < 5; i++) {
        const s = await other.step(TONE);
        expect(s.observation).toEqual(stepsA[i].observation);
        expect(s.reward).toBe(stepsA[i].reward);
      }
    } finally {
      await other.close();
    }
  }, 120_000);

  it("matches a CLI-produced trajectory log bit-for-bit over 500+ steps", async () => {
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "musclerun-"));
    const scriptPath = path.join(tmp, "tone.csv");
    const logPath = path.join(tmp, "episode.csv");
    fs.writeFileSync(
      scriptPath,
      Array.from({ length: 1000 }, () => TONE.join(",")).join("\n") + "\n",
    );
    await run("python3", [
      "-m",
      "musclerun.cli",
      "run",
      "--seed",
      "11",
      "--difficulty",
      "0",
      "--script",
      scriptPath,
      "--log",
      logPath,
    ]);
    const rows = parseLog(fs.readFileSync(logPath, "utf8"));
    expect(rows.length).toBeGreaterThanOrEqual(500);

    await env.reset({ difficulty: 0, seed: 11 });
    let steps = 0;
    let done = false;
    while (!done) {
      const result = await env.step(TONE);
      const row = rows[steps];
      expect(result.reward).toBe(row.rewardInc);
      checkSharedSlots(result.observation, row);
      steps += 1;
      done = result.done;
    }
    expect(steps).toBe(rows.length);
    fs.rmSync(tmp, { recursive: true, force: true });
  }, 300_000);
});
