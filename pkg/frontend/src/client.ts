import { spawn, type ChildProcess } from "node:child_process";
import * as net from "node:net";
import * as readline from "node:readline";

import {
  PROTOCOL_VERSION,
  ServerMessage,
  type ObservationMessage,
  type StepResultMessage,
} from "./messages.js";

export class ProtocolError extends Error {
  constructor(
    message: string,
    public readonly code?: string,
  ) {
    super(message);
    this.name = "ProtocolError";
  }
}

export interface ResetOptions {
  difficulty?: number;
  seed?: number;
  maxObstacles?: number;
}

export interface ResetResult {
  observation: number[];
  seed: number;
}

export interface StepResult {
  observation: number[];
  reward: number;
  done: boolean;
  termination: string | null;
}

export interface LaunchOptions {
  /** Python interpreter used to start the server (default "python3"). */
  python?: string;
  /** Extra arguments appended to the serve command. */
  extraArgs?: string[];
}

export const OBSERVATION_SIZE = 41;
export const ACTION_SIZE = 18;

/**
 * Client for a musclerun env-mode server: newline-delimited JSON over
 * TCP, one message per line, strictly increasing `seq` per sender.
 */
export class MuscleRunEnv {
  private sendSeq = 0;
  private lastRecvSeq = -1;
  private buffer = "";
  private queue: ServerMessage[] = [];
  private waiter: {
    resolve: (m: ServerMessage) => void;
    reject: (e: Error) => void;
  } | null = null;
  private closed = false;

  readonly observationLayout: string[];

  private constructor(
    private readonly socket: net.Socket,
    layout: string[],
    private readonly proc: ChildProcess | null,
  ) {
    this.observationLayout = layout;
  }

  /** Spawn `python -m musclerun.cli serve --mode env` and connect to it. */
  static async launch(options: LaunchOptions = {}): Promise<MuscleRunEnv> {
    const python = options.python ?? "python3";
    const args = [
      "-m",
      "musclerun.cli",
      "serve",
      "--mode",
      "env",
      "--port",
      "0",
      ...(options.extraArgs ?? []),
    ];
    const proc = spawn(python, args, { stdio: ["ignore", "pipe", "pipe"] });
    const port = await new Promise<number>((resolve, reject) => {
      const rl = readline.createInterface({ input: proc.stdout! });
      const stderr: string[] = [];
      proc.stderr!.on("data", (d) => stderr.push(String(d)));
      rl.on("line", (line) => {
        const m = /^LISTENING (\d+)$/.exec(line);
        if (m) {
          rl.close();
          resolve(Number(m[1]));
        }
      });
      proc.on("error", reject);
      proc.on("exit", (code) =>
        reject(
          new Error(
            `server exited with code ${code} before listening:\n${stderr.join("")}`,
          ),
        ),
      );
    });
    return MuscleRunEnv.connect("127.0.0.1", port, proc);
  }

  /** Connect to an already-running env-mode server. */
  static async connect(
    host: string,
    port: number,
    proc: ChildProcess | null = null,
  ): Promise<MuscleRunEnv> {
    const socket = await new Promise<net.Socket>((resolve, reject) => {
      const s = net.createConnection({ host, port }, () => resolve(s));
      s.on("error", reject);
    });
    const env = new MuscleRunEnv(socket, [], proc);
    env.attach();
    env.send("hello", { token: "", version: PROTOCOL_VERSION });
    const hello = await env.recv();
    if (hello.kind !== "hello") {
      throw new ProtocolError(`expected hello, got ${hello.kind}`);
    }
    (env.observationLayout as string[]).push(...hello.observation_layout);
    return env;
  }

  private attach(): void {
    this.socket.setEncoding("utf8");
    this.socket.on("data", (chunk: string) => {
      this.buffer += chunk;
      let idx: number;
      while ((idx = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, idx);
        this.buffer = this.buffer.slice(idx + 1);
        this.dispatch(line);
      }
    });
    this.socket.on("error", (err) => this.fail(err));
    this.socket.on("close", () => {
      if (!this.closed) {
        this.fail(new ProtocolError("connection closed by server"));
      }
    });
  }

  private dispatch(line: string): void {
    let msg: ServerMessage;
    try {
      msg = ServerMessage.parse(JSON.parse(line));
    } catch (err) {
      this.fail(new ProtocolError(`unparseable server message: ${err}`));
      return;
    }
    if (msg.seq <= this.lastRecvSeq) {
      this.fail(
        new ProtocolError(`server seq ${msg.seq} not strictly increasing`),
      );
      return;
    }
    this.lastRecvSeq = msg.seq;
    if (this.waiter) {
      const w = this.waiter;
      this.waiter = null;
      w.resolve(msg);
    } else {
      this.queue.push(msg);
    }
  }

  private fail(err: Error): void {
    if (this.waiter) {
      const w = this.waiter;
      this.waiter = null;
      w.reject(err);
    }
  }

  private send(kind: string, payload: Record<string, unknown>): void {
    const msg = { kind, seq: this.sendSeq, ...payload };
    this.sendSeq += 1;
    this.socket.write(JSON.stringify(msg) + "\n");
  }

  private recv(): Promise<ServerMessage> {
    const queued = this.queue.shift();
    if (queued !== undefined) {
      return Promise.resolve(queued);
    }
    return new Promise((resolve, reject) => {
      this.waiter = { resolve, reject };
    });
  }

  private async recvOrThrow(): Promise<ServerMessage> {
    const msg = await this.recv();
    if (msg.kind === "error") {
      throw new ProtocolError(`${msg.code}: ${msg.message}`, msg.code);
    }
    return msg;
  }

  async reset(options: ResetOptions = {}): Promise<ResetResult> {
    this.send("reset", {
      difficulty: options.difficulty ?? 0,
      seed: options.seed ?? null,
      max_obstacles: options.maxObstacles ?? 3,
    });
    const msg = await this.recvOrThrow();
    if (msg.kind !== "observation") {
      throw new ProtocolError(`expected observation, got ${msg.kind}`);
    }
    const obs = msg as ObservationMessage;
    return { observation: obs.values, seed: obs.seed };
  }

  async step(action: number[]): Promise<StepResult> {
    if (action.length !== ACTION_SIZE) {
      throw new ProtocolError(
        `action must have length ${ACTION_SIZE}, got ${action.length}`,
      );
    }
    this.send("action", { values: action });
    const msg = await this.recvOrThrow();
    if (msg.kind !== "step_result") {
      throw new ProtocolError(`expected step_result, got ${msg.kind}`);
    }
    const step = msg as StepResultMessage;
    return {
      observation: step.observation,
      reward: step.reward,
      done: step.done,
      termination: step.termination ?? null,
    };
  }

  async close(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    try {
      this.send("bye", {});
    } catch {
      /* socket may already be gone */
    }
    await new Promise<void>((resolve) => this.socket.end(resolve));
    if (this.proc && this.proc.exitCode === null) {
      this.proc.kill();
    }
  }
}
