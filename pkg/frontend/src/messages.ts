import { z } from "zod";

export const PROTOCOL_VERSION = "musclerun-protocol/1";

const base = { seq: z.number().int() };

export const HelloMessage = z.object({
  ...base,
  kind: z.literal("hello"),
  version: z.literal(PROTOCOL_VERSION),
  mode: z.literal("env"),
  observation_layout: z.array(z.string()),
});

export const ObservationMessage = z.object({
  ...base,
  kind: z.literal("observation"),
  values: z.array(z.number()),
  seed: z.number().int(),
});

export const StepResultMessage = z.object({
  ...base,
  kind: z.literal("step_result"),
  observation: z.array(z.number()),
  reward: z.number(),
  done: z.boolean(),
  termination: z.string().nullable().optional(),
});

export const ErrorMessage = z.object({
  ...base,
  kind: z.literal("error"),
  code: z.string(),
  message: z.string(),
  offending_seq: z.number().int().nullable().optional(),
});

export const ServerMessage = z.discriminatedUnion("kind", [
  HelloMessage,
  ObservationMessage,
  StepResultMessage,
  ErrorMessage,
]);

export type ServerMessage = z.infer<typeof ServerMessage>;
export type HelloMessage = z.infer<typeof HelloMessage>;
export type ObservationMessage = z.infer<typeof ObservationMessage>;
export type StepResultMessage = z.infer<typeof StepResultMessage>;
export type ErrorMessage = z.infer<typeof ErrorMessage>;
