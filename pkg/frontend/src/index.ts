export {
  ACTION_SIZE,
  MuscleRunEnv,
  OBSERVATION_SIZE,
  ProtocolError,
  type LaunchOptions,
  type ResetOptions,
  type ResetResult,
  type StepResult,
} from "./client.js";
export { PROTOCOL_VERSION } from "./messages.js";
