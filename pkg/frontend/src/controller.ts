/** Session state machine. The engine on the server is authoritative: the view
 * is always a pure function of the last fetched snapshot plus in-flight
 * flags, and answers are guarded by the snapshot's round token so duplicate
 * clicks cannot advance the session twice. */

import { ApiClient, ServiceError } from "./api.js";
import type { Answer, SessionRequest, Snapshot } from "./api.js";

export type Phase = "setup" | "creating" | "session";

export interface UiState {
  phase: Phase;
  snapshot: Snapshot | null;
  /** Posteriors keyed by diagnosis id-list at the start of the current round;
   * shown next to the current ones so each Bayesian shift is visible. */
  previousPosteriors: ReadonlyMap<string, number>;
  inFlight: boolean;
  error: string | null;
}

export type Listener = (state: UiState) => void;

export function diagnosisKey(ids: readonly string[]): string {
  return ids.join(",");
}

export class SessionController {
  private state: UiState = {
    phase: "setup",
    snapshot: null,
    previousPosteriors: new Map(),
    inFlight: false,
    error: null,
  };
  private readonly listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  getState(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private setState(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private static posteriorsOf(snapshot: Snapshot): Map<string, number> {
    return new Map(snapshot.diagnoses.map((d) => [diagnosisKey(d.ids), d.posterior]));
  }

  async start(config: SessionRequest): Promise<void> {
    if (this.state.inFlight) {
      return;
    }
    this.setState({ phase: "creating", inFlight: true, error: null });
    try {
      const snapshot = await this.api.createSession(config);
      this.setState({
        phase: "session",
        snapshot,
        previousPosteriors: SessionController.posteriorsOf(snapshot),
        inFlight: false,
      });
    } catch (err) {
      this.setState({ phase: "setup", inFlight: false, error: messageOf(err) });
    }
  }

  /** Submit the answer for the currently displayed round. Ignored while a
   * request is in flight or when no query is pending. */
  async answer(answer: Answer): Promise<void> {
    const { snapshot, inFlight } = this.state;
    if (inFlight || snapshot === null || snapshot.status !== "awaiting-answer") {
      return;
    }
    const previous = SessionController.posteriorsOf(snapshot);
    this.setState({ inFlight: true, error: null });
    try {
      const next = await this.api.postAnswer(snapshot.id, answer, snapshot.round);
      this.setState({ snapshot: next, previousPosteriors: previous, inFlight: false });
    } catch (err) {
      if (err instanceof ServiceError && err.status === 409) {
        // stale round or concurrent update: re-fetch and re-render
        const fresh = await this.api.getSession(snapshot.id).catch(() => snapshot);
        this.setState({ snapshot: fresh, inFlight: false, error: null });
        return;
      }
      this.setState({ inFlight: false, error: messageOf(err) });
    }
  }

  async refresh(): Promise<void> {
    const { snapshot } = this.state;
    if (snapshot === null) {
      return;
    }
    const fresh = await this.api.getSession(snapshot.id);
    this.setState({ snapshot: fresh });
  }

  reset(): void {
    this.setState({
      phase: "setup",
      snapshot: null,
      previousPosteriors: new Map(),
      inFlight: false,
      error: null,
    });
  }
}

function messageOf(err: unknown): string {
  if (err instanceof ServiceError) {
    return err.message;
  }
  return err instanceof Error ? err.message : String(err);
}
