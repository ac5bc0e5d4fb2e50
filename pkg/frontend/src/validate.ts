/** Client-side validation of the setup form, mirroring the server's rules so
 * obvious mistakes are caught before any request is made. */

import type { SessionRequest } from "./api.js";

export interface SetupForm {
  kb: string;
  strategy: "split" | "entropy" | "rio";
  n: number;
  sigma: number;
  c: number;
  cMin: number;
  cMax: number;
  epsilon: number;
  stop: "singleton" | "threshold" | "both";
}

export const DEFAULT_FORM: SetupForm = {
  kb: "",
  strategy: "entropy",
  n: 9,
  sigma: 85,
  c: 0.25,
  cMin: 0,
  cMax: 0.5,
  epsilon: 0.25,
  stop: "singleton",
};

export function validateForm(form: SetupForm): string[] {
  const errors: string[] = [];
  if (form.kb.trim() === "") {
    errors.push("Paste a knowledge base first.");
  }
  if (!Number.isInteger(form.n) || form.n < 2) {
    errors.push("The leading-diagnosis bound n must be an integer of at least 2.");
  }
  if (!(form.sigma > 0 && form.sigma <= 100)) {
    errors.push("The acceptance threshold sigma must lie in (0, 100].");
  }
  if (form.cMax < form.cMin) {
    errors.push("The cautiousness maximum must not be below the minimum.");
  }
  if (!(form.cMin <= form.c && form.c <= form.cMax)) {
    errors.push("The starting cautiousness c must lie between its minimum and maximum.");
  }
  if (!(form.epsilon > 0 && form.epsilon < 0.5)) {
    errors.push("Epsilon must lie strictly between 0 and 0.5.");
  }
  return errors;
}

export function toRequest(form: SetupForm): SessionRequest {
  return {
    kb: form.kb,
    strategy: form.strategy,
    n: form.n,
    sigma: form.sigma,
    c: form.c,
    c_min: form.cMin,
    c_max: form.cMax,
    epsilon: form.epsilon,
    stop: form.stop,
  };
}
