/** Browser entry point: wires the setup form and the session view. */

import { ApiClient } from "./api.js";
import { SessionController } from "./controller.js";
import { DEFAULT_FORM, toRequest, validateForm, type SetupForm } from "./validate.js";
import { renderSession } from "./view.js";

function field<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function readForm(): SetupForm {
  return {
    kb: field<HTMLTextAreaElement>("kb").value,
    strategy: field<HTMLSelectElement>("strategy").value as SetupForm["strategy"],
    n: Number(field<HTMLInputElement>("n").value),
    sigma: Number(field<HTMLInputElement>("sigma").value),
    c: Number(field<HTMLInputElement>("c").value),
    cMin: Number(field<HTMLInputElement>("c-min").value),
    cMax: Number(field<HTMLInputElement>("c-max").value),
    epsilon: Number(field<HTMLInputElement>("epsilon").value),
    stop: field<HTMLSelectElement>("stop").value as SetupForm["stop"],
  };
}

export function bootstrap(baseUrl: string): void {
  const controller = new SessionController(new ApiClient(baseUrl));
  const setupSection = field<HTMLElement>("setup");
  const sessionSection = field<HTMLElement>("session");
  const errorsBox = field<HTMLElement>("setup-errors");
  const form = field<HTMLFormElement>("setup-form");

  controller.subscribe((state) => {
    const inSetup = state.phase !== "session";
    setupSection.hidden = !inSetup;
    sessionSection.hidden = inSetup;
    if (inSetup) {
      errorsBox.textContent = state.error ?? "";
    } else {
      sessionSection.innerHTML =
        renderSession(state) +
        '<button type="button" id="new-session">Start over</button>';
    }
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = readForm();
    const errors = validateForm(data);
    if (errors.length > 0) {
      errorsBox.textContent = errors.join(" ");
      return;
    }
    void controller.start(toRequest(data));
  });

  sessionSection.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const answer = target.getAttribute("data-answer");
    if (answer === "yes" || answer === "no") {
      void controller.answer(answer);
    } else if (target.id === "new-session") {
      controller.reset();
    }
  });

  // populate defaults
  field<HTMLInputElement>("n").value = String(DEFAULT_FORM.n);
  field<HTMLInputElement>("sigma").value = String(DEFAULT_FORM.sigma);
  field<HTMLInputElement>("c").value = String(DEFAULT_FORM.c);
  field<HTMLInputElement>("c-min").value = String(DEFAULT_FORM.cMin);
  field<HTMLInputElement>("c-max").value = String(DEFAULT_FORM.cMax);
  field<HTMLInputElement>("epsilon").value = String(DEFAULT_FORM.epsilon);
}

if (typeof document !== "undefined" && document.getElementById("setup-form") !== null) {
  bootstrap("");
}
