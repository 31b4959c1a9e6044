/** Browser entry point: binds SandboxApp to the document. */

import { ApiError, SandboxApi } from "./api.js";
import { SandboxApp } from "./app.js";
import { renderForm } from "./form.js";
import type { OperatorKind } from "./types.js";

const api = new SandboxApi("");
const app = new SandboxApp(api);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function refresh(): Promise<void> {
  const views = await app.renderViews();
  el("banner-slot").innerHTML = views.banner;
  el("stale-slot").innerHTML = views.stale;
  el("forecast-slot").innerHTML = views.forecast;
  el("buffers-slot").innerHTML = views.buffers;
  el("ev-slot").innerHTML = views.scurves;
  el("tornado-slot").innerHTML = views.tornado;
  el("criticality-slot").innerHTML = views.criticality;
  el("leveler-slot").innerHTML = views.leveler;
  bindLevelerControls();
}

function renderScenarioForm(): void {
  el("form-slot").innerHTML = renderForm(app.form);
  const form = el("scenario-form") as HTMLFormElement;
  const nameInput = form.querySelector<HTMLInputElement>('input[name="name"]');
  nameInput?.addEventListener("input", () => {
    app.form.name = nameInput.value;
    renderScenarioForm();
  });
  const trialsInput = form.querySelector<HTMLInputElement>('input[name="trials"]');
  trialsInput?.addEventListener("change", () => {
    app.form.trials = trialsInput.value ? Number(trialsInput.value) : undefined;
    renderScenarioForm();
  });
  form.querySelectorAll<HTMLButtonElement>('button[data-action="add-operator"]').forEach((btn) =>
    btn.addEventListener("click", (evt) => {
      evt.preventDefault();
      app.form.addOperator(btn.dataset.kind as OperatorKind);
      renderScenarioForm();
    }),
  );
  form.querySelectorAll<HTMLButtonElement>('button[data-action="remove-operator"]').forEach((btn) =>
    btn.addEventListener("click", (evt) => {
      evt.preventDefault();
      app.form.removeOperator(Number(btn.dataset.index));
      renderScenarioForm();
    }),
  );
  form.addEventListener("submit", async (evt) => {
    evt.preventDefault();
    try {
      const { card } = await app.submitScenario();
      el("results-slot").insertAdjacentHTML("afterbegin", card);
    } catch (err) {
      const message = err instanceof ApiError ? err.detail : String(err);
      el("form-errors-slot").innerHTML = `<p class="form-error" role="alert">${message}</p>`;
    }
  });
}

function bindLevelerControls(): void {
  document.querySelectorAll<HTMLElement>(".decision-controls").forEach((controls) => {
    const week = Number(controls.dataset.week);
    const reason = controls.querySelector<HTMLInputElement>("input.reason");
    const rejectBtn = controls.querySelector<HTMLButtonElement>('button[data-action="reject"]');
    reason?.addEventListener("input", () => {
      if (rejectBtn) rejectBtn.disabled = !reason.value.trim();
    });
    controls.querySelectorAll<HTMLButtonElement>("button").forEach((btn) =>
      btn.addEventListener("click", async (evt) => {
        evt.preventDefault();
        const adopt = btn.dataset.action === "adopt";
        try {
          await app.decide(week, { adopt, reason: reason?.value ?? "" });
          await refresh();
        } catch (err) {
          const message = err instanceof ApiError ? `${err.status || ""} ${err.detail}` : String(err);
          controls.insertAdjacentHTML("beforeend", `<p class="form-error" role="alert">${message}</p>`);
        }
      }),
    );
  });
}

document.addEventListener("click", (evt) => {
  const target = evt.target as HTMLElement;
  if (target.dataset.action === "retry") void refresh();
});

renderScenarioForm();
void refresh();
