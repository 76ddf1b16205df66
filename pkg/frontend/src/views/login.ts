// Sign-up walkthrough: invite code, display name, and the consent gate.

import { ApiClient, ApiError } from "../api.js";
import { el } from "../dom.js";

export function createLoginView(
  api: ApiClient,
  onSignedUp: (token: string, userId: string) => void,
): { root: HTMLElement } {
  const root = el("div", { class: "login" });
  const code = el("input", { placeholder: "invite code from your DM" });
  const name = el("input", { placeholder: "display name" });
  const consent = el("input", { type: "checkbox", id: "consent" });
  const note = el("p", { class: "login-note", "data-testid": "login-note" });
  const button = el("button", { class: "primary" }, ["Sign up"]);

  button.addEventListener("click", async () => {
    note.textContent = "";
    if (!consent.checked) {
      note.textContent = "You need to consent to the data policy to use nooks.";
      return;
    }
    try {
      const result = await api.signup(code.value.trim(), name.value.trim(), true);
      onSignedUp(result.token, result.user_id);
    } catch (error) {
      note.textContent = error instanceof ApiError ? error.message : String(error);
    }
  });

  root.append(
    el("h2", {}, ["Join nooks"]),
    el("p", {}, [
      "Nooks are anonymous, day-long group chats around topics your ",
      "colleagues suggest. We record who joins which nook, never what ",
      "anyone says in it.",
    ]),
    el("label", {}, ["Invite code", code]),
    el("label", {}, ["Display name", name]),
    el("label", { class: "checkbox" }, [
      consent,
      "I consent to nook metadata and my participation being recorded.",
    ]),
    button,
    note,
  );
  return { root };
}
