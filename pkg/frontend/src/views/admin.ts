// Admin page: onboarding, predefined nooks, schedule, and sample editing.
// Everything here needs the admin token, not a member token.

import { ApiClient, ApiError } from "../api.js";
import { el } from "../dom.js";

export function createAdminView(api: ApiClient): { root: HTMLElement } {
  const root = el("div", { class: "admin" });
  const status = el("p", { class: "admin-status", "data-testid": "admin-status" });

  const report = (text: string) => {
    status.textContent = text;
  };
  const failed = (error: unknown) => {
    report(error instanceof ApiError ? `Error: ${error.message}` : String(error));
  };

  // onboarding
  const channelInput = el("input", { placeholder: "channel name, e.g. general" });
  const onboardChannel = el("button", {}, ["Onboard channel members"]);
  onboardChannel.addEventListener("click", async () => {
    try {
      const result = await api.adminOnboard({ channel_name: channelInput.value });
      report(`Invited ${result.invited.length} member(s).`);
    } catch (error) {
      failed(error);
    }
  });
  const usersInput = el("input", { placeholder: "usernames, comma-separated" });
  const onboardUsers = el("button", {}, ["Invite users"]);
  onboardUsers.addEventListener("click", async () => {
    try {
      const names = usersInput.value.split(",").map((s) => s.trim()).filter(Boolean);
      const result = await api.adminOnboard({ user_names: names });
      report(`Invited ${result.invited.length} member(s).`);
    } catch (error) {
      failed(error);
    }
  });

  // predefined nooks: one per line, "YYYY-MM-DD | topic [| thoughts]"
  const seeds = el("textarea", {
    class: "seed-box",
    placeholder: "2026-08-10 | What's your favorite bad movie? | Bring your worst.",
  });
  const seedButton = el("button", {}, ["Queue predefined nooks"]);
  seedButton.addEventListener("click", async () => {
    const entries = [];
    for (const line of seeds.value.split("\n")) {
      if (!line.trim() || line.trim().startsWith("#")) continue;
      const parts = line.split("|").map((s) => s.trim());
      if (parts.length < 2) {
        report(`Bad line: ${line}`);
        return;
      }
      entries.push({
        batch_date: parts[0],
        topic: parts[1],
        initial_thoughts: parts[2] ?? "",
      });
    }
    try {
      const result = await api.adminPredefined(entries);
      report(`Queued ${result.nook_ids.length} predefined nook(s).`);
    } catch (error) {
      failed(error);
    }
  });

  // schedule
  const tz = el("input", { placeholder: "timezone, e.g. America/New_York" });
  const cutoff = el("input", { placeholder: "batch cutoff, e.g. 16:00" });
  const activation = el("input", { placeholder: "activation time, e.g. 12:00" });
  const lifetimeHours = el("input", { placeholder: "channel lifetime hours, e.g. 24" });
  const minMembers = el("input", { placeholder: "min members, e.g. 2" });
  const scheduleButton = el("button", {}, ["Update schedule"]);
  scheduleButton.addEventListener("click", async () => {
    const payload: Record<string, unknown> = {};
    if (tz.value) payload.timezone = tz.value;
    if (cutoff.value) payload.batch_cutoff = cutoff.value;
    if (activation.value) payload.activation_time = activation.value;
    if (lifetimeHours.value) payload.channel_lifetime_seconds = Number(lifetimeHours.value) * 3600;
    if (minMembers.value) payload.min_members_to_activate = Number(minMembers.value);
    try {
      await api.adminSchedule(payload);
      report("Schedule updated.");
    } catch (error) {
      failed(error);
    }
  });

  // samples: one per line, "topic | thoughts"
  const samplesBox = el("textarea", {
    class: "samples-box",
    placeholder: "Is anyone else also watching the match tonight | Let's meet",
  });
  const samplesButton = el("button", {}, ["Replace sample nooks"]);
  samplesButton.addEventListener("click", async () => {
    const samples = samplesBox.value
      .split("\n")
      .filter((line) => line.trim())
      .map((line) => {
        const [topic, thoughts] = line.split("|").map((s) => s.trim());
        return { topic: topic ?? "", initial_thoughts: thoughts ?? "" };
      });
    try {
      await api.adminSamples(samples);
      report(`Replaced samples (${samples.length}).`);
    } catch (error) {
      failed(error);
    }
  });

  root.append(
    el("h2", {}, ["Workspace administration"]),
    status,
    el("section", {}, [el("h3", {}, ["Onboarding"]), channelInput, onboardChannel, usersInput, onboardUsers]),
    el("section", {}, [el("h3", {}, ["Predefined nooks"]), seeds, seedButton]),
    el("section", {}, [
      el("h3", {}, ["Schedule"]),
      tz, cutoff, activation, lifetimeHours, minMembers, scheduleButton,
    ]),
    el("section", {}, [el("h3", {}, ["Sample nooks"]), samplesBox, samplesButton]),
  );
  return { root };
}
