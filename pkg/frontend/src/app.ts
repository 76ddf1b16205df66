// Single-page client for the nooks API: home (cards + create + connect),
// channels (live chat), and admin. Views poll every 15 seconds; the token
// lives in localStorage.

import { ApiClient } from "./api.js";
import { el, clear } from "./dom.js";
import { createAdminView } from "./views/admin.js";
import { createChannelsView } from "./views/channels.js";
import { createHomeView } from "./views/home.js";
import { createLoginView } from "./views/login.js";

const POLL_MS = 15_000;

export function startApp(mount: HTMLElement): void {
  const api = new ApiClient(() => localStorage.getItem("nooks-token"));
  let pollTimer: number | undefined;

  function show(view: HTMLElement): void {
    clear(mount);
    mount.append(view);
  }

  function signedOutFlow(): void {
    const login = createLoginView(api, (token, userId) => {
      localStorage.setItem("nooks-token", token);
      localStorage.setItem("nooks-user", userId);
      signedInFlow();
    });
    show(login.root);
  }

  function signedInFlow(): void {
    const selfId = localStorage.getItem("nooks-user") ?? "";
    const home = createHomeView(api, selfId);
    const channels = createChannelsView(api, selfId);
    const admin = createAdminView(
      new ApiClient(() => localStorage.getItem("nooks-admin-token")),
    );

    const shell = el("div", { class: "shell" });
    const content = el("main", { class: "content" });
    let active: "home" | "channels" | "admin" = "home";

    const activate = async (tab: typeof active) => {
      active = tab;
      clear(content);
      if (tab === "home") {
        content.append(home.root);
        await home.refresh();
      } else if (tab === "channels") {
        content.append(channels.root);
        await channels.refresh();
      } else {
        const adminToken = window.prompt(
          "Admin token (from `nooksctl install`):",
          localStorage.getItem("nooks-admin-token") ?? "",
        );
        if (adminToken) localStorage.setItem("nooks-admin-token", adminToken);
        content.append(admin.root);
      }
    };

    const tab = (label: string, target: typeof active) => {
      const button = el("button", { class: "tab" }, [label]);
      button.addEventListener("click", () => void activate(target));
      return button;
    };
    const signOut = el("button", { class: "sign-out" }, ["Sign out"]);
    signOut.addEventListener("click", () => {
      localStorage.removeItem("nooks-token");
      localStorage.removeItem("nooks-user");
      if (pollTimer !== undefined) window.clearInterval(pollTimer);
      signedOutFlow();
    });

    shell.append(
      el("nav", {}, [tab("Home", "home"), tab("Your nooks", "channels"), tab("Admin", "admin"), signOut]),
      content,
    );
    show(shell);
    void activate("home");

    if (pollTimer !== undefined) window.clearInterval(pollTimer);
    pollTimer = window.setInterval(() => {
      if (active === "home") void home.refresh();
      else if (active === "channels") void channels.refresh();
    }, POLL_MS);
  }

  if (localStorage.getItem("nooks-token")) {
    signedInFlow();
  } else {
    signedOutFlow();
  }
}

const mount = document.getElementById("app");
if (mount) startApp(mount);
