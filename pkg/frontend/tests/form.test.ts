// The create form blocks bad drafts before any request is made, prefills
// from samples, and renders server-side 422s inline if one slips through.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createHomeView } from "../src/views/home.js";
import { StubServer, flush } from "./stub.js";

describe("create-a-nook form", () => {
  let server: StubServer;
  let root: HTMLElement;

  beforeEach(async () => {
    server = new StubServer();
    server.install();
    const view = createHomeView(new ApiClient(() => server.token), "amy");
    root = view.root;
    document.body.replaceChildren(root);
    await view.refresh();
    server.requests.length = 0;
  });

  function field(name: string) {
    return root.querySelector(`[name="${name}"]`) as HTMLInputElement;
  }

  it("rejects a bad title inline without calling the server", async () => {
    field("topic").value = "july fourth";
    field("channel_title").value = "july 4th plans!";
    (root.querySelector(".create-panel .primary") as HTMLButtonElement).click();
    await flush();
    const errors = root.querySelector('[data-testid="form-errors"]')!;
    expect(errors.textContent).toContain("letters and dashes");
    expect(server.requests.filter((r) => r.method === "POST")).toEqual([]);
    expect(server.nooksCreated).toEqual([]);
  });

  it("submits a valid draft and confirms the queue", async () => {
    field("topic").value = "mystery novels";
    field("channel_title").value = "mystery-novels";
    (root.querySelector(".create-panel .primary") as HTMLButtonElement).click();
    await flush();
    expect(server.nooksCreated.length).toBe(1);
    const note = root.querySelector('[data-testid="queued-note"]')!;
    expect(note.classList.contains("hidden")).toBe(false);
    expect(note.textContent).toContain("Queued");
  });

  it("renders field errors from the server when validation is bypassed", async () => {
    // a stale picker can submit someone who has left the workspace; only
    // the server knows the roster, so this 422 comes back from the stub
    field("topic").value = "books";
    field("channel_title").value = "books";
    const picker = root.querySelector('[name="excluded"]') as HTMLSelectElement;
    const option = document.createElement("option");
    option.value = "ghost";
    option.selected = true;
    picker.append(option);
    (root.querySelector(".create-panel .primary") as HTMLButtonElement).click();
    await flush();
    const errors = root.querySelector('[data-testid="form-errors"]')!;
    expect(errors.textContent).toContain("not an onboarded member");
    expect(server.nooksCreated).toEqual([]);
  });

  it("prefills the form from a sample via Edit and Use", async () => {
    (root.querySelector(".edit-and-use") as HTMLButtonElement).click();
    expect(field("topic").value).toBe("Is anyone else also watching the match tonight");
    expect((root.querySelector('[name="initial_thoughts"]') as HTMLTextAreaElement).value).toBe(
      "Let's meet",
    );
  });

  it("cycles sample pages with Get more samples", async () => {
    server.samples = [{ topic: "page two topic", initial_thoughts: "" }];
    (root.querySelector(".more-samples") as HTMLButtonElement).click();
    await flush();
    expect(root.querySelector('[data-testid="samples"]')!.textContent).toContain(
      "page two topic",
    );
  });

  it("exclusion picker lists members but never yourself", () => {
    const options = Array.from(
      root.querySelectorAll('[name="excluded"] option'),
    ).map((o) => (o as HTMLOptionElement).value);
    expect(options).toEqual(["bo", "cat", "dex"]);
  });
});
