// S2: the card deck renders incubating nooks one at a time, shows no
// counts and no creator, and responses round-trip to the server.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createHomeView } from "../src/views/home.js";
import { StubServer, flush } from "./stub.js";

const CREATOR = "cat-the-secret-creator";

function threeCards(server: StubServer) {
  const respondBy = new Date(Date.now() + 20 * 3600_000).toISOString();
  server.cards = [1, 2, 3].map((i) => ({
    card: { nook_id: `nook-000${i}`, topic: `topic number ${i}`, initial_thoughts: `thoughts ${i}` },
    my_response: null,
    respond_by: respondBy,
  }));
}

describe("card deck", () => {
  let server: StubServer;
  let root: HTMLElement;

  beforeEach(async () => {
    server = new StubServer();
    server.install();
    threeCards(server);
    const api = new ApiClient(() => server.token);
    const view = createHomeView(api, "amy");
    root = view.root;
    document.body.replaceChildren(root);
    await view.refresh();
  });

  it("shows exactly one card at a time, in order", async () => {
    const deck = root.querySelector('[data-testid="deck"]')!;
    expect(deck.textContent).toContain("topic number 1");
    expect(deck.textContent).not.toContain("topic number 2");
    expect(deck.textContent).toContain("Card 1 of 3");
  });

  it("contains no member count or creator element", () => {
    const card = root.querySelector('[data-testid="nook-card"]')!;
    expect(card.textContent).toContain("topic number 1");
    expect(card.textContent).toContain("thoughts 1");
    // nothing in the whole deck names the creator or any count
    const deckHtml = root.querySelector('[data-testid="deck"]')!.innerHTML;
    expect(deckHtml).not.toContain(CREATOR);
    expect(deckHtml.toLowerCase()).not.toMatch(/\d+\s*(interested|members|responses)/);
    expect(root.querySelectorAll("[data-count], .count, .creator").length).toBe(0);
  });

  it("round-trips interested / not-for-me and advances", async () => {
    (root.querySelector('[data-testid="interested"]') as HTMLButtonElement).click();
    await flush();
    expect(server.responsesPosted).toEqual([{ nook_id: "nook-0001", choice: "interested" }]);
    const deck = root.querySelector('[data-testid="deck"]')!;
    expect(deck.textContent).toContain("topic number 2");

    (root.querySelector('[data-testid="not-for-me"]') as HTMLButtonElement).click();
    await flush();
    expect(server.responsesPosted[1]).toEqual({ nook_id: "nook-0002", choice: "not_for_me" });
    expect(root.querySelector('[data-testid="deck"]')!.textContent).toContain("topic number 3");
  });

  it("lets earlier cards be revisited and changed", async () => {
    (root.querySelector('[data-testid="interested"]') as HTMLButtonElement).click();
    await flush();
    (root.querySelector(".back") as HTMLButtonElement).click();
    await flush();
    const deck = root.querySelector('[data-testid="deck"]')!;
    expect(deck.textContent).toContain("topic number 1");
    expect(deck.textContent).toContain("You said: Interested");
    (root.querySelector('[data-testid="not-for-me"]') as HTMLButtonElement).click();
    await flush();
    expect(server.responsesPosted[1]).toEqual({ nook_id: "nook-0001", choice: "not_for_me" });
  });

  it("disables the buttons with a notice once the batch has launched", async () => {
    server.responseWindowClosed = true;
    (root.querySelector('[data-testid="interested"]') as HTMLButtonElement).click();
    await flush();
    const deck = root.querySelector('[data-testid="deck"]')!;
    expect(deck.textContent).toContain("This batch has launched");
    expect(
      (root.querySelector('[data-testid="interested"]') as HTMLButtonElement).disabled,
    ).toBe(true);
  });
});
