// Home: create-a-nook panel with samples, today's card deck, the
// "Connect beyond Nooks" encounter list, and the notification inbox.

import { ApiClient, ApiError, HomeData, Member } from "../api.js";
import { el, clear } from "../dom.js";
import { validateDraft } from "../validation.js";

export interface HomeView {
  refresh(): Promise<void>;
  root: HTMLElement;
}

export function createHomeView(api: ApiClient, selfId: string): HomeView {
  const root = el("div", { class: "home" });
  let deckIndex = 0;

  async function refresh(): Promise<void> {
    const [home, inbox, members] = await Promise.all([
      api.home(),
      api.inbox(),
      api.members(),
    ]);
    render(home, inbox.messages.length, members.members);
  }

  function render(home: HomeData, inboxCount: number, members: Member[]): void {
    clear(root);
    root.append(renderInboxBadge(inboxCount));
    root.append(renderCreatePanel(home, members));
    root.append(renderDeck(home));
    root.append(renderEncounters(home));
  }

  function renderInboxBadge(count: number): HTMLElement {
    const badge = el("div", { class: "inbox-badge", "data-testid": "inbox" });
    const button = el("button", {}, [`Notifications (${count})`]);
    const list = el("ul", { class: "inbox-list hidden" });
    button.addEventListener("click", async () => {
      const inbox = await api.inbox();
      clear(list as unknown as HTMLElement);
      for (const message of inbox.messages.slice().reverse()) {
        list.append(el("li", {}, [`${message.text}`]));
      }
      list.classList.toggle("hidden");
    });
    badge.append(button, list);
    return badge;
  }

  function renderCreatePanel(home: HomeData, members: Member[]): HTMLElement {
    const panel = el("section", { class: "create-panel", "data-testid": "create-panel" });
    panel.append(el("h2", {}, ["Create a Nook"]));

    const topic = el("input", {
      name: "topic",
      placeholder: "What do you want to talk about?",
    });
    const thoughts = el("textarea", {
      name: "initial_thoughts",
      placeholder: "Add some initial thoughts",
    });
    const title = el("input", {
      name: "channel_title",
      placeholder: "Add a channel title for the nook (less than 60 characters, letters/dashes)",
    });
    const exclusion = el("select", { name: "excluded", multiple: "multiple" });
    for (const member of members) {
      if (member.user_id === selfId) continue; // you cannot exclude yourself
      exclusion.append(el("option", { value: member.user_id }, [member.display_name]));
    }
    const twoOthers = el("input", { type: "checkbox", name: "require_two_others" });
    const errorBox = el("ul", { class: "errors", "data-testid": "form-errors" });
    const submit = el("button", { class: "primary" }, ["Add Nook to the Queue"]);
    const confirmation = el("p", { class: "confirmation hidden", "data-testid": "queued-note" });

    submit.addEventListener("click", async () => {
      clear(errorBox as unknown as HTMLElement);
      confirmation.classList.add("hidden");
      const excluded = Array.from(exclusion.selectedOptions).map((o) => o.value);
      const draft = {
        topic: topic.value,
        initial_thoughts: thoughts.value,
        channel_title: title.value,
        excluded,
        require_two_others: twoOthers.checked,
      };
      const problems = validateDraft({ ...draft, self: selfId });
      if (problems.length > 0) {
        for (const problem of problems) {
          errorBox.append(el("li", {}, [`${problem.field}: ${problem.message}`]));
        }
        return;
      }
      try {
        const created = await api.createNook(draft);
        confirmation.textContent =
          `Queued! Your nook will start incubating with the ${created.batch_date} batch.`;
        confirmation.classList.remove("hidden");
        topic.value = "";
        thoughts.value = "";
        title.value = "";
      } catch (error) {
        if (error instanceof ApiError) {
          for (const fieldError of error.fieldErrors) {
            errorBox.append(el("li", {}, [`${fieldError.field}: ${fieldError.message}`]));
          }
          if (error.fieldErrors.length === 0) {
            errorBox.append(el("li", {}, [error.message]));
          }
          return;
        }
        throw error;
      }
    });

    const samplesBlock = el("div", { class: "samples", "data-testid": "samples" });
    let samplePage = home.samples.page;
    const renderSamples = (samples: { topic: string; initial_thoughts: string }[]) => {
      clear(samplesBlock);
      samplesBlock.append(el("h3", {}, ["Need inspiration?"]));
      for (const sample of samples) {
        const use = el("button", { class: "edit-and-use" }, ["Edit and Use"]);
        use.addEventListener("click", () => {
          topic.value = sample.topic;
          thoughts.value = sample.initial_thoughts;
        });
        samplesBlock.append(el("div", { class: "sample" }, [sample.topic, " ", use]));
      }
      const more = el("button", { class: "more-samples" }, ["Get more samples"]);
      more.addEventListener("click", async () => {
        samplePage += 1;
        renderSamples((await api.samples(samplePage)).samples);
      });
      samplesBlock.append(more);
    };
    renderSamples(home.samples.samples);

    panel.append(
      samplesBlock,
      el("label", {}, ["What do you want to talk about?", topic]),
      el("label", {}, ["Add some initial thoughts", thoughts]),
      el("label", {}, ["Add a channel title for the nook", title]),
      el("label", {}, [
        "Are there any members you don't want to be a part of this conversation",
        exclusion,
      ]),
      el("label", { class: "checkbox" }, [
        twoOthers,
        "Only start this nook if at least two other people are interested",
      ]),
      errorBox,
      submit,
      confirmation,
    );
    return panel;
  }

  function renderDeck(home: HomeData): HTMLElement {
    const deck = el("section", { class: "deck", "data-testid": "deck" });
    deck.append(el("h2", {}, ["Today's Nook Cards"]));
    if (home.cards.length === 0) {
      deck.append(el("p", { class: "empty" }, ["No cards right now; check back after the next batch opens."]));
      return deck;
    }
    if (deckIndex >= home.cards.length) deckIndex = home.cards.length - 1;
    const entry = home.cards[deckIndex];
    const closed = Date.now() >= Date.parse(entry.respond_by);

    const cardBox = el("article", { class: "card", "data-testid": "nook-card" }, [
      el("h3", { class: "card-topic" }, [entry.card.topic]),
      el("p", { class: "card-thoughts" }, [entry.card.initial_thoughts]),
    ]);
    const position = el("p", { class: "deck-position" }, [
      `Card ${deckIndex + 1} of ${home.cards.length}`,
    ]);

    const notForMe = el("button", { class: "not-for-me", "data-testid": "not-for-me" }, ["Not for me"]);
    const interested = el("button", { class: "interested", "data-testid": "interested" }, ["Interested"]);
    const status = el("p", { class: "response-status" });
    if (entry.my_response) {
      status.textContent =
        entry.my_response === "interested" ? "You said: Interested" : "You said: Not for me";
    }

    const respond = async (choice: "interested" | "not_for_me") => {
      try {
        await api.respond(entry.card.nook_id, choice);
        deckIndex += 1;
        await refresh();
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          status.textContent = "This batch has launched; responses are closed.";
          notForMe.setAttribute("disabled", "disabled");
          interested.setAttribute("disabled", "disabled");
          return;
        }
        throw error;
      }
    };
    notForMe.addEventListener("click", () => respond("not_for_me"));
    interested.addEventListener("click", () => respond("interested"));
    if (closed) {
      notForMe.setAttribute("disabled", "disabled");
      interested.setAttribute("disabled", "disabled");
      status.textContent = "This batch has launched; responses are closed.";
    }

    const nav = el("div", { class: "deck-nav" });
    if (deckIndex > 0) {
      const back = el("button", { class: "back" }, ["Previous card"]);
      back.addEventListener("click", async () => {
        deckIndex -= 1;
        await refresh();
      });
      nav.append(back);
    }
    if (deckIndex < home.cards.length - 1) {
      const skip = el("button", { class: "skip" }, ["Next card"]);
      skip.addEventListener("click", async () => {
        deckIndex += 1;
        await refresh();
      });
      nav.append(skip);
    }

    deck.append(position, cardBox, el("div", { class: "choices" }, [notForMe, interested]), status, nav);
    return deck;
  }

  function renderEncounters(home: HomeData): HTMLElement {
    const panel = el("section", { class: "encounters", "data-testid": "encounters" });
    panel.append(el("h2", {}, ["Connect beyond Nooks"]));
    if (home.encounters.length === 0) {
      panel.append(el("p", { class: "empty" }, ["Join a few nooks and the people you meet most will show up here."]));
      return panel;
    }
    const list = el("ul");
    for (const encounter of home.encounters) {
      const send = el("button", { class: "send-message" }, ["Send a message"]);
      send.addEventListener("click", async () => {
        const body = window.prompt(`Message ${encounter.display_name}:`);
        if (body) await api.sendDirect(encounter.user_id, body);
      });
      list.append(
        el("li", {}, [
          `${encounter.display_name} — ${encounter.count} nook${encounter.count === 1 ? "" : "s"} together `,
          send,
        ]),
      );
    }
    panel.append(list);
    return panel;
  }

  return { root, refresh };
}
