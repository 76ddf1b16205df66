// Channel list and chat view: live nooks accept posts, archived ones are
// read-only with an Unarchive button, members can bring in colleagues.

import { ApiClient, ApiError, ChannelSummary } from "../api.js";
import { el, clear } from "../dom.js";

export interface ChannelsView {
  refresh(): Promise<void>;
  root: HTMLElement;
}

export function createChannelsView(api: ApiClient, selfId: string): ChannelsView {
  const root = el("div", { class: "channels" });
  let openChannel: string | null = null;

  async function refresh(): Promise<void> {
    const { channels } = await api.channels();
    render(channels);
    if (openChannel && channels.some((c) => c.nook_id === openChannel)) {
      await showChannel(channels.find((c) => c.nook_id === openChannel)!);
    }
  }

  function render(channels: ChannelSummary[]): void {
    clear(root);
    const list = el("ul", { class: "channel-list", "data-testid": "channel-list" });
    for (const channel of channels.slice().reverse()) {
      const label = channel.archived ? `#${channel.name} (archived)` : `#${channel.name}`;
      const open = el("button", {}, [label]);
      open.addEventListener("click", () => showChannel(channel));
      list.append(el("li", {}, [open]));
    }
    if (channels.length === 0) {
      list.append(el("li", { class: "empty" }, ["No nook channels yet."]));
    }
    root.append(el("h2", {}, ["Your nooks"]), list, el("div", { class: "channel-view", "data-testid": "channel-view" }));
  }

  async function showChannel(channel: ChannelSummary): Promise<void> {
    openChannel = channel.nook_id;
    const view = root.querySelector<HTMLElement>(".channel-view");
    if (!view) return;
    clear(view);

    const { messages } = await api.messages(channel.nook_id);
    const header = el("header", {}, [
      el("h3", {}, [`#${channel.name}`]),
      el("p", { class: "channel-topic" }, [channel.topic]),
      el("p", { class: "channel-members" }, [`${channel.members.length} members`]),
    ]);
    if (channel.persistent) {
      header.append(el("p", { class: "banner", "data-testid": "persistent-banner" }, [
        "This nook is now persistent.",
      ]));
    }

    const log = el("ul", { class: "message-log", "data-testid": "message-log" });
    for (const message of messages) {
      const author = message.author === "nooks-bot" ? "nooks bot" : message.author_display;
      log.append(
        el("li", { class: message.author === "nooks-bot" ? "bot" : "member" }, [
          el("strong", {}, [author]),
          ` ${message.body}`,
        ]),
      );
    }

    const input = el("input", {
      class: "compose",
      "data-testid": "compose",
      placeholder: `Message #${channel.name}`,
    });
    const send = el("button", { "data-testid": "send" }, ["Send"]);
    const sendNow = async () => {
      if (!input.value.trim()) return;
      await api.postMessage(channel.nook_id, input.value);
      input.value = "";
      await refresh();
    };
    send.addEventListener("click", sendNow);
    input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void sendNow();
    });

    const controls = el("div", { class: "compose-row" }, [input, send]);
    if (channel.archived) {
      input.setAttribute("disabled", "disabled");
      send.setAttribute("disabled", "disabled");
      const unarchive = el("button", { class: "unarchive", "data-testid": "unarchive" }, [
        "Unarchive",
      ]);
      unarchive.addEventListener("click", async () => {
        await api.unarchive(channel.nook_id);
        await refresh();
      });
      controls.append(unarchive);
    }

    const addRow = await renderAddMember(channel);
    clear(view);
    view.append(header, log, controls, addRow);
  }

  async function renderAddMember(channel: ChannelSummary): Promise<HTMLElement> {
    const row = el("div", { class: "add-member", "data-testid": "add-member" });
    const { members } = await api.members();
    const candidates = members.filter(
      (m) => m.user_id !== selfId && !channel.members.includes(m.user_id),
    );
    if (candidates.length === 0 || channel.archived) return row;
    const picker = el("select", {});
    for (const member of candidates) {
      picker.append(el("option", { value: member.user_id }, [member.display_name]));
    }
    const add = el("button", {}, ["Add to nook"]);
    const note = el("span", { class: "add-note", "data-testid": "add-note" });
    add.addEventListener("click", async () => {
      note.textContent = "";
      try {
        await api.addMember(channel.nook_id, picker.value);
        await refresh();
      } catch (error) {
        if (error instanceof ApiError) {
          note.textContent =
            error.code === "ExcludedUser"
              ? "That member can't be added to this nook."
              : error.message;
          return;
        }
        throw error;
      }
    });
    row.append("Bring someone in: ", picker, add, note);
    return row;
  }

  return { root, refresh };
}
