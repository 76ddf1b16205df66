// Client-side draft validation, mirroring the server's rules exactly.
// The server re-checks everything; this only exists so mistakes surface
// before submitting.

import type { FieldError } from "./api.js";

export const TITLE_MAX = 60;
export const TITLE_RE = /^[A-Za-z-]+$/;

export interface DraftInput {
  topic: string;
  channel_title: string;
  excluded: string[];
  self: string;
}

export function validateDraft(draft: DraftInput): FieldError[] {
  const errors: FieldError[] = [];
  const title = draft.channel_title;
  if (!title) {
    errors.push({ field: "channel_title", code: "EmptyTitle", message: "add a channel title" });
  } else {
    if (title.length >= TITLE_MAX) {
      errors.push({
        field: "channel_title",
        code: "TitleTooLong",
        message: `use less than ${TITLE_MAX} characters`,
      });
    }
    if (!TITLE_RE.test(title)) {
      errors.push({
        field: "channel_title",
        code: "TitleBadCharset",
        message: "use only letters and dashes",
      });
    }
  }
  if (!draft.topic.trim()) {
    errors.push({ field: "topic", code: "EmptyTopic", message: "say what you want to talk about" });
  }
  if (draft.excluded.includes(draft.self)) {
    errors.push({ field: "excluded", code: "SelfExclusion", message: "you cannot exclude yourself" });
  }
  return errors;
}
