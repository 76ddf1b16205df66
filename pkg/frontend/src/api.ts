// Typed client for the nooks HTTP API (/api/v1). The UI talks to the
// backend exclusively through this module.

export interface NookCard {
  nook_id: string;
  topic: string;
  initial_thoughts: string;
}

export type ResponseChoice = "interested" | "not_for_me";

export interface HomeCard {
  card: NookCard;
  my_response: ResponseChoice | null;
  respond_by: string;
}

export interface SamplesPage {
  page: number;
  samples: { topic: string; initial_thoughts: string }[];
}

export interface Encounter {
  user_id: string;
  display_name: string;
  count: number;
}

export interface HomeData {
  cards: HomeCard[];
  samples: SamplesPage;
  encounters: Encounter[];
}

export interface ChannelSummary {
  nook_id: string;
  name: string;
  topic: string;
  members: string[];
  activated_at: string;
  archive_due_at: string;
  archived: boolean;
  persistent: boolean;
}

export interface ChannelMessage {
  id: number;
  author: string;
  author_display: string;
  body: string;
  posted_at: string;
}

export interface InboxMessage {
  from: string;
  text: string;
  at: string;
}

export interface Member {
  user_id: string;
  display_name: string;
}

export interface NookDraftPayload {
  topic: string;
  initial_thoughts: string;
  channel_title: string;
  excluded: string[];
  require_two_others: boolean;
}

export interface FieldError {
  field: string;
  code: string;
  message: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public fieldErrors: FieldError[] = [],
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private getToken: () => string | null,
    private baseUrl = "",
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    const token = this.getToken();
    if (token) headers["Authorization"] = `Bearer ${token}`;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(
        response.status,
        data.error ?? "Error",
        data.message ?? response.statusText,
        data.errors ?? [],
      );
    }
    return data as T;
  }

  signup(inviteCode: string, displayName: string, consent: boolean) {
    return this.request<{ user_id: string; display_name: string; token: string }>(
      "POST",
      "/api/v1/signup",
      { invite_code: inviteCode, display_name: displayName, consent },
    );
  }

  home() {
    return this.request<HomeData>("GET", "/api/v1/home");
  }

  samples(page: number) {
    return this.request<SamplesPage>("GET", `/api/v1/samples?page=${page}`);
  }

  createNook(draft: NookDraftPayload) {
    return this.request<{ nook_id: string; batch_date: string }>(
      "POST",
      "/api/v1/nooks",
      draft,
    );
  }

  respond(nookId: string, choice: ResponseChoice) {
    return this.request<{ nook_id: string; choice: ResponseChoice }>(
      "POST",
      `/api/v1/nooks/${nookId}/response`,
      { choice },
    );
  }

  channels() {
    return this.request<{ channels: ChannelSummary[] }>("GET", "/api/v1/channels");
  }

  messages(nookId: string) {
    return this.request<{ messages: ChannelMessage[] }>(
      "GET",
      `/api/v1/channels/${nookId}/messages`,
    );
  }

  postMessage(nookId: string, body: string) {
    return this.request<ChannelMessage>(
      "POST",
      `/api/v1/channels/${nookId}/messages`,
      { body },
    );
  }

  unarchive(nookId: string) {
    return this.request<{ nook_id: string; archived: boolean; persistent: boolean }>(
      "POST",
      `/api/v1/channels/${nookId}/unarchive`,
    );
  }

  addMember(nookId: string, userId: string) {
    return this.request<{ nook_id: string; members: string[] }>(
      "POST",
      `/api/v1/channels/${nookId}/members`,
      { user_id: userId },
    );
  }

  sendDirect(userId: string, body: string) {
    return this.request<{ delivered_to: string }>(
      "POST",
      `/api/v1/users/${userId}/direct`,
      { body },
    );
  }

  inbox() {
    return this.request<{ messages: InboxMessage[] }>("GET", "/api/v1/inbox");
  }

  members() {
    return this.request<{ members: Member[] }>("GET", "/api/v1/members");
  }

  adminOnboard(args: { channel_name?: string; user_names?: string[] }) {
    return this.request<{ invited: string[] }>("POST", "/api/v1/admin/onboard", args);
  }

  adminPredefined(nooks: { topic: string; initial_thoughts?: string; batch_date: string }[]) {
    return this.request<{ nook_ids: string[] }>("POST", "/api/v1/admin/predefined", {
      nooks,
    });
  }

  adminSchedule(args: {
    timezone?: string;
    batch_cutoff?: string;
    activation_time?: string;
    channel_lifetime_seconds?: number;
    min_members_to_activate?: number;
  }) {
    return this.request<{ ok: boolean }>("PUT", "/api/v1/admin/schedule", args);
  }

  adminSamples(samples: { topic: string; initial_thoughts: string }[]) {
    return this.request<{ ok: boolean }>("PUT", "/api/v1/admin/samples", { samples });
  }
}
