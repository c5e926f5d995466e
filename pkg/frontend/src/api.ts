/** Typed fetch client for the rating-game service. JSON in, JSON out. */

export interface ImageCard {
  image_id: string;
  uri: string;
  category: string;
}

export interface Registration {
  user_id: string;
  token: string;
  nickname: string;
  next: string;
}

export interface Profile {
  user_id: string;
  nickname: string;
  rated_count: number;
  mandatory_done: boolean;
  last_played: number | null;
  last_played_date: string | null;
  game_points: number;
  adversarial_points: number;
  revision_enabled: boolean;
}

export interface Preview {
  images: ImageCard[];
  degraded: boolean;
}

export interface Batch {
  images: ImageCard[];
  exhausted: boolean;
}

export interface Progress {
  rated_count: number;
  required: number;
  mandatory_done: boolean;
  interstitial: string | null;
}

export interface RatingAck {
  image_id: string;
  value: number;
  rated_count: number;
}

export interface GalleryItem extends ImageCard {
  value: number;
  revisions: number;
}

export interface Gallery {
  items: GalleryItem[];
  revision_enabled: boolean;
}

export interface RevisionAck {
  image_id: string;
  value: number;
  revisions: number;
}

export type SessionKind = "game" | "adversarial";

export interface SessionInfo {
  session_id: string;
  kind: SessionKind;
  screens_per_session: number;
  images_per_screen: number;
  keys_per_screen: number;
}

export interface ScreenView {
  session_id: string;
  screen_no: number;
  image_ids: string[];
}

/** Per-screen feedback; the `total`/points fields appear on the last screen only. */
export interface Feedback {
  screen_no: number;
  screen_score: number;
  screens_remaining: number;
  total?: number;
  decision?: string;
  session_points?: number;
  overall_points?: number;
}

export interface BoardEntry {
  nickname: string;
  total: number;
}

export interface Leaderboard {
  kind: SessionKind;
  entries: BoardEntry[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly retryAfter: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function newToken(): string {
  const c = globalThis.crypto;
  if (c && typeof c.randomUUID === "function") return c.randomUUID();
  return `t-${Date.now().toString(36)}-${Math.random().toString(36).slice(2)}`;
}

const RETRY_DELAY_MS = 200;

export class Client {
  private token: string | null = null;

  constructor(readonly baseUrl: string = "") {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = { Accept: "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const mutation = method !== "GET";
    if (mutation) {
      // same token on retry, so a resend of a lost response cannot double-apply
      headers["X-Idempotency-Key"] = newToken();
    }
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      if (!mutation) throw err;
      // network failure: one retry with the identical idempotency token
      await new Promise((resolve) => setTimeout(resolve, RETRY_DELAY_MS));
      response = await fetch(this.baseUrl + path, init);
    }
    if (!response.ok) {
      let message = `HTTP ${response.status}`;
      try {
        const doc = (await response.json()) as { error?: string };
        if (doc && typeof doc.error === "string") message = doc.error;
      } catch {
        // non-JSON error body; keep the status line
      }
      const retryAfter = response.headers.get("Retry-After");
      throw new ApiError(
        response.status,
        message,
        retryAfter === null ? null : Number(retryAfter),
      );
    }
    return (await response.json()) as T;
  }

  register(email: string, nickname: string, consent: boolean): Promise<Registration> {
    return this.request("POST", "/users", { email, nickname, consent });
  }

  me(): Promise<Profile> {
    return this.request("GET", "/users/me");
  }

  preview(): Promise<Preview> {
    return this.request("GET", "/preview");
  }

  nextBatch(n = 12): Promise<Batch> {
    return this.request("GET", `/rating/next?n=${n}`);
  }

  progress(): Promise<Progress> {
    return this.request("GET", "/rating/progress");
  }

  recordRating(imageId: string, value: number): Promise<RatingAck> {
    return this.request("POST", "/ratings", { image_id: imageId, value });
  }

  gallery(): Promise<Gallery> {
    return this.request("GET", "/ratings");
  }

  reviseRating(imageId: string, value: number): Promise<RevisionAck> {
    return this.request("PATCH", `/ratings/${encodeURIComponent(imageId)}`, { value });
  }

  startSession(kind: SessionKind): Promise<SessionInfo> {
    return this.request("POST", `/sessions?kind=${kind}`);
  }

  getScreen(sessionId: string, screenNo: number): Promise<ScreenView> {
    return this.request(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}/screens/${screenNo}`,
    );
  }

  submitSelection(
    sessionId: string,
    screenNo: number,
    chosen: string[],
  ): Promise<Feedback> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/screens/${screenNo}/selection`,
      { chosen },
    );
  }

  leaderboard(kind: SessionKind): Promise<Leaderboard> {
    return this.request("GET", `/leaderboard?kind=${kind}`);
  }
}
