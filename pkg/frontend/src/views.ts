/**
 * DOM rendering, one function per route. Views are dumb: they draw data the
 * server sent plus local selection state, and report clicks via callbacks.
 * Every score, total, and progress number shown here is a server echo.
 */

import type {
  Feedback,
  Gallery,
  ImageCard,
  Leaderboard,
  Preview,
  Profile,
  Progress,
  SessionInfo,
  ScreenView,
} from "./api.js";
import type { SelectionBuffer } from "./state.js";

type Child = Node | string;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

function clear(root: HTMLElement): void {
  root.replaceChildren();
}

export interface RegisterHandlers {
  onSubmit: (email: string, nickname: string, consent: boolean) => void;
}

export function renderRegister(root: HTMLElement, handlers: RegisterHandlers): void {
  clear(root);
  const email = el("input", { type: "email", "data-testid": "email", placeholder: "email" });
  const nickname = el("input", { type: "text", "data-testid": "nickname", placeholder: "nickname" });
  const consent = el("input", { type: "checkbox", "data-testid": "consent" });
  const submit = el("button", { "data-testid": "register", class: "primary", type: "submit" }, "Join the study");
  const form = el(
    "form",
    { class: "stack" },
    el("h1", {}, "Welcome"),
    el("p", { class: "muted" }, "Rate landscape photographs, then play a daily picture game."),
    email,
    nickname,
    el("label", {}, consent, " I consent to my ratings being stored for this study"),
    submit,
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onSubmit(email.value, nickname.value, consent.checked);
  });
  root.append(form);
}

export function renderPreview(root: HTMLElement, preview: Preview, onContinue: () => void): void {
  clear(root);
  const grid = el("div", { class: "preview-grid", "data-testid": "preview-grid" });
  for (const card of preview.images) {
    grid.append(
      el(
        "figure",
        { "data-image-id": card.image_id },
        el("img", { src: card.uri, alt: card.category }),
        el("figcaption", {}, card.category),
      ),
    );
  }
  const next = el("button", { class: "primary", "data-testid": "preview-continue" }, "Start rating");
  next.addEventListener("click", onContinue);
  root.append(
    el("h2", {}, "A taste of the collection"),
    el("p", { class: "muted" }, "Examples of the kinds of images you will rate. Use the whole 1–10 scale."),
    grid,
    next,
  );
  if (preview.degraded) {
    root.append(el("p", { class: "muted", "data-testid": "preview-degraded" }, "Some categories are not represented yet."));
  }
}

export interface RatingHandlers {
  onSubmit: (value: number) => void;
}

/** One image, a 1-10 segmented control, and Next. Next stays disabled until a value is picked. */
export function renderRating(
  root: HTMLElement,
  card: ImageCard,
  progress: Progress,
  handlers: RatingHandlers,
): void {
  clear(root);
  let picked: number | null = null;
  const next = el("button", { class: "primary", "data-testid": "rate-next", disabled: "" }, "Next");
  const segments = el("div", { class: "segments", role: "group", "aria-label": "rating 1 to 10" });
  const buttons: HTMLButtonElement[] = [];
  for (let value = 1; value <= 10; value++) {
    const button = el(
      "button",
      { "data-testid": `rate-${value}`, "aria-pressed": "false", type: "button" },
      String(value),
    );
    button.addEventListener("click", () => {
      picked = value;
      for (const other of buttons) other.setAttribute("aria-pressed", "false");
      button.setAttribute("aria-pressed", "true");
      next.removeAttribute("disabled");
    });
    buttons.push(button);
    segments.append(button);
  }
  next.addEventListener("click", () => {
    if (picked !== null) handlers.onSubmit(picked);
  });
  root.append(
    el("p", { class: "muted", "data-testid": "rate-progress" }, `${progress.rated_count} of ${progress.required} rated`),
    el("div", { class: "rate-image" }, el("img", { src: card.uri, alt: card.category, "data-image-id": card.image_id })),
    el("p", {}, "How much do you like this image?"),
    segments,
    next,
  );
}

export function renderInterstitial(root: HTMLElement, text: string, onContinue: () => void): void {
  clear(root);
  const next = el("button", { class: "primary", "data-testid": "interstitial-continue" }, "Keep going");
  next.addEventListener("click", onContinue);
  root.append(
    el("h2", { "data-testid": "interstitial" }, text),
    el("p", { class: "muted" }, "Nice pace. Remember to use the entire scale."),
    next,
  );
}

export interface GalleryHandlers {
  onRevise: (imageId: string, value: number) => void;
  onBack: () => void;
}

/** Rated images with their current values; in revision mode each row gets a 1-10 control. */
export function renderGallery(root: HTMLElement, gallery: Gallery, handlers: GalleryHandlers): void {
  clear(root);
  const list = el("div", { class: "gallery-list", "data-testid": "gallery" });
  for (const item of gallery.items) {
    const row = el(
      "div",
      { class: "gallery-item", "data-image-id": item.image_id },
      el("img", { src: item.uri, alt: item.category }),
      el("span", { "data-testid": `gallery-value-${item.image_id}` }, `rated ${item.value}`),
    );
    if (item.revisions > 0) {
      row.append(el("span", { class: "muted" }, `(revised ${item.revisions}x)`));
    }
    if (gallery.revision_enabled) {
      const segments = el("div", { class: "segments" });
      for (let value = 1; value <= 10; value++) {
        const button = el(
          "button",
          { "data-testid": `revise-${item.image_id}-${value}`, type: "button" },
          String(value),
        );
        button.addEventListener("click", () => handlers.onRevise(item.image_id, value));
        segments.append(button);
      }
      row.append(segments);
    }
    list.append(row);
  }
  const back = el("button", { "data-testid": "gallery-back" }, "Back");
  back.addEventListener("click", handlers.onBack);
  root.append(el("h2", {}, "Your ratings"), list, back);
}

export function renderGameInstructions(root: HTMLElement, session: SessionInfo, onBegin: () => void): void {
  clear(root);
  const begin = el("button", { class: "primary", "data-testid": "begin-game" }, "Begin");
  begin.addEventListener("click", onBegin);
  const what =
    session.kind === "adversarial"
      ? "Guess which images another player likes best."
      : "Find your own favourites in each lineup.";
  root.append(
    el("h2", {}, session.kind === "adversarial" ? "Adversarial round" : "Picture game"),
    el(
      "p",
      { "data-testid": "instructions" },
      `${what} ${session.screens_per_session} screens, ` +
        `${session.images_per_screen} images each: select the ${session.keys_per_screen} you most like, then confirm.`,
    ),
    begin,
  );
}

export interface GameScreenHandlers {
  onToggle: (imageId: string) => void;
  onConfirm: () => void;
}

/**
 * The lineup grid. Cards are buttons (keyboard-selectable), drawn in the exact
 * order the server listed them, with a green mark on selected ones. Confirm is
 * enabled only when the buffer holds exactly the required count.
 */
export function renderGameScreen(
  root: HTMLElement,
  view: ScreenView,
  totalScreens: number,
  buffer: SelectionBuffer,
  handlers: GameScreenHandlers,
): void {
  clear(root);
  const grid = el("div", { class: "lineup-grid", "data-testid": "lineup" });
  for (const imageId of view.image_ids) {
    const card = el(
      "button",
      { class: buffer.has(imageId) ? "card selected" : "card", "data-image-id": imageId, type: "button" },
      el("img", { src: `/images/${imageId}`, alt: "lineup image" }),
    );
    card.addEventListener("click", () => handlers.onToggle(imageId));
    grid.append(card);
  }
  const confirm = el("button", { class: "primary", "data-testid": "confirm" }, "Confirm selection");
  if (!buffer.full) confirm.setAttribute("disabled", "");
  confirm.addEventListener("click", () => {
    if (buffer.full) handlers.onConfirm();
  });
  root.append(
    el("h2", {}, `Screen ${view.screen_no} of ${totalScreens}`),
    el("p", { class: "muted" }, `Select the ${buffer.capacity} images you most like. Click again to unselect.`),
    grid,
    el("p", { "data-testid": "selection-count" }, `${buffer.count} of ${buffer.capacity} selected`),
    confirm,
  );
}

/** Per-screen feedback: the score alone, never which selections were right. */
export function renderFeedback(
  root: HTMLElement,
  feedback: Feedback,
  keysPerScreen: number,
  onNext: () => void,
): void {
  clear(root);
  const next = el(
    "button",
    { class: "primary", "data-testid": "feedback-next" },
    feedback.screens_remaining > 0 ? "Next screen" : "See results",
  );
  next.addEventListener("click", onNext);
  root.append(
    el(
      "p",
      { class: "scorebar", "data-testid": "screen-score" },
      `You matched ${feedback.screen_score} of ${keysPerScreen}.`,
    ),
    el(
      "p",
      { class: "muted" },
      feedback.screens_remaining > 0
        ? `${feedback.screens_remaining} screens to go.`
        : "That was the last screen.",
    ),
    next,
  );
}

/** Session end: today's points and the running total, both straight off the wire. */
export function renderSessionEnd(root: HTMLElement, feedback: Feedback, onDone: () => void): void {
  clear(root);
  const done = el("button", { class: "primary", "data-testid": "session-done" }, "Done");
  done.addEventListener("click", onDone);
  root.append(
    el("h2", {}, "Session complete"),
    el("p", { class: "scorebar", "data-testid": "session-points" }, `Today: ${feedback.session_points ?? 0} points`),
    el("p", { class: "scorebar", "data-testid": "overall-points" }, `All time: ${feedback.overall_points ?? 0} points`),
    done,
  );
}

export interface ReturningHandlers {
  onRate: () => void;
  onGallery: () => void;
  onPlay: () => void;
  onAdversarial: () => void;
  onLeaderboard: () => void;
}

export function renderReturning(root: HTMLElement, profile: Profile, handlers: ReturningHandlers): void {
  clear(root);
  const toolbar = el("div", { class: "toolbar" });
  if (!profile.mandatory_done) {
    const rate = el("button", { class: "primary", "data-testid": "go-rate" }, "Continue rating");
    rate.addEventListener("click", handlers.onRate);
    toolbar.append(rate);
  }
  const play = el("button", { class: "primary", "data-testid": "go-play" }, "Play today's game");
  if (!profile.mandatory_done) play.setAttribute("disabled", "");
  play.addEventListener("click", handlers.onPlay);
  toolbar.append(play);
  const adversarial = el("button", { "data-testid": "go-adversarial" }, "Adversarial round");
  if (!profile.mandatory_done) adversarial.setAttribute("disabled", "");
  adversarial.addEventListener("click", handlers.onAdversarial);
  toolbar.append(adversarial);
  if (profile.revision_enabled) {
    const gallery = el("button", { "data-testid": "go-gallery" }, "Review my ratings");
    gallery.addEventListener("click", handlers.onGallery);
    toolbar.append(gallery);
  }
  const board = el("button", { "data-testid": "go-leaderboard" }, "Leaderboards");
  board.addEventListener("click", handlers.onLeaderboard);
  toolbar.append(board);
  root.append(
    el("h2", {}, `Hello, ${profile.nickname}`),
    el(
      "p",
      { class: "muted", "data-testid": "profile-line" },
      `${profile.rated_count} images rated · ${profile.game_points} game points · ` +
        `${profile.adversarial_points} adversarial points`,
    ),
    toolbar,
  );
}

function boardTable(board: Leaderboard, title: string): HTMLElement {
  const table = el("table", { class: "board", "data-testid": `board-${board.kind}` });
  table.append(el("tr", {}, el("th", {}, "player"), el("th", {}, "points")));
  for (const entry of board.entries) {
    table.append(el("tr", {}, el("td", {}, entry.nickname), el("td", {}, String(entry.total))));
  }
  return el("div", {}, el("h3", {}, title), table);
}

export function renderLeaderboard(
  root: HTMLElement,
  game: Leaderboard,
  adversarial: Leaderboard,
  onBack: () => void,
): void {
  clear(root);
  const back = el("button", { "data-testid": "leaderboard-back" }, "Back");
  back.addEventListener("click", onBack);
  root.append(
    el("h2", {}, "Leaderboards"),
    boardTable(game, "Daily game"),
    boardTable(adversarial, "Adversarial"),
    back,
  );
}
