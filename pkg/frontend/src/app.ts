/**
 * Controller: owns the route state, drives the HTTP client, and re-renders
 * views. Mutations are serialized through a single promise chain so at most
 * one is in flight at a time; `idle()` lets tests await quiescence.
 */

import { ApiError, Client } from "./api.js";
import type { Feedback, ImageCard, Progress, ScreenView } from "./api.js";
import { ViewState } from "./state.js";
import {
  renderFeedback,
  renderGallery,
  renderGameInstructions,
  renderGameScreen,
  renderInterstitial,
  renderLeaderboard,
  renderPreview,
  renderRating,
  renderRegister,
  renderReturning,
  renderSessionEnd,
} from "./views.js";

export class App {
  readonly state = new ViewState();
  private readonly viewRoot: HTMLElement;
  private readonly statusLine: HTMLElement;
  private ratingQueue: ImageCard[] = [];
  private screenView: ScreenView | null = null;
  private chain: Promise<void> = Promise.resolve();

  constructor(root: HTMLElement, private readonly client: Client) {
    root.replaceChildren();
    this.viewRoot = document.createElement("div");
    this.viewRoot.setAttribute("data-testid", "view");
    this.statusLine = document.createElement("p");
    this.statusLine.className = "error";
    this.statusLine.setAttribute("data-testid", "status");
    root.append(this.viewRoot, this.statusLine);
  }

  start(): void {
    renderRegister(this.viewRoot, {
      onSubmit: (email, nickname, consent) => this.register(email, nickname, consent),
    });
  }

  /** Resolves once every queued task has settled and no new work was added. */
  async idle(): Promise<void> {
    let seen: Promise<void>;
    do {
      seen = this.chain;
      await seen.catch(() => undefined);
    } while (seen !== this.chain);
  }

  private enqueue(task: () => Promise<void>): void {
    this.chain = this.chain.then(async () => {
      this.statusLine.textContent = "";
      await task();
    }, undefined);
    this.chain = this.chain.catch((err) => this.fail(err));
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      let message = err.message;
      if (err.status === 429 && err.retryAfter !== null) {
        message += ` (try again in ${err.retryAfter}s)`;
      }
      this.statusLine.textContent = message;
      return;
    }
    this.statusLine.textContent = err instanceof Error ? err.message : String(err);
  }

  // ---- registration and preview -----------------------------------------

  private register(email: string, nickname: string, consent: boolean): void {
    this.enqueue(async () => {
      const registration = await this.client.register(email, nickname, consent);
      this.client.setToken(registration.token);
      const profile = await this.client.me();
      this.state.studyMode = !profile.revision_enabled;
      const preview = await this.client.preview();
      this.state.replace({ name: "preview" });
      renderPreview(this.viewRoot, preview, () => this.beginRating());
    });
  }

  // ---- rating flow --------------------------------------------------------

  private beginRating(): void {
    this.enqueue(async () => {
      this.state.replace({ name: "rate" });
      await this.nextRatingCard();
    });
  }

  private async nextRatingCard(progress?: Progress): Promise<void> {
    if (this.ratingQueue.length === 0) {
      const batch = await this.client.nextBatch(12);
      this.ratingQueue = batch.images;
      if (this.ratingQueue.length === 0) {
        await this.showReturning();
        return;
      }
    }
    const card = this.ratingQueue.shift()!;
    const shown = progress ?? (await this.client.progress());
    renderRating(this.viewRoot, card, shown, {
      onSubmit: (value) => this.submitRating(card, value),
    });
  }

  private submitRating(card: ImageCard, value: number): void {
    this.enqueue(async () => {
      try {
        await this.client.recordRating(card.image_id, value);
      } catch (err) {
        // a retried send can land twice; the duplicate answer means it stuck
        const duplicate =
          err instanceof ApiError && err.status === 409 && /already rated/.test(err.message);
        if (!duplicate) throw err;
      }
      const progress = await this.client.progress();
      if (progress.mandatory_done) {
        await this.showReturning();
        return;
      }
      if (progress.interstitial) {
        renderInterstitial(this.viewRoot, `${progress.interstitial} rated`, () =>
          this.enqueue(() => this.nextRatingCard()),
        );
        return;
      }
      await this.nextRatingCard(progress);
    });
  }

  // ---- home, gallery, leaderboards ---------------------------------------

  private async showReturning(): Promise<void> {
    const profile = await this.client.me();
    this.state.studyMode = !profile.revision_enabled;
    this.state.replace({ name: "returning" });
    renderReturning(this.viewRoot, profile, {
      onRate: () => this.beginRating(),
      onGallery: () => this.showGallery(),
      onPlay: () => this.startSession("game"),
      onAdversarial: () => this.startSession("adversarial"),
      onLeaderboard: () => this.showLeaderboard(),
    });
  }

  private showGallery(): void {
    this.enqueue(async () => {
      const gallery = await this.client.gallery();
      this.state.goTo({ name: "gallery" });
      renderGallery(this.viewRoot, gallery, {
        onRevise: (imageId, value) => this.revise(imageId, value),
        onBack: () => {
          this.state.back();
          this.enqueue(() => this.showReturning());
        },
      });
    });
  }

  private revise(imageId: string, value: number): void {
    this.enqueue(async () => {
      await this.client.reviseRating(imageId, value);
      // re-fetch so the gallery shows the server's view, not ours
      const gallery = await this.client.gallery();
      renderGallery(this.viewRoot, gallery, {
        onRevise: (id, v) => this.revise(id, v),
        onBack: () => {
          this.state.back();
          this.enqueue(() => this.showReturning());
        },
      });
    });
  }

  private showLeaderboard(): void {
    this.enqueue(async () => {
      const game = await this.client.leaderboard("game");
      const adversarial = await this.client.leaderboard("adversarial");
      this.state.goTo({ name: "leaderboard" });
      renderLeaderboard(this.viewRoot, game, adversarial, () => {
        this.state.back();
        this.enqueue(() => this.showReturning());
      });
    });
  }

  // ---- game flow -----------------------------------------------------------

  private startSession(kind: "game" | "adversarial"): void {
    this.enqueue(async () => {
      const session = await this.client.startSession(kind);
      this.state.session = session;
      this.state.replace({ name: "game_instructions" });
      renderGameInstructions(this.viewRoot, session, () => this.beginScreen(1));
    });
  }

  private beginScreen(screenNo: number): void {
    this.enqueue(async () => {
      const session = this.state.session;
      if (!session) throw new Error("no open session");
      this.state.beginScreen(screenNo);
      this.screenView = await this.client.getScreen(session.session_id, screenNo);
      this.renderScreen();
    });
  }

  private renderScreen(): void {
    const session = this.state.session;
    const buffer = this.state.buffer;
    if (!session || !buffer || !this.screenView) throw new Error("no screen to render");
    renderGameScreen(this.viewRoot, this.screenView, session.screens_per_session, buffer, {
      onToggle: (imageId) => {
        // local-only state change, no network: safe outside the queue
        buffer.toggle(imageId);
        this.renderScreen();
      },
      onConfirm: () => this.confirmSelection(),
    });
  }

  private confirmSelection(): void {
    this.enqueue(async () => {
      const session = this.state.session;
      const buffer = this.state.buffer;
      const view = this.screenView;
      if (!session || !buffer || !view) throw new Error("no open screen");
      const feedback = await this.client.submitSelection(
        session.session_id,
        view.screen_no,
        buffer.chosen(),
      );
      renderFeedback(this.viewRoot, feedback, session.keys_per_screen, () =>
        this.afterFeedback(feedback),
      );
    });
  }

  private afterFeedback(feedback: Feedback): void {
    if (feedback.screens_remaining > 0) {
      this.beginScreen(feedback.screen_no + 1);
      return;
    }
    this.enqueue(async () => {
      this.state.replace({ name: "session_end" });
      renderSessionEnd(this.viewRoot, feedback, () => {
        this.state.endSession();
        this.screenView = null;
        this.enqueue(() => this.showReturning());
      });
    });
  }
}
