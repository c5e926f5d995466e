/** Client-side view state: routing, the selection buffer, and navigation rules. */

import type { SessionInfo } from "./api.js";

export type Route =
  | { name: "register" }
  | { name: "preview" }
  | { name: "rate" }
  | { name: "gallery" }
  | { name: "game_instructions" }
  | { name: "game_screen"; screen: number }
  | { name: "session_end" }
  | { name: "returning" }
  | { name: "leaderboard" };

/**
 * Holds the image ids picked on the current lineup screen, capped at the
 * number of selections the server will accept. Clicking a selected image
 * removes it; clicking an unselected image adds it unless the buffer is full.
 */
export class SelectionBuffer {
  private ids: string[] = [];

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity < 1) {
      throw new Error(`selection capacity must be a positive integer, got ${capacity}`);
    }
  }

  /** Returns true when the click changed the buffer, false when it was ignored. */
  toggle(imageId: string): boolean {
    const at = this.ids.indexOf(imageId);
    if (at >= 0) {
      this.ids.splice(at, 1);
      return true;
    }
    if (this.ids.length >= this.capacity) return false;
    this.ids.push(imageId);
    return true;
  }

  has(imageId: string): boolean {
    return this.ids.includes(imageId);
  }

  get count(): number {
    return this.ids.length;
  }

  /** Confirm is allowed only at exactly this many selections. */
  get full(): boolean {
    return this.ids.length === this.capacity;
  }

  chosen(): string[] {
    return [...this.ids];
  }

  clear(): void {
    this.ids = [];
  }
}

export class ViewState {
  route: Route = { name: "register" };
  /** Serial-only study protocol: no revision gallery and no back-navigation. */
  studyMode = false;
  session: SessionInfo | null = null;
  buffer: SelectionBuffer | null = null;
  private trail: Route[] = [];

  goTo(route: Route): void {
    this.trail.push(this.route);
    this.route = route;
  }

  /** Replace the current route without growing the back trail. */
  replace(route: Route): void {
    this.route = route;
  }

  /**
   * Back-navigation. Blocked outright in study mode and always blocked while
   * rating, so already-rated images cannot be revisited mid-flow.
   */
  back(): boolean {
    if (this.studyMode) return false;
    if (this.route.name === "rate") return false;
    const previous = this.trail.pop();
    if (!previous) return false;
    this.route = previous;
    return true;
  }

  /** Enter screen `n` of the open session with a fresh, empty buffer. */
  beginScreen(screenNo: number): void {
    if (!this.session) throw new Error("no open session");
    this.buffer = new SelectionBuffer(this.session.keys_per_screen);
    this.replace({ name: "game_screen", screen: screenNo });
  }

  endSession(): void {
    this.session = null;
    this.buffer = null;
  }
}
