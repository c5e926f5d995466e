import { beforeEach, describe, expect, it, vi } from "vitest";

import type { Feedback, Gallery, Profile, ScreenView } from "../src/api.js";
import { SelectionBuffer } from "../src/state.js";
import {
  renderFeedback,
  renderGallery,
  renderGameScreen,
  renderRating,
  renderRegister,
  renderReturning,
  renderSessionEnd,
} from "../src/views.js";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="root"></div>';
  root = document.getElementById("root")!;
});

function click(selector: string): void {
  const node = root.querySelector<HTMLElement>(selector);
  if (!node) throw new Error(`no element ${selector}`);
  node.click();
}

function confirmButton(): HTMLButtonElement {
  return root.querySelector<HTMLButtonElement>('[data-testid="confirm"]')!;
}

const SCREEN: ScreenView = {
  session_id: "s1",
  screen_no: 1,
  // deliberately not sorted: rendering must keep this exact order
  image_ids: ["img07", "img02", "img09", "img01", "img05", "img08", "img03", "img06"],
};

/** Re-renders on toggle, like the controller does. */
function mountScreen(buffer: SelectionBuffer, onConfirm = () => {}): void {
  const draw = (): void => {
    renderGameScreen(root, SCREEN, 4, buffer, {
      onToggle: (id) => {
        buffer.toggle(id);
        draw();
      },
      onConfirm,
    });
  };
  draw();
}

describe("renderGameScreen", () => {
  it("draws cards in the server's order, never re-sorted", () => {
    mountScreen(new SelectionBuffer(2));
    const ids = [...root.querySelectorAll(".lineup-grid .card")].map((c) =>
      c.getAttribute("data-image-id"),
    );
    expect(ids).toEqual(SCREEN.image_ids);
  });

  it("marks selected cards and unmarks them on a second click", () => {
    mountScreen(new SelectionBuffer(2));
    click('[data-image-id="img09"]');
    expect(root.querySelector('[data-image-id="img09"]')!.classList.contains("selected")).toBe(true);
    click('[data-image-id="img09"]');
    expect(root.querySelector('[data-image-id="img09"]')!.classList.contains("selected")).toBe(false);
  });

  it("enables confirm only at exactly the required count", () => {
    const onConfirm = vi.fn();
    mountScreen(new SelectionBuffer(2), onConfirm);
    expect(confirmButton().disabled).toBe(true);
    click('[data-image-id="img07"]');
    expect(confirmButton().disabled).toBe(true);
    confirmButton().click(); // disabled: no-op
    click('[data-image-id="img02"]');
    expect(confirmButton().disabled).toBe(false);
    click('[data-image-id="img02"]');
    expect(confirmButton().disabled).toBe(true);
    expect(onConfirm).not.toHaveBeenCalled();
  });

  it("ignores a third selection until one is unselected", () => {
    mountScreen(new SelectionBuffer(2));
    click('[data-image-id="img07"]');
    click('[data-image-id="img02"]');
    click('[data-image-id="img09"]'); // over capacity: ignored
    const selected = [...root.querySelectorAll(".card.selected")].map((c) =>
      c.getAttribute("data-image-id"),
    );
    expect(selected).toEqual(["img07", "img02"]);
    expect(root.querySelector('[data-testid="selection-count"]')!.textContent).toBe(
      "2 of 2 selected",
    );
    click('[data-image-id="img07"]');
    click('[data-image-id="img09"]');
    const after = [...root.querySelectorAll(".card.selected")].map((c) =>
      c.getAttribute("data-image-id"),
    );
    expect(after).toEqual(["img02", "img09"]);
  });

  it("confirms with the buffer full", () => {
    const onConfirm = vi.fn();
    mountScreen(new SelectionBuffer(2), onConfirm);
    click('[data-image-id="img07"]');
    click('[data-image-id="img02"]');
    confirmButton().click();
    expect(onConfirm).toHaveBeenCalledTimes(1);
  });

  it("cards are buttons, so keyboard selection works out of the box", () => {
    mountScreen(new SelectionBuffer(2));
    const card = root.querySelector('[data-image-id="img07"]')!;
    expect(card.tagName).toBe("BUTTON");
  });
});

describe("renderFeedback", () => {
  const feedback: Feedback = { screen_no: 2, screen_score: 1, screens_remaining: 2 };

  it("shows the score as a count only", () => {
    renderFeedback(root, feedback, 2, () => {});
    expect(root.querySelector('[data-testid="screen-score"]')!.textContent).toBe(
      "You matched 1 of 2.",
    );
  });

  it("never reveals which image was right or wrong", () => {
    renderFeedback(root, feedback, 2, () => {});
    expect(root.querySelectorAll(".card").length).toBe(0);
    expect(root.querySelectorAll("img").length).toBe(0);
    const text = root.textContent ?? "";
    expect(text).not.toMatch(/img\d/);
    expect(text.toLowerCase()).not.toContain("correct");
    expect(text.toLowerCase()).not.toContain("wrong");
  });

  it("advances via the next button", () => {
    const onNext = vi.fn();
    renderFeedback(root, feedback, 2, onNext);
    click('[data-testid="feedback-next"]');
    expect(onNext).toHaveBeenCalledTimes(1);
  });
});

describe("renderRating", () => {
  const card = { image_id: "img42", uri: "file:///img42.png", category: "Forest" };
  const progress = { rated_count: 5, required: 72, mandatory_done: false, interstitial: null };

  it("keeps Next disabled until a value is picked", () => {
    const onSubmit = vi.fn();
    renderRating(root, card, progress, { onSubmit });
    const next = root.querySelector<HTMLButtonElement>('[data-testid="rate-next"]')!;
    expect(next.disabled).toBe(true);
    next.click();
    expect(onSubmit).not.toHaveBeenCalled();
    click('[data-testid="rate-7"]');
    expect(next.disabled).toBe(false);
    next.click();
    expect(onSubmit).toHaveBeenCalledWith(7);
  });

  it("offers the full 1-10 scale and echoes server progress", () => {
    renderRating(root, card, progress, { onSubmit: () => {} });
    for (let value = 1; value <= 10; value++) {
      expect(root.querySelector(`[data-testid="rate-${value}"]`)).toBeTruthy();
    }
    expect(root.querySelector('[data-testid="rate-progress"]')!.textContent).toBe(
      "5 of 72 rated",
    );
  });

  it("re-picking moves the pressed mark", () => {
    const onSubmit = vi.fn();
    renderRating(root, card, progress, { onSubmit });
    click('[data-testid="rate-3"]');
    click('[data-testid="rate-9"]');
    expect(root.querySelector('[data-testid="rate-3"]')!.getAttribute("aria-pressed")).toBe("false");
    expect(root.querySelector('[data-testid="rate-9"]')!.getAttribute("aria-pressed")).toBe("true");
    click('[data-testid="rate-next"]');
    expect(onSubmit).toHaveBeenCalledWith(9);
  });
});

describe("renderGallery", () => {
  const gallery: Gallery = {
    items: [
      { image_id: "img01", uri: "file:///1.png", category: "Nature", value: 7, revisions: 0 },
      { image_id: "img02", uri: "file:///2.png", category: "Seaside", value: 4, revisions: 1 },
    ],
    revision_enabled: true,
  };

  it("lists current values and fires onRevise with the new value", () => {
    const onRevise = vi.fn();
    renderGallery(root, gallery, { onRevise, onBack: () => {} });
    expect(root.querySelector('[data-testid="gallery-value-img01"]')!.textContent).toBe("rated 7");
    click('[data-testid="revise-img01-4"]');
    expect(onRevise).toHaveBeenCalledWith("img01", 4);
  });

  it("hides the revision controls when revision is disabled", () => {
    renderGallery(root, { ...gallery, revision_enabled: false }, {
      onRevise: () => {},
      onBack: () => {},
    });
    expect(root.querySelector('[data-testid="revise-img01-4"]')).toBeNull();
    expect(root.querySelector('[data-testid="gallery-value-img01"]')).toBeTruthy();
  });
});

describe("renderSessionEnd", () => {
  it("shows the daily and cumulative totals from the server", () => {
    const feedback: Feedback = {
      screen_no: 4,
      screen_score: 2,
      screens_remaining: 0,
      total: 6,
      decision: "reject",
      session_points: 6,
      overall_points: 14,
    };
    renderSessionEnd(root, feedback, () => {});
    expect(root.querySelector('[data-testid="session-points"]')!.textContent).toBe(
      "Today: 6 points",
    );
    expect(root.querySelector('[data-testid="overall-points"]')!.textContent).toBe(
      "All time: 14 points",
    );
  });
});

describe("renderReturning", () => {
  const profile: Profile = {
    user_id: "u00001",
    nickname: "alice",
    rated_count: 72,
    mandatory_done: true,
    last_played: null,
    last_played_date: null,
    game_points: 8,
    adversarial_points: 0,
    revision_enabled: true,
  };
  const handlers = {
    onRate: () => {},
    onGallery: () => {},
    onPlay: () => {},
    onAdversarial: () => {},
    onLeaderboard: () => {},
  };

  it("unlocks play once the mandatory ratings are done", () => {
    renderReturning(root, profile, handlers);
    expect(root.querySelector<HTMLButtonElement>('[data-testid="go-play"]')!.disabled).toBe(false);
    expect(root.querySelector('[data-testid="go-rate"]')).toBeNull();
  });

  it("locks play and keeps rating available before the gate", () => {
    renderReturning(root, { ...profile, rated_count: 40, mandatory_done: false }, handlers);
    expect(root.querySelector<HTMLButtonElement>('[data-testid="go-play"]')!.disabled).toBe(true);
    expect(root.querySelector('[data-testid="go-rate"]')).toBeTruthy();
  });

  it("offers the gallery only when revision is enabled", () => {
    renderReturning(root, profile, handlers);
    expect(root.querySelector('[data-testid="go-gallery"]')).toBeTruthy();
    renderReturning(root, { ...profile, revision_enabled: false }, handlers);
    expect(root.querySelector('[data-testid="go-gallery"]')).toBeNull();
  });
});

describe("renderRegister", () => {
  it("submits the form fields including consent", () => {
    const onSubmit = vi.fn();
    renderRegister(root, { onSubmit });
    root.querySelector<HTMLInputElement>('[data-testid="email"]')!.value = "a@b.se";
    root.querySelector<HTMLInputElement>('[data-testid="nickname"]')!.value = "alice";
    root.querySelector<HTMLInputElement>('[data-testid="consent"]')!.checked = true;
    click('[data-testid="register"]');
    expect(onSubmit).toHaveBeenCalledWith("a@b.se", "alice", true);
  });
});
