/** Gallery rendering: listing rows, creator filter, lineage breadcrumbs. */

import { RepositoryClient } from "./api.js";
import { StoryListing } from "./model.js";

export interface GalleryActions {
  onOpen: (listing: StoryListing) => void;
  onRemix: (listing: StoryListing) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderListingRow(listing: StoryListing, actions: GalleryActions): HTMLElement {
  const row = el("div", "story-row");
  const title = el("div", "story-title", listing.title || "(untitled)");
  const info = el(
    "div",
    "story-info",
    `${listing.creator} · ${listing.sceneCount} scene${listing.sceneCount === 1 ? "" : "s"} · ` +
      `${listing.viewCount} view${listing.viewCount === 1 ? "" : "s"}` +
      (listing.parentStory ? " · remix" : "")
  );
  const description = el("div", "story-description", listing.description);
  const buttons = el("div", "story-buttons");
  const open = el("button", "primary", "view");
  open.addEventListener("click", () => actions.onOpen(listing));
  const remix = el("button", undefined, "remix");
  remix.addEventListener("click", () => actions.onRemix(listing));
  buttons.append(open, remix);
  row.append(title, info, description, buttons);
  return row;
}

export async function renderGallery(
  container: HTMLElement,
  client: RepositoryClient,
  actions: GalleryActions,
  creatorFilter?: string,
  page = 1
): Promise<void> {
  container.replaceChildren();
  const result = await client.listStories(page, 20, creatorFilter || undefined);
  if (result.stories.length === 0) {
    container.append(el("div", "empty-state", "No stories published yet — be the first to tell one."));
    return;
  }
  for (const listing of result.stories) {
    container.append(renderListingRow(listing, actions));
  }
  const pages = Math.max(1, Math.ceil(result.total / result.pageSize));
  if (pages > 1) {
    const pager = el("div", "pager");
    for (let p = 1; p <= pages; p++) {
      const button = el("button", p === page ? "primary" : undefined, String(p));
      button.addEventListener("click", () => void renderGallery(container, client, actions, creatorFilter, p));
      pager.append(button);
    }
    container.append(pager);
  }
}

export async function renderLineage(
  container: HTMLElement,
  client: RepositoryClient,
  storyId: string,
  onOpen: (listing: StoryListing) => void
): Promise<void> {
  container.replaceChildren();
  const chain = await client.lineage(storyId);
  chain.forEach((listing, index) => {
    if (index > 0) container.append(el("span", "crumb-sep", " → "));
    const crumb = el("button", "crumb", `${listing.title || "(untitled)"} by ${listing.creator}`);
    crumb.addEventListener("click", () => onOpen(listing));
    container.append(crumb);
  });
}
