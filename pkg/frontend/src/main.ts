/**
 * App wiring: gallery -> viewer -> remix editor -> publish, all against the
 * repository REST API. The mouse mapping mirrors the touch vocabulary of
 * in-situ AR editors one-to-one (see the help panel): click = tap/select,
 * drag = translate, alt-drag = elevate, ctrl-drag = twist (yaw),
 * wheel = pinch (scale).
 */

import { ApiError, RepositoryClient } from "./api.js";
import { decodeStory, encodeStory } from "./codec.js";
import { diffIsEmpty, storyDiff } from "./diff.js";
import { EditSession } from "./editSession.js";
import { renderGallery, renderLineage } from "./gallery.js";
import { Story, StoryListing, Vec3 } from "./model.js";
import { BoundsLookup, SceneViewer, UNIT_CUBE } from "./viewer.js";

const UM = 1e6;

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function status(text: string, isError = false): void {
  const bar = $("status");
  bar.textContent = text;
  bar.classList.toggle("error", isError);
}

class Studio {
  client: RepositoryClient;
  viewer: SceneViewer;
  boundsCache = new Map<string, [Vec3, Vec3]>();
  story: Story | null = null;
  listing: StoryListing | null = null;
  session: EditSession | null = null;
  sceneIndex = 0;
  parentForDiff: Story | null = null;

  constructor() {
    this.client = new RepositoryClient(
      (document.querySelector("meta[name=microar-server]") as HTMLMetaElement | null)?.content ??
        `${location.protocol}//${location.host}`
    );
    this.viewer = new SceneViewer($("canvas") as HTMLCanvasElement, {
      onSelect: (objectId) => this.onSelect(objectId),
      onDragObject: (objectId, dx, dy, elevate) => this.onDragObject(objectId, dx, dy, elevate),
      onWheelObject: (objectId, factor) => this.onScaleObject(objectId, factor),
      onRotateObject: (objectId, angle) => this.onRotateObject(objectId, angle),
    });
    this.bindChrome();
    void this.showGallery();
  }

  private bounds(): BoundsLookup {
    return (assetKey) => this.boundsCache.get(assetKey) ?? UNIT_CUBE;
  }

  private async rememberBounds(assetKey: string, displayName: string): Promise<void> {
    if (this.boundsCache.has(assetKey)) return;
    try {
      const hits = await this.client.searchAssets(displayName, 5);
      for (const hit of hits) {
        this.boundsCache.set(hit.assetKey, [
          hit.boundsUm[0].map((v) => v / UM) as Vec3,
          hit.boundsUm[1].map((v) => v / UM) as Vec3,
        ]);
      }
    } catch {
      // bounds are cosmetic; unit cubes are fine offline
    }
  }

  // --- views --------------------------------------------------------------

  async showGallery(): Promise<void> {
    this.session = null;
    this.story = null;
    $("viewer-pane").hidden = true;
    $("editor-pane").hidden = true;
    $("gallery-pane").hidden = false;
    const creator = ($("creator-filter") as HTMLInputElement).value.trim();
    try {
      await renderGallery($("gallery"), this.client, {
        onOpen: (listing) => void this.openStory(listing),
        onRemix: (listing) => void this.startRemix(listing),
      }, creator);
      status("gallery loaded");
    } catch (error) {
      status(String(error), true);
    }
  }

  async openStory(listing: StoryListing): Promise<void> {
    try {
      const bytes = await this.client.fetchPackage(listing.storyId); // counts the view
      this.story = decodeStory(bytes);
      this.listing = await this.client.meta(listing.storyId);
      this.sceneIndex = 0;
      for (const scene of this.story.scenes) {
        for (const obj of scene.objects) void this.rememberBounds(obj.assetKey, obj.displayName);
      }
      $("gallery-pane").hidden = true;
      $("editor-pane").hidden = true;
      $("viewer-pane").hidden = false;
      $("viewer-title").textContent = `${this.story.metadata.title} — by ${this.story.metadata.creator}`;
      await renderLineage($("lineage"), this.client, listing.storyId, (l) => void this.openStory(l));
      this.viewer.setEditable(false);
      this.showScene(0);
      status(`viewing "${this.story.metadata.title}" (${this.listing.viewCount} views)`);
    } catch (error) {
      status(String(error), true);
    }
  }

  showScene(index: number): void {
    const story = this.session?.current() ?? this.story;
    if (!story) return;
    this.sceneIndex = Math.min(Math.max(index, 0), story.scenes.length - 1);
    $("scene-label").textContent = `scene ${this.sceneIndex + 1} / ${story.scenes.length}`;
    this.viewer.setScene(story.scenes[this.sceneIndex], this.bounds());
  }

  async startRemix(listing: StoryListing): Promise<void> {
    try {
      const bytes = await this.client.fetchPackage(listing.storyId);
      const parent = decodeStory(bytes);
      const creator = prompt("Remix as (your name):", "studio-user")?.trim();
      if (!creator) return;
      this.parentForDiff = parent;
      this.session = EditSession.remixOf(parent, listing, creator);
      this.story = null;
      for (const scene of parent.scenes) {
        for (const obj of scene.objects) void this.rememberBounds(obj.assetKey, obj.displayName);
      }
      $("gallery-pane").hidden = true;
      $("viewer-pane").hidden = true;
      $("editor-pane").hidden = false;
      ($("edit-title") as HTMLInputElement).value = "";
      ($("edit-description") as HTMLInputElement).value = "";
      this.viewer.setEditable(true);
      this.sceneIndex = 0;
      this.refreshEditor();
      status(`remixing "${listing.title}" as ${creator}`);
    } catch (error) {
      status(String(error), true);
    }
  }

  refreshEditor(): void {
    if (!this.session) return;
    const story = this.session.current();
    this.sceneIndex = Math.min(this.sceneIndex, story.scenes.length - 1);
    $("scene-label").textContent = `scene ${this.sceneIndex + 1} / ${story.scenes.length}`;
    this.viewer.setScene(story.scenes[this.sceneIndex], this.bounds());
    this.viewer.setSelected(this.session.selectedObjectId);
    ($("undo") as HTMLButtonElement).disabled = !this.session.canUndo();
    ($("redo") as HTMLButtonElement).disabled = !this.session.canRedo();
    const diff = this.parentForDiff ? storyDiff(this.parentForDiff, story) : null;
    $("pending").textContent = diff
      ? diffIsEmpty(diff)
        ? "no changes yet"
        : `+${diff.objectsAdded.length} obj, -${diff.objectsRemoved.length} obj, ` +
          `${diff.objectsTransformed.length} moved, ${diff.dialogsEdited.length} dialog, ` +
          `+${diff.scenesAdded} scene`
      : "";
    const selected = this.session.selectedObjectId;
    const dialogInput = $("dialog-text") as HTMLInputElement;
    if (selected) {
      const obj = story.scenes.flatMap((s) => s.objects).find((o) => o.objectId === selected);
      dialogInput.value = obj?.dialog?.text ?? "";
      $("selection-label").textContent = obj ? `selected: ${obj.displayName}` : "";
    } else {
      dialogInput.value = "";
      $("selection-label").textContent = "nothing selected";
    }
  }

  // --- edit gestures --------------------------------------------------------

  onSelect(objectId: string | null): void {
    this.session?.select(objectId);
    this.viewer.setSelected(objectId);
    this.refreshEditor();
  }

  onDragObject(objectId: string, dxPixels: number, dyPixels: number, elevate: boolean): void {
    if (!this.session) return;
    const height = ($("canvas") as HTMLCanvasElement).height;
    if (elevate) {
      this.session.applyGesture(objectId, { kind: "elevate", dy: -dyPixels * 0.01 });
    } else {
      const [du, dv] = this.viewer.camera.dragOnGround(dxPixels, dyPixels, height);
      this.session.applyGesture(objectId, { kind: "translate", du, dv });
    }
    this.refreshEditor();
  }

  onScaleObject(objectId: string, factor: number): void {
    this.session?.applyGesture(objectId, { kind: "scaleBy", factor });
    this.refreshEditor();
  }

  onRotateObject(objectId: string, angle: number): void {
    this.session?.applyGesture(objectId, { kind: "rotateYaw", angle });
    this.refreshEditor();
  }

  // --- editor chrome ---------------------------------------------------------

  private bindChrome(): void {
    $("back-to-gallery").addEventListener("click", () => void this.showGallery());
    $("editor-back").addEventListener("click", () => void this.showGallery());
    $("creator-filter").addEventListener("change", () => void this.showGallery());
    $("prev-scene").addEventListener("click", () => {
      this.session ? (this.sceneIndex--, this.refreshEditor()) : this.showScene(this.sceneIndex - 1);
    });
    $("next-scene").addEventListener("click", () => {
      this.session ? (this.sceneIndex++, this.refreshEditor()) : this.showScene(this.sceneIndex + 1);
    });
    $("undo").addEventListener("click", () => {
      this.session?.undo();
      this.refreshEditor();
    });
    $("redo").addEventListener("click", () => {
      this.session?.redo();
      this.refreshEditor();
    });
    $("add-scene").addEventListener("click", () => {
      if (!this.session) return;
      this.sceneIndex = this.session.addScene();
      this.refreshEditor();
    });
    $("delete-scene").addEventListener("click", () => {
      if (!this.session) return;
      try {
        this.session.deleteScene(this.sceneIndex);
        this.refreshEditor();
      } catch (error) {
        status(String(error), true);
      }
    });
    $("scene-earlier").addEventListener("click", () => {
      if (!this.session || this.sceneIndex === 0) return;
      this.session.moveScene(this.sceneIndex, this.sceneIndex - 1);
      this.sceneIndex--;
      this.refreshEditor();
    });
    $("remove-object").addEventListener("click", () => {
      const selected = this.session?.selectedObjectId;
      if (this.session && selected) {
        this.session.removeObject(selected);
        this.refreshEditor();
      }
    });
    $("dialog-apply").addEventListener("click", () => {
      const selected = this.session?.selectedObjectId;
      if (!this.session || !selected) return;
      const text = ($("dialog-text") as HTMLInputElement).value;
      try {
        this.session.editDialog(selected, text.trim() === "" ? null : text);
        this.refreshEditor();
      } catch (error) {
        status(String(error), true);
      }
    });
    $("asset-search").addEventListener("click", () => void this.searchAssets());
    $("publish").addEventListener("click", () => void this.publish());
    $("help-toggle").addEventListener("click", () => {
      $("help-panel").hidden = !$("help-panel").hidden;
    });
  }

  async searchAssets(): Promise<void> {
    const query = ($("asset-query") as HTMLInputElement).value.trim();
    const results = $("asset-results");
    results.replaceChildren();
    if (!query) return;
    try {
      const hits = await this.client.searchAssets(query, 8);
      if (hits.length === 0) {
        results.textContent = "no assets match";
        return;
      }
      for (const hit of hits) {
        const button = document.createElement("button");
        button.textContent = hit.displayName;
        button.addEventListener("click", () => {
          if (!this.session) return;
          this.boundsCache.set(hit.assetKey, [
            hit.boundsUm[0].map((v) => v / UM) as Vec3,
            hit.boundsUm[1].map((v) => v / UM) as Vec3,
          ]);
          const objectId = this.session.addObject(this.sceneIndex, {
            assetKey: hit.assetKey,
            displayName: hit.displayName,
          });
          this.session.select(objectId);
          this.refreshEditor();
        });
        results.append(button);
      }
    } catch (error) {
      status(String(error), true);
    }
  }

  async publish(): Promise<void> {
    if (!this.session) return;
    this.session.setTitle(($("edit-title") as HTMLInputElement).value);
    this.session.setDescription(($("edit-description") as HTMLInputElement).value);
    this.session.setCreatedAt(Math.floor(Date.now() / 1000));
    const story = this.session.current();
    try {
      const result = await this.client.publish(encodeStory(story), story.metadata.creator);
      status(
        result.created
          ? `published ${result.storyId.slice(0, 12)}…`
          : `already published as ${result.storyId.slice(0, 12)}…`
      );
      await this.showGallery();
    } catch (error) {
      if (error instanceof ApiError) {
        status(`publish rejected: ${error.message}`, true);
      } else {
        status(String(error), true);
      }
    }
  }
}

new Studio();
