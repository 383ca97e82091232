/**
 * An in-progress remix draft with undo history.
 *
 * Every mutation goes through a method that snapshots the previous state,
 * so undo restores the draft exactly. The parent story id comes from the
 * server listing that opened the session — never computed client-side.
 */

import {
  Gesture,
  Scene,
  Story,
  StoryListing,
  Vec3,
  applyGesture,
  cloneStory,
  findObject,
  identityTransform,
  randomId,
} from "./model.js";

export interface AssetChoice {
  assetKey: string;
  displayName: string;
}

export class EditSession {
  private story: Story;
  private past: string[] = [];
  private future: string[] = [];
  selectedObjectId: string | null = null;

  private constructor(story: Story) {
    this.story = story;
  }

  /** Begin a brand-new story draft. */
  static blank(creator: string): EditSession {
    return new EditSession({
      metadata: {
        creator,
        title: "",
        description: "",
        originalCreator: creator,
        createdAt: 0,
        parentStory: null,
        placementHints: null,
        formatVersion: [1, 0],
      },
      scenes: [{ sceneId: randomId(), objects: [] }],
    });
  }

  /** Begin a remix: the parent's scenes with identical ids, lineage set
   * from the server-issued id, title/description cleared for the author. */
  static remixOf(parent: Story, parentListing: StoryListing, creator: string): EditSession {
    const draft = cloneStory(parent);
    return new EditSession({
      metadata: {
        creator,
        title: "",
        description: "",
        originalCreator: parent.metadata.originalCreator,
        createdAt: 0,
        parentStory: parentListing.storyId,
        placementHints: parent.metadata.placementHints,
        formatVersion: [1, 0],
      },
      scenes: draft.scenes,
    });
  }

  current(): Story {
    return this.story;
  }

  canUndo(): boolean {
    return this.past.length > 0;
  }

  canRedo(): boolean {
    return this.future.length > 0;
  }

  undo(): void {
    if (!this.canUndo()) return;
    this.future.push(JSON.stringify(this.story));
    this.story = JSON.parse(this.past.pop()!) as Story;
  }

  redo(): void {
    if (!this.canRedo()) return;
    this.past.push(JSON.stringify(this.story));
    this.story = JSON.parse(this.future.pop()!) as Story;
  }

  private mutate(change: (draft: Story) => void): void {
    const snapshot = JSON.stringify(this.story);
    const draft = cloneStory(this.story);
    change(draft);
    this.past.push(snapshot);
    this.future = [];
    this.story = draft;
  }

  select(objectId: string | null): void {
    this.selectedObjectId = objectId;
  }

  setTitle(title: string): void {
    this.mutate((draft) => {
      draft.metadata.title = title;
    });
  }

  setDescription(description: string): void {
    this.mutate((draft) => {
      draft.metadata.description = description;
    });
  }

  setCreatedAt(seconds: number): void {
    this.mutate((draft) => {
      draft.metadata.createdAt = seconds;
    });
  }

  applyGesture(objectId: string, gesture: Gesture): void {
    this.mutate((draft) => {
      const obj = findObject(draft, objectId);
      if (obj === null) throw new Error(`no object ${objectId}`);
      obj.transform = applyGesture(obj.transform, gesture);
    });
  }

  addObject(sceneIndex: number, asset: AssetChoice, position: Vec3 = [0, 0, 0]): string {
    const objectId = randomId();
    this.mutate((draft) => {
      const scene = draft.scenes[sceneIndex];
      if (scene === undefined) throw new Error(`no scene ${sceneIndex}`);
      scene.objects.push({
        objectId,
        assetKey: asset.assetKey,
        displayName: asset.displayName,
        transform: { ...identityTransform(), position },
        groupId: null,
        dialog: null,
      });
    });
    return objectId;
  }

  removeObject(objectId: string): void {
    this.mutate((draft) => {
      for (const scene of draft.scenes) {
        const index = scene.objects.findIndex((o) => o.objectId === objectId);
        if (index >= 0) {
          scene.objects.splice(index, 1);
          return;
        }
      }
      throw new Error(`no object ${objectId}`);
    });
    if (this.selectedObjectId === objectId) this.selectedObjectId = null;
  }

  /** Set or edit a dialog balloon; pass null text to remove it. */
  editDialog(objectId: string, text: string | null, offset?: Vec3): void {
    this.mutate((draft) => {
      const obj = findObject(draft, objectId);
      if (obj === null) throw new Error(`no object ${objectId}`);
      if (text === null) {
        obj.dialog = null;
        return;
      }
      if (text.trim() === "") throw new Error("dialog text must be non-empty");
      obj.dialog = { text, offset: offset ?? obj.dialog?.offset ?? [0, 0.3, 0] };
    });
  }

  addScene(): number {
    let index = -1;
    this.mutate((draft) => {
      draft.scenes.push({ sceneId: randomId(), objects: [] });
      index = draft.scenes.length - 1;
    });
    return index;
  }

  deleteScene(index: number): void {
    this.mutate((draft) => {
      if (draft.scenes.length <= 1) throw new Error("a story needs at least one scene");
      if (draft.scenes[index] === undefined) throw new Error(`no scene ${index}`);
      draft.scenes.splice(index, 1);
    });
  }

  moveScene(from: number, to: number): void {
    this.mutate((draft) => {
      if (draft.scenes[from] === undefined || draft.scenes[to] === undefined) {
        throw new Error(`bad scene move ${from} -> ${to}`);
      }
      const [scene] = draft.scenes.splice(from, 1) as [Scene];
      draft.scenes.splice(to, 0, scene);
    });
  }
}
