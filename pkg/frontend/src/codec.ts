/**
 * Vendored `.mar` codec: encodes stories to the same canonical bytes as the
 * repository (verified against the shared golden fixture) and decodes
 * fetched packages for viewing and remixing.
 */

import { canonicalJsonBytes } from "./canonicalJson.js";
import {
  DialogBalloon,
  PlacedObject,
  Quaternion,
  Scene,
  Story,
  StoryMetadata,
  Vec3,
  quantizeTransform,
  roundHalfEven,
} from "./model.js";
import { readZip, writeStoredZip } from "./zip.js";

export const FORMAT_VERSION: [number, number] = [1, 0];
export const MEDIA_TYPE = "application/vnd.microar+zip";

const PART_METADATA = "metadata.json";
const PART_CONTENT = "content.json";
const PART_LAYOUT = "layout.json";

const UM = 1e6;
const PPM = 1e6;
const NANO = 1e9;

function toUm(x: number): number {
  return roundHalfEven(x * UM);
}

function vecUm(v: Vec3): number[] {
  return [toUm(v[0]), toUm(v[1]), toUm(v[2])];
}

function metadataDoc(meta: StoryMetadata, draft: boolean): Record<string, unknown> {
  const doc: Record<string, unknown> = {
    created_at: meta.createdAt,
    creator: meta.creator,
    description: meta.description,
    format_version: [meta.formatVersion[0], meta.formatVersion[1]],
    original_creator: meta.originalCreator,
    title: meta.title,
  };
  if (meta.parentStory !== null) doc.parent_story = meta.parentStory;
  if (meta.placementHints !== null) {
    const hints: Record<string, unknown> = { surface_class: meta.placementHints.surfaceClass };
    if (meta.placementHints.minExtents !== null) {
      hints.min_extents_um = [toUm(meta.placementHints.minExtents[0]), toUm(meta.placementHints.minExtents[1])];
    }
    if (meta.placementHints.note !== "") hints.note = meta.placementHints.note;
    doc.placement_hints = hints;
  }
  if (draft) doc.draft = true;
  return doc;
}

export function encodeStory(story: Story, options: { draft?: boolean } = {}): Uint8Array {
  const contentScenes = story.scenes.map((scene) => ({
    objects: scene.objects.map((obj) => {
      const entry: Record<string, unknown> = {
        asset_key: obj.assetKey,
        display_name: obj.displayName,
        object_id: obj.objectId,
      };
      if (obj.dialog !== null) entry.dialog_text = obj.dialog.text;
      return entry;
    }),
    scene_id: scene.sceneId,
  }));
  const layoutScenes = story.scenes.map((scene) => ({
    objects: scene.objects.map((obj) => {
      const t = quantizeTransform(obj.transform);
      const entry: Record<string, unknown> = {
        object_id: obj.objectId,
        position_um: vecUm(t.position),
        rotation_nano: t.rotation.map((c) => roundHalfEven(c * NANO)),
        scale_ppm: roundHalfEven(t.scale * PPM),
      };
      if (obj.groupId !== null) entry.group_id = obj.groupId;
      if (obj.dialog !== null) entry.dialog_offset_um = vecUm(obj.dialog.offset);
      return entry;
    }),
    scene_id: scene.sceneId,
  }));

  return writeStoredZip([
    { name: PART_METADATA, data: canonicalJsonBytes(metadataDoc(story.metadata, options.draft ?? false)) },
    { name: PART_CONTENT, data: canonicalJsonBytes({ scenes: contentScenes }) },
    { name: PART_LAYOUT, data: canonicalJsonBytes({ scenes: layoutScenes }) },
  ]);
}

type JsonObject = Record<string, unknown>;

function asObject(value: unknown, what: string): JsonObject {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new Error(`${what} must be a JSON object`);
  }
  return value as JsonObject;
}

function asString(value: unknown, what: string): string {
  if (typeof value !== "string") throw new Error(`${what} must be a string`);
  return value;
}

function asInt(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isSafeInteger(value)) {
    throw new Error(`${what} must be an integer`);
  }
  return value;
}

function asIntList(value: unknown, n: number, what: string): number[] {
  if (!Array.isArray(value) || value.length !== n) throw new Error(`${what} must be a list of ${n} integers`);
  return value.map((v) => asInt(v, what));
}

function sceneList(doc: JsonObject, part: string): JsonObject[] {
  const scenes = doc.scenes;
  if (!Array.isArray(scenes)) throw new Error(`${part} is missing its scenes list`);
  return scenes.map((s, i) => asObject(s, `${part} scenes[${i}]`));
}

export function decodeStory(data: Uint8Array): Story {
  const parts = readZip(data);
  for (const name of [PART_METADATA, PART_CONTENT, PART_LAYOUT]) {
    if (!parts.has(name)) throw new Error(`package is missing required part ${name}`);
  }
  const decoder = new TextDecoder();
  const metadataJson = asObject(JSON.parse(decoder.decode(parts.get(PART_METADATA))), PART_METADATA);
  const contentJson = asObject(JSON.parse(decoder.decode(parts.get(PART_CONTENT))), PART_CONTENT);
  const layoutJson = asObject(JSON.parse(decoder.decode(parts.get(PART_LAYOUT))), PART_LAYOUT);

  const version = asIntList(metadataJson.format_version, 2, "format_version");
  if (version[0] !== FORMAT_VERSION[0]) {
    throw new Error(`unsupported major format version ${version[0]}`);
  }

  let placementHints = null;
  if (metadataJson.placement_hints !== undefined) {
    const hints = asObject(metadataJson.placement_hints, "placement_hints");
    placementHints = {
      surfaceClass: asString(hints.surface_class, "surface_class"),
      minExtents:
        hints.min_extents_um !== undefined
          ? (asIntList(hints.min_extents_um, 2, "min_extents_um").map((v) => v / UM) as [number, number])
          : null,
      note: hints.note !== undefined ? asString(hints.note, "note") : "",
    };
  }
  const metadata: StoryMetadata = {
    creator: asString(metadataJson.creator, "creator"),
    title: asString(metadataJson.title, "title"),
    description: asString(metadataJson.description, "description"),
    originalCreator: asString(metadataJson.original_creator, "original_creator"),
    createdAt: asInt(metadataJson.created_at, "created_at"),
    parentStory: metadataJson.parent_story !== undefined ? asString(metadataJson.parent_story, "parent_story") : null,
    placementHints,
    formatVersion: [version[0], version[1]],
  };

  const contentScenes = sceneList(contentJson, PART_CONTENT);
  const layoutScenes = sceneList(layoutJson, PART_LAYOUT);
  if (contentScenes.length !== layoutScenes.length) {
    throw new Error("content and layout scene counts differ");
  }

  const scenes: Scene[] = contentScenes.map((cscene, i) => {
    const lscene = layoutScenes[i];
    const sceneId = asString(cscene.scene_id, "scene_id");
    if (sceneId !== asString(lscene.scene_id, "scene_id")) {
      throw new Error(`scene ${i}: content and layout scene ids differ`);
    }
    const layoutById = new Map<string, JsonObject>();
    for (const entry of (lscene.objects as unknown[]) ?? []) {
      const obj = asObject(entry, "layout object");
      layoutById.set(asString(obj.object_id, "object_id"), obj);
    }
    const contentObjects = (cscene.objects as unknown[]) ?? [];
    if (contentObjects.length !== layoutById.size) {
      throw new Error(`scene ${i}: content and layout object sets differ`);
    }
    const objects: PlacedObject[] = contentObjects.map((entry) => {
      const cobj = asObject(entry, "content object");
      const objectId = asString(cobj.object_id, "object_id");
      const lobj = layoutById.get(objectId);
      if (lobj === undefined) throw new Error(`scene ${i}: object ${objectId} has no layout entry`);
      const position = asIntList(lobj.position_um, 3, "position_um").map((v) => v / UM) as Vec3;
      const rotation = asIntList(lobj.rotation_nano, 4, "rotation_nano").map((v) => v / NANO) as Quaternion;
      const scale = asInt(lobj.scale_ppm, "scale_ppm") / PPM;
      let dialog: DialogBalloon | null = null;
      const hasText = cobj.dialog_text !== undefined;
      const hasOffset = lobj.dialog_offset_um !== undefined;
      if (hasText !== hasOffset) {
        throw new Error(`scene ${i}: dialog_text and dialog_offset_um must appear together`);
      }
      if (hasText) {
        dialog = {
          text: asString(cobj.dialog_text, "dialog_text"),
          offset: asIntList(lobj.dialog_offset_um, 3, "dialog_offset_um").map((v) => v / UM) as Vec3,
        };
      }
      return {
        objectId,
        assetKey: asString(cobj.asset_key, "asset_key"),
        displayName: asString(cobj.display_name, "display_name"),
        transform: { position, rotation, scale },
        groupId: lobj.group_id !== undefined ? asString(lobj.group_id, "group_id") : null,
        dialog,
      };
    });
    return { sceneId, objects };
  });

  return { metadata, scenes };
}

export function isDraftPackage(data: Uint8Array): boolean {
  const parts = readZip(data);
  const metadataPart = parts.get(PART_METADATA);
  if (metadataPart === undefined) return false;
  const doc = asObject(JSON.parse(new TextDecoder().decode(metadataPart)), PART_METADATA);
  return doc.draft === true;
}
