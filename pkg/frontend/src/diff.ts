/**
 * Id-based story diff, mirroring the repository's semantics: objects and
 * scenes match by id, transform/dialog changes count only for shared
 * objects, metadata is excluded. Drives the editor's pending-changes panel.
 */

import { PlacedObject, Story, iterObjects } from "./model.js";

export interface StoryDiff {
  objectsAdded: string[];
  objectsRemoved: string[];
  objectsTransformed: string[];
  dialogsEdited: string[];
  scenesAdded: number;
  scenesRemoved: number;
  scenesReordered: boolean;
}

function transformsEqual(a: PlacedObject, b: PlacedObject): boolean {
  return (
    a.transform.scale === b.transform.scale &&
    a.transform.position.every((c, i) => c === b.transform.position[i]) &&
    a.transform.rotation.every((c, i) => c === b.transform.rotation[i])
  );
}

function dialogsEqual(a: PlacedObject, b: PlacedObject): boolean {
  if (a.dialog === null || b.dialog === null) return a.dialog === b.dialog;
  return a.dialog.text === b.dialog.text && a.dialog.offset.every((c, i) => c === b.dialog!.offset[i]);
}

export function storyDiff(parent: Story, child: Story): StoryDiff {
  const parentObjects = new Map<string, PlacedObject>();
  for (const obj of iterObjects(parent)) parentObjects.set(obj.objectId, obj);
  const childObjects = new Map<string, PlacedObject>();
  for (const obj of iterObjects(child)) childObjects.set(obj.objectId, obj);

  const objectsAdded = [...childObjects.keys()].filter((id) => !parentObjects.has(id));
  const objectsRemoved = [...parentObjects.keys()].filter((id) => !childObjects.has(id));
  const objectsTransformed: string[] = [];
  const dialogsEdited: string[] = [];
  for (const [id, childObj] of childObjects) {
    const parentObj = parentObjects.get(id);
    if (parentObj === undefined) continue;
    if (!transformsEqual(parentObj, childObj)) objectsTransformed.push(id);
    if (!dialogsEqual(parentObj, childObj)) dialogsEdited.push(id);
  }

  const parentSceneIds = parent.scenes.map((s) => s.sceneId);
  const childSceneIds = child.scenes.map((s) => s.sceneId);
  const parentSet = new Set(parentSceneIds);
  const childSet = new Set(childSceneIds);
  const sharedInParent = parentSceneIds.filter((id) => childSet.has(id));
  const sharedInChild = childSceneIds.filter((id) => parentSet.has(id));

  return {
    objectsAdded,
    objectsRemoved,
    objectsTransformed,
    dialogsEdited,
    scenesAdded: childSceneIds.filter((id) => !parentSet.has(id)).length,
    scenesRemoved: parentSceneIds.filter((id) => !childSet.has(id)).length,
    scenesReordered: sharedInParent.join("\n") !== sharedInChild.join("\n"),
  };
}

export function diffIsEmpty(diff: StoryDiff): boolean {
  return (
    diff.objectsAdded.length === 0 &&
    diff.objectsRemoved.length === 0 &&
    diff.objectsTransformed.length === 0 &&
    diff.dialogsEdited.length === 0 &&
    diff.scenesAdded === 0 &&
    diff.scenesRemoved === 0 &&
    !diff.scenesReordered
  );
}
