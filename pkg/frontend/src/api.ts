/**
 * Thin client for the story repository REST API. Story ids only ever come
 * from server responses; the client never derives one locally.
 */

import { AssetResult, StoryListing } from "./model.js";
import { MEDIA_TYPE } from "./codec.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string
  ) {
    super(`${status} ${code}: ${detail}`);
  }
}

export interface StoryPage {
  page: number;
  pageSize: number;
  total: number;
  stories: StoryListing[];
}

export interface PublishResult {
  storyId: string;
  created: boolean;
}

export interface CorpusStats {
  totalStories: number;
  remixCount: number;
  selfRemixCount: number;
  remixRatio: number;
  selfRemixShare: number;
  uniqueAssets: number;
  totalAssetInstances: number;
  sceneCountHistogram: { oneScene: number; twoScenes: number; threePlus: number; maxScenes: number };
}

function listingFromJson(doc: any): StoryListing {
  return {
    storyId: doc.story_id,
    title: doc.title,
    creator: doc.creator,
    originalCreator: doc.original_creator,
    description: doc.description,
    sceneCount: doc.scene_count,
    createdAt: doc.created_at,
    parentStory: doc.parent_story ?? null,
    viewCount: doc.view_count,
  };
}

export class RepositoryClient {
  constructor(readonly baseUrl: string) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "error";
      let detail = response.statusText;
      try {
        const body = await response.json();
        code = body.error ?? code;
        detail = body.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, detail);
    }
    return response;
  }

  async listStories(page = 1, pageSize = 20, creator?: string): Promise<StoryPage> {
    const params = new URLSearchParams({ page: String(page), page_size: String(pageSize) });
    if (creator) params.set("creator", creator);
    const body = await (await this.request(`/stories?${params}`)).json();
    return {
      page: body.page,
      pageSize: body.page_size,
      total: body.total,
      stories: body.stories.map(listingFromJson),
    };
  }

  async meta(storyId: string): Promise<StoryListing> {
    return listingFromJson(await (await this.request(`/stories/${storyId}/meta`)).json());
  }

  /** Downloads the package bytes; the server counts this as a view. */
  async fetchPackage(storyId: string): Promise<Uint8Array> {
    const response = await this.request(`/stories/${storyId}`);
    return new Uint8Array(await response.arrayBuffer());
  }

  async lineage(storyId: string): Promise<StoryListing[]> {
    const body = await (await this.request(`/stories/${storyId}/lineage`)).json();
    return body.lineage.map(listingFromJson);
  }

  async publish(packageBytes: Uint8Array, creator: string): Promise<PublishResult> {
    const response = await this.request("/stories", {
      method: "POST",
      headers: { "content-type": MEDIA_TYPE, creator },
      body: packageBytes as unknown as BodyInit,
    });
    const body = await response.json();
    return { storyId: body.story_id, created: body.created };
  }

  async searchAssets(query: string, limit = 10): Promise<AssetResult[]> {
    const params = new URLSearchParams({ q: query, limit: String(limit) });
    const body = await (await this.request(`/assets?${params}`)).json();
    return body.results.map((r: any) => ({
      assetKey: r.asset_key,
      displayName: r.display_name,
      tags: r.tags,
      blobSize: r.blob_size,
      boundsUm: r.bounds_um,
    }));
  }

  async stats(): Promise<CorpusStats> {
    const body = await (await this.request("/stats")).json();
    return {
      totalStories: body.total_stories,
      remixCount: body.remix_count,
      selfRemixCount: body.self_remix_count,
      remixRatio: body.remix_ratio,
      selfRemixShare: body.self_remix_share,
      uniqueAssets: body.unique_assets,
      totalAssetInstances: body.total_asset_instances,
      sceneCountHistogram: {
        oneScene: body.scene_count_histogram.one_scene,
        twoScenes: body.scene_count_histogram.two_scenes,
        threePlus: body.scene_count_histogram.three_plus,
        maxScenes: body.scene_count_histogram.max_scenes,
      },
    };
  }
}
