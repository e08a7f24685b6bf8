import type {
  EvolutionPayload,
  GraphPayload,
  Granularity,
  IndexRow,
  RankingRow,
  StorylineJson,
  TextPayload,
} from "./types.js";

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

/** Thin client over the documented endpoints; fetch is injectable for tests. */
export class Api {
  constructor(
    private readonly fetchFn: FetchLike = (url) => fetch(url),
    private readonly base: string = "",
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) {
      throw new Error(`GET ${path} failed with status ${response.status}`);
    }
    return (await response.json()) as T;
  }

  listDocuments(): Promise<IndexRow[]> {
    return this.get("/api/documents");
  }

  storyline(
    docId: string,
    granularity: Granularity,
    entities?: string[],
  ): Promise<StorylineJson> {
    const params = new URLSearchParams({ granularity });
    if (entities && entities.length) params.set("entities", entities.join(","));
    return this.get(`/api/documents/${docId}/storyline?${params}`);
  }

  text(docId: string): Promise<TextPayload> {
    return this.get(`/api/documents/${docId}/text`);
  }

  entities(docId: string): Promise<RankingRow[]> {
    return this.get(`/api/documents/${docId}/entities`);
  }

  cooccurrence(docId: string, level: "sentence" | "paragraph"): Promise<GraphPayload> {
    return this.get(`/api/documents/${docId}/cooccurrence?level=${level}`);
  }

  evolution(): Promise<EvolutionPayload> {
    return this.get("/api/collection/evolution");
  }

  communities(): Promise<GraphPayload> {
    return this.get("/api/collection/communities");
  }
}
