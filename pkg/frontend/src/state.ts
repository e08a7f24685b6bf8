import type { Api } from "./api.js";
import type { Granularity, StorylineJson } from "./types.js";

export interface FisheyeState {
  focusX: number;
  distortion: number;
  enabled: boolean;
}

export interface ViewState {
  docId: string | null;
  granularity: Granularity;
  selectedEntities: Set<string>;
  selectedScene: number | null;
  fisheye: FisheyeState;
}

export interface SceneTarget {
  kind: Granularity;
  ref: number; // paragraph_index or sentence_index in the document
}

export function initialState(): ViewState {
  return {
    docId: null,
    granularity: "paragraph",
    selectedEntities: new Set(),
    selectedScene: null,
    fisheye: { focusX: 0, distortion: 3, enabled: false },
  };
}

/** Scene index -> text region; the inverse of findSceneByRef. */
export function sceneTarget(layout: StorylineJson, sceneIndex: number): SceneTarget | null {
  const scene = layout.scenes[sceneIndex];
  if (!scene) return null;
  return { kind: layout.granularity, ref: scene.ref };
}

/** Text region -> scene index; the inverse of sceneTarget. */
export function findSceneByRef(layout: StorylineJson, ref: number): number | null {
  const scene = layout.scenes.find((s) => s.ref === ref);
  return scene ? scene.i : null;
}

export function layoutEntities(layout: StorylineJson): Set<string> {
  return new Set(layout.lifelines.map((l) => l.entity));
}

/**
 * Mutable view state plus the interactions that change it. All fetches go
 * through the shared Api so the tests can observe the exact requests.
 */
export class StoryStore {
  state: ViewState = initialState();
  layout: StorylineJson | null = null;
  lastError: string | null = null;

  constructor(private readonly api: Api) {}

  async open(docId: string): Promise<StorylineJson> {
    this.state.docId = docId;
    this.state.selectedScene = null;
    this.layout = await this.api.storyline(docId, this.state.granularity);
    return this.layout;
  }

  /** Toggle membership; unknown entities are ignored with a warning. */
  selectEntity(entityId: string): void {
    if (!this.layout || !layoutEntities(this.layout).has(entityId)) {
      console.warn(`entity ${entityId} is not in the current layout`);
      return;
    }
    if (this.state.selectedEntities.has(entityId)) {
      this.state.selectedEntities.delete(entityId);
    } else {
      this.state.selectedEntities.add(entityId);
    }
  }

  /**
   * Resolve a scene click to its text target. A stale index (e.g. right
   * after a granularity switch) triggers a layout refetch and returns null;
   * the caller re-renders and the next click lands on fresh data.
   */
  async selectScene(sceneIndex: number): Promise<SceneTarget | null> {
    if (!this.layout || !this.state.docId) return null;
    if (sceneIndex < 0 || sceneIndex >= this.layout.scenes.length) {
      this.layout = await this.api.storyline(this.state.docId, this.state.granularity);
      return null;
    }
    this.state.selectedScene = sceneIndex;
    return sceneTarget(this.layout, sceneIndex);
  }

  /** Flip paragraph/sentence; entity selection survives; errors keep state. */
  async toggleGranularity(): Promise<StorylineJson | null> {
    if (!this.state.docId) return null;
    const next: Granularity =
      this.state.granularity === "paragraph" ? "sentence" : "paragraph";
    try {
      const layout = await this.api.storyline(this.state.docId, next);
      this.state.granularity = next;
      this.state.selectedScene = null;
      this.layout = layout;
      this.lastError = null;
      return layout;
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      return null;
    }
  }

  setFisheye(enabled: boolean, focusX = 0, distortion = 3): void {
    this.state.fisheye = { enabled, focusX, distortion };
  }
}
