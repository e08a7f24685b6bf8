"""Render-ready storyline layout.

Scenes are the mention-bearing paragraphs or sentences in document order.
Lifelines get a default vertical slot inside their community's band; in
every scene the members are pulled into contiguous slots centered on the
mean of their default positions, which bundles co-occurring entities
without any global crossing optimization.
"""

import colorsys
import math
from dataclasses import dataclass, field

from scistory.analytics import PARAGRAPH, SENTENCE, Partition
from scistory.entities import EntityTable
from scistory.errors import ConsistencyError, ParameterError

LAYOUT_SCHEMA_VERSION = 1

GOLDEN_ANGLE = 137.50776405003785


@dataclass
class LayoutConfig:
    slot_height: float = 14.0
    scene_gap: float = 56.0
    width_scale: float = 2.0
    rect_width_factor: float = 0.6  # scene rectangle width as a share of scene_gap


@dataclass
class Scene:
    scene_index: int
    granularity: str
    source_ref: int  # paragraph_index or sentence_index
    entity_ids: set[str]
    shade: float


@dataclass
class Lifeline:
    entity_id: str
    color_index: int
    color: str
    width: float
    anchors: list[tuple[float, float]] = field(default_factory=list)

    @property
    def span(self) -> tuple[float, float]:
        return (self.anchors[0][0], self.anchors[-1][0]) if self.anchors else (0.0, 0.0)


@dataclass
class StorylineLayout:
    granularity: str
    scenes: list[Scene]
    lifelines: list[Lifeline]
    scene_rects: list[dict]
    section_separators: list[dict]
    indicator_row: list[dict]
    config: LayoutConfig


def build_scenes(record, granularity: str) -> list[Scene]:
    """One scene per mention-bearing paragraph/sentence, in document order.

    Shade is the comparative posterior of the sentence; paragraph scenes
    take the maximum over their sentences.
    """
    if granularity not in (PARAGRAPH, SENTENCE):
        raise ParameterError(f"unknown granularity {granularity!r}")
    confidence = {p.sentence_index: p.confidence for p in record.predictions}
    sentence_paragraph = {
        s.sentence_index: s.paragraph_index for s in record.document.sentences()
    }
    groups: dict[int, set[str]] = {}
    for m in record.mentions:
        ref = m.paragraph_index if granularity == PARAGRAPH else m.sentence_index
        groups.setdefault(ref, set()).add(m.entity_id)

    scenes = []
    for index, ref in enumerate(sorted(groups)):
        if granularity == PARAGRAPH:
            shade = max(
                (confidence.get(si, 0.0)
                 for si, pi in sentence_paragraph.items() if pi == ref),
                default=0.0,
            )
        else:
            shade = confidence.get(ref, 0.0)
        scenes.append(
            Scene(
                scene_index=index,
                granularity=granularity,
                source_ref=ref,
                entity_ids=groups[ref],
                shade=shade,
            )
        )
    return scenes


def entity_color(community_id: int, index_in_band: int, community_count: int) -> tuple[int, str]:
    """Deterministic hue: band hue from the community, golden-angle jitter within."""
    base = (community_id * 360.0 / max(1, community_count)) % 360.0
    offset = (index_in_band * GOLDEN_ANGLE) % 40.0 - 20.0
    hue = (base + offset) % 360.0
    r, g, b = colorsys.hls_to_rgb(hue / 360.0, 0.45, 0.65)
    color = "#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255))
    return community_id * 1000 + index_in_band, color


def layout(
    scenes: list[Scene],
    entity_table: EntityTable,
    partition: Partition,
    config: LayoutConfig | None = None,
) -> StorylineLayout:
    """Assign slots, anchors, widths, and colors to the storyline entities."""
    config = config or LayoutConfig()
    entities = sorted({e for scene in scenes for e in scene.entity_ids})
    missing = [e for e in entities if e not in partition]
    if missing:
        raise ConsistencyError(f"entities missing from partition: {missing[:5]}")

    frequency = {}
    for e in entities:
        row = entity_table.get(e)
        frequency[e] = row.mention_count if row else 1

    communities = sorted({partition[e] for e in entities})
    # frequency-descending default order inside each community band
    band_members = {
        c: sorted((e for e in entities if partition[e] == c),
                  key=lambda e: (-frequency[e], e))
        for c in communities
    }
    default_y: dict[str, float] = {}
    base = 0.0
    for c in communities:
        members = band_members[c]
        for i, e in enumerate(members):
            default_y[e] = base + i * config.slot_height
        base += len(members) * config.slot_height + 2.0 * config.slot_height

    lifelines: dict[str, Lifeline] = {}
    for c in communities:
        for i, e in enumerate(band_members[c]):
            color_index, color = entity_color(c, i, len(communities))
            width = max(1.0, config.width_scale * (1.0 + math.log(frequency[e])))
            lifelines[e] = Lifeline(entity_id=e, color_index=color_index,
                                    color=color, width=width)

    scene_rects = []
    all_default = sorted(default_y.values())
    fallback_y = all_default[len(all_default) // 2] if all_default else 0.0
    for scene in scenes:
        x = scene.scene_index * config.scene_gap
        members = sorted(
            (e for e in scene.entity_ids if e in lifelines),
            key=lambda e: default_y[e],
        )
        if members:
            center = sum(default_y[e] for e in members) / len(members)
            for j, e in enumerate(members):
                y = center + (j - (len(members) - 1) / 2.0) * config.slot_height
                lifelines[e].anchors.append((x, y))
            y_low = center - (len(members) - 1) / 2.0 * config.slot_height
            y_high = center + (len(members) - 1) / 2.0 * config.slot_height
        else:
            y_low = y_high = fallback_y
        half_w = config.scene_gap * config.rect_width_factor / 2.0
        pad = config.slot_height / 2.0
        scene_rects.append(
            {
                "scene_index": scene.scene_index,
                "x0": x - half_w,
                "y0": y_low - pad,
                "x1": x + half_w,
                "y1": y_high + pad,
            }
        )

    indicator_row = [
        {"x": scene.scene_index * config.scene_gap, "shade": scene.shade}
        for scene in scenes
    ]
    ordered_lifelines = [lifelines[e] for c in communities for e in band_members[c]]
    return StorylineLayout(
        granularity=scenes[0].granularity if scenes else PARAGRAPH,
        scenes=scenes,
        lifelines=ordered_lifelines,
        scene_rects=scene_rects,
        section_separators=[],
        indicator_row=indicator_row,
        config=config,
    )


def section_boundaries(document, scenes: list[Scene], config: LayoutConfig | None = None) -> list[dict]:
    """One separator before the first scene of each section that has scenes."""
    config = config or LayoutConfig()
    sentence_paragraph = {
        s.sentence_index: s.paragraph_index for s in document.sentences()
    }
    separators = []
    for section in document.sections:
        first = None
        for scene in scenes:
            paragraph = (
                scene.source_ref
                if scene.granularity == PARAGRAPH
                else sentence_paragraph.get(scene.source_ref)
            )
            if paragraph is not None and section.paragraph_start <= paragraph < section.paragraph_end:
                first = scene
                break
        if first is not None:
            separators.append(
                {
                    "scene_index": first.scene_index,
                    "x": first.scene_index * config.scene_gap - config.scene_gap / 2.0,
                    "title": section.title,
                }
            )
    return separators


def layout_to_json(full: StorylineLayout) -> dict:
    """The published, versioned layout wire format."""
    return {
        "version": LAYOUT_SCHEMA_VERSION,
        "granularity": full.granularity,
        "scenes": [
            {
                "i": s.scene_index,
                "ref": s.source_ref,
                "entities": sorted(s.entity_ids),
                "shade": s.shade,
                "rect": [r["x0"], r["y0"], r["x1"], r["y1"]],
            }
            for s, r in zip(full.scenes, full.scene_rects)
        ],
        "lifelines": [
            {
                "entity": l.entity_id,
                "color": l.color,
                "width": l.width,
                "anchors": [[x, y] for x, y in l.anchors],
            }
            for l in full.lifelines
        ],
        "separators": [
            {"x": sep["x"], "title": sep["title"]} for sep in full.section_separators
        ],
        "indicators": [
            {"x": ind["x"], "shade": ind["shade"]} for ind in full.indicator_row
        ],
    }
