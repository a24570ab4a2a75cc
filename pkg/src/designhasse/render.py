"""Tiered Hasse diagram geometry, with SVG and DOT emitters.

Geometry is computed once from the structure and never depends on the
show_* toggles. The toggles only decide which element classes are
written, so switching one off leaves every other element where it was.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from xml.sax.saxutils import escape, quoteattr

from .layout import LayoutStructure
from .relations import Relationship, classify
from .rls import RestrictedLayoutStructure

BASE_FONT = 12.0
LINE_GAP = 15.0
ROW_HEIGHT = 110.0
MARGIN = 30.0
CHAR_WIDTH = 0.62  # rough advance width per character, in ems


@dataclass(frozen=True)
class StyleConfig:
    show_partial: bool = True
    show_df: bool = True
    show_max_levels: bool = True
    monochrome: bool = False
    structural_colour: str = "grey"
    partial_colour: str = "orange"
    object_colour: str = "mediumblue"
    df_colour: str = "red"
    arrow_colour: str = "mediumblue"
    structural_width: float = 2.0
    partial_width: float = 1.5
    arrow_width: float = 1.5
    arrow_pos: float = 7.5
    font_family: str = "sans"
    larger_font: float = 1.0
    middle_font: float = 1.0
    smaller_font: float = 1.0

    def __post_init__(self):
        for name in ("structural_width", "partial_width", "arrow_width", "arrow_pos",
                     "larger_font", "middle_font", "smaller_font"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.monochrome:
            for name in ("structural_colour", "partial_colour", "object_colour",
                         "df_colour", "arrow_colour"):
                object.__setattr__(self, name, "black")

    def font_size(self, font_class: str) -> float:
        mult = {"larger": self.larger_font, "middle": self.middle_font,
                "smaller": self.smaller_font}[font_class]
        return BASE_FONT * mult


@dataclass(frozen=True)
class Node:
    object_id: int
    tier: int
    slot: int
    x: float
    y: float
    name: str
    underline: bool
    levels: str
    max_levels: str | None
    df: str
    font_class: str


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    x1: float
    y1: float
    x2: float
    y2: float


@dataclass(frozen=True)
class DiagramSpec:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    dotted: tuple[Edge, ...]
    arrows: tuple[Edge, ...]
    width: float
    height: float
    style: StyleConfig = field(default_factory=StyleConfig)
    self_randomised: tuple[int, ...] = ()

    def node(self, object_id: int) -> Node:
        for n in self.nodes:
            if n.object_id == object_id:
                return n
        raise KeyError(object_id)


def _font_class(tier_size: int, merged: bool) -> str:
    if merged:
        return "middle"
    return "larger" if tier_size <= 4 else "smaller"


def _text_width(text: str, size: float) -> float:
    return len(text) * size * CHAR_WIDTH


def layout_diagram(structure: LayoutStructure | RestrictedLayoutStructure,
                   style: StyleConfig | None = None) -> DiagramSpec:
    """Place every object on its tier; build solid, dotted and arrow edges."""
    style = style or StyleConfig()
    if isinstance(structure, RestrictedLayoutStructure):
        layout = structure.layout
        ids = list(structure.ids)
        names = dict(structure.labels)
        df = dict(structure.df)
        tiers = dict(structure.tiers)
        cover = list(structure.cover_edges)
        arrows = [(a, b) for a, b in structure.arrows if a != b]
        loops = tuple(a for a, b in structure.arrows if a == b)
    else:
        layout = structure
        ids = [o.id for o in layout.objects]
        names = {o.id: o.display_label for o in layout.objects}
        df = {o.id: o.df for o in layout.objects}
        tiers = {o.id: o.tier for o in layout.objects}
        cover = list(layout.cover_edges)
        arrows, loops = [], ()

    by_tier: dict[int, list[int]] = {}
    for i in ids:
        by_tier.setdefault(tiers[i], []).append(i)

    # one cell width for the whole diagram, sized from the fullest text
    # (including max-levels) so toggles never move anything
    texts = {}
    widest = 40.0
    for i in ids:
        o = layout.objects[i]
        fc = _font_class(len(by_tier[tiers[i]]), bool(o.merged) and not o.is_mean)
        size = BASE_FONT * max(style.larger_font, style.middle_font, style.smaller_font)
        mx = o.potential_max_levels if len(o.factor_set) >= 2 else None
        lev = str(o.n_levels)
        full = lev + (f" ({mx})" if mx is not None else "")
        texts[i] = (fc, lev, None if mx is None else f" ({mx})")
        widest = max(widest, _text_width(names[i], size), _text_width(full, size))
    cell = widest + 24.0
    n_tiers = max(by_tier) + 1 if by_tier else 1
    width = 2 * MARGIN + cell * max(len(v) for v in by_tier.values())
    height = 2 * MARGIN + ROW_HEIGHT * (n_tiers - 1) + 2 * LINE_GAP + BASE_FONT

    nodes = []
    for t in sorted(by_tier):
        row = by_tier[t]
        start = (width - cell * len(row)) / 2 + cell / 2
        for slot, i in enumerate(row):
            o = layout.objects[i]
            fc, lev, mx = texts[i]
            nodes.append(Node(
                object_id=i, tier=t, slot=slot,
                x=round(start + slot * cell, 1),
                y=round(MARGIN + BASE_FONT + t * ROW_HEIGHT, 1),
                name=names[i], underline=o.is_random,
                levels=lev, max_levels=mx, df=str(df[i]), font_class=fc,
            ))
    pos = {n.object_id: n for n in nodes}

    def edge(a: int, b: int) -> Edge:
        na, nb = pos[a], pos[b]
        return Edge(a, b, na.x, round(na.y + 2 * LINE_GAP + 6, 1), nb.x, round(nb.y - BASE_FONT - 4, 1))

    edges = tuple(edge(a, b) for a, b in sorted(cover))
    dotted = []
    if style.show_partial:
        for k, a in enumerate(ids):
            for b in ids[k + 1:]:
                pa, pb = layout.objects[a].partition, layout.objects[b].partition
                if classify(pa, pb) is Relationship.PARTIALLY_CROSSED:
                    dotted.append(edge(a, b) if tiers[a] <= tiers[b] else edge(b, a))
    return DiagramSpec(
        nodes=tuple(nodes),
        edges=edges,
        dotted=tuple(dotted),
        arrows=tuple(edge(a, b) for a, b in arrows),
        width=round(width, 1),
        height=round(height, 1),
        style=style,
        self_randomised=loops,
    )


def _f(v: float) -> str:
    return f"{v:.1f}"


def _arrow_path(e: Edge, arrow_pos: float) -> str:
    # bow the arrow sideways so it does not sit on top of a structural edge,
    # and stop short of the target by 1/arrow_pos of the run
    t = 1.0 - 1.0 / arrow_pos
    x2 = e.x1 + (e.x2 - e.x1) * t
    y2 = e.y1 + (e.y2 - e.y1) * t
    cx = (e.x1 + x2) / 2 + 0.15 * (y2 - e.y1)
    cy = (e.y1 + y2) / 2 - 0.15 * (x2 - e.x1)
    return f"M {_f(e.x1)} {_f(e.y1)} Q {_f(cx)} {_f(cy)} {_f(x2)} {_f(y2)}"


def emit_svg(spec: DiagramSpec, style: StyleConfig | None = None) -> str:
    """SVG 1.1 text. Same spec and style in, same bytes out."""
    s = style or spec.style
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(spec.width)}" '
        f'height="{_f(spec.height)}" viewBox="0 0 {_f(spec.width)} {_f(spec.height)}" '
        f'font-family={quoteattr(s.font_family)}>',
    ]
    if spec.arrows:
        out += [
            "<defs>",
            f'<marker id="arrowhead" markerWidth="10" markerHeight="8" refX="9" refY="4" '
            f'orient="auto" markerUnits="strokeWidth">',
            f'<polygon points="0 0, 10 4, 0 8" fill="{s.arrow_colour}"/>',
            "</marker>",
            "</defs>",
        ]
    for e in spec.edges:
        out.append(f'<line class="structural" x1="{_f(e.x1)}" y1="{_f(e.y1)}" x2="{_f(e.x2)}" '
                   f'y2="{_f(e.y2)}" stroke="{s.structural_colour}" stroke-width="{s.structural_width}"/>')
    if s.show_partial:
        for e in spec.dotted:
            out.append(f'<line class="partial" x1="{_f(e.x1)}" y1="{_f(e.y1)}" x2="{_f(e.x2)}" '
                       f'y2="{_f(e.y2)}" stroke="{s.partial_colour}" stroke-width="{s.partial_width}" '
                       f'stroke-dasharray="2 4"/>')
    for e in spec.arrows:
        out.append(f'<path class="arrow" d="{_arrow_path(e, s.arrow_pos)}" fill="none" '
                   f'stroke="{s.arrow_colour}" stroke-width="{s.arrow_width}" '
                   f'marker-end="url(#arrowhead)"/>')
    for n in spec.nodes:
        size = _f(s.font_size(n.font_class))
        deco = ' text-decoration="underline"' if n.underline else ""
        out.append(f'<text class="object" x="{_f(n.x)}" y="{_f(n.y)}" text-anchor="middle" '
                   f'font-size="{size}" fill="{s.object_colour}"{deco}>{escape(n.name)}</text>')
        y = _f(n.y + LINE_GAP)
        lev = escape(n.levels)
        if s.show_max_levels and n.max_levels:
            lev += f'<tspan class="maxlevels">{escape(n.max_levels)}</tspan>'
        out.append(f'<text class="levels" x="{_f(n.x)}" y="{y}" text-anchor="middle" '
                   f'font-size="{size}" fill="{s.object_colour}">{lev}</text>')
        if s.show_df:
            out.append(f'<text class="df" x="{_f(n.x)}" y="{_f(n.y + 2 * LINE_GAP)}" '
                       f'text-anchor="middle" font-size="{size}" fill="{s.df_colour}">'
                       f'{escape(n.df)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_dot(spec: DiagramSpec) -> str:
    """Graphviz digraph: one node per object, one rank=same group per tier."""
    s = spec.style
    out = ["digraph hasse {", "  rankdir=TB;", "  node [shape=plaintext];"]
    for n in spec.nodes:
        name = escape(n.name)
        lines = [f"<U>{name}</U>" if n.underline else name,
                 escape(n.levels + (n.max_levels if s.show_max_levels and n.max_levels else ""))]
        if s.show_df:
            lines.append(f'<FONT COLOR="{s.df_colour}">{escape(n.df)}</FONT>')
        out.append(f'  n{n.object_id} [label=<{"<BR/>".join(lines)}>, fontcolor="{s.object_colour}"];')
    for t in sorted({n.tier for n in spec.nodes}):
        members = " ".join(f"n{n.object_id};" for n in spec.nodes if n.tier == t)
        out.append(f"  {{ rank=same; {members} }}")
    for e in spec.edges:
        out.append(f'  n{e.a} -> n{e.b} [style=solid, dir=none, color="{s.structural_colour}", '
                   f"penwidth={s.structural_width}];")
    if s.show_partial:
        for e in spec.dotted:
            out.append(f'  n{e.a} -> n{e.b} [style=dotted, dir=none, constraint=false, '
                       f'color="{s.partial_colour}", penwidth={s.partial_width}];')
    for e in spec.arrows:
        out.append(f'  n{e.a} -> n{e.b} [style=solid, dir=forward, constraint=false, '
                   f'color="{s.arrow_colour}", penwidth={s.arrow_width}];')
    out.append("}")
    return "\n".join(out) + "\n"


def with_toggles(style: StyleConfig, **toggles) -> StyleConfig:
    return replace(style, **toggles)
