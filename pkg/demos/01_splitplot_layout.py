"""
The layout structure of a split-plot in a row-column design
============================================================

Thirty-six leaves on twelve plants, three benches, three leaf layers.
Soils went to plants, treatments to leaves. Before any randomisation
is accounted for, which factors nest, cross, or coincide?
"""

from pathlib import Path

import designhasse as dh

OUT = Path(__file__).parent / "_output"
OUT.mkdir(exist_ok=True)

fx = dh.splitplot_design()
print(fx.provenance)
print(fx.to_csv().splitlines()[:4])

# every combination of factors gives a partition of the leaves; equal
# partitions collapse to one structural object
layout = dh.build_layout(fx.table)
print(len(layout.objects), "structural objects")

# Plant is the same grouping as Bench^Soil, and Leaf is the finest grouping
print(layout.find("Plant").display_label)
print(layout.find("Leaf").display_label)

print(dh.relation_table(layout))

# df by subtraction; the finest object goes negative, a hint that
# something is over-counted further up
for o in layout.objects:
    print(f"{o.name:22s} levels={o.n_levels:3d} df={o.df:3d}")

report = dh.detect_confounding(layout)
print(report.format())

svg = dh.emit_svg(dh.layout_diagram(layout))
(OUT / "splitplot_layout.svg").write_text(svg, encoding="utf-8")
