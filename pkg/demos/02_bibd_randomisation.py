"""
From layout to restricted layout: a balanced incomplete block design
====================================================================

Six wheat varieties in ten blocks of three plots. Varieties were
randomised to plots within blocks, and that single arrow is enough
to pick out the restricted layout structure and a mixed model.
"""

from pathlib import Path

import designhasse as dh
from designhasse.rls import plan_template

OUT = Path(__file__).parent / "_output"
OUT.mkdir(exist_ok=True)

layout = dh.build_layout(dh.bibd_6_10_3().table)

# the plan template a user fills in by hand
print(plan_template(layout))

# or let Rules 1-4 propose the objects from the arrow
suggested = dh.suggest_rls_objects(layout, [("Varieties", "Plots[Blocks]")])
for s in suggested.values():
    print(layout.objects[s.object_id].name, "->", s.label, "(rule", s.rule, ")")

# arrow 3 -> 4 in the numbering of the template
plan = dh.suggestion_plan(layout, suggested, arrows=[(2, 3)])
rls = dh.build_rls(layout, plan)

print(dh.rls_relation_table(rls))
print(dh.model_equation(rls).format())

(OUT / "bibd_rls.svg").write_text(dh.emit_svg(dh.layout_diagram(rls)), encoding="utf-8")
(OUT / "bibd_rls.dot").write_text(dh.emit_dot(dh.layout_diagram(rls)), encoding="utf-8")
