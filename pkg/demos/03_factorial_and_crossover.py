"""
Equivalent factors: a 2^4 factorial and a three-period crossover
================================================================
"""

import designhasse as dh

# A single replicate of a 2^4 factorial. The run index says nothing the
# four treatment factors do not already say together.
fac = dh.build_layout(dh.factorial_2p4().table)
print(len(fac.objects), "objects, total df", sum(o.df for o in fac.objects))
print("finest:", fac.finest.display_label)

# Style toggles: drop the partial-crossing lines, they clutter a factorial.
style = dh.StyleConfig(show_partial=False)
svg = dh.emit_svg(dh.layout_diagram(fac, style))
print("dotted lines drawn:", svg.count('class="partial"'))

# In the crossover Observation is declared fixed, but it coincides with a
# grouping that involves the random Subject factor, so it becomes random.
cross = dh.build_layout(dh.crossover_design().table)
for d in cross.diagnostics:
    print(d)

suggested = dh.suggest_rls_objects(
    cross, [("Sequence", "Subject"), ("Treatment", "Period^Sequence")])
rls = dh.build_rls(cross, dh.suggestion_plan(cross, suggested))
print(dh.model_equation(rls).format())
