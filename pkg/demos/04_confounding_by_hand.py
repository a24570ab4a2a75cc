"""
Where the six confounded degrees of freedom come from
=====================================================

The subtraction method assumes each object's new degrees of freedom
are orthogonal to everything else. Project the indicator matrices and
check.
"""

import numpy as np

import designhasse as dh
from designhasse.confound import rank, residual_df_rank

layout = dh.build_layout(dh.splitplot_design().table)

# indicator matrices: units x levels, one 1 per row
X = {o.name: o.partition.indicator() for o in layout.objects}
print({k: v.shape for k, v in list(X.items())[:5]})

# subtraction claims this many df above the leaves...
claimed = sum(o.df for o in layout.objects if o.id != layout.finest_id)
# ...but the objects only span this much of R^36
spanned = rank(np.hstack([X[o.name] for o in layout.objects if o.id != layout.finest_id]))
print("claimed", claimed, "spanned", spanned, "overlap", claimed - spanned)

# per object: the part of its column space not explained by coarser objects
for o in layout.objects[1:]:
    r = residual_df_rank(o.id, layout)
    print(f"{o.name:22s} subtraction={o.df:3d} rank={r.df_rank:3d}")
