# # Checking the chains exactly on a tiny graph
#
# For a handful of edges the whole state space can be listed. From it we
# build the exact transition matrices of both chains and check them without
# any sampling noise.

from ccmsampler import ColoredMultigraph
from ccmsampler.oracle import (
    enumerate_states, exact_transition_matrices, scaling_residual, report_json, verify_chain,
)

g = ColoredMultigraph([0, 0, 0, 1, 1, 1],
                      [(0, 1), (1, 2), (0, 3), (1, 4), (2, 5), (3, 4), (4, 5)])
atlas = enumerate_states(g)
print(len(atlas), "graphs share this colored degree matrix")

# Rational arithmetic makes the comparisons exact.

mats = exact_transition_matrices(atlas, exact=True)
print("theta =", mats.theta)
print("largest deviation of P_B from theta * P:", scaling_residual(mats))

# The report collects irreducibility, aperiodicity, detailed balance and the
# spectral gap of both lazy chains.

report = verify_chain(atlas, mats)
print(report_json({k: report[k] for k in ("irreducible", "period", "slem_lazy_P", "slem_lazy_P_B", "ok")}))

# ## Where the scaling breaks
#
# With two monochromatic classes of different sizes, drawing the first edge
# uniformly favors the larger class less than the baseline does, and the
# entrywise relation between the two matrices no longer holds. Weighting the
# classes by their number of pairs restores it.

h = ColoredMultigraph([0, 0, 0, 1, 1, 1],
                      [(0, 1), (1, 2), (0, 0), (3, 4), (4, 5), (3, 5), (3, 3)])
a = enumerate_states(h)
print("edge weighting:", scaling_residual(exact_transition_matrices(a, exact=True)))
print("pair weighting:", scaling_residual(exact_transition_matrices(a, exact=True, class_weighting="pair")))
