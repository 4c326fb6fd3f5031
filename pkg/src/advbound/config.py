"""Shared defaults: seed and tolerances used across the package."""

# The token "ADV0" read as a base-36 integer.
DEFAULT_SEED = int("ADV0", 36)

# Largest group stored as an explicit element list; operations that need a
# full sum over the group refuse above this size.
MAX_GROUP_ORDER = 50_000

# Hermiticity: symmetrize silently below this asymmetry, warn above.
HERMITICITY_WARN = 1e-9
# Relative eigenvalue gap below which two eigenvalues count as degenerate.
EIG_CLUSTER_RTOL = 1e-8
# Joint statevector dimension guard for the simulator.
MAX_JOINT_DIM = 2_000_000
# Tensor-power family size guard.
MAX_PRODUCT_FAMILY = 20_000
