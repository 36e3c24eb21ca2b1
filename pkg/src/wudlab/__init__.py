"""Empirical toolkit for weak uniform distribution of polynomially-defined
multiplicative functions in coprime residue classes.

Subpackages cover modular arithmetic foundations, integer polynomials,
local root densities, Dirichlet characters mod odd prime powers, exact
tuple counts, a segmented multiplicative sieve, and an experiment layer
with a CLI (``wudlab``).
"""

from wudlab.errors import ConsistencyError, GuardExceededError, InvalidConfigError

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "GuardExceededError",
    "InvalidConfigError",
    "__version__",
]
