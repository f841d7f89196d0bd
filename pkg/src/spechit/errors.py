"""Exception taxonomy shared across the package."""


class SpechitError(Exception):
    """Base class for all library errors."""


# --- chain construction / validation ---

class NotStochastic(SpechitError):
    """A row of the transition matrix does not sum to one (or has negative entries)."""


class NotIrreducible(SpechitError):
    """The transition matrix has more than one communicating class."""


class DimensionTooSmall(SpechitError):
    """Fewer than two states."""


class InvalidChainFile(SpechitError):
    """A chain JSON file is malformed or internally inconsistent."""


# --- subsets and restrictions ---

class EmptySubset(SpechitError):
    pass


class FullSubset(SpechitError):
    pass


class EnumerationTooLarge(SpechitError):
    """State count exceeds the exhaustive-enumeration cap."""


class ReducibleRestriction(SpechitError):
    """The restriction P_B is reducible (B is not connected)."""


# --- spectral ---

class NotReversible(SpechitError):
    pass


class DegenerateEigenfunction(SpechitError):
    """No strictly positive part under either sign choice (defensive; cannot
    occur for an irreducible reversible chain)."""


# --- generators ---

class TooSmall(SpechitError):
    pass


class BadParameter(SpechitError):
    pass


class Disconnected(SpechitError):
    pass


class NotAPartition(SpechitError):
    """Birth-death rate vectors do not sum to one per state."""


class ZeroRate(SpechitError):
    """A birth or death rate required for irreducibility is zero."""


class ConstructionFailed(SpechitError):
    """Randomized construction exhausted its rejection budget."""


# --- time ---

class NegativeTime(SpechitError):
    pass


# --- hitting / linear solves ---

class SingularSystem(SpechitError):
    """Hitting-time linear system is singular (defensive; cannot occur for
    irreducible chains)."""


# --- geometric ---

class StationarityMismatch(SpechitError):
    """Supplied kernel does not have the chain's stationary distribution."""


class NoUpperBracket(SpechitError):
    """Bisection could not bracket the target norm level (defensive)."""


# --- level sets ---

class EmptyLevelSet(SpechitError):
    pass


class NoRoot(SpechitError):
    """The level scan found no root; would contradict the super-level-set lemma."""


# --- birth-death ---

class NotBirthDeath(SpechitError):
    """Transition matrix is not tridiagonal."""


# --- monte carlo ---

class CapSaturated(SpechitError):
    """More than the allowed fraction of trajectories hit the step cap."""


class InsufficientSurvival(SpechitError):
    """Too few surviving trajectories to estimate a decay rate."""


# --- harness ---

class ConfigInvalid(SpechitError):
    pass


class IOFailure(SpechitError):
    pass
