"""Exception hierarchy shared by every module in the package."""


class TreeWassError(ValueError):
    """Base class for all validation and solver errors raised here."""


class CycleDetected(TreeWassError):
    pass


class Disconnected(TreeWassError):
    pass


class NonPositiveWeight(TreeWassError):
    pass


class UnknownRoot(TreeWassError):
    pass


class UnknownVertex(TreeWassError, KeyError):
    def __str__(self) -> str:
        return ValueError.__str__(self)


class NegativeMass(TreeWassError):
    pass


class NotNormalized(TreeWassError):
    pass


class UnmappedPoint(TreeWassError, KeyError):
    def __str__(self) -> str:
        return ValueError.__str__(self)


class MassLeak(TreeWassError, RuntimeError):
    """Internal audit failure: mass was created or destroyed by a sweep."""


class TooLarge(TreeWassError):
    pass


class InfeasibleMarginals(TreeWassError):
    pass


class InvalidMetric(TreeWassError):
    pass


class SinglePoint(TreeWassError):
    pass


class NonContractionViolated(TreeWassError):
    def __init__(self, component: int, pair: tuple, tree_distance, distance):
        self.component = component
        self.pair = pair
        self.tree_distance = tree_distance
        self.distance = distance
        super().__init__(
            f"component {component} contracts pair {pair}: "
            f"tree distance {tree_distance} < source distance {distance}"
        )


class EmptyMetric(TreeWassError):
    pass
