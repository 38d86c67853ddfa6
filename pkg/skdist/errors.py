"""Exception types raised by skdist.

Every error is a ``ValueError`` so callers that only care about bad input can
catch that single type.
"""

from skdist.types import Symbol


class DistributionError(ValueError):
    pass


class NormalizationError(DistributionError):
    def __init__(self, deviation: float) -> None:
        self.deviation = deviation
        super().__init__(
            f"probabilities must sum to 1 (deviation {deviation:.12g})"
        )


class NegativeProbabilityError(DistributionError):
    def __init__(self, index: tuple[int, ...], value: float) -> None:
        self.index = index
        self.value = value
        super().__init__(f"negative probability {value:g} at index {index}")


class ZeroWeightError(DistributionError):
    def __init__(self, symbol: Symbol) -> None:
        self.symbol = symbol
        super().__init__(f"conditioning event z={symbol!r} has zero probability")


class AlphabetMismatchError(DistributionError):
    pass


class EmptySupportError(DistributionError):
    pass


class ProductAlphabetError(DistributionError):
    pass


class ChannelError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class ReductionFailedError(ValueError):
    def __init__(self, best_value: float, baseline: float) -> None:
        self.best_value = best_value
        self.baseline = baseline
        super().__init__(
            "no epsilon in the search grid lowers I(X:Y|Z) "
            f"(baseline {baseline:.12g}, best {best_value:.12g})"
        )


class SimulationSizeError(ValueError):
    pass


class DistributionFileError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        self.message = message
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class CorpusError(ValueError):
    pass
