"""Exception hierarchy shared by every stage of the pipeline."""


class RiccatiPhonemeError(Exception):
    """Base class for all errors raised by this package."""


# audio ingestion / synthesis
class MalformedHeader(RiccatiPhonemeError, ValueError):
    pass


class UnsupportedFormat(RiccatiPhonemeError, ValueError):
    pass


class RateTooLow(RiccatiPhonemeError, ValueError):
    pass


class InvalidSpec(RiccatiPhonemeError, ValueError):
    pass


class SignalTooShort(RiccatiPhonemeError, ValueError):
    pass


# spectra
class NotPowerOfTwo(RiccatiPhonemeError, ValueError):
    pass


class EmptyInput(RiccatiPhonemeError, ValueError):
    pass


class MismatchedShape(RiccatiPhonemeError, ValueError):
    pass


class SpectrumTooNarrow(RiccatiPhonemeError, ValueError):
    pass


class EmptyChannel(RiccatiPhonemeError, ValueError):
    pass


class ZeroVector(RiccatiPhonemeError, ValueError):
    pass


# network
class DimensionMismatch(RiccatiPhonemeError, ValueError):
    pass


class Divergence(RiccatiPhonemeError, ArithmeticError):
    """Integration produced NaN or Inf; usually ``dt`` is too large."""


class EmptyNetwork(RiccatiPhonemeError, ValueError):
    pass


class GammaViolation(RiccatiPhonemeError, ValueError):
    """A training pattern has a component below the gamma floor."""


# partition
class EmptyAtom(RiccatiPhonemeError, ValueError):
    pass


class SingleClass(RiccatiPhonemeError, ValueError):
    pass


class UnassignableNeuron(RiccatiPhonemeError, ValueError):
    """The winning neuron's weights do not sit inside any atom's cell."""


# verification
class PreconditionViolated(RiccatiPhonemeError):
    """Raised in strict mode when a theorem check runs outside its hypotheses.

    The offending report is attached as ``report`` so callers can still
    inspect the numbers.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ManifestError(RiccatiPhonemeError, ValueError):
    """A JSON-lines manifest could not be parsed; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
