"""Exception hierarchy shared by all symptomlab modules.

Three families map onto the CLI exit codes: UsageError-style problems are
handled by click itself (exit 1), DataError maps to exit 2, and
NumericalError maps to exit 3.
"""


class SymptomLabError(Exception):
    """Base class for all symptomlab errors."""


class DataError(SymptomLabError):
    """Problems with input data: files, records, labels, infeasible specs."""


class NumericalError(SymptomLabError):
    """Numerical failures: bad factorizations, divergence, shape mismatches."""


# --- numerical substrate ---

class DimensionMismatch(NumericalError):
    pass


class NonSymmetric(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class NonFiniteLoss(NumericalError):
    pass


class InvalidConfig(NumericalError):
    pass


# --- corpus / dataset ---

class MissingFile(DataError):
    pass


class EmptyRecord(DataError):
    pass


class MalformedRow(DataError):
    pass


class DuplicateSeverityEntry(DataError):
    pass


class OutOfVocabularySymptom(DataError):
    pass


class FractionOutOfRange(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class KOutOfRange(DataError):
    pass


class InfeasibleSpec(DataError):
    pass


# --- network / clustering ---

class ZeroVector(DataError):
    pass


class ZeroRow(DataError):
    pass


class EmptySubset(DataError):
    pass


class SingleCluster(DataError):
    pass


# --- evaluation / reporting ---

class LabelOutOfRange(DataError):
    pass


class EmptyMatrix(DataError):
    pass


class IoFailure(DataError):
    pass
