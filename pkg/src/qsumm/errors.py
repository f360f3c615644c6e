"""Exception types raised across the toolkit."""


class QsummError(Exception):
    """Base class; the CLI maps these to exit code 1."""


class EmptyCorpus(QsummError):
    pass


class EmptyReferenceSet(QsummError):
    pass


class DegenerateAbstract(QsummError):
    """The reference abstract has no in-vocabulary stems after pre-processing."""


class InvalidHyperparameter(QsummError, ValueError):
    pass


class SingleClassTraining(QsummError):
    pass


class DimensionMismatch(QsummError, ValueError):
    pass


class TooFewQuestions(QsummError):
    pass


class FoldMismatch(QsummError):
    pass


class FileUnreadable(QsummError):
    pass


class NotBioasqShape(QsummError):
    pass


class InvalidParameters(QsummError, ValueError):
    pass
