"""Exception types shared across the package."""


class ModelError(ValueError):
    """A model document failed schema or topology validation.

    ``path`` names the offending field, e.g. ``muscles[3].path[0].body``.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class SimulationDiverged(RuntimeError):
    """A state entry blew past the divergence guard.

    ``coordinate`` names the offending entry (e.g. ``qdot[4]``) and
    ``value`` holds its magnitude at the time of the blow-up.
    """

    def __init__(self, coordinate, value):
        self.coordinate = coordinate
        self.value = value
        super().__init__(f"simulation diverged: |{coordinate}| = {value:g}")


class EpisodeProtocolError(RuntimeError):
    """reset/step called out of order (e.g. step after done)."""


class AnalysisError(ValueError):
    """A trajectory log does not contain enough signal to analyze."""
