"""Exception types shared across the package."""


class KuramotoMomentsError(Exception):
    """Base class for all errors raised by this package."""

    category = "error"


class MomentsDoNotExistError(KuramotoMomentsError, ValueError):
    """A frequency law without finite absolute moments was used."""

    category = "measure"

    def __init__(self, law, order=None):
        detail = f" (order {order} diverges)" if order is not None else ""
        super().__init__(f"moments do not exist for {law!r}{detail}")
        self.law = law
        self.order = order


class DegenerateMeasureError(KuramotoMomentsError, ValueError):
    """L^2(g) is too small for the requested number of orthonormal polynomials."""

    category = "measure"


class UnsupportedOperationError(KuramotoMomentsError):
    category = "unsupported"


class NonFiniteStateError(KuramotoMomentsError, FloatingPointError):
    """The integrated state acquired a NaN or infinity."""

    category = "numerical"

    def __init__(self, step, index=None, time=None):
        where = f" at node {index}" if index is not None else ""
        when = f" (t={time:.6g})" if time is not None else ""
        super().__init__(f"non-finite state at step {step}{where}{when}")
        self.step = step
        self.index = index
        self.time = time


class LatticeBlowUpError(KuramotoMomentsError, FloatingPointError):
    """A truncated moment lattice left the region |Z| <= bound."""

    category = "numerical"

    def __init__(self, time, value, bound):
        super().__init__(
            f"moment lattice blew up at t={time:.6g}: max|Z|={value:.3g} > {bound:g}; "
            "the truncation is too coarse for this run"
        )
        self.time = time
        self.value = value
        self.bound = bound


class ConfigError(KuramotoMomentsError, ValueError):
    category = "config"
