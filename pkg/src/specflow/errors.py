"""Exception hierarchy.

Every numerical failure raised by the package derives from
:class:`SpecflowError`, so callers (and the CLI) can separate numerical
trouble from programming errors with a single ``except`` clause.
"""


class SpecflowError(Exception):
    """Base class for all numerical failures."""


class HermiticityError(SpecflowError, ValueError):
    pass


class DimensionMismatchError(SpecflowError, ValueError):
    pass


class ConvergenceError(SpecflowError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SpectralPointError(SpecflowError):
    """A resolvent was requested at (or too close to) an eigenvalue."""

    def __init__(self, z, nearest):
        super().__init__(f"spectral point: z={z} is within tolerance of eigenvalue {nearest!r}")
        self.z = z
        self.nearest = nearest


class RadiusExceededError(SpecflowError):
    def __init__(self, distance, radius):
        super().__init__(
            f"radius exceeded: |z - z0| = {distance:.6g} is not below the "
            f"convergence radius 1/||R(z0)|| = {radius:.6g}"
        )
        self.distance = distance
        self.radius = radius


class CayleyRangeError(SpecflowError):
    def __init__(self, smallest_singular_value):
        super().__init__(
            "not in Cayley range: 1 is (numerically) an eigenvalue of U, "
            f"smallest singular value of I - U is {smallest_singular_value:.3e}"
        )
        self.smallest_singular_value = smallest_singular_value


class EndpointInSpectrumError(SpecflowError):
    def __init__(self, endpoint, eigenvalue):
        super().__init__(f"endpoint in spectrum: window edge {endpoint!r} hits eigenvalue {eigenvalue!r}")
        self.endpoint = endpoint
        self.eigenvalue = eigenvalue


class ContourNearSpectrumError(SpecflowError):
    def __init__(self, eigenvalue, distance):
        super().__init__(
            f"contour near spectrum: eigenvalue {eigenvalue!r} lies {distance:.3e} from the contour"
        )
        self.eigenvalue = eigenvalue
        self.distance = distance


class QuadratureStagnationError(SpecflowError):
    def __init__(self, nodes, distance):
        super().__init__(
            f"quadrature stagnation: {nodes} nodes reached, last two iterates differ by {distance:.3e}"
        )
        self.nodes = nodes
        self.distance = distance


class PartitionFailure(SpecflowError):
    def __init__(self, left, right, reason="no admissible window radius"):
        super().__init__(f"partition failure on [{left!r}, {right!r}]: {reason}")
        self.interval = (left, right)


class CertificateInvalid(SpecflowError):
    pass


class PathDiscontinuityError(SpecflowError):
    def __init__(self, left, right, distance, budget):
        super().__init__(
            f"path not demonstrably continuous on [{left!r}, {right!r}]: "
            f"gap distance {distance:.3e} exceeds budget {budget:.3e}"
        )
        self.interval = (left, right)
        self.distance = distance


class TrackingAmbiguityError(SpecflowError):
    def __init__(self, left, right):
        super().__init__(f"tracking ambiguity on [{left!r}, {right!r}]: step control cannot be satisfied")
        self.interval = (left, right)


class DegenerateEndpointError(SpecflowError):
    def __init__(self, t, eigenvalue):
        super().__init__(
            f"degenerate endpoint at t={t!r}: eigenvalue {eigenvalue!r} is numerically zero "
            "(the Morse oracle needs invertible endpoints; use sfl_partition)"
        )
        self.t = t
        self.eigenvalue = eigenvalue


class EndpointMismatchError(SpecflowError):
    def __init__(self, distance):
        super().__init__(f"endpoint mismatch: paths differ by {distance:.3e} at the joint")
        self.distance = distance


class CrossingClusterError(SpecflowError):
    def __init__(self, t, detail=""):
        msg = f"crossing cluster near t={t!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg + "; perturb the path (see regularize)")
        self.t = t


class DerivativeUnavailableError(SpecflowError):
    pass


class IrregularCrossingError(SpecflowError):
    def __init__(self, t):
        super().__init__(f"irregular crossing at t={t!r}; regularize the path first")
        self.t = t


class RegularizationFailed(SpecflowError):
    pass


class BoundaryDegenerateError(SpecflowError):
    def __init__(self, s, t, eigenvalue):
        super().__init__(
            f"boundary degenerate: h(s={s!r}, t={t!r}) has eigenvalue {eigenvalue!r} within tolerance of 0"
        )
        self.s = s
        self.t = t


class DescriptorError(SpecflowError, ValueError):
    """Malformed matrix or path descriptor."""
