"""Exception hierarchy shared by all weil_charge modules."""


class WeilChargeError(Exception):
    """Base class for all library errors."""


class MeshError(WeilChargeError):
    """Invalid or unsupported mesh input."""


class NonOrientable(MeshError):
    """Face orientations cannot be made globally consistent."""


class NonManifoldEdge(MeshError):
    """An edge is shared by more than two faces."""


class OpenChain(MeshError):
    """Boundary edges do not form closed simple loops."""


class FieldError(WeilChargeError):
    """Invalid sampled field data."""


class ZeroOnVertex(FieldError):
    """Section norm at a vertex is below the zero tolerance."""

    def __init__(self, vertex, norm=0.0):
        self.vertex = vertex
        self.norm = norm
        super().__init__(f"section vanishes at vertex {vertex} (norm={norm:g})")


class MissingEdgeData(FieldError):
    """Connection value requested on an edge that carries no sample."""

    def __init__(self, edge):
        self.edge = tuple(edge)
        super().__init__(f"no connection sample on edge {self.edge}")


class MissingFaceData(FieldError):
    """Two-form value requested on a face that carries no sample."""


class AngleStepPi(WeilChargeError):
    """Phase step across an edge is within the margin of pi.

    Signals a section zero on or near the edge; the mesh must be refined
    (or the field perturbed) before windings are well defined.
    """

    def __init__(self, edge, step, face=None):
        self.edge = tuple(edge)
        self.step = step
        self.face = face
        where = f" on face {face}" if face is not None else ""
        super().__init__(
            f"phase step {step:.9f} on edge {self.edge}{where} is too close to pi"
        )


class WindingNotInteger(WeilChargeError):
    """Winding sum does not round cleanly to an integer."""

    def __init__(self, value, where=""):
        self.value = value
        super().__init__(f"winding {value!r} is not an integer {where}".strip())


class DegenerateJacobian(WeilChargeError):
    """Fitted section Jacobian determinant is below tolerance."""


class InconsistentVortexData(WeilChargeError):
    """Winding sign and Jacobian sign disagree for a simple zero."""


class DegenerateEdge(WeilChargeError):
    """Zero-length boundary edge encountered."""


class NotTangent(WeilChargeError):
    """Section fails the boundary-tangency test of the corner-form check."""

    def __init__(self, vertex, overlap):
        self.vertex = vertex
        self.overlap = overlap
        super().__init__(
            f"section not tangent to boundary at vertex {vertex} "
            f"(normal component {overlap:g})"
        )


class InconsistentAtlas(WeilChargeError):
    """Transition propagation is path dependent on a simply connected overlap."""


class UnsupportedParameter(WeilChargeError):
    """Generator parameter outside the supported range."""
