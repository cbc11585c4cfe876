"""Global data threaded unchanged through the whole recursion."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import NonPositiveParameter


@dataclass(frozen=True)
class GlobalData:
    """Original dimension, norm bound and pseudospectral parameters.

    ``Sigma`` should satisfy ``Sigma/2 <= ||M|| <= Sigma`` for the input;
    ``eps`` and ``zeta`` describe a zeta-shattered eps-pseudospectrum.
    """

    n: int
    Sigma: float
    eps: float
    zeta: float

    def __post_init__(self):
        if self.n < 1:
            raise NonPositiveParameter("n must be >= 1")
        if not (self.Sigma > 0 and self.eps > 0 and self.zeta > 0):
            raise NonPositiveParameter("Sigma, eps and zeta must be positive")

    @property
    def kappa_bound(self) -> float:
        """Eigenvector condition number bound n zeta / eps implied by shattering."""
        return self.n * self.zeta / self.eps

    def to_json(self) -> dict:
        return asdict(self)
