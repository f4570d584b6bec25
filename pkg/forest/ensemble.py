from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from common import LawSpecError
from distributions.grammar import coerce_law
from distributions.law import Law

CRITICAL_TOLERANCE = 1e-12


class OffspringEnsemble(BaseModel):
    """
    Laws of a GWI forest. mu[i-1][j-1] is the law of the number of colour-j
    children of a colour-i parent, nu[j-1] the law for the colour-0 parent,
    k[j-1] the number of colour-j roots. p and gamma record the scale when
    the ensemble comes from a scaling family.
    """

    model_config = ConfigDict(frozen=True)

    mu: list[list[Law]]
    nu: list[Law]
    k: list[int]
    p: int = 1
    gamma: int = 1
    convergence: bool = False

    @field_validator("mu", mode="before")
    @classmethod
    def _read_mu(cls, value):
        return [[coerce_law(law) for law in row] for row in value]

    @field_validator("nu", mode="before")
    @classmethod
    def _read_nu(cls, value):
        return [coerce_law(law) for law in value]

    @model_validator(mode="after")
    def _check(self):
        n = len(self.nu)
        if n == 0:
            raise LawSpecError("ensemble needs at least one nonzero colour")
        if len(self.mu) != n or any(len(row) != n for row in self.mu):
            raise LawSpecError(f"mu must be {n}x{n} to match nu")
        if len(self.k) != n or any(k < 0 for k in self.k):
            raise LawSpecError("k needs one nonnegative root count per colour")
        if self.convergence:
            for j in range(n):
                law = self.mu[j][j]
                if law.mean() > 1 + CRITICAL_TOLERANCE:
                    raise LawSpecError(f"diagonal law has mean {law.mean():.6g} > 1", law.spec())
        return self

    @property
    def n_types(self) -> int:
        return len(self.nu)

    @property
    def roots(self) -> tuple[int, ...]:
        return (1, *self.k)

    def law(self, i: int, j: int) -> Law:
        """Law of colour-j child counts for a colour-i parent, colours 0..N."""
        if not 1 <= j <= self.n_types or not 0 <= i <= self.n_types:
            raise ValueError(f"colour pair ({i}, {j}) out of range")
        return self.nu[j - 1] if i == 0 else self.mu[i - 1][j - 1]

    def spec(self) -> dict:
        return {
            "mu": [[law.spec() for law in row] for row in self.mu],
            "nu": [law.spec() for law in self.nu],
            "k": list(self.k),
            "p": self.p,
            "gamma": self.gamma,
            "convergence": self.convergence,
        }
