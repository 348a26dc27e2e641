from dataclasses import dataclass
from enum import Enum

from domain.errors import DomainError


class IndexSign(Enum):
    Negative = -1
    Positive = 1

    @classmethod
    def parse(cls, text):
        aliases = {
            "neg": cls.Negative, "negative": cls.Negative, "-": cls.Negative,
            "pos": cls.Positive, "positive": cls.Positive, "+": cls.Positive,
        }
        try:
            return aliases[text.lower()]
        except KeyError:
            raise DomainError(f"unknown index sign {text!r}") from None

    @property
    def short(self):
        return "neg" if self == IndexSign.Negative else "pos"


@dataclass(frozen=True)
class BesselSpec:
    """Bessel process of index sign*nu started at 1."""
    nu: float
    sign: IndexSign = IndexSign.Negative

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError(
                f"index magnitude must be positive, got {self.nu}")

    @property
    def index(self):
        return self.sign.value * self.nu

    @property
    def dimension(self):
        return 2 * (1 + self.index)

    @property
    def drift(self):
        # Lamperti: exp(B_t + index*t) is R^(index) run with clock A_t
        return self.index

    def dual(self):
        other = (IndexSign.Positive if self.sign == IndexSign.Negative
                 else IndexSign.Negative)
        return BesselSpec(self.nu, other)

    def as_dict(self):
        return {"nu": self.nu, "index": self.sign.short,
                "dimension": self.dimension}
