from dataclasses import dataclass

from domain.errors import DomainError

# below this the Mellin exponent is treated as zero
ZERO_EXPONENT_CUTOFF = 1e-8


@dataclass(frozen=True)
class TransformQuery:
    s: complex

    def __post_init__(self):
        s = complex(self.s)
        if s != s or abs(s) == float("inf"):
            raise DomainError(f"Mellin exponent must be finite, got {self.s}")
        object.__setattr__(self, "s", s)

    @property
    def closed_form_regime(self):
        return self.s.imag == 0 and self.s.real >= 0

    @property
    def is_zero(self):
        return abs(self.s) < ZERO_EXPONENT_CUTOFF
