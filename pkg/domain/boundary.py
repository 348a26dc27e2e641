from dataclasses import dataclass, field

from domain.errors import DomainError


@dataclass(frozen=True)
class Boundary:
    """Square-root boundary R_u^2 = (b + u) / c, with 0 < b < c."""
    b: float
    c: float
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b}")
        if self.degenerate:
            if self.b != self.c:
                raise DomainError("degenerate boundary requires b == c")
        elif not self.b < self.c:
            raise DomainError(f"boundary requires b < c, got b={self.b}, "
                              f"c={self.c}")

    @classmethod
    def limit(cls, c):
        """b = c: the process starts on the boundary and sigma = 0."""
        return cls(c, c, degenerate=True)

    def level(self, elapsed):
        return (self.b + elapsed) / self.c

    def shifted(self, db):
        return Boundary(self.b + db, self.c)

    def as_dict(self):
        return {"b": self.b, "c": self.c}
