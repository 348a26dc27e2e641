from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    name: str
    params: dict
    statistic: float
    threshold: float
    n_samples: int = 0
    seed: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.statistic <= self.threshold)

    def as_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "passed": self.passed,
            "n_samples": int(self.n_samples),
            "seed": int(self.seed),
            "notes": self.notes,
        }
