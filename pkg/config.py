import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Tuple
from dotenv import load_dotenv
from sympy import isprime
load_dotenv()

# Paths
LOGS_DIR = Path(os.getenv("REPCOMP_LOGS_DIR", "logs"))

# Ensure directories exist
LOGS_DIR.mkdir(exist_ok=True)

# Field Configuration
DEFAULT_PRIME = int(os.getenv("REPCOMP_PRIME", "101"))
DEFAULT_SEED = int(os.getenv("REPCOMP_SEED", "0"))

# Search Configuration
ENUMERATION_BUDGET = int(os.getenv("REPCOMP_BUDGET", str(10**6)))  # subspaces per layer-vertex
CLASSIFY_RETRIES = int(os.getenv("REPCOMP_RETRIES", "4"))
GENERIC_RETRIES = int(os.getenv("REPCOMP_GENERIC_RETRIES", "8"))
LIFT_ATTEMPTS = int(os.getenv("REPCOMP_LIFT_ATTEMPTS", "32"))
WORKERS = int(os.getenv("REPCOMP_WORKERS", "1"))
EXTENSION_DEGREE = int(os.getenv("REPCOMP_EXTENSION_DEGREE", "2"))  # flags are searched over F_{p^k}, k <= this
MAX_FIELD_ORDER = int(os.getenv("REPCOMP_MAX_FIELD_ORDER", str(2**22)))
LINE_SAMPLES = int(os.getenv("REPCOMP_LINE_SAMPLES", "6"))  # unconstrained lines tried over an extension

# Logging Configuration
LOG_LEVEL = os.getenv("REPCOMP_LOG_LEVEL", "WARNING")

OUTPUT_FORMATS = ("human", "json")


def check_prime(p: int) -> int:
    if not isprime(p):
        raise ValueError(f"modulus {p} is not prime")
    # dense int64 dot products must not overflow
    if p * p >= 2**31:
        raise ValueError(f"modulus {p} too large; need p*p < 2**31")
    return p


@dataclass(frozen=True)
class Config:
    """Per-session settings shared by the classifier and the CLI."""
    prime: int = DEFAULT_PRIME
    seed: int = DEFAULT_SEED
    retries: int = CLASSIFY_RETRIES
    budget: int = ENUMERATION_BUDGET
    primes: Tuple[int, ...] = field(default_factory=tuple)
    output: str = "human"
    sweep_skeleta: bool = False
    generic_retries: int = GENERIC_RETRIES
    lift_attempts: int = LIFT_ATTEMPTS
    workers: int = WORKERS
    extension_degree: int = EXTENSION_DEGREE

    def __post_init__(self):
        check_prime(self.prime)
        for p in self.primes:
            check_prime(p)
        for name in ("retries", "budget", "generic_retries", "lift_attempts", "workers",
                     "extension_degree"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.output not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output!r}")

    def with_prime(self, p: int) -> "Config":
        return replace(self, prime=p)

    def all_primes(self) -> Tuple[int, ...]:
        """The primes a multi-prime run visits; just `prime` otherwise."""
        return self.primes if self.primes else (self.prime,)
