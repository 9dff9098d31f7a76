from dataclasses import dataclass, fields
from dotenv import dotenv_values
import os

import psutil


@dataclass
class Config:
    """
    This class is used to store the lab's configuration.
    You can load it from a dictionary or from a .env file (recommended).
    Every setting has a default, so a missing .env still gives a working lab.
    """
    quiverlab_cap: int = 2
    quiverlab_primes: str = ""
    quiverlab_max_total_dim: int = 8
    quiverlab_max_prime: int = 13
    quiverlab_workers: int = 0
    quiverlab_support_check_dim: int = 4

    quiverlab_format: str = "json"
    quiverlab_log_level: str = "INFO"
    quiverlab_log_file: str = ""

    @classmethod
    def from_dict(self, **kwargs) -> "Config":
        """ Create a Config object from a dictionary. """
        known = {f.name for f in fields(Config)}
        kwargs_overwrite = {}

        for k, v in kwargs.items():
            new_key = k.lower()
            if new_key not in known or v is None:
                continue

            if isinstance(v, str) and v.isdigit():
                kwargs_overwrite[new_key] = int(v)
            else:
                kwargs_overwrite[new_key] = v

        return Config(**kwargs_overwrite)

    @classmethod
    def from_env(self, filename: str = ".env") -> "Config":
        """ Create a Config object from a .env file. """
        if not os.path.exists(filename):
            print(f"Warning: {filename} file not found, using the default settings.")
            print("Optional variables: QUIVERLAB_CAP, QUIVERLAB_PRIMES, QUIVERLAB_MAX_TOTAL_DIM, QUIVERLAB_MAX_PRIME, QUIVERLAB_WORKERS, QUIVERLAB_SUPPORT_CHECK_DIM, QUIVERLAB_FORMAT, QUIVERLAB_LOG_LEVEL, QUIVERLAB_LOG_FILE")
            raise FileNotFoundError(f"{filename} file not found.")

        return Config.from_dict(**dotenv_values(filename))

    @property
    def primes(self) -> list[int]:
        """ Fixed primes for counting, empty when they are chosen per degree bound """
        text = str(self.quiverlab_primes).strip()
        if not text:
            return []
        return sorted(int(p) for p in text.replace(" ", "").split(",") if p)

    @property
    def workers(self) -> int:
        if int(self.quiverlab_workers) > 0:
            return int(self.quiverlab_workers)
        return psutil.cpu_count(logical=False) or 1
