"""Scheme identifiers, kept free of heavy imports so any module can use them."""
from enum import Enum


class SchemeKind(Enum):
    MACCORMACK = "maccormack"
    PPM = "ppm"
    RK3 = "rk3"

    @classmethod
    def parse(cls, name):
        """Accept a SchemeKind or its string value."""
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown scheme {name!r}; expected one of "
                             f"{[k.value for k in cls]}") from None
