from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from sympy import isprime
from sympy.polys.domains import GF, QQ

from lab.errors import ParseError, UnsupportedFamily


@cache
def _domain(p: int | None):
    return QQ if p is None else GF(p)


@dataclass(frozen=True)
class FieldSpec:
    """
    Either a prime field GF(p) or the rationals (p is None).
    Matrix entries are sympy domain elements of `domain`.
    """
    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not isprime(self.p):
            raise ParseError(f"{self.p} is not prime")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(int(p))

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """ Accepts 'QQ', 'GF(5)' or a bare prime """
        text = str(text).strip()
        if text.upper() in ("QQ", "Q", "RATIONALS"):
            return cls.rationals()
        if text.upper().startswith("GF(") and text.endswith(")"):
            text = text[3:-1]
        if not text.isdigit():
            raise ParseError(f"unknown field {text!r}")
        return cls.prime(int(text))

    @property
    def domain(self):
        return _domain(self.p)

    @property
    def is_prime(self) -> bool:
        return self.p is not None

    @property
    def name(self) -> str:
        return "QQ" if self.p is None else f"GF({self.p})"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def __call__(self, value):
        if isinstance(value, Fraction):
            if self.p is None:
                return QQ(value.numerator, value.denominator)
            return self.domain(value.numerator) / self.domain(value.denominator)
        if isinstance(value, str):
            return self(Fraction(value))
        if self.p is None:
            return QQ(int(value))
        return self.domain(int(value))

    def to_python(self, x) -> int | Fraction:
        if self.p is None:
            return Fraction(int(QQ.numer(x)), int(QQ.denom(x)))
        return int(self.domain.to_sympy(x)) % self.p

    def to_json(self, x):
        value = self.to_python(x)
        if isinstance(value, Fraction):
            return value.numerator if value.denominator == 1 else str(value)
        return value

    def elements(self) -> list:
        if self.p is None:
            raise UnsupportedFamily("the rationals cannot be enumerated")
        return [self.domain(k) for k in range(self.p)]

    def projective_line(self) -> list[tuple[int, int]]:
        """ Points (c:c') normalised with first nonzero coordinate 1 """
        if self.p is None:
            raise UnsupportedFamily("the rational projective line cannot be enumerated")
        return [(1, t) for t in range(self.p)] + [(0, 1)]

    def __str__(self) -> str:
        return self.name

    def normalize_point(self, c, d) -> tuple:
        """ Normal form of the projective point (c:d), given as domain elements """
        K = self.domain
        if not K.is_zero(c):
            return (1, self.to_python(d / c))
        if K.is_zero(d):
            raise ValueError("(0:0) is not a projective point")
        return (0, 1)

    def point_elements(self, point: tuple) -> tuple:
        return self(point[0]), self(point[1])
