"""
Markings, bigrades and integer chains of markings
"""
from typing import Dict, Iterable, Iterator, List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.errors import InadmissibleMarkingError, SystemMismatchError
from app.schemas.chains import ChainRecord, ChainTerm
from app.utils.conflict import ConflictSystem

# value per element position, each in {0, 1, 2}
Marking = Tuple[int, ...]


class Bigrade(BaseModel):
    """i 1-marked and j 2-marked elements"""
    model_config = ConfigDict(frozen=True)

    i: int = Field(ge=0)
    j: int = Field(ge=0)


def marking_key(m: Marking) -> str:
    return "".join(str(value) for value in m)


def decode_marking(key: str) -> Marking:
    return tuple(int(char) for char in key)


def zero_marking(cs: ConflictSystem) -> Marking:
    return (0,) * len(cs)


def bigrade_of(m: Marking) -> Bigrade:
    return Bigrade(i=m.count(1), j=m.count(2))


def sector_bigrade(cs: ConflictSystem, m: Marking) -> Dict[str, Bigrade]:
    """(1-marks, 2-marks) per sector present in cs"""
    grades: Dict[str, Bigrade] = {}
    for sector in dict.fromkeys(cs.sectors):
        values = [m[index] for index in cs.members(sector)]
        grades[sector] = Bigrade(i=values.count(1), j=values.count(2))
    return grades


def check_admissible(cs: ConflictSystem, m: Marking) -> None:
    """Raise InadmissibleMarkingError unless m is a valid marking of cs"""
    if len(m) != len(cs):
        raise InadmissibleMarkingError(f"Marking has {len(m)} values for {len(cs)} elements")
    marked = set()
    for index, value in enumerate(m):
        if value not in (0, 1, 2):
            raise InadmissibleMarkingError(f"Element {index} carries value {value}, expected 0, 1 or 2")
        if value:
            marked.add(index)
    for index in marked:
        clash = cs.neighbours[index] & marked
        if clash:
            other = min(clash)
            raise InadmissibleMarkingError(
                f"Marked elements {cs.elements[index].label} and {cs.elements[other].label} conflict"
            )


class Chain:
    """Formal integer combination of markings of one conflict system; no zero coefficients"""
    __slots__ = ("system", "terms")

    def __init__(self, system: ConflictSystem, terms: Dict[str, int] = None):
        self.system = system
        self.terms: Dict[str, int] = {}
        for key, coeff in (terms or {}).items():
            if coeff:
                self.terms[key] = coeff

    @classmethod
    def of(cls, system: ConflictSystem, markings: Iterable[Tuple[Marking, int]]) -> "Chain":
        chain = cls(system)
        for m, coeff in markings:
            chain.add_term(m, coeff)
        return chain

    def add_term(self, m: Marking, coeff: int) -> None:
        key = marking_key(m)
        value = self.terms.get(key, 0) + coeff
        if value:
            self.terms[key] = value
        else:
            self.terms.pop(key, None)

    def _check_system(self, other: "Chain") -> None:
        if other.system is not self.system and other.system.key != self.system.key:
            raise SystemMismatchError("Chains belong to different conflict systems")

    def __add__(self, other: "Chain") -> "Chain":
        self._check_system(other)
        result = Chain(self.system, self.terms)
        for key, coeff in other.terms.items():
            result.add_term(decode_marking(key), coeff)
        return result

    def __neg__(self) -> "Chain":
        return Chain(self.system, {key: -coeff for key, coeff in self.terms.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scaled(self, factor: int) -> "Chain":
        return Chain(self.system, {key: factor * coeff for key, coeff in self.terms.items()})

    def divided(self, divisor: int) -> "Chain":
        """Exact division of every coefficient; ArithmeticError when one is not divisible"""
        result = {}
        for key, coeff in self.terms.items():
            quotient, remainder = divmod(coeff, divisor)
            if remainder:
                raise ArithmeticError(f"Coefficient {coeff} of [{key}] is not divisible by {divisor}")
            result[key] = quotient
        return Chain(self.system, result)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.system.key == other.system.key and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Marking, int]]:
        for key in sorted(self.terms):
            yield decode_marking(key), self.terms[key]

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, m: Marking) -> int:
        return self.terms.get(marking_key(m), 0)

    def markings(self) -> List[Marking]:
        return [m for m, _ in self]

    def to_record(self) -> ChainRecord:
        return ChainRecord(
            system=self.system.key,
            terms=[ChainTerm(marking=key, coeff=self.terms[key]) for key in sorted(self.terms)],
        )

    def __repr__(self) -> str:
        body = " ".join(f"{coeff:+d}[{key}]" for key, coeff in sorted(self.terms.items()))
        return f"Chain({body or '0'})"
