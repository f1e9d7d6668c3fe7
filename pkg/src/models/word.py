# src/models/word.py
from enum import Enum
from typing import Iterable, List, Sequence, Tuple

from src.utils.errors import InvalidWordError


class Letter(Enum):
    A = "a"
    B = "b"
    BINV = "B"

    @property
    def inverse(self) -> "Letter":
        if self is Letter.A:
            return Letter.A
        return Letter.BINV if self is Letter.B else Letter.B

    @property
    def is_b(self) -> bool:
        return self is not Letter.A

    @property
    def b_exponent(self) -> int:
        return {Letter.A: 0, Letter.B: 1, Letter.BINV: -1}[self]


_B_OF_EXPONENT = {1: Letter.B, 2: Letter.BINV}
_PRETTY = {Letter.A: "a", Letter.B: "b", Letter.BINV: "b⁻¹"}


class Word:
    """A sequence of letters over {a, b, b⁻¹}; not necessarily reduced."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        self.letters: Tuple[Letter, ...] = tuple(letters)

    # -----------------
    # Parsing / printing
    # -----------------
    @classmethod
    def parse(cls, text: str) -> "Word":
        """ASCII syntax: ``a``, ``b``, ``B`` (= b⁻¹); whitespace ignored."""
        letters: List[Letter] = []
        for ch in text:
            if ch.isspace():
                continue
            try:
                letters.append(Letter(ch))
            except ValueError:
                raise InvalidWordError(f"invalid letter {ch!r} in word {text!r}") from None
        return cls(letters)

    @classmethod
    def parse_list(cls, text: str) -> List["Word"]:
        """Comma-separated generators, e.g. ``"abaB, babab"``."""
        return [cls.parse(part) for part in text.split(",") if part.strip()]

    def __str__(self) -> str:
        return "".join(x.value for x in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def pretty(self) -> str:
        return " ".join(_PRETTY[x] for x in self.letters) or "ε"

    # -----------------
    # Sequence protocol
    # -----------------
    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Word(self.letters[idx])
        return self.letters[idx]

    def __eq__(self, other) -> bool:
        if isinstance(other, Word):
            return self.letters == other.letters
        if isinstance(other, str):
            return str(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.letters)

    # -----------------
    # Group operations (results are normalized)
    # -----------------
    def __mul__(self, other: "Word") -> "Word":
        return normalize(Word(self.letters + other.letters))

    def __invert__(self) -> "Word":
        return Word(x.inverse for x in reversed(self.letters))

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return (~self) ** -k
        return normalize(Word(self.letters * k))

    # -----------------
    # Flags
    # -----------------
    @property
    def is_normal(self) -> bool:
        return all(x.is_b != y.is_b for x, y in zip(self.letters, self.letters[1:]))

    @property
    def is_cyclically_reduced(self) -> bool:
        if not self.is_normal:
            return False
        return len(self.letters) <= 1 or self.letters[0].is_b != self.letters[-1].is_b


def normalize(w: Word) -> Word:
    """Unique normal form: a single stack pass applying aa→ε, bb→b⁻¹,
    b⁻¹b⁻¹→b, bb⁻¹→ε and b⁻¹b→ε."""
    stack: List[Letter] = []
    for x in w.letters:
        if stack and stack[-1] is Letter.A and x is Letter.A:
            stack.pop()
        elif stack and stack[-1].is_b and x.is_b:
            e = (stack[-1].b_exponent + x.b_exponent) % 3
            if e == 0:
                stack.pop()
            else:
                stack[-1] = _B_OF_EXPONENT[e]
        else:
            stack.append(x)
    return Word(stack)


def cyclic_reduce(w: Word) -> Tuple[Word, Word]:
    """Return ``(x, u)`` with ``w = x u x⁻¹``, ``u`` cyclically reduced and
    ``x`` a shortest possible conjugator, itself a prefix of ``w``."""
    if not w.is_normal:
        w = normalize(w)
    letters = list(w.letters)
    prefix: List[Letter] = []
    lo, hi = 0, len(letters)
    while hi - lo >= 2:
        first, last = letters[lo], letters[hi - 1]
        if first.is_b != last.is_b:
            break
        prefix.append(first)
        if first is Letter.A or last is first.inverse:
            lo, hi = lo + 1, hi - 1
            continue
        # w = b^e w' b^e = b^e (w' b^-e) b^-e; w' ends with a, so this is final
        core = letters[lo + 1:hi - 1] + [first.inverse]
        return Word(prefix), Word(core)
    return Word(prefix), Word(letters[lo:hi])


def is_infinite_order(w: Word) -> bool:
    """Torsion elements are exactly the conjugates of a, b and b⁻¹."""
    _, u = cyclic_reduce(w)
    return len(u) >= 2


# -----------------
# Permutation image in S3 (a -> (1 2), b -> (1 2 3))
# -----------------
_S3_IMAGE = {
    Letter.A: (1, 0, 2),
    Letter.B: (1, 2, 0),
    Letter.BINV: (2, 0, 1),
}


def permutation_image(w: Sequence[Letter]) -> Tuple[int, int, int]:
    """Image of ``w`` under the surjection onto S3, acting on the right."""
    perm = (0, 1, 2)
    for x in w:
        g = _S3_IMAGE[x]
        perm = tuple(g[perm[i]] for i in range(3))
    return perm
