"""Deterministic sample words: substitution fixed points, mechanical
(Sturmian) words, periodic words, the block-doubling negative control,
and plain-text files."""
from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import ConfigError, InvalidInput, InvalidSpec, NoFixedPoint, ParseError
from .index import MAX_SAMPLE
from .words import Alphabet, Word

BINARY = Alphabet(("0", "1"))


@dataclass(frozen=True)
class Substitution:
    alphabet: Alphabet
    images: tuple[Word, ...]
    seed: int = 0

    def __post_init__(self):
        if len(self.images) != self.alphabet.size:
            raise InvalidSpec("a substitution needs exactly one image per symbol")
        for sym, img in zip(self.alphabet.symbols, self.images):
            if len(img) == 0:
                raise InvalidSpec(f"image of {sym!r} is empty")
            if img.alphabet != self.alphabet:
                raise InvalidSpec(f"image of {sym!r} is over a different alphabet")

    @classmethod
    def from_rules(cls, rules: Mapping[str, str], seed: str | None = None,
                   alphabet: Alphabet | None = None) -> Substitution:
        if alphabet is None:
            alphabet = Alphabet.of(rules.keys())
        missing = [s for s in alphabet.symbols if s not in rules]
        if missing:
            raise InvalidSpec(f"no image given for symbols {missing}")
        images = tuple(alphabet.word(rules[s]) for s in alphabet.symbols)
        seed_id = alphabet.id_of(seed) if seed is not None else 0
        return cls(alphabet, images, seed_id)

    @classmethod
    def parse(cls, text: str, seed: str | None = None) -> Substitution:
        """Parse ``"a->ab, b->a"``."""
        rules = {}
        for part in text.split(","):
            if "->" not in part:
                raise InvalidSpec(f"substitution rule {part.strip()!r} lacks '->'")
            lhs, rhs = (s.strip() for s in part.split("->", 1))
            rules[lhs] = rhs
        return cls.from_rules(rules, seed, Alphabet.of(sorted(rules)))

    def incidence_matrix(self) -> np.ndarray:
        k = self.alphabet.size
        M = np.zeros((k, k), dtype=np.int64)
        for j, img in enumerate(self.images):
            for i in img.data:
                M[i, j] += 1
        return M

    @property
    def is_primitive(self) -> bool:
        k = self.alphabet.size
        M = (self.incidence_matrix() > 0).astype(np.int64)
        P = M.copy()
        # Wielandt bound on the exponent of a primitive matrix
        for _ in range((k - 1) ** 2 + 1):
            if (P > 0).all():
                return True
            P = ((P @ M) > 0).astype(np.int64)
        return bool((P > 0).all())

    @property
    def is_extendable(self) -> bool:
        return self.images[self.seed].data[0] == self.seed

    def apply(self, w: Word) -> Word:
        images = [img.data for img in self.images]
        return Word(self.alphabet, b"".join(map(images.__getitem__, w.data)))


FIBONACCI = Substitution.from_rules({"a": "ab", "b": "a"}, "a")
THUE_MORSE = Substitution.from_rules({"0": "01", "1": "10"}, "0")
PRESETS = {"fibonacci": FIBONACCI, "thue-morse": THUE_MORSE}


def substitution_fixed_point(s: Substitution, length: int) -> Word:
    if length < 1:
        raise InvalidSpec(f"length must be >= 1, got {length}")
    if not s.is_extendable:
        raise InvalidSpec(f"image of seed {s.alphabet.symbols[s.seed]!r} does not begin with the seed")
    w = Word(s.alphabet, bytes([s.seed]))
    while len(w) < length:
        nxt = s.apply(w)
        if len(nxt) <= len(w):
            raise NoFixedPoint("substitution does not grow the seed word; no infinite fixed point")
        w = nxt
    return w[:length]


def to_fraction(x: Any) -> Fraction:
    """Exact rational value of an int, Fraction, Decimal, ``"p/q"`` or decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, decimal.Decimal)):
        return Fraction(x)
    if isinstance(x, float):
        # the shortest repr, not the binary expansion
        return Fraction(decimal.Decimal(repr(x)))
    if isinstance(x, str):
        text = x.strip()
        if text == "golden":
            return golden_ratio_conjugate()
        if "/" in text:
            return Fraction(text)
        try:
            return Fraction(decimal.Decimal(text))
        except decimal.InvalidOperation:
            raise InvalidSpec(f"cannot parse {x!r} as a number") from None
    raise InvalidSpec(f"cannot interpret {x!r} as a number")


def golden_ratio_conjugate(digits: int = 40) -> Fraction:
    """(sqrt(5) - 1) / 2 rounded to ``digits`` significant decimal digits."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        return Fraction((decimal.Decimal(5).sqrt() - 1) / 2)


def sturmian_word(alpha, rho, length: int) -> Word:
    """Mechanical word ``s[n] = floor((n+1)a + r) - floor(n a + r)``, ``n = 0..length-1``.

    Parameters are converted to exact rationals and the recurrence runs in
    integer arithmetic, so no rounding enters beyond the precision of the
    given decimal.
    """
    a, r = to_fraction(alpha), to_fraction(rho)
    if not 0 < a < 1:
        raise InvalidSpec(f"alpha must lie in (0, 1), got {float(a)}")
    if length < 1:
        raise InvalidSpec(f"length must be >= 1, got {length}")
    q = a.denominator * r.denominator
    step = a.numerator * r.denominator
    acc = (r.numerator % r.denominator) * a.denominator
    out = bytearray(length)
    for i in range(length):
        acc += step
        if acc >= q:
            acc -= q
            out[i] = 1
    return Word(BINARY, bytes(out))


def sturmian_is_periodic(alpha, length: int) -> bool:
    """Rational slopes with denominator within the sample produce a periodic sample."""
    return to_fraction(alpha).denominator <= length


def periodic_word(base: Word, length: int) -> Word:
    if len(base) == 0:
        raise InvalidInput("periodic base must be nonempty")
    reps = -(-length // len(base))
    return Word(base.alphabet, (base.data * reps)[:length])


def block_doubling_word(length: int) -> Word:
    """Prefix of 0 11 0000 1^8 0^16 ...; block ``k`` has length ``2**k``."""
    if length < 1:
        raise InvalidInput(f"length must be >= 1, got {length}")
    out = bytearray()
    k = 0
    while len(out) < length:
        out += bytes([k % 2]) * (1 << k)
        k += 1
    return Word(BINARY, bytes(out[:length]))


def word_from_text(text: str, alphabet: Alphabet | None = None) -> Word:
    if text.endswith("\r\n"):
        text = text[:-2]
    elif text.endswith("\n"):
        text = text[:-1]
    if not text:
        raise InvalidInput("sample file is empty")
    if alphabet is None:
        alphabet = Alphabet.discover(text)
    ids = alphabet._ids
    for off, ch in enumerate(text):
        if ch not in ids:
            raise ParseError(f"unknown symbol {ch!r}", off)
    if all(len(s) == 1 and ord(s) < 256 for s in alphabet.symbols):
        table = bytearray(range(256))
        for s, i in ids.items():
            table[ord(s)] = i
        return Word(alphabet, text.encode("latin-1").translate(bytes(table)))
    return alphabet.word(text)


def word_from_file(path, alphabet: Alphabet | None = None) -> Word:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"sample: cannot read {path}: {exc.strerror or exc}") from None
    return word_from_text(text, alphabet)


def write_word(w: Word, path) -> None:
    Path(path).write_text(str(w) + "\n", encoding="utf-8")


KINDS = ("substitution", "sturmian", "periodic", "block-doubling", "file")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    length: int | None = None
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"generator kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind != "file":
            if self.length is None or self.length < 1:
                raise InvalidSpec("generator length must be a positive integer")
            if self.length > MAX_SAMPLE:
                raise InvalidSpec(f"generator length {self.length} exceeds the cap of {MAX_SAMPLE} symbols")


@dataclass(frozen=True)
class GeneratedSample:
    word: Word
    periodic: bool
    description: str


def generate(spec: GeneratorSpec) -> GeneratedSample:
    p = dict(spec.params)
    n = spec.length
    if spec.kind == "substitution":
        rules = p.get("rules", "fibonacci")
        sub = PRESETS[rules] if rules in PRESETS else Substitution.parse(rules, p.get("seed"))
        return GeneratedSample(substitution_fixed_point(sub, n), False, f"substitution {rules}")
    if spec.kind == "sturmian":
        alpha, rho = p.get("alpha", "golden"), p.get("rho", "0")
        word = sturmian_word(alpha, rho, n)
        return GeneratedSample(word, sturmian_is_periodic(alpha, n), f"sturmian alpha={alpha} rho={rho}")
    if spec.kind == "periodic":
        base = p.get("base", "ab")
        return GeneratedSample(periodic_word(Alphabet.discover(base).word(base), n), True, f"periodic {base}")
    if spec.kind == "block-doubling":
        return GeneratedSample(block_doubling_word(n), False, "block-doubling")
    path = p.get("path")
    if not path:
        raise InvalidSpec("file generator needs a path")
    alphabet = Alphabet.of(p["alphabet"]) if p.get("alphabet") else None
    word = word_from_file(path, alphabet)
    if len(word) > MAX_SAMPLE:
        raise InvalidSpec(f"sample file holds {len(word)} symbols, above the cap of {MAX_SAMPLE}")
    if n is not None:
        word = word[:n]
    return GeneratedSample(word, False, f"file {path}")
