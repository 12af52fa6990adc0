"""Finitely presented groups as data, and their matrix representations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import matcore
from .config import DEFAULT, ToleranceConfig
from .errors import (
    BallTooLarge,
    DimensionMismatch,
    InvalidRepresentation,
    UnknownPresentation,
)
from .matcore import GroupSpec

MAX_BALL_RADIUS = 6
MAX_BALL_SIZE = 10**6


def _merge(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for gen, exp in letters:
        gen, exp = int(gen), int(exp)
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            e = out[-1][1] + exp
            out.pop()
            if e:
                out.append((gen, e))
        else:
            out.append((gen, exp))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A group word as (generator index, nonzero exponent) letters.

    Adjacent letters on the same generator are merged on construction, so
    ``Word(((0, 1), (0, -1)))`` is the empty word.
    """

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _merge(self.letters))

    @classmethod
    def of(cls, *letters: tuple[int, int]) -> "Word":
        return cls(tuple(letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def to_json(self) -> list:
        return [[g, e] for g, e in self.letters]

    @classmethod
    def from_json(cls, data: Sequence) -> "Word":
        return cls(tuple((int(g), int(e)) for g, e in data))

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return "".join(f"g{g}" if e == 1 else f"g{g}^{e}" for g, e in self.letters)


def commutator(a: int, b: int) -> Word:
    """a b a^-1 b^-1."""
    return Word.of((a, 1), (b, 1), (a, -1), (b, -1))


@dataclass(frozen=True)
class Presentation:
    name: str
    num_generators: int
    relators: tuple[Word, ...] = ()
    nilpotent: bool = False

    def __post_init__(self):
        if self.num_generators < 1:
            raise ValueError("a presentation needs at least one generator")
        object.__setattr__(self, "relators", tuple(self.relators))
        for w in self.relators:
            if w.max_generator() >= self.num_generators or any(g < 0 for g, _ in w.letters):
                raise ValueError(f"relator {w} references an invalid generator")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "generators": self.num_generators,
            "relators": [w.to_json() for w in self.relators],
            "nilpotent": self.nilpotent,
        }

    @classmethod
    def from_json(cls, data) -> "Presentation":
        if isinstance(data, str):
            return builtin_presentation(data)
        return cls(
            name=str(data["name"]),
            num_generators=int(data["generators"]),
            relators=tuple(Word.from_json(w) for w in data["relators"]),
            nilpotent=bool(data.get("nilpotent", False)),
        )


def _parse_rank(name: str, prefix: str) -> int:
    try:
        r = int(name[len(prefix):])
    except ValueError:
        raise UnknownPresentation(name) from None
    if r < 1:
        raise UnknownPresentation(name)
    return r


def builtin_presentation(name: str) -> Presentation:
    """Look up one of the shipped presentations.

    ``free:r``, ``abelian:r``, ``heisenberg3``, ``z_semi_z4:2gen`` and
    ``z_semi_z4:3gen``.  In the two presentations of Z x| Z/4 the generator
    order is s = (0,1) (order four), t = (1,0), and for 3gen u = (1,1) = t s.
    """
    if name.startswith("free:"):
        return Presentation(name, _parse_rank(name, "free:"))
    if name.startswith("abelian:"):
        r = _parse_rank(name, "abelian:")
        rels = tuple(commutator(i, j) for i in range(r) for j in range(i + 1, r))
        return Presentation(name, r, rels, nilpotent=True)
    if name == "heisenberg3":
        x, y, z = 0, 1, 2
        rels = (
            commutator(x, y) * Word.of((z, -1)),
            commutator(x, z),
            commutator(y, z),
        )
        return Presentation(name, 3, rels, nilpotent=True)
    s, t, u = 0, 1, 2
    twist = (Word.of((s, 4)), Word.of((s, 1), (t, 1), (s, -1), (t, 1)))
    if name == "z_semi_z4:2gen":
        return Presentation(name, 2, twist)
    if name == "z_semi_z4:3gen":
        return Presentation(name, 3, twist + (Word.of((u, -1), (t, 1), (s, 1)),))
    raise UnknownPresentation(name)


BUILTIN_NAMES = ("free:r", "abelian:r", "heisenberg3", "z_semi_z4:2gen", "z_semi_z4:3gen")


def ball_size(num_generators: int, radius: int) -> int:
    k = 2 * num_generators
    return 1 + sum(k * (k - 1) ** (j - 1) for j in range(1, radius + 1))


def word_ball(p: Presentation | int, radius: int) -> list[Word]:
    """All freely reduced words of length <= radius, shortest first.

    Within a length, letters are ordered x0, x0^-1, x1, x1^-1, ...  No
    relator-aware reduction is done.
    """
    r = p if isinstance(p, int) else p.num_generators
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius > MAX_BALL_RADIUS or ball_size(r, radius) > MAX_BALL_SIZE:
        raise BallTooLarge(f"ball of radius {radius} on {r} generators is too large")
    letters = [(g, e) for g in range(r) for e in (1, -1)]
    layer: list[tuple[tuple[int, int], ...]] = [()]
    out = [Word()]
    for _ in range(radius):
        nxt = []
        for seq in layer:
            for g, e in letters:
                if seq and seq[-1] == (g, -e):
                    continue
                nxt.append(seq + ((g, e),))
        out.extend(Word(s) for s in nxt)
        layer = nxt
    return out


@dataclass(frozen=True, eq=False)
class Representation:
    """Generator images of a presentation inside a GL/SL group.

    Construction checks shapes, dimensions and finiteness only; call
    :meth:`validate` for determinant, realness and relator checks.
    """

    presentation: Presentation
    group: GroupSpec
    matrices: tuple[np.ndarray, ...]
    _inverses: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        mats = tuple(matcore.as_matrix(m) for m in self.matrices)
        if len(mats) != self.presentation.num_generators:
            raise InvalidRepresentation(
                f"{self.presentation.name} has {self.presentation.num_generators} generators, "
                f"got {len(mats)} matrices"
            )
        for m in mats:
            if m.shape[0] != self.group.dim:
                raise DimensionMismatch(f"expected dim {self.group.dim}, got {m.shape[0]}")
        if self.group.is_real:
            mats = tuple(matcore.realify(m, np.inf) if matcore.imag_max(m) == 0 else m for m in mats)
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.group.dim

    @property
    def rank(self) -> int:
        return len(self.matrices)

    def with_matrices(self, matrices: Sequence[np.ndarray]) -> "Representation":
        return Representation(self.presentation, self.group, tuple(matrices))

    def norm_sq(self) -> float:
        return matcore.tuple_norm_sq(self.matrices)

    def conjugate(self, g: np.ndarray, g_inv: np.ndarray | None = None) -> "Representation":
        """g . rep . g^-1 applied to every generator image."""
        if g_inv is None:
            g_inv = matcore.inverse(g)
        return self.with_matrices([g @ m @ g_inv for m in self.matrices])

    def inverse_of(self, i: int, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
        if i not in self._inverses:
            self._inverses[i] = matcore.inverse(self.matrices[i], tol)
        return self._inverses[i]

    def validate(self, tol: ToleranceConfig = DEFAULT, check_relations: bool = True) -> "Representation":
        for m in self.matrices:
            self.group.validate(m, tol)
        if check_relations:
            res = relation_residual(self, tol)
            if res > tol.tol_rel * max(1.0, self.norm_sq()):
                raise InvalidRepresentation(f"relation residual {res:.3g} exceeds tolerance")
        return self

    def max_imag(self) -> float:
        return max(matcore.imag_max(m) for m in self.matrices)

    def allclose(self, other: "Representation", atol: float = 1e-12) -> bool:
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.matrices, other.matrices))

    def to_json(self, inline_presentation: bool = True) -> dict:
        return {
            "presentation": self.presentation.to_json() if inline_presentation else self.presentation.name,
            "group": self.group.to_json(),
            "matrices": [matcore.matrix_to_json(m) for m in self.matrices],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Representation":
        return cls(
            Presentation.from_json(data["presentation"]),
            GroupSpec.from_json(data["group"]),
            tuple(matcore.matrix_from_json(m) for m in data["matrices"]),
        )


def word_evaluate(rep: Representation, w: Word, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Product of generator images along the word; inverses computed numerically."""
    n = rep.dim
    dtype = np.result_type(*rep.matrices)
    out = np.eye(n, dtype=dtype)
    for g, e in w.letters:
        if g >= rep.rank:
            raise ValueError(f"word uses generator {g} but rep has {rep.rank}")
        base = rep.matrices[g] if e > 0 else rep.inverse_of(g, tol)
        out = out @ np.linalg.matrix_power(base, abs(e))
    return out


def relation_residual(rep: Representation, tol: ToleranceConfig = DEFAULT) -> float:
    """max over relators of ||rep(relator) - I||_F (0 without relators)."""
    eye = np.eye(rep.dim)
    return max(
        (matcore.frobenius_norm(word_evaluate(rep, w, tol) - eye) for w in rep.presentation.relators),
        default=0.0,
    )


def evaluate_ball(rep: Representation, radius: int, tol: ToleranceConfig = DEFAULT):
    """Yield (word, image) over word_ball(radius), reusing prefix products."""
    letters = [(g, e) for g in range(rep.rank) for e in (1, -1)]
    mats = {(g, 1): rep.matrices[g] for g in range(rep.rank)}
    mats.update({(g, -1): rep.inverse_of(g, tol) for g in range(rep.rank)})
    word_ball(rep.presentation, radius)  # size guard
    dtype = np.result_type(*rep.matrices)
    layer = [((), np.eye(rep.dim, dtype=dtype))]
    yield Word(), layer[0][1]
    for _ in range(radius):
        nxt = []
        for seq, img in layer:
            for g, e in letters:
                if seq and seq[-1] == (g, -e):
                    continue
                item = (seq + ((g, e),), img @ mats[(g, e)])
                nxt.append(item)
                yield Word(item[0]), item[1]
        layer = nxt


def ball_normality_max(rep: Representation, radius: int, tol: ToleranceConfig = DEFAULT) -> tuple[float, float]:
    """(max raw residual, max residual / (1 + ||image||^2)) over the word ball."""
    raw = rel = 0.0
    for _, img in evaluate_ball(rep, radius, tol):
        res = matcore.normality_residual(img)
        raw = max(raw, res)
        rel = max(rel, res / (1.0 + matcore.frobenius_norm(img) ** 2))
    return raw, rel
