"""CRT coordinates and downset compression over square-free moduli.

A residue b mod q (q square-free) is identified with its vector of
canonical representatives (b mod p)_{p | q}, primes in increasing
order. A downset is a set closed under coordinate-wise decrease. The
compression replaces, one coordinate at a time, every fiber by the
initial segment {0, ..., size-1}; a single pass in increasing prime
order already lands on a downset because each compression preserves
the compressed state of earlier coordinates.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

from .errors import PreconditionError
from .residues import FactoredModulus, ResidueSet


@dataclass(frozen=True)
class CrtVector:
    """Coordinates of a box corner (or of a residue) in prod Z_p, p | q."""

    modulus: FactoredModulus
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.modulus.is_squarefree():
            raise PreconditionError(f"modulus {self.modulus.value} is not square-free")
        primes = self.modulus.primes
        if len(self.coords) != len(primes):
            raise PreconditionError("one coordinate per prime factor required")
        for c, p in zip(self.coords, primes):
            if not (0 <= c < p):
                raise PreconditionError(f"coordinate {c} out of range for prime {p}")


def _crt_basis(modulus: FactoredModulus) -> list[int]:
    """e_p with e_p = 1 mod p and 0 mod q/p, one per prime factor."""
    q = modulus.value
    out = []
    for p in modulus.primes:
        m = q // p
        out.append(m * pow(m, -1, p) % q)
    return out


def to_crt_coords(b: int, modulus: FactoredModulus) -> CrtVector:
    if not modulus.is_squarefree():
        raise PreconditionError(f"modulus {modulus.value} is not square-free")
    b %= modulus.value
    return CrtVector(modulus, tuple(b % p for p in modulus.primes))


def from_crt_coords(v: CrtVector) -> int:
    q = v.modulus.value
    return sum(c * e for c, e in zip(v.coords, _crt_basis(v.modulus))) % q


def downset_D(v: CrtVector) -> ResidueSet:
    """The box {b in Z_q : b mod p <= v_p for every p | q}."""
    basis = _crt_basis(v.modulus)
    q = v.modulus.value
    bits = 0
    for combo in itertools.product(*(range(c + 1) for c in v.coords)):
        bits |= 1 << (sum(x * e for x, e in zip(combo, basis)) % q)
    out = ResidueSet(v.modulus, bits)
    assert len(out) == _box_size(v)
    return out


def _box_size(v: CrtVector) -> int:
    n = 1
    for c in v.coords:
        n *= c + 1
    return n


def u_of(A: ResidueSet) -> CrtVector:
    """Coordinate-wise residue counts r(A,p), reduced mod p.

    For A inside the units the count can never reach p (0 mod p is
    missed), so no coordinate wraps. For other sets a full coordinate
    wraps to 0 and is flagged: the reduced vector is then useless as an
    upper bound.
    """
    if len(A) == 0:
        raise PreconditionError("u_of needs a nonempty set")
    if not A.modulus.is_squarefree():
        raise PreconditionError(f"modulus {A.modulus.value} is not square-free")
    members = A.members()
    unit = all(_is_unit(b, A.modulus) for b in members)
    coords = []
    for p in A.modulus.primes:
        r = len({b % p for b in members})
        if r == p:
            assert not unit, "unit subset cannot occupy every residue mod p"
            warnings.warn(
                f"r(A,{p}) = {p} wraps to 0 mod {p}; u_of is not an upper bound here",
                stacklevel=2,
            )
        coords.append(r % p)
    return CrtVector(A.modulus, tuple(coords))


def _is_unit(b: int, modulus: FactoredModulus) -> bool:
    return all(b % p != 0 for p in modulus.primes)


def is_downset(A: ResidueSet) -> bool:
    """Closed under decrementing any nonzero coordinate by one."""
    if not A.modulus.is_squarefree():
        raise PreconditionError(f"modulus {A.modulus.value} is not square-free")
    q = A.modulus.value
    basis = _crt_basis(A.modulus)
    for b in A.members():
        for p, e in zip(A.modulus.primes, basis):
            if b % p > 0 and (b - e) % q not in A:
                return False
    return True


def _compress_coordinate(points: set[tuple[int, ...]], i: int) -> set[tuple[int, ...]]:
    """Replace every fiber along coordinate i by an initial segment."""
    fibers: dict[tuple[int, ...], list[int]] = {}
    for pt in points:
        rest = pt[:i] + pt[i + 1 :]
        fibers.setdefault(rest, []).append(pt[i])
    out: set[tuple[int, ...]] = set()
    for rest, vals in fibers.items():
        for rank in range(len(vals)):
            out.add(rest[:i] + (rank,) + rest[i:])
    return out


def downset_transform(blocks: list[ResidueSet]) -> list[ResidueSet]:
    """Compress each block to a downset of the same size.

    Coordinates are processed in increasing prime order, once each.
    Cardinality is preserved per block; the sumset of the transformed
    blocks never exceeds the original sumset in size (tested, not
    enforced here).
    """
    if not blocks:
        return []
    modulus = blocks[0].modulus
    if not modulus.is_squarefree():
        raise PreconditionError(f"modulus {modulus.value} is not square-free")
    for b in blocks[1:]:
        blocks[0]._check_same(b)
    primes = modulus.primes
    basis = _crt_basis(modulus)
    q = modulus.value
    out = []
    for block in blocks:
        points = {tuple(b % p for p in primes) for b in block.members()}
        n = len(points)
        for i in range(len(primes)):
            points = _compress_coordinate(points, i)
        assert len(points) == n
        bits = 0
        for pt in points:
            bits |= 1 << (sum(x * e for x, e in zip(pt, basis)) % q)
        out.append(ResidueSet(modulus, bits))
    return out
