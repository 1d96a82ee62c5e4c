"""Exact residue arithmetic for k-th powers.

Everything downstream (local sumset lemmas, the limiting class-ratio
constant, the circle-method measurements) is built on four ingredients
kept in this module: factored moduli, bitset residue sets, the k-th power
class structure of Z_q, and root counting for z^k = b modulo a smooth
modulus W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, PreconditionError
from .primes import factorize_int, is_prime, primes_up_to

# Documented desk-scale limits.
MODULUS_CAP = 2**63 - 1       # moduli stay below 2^63; Python ints keep intermediates exact
RESIDUE_SET_CAP = 2**26       # largest modulus a bitset ResidueSet will hold
SIGMA_ENUM_CAP = 10**6        # largest prime power enumerated for root counting

K_MIN, K_MAX = 2, 12          # power exponents accepted by the k-context


@dataclass(frozen=True)
class FactoredModulus:
    """A positive integer together with its prime factorization.

    factors is a sorted tuple of (prime, exponent) pairs whose product is
    value. Construct through factorize() unless the factorization is
    already known.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not (1 <= self.value <= MODULUS_CAP):
            raise CapacityError(f"modulus {self.value} outside [1, 2^63-1]")
        prod = 1
        last = 1
        for p, e in self.factors:
            if e < 1 or p <= last or not is_prime(p):
                raise PreconditionError(f"bad factor list {self.factors}")
            last = p
            prod *= p**e
        if prod != self.value:
            raise PreconditionError(
                f"factors {self.factors} do not multiply to {self.value}"
            )

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def radical(self) -> int:
        return math.prod(self.primes)


def factorize(n: int) -> FactoredModulus:
    """Factor n (1 <= n <= 2^63-1) into a FactoredModulus."""
    if not (1 <= n <= MODULUS_CAP):
        raise CapacityError(f"n={n} outside [1, 2^63-1]")
    return FactoredModulus(n, tuple(factorize_int(n)))


def tau(k: int, p: int) -> int:
    """Exponent of the prime p in k."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    t = 0
    while k % p == 0:
        k //= p
        t += 1
    return t


def eta(k: int, p: int) -> int:
    """Forced-congruence exponent of p for k-th powers of units.

    Defined for primes p with (p-1) | k. Equals tau(k,p)+1, except at
    p=2 with 2 | k where the extra unit structure mod 8 adds one more:
    tau(k,2)+2. Every unit k-th power is then congruent to 1 modulo
    p^eta(k,p).
    """
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if k % (p - 1) != 0:
        raise PreconditionError(f"(p-1)={p-1} does not divide k={k}")
    t = tau(k, p)
    if p == 2 and t > 0:
        return t + 2
    return t + 1


@dataclass(frozen=True)
class KContext:
    """Derived constants for a fixed power exponent k.

    eta_table maps each qualifying prime p (p <= k+1 with (p-1) | k) to
    eta(k,p); forced_modulus is the product of p^eta(k,p) over those
    primes, the modulus that pins the congruence class of any sum of
    unit k-th powers; omega_k counts distinct prime divisors of k.
    """

    k: int
    eta_table: tuple[tuple[int, int], ...]
    forced_modulus: int
    omega_k: int

    @property
    def R(self) -> int:
        return self.forced_modulus


def build_k_context(k: int) -> KContext:
    """Assemble the KContext for 2 <= k <= 12."""
    if not (K_MIN <= k <= K_MAX):
        raise PreconditionError(f"k={k} outside [{K_MIN}, {K_MAX}]")
    table = []
    R = 1
    for p in primes_up_to(k + 1):
        if k % (p - 1) == 0:
            e = eta(k, p)
            table.append((p, e))
            R *= p**e
    omega = len(factorize_int(k))
    return KContext(k=k, eta_table=tuple(table), forced_modulus=R, omega_k=omega)


class ResidueSet:
    """Subset of Z_q backed by a single big-integer bitset.

    Bit i is set iff residue i belongs to the set. Moduli are capped at
    2^26 so the bitset stays a few MiB at most.
    """

    __slots__ = ("modulus", "bits")

    def __init__(self, modulus: FactoredModulus, bits: int = 0):
        if modulus.value > RESIDUE_SET_CAP:
            raise CapacityError(
                f"modulus {modulus.value} exceeds ResidueSet cap {RESIDUE_SET_CAP}"
            )
        if bits < 0 or bits >> modulus.value:
            raise PreconditionError("bits outside [0, 2^q)")
        self.modulus = modulus
        self.bits = bits

    @classmethod
    def from_members(cls, modulus: FactoredModulus, members) -> "ResidueSet":
        bits = 0
        q = modulus.value
        for m in members:
            bits |= 1 << (m % q)
        return cls(modulus, bits)

    def members(self) -> list[int]:
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def to_indicator(self) -> np.ndarray:
        q = self.modulus.value
        buf = self.bits.to_bytes((q + 7) // 8, "little")
        arr = np.unpackbits(np.frombuffer(buf, dtype=np.uint8), bitorder="little")
        return arr[:q].astype(np.int64)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, r: int) -> bool:
        return bool((self.bits >> (r % self.modulus.value)) & 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ResidueSet)
            and self.modulus.value == other.modulus.value
            and self.bits == other.bits
        )

    def __hash__(self):
        return hash((self.modulus.value, self.bits))

    def __repr__(self):
        q = self.modulus.value
        if len(self) <= 16:
            return f"ResidueSet(q={q}, {{{', '.join(map(str, self.members()))}}})"
        return f"ResidueSet(q={q}, |A|={len(self)})"

    def union(self, other: "ResidueSet") -> "ResidueSet":
        self._check_same(other)
        return ResidueSet(self.modulus, self.bits | other.bits)

    def intersection(self, other: "ResidueSet") -> "ResidueSet":
        self._check_same(other)
        return ResidueSet(self.modulus, self.bits & other.bits)

    def complement(self) -> "ResidueSet":
        q = self.modulus.value
        return ResidueSet(self.modulus, ~self.bits & ((1 << q) - 1))

    def _check_same(self, other: "ResidueSet") -> None:
        if self.modulus.value != other.modulus.value:
            raise PreconditionError("mismatched moduli")


def crt_combine(pairs: list[tuple[int, FactoredModulus]]) -> int:
    """Combine residue/modulus pairs with pairwise coprime moduli.

    Returns the unique residue modulo the product. Rejects non-coprime
    moduli, reporting the offending pair.
    """
    if not pairs:
        raise PreconditionError("empty residue list")
    x, m = pairs[0][0] % pairs[0][1].value, pairs[0][1].value
    for r, mod in pairs[1:]:
        n = mod.value
        g = math.gcd(m, n)
        if g != 1:
            raise PreconditionError(f"moduli {m} and {n} share factor {g}")
        # x' = x mod m, r mod n
        inv = pow(m % n, -1, n)
        x = x + m * ((r - x) * inv % n)
        m *= n
        x %= m
    return x


def _modpow_vec(base: np.ndarray, k: int, q: int) -> np.ndarray:
    """base**k mod q elementwise, exact in int64 (requires q <= 2^31)."""
    if q > 2**31:
        raise CapacityError("vectorized modpow needs q <= 2^31")
    out = np.ones_like(base)
    b = base % q
    e = k
    while e:
        if e & 1:
            out = out * b % q
        b = b * b % q
        e >>= 1
    return out


def _power_classes_prime_power(p: int, e: int, k: int) -> np.ndarray:
    q = p**e
    vals = _modpow_vec(np.arange(q, dtype=np.int64), k, q)
    return np.unique(vals)


def _unit_power_classes_prime_power(p: int, e: int, k: int) -> np.ndarray:
    q = p**e
    t = np.arange(q, dtype=np.int64)
    t = t[t % p != 0] if p <= q else t
    if q == 1:
        return np.zeros(1, dtype=np.int64)
    vals = _modpow_vec(t, k, q)
    return np.unique(vals)


def _crt_combine_arrays(parts: list[tuple[np.ndarray, int]]) -> np.ndarray:
    """All CRT combinations of residue arrays modulo coprime prime powers."""
    total = math.prod(m for _, m in parts)
    acc = np.zeros(1, dtype=np.int64)
    m_done = 1
    for arr, m in parts:
        other = total // m
        c = other * pow(other % m, -1, m) % total  # 1 mod m, 0 mod total/m
        lifted = arr.astype(np.int64) * (c % total) % total if total <= 2**31 else None
        if lifted is None:
            # big modulus: fall back to object ints (still exact)
            lifted = np.array([(int(r) * c) % total for r in arr], dtype=object)
            acc = (acc[:, None] + lifted[None, :]).reshape(-1) % total
        else:
            acc = (acc[:, None] + lifted[None, :]).reshape(-1) % total
        m_done *= m
    return np.unique(acc)


def kth_power_classes(q: FactoredModulus, k: int) -> ResidueSet:
    """The set {t^k mod q : t in Z_q}, computed per prime power and glued by CRT."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if q.value == 1:
        return ResidueSet(q, 1)
    parts = [(_power_classes_prime_power(p, e, k), p**e) for p, e in q.factors]
    residues = _crt_combine_arrays(parts)
    bits = 0
    for r in residues.tolist():
        bits |= 1 << int(r)
    return ResidueSet(q, bits)


def unit_kth_power_classes(q: FactoredModulus, k: int) -> ResidueSet:
    """The set {t^k mod q : t a unit of Z_q}."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if q.value == 1:
        return ResidueSet(q, 1)
    parts = [(_unit_power_classes_prime_power(p, e, k), p**e) for p, e in q.factors]
    residues = _crt_combine_arrays(parts)
    bits = 0
    for r in residues.tolist():
        bits |= 1 << int(r)
    return ResidueSet(q, bits)


def size_Z_formula(p: int, e: int, k: int) -> int:
    """|{unit k-th power classes mod p^e}|, closed form.

    phi(p^e)/gcd(k, phi(p^e)) wherever the unit group is cyclic (odd p,
    and 2^1, 2^2). For p=2, e >= 3 the group is C_2 x C_{2^{e-2}} and
    the image of x -> x^k is the product of the cyclic images.
    """
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if e < 1 or k < 1:
        raise PreconditionError("need e >= 1 and k >= 1")
    pe = p**e
    if pe > MODULUS_CAP:
        raise CapacityError(f"p^e={pe} exceeds 2^63-1")
    if p == 2 and e >= 3:
        half = 1 << (e - 2)
        return (2 // math.gcd(k, 2)) * (half // math.gcd(k, half))
    phi = pe // p * (p - 1)
    return phi // math.gcd(k, phi)


@dataclass
class WContext:
    """Fixed small-prime rescaling data: W = prod_{p <= w} p^k.

    Root-count tables (one per prime power p^k, built by direct
    enumeration at construction) answer sigma(b) = #{z in Z_W : z^k = b}
    as a product of per-prime counts. Instances are immutable in use;
    the tables are never written after construction.
    """

    k: int
    w: int
    W: FactoredModulus
    _tables: dict[int, np.ndarray] = field(repr=False, default_factory=dict)

    def sigma(self, b: int) -> int:
        out = 1
        for p, _ in self.W.factors:
            out *= int(self._tables[p][b % p**self.k])
        return out

    def sigma_table(self) -> np.ndarray:
        """sigma(b) for every b in Z_W, as one array (W entries)."""
        W = self.W.value
        out = np.ones(W, dtype=np.int64)
        idx = np.arange(W, dtype=np.int64)
        for p, _ in self.W.factors:
            out *= self._tables[p][idx % p**self.k]
        return out

    def unit_classes(self) -> ResidueSet:
        return unit_kth_power_classes(self.W, self.k)


def build_w_context(k: int, w: int) -> WContext:
    """Build the rescaling context for exponent k and smoothness bound w."""
    if not (K_MIN <= k <= K_MAX):
        raise PreconditionError(f"k={k} outside [{K_MIN}, {K_MAX}]")
    if w < 2:
        raise PreconditionError("w must be >= 2")
    ps = primes_up_to(w)
    value = 1
    tables: dict[int, np.ndarray] = {}
    for p in ps:
        pk = p**k
        if pk > SIGMA_ENUM_CAP:
            raise CapacityError(f"prime power {p}^{k} exceeds enumeration cap {SIGMA_ENUM_CAP}")
        value *= pk
        vals = _modpow_vec(np.arange(pk, dtype=np.int64), k, pk)
        tables[p] = np.bincount(vals, minlength=pk)
    if value > MODULUS_CAP:
        raise CapacityError(f"W={value} exceeds 2^63-1")
    W = FactoredModulus(value, tuple((p, k) for p in ps))
    return WContext(k=k, w=w, W=W, _tables=tables)


def sigma_W(b: int, ctx: WContext) -> int:
    """Number of z in Z_W with z^k = b, from the context's enumeration tables."""
    return ctx.sigma(b)
