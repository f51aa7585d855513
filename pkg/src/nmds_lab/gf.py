"""Finite field arithmetic GF(p^m) backed by exp/log tables.

Field elements are plain integers in [0, q).  The base-p digits of an
element (least significant first) are the coefficients of a polynomial
over GF(p) of degree < m; arithmetic is done modulo a fixed monic
irreducible modulus of degree m.  Multiplicative structure comes from
exp/log tables with respect to a fixed primitive element, so mul/inv/pow
are table lookups and add is digit-wise mod p (plain XOR when p = 2).

The default modulus is the monic irreducible polynomial of degree m
whose coefficient vector, read as a base-p integer (low degree first),
is smallest.  The default primitive element is the one of smallest
encoding.  Both choices are deterministic and are exposed through
``FiniteField.descriptor()`` so that every report can pin them down.

Fields are immutable after construction and safe to share freely.
"""

from __future__ import annotations

from functools import reduce

__all__ = [
    "FiniteField",
    "SubfieldEmbedding",
    "make_field",
    "gf",
    "extension_embed",
    "NotPrime",
    "ReducibleModulus",
    "FieldTooLarge",
    "NotSuzukiField",
    "WrongCharacteristic",
    "IncompatibleFields",
    "NoSuchRoot",
]

MAX_ORDER = 1 << 16


class NotPrime(ValueError):
    pass


class ReducibleModulus(ValueError):
    pass


class FieldTooLarge(ValueError):
    pass


class NotSuzukiField(ValueError):
    pass


class WrongCharacteristic(ValueError):
    pass


class IncompatibleFields(ValueError):
    pass


class NoSuchRoot(ValueError):
    pass


def is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _prime_factors(n):
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ----------------------------------------------------------------------
# Polynomials over GF(p) as coefficient tuples, low degree first.
# Only what construction needs: reduction, multiplication, divisibility.
# ----------------------------------------------------------------------

def _poly_trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return c[:i]


def _poly_divmod(a, b, p):
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = pow(lb, p - 2, p)
    q = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        if a[i]:
            coef = (a[i] * inv_lb) % p
            q[i - db] = coef
            for j, bj in enumerate(b):
                a[i - db + j] = (a[i - db + j] - coef * bj) % p
    return _poly_trim(q), _poly_trim(a)


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_is_irreducible(f, p):
    """Trial division by every monic polynomial of degree 1 .. deg(f)//2."""
    f = _poly_trim(f)
    deg = len(f) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for k in range(p ** d):
            div, kk = [0] * d + [1], k
            for i in range(d):
                div[i] = kk % p
                kk //= p
            _, rem = _poly_divmod(f, div, p)
            if not rem:
                return False
    return True


def _smallest_irreducible(p, m):
    for k in range(p ** m):
        coeffs, kk = [0] * m + [1], k
        for i in range(m):
            coeffs[i] = kk % p
            kk //= p
        if _poly_is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise RuntimeError("no irreducible polynomial found")  # unreachable


class FiniteField:
    """GF(p^m) with exp/log tables, trace, squares and Suzuki machinery.

    Use :func:`make_field` (or :func:`gf`) rather than constructing
    directly; those cache instances so tables are built once per field.
    """

    def __init__(self, p, m, modulus=None):
        if not is_prime(p):
            raise NotPrime(f"p = {p} is not prime")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        q = p ** m
        if q > MAX_ORDER:
            raise FieldTooLarge(f"q = {q} exceeds the {MAX_ORDER} table cap")
        if modulus is None:
            modulus = _smallest_irreducible(p, m)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if not _poly_is_irreducible(modulus, p):
                raise ReducibleModulus(f"{modulus} is reducible over GF({p})")

        self.p = p
        self.m = m
        self.q = q
        self.modulus = modulus
        # Suzuki parameter: q = 2^(2r+1).  r = 0 still gives a coherent
        # sigma (the identity on GF(2)); ovoid constructions require r >= 1.
        self.r = (m - 1) // 2 if (p == 2 and m % 2 == 1) else None

        self._digit_cache = [self._digits(a) for a in range(q)]
        self.generator = self._find_generator()
        self._build_tables()
        self._np = {}

    # -- raw polynomial-basis arithmetic (bootstrap, no tables) --------

    def _digits(self, a):
        p, out = self.p, []
        for _ in range(self.m):
            out.append(a % p)
            a //= p
        return tuple(out)

    def _from_digits(self, digits):
        v = 0
        for d in reversed(digits):
            v = v * self.p + d
        return v

    def _raw_mul(self, a, b):
        prod = _poly_mul(self._digit_cache[a], self._digit_cache[b], self.p)
        if len(prod) >= self.m + 1:
            _, prod = _poly_divmod(prod, self.modulus, self.p)
        prod = list(prod) + [0] * (self.m - len(prod))
        return self._from_digits(prod)

    def _raw_pow(self, a, e):
        out, base = 1, a
        while e:
            if e & 1:
                out = self._raw_mul(out, base)
            base = self._raw_mul(base, base)
            e >>= 1
        return out

    def _find_generator(self):
        if self.q == 2:
            return 1
        primes = _prime_factors(self.q - 1)
        for g in range(2, self.q):
            if all(self._raw_pow(g, (self.q - 1) // ell) != 1 for ell in primes):
                return g
        raise RuntimeError("no primitive element found")  # unreachable

    def _build_tables(self):
        q = self.q
        exp = [0] * q
        log = [-1] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._raw_mul(x, self.generator)
        exp[q - 1] = 1  # period q-1
        self.exp_table = exp
        self.log_table = log

    # -- public arithmetic ---------------------------------------------

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        da, db = self._digit_cache[a], self._digit_cache[b]
        return self._from_digits([(x + y) % self.p for x, y in zip(da, db)])

    def neg(self, a):
        if self.p == 2:
            return a
        return self._from_digits([(-x) % self.p for x in self._digit_cache[a]])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.exp_table[(self.q - 1 - self.log_table[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        return self.exp_table[(self.log_table[a] * e) % (self.q - 1)]

    def scalar(self, n):
        """The prime-subfield element n (an integer, possibly negative)."""
        return n % self.p

    def dot(self, u, v):
        acc = 0
        for a, b in zip(u, v):
            acc = self.add(acc, self.mul(a, b))
        return acc

    def elements(self):
        return range(self.q)

    # -- structure maps -------------------------------------------------

    def frobenius(self, a):
        return self.pow(a, self.p)

    def trace(self, a):
        """Absolute trace into the prime subfield (encoded in [0, p))."""
        acc, x = 0, a
        for _ in range(self.m):
            acc = self.add(acc, x)
            x = self.pow(x, self.p)
        assert acc < self.p
        return acc

    def is_square(self, a):
        """Whether a is a square.  Every element is for q even; 0 always is."""
        if self.p == 2 or a == 0:
            return True
        return self.log_table[a] % 2 == 0

    def sqrt(self, a):
        if a == 0:
            return 0
        if self.p == 2:
            return self.pow(a, self.q // 2)
        l = self.log_table[a]
        if l % 2:
            raise NoSuchRoot(f"{a} is not a square in GF({self.q})")
        return self.exp_table[l // 2]

    def suzuki_sigma(self, a):
        """x -> x^(2^(r+1)), the automorphism with sigma(sigma(x)) = x^2."""
        if self.r is None:
            raise NotSuzukiField(f"GF({self.q}) is not GF(2^(2r+1))")
        return self.pow(a, 1 << (self.r + 1))

    def sqrt_2q(self):
        """The integer 2^(r+1), i.e. the square root of 2q for q = 2^(2r+1)."""
        if self.r is None:
            raise NotSuzukiField(f"GF({self.q}) is not GF(2^(2r+1))")
        return 1 << (self.r + 1)

    def pick_delta(self):
        """Smallest-encoding element of trace 1 (q even)."""
        if self.p != 2:
            raise WrongCharacteristic("delta picking applies to even q")
        for a in range(self.q):
            if self.trace(a) == 1:
                return a
        raise RuntimeError("trace is surjective; unreachable")

    def pick_nonsquare(self):
        """Smallest-encoding non-square (q odd)."""
        if self.p == 2:
            raise WrongCharacteristic("non-squares require odd q")
        for a in range(2, self.q):
            if not self.is_square(a):
                return a
        raise RuntimeError("half the nonzero elements are non-squares")

    def descriptor(self):
        return {
            "p": self.p,
            "m": self.m,
            "q": self.q,
            "modulus": list(self.modulus),
            "generator": self.generator,
        }

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    # -- numpy lookup tables for the vectorized kernels ------------------

    def np_tables(self):
        """Lazily built dict of int32 lookup tables: MUL/ADD (q, q), INV/NEG (q,)."""
        if not self._np:
            import numpy as np

            if self.q > 4096:
                raise FieldTooLarge(f"bulk tables capped at q = 4096, got {self.q}")
            q = self.q
            mul = np.zeros((q, q), dtype=np.int32)
            for a in range(1, q):
                la = self.log_table[a]
                row = [(la + self.log_table[b]) % (q - 1) for b in range(1, q)]
                mul[a, 1:] = np.asarray(self.exp_table, dtype=np.int32)[row]
            if self.p == 2:
                ar = np.arange(q, dtype=np.int32)
                add = ar[:, None] ^ ar[None, :]
                neg = ar.copy()
            else:
                add = np.zeros((q, q), dtype=np.int32)
                for a in range(q):
                    add[a] = [self.add(a, b) for b in range(q)]
                neg = np.asarray([self.neg(a) for a in range(q)], dtype=np.int32)
            inv = np.zeros(q, dtype=np.int32)
            for a in range(1, q):
                inv[a] = self.inv(a)
            self._np = {"MUL": mul, "ADD": add, "INV": inv, "NEG": neg}
        return self._np


_FIELDS = {}


def make_field(p, m, modulus=None):
    """Construct (or fetch the cached) GF(p^m)."""
    key = (p, m, tuple(modulus) if modulus is not None else None)
    if key not in _FIELDS:
        _FIELDS[key] = FiniteField(p, m, modulus)
    return _FIELDS[key]


def gf(q):
    """GF(q) for a prime power q, with the default modulus."""
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            qq = q
            while qq % p == 0:
                qq //= p
                m += 1
            if qq != 1:
                raise ValueError(f"{q} is not a prime power")
            return make_field(p, m)
    raise ValueError(f"{q} is not a prime power")


class SubfieldEmbedding:
    """The ring embedding GF(q) -> GF(q^2) plus quadratic-extension helpers.

    ``table[a]`` is the image of a; the image is exactly the fixed field
    of x -> x^q in the big field.  ``imaginary_unit`` returns the
    designated generator i of the extension: i*i = s for odd q (s a
    non-square) and i*i + i = delta for even q (delta of trace 1).
    """

    def __init__(self, base, ext):
        if ext.p != base.p or ext.m != 2 * base.m:
            raise IncompatibleFields(
                f"{ext!r} is not a quadratic extension of {base!r}"
            )
        self.base = base
        self.ext = ext
        root = None
        for z in range(ext.q):
            acc = 0
            for c in reversed(base.modulus):
                acc = ext.add(ext.mul(acc, z), c)
            if acc == 0:
                root = z
                break
        if root is None:
            raise IncompatibleFields("modulus of the base field has no root")
        self.root = root
        table = []
        for a in range(base.q):
            acc = 0
            for c in reversed(base._digit_cache[a]):
                acc = ext.add(ext.mul(acc, root), c)
            table.append(acc)
        self.table = table
        self._back = {img: a for a, img in enumerate(table)}
        if len(self._back) != base.q:
            raise RuntimeError("embedding is not injective")

    def map(self, a):
        return self.table[a]

    def preimage(self, x):
        return self._back[x]

    def conj(self, x):
        """The conjugate x^q over the base field."""
        return self.ext.pow(x, self.base.q)

    def is_rational(self, x):
        return self.conj(x) == x

    def imaginary_unit(self, param=None):
        """A designated i in GF(q^2) \\ GF(q); returns (i, param).

        For odd q: i^2 = param (default the smallest non-square).
        For even q: i^2 + i = param (default the smallest trace-1 element).
        """
        ext = self.ext
        if self.base.p == 2:
            delta = self.base.pick_delta() if param is None else param
            target = self.map(delta)
            for z in range(ext.q):
                if ext.add(ext.mul(z, z), z) == target and not self.is_rational(z):
                    return z, delta
            raise NoSuchRoot("no root of z^2 + z = delta in the extension")
        s = self.base.pick_nonsquare() if param is None else param
        target = self.map(s)
        for z in range(ext.q):
            if ext.mul(z, z) == target:
                if self.is_rational(z):
                    raise NoSuchRoot(f"{s} is a square in the base field")
                return z, s
        raise NoSuchRoot("no square root of the parameter in the extension")


_EMBEDDINGS = {}


def extension_embed(base, ext):
    """Cached :class:`SubfieldEmbedding` of ``base`` into ``ext``."""
    key = (base, ext)
    if key not in _EMBEDDINGS:
        _EMBEDDINGS[key] = SubfieldEmbedding(base, ext)
    return _EMBEDDINGS[key]


def quadratic_extension(base):
    """GF(q^2) compatible with ``base`` (same p, doubled degree)."""
    return make_field(base.p, 2 * base.m)
