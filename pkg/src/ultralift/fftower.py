"""Finite field towers F_{p^m} with compatible embeddings.

Each level m is realized as F_p[x]/(C_m) for a deterministically chosen
modulus C_m: the first monic polynomial (in base-p counting order of its
lower coefficients) that is irreducible, primitive, and norm-compatible
with every previously fixed subfield level.  Norm compatibility makes the
canonical embeddings x_d -> x_m^((p^m-1)/(p^d-1)) ring maps that commute,
so elements at different levels can be mixed freely; arithmetic lifts to
the lcm level.  The table is reproducible bit for bit.
"""

from __future__ import annotations

import math
import threading
from typing import Optional, Sequence

from .errors import ResourceCapError, UsageError

# ---------------------------------------------------------------------------
# F_p[x] arithmetic on little-endian coefficient tuples (no trailing zeros)


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _padd(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _trim(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return _trim(out)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], -1, p)
    for i in range(len(a) - len(b), -1, -1):
        c = (a[i + len(b) - 1] * inv_lead) % p
        if c:
            q[i] = c
            for j, y in enumerate(b):
                a[i + j] = (a[i + j] - c * y) % p
    return _trim(q), _trim(a)


def _pmod(a, b, p):
    return _pdivmod(a, b, p)[1]


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def _x_power_p_power(k, mod, p):
    """x^(p^k) mod ``mod``."""
    return _ppowmod([0, 1], p**k, mod, p)


def _is_irreducible(g, p):
    m = len(g) - 1
    if m < 1:
        return False
    if _x_power_p_power(m, g, p) != _pmod([0, 1], g, p):
        return False
    for q in _prime_factors(m):
        d = m // q
        h = _psub(_x_power_p_power(d, g, p), [0, 1], p)
        if _pgcd(h, g, p) != [1]:
            return False
    return True


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


_FACTOR_CACHE = {}


def _factor_order(n):
    """Prime factors of n (the multiplicative group order p^m - 1)."""
    if n not in _FACTOR_CACHE:
        small = _prime_factors_bounded(n, 10**6)
        if small is None:
            from sympy import factorint  # lazy; only large towers need it

            small = sorted(factorint(n).keys())
        _FACTOR_CACHE[n] = small
    return _FACTOR_CACHE[n]


def _prime_factors_bounded(n, bound):
    out = []
    d = 2
    while d * d <= n and d <= bound:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n == 1:
        return out
    if d * d > n:
        out.append(n)
        return out
    return None


def _is_primitive(g, p):
    m = len(g) - 1
    order = p**m - 1
    for q in _factor_order(order):
        if _ppowmod([0, 1], order // q, g, p) == [1]:
            return False
    return True


class FFTower:
    """Registry of compatible moduli and embeddings for one prime p."""

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise UsageError(f"p = {p} is not prime")
        self.p = p
        self._moduli = {}
        self._gen_images = {}
        self._lock = threading.Lock()

    def modulus(self, m: int) -> tuple:
        """Deterministic Conway-style modulus for level m."""
        with self._lock:
            return self._modulus_locked(m)

    def _modulus_locked(self, m):
        if m in self._moduli:
            return self._moduli[m]
        p = self.p
        # moduli of maximal subfields must exist first
        sub = [m // q for q in _prime_factors(m)]
        for d in sub:
            self._modulus_locked(d)
        for n in range(p**m):
            coeffs = []
            k = n
            for _ in range(m):
                coeffs.append(k % p)
                k //= p
            if coeffs[0] == 0:  # root 0 is never a unit
                continue
            g = tuple(coeffs + [1])
            if not _is_irreducible(g, p):
                continue
            if not _is_primitive(list(g), p):
                continue
            if all(self._compatible(d, list(g), m) for d in sub):
                self._moduli[m] = g
                return g
        raise ResourceCapError(f"no compatible modulus found for F_{p}^{m}")

    def _compatible(self, d, g, m):
        p = self.p
        xi = _ppowmod([0, 1], (p**m - 1) // (p**d - 1), g, p)
        cd = list(self._moduli[d])
        # evaluate C_d at xi modulo g (Horner)
        acc = []
        for c in reversed(cd):
            acc = _pmul(acc, xi, p)
            if c:
                acc = _padd(acc, [c], p)
            acc = _pmod(acc, g, p)
        return not acc

    def elem(self, level: int, coeffs) -> "FFTowerElem":
        self.modulus(level)
        vec = [c % self.p for c in coeffs]
        if len(vec) > level:
            vec = _pmod(vec, list(self.modulus(level)), self.p)
        vec = vec + [0] * (level - len(vec))
        return FFTowerElem(self, level, tuple(vec[:level]))

    def zero(self, level: int = 1) -> "FFTowerElem":
        return self.elem(level, [])

    def one(self, level: int = 1) -> "FFTowerElem":
        return self.elem(level, [1])

    def from_int(self, n: int, level: int = 1) -> "FFTowerElem":
        return self.elem(level, [n % self.p])

    def generator(self, level: int) -> "FFTowerElem":
        if level == 1:
            # the canonical generator of F_p is the root of the level-1 modulus
            a0 = self.modulus(1)[0]
            return self.from_int(-a0)
        return self.elem(level, [0, 1])

    def _generator_image(self, d: int, m: int):
        """Coefficients of x_d's image in F_{p^m} (d divides m)."""
        key = (d, m)
        if key not in self._gen_images:
            g = list(self.modulus(m))
            xi = _ppowmod([0, 1], (self.p**m - 1) // (self.p**d - 1), g, self.p)
            self._gen_images[key] = tuple(xi + [0] * (m - len(xi)))
        return self._gen_images[key]

    def embed(self, a: "FFTowerElem", m: int) -> "FFTowerElem":
        if a.level == m:
            return a
        if m % a.level != 0:
            raise UsageError(f"no embedding F_{self.p}^{a.level} -> F_{self.p}^{m}")
        if a.level == 1:
            return self.elem(m, [a.coeffs[0]])
        xi = list(self._generator_image(a.level, m))
        g = list(self.modulus(m))
        acc = []
        for c in reversed(a.coeffs):
            acc = _pmod(_pmul(acc, xi, self.p), g, self.p)
            if c:
                acc = _padd(acc, [c], self.p)
        return self.elem(m, acc)

    def random(self, rng, level: int = 1) -> "FFTowerElem":
        return self.elem(level, [rng.randrange(self.p) for _ in range(level)])


_TOWERS = {}


def tower(p: int) -> FFTower:
    if p not in _TOWERS:
        _TOWERS[p] = FFTower(p)
    return _TOWERS[p]


def conway_modulus(p: int, m: int) -> tuple:
    return tower(p).modulus(m)


class FFTowerElem:
    """Element of F_{p^level} as a coefficient vector over F_p."""

    __slots__ = ("tower", "level", "coeffs")

    def __init__(self, tower_, level, coeffs):
        self.tower = tower_
        self.level = level
        self.coeffs = coeffs

    @property
    def p(self):
        return self.tower.p

    def is_zero(self):
        return not any(self.coeffs)

    def _common(self, other):
        if isinstance(other, int):
            other = self.tower.from_int(other)
        if not isinstance(other, FFTowerElem):
            return None, None
        if other.tower.p != self.p:
            raise UsageError("tower elements over different primes")
        m = self.level * other.level // math.gcd(self.level, other.level)
        return self.tower.embed(self, m), self.tower.embed(other, m)

    def __add__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return self.tower.elem(a.level, _padd(list(a.coeffs), list(b.coeffs), self.p))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return self.tower.elem(a.level, _psub(list(a.coeffs), list(b.coeffs), self.p))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.tower.elem(self.level, [(-c) % self.p for c in self.coeffs])

    def __mul__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        prod = _pmul(list(a.coeffs), list(b.coeffs), self.p)
        return self.tower.elem(a.level, _pmod(prod, list(self.tower.modulus(a.level)), self.p))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in the tower")
        p = self.p
        g = list(self.tower.modulus(self.level))
        # extended Euclid in F_p[x]
        r0, r1 = g, _trim(self.coeffs)
        s0, s1 = [], [1]
        while r1:
            q, r = _pdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        inv_lead = pow(r0[-1], -1, p)
        s0 = [(c * inv_lead) % p for c in s0]
        return self.tower.elem(self.level, _pmod(s0, g, p))

    def __truediv__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        g = list(self.tower.modulus(self.level))
        out = _ppowmod(list(self.coeffs), e, g, self.p)
        return self.tower.elem(self.level, out)

    def frobenius(self) -> "FFTowerElem":
        return self**self.p

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.tower.from_int(other)
        if not isinstance(other, FFTowerElem):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.p, self._minimal_form()))

    def _minimal_form(self):
        """Coefficient tuple at the smallest level containing the element."""
        for d in sorted(_divisors(self.level)):
            lifted = self.tower.embed(self, self.level)
            if (lifted ** (self.p**d)) == lifted:
                if d == self.level:
                    return self.coeffs
                pulled = self._pull_back(d)
                if pulled is not None:
                    return pulled
        return self.coeffs

    def _pull_back(self, d):
        # solve the F_p-linear system expressing self in the embedded basis
        m = self.level
        basis = []
        gen = self.tower.generator(d)
        acc = self.tower.one(d)
        for _ in range(d):
            basis.append(self.tower.embed(acc, m).coeffs)
            acc = acc * gen
        sol = _solve_mod_p([list(col) for col in basis], list(self.coeffs), self.p)
        return None if sol is None else tuple(sol)

    def multiplicative_order(self):
        if self.is_zero():
            raise UsageError("order of zero")
        n = self.p**self.level - 1
        order = n
        for q in _factor_order(n):
            while order % q == 0 and self ** (order // q) == self.tower.one(self.level):
                order //= q
        return order

    def __repr__(self):
        return f"FF({self.p}^{self.level}: {list(self.coeffs)})"


def _divisors(n):
    out = set()
    for d in range(1, int(n**0.5) + 1):
        if n % d == 0:
            out.add(d)
            out.add(n // d)
    return out


def _solve_mod_p(columns, rhs, p):
    """Solve sum_i v_i * columns[i] = rhs over F_p; None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    ncols = len(columns)
    nrows = len(rhs)
    aug = [[columns[j][i] % p for j in range(ncols)] + [rhs[i] % p] for i in range(nrows)]
    pivots = []
    row = 0
    for col in range(ncols):
        sel = next((r for r in range(row, nrows) if aug[r][col]), None)
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        inv = pow(aug[row][col], -1, p)
        aug[row] = [(x * inv) % p for x in aug[row]]
        for r in range(nrows):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    for r in range(row, nrows):
        if aug[r][ncols]:
            return None
    sol = [0] * ncols
    for r, col in enumerate(pivots):
        sol[col] = aug[r][ncols]
    return sol


def additive_poly_solve(
    coeffs: Sequence[FFTowerElem],
    target: FFTowerElem,
    degree_cap: int = 64,
) -> FFTowerElem:
    """Solve sum_j coeffs[j] * x^(p^j) = target in the tower.

    Tries the common level of the inputs, then its successive multiples,
    up to ``degree_cap``; the additive map is F_p-linear at every level so
    each attempt is one linear solve.  The returned root is verified by
    substitution.
    """
    coeffs = list(coeffs)
    if all(c.is_zero() for c in coeffs):
        raise UsageError("all coefficients of the additive polynomial vanish")
    tw = target.tower
    p = tw.p
    m0 = target.level
    for c in coeffs:
        m0 = m0 * c.level // math.gcd(m0, c.level)
    k = 1
    while m0 * k <= degree_cap:
        m = m0 * k
        cs = [tw.embed(c, m) for c in coeffs]
        tg = tw.embed(target, m)
        gen = tw.generator(m)
        basis_elem = tw.one(m)
        columns = []
        for _ in range(m):
            image = tw.zero(m)
            for j, cj in enumerate(cs):
                if not cj.is_zero():
                    image = image + cj * (basis_elem ** (p**j))
            columns.append(list(tw.embed(image, m).coeffs))
            basis_elem = basis_elem * gen
        sol = _solve_mod_p(columns, list(tg.coeffs), p)
        if sol is not None:
            x = tw.elem(m, sol)
            chk = tw.zero(m)
            for j, cj in enumerate(cs):
                chk = chk + cj * (x ** (p**j))
            if chk == tg:
                return x
        k += 1
    raise ResourceCapError(
        f"no root within the degree cap {degree_cap} (base level {m0})"
    )
