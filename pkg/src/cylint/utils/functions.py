"""One-variable functions with analytic derivatives up to third order.

Every arbitrary function slot of a catalog family (rho(r), tau(phi), W3(Z),
...) is a Function1D. Derivatives are exact; the finite-difference
consistency gate in check_derivatives exists to catch transcription errors.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, Iterable, Optional, Sequence

logger = logging.getLogger(__name__)

Jet = tuple[float, float, float, float]

PERIOD = 2.0 * math.pi
PERIODIC_TOL = 1e-10
DERIVATIVE_TOL = 1e-6


class FunctionGrammarError(Exception):
    """Exception raised for unknown kinds, bad arguments or failed gates."""

    pass


class Function1D(ABC):
    """Scalar function of one variable with derivatives d1, d2, d3."""

    kind: str = "abstract"

    @abstractmethod
    def jet(self, x: float) -> Jet:
        """Return (f, f', f'', f''') at x."""

    def __call__(self, x: float) -> float:
        return self.jet(x)[0]

    def d1(self, x: float) -> float:
        return self.jet(x)[1]

    def d2(self, x: float) -> float:
        return self.jet(x)[2]

    def d3(self, x: float) -> float:
        return self.jet(x)[3]

    @property
    def is_zero(self) -> bool:
        return False

    def args(self) -> dict[str, float]:
        """Arguments the function was built from, for reports."""
        return {}

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.args().items())
        return f"{self.kind}({inner})"

    def __repr__(self) -> str:
        return self.describe()

    def __add__(self, other: "Function1D") -> "Function1D":
        return Sum(self, other)

    def __neg__(self) -> "Function1D":
        return Scaled(-1.0, self)


class Zero(Function1D):
    kind = "zero"

    def jet(self, x: float) -> Jet:
        return (0.0, 0.0, 0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return True


class Const(Function1D):
    kind = "const"

    def __init__(self, c: float = 0.0):
        self.c = float(c)

    def jet(self, x: float) -> Jet:
        return (self.c, 0.0, 0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.c == 0.0

    def args(self) -> dict[str, float]:
        return {"c": self.c}


class Poly(Function1D):
    """Polynomial c0 + c1 x + ... + c4 x^4."""

    kind = "poly"

    def __init__(self, c0: float = 0.0, c1: float = 0.0, c2: float = 0.0,
                 c3: float = 0.0, c4: float = 0.0):
        self.coeffs = (float(c0), float(c1), float(c2), float(c3), float(c4))

    def jet(self, x: float) -> Jet:
        c0, c1, c2, c3, c4 = self.coeffs
        f = c0 + x * (c1 + x * (c2 + x * (c3 + x * c4)))
        f1 = c1 + x * (2 * c2 + x * (3 * c3 + x * 4 * c4))
        f2 = 2 * c2 + x * (6 * c3 + x * 12 * c4)
        f3 = 6 * c3 + x * 24 * c4
        return (f, f1, f2, f3)

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coeffs)

    def args(self) -> dict[str, float]:
        return {f"c{i}": c for i, c in enumerate(self.coeffs)}


class Power(Function1D):
    """a * x^n. Non-integer n requires x > 0."""

    kind = "power"

    def __init__(self, a: float = 1.0, n: float = 1.0):
        self.a = float(a)
        self.n = float(n)

    def jet(self, x: float) -> Jet:
        if x < 0.0 and not self.n.is_integer():
            raise FunctionGrammarError(f"power(n={self.n:g}) needs x > 0, got {x}")
        g = _power_jet(x, self.n)
        return (self.a * g[0], self.a * g[1], self.a * g[2], self.a * g[3])

    @property
    def is_zero(self) -> bool:
        return self.a == 0.0

    def args(self) -> dict[str, float]:
        return {"a": self.a, "n": self.n}


class Trig(Function1D):
    """a sin(kx) + b cos(kx)."""

    kind = "trig"

    def __init__(self, a: float = 0.0, b: float = 0.0, k: float = 1.0):
        self.a = float(a)
        self.b = float(b)
        self.k = float(k)

    def jet(self, x: float) -> Jet:
        a, b, k = self.a, self.b, self.k
        s, c = math.sin(k * x), math.cos(k * x)
        even = a * s + b * c
        odd = a * c - b * s
        return (even, k * odd, -k * k * even, -k * k * k * odd)

    @property
    def is_zero(self) -> bool:
        return self.a == 0.0 and self.b == 0.0

    def args(self) -> dict[str, float]:
        return {"a": self.a, "b": self.b, "k": self.k}


class Exp2(Function1D):
    """a e^{kx} + b e^{-kx}."""

    kind = "exp2"

    def __init__(self, a: float = 0.0, b: float = 0.0, k: float = 1.0):
        self.a = float(a)
        self.b = float(b)
        self.k = float(k)

    def jet(self, x: float) -> Jet:
        a, b, k = self.a, self.b, self.k
        ep = a * math.exp(k * x)
        em = b * math.exp(-k * x)
        return (ep + em, k * (ep - em), k * k * (ep + em), k**3 * (ep - em))

    @property
    def is_zero(self) -> bool:
        return self.a == 0.0 and self.b == 0.0

    def args(self) -> dict[str, float]:
        return {"a": self.a, "b": self.b, "k": self.k}


def _power_jet(x: float, n: float) -> Jet:
    """(x^n, n x^(n-1), n(n-1) x^(n-2), n(n-1)(n-2) x^(n-3)), zero where the
    falling factorial vanishes."""
    out = []
    coeff = 1.0
    for j in range(4):
        if coeff == 0.0:
            out.append(0.0)
        else:
            if x == 0.0 and n - j < 0.0:
                raise FunctionGrammarError(f"x^{n:g} is singular at x = 0")
            out.append(coeff * x ** (n - j))
        coeff *= n - j
    return (out[0], out[1], out[2], out[3])


def compose_power(inner: Jet, n: float) -> Jet:
    """Jet of u^n given the jet of u (chain rule to third order)."""
    u, u1, u2, u3 = inner
    if u <= 0.0 and not float(n).is_integer():
        raise FunctionGrammarError(f"base of a fractional power must stay positive, got {u}")
    g0, g1, g2, g3 = _power_jet(u, n)
    return (
        g0,
        g1 * u1,
        g2 * u1 * u1 + g1 * u2,
        g3 * u1**3 + 3.0 * g2 * u1 * u2 + g1 * u3,
    )


class TrigPow(Function1D):
    """(c + a sin(kx) + b cos(kx))^n with a positive base."""

    kind = "trigpow"

    def __init__(self, c: float = 1.0, a: float = 0.0, b: float = 0.0,
                 k: float = 1.0, n: float = 1.0):
        self.c = float(c)
        self.a = float(a)
        self.b = float(b)
        self.k = float(k)
        self.n = float(n)
        self._base = Trig(a, b, k)
        if self.c - math.hypot(self.a, self.b) <= 0.0 and not self.n.is_integer():
            raise FunctionGrammarError(
                "trigpow base c + a sin + b cos must stay positive: "
                f"c={self.c:g} <= hypot(a, b)={math.hypot(self.a, self.b):g}"
            )

    def jet(self, x: float) -> Jet:
        t0, t1, t2, t3 = self._base.jet(x)
        return compose_power((self.c + t0, t1, t2, t3), self.n)

    def args(self) -> dict[str, float]:
        return {"c": self.c, "a": self.a, "b": self.b, "k": self.k, "n": self.n}


class Sum(Function1D):
    kind = "sum"

    def __init__(self, *terms: Function1D):
        self.terms = tuple(t for t in terms if not t.is_zero)

    def jet(self, x: float) -> Jet:
        f0 = f1 = f2 = f3 = 0.0
        for t in self.terms:
            a0, a1, a2, a3 = t.jet(x)
            f0 += a0
            f1 += a1
            f2 += a2
            f3 += a3
        return (f0, f1, f2, f3)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def describe(self) -> str:
        return " + ".join(t.describe() for t in self.terms) or "zero()"


class Scaled(Function1D):
    kind = "scaled"

    def __init__(self, factor: float, inner: Function1D):
        self.factor = float(factor)
        self.inner = inner

    def jet(self, x: float) -> Jet:
        c = self.factor
        f0, f1, f2, f3 = self.inner.jet(x)
        return (c * f0, c * f1, c * f2, c * f3)

    @property
    def is_zero(self) -> bool:
        return self.factor == 0.0 or self.inner.is_zero

    def describe(self) -> str:
        return f"{self.factor:g}*{self.inner.describe()}"


class PowerOf(Function1D):
    """inner(x)^n."""

    kind = "powerof"

    def __init__(self, inner: Function1D, n: float):
        self.inner = inner
        self.n = float(n)

    def jet(self, x: float) -> Jet:
        return compose_power(self.inner.jet(x), self.n)

    def describe(self) -> str:
        return f"({self.inner.describe()})^{self.n:g}"


class JetFunction(Function1D):
    """Adapter around a callable returning a jet (ODE profiles, elliptic forms)."""

    kind = "profile"

    def __init__(self, jet_fn: Callable[[float], Jet], label: str = "profile"):
        self._jet_fn = jet_fn
        self.label = label

    def jet(self, x: float) -> Jet:
        return self._jet_fn(x)

    def describe(self) -> str:
        return self.label


# kind -> (class, allowed argument names)
_KINDS: dict[str, tuple[type[Function1D], tuple[str, ...]]] = {
    "zero": (Zero, ()),
    "const": (Const, ("c",)),
    "poly": (Poly, ("c0", "c1", "c2", "c3", "c4")),
    "power": (Power, ("a", "n")),
    "trig": (Trig, ("a", "b", "k")),
    "exp2": (Exp2, ("a", "b", "k")),
    "trigpow": (TrigPow, ("c", "a", "b", "k", "n")),
}

FUNCTION_KINDS = tuple(_KINDS)


def make_function(kind: str, args: Optional[dict[str, float]] = None) -> Function1D:
    """
    Build a grammar function from its kind and named arguments.

    Args:
        kind: One of FUNCTION_KINDS
        args: Argument values; missing ones take the class defaults

    Returns:
        The constructed Function1D

    Raises:
        FunctionGrammarError: For unknown kinds or argument names
    """
    if kind not in _KINDS:
        raise FunctionGrammarError(
            f"Unknown function kind '{kind}'. Known kinds: {', '.join(FUNCTION_KINDS)}"
        )
    cls, allowed = _KINDS[kind]
    args = dict(args or {})
    unknown = sorted(set(args) - set(allowed))
    if unknown:
        raise FunctionGrammarError(
            f"Unknown argument(s) {', '.join(unknown)} for kind '{kind}' "
            f"(allowed: {', '.join(allowed) or 'none'})"
        )
    return cls(**args)


def check_periodic(f: Function1D, samples: Optional[Sequence[float]] = None,
                   name: str = "slot") -> None:
    """
    Check 2*pi periodicity of an angular slot.

    Trigonometric kinds additionally need an integer wave number k.

    Raises:
        FunctionGrammarError: If the function is not 2*pi periodic
    """
    for obj in _leaves(f):
        k = getattr(obj, "k", None)
        if isinstance(obj, (Trig, TrigPow)) and k is not None and not float(k).is_integer():
            raise FunctionGrammarError(
                f"{name}: periodic slot requires integer k, got k={k:g}"
            )
    xs = samples if samples is not None else [0.1 + 0.37 * i for i in range(17)]
    for x in xs:
        gap = abs(f(x) - f(x + PERIOD))
        if gap > PERIODIC_TOL:
            raise FunctionGrammarError(
                f"{name}: not 2*pi periodic, |f({x:.3g}) - f({x:.3g}+2pi)| = {gap:.3g}"
            )


def check_derivatives(f: Function1D, samples: Iterable[float], name: str = "slot",
                      h: float = 1e-4) -> None:
    """
    Consistency gate: analytic d1 must match a centred difference of f.

    Raises:
        FunctionGrammarError: If |d1 - fd| > 1e-6 * max(1, |d1|) at a sample
    """
    from cylint.utils.finite_diff import central_diff

    for x in samples:
        d1 = f.d1(x)
        fd = central_diff(f, x, h * max(1.0, abs(x)))
        if abs(d1 - fd) > DERIVATIVE_TOL * max(1.0, abs(d1)):
            raise FunctionGrammarError(
                f"{name}: derivative gate failed at x={x:.6g} (analytic {d1:.12g}, "
                f"finite difference {fd:.12g})"
            )


def is_identically_zero(f: Function1D, samples: Iterable[float]) -> bool:
    """True if f is structurally zero or vanishes at every sample."""
    if f.is_zero:
        return True
    return all(f(x) == 0.0 for x in samples)


def _leaves(f: Function1D) -> list[Function1D]:
    if isinstance(f, Sum):
        return [leaf for t in f.terms for leaf in _leaves(t)]
    if isinstance(f, Scaled):
        return _leaves(f.inner)
    if isinstance(f, PowerOf):
        return _leaves(f.inner)
    return [f]
