"""Inertia operators on circle fields, realized as real even Fourier multipliers.

An operator is described by an :class:`InertiaSpec` and acts on a field by
multiplying the coefficient of mode k by the symbol value s_{|k|}.  Even,
real symbols make every operator symmetric for the discrete L2 pairing by
construction.  Supported families:

* ``mu_minus_dxx``   -- mean minus second derivative: s_0 = 1, s_k = (2 pi k)^2.
* ``helmholtz``      -- 1 - lam * d_xx: s_k = 1 + lam (2 pi k)^2 (lam = 0 is the identity).
* ``neg_dxx``        -- -d_xx: s_k = (2 pi k)^2 with a kernel on the constants;
                        its inverse is defined on mean-zero fields with the
                        mean-zero gauge.
* ``diagonal``       -- explicit table {|k|: s_k}.

``invert_mu_dxx_integral`` provides a second, independent route to the
inverse of the mean-minus-second-derivative operator through exact nested
antiderivatives; it never divides by the symbol and is used to cross-check
the spectral division.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from . import spectral
from .spectral import TWO_PI

__all__ = [
    "InertiaSpec",
    "MU_MINUS_DXX",
    "NEG_DXX",
    "IDENTITY",
    "apply",
    "invert",
    "invert_mu_dxx_integral",
    "check_symmetry",
    "normalize",
]

_KINDS = ("mu_minus_dxx", "helmholtz", "neg_dxx", "diagonal")


@dataclass(frozen=True)
class InertiaSpec:
    """Description of a Fourier-multiplier inertia operator.

    ``scale`` multiplies the whole symbol; it is how 2A-style rescalings are
    represented and what :func:`normalize` adjusts.
    """

    kind: str
    lam: float = 0.0
    symbol: tuple[tuple[int, float], ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown inertia kind {self.kind!r}")
        if not np.isfinite(self.scale) or self.scale == 0.0:
            raise ValueError("scale must be finite and nonzero")
        if self.kind == "helmholtz":
            if not np.isfinite(self.lam) or self.lam < 0.0:
                raise ValueError("helmholtz lam must be finite and >= 0")
        if self.kind == "diagonal":
            if not self.symbol:
                raise ValueError("diagonal operator needs a symbol table")
            for k, s in self.symbol:
                if k < 0 or k != int(k):
                    raise ValueError("diagonal symbol keys must be |k| integers")
                if not np.isfinite(s) or s == 0.0:
                    raise ValueError("diagonal symbol entries must be finite and nonzero")

    @classmethod
    def mu_minus_dxx(cls) -> "InertiaSpec":
        return cls(kind="mu_minus_dxx")

    @classmethod
    def helmholtz(cls, lam: float) -> "InertiaSpec":
        return cls(kind="helmholtz", lam=float(lam))

    @classmethod
    def neg_dxx(cls) -> "InertiaSpec":
        return cls(kind="neg_dxx")

    @classmethod
    def diagonal(cls, symbol: Mapping[int, float]) -> "InertiaSpec":
        table = tuple(sorted((int(k), float(s)) for k, s in symbol.items()))
        return cls(kind="diagonal", symbol=table)

    def symbol_at(self, k: int) -> float:
        """Symbol value s_{|k|}, including the scale factor."""
        k = abs(int(k))
        if self.kind == "mu_minus_dxx":
            base = 1.0 if k == 0 else (TWO_PI * k) ** 2
        elif self.kind == "helmholtz":
            base = 1.0 + self.lam * (TWO_PI * k) ** 2
        elif self.kind == "neg_dxx":
            base = (TWO_PI * k) ** 2
        else:
            table = dict(self.symbol)
            if k not in table:
                raise ValueError(f"diagonal symbol has no entry for |k| = {k}")
            base = table[k]
        return self.scale * base

    def multipliers(self, n: int) -> np.ndarray:
        """Symbol values s_0 .. s_{n/2} for an n-point grid."""
        k = np.arange(n // 2 + 1)
        if self.kind == "mu_minus_dxx":
            s = (TWO_PI * k) ** 2
            s[0] = 1.0
        elif self.kind == "helmholtz":
            s = 1.0 + self.lam * (TWO_PI * k) ** 2
        elif self.kind == "neg_dxx":
            s = (TWO_PI * k) ** 2
        else:
            table = dict(self.symbol)
            missing = [int(j) for j in k if int(j) not in table]
            if missing:
                raise ValueError(f"diagonal symbol has no entry for |k| = {missing[0]}")
            s = np.array([table[int(j)] for j in k], dtype=float)
        return self.scale * s

    @property
    def invertible_everywhere(self) -> bool:
        return self.kind != "neg_dxx"

    def describe(self) -> str:
        if self.kind == "mu_minus_dxx":
            text = "mean minus second derivative: s_0 = 1, s_k = (2*pi*k)^2"
        elif self.kind == "helmholtz":
            text = f"1 - {self.lam}*d_xx: s_k = 1 + {self.lam}*(2*pi*k)^2"
        elif self.kind == "neg_dxx":
            text = "-d_xx: s_k = (2*pi*k)^2, kernel on constants"
        else:
            text = "diagonal multiplier " + repr(dict(self.symbol))
        if self.scale != 1.0:
            text = f"{self.scale} * ({text})"
        return text

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "helmholtz":
            out["lam"] = self.lam
        if self.kind == "diagonal":
            out["symbol"] = {str(k): s for k, s in self.symbol}
        if self.scale != 1.0:
            out["scale"] = self.scale
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "InertiaSpec":
        if not isinstance(data, Mapping):
            raise ValueError("inertia: expected an object with a 'kind' entry")
        kind = data.get("kind")
        if kind not in _KINDS:
            raise ValueError(f"inertia.kind: expected one of {_KINDS}, got {kind!r}")
        scale = float(data.get("scale", 1.0))
        if kind == "helmholtz":
            if "lam" not in data:
                raise ValueError("inertia.lam: required for the helmholtz kind")
            return cls(kind=kind, lam=float(data["lam"]), scale=scale)
        if kind == "diagonal":
            raw = data.get("symbol")
            if not isinstance(raw, Mapping) or not raw:
                raise ValueError("inertia.symbol: required table {|k|: value} for the diagonal kind")
            table = tuple(sorted((int(k), float(s)) for k, s in raw.items()))
            return cls(kind=kind, symbol=table, scale=scale)
        return cls(kind=kind, scale=scale)


MU_MINUS_DXX = InertiaSpec.mu_minus_dxx()
NEG_DXX = InertiaSpec.neg_dxx()
IDENTITY = InertiaSpec.helmholtz(0.0)

MEAN_TOL = 1e-10


def apply(spec: InertiaSpec, u: np.ndarray) -> np.ndarray:
    """Apply the operator: coefficient c_k is multiplied by s_{|k|}."""
    u = np.asarray(u, dtype=float)
    s = spec.multipliers(u.size)
    return np.fft.irfft(np.fft.rfft(u) * s, u.size)


def invert(spec: InertiaSpec, f: np.ndarray) -> np.ndarray:
    """Solve A u = f by dividing coefficients by the symbol.

    For ``neg_dxx`` the constants span kernel and cokernel: f must have
    zero mean (within 1e-10) and the returned field takes the mean-zero
    gauge.
    """
    f = np.asarray(f, dtype=float)
    n = f.size
    s = spec.multipliers(n)
    c = np.fft.rfft(f)
    if s[0] == 0.0:
        if abs(c[0].real) / n > MEAN_TOL:
            raise ValueError(
                "input is outside the operator range: -d_xx requires zero mean, "
                f"got mean {c[0].real / n:.3e}")
        c[0] = 0.0
        c[1:] = c[1:] / s[1:]
    else:
        c = c / s
    return np.fft.irfft(c, n)


def normalize(spec: InertiaSpec) -> InertiaSpec:
    """Rescale the symbol so constants map to themselves (s_0 = 1)."""
    if spec.kind == "neg_dxx":
        raise ValueError("cannot normalize: s_0 = 0 (constants are in the kernel)")
    s0 = spec.symbol_at(0)
    return replace(spec, scale=spec.scale / s0)


def check_symmetry(spec: InertiaSpec, n: int = 64, trials: int = 20, seed: int = 0) -> float:
    """Worst normalized L2-symmetry defect |<Au,v> - <u,Av>| over random pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = spectral.random_trig_field(n, n // 3, rng)
        v = spectral.random_trig_field(n, n // 3, rng)
        defect = abs(spectral.inner_l2(apply(spec, u), v) - spectral.inner_l2(u, apply(spec, v)))
        scale = np.sqrt(spectral.inner_l2(u, u) * spectral.inner_l2(v, v))
        worst = max(worst, defect / scale)
    return worst


class _PolyTrig:
    """q(x) + sum_k c_k e^{2 pi i k x} with exact running-integral arithmetic.

    Modes are stored symmetrically (both +-Nyquist halves) so repeated
    integration stays exact for any real field.  Polynomials are ascending
    coefficient arrays.
    """

    def __init__(self, poly: np.ndarray, k: np.ndarray, c: np.ndarray):
        self.poly = poly
        self.k = k
        self.c = c

    @classmethod
    def from_field(cls, f: np.ndarray) -> "_PolyTrig":
        c = spectral.transform(f)
        n = f.size
        h = n // 2
        ks = np.concatenate((np.arange(1, h), np.arange(h + 1, n) - n, [h, -h]))
        cs = np.concatenate((c[1:h], c[h + 1:], [0.5 * c[h], 0.5 * c[h]]))
        return cls(np.array([c[0].real]), ks, cs)

    def integral(self) -> "_PolyTrig":
        p = self.poly
        pint = np.concatenate(([0.0], p / np.arange(1.0, p.size + 1.0)))
        cnew = self.c / (2j * np.pi * self.k)
        pint[0] -= float(np.sum(cnew).real)
        return _PolyTrig(pint, self.k, cnew)

    def value_at_one(self) -> float:
        # e^{2 pi i k} = 1 exactly, so the trig part contributes sum(c_k)
        return float(np.polynomial.polynomial.polyval(1.0, self.poly) + np.sum(self.c).real)

    def sample(self, x: np.ndarray) -> np.ndarray:
        phases = np.exp((2j * np.pi) * np.outer(x, self.k))
        return np.polynomial.polynomial.polyval(x, self.poly) + np.real(phases @ self.c)


def invert_mu_dxx_integral(f: np.ndarray) -> np.ndarray:
    """Invert the mean-minus-second-derivative operator by nested integrals.

    Division-free closed form built from running integrals of f:

        (x^2/2 - x/2 + 13/12) I1 + (x - 1/2) I2(1) - I2(x) + I3(1)

    where I1 is the mean and I2, I3 are the second and third nested
    antiderivatives from zero.  Exact on trig polynomials; independent of
    :func:`invert`, which divides by the symbol instead.
    """
    f = np.asarray(f, dtype=float)
    n = f.size
    g = _PolyTrig.from_field(f)
    i2 = g.integral().integral()
    i3 = i2.integral()
    x = spectral.grid(n)
    poly = 0.5 * x * x - 0.5 * x + 13.0 / 12.0
    return poly * spectral.mean(f) + (x - 0.5) * i2.value_at_one() - i2.sample(x) + i3.value_at_one()
