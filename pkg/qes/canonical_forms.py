"""The five pole forms of X S'' + Y S' + Z S = 0 and their coefficient formulas.

Each form writes Y/X as a sum of residues over the simple zeros of X plus a
polynomial drift:

    heun     X = prod_3 (z - d_s),    Y/X = sum alpha_s/(z - d_s)
    gheun1   X = prod_4 (z - e_s),    Y/X = sum mu_s/(z - e_s)
    gheun2   X = prod_3 (z - f_s),    Y/X = sum nu_s/(z - f_s) + nu
    gheun3   X = (z - g1)(z - g2),    Y/X = sigma1/(z - g1) + sigma2/(z - g2) + sigma z + kappa
    gheun4   X = z - h,               Y/X = eta/(z - h) + lambda z^2 + gamma z + delta
"""
from typing import Annotated, Dict, List, Literal, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from qes.errors import CoincidentPolesError, InvalidInputError
from qes.fields import ComplexValue
from qes.models import OdeSpec, canonical_root_key
from qes.poly import ComplexPoly

POLE_SEPARATION = 1e-8
DRIFT_TOLERANCE = 1e-10

Triple = Tuple[ComplexValue, ComplexValue, ComplexValue]
Quad = Tuple[ComplexValue, ComplexValue, ComplexValue, ComplexValue]


class _Form(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def poles(self) -> List[complex]:
        raise NotImplementedError

    def residues(self) -> List[complex]:
        raise NotImplementedError

    def drift(self) -> ComplexPoly:
        return ComplexPoly()


class HeunForm(_Form):
    kind: Literal["heun"] = "heun"
    d: Triple
    alpha: Triple

    def poles(self):
        return list(self.d)

    def residues(self):
        return list(self.alpha)


class GHeun1Form(_Form):
    kind: Literal["gheun1"] = "gheun1"
    e: Quad
    mu: Quad

    def poles(self):
        return list(self.e)

    def residues(self):
        return list(self.mu)


class GHeun2Form(_Form):
    kind: Literal["gheun2"] = "gheun2"
    f: Triple
    nu_s: Triple
    nu: ComplexValue

    def poles(self):
        return list(self.f)

    def residues(self):
        return list(self.nu_s)

    def drift(self):
        return ComplexPoly([self.nu])


class GHeun3Form(_Form):
    kind: Literal["gheun3"] = "gheun3"
    g1: ComplexValue
    g2: ComplexValue
    sigma1: ComplexValue
    sigma2: ComplexValue
    sigma: ComplexValue
    kappa: ComplexValue

    def poles(self):
        return [self.g1, self.g2]

    def residues(self):
        return [self.sigma1, self.sigma2]

    def drift(self):
        return ComplexPoly([self.kappa, self.sigma])


class GHeun4Form(_Form):
    kind: Literal["gheun4"] = "gheun4"
    h: ComplexValue
    eta: ComplexValue
    lambda_: ComplexValue = Field(alias="lambda")
    gamma: ComplexValue
    delta: ComplexValue

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    def poles(self):
        return [self.h]

    def residues(self):
        return [self.eta]

    def drift(self):
        return ComplexPoly([self.delta, self.gamma, self.lambda_])


CanonicalForm = Annotated[
    Union[HeunForm, GHeun1Form, GHeun2Form, GHeun3Form, GHeun4Form],
    Field(discriminator="kind"),
]
FORM_ADAPTER = TypeAdapter(CanonicalForm)
FORM_DEGREES = {"heun": 3, "gheun1": 4, "gheun2": 3, "gheun3": 2, "gheun4": 1}
FORM_KINDS = tuple(FORM_DEGREES)


def parse_form(data: dict) -> _Form:
    return FORM_ADAPTER.validate_python(data)


def _check_separation(poles: Sequence[complex]):
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            if abs(poles[i] - poles[j]) < POLE_SEPARATION:
                raise CoincidentPolesError(f"Poles {poles[i]} and {poles[j]} coincide")


def to_spec(form: _Form, n: int) -> OdeSpec:
    poles = form.poles()
    _check_separation(poles)
    x = ComplexPoly.from_roots(poles)
    y = form.drift() * x
    for s, residue in enumerate(form.residues()):
        y = y + ComplexPoly.from_roots(poles[:s] + poles[s + 1 :]).scale(residue)
    return OdeSpec.from_polys(x, y, n)


def from_spec(spec: OdeSpec, kind: str) -> _Form:
    if kind not in FORM_DEGREES:
        raise InvalidInputError(f"Unknown form {kind!r}; expected one of {', '.join(FORM_KINDS)}")
    x = spec.X
    if x.degree != FORM_DEGREES[kind]:
        raise InvalidInputError(f"Form {kind} needs deg X = {FORM_DEGREES[kind]}, got {x.degree}")

    lead = x.coeff(x.degree)
    x = x.scale(1 / lead)
    y = spec.Y.scale(1 / lead)
    poles = sorted((complex(p) for p in x.roots()), key=canonical_root_key)
    _check_separation(poles)

    drift, _ = divmod(y, x)
    dx = x.derivative()
    residues = [y(p) / dx(p) for p in poles]
    drift_coeffs = [drift.coeff(k) for k in range(3)]
    scale = max(1.0, y.max_abs_coeff)

    def require_drift_degree(max_degree: int):
        if any(abs(c) > DRIFT_TOLERANCE * scale for c in drift_coeffs[max_degree + 1 :]):
            raise InvalidInputError(f"Y/X has a polynomial part of degree > {max_degree} for form {kind}")

    if kind == "heun":
        require_drift_degree(-1)
        return HeunForm(d=tuple(poles), alpha=tuple(residues))
    if kind == "gheun1":
        require_drift_degree(-1)
        return GHeun1Form(e=tuple(poles), mu=tuple(residues))
    if kind == "gheun2":
        require_drift_degree(0)
        return GHeun2Form(f=tuple(poles), nu_s=tuple(residues), nu=drift_coeffs[0])
    if kind == "gheun3":
        require_drift_degree(1)
        return GHeun3Form(
            g1=poles[0], g2=poles[1], sigma1=residues[0], sigma2=residues[1],
            sigma=drift_coeffs[1], kappa=drift_coeffs[0],
        )
    return GHeun4Form(
        h=poles[0], eta=residues[0], lambda_=drift_coeffs[2], gamma=drift_coeffs[1], delta=drift_coeffs[0]
    )


def elementary_symmetric(values: Sequence[complex]) -> List[complex]:
    """[e0, e1, ..., ek] of the given values."""
    coeffs = np.array([1.0 + 0j])
    for v in values:
        coeffs = np.convolve(coeffs, [1.0, complex(v)])
    return [complex(c) for c in coeffs]


def gheun1_pq(e: Sequence[complex], mu: Sequence[complex]) -> Tuple[complex, complex]:
    """P = sum mu_s e1(others), Q = sum mu_s e2(others) via elementary symmetric functions."""
    _, e1, e2, _, _ = elementary_symmetric(e)
    p = sum(m * (e1 - es) for m, es in zip(mu, e))
    # e2 of the other three = e2 - es * e1(others)
    q = sum(m * (e2 - es * (e1 - es)) for m, es in zip(mu, e))
    return complex(p), complex(q)


def _sums(roots: Sequence[complex]) -> Tuple[complex, complex, complex]:
    z = np.asarray(roots, dtype=complex).reshape(-1)
    s1 = complex(z.sum())
    s2 = complex(np.sum(z**2))
    return s1, s2, (s1 * s1 - s2) / 2


def form_coeffs(form: _Form, n: int, roots: Sequence[complex]) -> Tuple[complex, complex, complex]:
    """(c2, c1, c0) from the per-form closed expressions, signs as implied by the general formulas."""
    if len(roots) != n:
        raise InvalidInputError(f"Expected {n} roots, got {len(roots)}")
    s1, s2, pairs = _sums(roots)

    if isinstance(form, HeunForm):
        alpha = sum(form.alpha)
        d1, d2, d3 = form.d
        a1, a2, a3 = form.alpha
        c1 = -n * (n - 1 + alpha)
        c0 = (
            -(2 * (n - 1) + alpha) * s1
            + n * (n - 1) * sum(form.d)
            + n * (a1 * (d2 + d3) + a2 * (d1 + d3) + a3 * (d1 + d2))
        )
        return 0j, complex(c1), complex(c0)

    if isinstance(form, GHeun1Form):
        mu = sum(form.mu)
        e_sum = sum(form.e)
        e2 = elementary_symmetric(form.e)[2]
        p, q = gheun1_pq(form.e, form.mu)
        c2 = -n * (mu + n - 1)
        c1 = -(mu + 2 * (n - 1)) * s1 + n * ((n - 1) * e_sum + p)
        c0 = (
            -(mu + 2 * (n - 1)) * s2
            - 2 * pairs
            + (2 * (n - 1) * e_sum + p) * s1
            - n * (n - 1) * e2
            - n * q
        )
        return complex(c2), complex(c1), complex(c0)

    if isinstance(form, GHeun2Form):
        f1, f2, f3 = form.f
        n1, n2, n3 = form.nu_s
        nu = form.nu
        shift = sum(form.nu_s) - nu * sum(form.f)
        c2 = -n * nu
        c1 = -nu * s1 - n * ((n - 1) + shift)
        c0 = (
            -nu * s2
            - (2 * (n - 1) + shift) * s1
            + n * (n - 1) * sum(form.f)
            + n * (n1 * (f2 + f3) + n2 * (f1 + f3) + n3 * (f1 + f2) - nu * (f1 * f2 + f1 * f3 + f2 * f3))
        )
        return complex(c2), complex(c1), complex(c0)

    if isinstance(form, GHeun3Form):
        return _gheun3_coeffs(form, n, s1, s2)

    if isinstance(form, GHeun4Form):
        return _gheun4_coeffs(form, n, s1, s2)

    raise InvalidInputError(f"Unsupported form {type(form).__name__}")


def _gheun3_coeffs(form: GHeun3Form, n: int, s1: complex, s2: complex):
    g_sum = form.g1 + form.g2
    drift = form.kappa - form.sigma * g_sum
    c2 = -n * form.sigma
    c1 = -form.sigma * s1 - n * drift
    c0 = (
        -form.sigma * s2
        - drift * s1
        - n * (n - 1)
        - n * (form.sigma1 + form.sigma2 + form.sigma * form.g1 * form.g2 - form.kappa * g_sum)
    )
    return complex(c2), complex(c1), complex(c0)


def _gheun4_coeffs(form: GHeun4Form, n: int, s1: complex, s2: complex):
    c2 = -n * form.lambda_
    c1 = -form.lambda_ * s1 - n * (form.gamma - form.lambda_ * form.h)
    c0 = -form.lambda_ * s2 - (form.gamma - form.lambda_ * form.h) * s1 - n * (form.delta - form.gamma * form.h)
    return complex(c2), complex(c1), complex(c0)


def gheun1_pq_literal(e: Sequence[complex], mu: Sequence[complex]) -> Tuple[complex, complex]:
    e1, e2, e3, e4 = e
    m1, m2, m3, m4 = mu
    p = m1 * (e2 + e3 + e4) + m2 * (e1 + e3 + e4) + m3 * (e1 + e2 + e4) + m4 * (e1 + e2 + e3)
    q = (
        m1 * (e2 * e3 + e2 * e4 + e3 * e4)
        + m2 * (e1 * e3 + e1 * e4 + e3 * e4)
        + m3 * (e1 * e2 + e1 * e4 + e2 * e4)
        + m4 * (e1 * e2 + e1 * e3 + e2 * e3)
    )
    return complex(p), complex(q)


def form_coeffs_printed(form: _Form, n: int, roots: Sequence[complex]) -> Tuple[complex, complex, complex]:
    """The per-form closed expressions with their signs as originally printed."""
    s1, s2, pairs = _sums(roots)
    if isinstance(form, GHeun1Form):
        mu = sum(form.mu)
        e_sum = sum(form.e)
        e2 = elementary_symmetric(form.e)[2]
        p, q = gheun1_pq_literal(form.e, form.mu)
        c2 = -n * (mu + n - 1)
        c1 = -(mu + 2 * (n - 1)) * s1 + n * ((n - 1) * e_sum + p)
        c0 = (
            -(mu + 2 * (n - 1)) * s2
            + 2 * pairs
            - (2 * (n - 1) * e_sum + p) * s1
            + n * (n - 1) * e2
            + q * n
        )
        return complex(c2), complex(c1), complex(c0)

    if isinstance(form, GHeun2Form):
        f1, f2, f3 = form.f
        n1, n2, n3 = form.nu_s
        nu = form.nu
        shift = sum(form.nu_s) - nu * sum(form.f)
        c2 = -n * nu
        c1 = -nu * s1 - n * ((n - 1) + shift)
        c0 = (
            -nu * s2
            - (2 * (n - 1) + shift) * s1
            + n * (n - 1) * sum(form.f)
            + (nu * (f1 * f2 + f1 * f3 + f2 * f3) - n1 * (f2 + f3) - n2 * (f1 + f3) - n3 * (f1 + f2)) * n
        )
        return complex(c2), complex(c1), complex(c0)

    # the remaining forms are printed as form_coeffs evaluates them
    return form_coeffs(form, n, roots)


def form_coeff_gaps(form: _Form, n: int, roots: Sequence[complex]) -> Dict[str, float]:
    printed = form_coeffs_printed(form, n, roots)
    derived = form_coeffs(form, n, roots)
    return {name: abs(p - d) for name, p, d in zip(("c2", "c1", "c0"), printed, derived)}


def fuchsian_check(form: HeunForm, n: int) -> Tuple[complex, complex, float]:
    alpha_sum = sum(form.alpha)
    alpha = complex(-n)
    beta = complex(alpha_sum + n - 1)
    return alpha, beta, float(abs(alpha + beta + 1 - alpha_sum))


def pole_form_bae_residuals(form: _Form, roots: Sequence[complex]) -> np.ndarray:
    """sum_{j != i} 2/(z_i - z_j) + sum_s r_s/(z_i - p_s) + drift(z_i) for each root."""
    z = np.asarray(roots, dtype=complex).reshape(-1)
    if z.size == 0:
        return np.zeros(0, dtype=complex)
    d = z[:, None] - z[None, :]
    off = ~np.eye(z.size, dtype=bool)
    repulsion = np.where(off, 2.0 / np.where(off, d, 1.0), 0.0).sum(axis=1)
    poles = np.array(form.poles(), dtype=complex)
    residues = np.array(form.residues(), dtype=complex)
    field = (residues[None, :] / (z[:, None] - poles[None, :])).sum(axis=1)
    return repulsion + field + form.drift().eval(z)
