"""Verification of positivity certificates on a cubic.

A v1 certificate writes p as v^T G0 v + f * w^T G1 w over the bases of
the degree-k functions and the localizing space; v2 uses the two factor
multipliers with degree-(k-1) Gram matrices.  Verification is dual:
dense sampling over curve points always applies, and a symbolic residual
is reported whenever every cross product has a polynomial representative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .bases import basis_Bk, basis_Rk1, basis_Vk
from .curves import CurveCase, chi_flags, multiplier, sample_points
from .linalg import SymmetricForm
from .moment import _products
from .poly import BivarPoly, normal_low


class ShapeMismatch(ValueError):
    pass


class NotPsd(ValueError):
    pass


@dataclass(frozen=True)
class Certificate:
    form: str  # "v1" | "v2"
    gram0: SymmetricForm
    gram1: SymmetricForm | None = None
    gram2: SymmetricForm | None = None


@dataclass(frozen=True)
class CertificateResidual:
    sampled: float
    symbolic: float | None

    def ok(self, tol=1e-7):
        sym_ok = self.symbolic is None or self.symbolic <= tol
        return self.sampled <= tol and sym_ok


def verify_certificate(p: BivarPoly, cert: Certificate, case: CurveCase, k: int,
                       n_samples=200, psd_tol=None) -> CertificateResidual:
    if p.degree() > 2 * k:
        raise ShapeMismatch(f"polynomial degree {p.degree()} exceeds 2k")
    b0 = basis_Bk(case, k)
    if cert.gram0.size != len(b0):
        raise ShapeMismatch("gram0 size does not match the degree-k basis")
    terms = [(1.0, None, b0.elements, cert.gram0, "Bk")]
    if cert.form == "v1":
        if cert.gram1 is not None:
            bv = basis_Vk(case, k)
            if cert.gram1.size != len(bv):
                raise ShapeMismatch("gram1 size does not match the localizing basis")
            terms.append((1.0, multiplier(case).f, bv.elements, cert.gram1, "Vk"))
    elif cert.form == "v2":
        if not case.is_v2():
            raise ShapeMismatch(f"{case.id} does not use the two-factor form")
        c1, c2 = chi_flags(case)
        br = basis_Rk1(case, k)
        for g, chi, fi in ((cert.gram1, c1, 0), (cert.gram2, c2, 1)):
            if g is None:
                continue
            if g.size != len(br):
                raise ShapeMismatch("v2 gram size does not match the degree-(k-1) basis")
            if chi == 0:
                continue
            from .poly import RationalElem

            fac = RationalElem(case.factors()[fi], BivarPoly.const(1.0))
            terms.append((float(chi), fac, br.elements, g, None))
    else:
        raise ShapeMismatch(f"unknown certificate form {cert.form!r}")

    for _, _, _, g, _ in terms:
        if not linalg.is_psd(g.known(), psd_tol):
            raise NotPsd("certificate Gram matrix has a negative eigenvalue")

    pts = sample_points(case, n_samples, seed=11)
    sampled = 0.0
    pscale = max(1.0, p.max_abs_coeff())
    for x, y, _ in pts:
        total = 0.0
        usable = True
        for chi, f, els, g, _ in terms:
            try:
                v = np.array([e.eval(x, y) for e in els])
                fval = 1.0 if f is None else f.eval(x, y)
            except Exception:
                usable = False
                break
            total += chi * fval * float(v @ g.known() @ v)
        if usable:
            sampled = max(sampled, abs(total - p.eval(x, y)) / pscale)

    symbolic = _symbolic_residual(p, terms, case, k)
    return CertificateResidual(sampled, symbolic)


def _symbolic_residual(p, terms, case, k):
    total = BivarPoly.zero()
    for chi, f, els, g, which in terms:
        if which in ("Bk", "Vk"):
            prods = _products(case, k, which)
        else:
            prods = None
        G = g.known()
        n = G.shape[0]
        for r in range(n):
            for s in range(n):
                if prods is not None:
                    rep = prods[r][s]
                    if rep is None:
                        return None
                    total = total + (chi * G[r, s]) * BivarPoly(rep)
                else:
                    q = normal_low(
                        els[r].rat.numerator * els[s].rat.numerator * f.numerator, case
                    )
                    total = total + (chi * G[r, s]) * q
    diff = normal_low(total - p, case)
    return diff.max_abs_coeff() / max(1.0, p.max_abs_coeff())


def sos_from_gram(Q: SymmetricForm, basis, tol=1e-12):
    """Eigen-split Q = sum_l lambda_l u_l u_l^T into explicit squares.

    Returns [(coefficient vector sqrt(lambda)*u, label list)] with
    eigenvalues below tol*max dropped.
    """
    M = Q.known() if isinstance(Q, SymmetricForm) else np.asarray(Q, dtype=float)
    w, V = np.linalg.eigh(M)
    top = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    out = []
    for lam, vec in zip(w, V.T):
        if lam < -1e-9 * top:
            raise NotPsd("matrix is not psd")
        if lam > tol * top:
            out.append(np.sqrt(lam) * vec)
    return out


def reassemble_gram(squares, n):
    """Sum of outer products of the square vectors; inverse of sos_from_gram."""
    M = np.zeros((n, n))
    for v in squares:
        M += np.outer(v, v)
    return M
