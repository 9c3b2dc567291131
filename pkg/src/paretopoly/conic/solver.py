"""Reference dense primal-dual interior-point solver.

Homogeneous self-dual embedding with Nesterov-Todd scaling and Mehrotra
predictor-corrector steps, after the classic conelp construction.  Solves

    min c'x  s.t.  Gx + s = h,  Ax = b,  s in K,

where K is a product of nonnegative orthants and PSD cones (svec rows).
Second-order cones are lowered to PSD arrow matrices before reaching this
layer.  Dense factorizations only; desk-scale ceiling is a few thousand
scalar variables and PSD orders in the tens.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from ..errors import NumericalBreakdown, Stalled
from .program import SolverForm, smat, svec

__all__ = ["SolverOptions", "RawSolution", "solve_form"]

_SQRT2 = np.sqrt(2.0)


@dataclass
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 200
    verbose: bool = False


@dataclass
class RawSolution:
    status: str  # optimal | infeasible | unbounded | stalled
    x: np.ndarray
    s: np.ndarray
    y: np.ndarray
    z: np.ndarray
    pobj: Optional[float]
    residuals: dict
    iterations: int


class _Seg:
    """One cone segment of the slack vector."""

    def __init__(self, kind: str, start: int, length: int, order: int = 0):
        self.kind = kind
        self.sl = slice(start, start + length)
        self.order = order
        if kind == "s":
            idx = [(i, j) for i in range(order) for j in range(i, order)]
            self.iu = np.array([i for i, _ in idx])
            self.ju = np.array([j for _, j in idx])
            self.diag = self.iu == self.ju


def _segments(dims) -> list[_Seg]:
    segs = []
    pos = 0
    for kind, size in dims:
        if kind == "l":
            segs.append(_Seg("l", pos, size))
            pos += size
        elif kind == "s":
            q = size * (size + 1) // 2
            segs.append(_Seg("s", pos, q, order=size))
            pos += q
        else:
            raise ValueError(f"unsupported cone {kind!r} at solver level")
    return segs


def _smat_seg(seg: _Seg, v: np.ndarray) -> np.ndarray:
    M = np.zeros((seg.order, seg.order))
    vals = np.where(seg.diag, v, v / _SQRT2)
    M[seg.iu, seg.ju] = vals
    M[seg.ju, seg.iu] = vals
    return M


def _svec_seg(seg: _Seg, M: np.ndarray) -> np.ndarray:
    sym = 0.5 * (M + M.T)
    vals = sym[seg.iu, seg.ju]
    return np.where(seg.diag, vals, vals * _SQRT2)


def _cone_e(segs, n) -> np.ndarray:
    e = np.zeros(n)
    for seg in segs:
        if seg.kind == "l":
            e[seg.sl] = 1.0
        else:
            v = np.zeros(seg.sl.stop - seg.sl.start)
            v[np.nonzero(seg.diag)[0]] = 1.0
            e[seg.sl] = v
    return e


def _min_eig(segs, v) -> float:
    worst = np.inf
    for seg in segs:
        if seg.kind == "l":
            if seg.sl.stop > seg.sl.start:
                worst = min(worst, float(np.min(v[seg.sl])))
        else:
            worst = min(worst, float(np.linalg.eigvalsh(_smat_seg(seg, v[seg.sl]))[0]))
    return worst if np.isfinite(worst) else 0.0


def _shift_into_cone(segs, v, e) -> np.ndarray:
    alpha = -_min_eig(segs, v)
    if alpha >= -1e-8 * max(1.0, float(np.linalg.norm(v, np.inf))):
        return v + (1.0 + alpha) * e
    return v


def _psd_factor(S: np.ndarray) -> np.ndarray:
    """Lower factor L with S = L L'; falls back to eigh when chol fails."""
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh(0.5 * (S + S.T))
        w = np.clip(w, 1e-14 * max(1.0, float(w.max())), None)
        return V * np.sqrt(w)


class _Scaling:
    """Nesterov-Todd scaling state for one iteration."""

    def __init__(self, segs, s, z):
        self.segs = segs
        self.w = {}
        self.lam = np.zeros_like(s)
        for i, seg in enumerate(segs):
            if seg.kind == "l":
                ws = np.sqrt(s[seg.sl] / z[seg.sl])
                self.w[i] = ws
                self.lam[seg.sl] = np.sqrt(s[seg.sl] * z[seg.sl])
            else:
                S = _smat_seg(seg, s[seg.sl])
                Z = _smat_seg(seg, z[seg.sl])
                Ls = _psd_factor(S)
                Lz = _psd_factor(Z)
                U, sig, Vt = np.linalg.svd(Lz.T @ Ls)
                R = Ls @ Vt.T @ np.diag(1.0 / np.sqrt(sig))
                Rinv = np.diag(np.sqrt(sig)) @ Vt @ np.linalg.inv(Ls)
                self.w[i] = (R, Rinv, sig)
                lam_m = np.zeros(seg.sl.stop - seg.sl.start)
                lam_m[np.nonzero(seg.diag)[0]] = sig
                self.lam[seg.sl] = lam_m

    def apply_W(self, v):
        """W v: scaled z-direction."""
        out = np.empty_like(v)
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                out[seg.sl] = self.w[i] * v[seg.sl]
            else:
                R, _, _ = self.w[i]
                out[seg.sl] = _svec_seg(seg, R.T @ _smat_seg(seg, v[seg.sl]) @ R)
        return out

    def apply_Wt(self, v):
        out = np.empty_like(v)
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                out[seg.sl] = self.w[i] * v[seg.sl]
            else:
                R, _, _ = self.w[i]
                out[seg.sl] = _svec_seg(seg, R @ _smat_seg(seg, v[seg.sl]) @ R.T)
        return out

    def apply_WinvT(self, v):
        """W^{-T} v: scaled s-direction."""
        out = np.empty_like(v)
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                out[seg.sl] = v[seg.sl] / self.w[i]
            else:
                _, Rinv, _ = self.w[i]
                out[seg.sl] = _svec_seg(seg, Rinv @ _smat_seg(seg, v[seg.sl]) @ Rinv.T)
        return out

    def apply_WtWinv(self, V: np.ndarray) -> np.ndarray:
        """(W'W)^{-1} applied to each column of V (2-D array)."""
        out = np.empty_like(V)
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                out[seg.sl, :] = V[seg.sl, :] / (self.w[i] ** 2)[:, None]
            else:
                R, Rinv, _ = self.w[i]
                Ti = Rinv.T @ Rinv  # (R R')^{-1}
                q = seg.sl.stop - seg.sl.start
                cols = V[seg.sl, :]
                n = cols.shape[1]
                M = np.zeros((n, seg.order, seg.order))
                vals = np.where(seg.diag[:, None], cols, cols / _SQRT2)
                M[:, seg.iu, seg.ju] = vals.T
                M[:, seg.ju, seg.iu] = vals.T
                out_m = np.einsum("ab,nbc,cd->nad", Ti, M, Ti)
                sym = out_m[:, seg.iu, seg.ju]
                out[seg.sl, :] = np.where(seg.diag[:, None], sym.T, sym.T * _SQRT2)
        return out

    def jprod(self, u, v):
        """Jordan product u o v."""
        out = np.empty_like(u)
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                out[seg.sl] = u[seg.sl] * v[seg.sl]
            else:
                U = _smat_seg(seg, u[seg.sl])
                V = _smat_seg(seg, v[seg.sl])
                out[seg.sl] = _svec_seg(seg, 0.5 * (U @ V + V @ U))
        return out

    def jdiv_lambda(self, v):
        """lambda \\ v with the diagonal scaled point lambda."""
        out = np.empty_like(v)
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                out[seg.sl] = v[seg.sl] / self.lam[seg.sl]
            else:
                _, _, sig = self.w[i]
                denom = 0.5 * (sig[seg.iu] + sig[seg.ju])
                out[seg.sl] = v[seg.sl] / denom
        return out

    def lam_sq(self):
        out = np.zeros_like(self.lam)
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                out[seg.sl] = self.lam[seg.sl] ** 2
            else:
                _, _, sig = self.w[i]
                v = np.zeros(seg.sl.stop - seg.sl.start)
                v[np.nonzero(seg.diag)[0]] = sig**2
                out[seg.sl] = v
        return out

    def max_step(self, d):
        """Largest alpha with lambda + alpha d in the cone."""
        alpha = np.inf
        for i, seg in enumerate(self.segs):
            if seg.kind == "l":
                dd = d[seg.sl]
                neg = dd < 0
                if np.any(neg):
                    alpha = min(alpha, float(np.min(-self.lam[seg.sl][neg] / dd[neg])))
            else:
                _, _, sig = self.w[i]
                D = _smat_seg(seg, d[seg.sl])
                inv_sqrt = 1.0 / np.sqrt(sig)
                Dw = (inv_sqrt[:, None] * D) * inv_sqrt[None, :]
                lo = float(np.linalg.eigvalsh(Dw)[0])
                if lo < 0:
                    alpha = min(alpha, -1.0 / lo)
        return alpha


class _IdentityScaling(_Scaling):
    def __init__(self, segs, n):
        self.segs = segs
        self.w = {}
        self.lam = _cone_e(segs, n)
        for i, seg in enumerate(segs):
            if seg.kind == "l":
                self.w[i] = np.ones(seg.sl.stop - seg.sl.start)
            else:
                eye = np.eye(seg.order)
                self.w[i] = (eye, eye, np.ones(seg.order))


class _KKT:
    """Factorization of the reduced system [[H, A'], [A, 0]]."""

    _REG = 1e-11

    def __init__(self, G, A, scaling: _Scaling):
        self.G = G
        self.A = A
        self.scaling = scaling
        nx = G.shape[1]
        p = A.shape[0]
        if G.shape[0]:
            self.PhiG = scaling.apply_WtWinv(G)
            H = G.T @ self.PhiG
        else:
            self.PhiG = np.zeros_like(G)
            H = np.zeros((nx, nx))
        K = np.zeros((nx + p, nx + p))
        K[:nx, :nx] = H
        if p:
            K[:nx, nx:] = A.T
            K[nx:, :nx] = A
        self.K = K
        reg = self._REG * max(1.0, float(np.abs(K).max()))
        Kr = K.copy()
        Kr[np.arange(nx), np.arange(nx)] += reg
        if p:
            Kr[np.arange(nx, nx + p), np.arange(nx, nx + p)] -= reg
        try:
            self.lu = sla.lu_factor(Kr)
        except (ValueError, sla.LinAlgError) as exc:
            raise NumericalBreakdown(f"KKT factorization failed: {exc}")
        self.nx = nx
        self.p = p

    def solve3(self, u, v, w):
        """Solve the 3x3 system with blocks [[0,A',G'],[A,0,0],[G,0,-W'W]]."""
        if self.G.shape[0]:
            Phi_w = self.scaling.apply_WtWinv(w[:, None])[:, 0]
            rhs_x = u + self.G.T @ Phi_w
        else:
            Phi_w = w
            rhs_x = u.copy()
        rhs = np.concatenate([rhs_x, v])
        sol = sla.lu_solve(self.lu, rhs)
        # iterative refinement against the unregularized system
        scale = max(1.0, float(np.abs(rhs).max()))
        prev = np.inf
        for _ in range(4):
            resid = rhs - self.K @ sol
            err = float(np.abs(resid).max())
            if err <= 1e-14 * scale or err >= 0.5 * prev:
                break
            sol = sol + sla.lu_solve(self.lu, resid)
            prev = err
        dx = sol[: self.nx]
        dy = sol[self.nx :]
        if self.G.shape[0]:
            dz = self.scaling.apply_WtWinv((self.G @ dx - w)[:, None])[:, 0]
        else:
            dz = np.zeros(0)
        return dx, dy, dz


def _scale_form(form: SolverForm):
    """Row/block equilibration plus objective scaling; returns scaled data
    and the factors needed to map iterates back."""
    c, G, h, A, b = form.c, form.G, form.h, form.A, form.b
    dG = np.ones(G.shape[0])
    pos = 0
    for kind, size in form.dims:
        if kind == "l":
            for i in range(pos, pos + size):
                nrm = max(float(np.abs(G[i]).max(initial=0.0)), float(abs(h[i])))
                dG[i] = 1.0 / max(1.0, nrm)
            pos += size
        else:
            q = size * (size + 1) // 2
            nrm = max(
                float(np.abs(G[pos : pos + q]).max(initial=0.0)),
                float(np.abs(h[pos : pos + q]).max(initial=0.0)),
            )
            dG[pos : pos + q] = 1.0 / max(1.0, nrm)
            pos += q
    dA = np.ones(A.shape[0])
    for i in range(A.shape[0]):
        nrm = max(float(np.abs(A[i]).max(initial=0.0)), float(abs(b[i])))
        dA[i] = 1.0 / max(1.0, nrm)
    gc = max(1.0, float(np.abs(c).max(initial=0.0)))
    return (
        c / gc,
        dG[:, None] * G,
        dG * h,
        dA[:, None] * A,
        dA * b,
        dG,
        dA,
        gc,
    )


def solve_form(form: SolverForm, options: Optional[SolverOptions] = None) -> RawSolution:
    opts = options or SolverOptions()
    tol = opts.tol
    c0, G0, h0, A0, b0 = form.c, form.G, form.h, form.A, form.b
    c, G, h, A, b, dG, dA, gc = _scale_form(form)
    segs = _segments(form.dims)
    mG = G.shape[0]
    nx = G.shape[1]
    p = A.shape[0]
    e = _cone_e(segs, mG)
    rank = sum(seg.sl.stop - seg.sl.start if seg.kind == "l" else seg.order for seg in segs)

    nrm_b = max(1.0, float(np.linalg.norm(b0)))
    nrm_h = max(1.0, float(np.linalg.norm(h0)))
    nrm_c = max(1.0, float(np.linalg.norm(c0)))

    def original_metrics(x, y, z, s, tau):
        """Residuals of the tau-normalized iterate on the unscaled data."""
        xo = x / tau
        so = (s / dG) / tau
        yo = gc * (dA * y) / tau
        zo = gc * (dG * z) / tau
        pres_eq = np.linalg.norm(A0 @ xo - b0) / nrm_b if p else 0.0
        pres_cone = np.linalg.norm(G0 @ xo + so - h0) / nrm_h if mG else 0.0
        dres = np.linalg.norm(A0.T @ yo + G0.T @ zo + c0) / nrm_c
        pcost = float(c0 @ xo) + form.obj_offset
        dcost = -float(b0 @ yo) - float(h0 @ zo) + form.obj_offset
        gap = float(so @ zo) if mG else 0.0
        relgap = gap / max(1.0, abs(pcost), abs(dcost))
        return {
            "pres": max(pres_eq, pres_cone),
            "dres": float(dres),
            "gap": gap,
            "relgap": relgap,
            "pcost": pcost,
            "dcost": dcost,
        }

    # -- initialization: W = I solves ----------------------------------
    ident = _IdentityScaling(segs, mG)
    kkt = _KKT(G, A, ident)
    x, _, zt = kkt.solve3(np.zeros(nx), b, h)
    s = _shift_into_cone(segs, -zt, e) if mG else np.zeros(0)
    _, y, z0 = kkt.solve3(-c, np.zeros(p), np.zeros(mG))
    z = _shift_into_cone(segs, z0, e) if mG else np.zeros(0)
    tau, kappa = 1.0, 1.0

    best = None
    status = None
    it = -1
    res = original_metrics(x, y, z, s, tau)
    for it in range(opts.max_iter):
        # residuals of the homogeneous embedding (scaled space)
        rx = A.T @ y + G.T @ z + c * tau
        ry = A @ x - b * tau
        rz = G @ x + s - h * tau
        rtau = kappa + float(c @ x) + float(b @ y) + float(h @ z)

        res = original_metrics(x, y, z, s, tau)
        if opts.verbose:
            print(
                f"iter {it:3d} pres {res['pres']:9.2e} dres {res['dres']:9.2e} "
                f"relgap {res['relgap']:9.2e} tau {tau:8.2e} kappa {kappa:8.2e}"
            )
        if best is None or max(res["pres"], res["dres"], res["relgap"]) < best[0]:
            best = (max(res["pres"], res["dres"], res["relgap"]), x, y, z, s, tau, it, res)
        if res["pres"] <= tol and res["dres"] <= tol and (
            res["relgap"] <= tol or res["gap"] <= tol
        ):
            status = "optimal"
            break
        bty_htz = float(b @ y) + float(h @ z)
        if bty_htz < -1e-10:
            yc = y / (-bty_htz)
            zc = z / (-bty_htz)
            pinf = np.linalg.norm(A.T @ yc + G.T @ zc) / max(1.0, np.linalg.norm(c))
            if pinf <= tol * 1e2 and _min_eig(segs, zc) >= -tol:
                status = "infeasible"
                y, z = yc, zc
                break
        ctx = float(c @ x)
        if ctx < -1e-10:
            xc = x / (-ctx)
            sc = s / (-ctx)
            dinf = 0.0
            if p:
                dinf = max(dinf, np.linalg.norm(A @ xc) / max(1.0, np.linalg.norm(b)))
            if mG:
                dinf = max(dinf, np.linalg.norm(G @ xc + sc) / max(1.0, np.linalg.norm(h)))
            if dinf <= tol * 1e2:
                status = "unbounded"
                x, s = xc, sc
                break

        scaling = _Scaling(segs, s, z)
        lam = scaling.lam
        mu = (float(lam @ lam) + tau * kappa) / (rank + 1)
        try:
            kkt = _KKT(G, A, scaling)
        except NumericalBreakdown:
            status = "stalled"
            break
        x1, y1, z1 = kkt.solve3(-c, b, h)
        denom = float(c @ x1) + float(b @ y1) + float(h @ z1) - kappa / tau

        lam2 = scaling.lam_sq()

        def direction(dg, sigma, gamma, corr_tk):
            rhs5 = -lam2 - gamma + sigma * mu * e
            rhs6 = -tau * kappa - corr_tk + sigma * mu
            v = scaling.jdiv_lambda(rhs5)
            bz = -dg * rz - scaling.apply_Wt(v)
            x2, y2, z2 = kkt.solve3(-dg * rx, -dg * ry, bz)
            num = -dg * rtau - rhs6 / tau - (
                float(c @ x2) + float(b @ y2) + float(h @ z2)
            )
            dtau = num / denom if denom != 0.0 else 0.0
            dx = x2 + dtau * x1
            dy = y2 + dtau * y1
            dz = z2 + dtau * z1
            dz_sc = scaling.apply_W(dz)
            ds_sc = v - dz_sc
            ds = scaling.apply_Wt(ds_sc)
            dkappa = (rhs6 - kappa * dtau) / tau
            return dx, dy, dz, ds, dtau, dkappa, ds_sc, dz_sc

        def boundary(dtau, dkappa, ds_sc, dz_sc):
            a = min(scaling.max_step(ds_sc), scaling.max_step(dz_sc)) if mG else np.inf
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        aff = direction(1.0, 0.0, np.zeros(mG), 0.0)
        a_aff = min(1.0, boundary(aff[4], aff[5], aff[6], aff[7]))
        sigma = min(1.0, max(0.0, (1.0 - a_aff))) ** 3
        gamma = scaling.jprod(aff[6], aff[7])
        corr_tk = aff[4] * aff[5]
        dx, dy, dz, ds, dtau, dkappa, ds_sc, dz_sc = direction(
            1.0 - sigma, sigma, gamma, corr_tk
        )
        a_max = boundary(dtau, dkappa, ds_sc, dz_sc)
        alpha = min(1.0, 0.99 * a_max)
        if alpha <= 1e-13:
            status = "stalled"
            break
        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        s = s + alpha * ds
        tau += alpha * dtau
        kappa += alpha * dkappa
        if tau <= 0 or kappa < 0:
            status = "stalled"
            break
    else:
        status = "stalled"

    iterations = it + 1
    if status == "optimal":
        xo = x / tau
        so = (s / dG) / tau
        yo = gc * (dA * y) / tau
        zo = gc * (dG * z) / tau
        return RawSolution(
            "optimal", xo, so, yo, zo, res["pcost"], res, iterations
        )
    if status == "infeasible":
        yo = gc * dA * y
        zo = gc * dG * z
        return RawSolution(
            "infeasible", x, s, yo, zo, None,
            {"pres": np.nan, "dres": np.nan, "gap": np.nan, "relgap": np.nan},
            iterations,
        )
    if status == "unbounded":
        return RawSolution(
            "unbounded", x, s / dG, y, z, None,
            {"pres": np.nan, "dres": np.nan, "gap": np.nan, "relgap": np.nan},
            iterations,
        )
    # stalled: report the best iterate seen
    _, bx, by, bz, bs, btau, bit, bres = best
    raise Stalled(
        f"no conclusive status after {iterations} iterations "
        f"(best pres {bres['pres']:.2e} dres {bres['dres']:.2e} relgap {bres['relgap']:.2e})",
        solution=RawSolution(
            "stalled", bx / btau, (bs / dG) / btau, gc * (dA * by) / btau,
            gc * (dG * bz) / btau, bres["pcost"], bres, iterations
        ),
    )
