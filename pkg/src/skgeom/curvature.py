"""Levi-Civita connection and curvature of jet-evaluated metric fields.

Conventions::

    Gamma[k, i, j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    R[l, k, i, j]  = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    Ric[k, j]      = R[i, k, i, j]
    scal           = g^{kj} Ric[k, j]

With these, the round sphere has positive and the hyperbolic plane negative
scalar curvature (-2 for the half-plane model).
"""

import numpy as np

from skgeom.metric import inverse


def _connection(g, dg, ddg=None, lowered=False):
    ginv = inverse(g)
    ginv = 0.5 * (ginv + ginv.T)
    # lower[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij); dg[a, b, c] = d_c g_ab
    lower = 0.5 * (np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg))
    gamma = np.einsum("kl,lij->kij", ginv, lower)
    if lowered:
        return ginv, lower, gamma
    if ddg is None:
        return ginv, gamma, None
    # d_m lower[l, i, j]
    dlower = 0.5 * (np.einsum("jlim->lijm", ddg) + np.einsum("iljm->lijm", ddg)
                    - np.einsum("ijlm->lijm", ddg))
    dginv = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
    dgamma = np.einsum("klm,lij->kijm", dginv, lower) + np.einsum("kl,lijm->kijm", ginv, dlower)
    return ginv, gamma, dgamma


def christoffel(g, x):
    """Gamma[k, i, j] of the metric field ``g`` at ``x``."""
    g0, dg, _ = g.derivatives(x, 1)
    return _connection(g0, dg)[1]


def _riemann_from(gamma, dgamma):
    # dgamma[l, j, k, i] = d_i Gamma^l_jk
    term1 = np.einsum("ljki->lkij", dgamma)
    term2 = np.einsum("likj->lkij", dgamma)
    term3 = np.einsum("lim,mjk->lkij", gamma, gamma)
    term4 = np.einsum("ljm,mik->lkij", gamma, gamma)
    return term1 - term2 + term3 - term4


def riemann(g, x):
    """R[l, k, i, j] = R^l_kij at ``x``."""
    g0, dg, ddg = g.derivatives(x, 2)
    _, gamma, dgamma = _connection(g0, dg, ddg)
    return _riemann_from(gamma, dgamma)


def _lowered_riemann_from(ddg, lower, gamma):
    # R_lkij = 1/2 (d_i d_k g_jl - d_i d_l g_jk - d_j d_k g_il + d_j d_l g_ik)
    #          - Gamma_{a,il} Gamma^a_jk + Gamma_{a,jl} Gamma^a_ik
    # exactly antisymmetric in (l, k) and (i, j) term by term
    second = 0.5 * (np.einsum("jlik->lkij", ddg) - np.einsum("jkil->lkij", ddg)
                    - np.einsum("iljk->lkij", ddg) + np.einsum("ikjl->lkij", ddg))
    quad = -np.einsum("ail,ajk->lkij", lower, gamma) + np.einsum("ajl,aik->lkij", lower, gamma)
    return second + quad


def curvature_bundle(g, x):
    """All curvature data at ``x`` from one metric evaluation.

    The lowered tensor ``riemann_lowered`` is assembled from second
    derivatives of g directly, so its pair antisymmetries hold to rounding
    even where g is badly conditioned.
    """
    g0, dg, ddg = g.derivatives(x, 2)
    ginv, gamma, dgamma = _connection(g0, dg, ddg)
    _, lower, _ = _connection(g0, dg, lowered=True)
    R = _riemann_from(gamma, dgamma)
    Rl = _lowered_riemann_from(ddg, lower, gamma)
    ric = np.einsum("ikij->kj", R)
    scal = float(np.einsum("kj,kj->", ginv, ric))
    return {"g": g0, "ginv": ginv, "christoffel": gamma, "riemann": R, "riemann_lowered": Rl,
            "ricci": ric, "scal": scal}


def ricci(g, x):
    return curvature_bundle(g, x)["ricci"]


def scalar_curvature(g, x):
    return curvature_bundle(g, x)["scal"]


def lowered_riemann(g, x):
    """R_lkij = g_la R^a_kij."""
    return curvature_bundle(g, x)["riemann_lowered"]


def symmetry_residuals(g, x):
    """Relative residuals of the algebraic symmetries of Gamma and R."""
    b = curvature_bundle(g, x)
    gamma, R = b["christoffel"], b["riemann"]
    Rl = b["riemann_lowered"]
    scale = max(1.0, float(np.max(np.abs(Rl))))
    gscale = max(1.0, float(np.max(np.abs(gamma))))
    bianchi = R + np.einsum("lkij->lijk", R) + np.einsum("lkij->ljki", R)
    return {
        "christoffel_symmetric": float(np.max(np.abs(gamma - gamma.transpose(0, 2, 1)))) / gscale,
        "antisym_last_pair": float(np.max(np.abs(R + R.transpose(0, 1, 3, 2)))) / scale,
        "antisym_first_pair": float(np.max(np.abs(Rl + Rl.transpose(1, 0, 2, 3)))) / scale,
        "pair_symmetry": float(np.max(np.abs(Rl - Rl.transpose(2, 3, 0, 1)))) / scale,
        "first_bianchi": float(np.max(np.abs(bianchi))) / scale,
        "lowering_consistency": float(np.max(np.abs(Rl - np.einsum("al,lkij->akij", b["g"], R)))) / scale,
    }


def scal_closed_form_x_xy_z2(h, c):
    """Scalar curvature of -d^2 log(h + c) for h = x(xy - z^2), as a function of h and c."""
    return -3.0 * (h * h - 11.0 * c * h + 6.0 * c * c) / (4.0 * (h - 2.0 * c) ** 2)


def scal_closed_form_xyz(h, c):
    """Scalar curvature of -d^2 log(h + c) for h = xyz, as a function of h and c."""
    return 3.0 * c * (4.0 * h * h - 3.0 * c * h + 2.0 * c * c) / (2.0 * h * (h - 2.0 * c) ** 2)
