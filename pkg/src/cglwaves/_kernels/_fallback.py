"""NumPy/SciPy reference implementation of the kernel API."""

import numpy as np
from scipy.linalg import lapack


def tridiag_factor(dl, d, du):
    """LU-factor a tridiagonal matrix from its bands.

    dl, d, du are the sub-, main and super-diagonal, all length n
    (dl[0] and du[-1] are ignored). Uses LAPACK gttrf (partial pivoting).
    """
    d = np.asarray(d)
    if np.iscomplexobj(dl) or np.iscomplexobj(d) or np.iscomplexobj(du):
        gttrf = lapack.zgttrf
        dtype = complex
    else:
        gttrf = lapack.dgttrf
        dtype = float
    dl = np.asarray(dl, dtype=dtype)
    d = np.asarray(d, dtype=dtype)
    du = np.asarray(du, dtype=dtype)
    dl_f, d_f, du_f, du2, ipiv, info = gttrf(dl[1:], d, du[:-1])
    if info != 0:
        raise np.linalg.LinAlgError(f"tridiagonal factorization failed (info={info})")
    return ("gtt", dtype is complex, dl_f, d_f, du_f, du2, ipiv)


def tridiag_solve(fact, b):
    """Solve a system with a factor from tridiag_factor."""
    _, is_complex, dl_f, d_f, du_f, du2, ipiv = fact
    gttrs = lapack.zgttrs if is_complex else lapack.dgttrs
    b = np.asarray(b, dtype=complex if is_complex else float)
    x, info = gttrs(dl_f, d_f, du_f, du2, ipiv, b)
    if info != 0:
        raise np.linalg.LinAlgError(f"tridiagonal solve failed (info={info})")
    return x


def cn_evolve(
    sub,
    diag,
    sup,
    w,
    rho,
    theta,
    nl_coef,
    alpha,
    phi0,
    dt,
    n_steps,
    sample_stride,
    ref_u=None,
    ref_omega=0.0,
    blowup_factor=1e6,
):
    """Semi-implicit stepping loop for d/dt phi = -e^{i theta}(rho - Lap)phi + nl.

    The stiff linear part is treated by Crank-Nicolson; the nonlinear term
    nl(phi) = nl_coef * |phi|^alpha * phi is advanced explicitly through a
    half-step midpoint extrapolation, giving formal second order in dt.

    sub/diag/sup are the bands of the discrete -Laplacian, w the quadrature
    weights. Samples (step index, weighted L2 norm, and drift against
    ref_u * exp(i ref_omega t) when ref_u is given) are recorded at step 0,
    every ``sample_stride`` steps, and at the final step.

    Returns (steps, norms, drifts, phi, blowup_step). blowup_step is -1
    unless the norm exceeded blowup_factor times its initial value, in
    which case stepping stops there and phi is the offending field.
    """
    n = len(diag)
    z = np.exp(1j * theta)
    sub = np.asarray(sub, dtype=float)
    diag = np.asarray(diag, dtype=float)
    sup = np.asarray(sup, dtype=float)
    w = np.asarray(w, dtype=float)
    phi = np.asarray(phi0, dtype=complex).copy()

    fact_half = tridiag_factor(
        0.25 * dt * z * sub,
        1.0 + 0.25 * dt * z * (rho + diag),
        0.25 * dt * z * sup,
    )
    fact_full = tridiag_factor(
        0.5 * dt * z * sub,
        1.0 + 0.5 * dt * z * (rho + diag),
        0.5 * dt * z * sup,
    )

    def apply_p(u):
        out = (rho + diag) * u
        out[:-1] += sup[:-1] * u[1:]
        out[1:] += sub[1:] * u[:-1]
        return out

    def nl(u):
        if nl_coef == 0:
            return np.zeros_like(u)
        return nl_coef * np.abs(u) ** alpha * u

    def wnorm(u):
        return float(np.sqrt(np.sum(w * np.abs(u) ** 2)))

    norm0 = wnorm(phi)
    ref_norm = wnorm(ref_u) if ref_u is not None else 0.0

    steps, norms, drifts = [0], [norm0], []
    if ref_u is not None:
        drifts.append(wnorm(phi - ref_u) / ref_norm if ref_norm > 0 else 0.0)

    blowup_step = -1
    for k in range(1, n_steps + 1):
        p_phi = apply_p(phi)
        phi_half = tridiag_solve(fact_half, phi - 0.25 * dt * z * p_phi + 0.5 * dt * nl(phi))
        phi = tridiag_solve(fact_full, phi - 0.5 * dt * z * p_phi + dt * nl(phi_half))
        take_sample = (k % sample_stride == 0) or (k == n_steps)
        nk = wnorm(phi)
        if not np.isfinite(nk) or nk > blowup_factor * norm0 > 0:
            blowup_step = k
            take_sample = True
        if take_sample:
            steps.append(k)
            norms.append(nk)
            if ref_u is not None:
                t = k * dt
                drifts.append(wnorm(phi - np.exp(1j * ref_omega * t) * ref_u) / ref_norm)
        if blowup_step >= 0:
            break

    return (
        np.asarray(steps, dtype=np.int64),
        np.asarray(norms, dtype=float),
        np.asarray(drifts, dtype=float) if ref_u is not None else None,
        phi,
        blowup_step,
    )
