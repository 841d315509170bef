"""Independent reference implementations used only by the tests.

Everything here is deliberately written the slow, explicit way (python loops,
signed wavenumbers, pointwise formulas) so the fast production code is checked
against a structurally different computation.
"""

import math

import numpy as np

from hermvlasov import HermiteBasisParams, SpectralState, eval_aw_hermite
from hermvlasov.residual import poisson_field
from hermvlasov.transform import build_transform


def dense_residual_oracle(ctx, cand):
    """Full signed-k assembly of the midpoint residual, looping over (s, n, k)."""
    cfg = ctx.cfg
    Nv, Nx, L, dt, nu = cfg.Nv, cfg.Nx, cfg.L, ctx.dt, cfg.nu
    Ns = ctx.prev.shape[0]

    def full(C):
        return {k: (C[:, k] if k >= 0 else np.conj(C[:, -k])) for k in range(-Nx, Nx + 1)}

    def efield_full(coeffs):
        E = {}
        for k in range(-Nx, Nx + 1):
            if k == 0 or ctx.mms_mode:
                E[k] = 0.0j
                continue
            rho = sum(
                ctx.charges[s] * ctx.alphas[s] * coeffs[s][k][0] for s in range(Ns)
            )
            E[k] = L / (2j * np.pi * k) * rho
        return E

    prevf = [full(ctx.prev[s]) for s in range(Ns)]
    candf = [full(cand[s]) for s in range(Ns)]
    midf = [
        {k: 0.5 * (prevf[s][k] + candf[s][k]) for k in prevf[s]} for s in range(Ns)
    ]
    Eprev = efield_full(prevf)
    Ecand = efield_full(candf)
    Emid = {k: 0.5 * (Eprev[k] + Ecand[k]) for k in Eprev}
    src = ctx.source(ctx.t_prev + 0.5 * dt) if ctx.source is not None else None

    out = np.zeros((Ns, Nv + 1, Nx + 1), dtype=complex)
    D = (Nv - 1) * (Nv - 2) * (Nv - 3) if Nv >= 4 else 1
    for s in range(Ns):
        al, uu = ctx.alphas[s], ctx.shifts[s]
        qm = ctx.charges[s] / ctx.masses[s]
        for n in range(Nv + 1):
            for k in range(0, Nx + 1):
                r = (candf[s][k][n] - prevf[s][k][n]) / dt
                ik = 2j * np.pi * k / L
                if n >= 1:
                    r += math.sqrt(n / 2.0) * al * ik * midf[s][k][n - 1]
                r += uu * ik * midf[s][k][n]
                if n + 1 <= Nv:
                    r += math.sqrt((n + 1) / 2.0) * al * ik * midf[s][k][n + 1]
                if n >= 1 and not ctx.mms_mode:
                    conv = 0.0j
                    for l in range(-Nx, Nx + 1):
                        if abs(k - l) <= Nx:
                            conv += midf[s][l][n - 1] * Emid[k - l]
                    r -= math.sqrt(2.0 * n) * qm / al * conv
                if nu > 0:
                    r += nu * n * (n - 1) * (n - 2) / D * midf[s][k][n]
                if src is not None:
                    r -= src[s, n, k]
                out[s, n, k] = r
    return out


def random_neutral_state(rng, Nv, Nx, L=2 * math.pi, scale=1.0):
    """Two-species state with random coefficients satisfying exact neutrality."""
    charges = (-1.0, 1.0)
    masses = (1.0, 3.7)
    basis = [
        HermiteBasisParams(rng.uniform(0.4, 1.6), rng.uniform(-1.0, 1.0)),
        HermiteBasisParams(rng.uniform(0.4, 1.6), rng.uniform(-1.0, 1.0)),
    ]
    coeffs = []
    for s in range(2):
        C = scale * (
            rng.normal(size=(Nv + 1, Nx + 1)) + 1j * rng.normal(size=(Nv + 1, Nx + 1))
        )
        C[:, 0] = C[:, 0].real
        C[0, 0] = rng.uniform(0.5, 2.0)  # positive average density
        coeffs.append(C)
    # cancel the k=0 charge exactly through the second species density
    rho0 = sum(charges[s] * basis[s].alpha * coeffs[s][0, 0].real for s in range(2))
    coeffs[1][0, 0] -= rho0 / (charges[1] * basis[1].alpha)
    efield = poisson_field(
        np.stack(coeffs), charges, [b.alpha for b in basis], L
    )
    return SpectralState(
        coeffs=coeffs,
        basis=basis,
        efield=efield,
        time=0.0,
        L=L,
        charges=charges,
        masses=masses,
    )


def maxwellian_state(n_dens, w, beta, basis, Nv, Nx, L=2 * math.pi):
    """Single-species state whose reconstruction is (n/(sqrt(pi) beta)) e^(-((v-w)/beta)^2)

    expanded (exactly, through the basis-change projection) in `basis`.
    """
    P = build_transform(HermiteBasisParams(beta, w), basis, Nv)
    C = np.zeros((Nv + 1, Nx + 1), dtype=complex)
    C[:, 0] = P.entries[:, 0] * (n_dens / beta)
    return SpectralState(
        coeffs=[C],
        basis=[basis],
        efield=np.zeros(Nx + 1, dtype=complex),
        time=0.0,
        L=L,
        charges=(-1.0,),
        masses=(1.0,),
    )


def mms_source_pointwise(profile, t, x, v):
    """Direct grid evaluation of the manufactured source term."""
    beta = profile.beta_fn(t)
    w = profile.w_fn(t)
    db = profile.dbeta_fn(t)
    dw = profile.dw_fn(t)
    X = np.asarray(x, dtype=float)[:, None]
    V = np.asarray(v, dtype=float)[None, :]
    xi = (V - w) / beta
    g = np.exp(-(xi**2)) / math.sqrt(math.pi)
    return 2.0 * (V - np.pi) * np.sin(2.0 * X - 2.0 * np.pi * t) * g + (
        2.0
        * (2.0 - np.cos(2.0 * X - 2.0 * np.pi * t))
        * g
        * xi
        * (dw / beta + xi * db / beta)
    )


def coeffs_to_grid(entries, basis, x, v, L):
    """Evaluate a sparse {(n, signed k): value} coefficient set on a grid."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    n_max = max(n for n, _ in entries)
    psi = eval_aw_hermite(v, basis, n_max)
    out = np.zeros((len(x), len(v)), dtype=complex)
    for (n, k), val in entries.items():
        out += val * np.exp(2j * np.pi * k / L * x)[:, None] * psi[n][None, :]
    assert np.max(np.abs(out.imag)) < 1e-12 * max(1.0, np.max(np.abs(out.real)))
    return out.real


def dense_matrix_to_grid(C, basis, x, v, L):
    """Evaluate a full (Nv+1, Nx+1) k>=0 coefficient matrix on a grid."""
    Nv, Nx = C.shape[0] - 1, C.shape[1] - 1
    entries = {}
    for n in range(Nv + 1):
        for k in range(Nx + 1):
            if C[n, k] != 0:
                entries[(n, k)] = C[n, k]
                if k > 0:
                    entries[(n, -k)] = np.conj(C[n, k])
    if not entries:
        return np.zeros((len(x), len(v)))
    return coeffs_to_grid(entries, basis, x, v, L)
