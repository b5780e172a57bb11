"""Numba kernels for SU(2) column evaluation and the trajectory engine.

Conventions shared by the kernels:

- Conditioned states are stored as separate real/imag float64 planes.
  Rows index the half-angle harmonic (storage row = harmonic index + 1;
  row 0 and row extent+1 are kept zero as guards so the update never
  branches on row bounds), columns index the photon number remaining in
  mode a.  After s detections with n = N - s photons remaining the
  logical extent is rows 1..s+1, columns 0..n.
- Policy codes: 0 adaptive, 1 nonadaptive, 2 fixed.
- Estimation codes: r = 1 estimates the phase mod 2*pi from the first
  posterior moment, r = 2 estimates mod pi from the second moment.
- Per-trajectory randomness comes in as a precomputed row of uniforms:
  index 0 feeds the initial (or nonadaptive offset) phase draw, index m
  decides the m-th detection.
"""

import math

import numpy as np
from numba import njit, prange

TWO_PI = 2.0 * math.pi
LN10_250 = 250.0 * math.log(10.0)

# Dense scan used to bracket the sharpness maximand before refinement.
# The maximand is exactly pi-periodic (a shift by pi relabels the two
# detectors), so the scan covers [0, pi).
PHASE_GRID = 256
PHASE_TOL = 1e-10
_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_GRID_STEP = math.pi / PHASE_GRID
_COS_TAB = np.cos(_GRID_STEP * np.arange(PHASE_GRID))
_SIN_TAB = np.sin(_GRID_STEP * np.arange(PHASE_GRID))

# Relative first-moment threshold below which a final estimate is
# reported as degenerate rather than guessed.
DEGENERATE_MOMENT = 1e-13

_PRUNE = 1e-300


# ---------------------------------------------------------------------------
# SU(2) rotation matrix elements at pi/2
# ---------------------------------------------------------------------------


@njit(cache=True)
def jacobi_zero_scaled(n, alpha, beta):
    """Jacobi polynomial value at the origin as (mantissa, decade/250 exponent).

    Returns (v, c) with P_n^{(alpha,beta)}(0) = v * 1e250**c; the scaled
    form survives parameter ranges whose values overflow float64.
    """
    if n == 0:
        return 1.0, 0
    p = 0.5 * (alpha - beta)
    if n == 1:
        return p, 0
    pm1 = 1.0
    c = 0
    for m in range(2, n + 1):
        tot = 2.0 * m + alpha + beta
        c1 = 2.0 * m * (m + alpha + beta) * (tot - 2.0)
        c2 = (tot - 1.0) * (alpha * alpha - beta * beta)
        c3 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * tot
        pnew = (c2 * p - c3 * pm1) / c1
        pm1 = p
        p = pnew
        mag = max(abs(p), abs(pm1))
        if mag > 1e250:
            p *= 1e-250
            pm1 *= 1e-250
            c += 1
        elif 0.0 < mag < 1e-250:
            p *= 1e250
            pm1 *= 1e250
            c -= 1
    return p, c


@njit(cache=True)
def su2_matrix_element(two_j, two_mu, two_nu):
    """Beam-splitter rotation matrix element I^j_{mu nu}(pi/2).

    Evaluates the Jacobi-polynomial form in its validity region
    (mu - nu >= 0 and mu + nu >= 0) and reaches every other index pair
    through the symmetry relations
    I_{mu nu} = (-1)^{mu-nu} I_{nu mu} = I_{-nu,-mu}.
    Factorial ratios are taken as log-gamma differences.
    """
    d2 = two_mu - two_nu
    s2 = two_mu + two_nu
    sign = 1.0
    if d2 >= 0 and s2 >= 0:
        a, b = two_mu, two_nu
    elif d2 >= 0:
        a, b = -two_nu, -two_mu
    elif s2 >= 0:
        a, b = two_nu, two_mu
        if ((d2 // 2) % 2) != 0:
            sign = -1.0
    else:
        a, b = -two_mu, -two_nu
        if ((d2 // 2) % 2) != 0:
            sign = -1.0
    n = (two_j - a) // 2
    alpha = 0.5 * (a - b)
    beta = 0.5 * (a + b)
    logpref = -0.5 * a * math.log(2.0) + 0.5 * (
        math.lgamma(0.5 * (two_j - a) + 1.0)
        + math.lgamma(0.5 * (two_j + a) + 1.0)
        - math.lgamma(0.5 * (two_j - b) + 1.0)
        - math.lgamma(0.5 * (two_j + b) + 1.0)
    )
    v, c = jacobi_zero_scaled(n, alpha, beta)
    if v == 0.0:
        return 0.0
    mag = logpref + math.log(abs(v)) + c * LN10_250
    if mag < -745.0:
        return 0.0
    val = math.exp(mag)
    if v < 0.0:
        val = -val
    return sign * val


@njit(cache=True)
def su2_direct_column(two_j, two_nu):
    """One column of I^j(pi/2), element by element via the Jacobi form."""
    size = two_j + 1
    out = np.empty(size, np.float64)
    for idx in range(size):
        two_mu = -two_j + 2 * idx
        out[idx] = su2_matrix_element(two_j, two_mu, two_nu)
    return out


@njit(cache=True)
def su2_recurrence_column(two_j, two_nu):
    """One column of I^j(pi/2) by the three-term recurrence in mu.

    Marches inward from both boundary elements (whose closed forms fix
    sign and scale), joins the two branches at the best-conditioned
    overlap index near the center, normalizes to unit length, and
    reports the relative mismatch of the two branches over the overlap
    window as a quality residual.
    """
    size = two_j + 1
    vals = np.zeros(size, np.float64)
    if size == 1:
        vals[0] = 1.0
        return vals, 0.0
    tj = float(two_j)
    tn = float(two_nu)
    jj = tj * (tj + 2.0)

    c_idx = two_j // 2
    w = 8 if two_j >= 16 else c_idx
    lo_end = min(c_idx + w, size - 1)
    hi_start = max(c_idx - w, 0)

    neg_inf = -1.0e30
    log_l = np.full(size, neg_inf)
    sgn_l = np.zeros(size)
    log_r = np.full(size, neg_inf)
    sgn_r = np.zeros(size)

    # upward march from mu = -j; seed sign (-1)^(j+nu)
    seed = -1.0 if (((two_j + two_nu) // 2) % 2) != 0 else 1.0
    prev = 0.0
    cur = seed
    e = 0
    log_l[0] = 0.0
    sgn_l[0] = seed
    for idx in range(lo_end):
        tmu = -tj + 2.0 * idx
        cup = math.sqrt(jj - tmu * (tmu + 2.0))
        cdn = math.sqrt(jj - tmu * (tmu - 2.0))
        nxt = (-2.0 * tn * cur - cdn * prev) / cup
        prev = cur
        cur = nxt
        mag = max(abs(cur), abs(prev))
        if mag > 1e250:
            cur *= 1e-250
            prev *= 1e-250
            e += 1
        elif 0.0 < mag < 1e-250:
            cur *= 1e250
            prev *= 1e250
            e -= 1
        if cur != 0.0:
            log_l[idx + 1] = math.log10(abs(cur)) + 250.0 * e
            sgn_l[idx + 1] = 1.0 if cur > 0.0 else -1.0

    # downward march from mu = +j; boundary element is positive
    prev = 0.0
    cur = 1.0
    e = 0
    log_r[size - 1] = 0.0
    sgn_r[size - 1] = 1.0
    for idx in range(size - 1, hi_start, -1):
        tmu = -tj + 2.0 * idx
        cup = math.sqrt(jj - tmu * (tmu + 2.0))
        cdn = math.sqrt(jj - tmu * (tmu - 2.0))
        nxt = (-2.0 * tn * cur - cup * prev) / cdn
        prev = cur
        cur = nxt
        mag = max(abs(cur), abs(prev))
        if mag > 1e250:
            cur *= 1e-250
            prev *= 1e-250
            e += 1
        elif 0.0 < mag < 1e-250:
            cur *= 1e250
            prev *= 1e250
            e -= 1
        if cur != 0.0:
            log_r[idx - 1] = math.log10(abs(cur)) + 250.0 * e
            sgn_r[idx - 1] = 1.0 if cur > 0.0 else -1.0

    best = -1
    best_log = -1.0e300
    for i in range(hi_start, lo_end + 1):
        if sgn_l[i] != 0.0 and sgn_r[i] != 0.0:
            v = min(log_l[i], log_r[i])
            if v > best_log:
                best_log = v
                best = i
    if best < 0:
        return vals, 1.0e9
    alog = log_l[best] - log_r[best]
    asgn = sgn_l[best] * sgn_r[best]

    gmax = -1.0e300
    for i in range(size):
        if i <= c_idx:
            if sgn_l[i] != 0.0 and log_l[i] > gmax:
                gmax = log_l[i]
        else:
            if sgn_r[i] != 0.0 and log_r[i] + alog > gmax:
                gmax = log_r[i] + alog
    for i in range(size):
        if i <= c_idx:
            if sgn_l[i] != 0.0:
                vals[i] = sgn_l[i] * 10.0 ** (log_l[i] - gmax)
        else:
            if sgn_r[i] != 0.0:
                vals[i] = asgn * sgn_r[i] * 10.0 ** (log_r[i] + alog - gmax)
    nrm = 0.0
    for i in range(size):
        nrm += vals[i] * vals[i]
    nrm = math.sqrt(nrm)
    for i in range(size):
        vals[i] /= nrm

    num = 0.0
    den = 0.0
    for i in range(hi_start, lo_end + 1):
        lv = sgn_l[i] * 10.0 ** (log_l[i] - gmax) if sgn_l[i] != 0.0 else 0.0
        rv = asgn * sgn_r[i] * 10.0 ** (log_r[i] + alog - gmax) if sgn_r[i] != 0.0 else 0.0
        num += (lv - rv) * (lv - rv)
        den += lv * lv
    mismatch = math.sqrt(num / den) if den > 0.0 else 1.0e9
    return vals, mismatch


# ---------------------------------------------------------------------------
# Conditioned-state evolution
# ---------------------------------------------------------------------------


@njit(cache=True, fastmath=True)
def apply_step(ar, ai, s, n, u, phi, br, bi, wa, wb):
    """One detection: write the stage-(s+1) planes given stage-s planes.

    a/b planes are (N+3, N+2) guard-padded buffers; n = N - s photons
    remain before this detection.  The output occupies rows 1..s+2,
    columns 0..n-1; row s+3 is re-zeroed to keep the guard invariant.
    """
    inv = 1.0 / (2.0 * math.sqrt(n))
    pr = math.cos(-0.5 * phi) * inv
    pi_ = math.sin(-0.5 * phi) * inv
    if u == 1:
        pr, pi_ = -pi_, pr
    # cq = conj(cp); -i*cp; i*cq
    qr, qi = pr, -pi_
    tr_, ti_ = pi_, -pr
    sr, si = pi_, pr
    for k in range(n):
        wb[k] = math.sqrt(n - k)
    for jp in range(1, s + 3):
        for k in range(n):
            b = wb[k]
            a = wa[k + 1]
            xr = ar[jp, k]
            xi = ai[jp, k]
            yr = ar[jp, k + 1]
            yi = ai[jp, k + 1]
            ur_ = ar[jp - 1, k]
            ui_ = ai[jp - 1, k]
            vr_ = ar[jp - 1, k + 1]
            vi_ = ai[jp - 1, k + 1]
            br[jp, k] = b * (qr * xr - qi * xi + pr * ur_ - pi_ * ui_) + a * (
                sr * yr - si * yi + tr_ * vr_ - ti_ * vi_
            )
            bi[jp, k] = b * (qr * xi + qi * xr + pr * ui_ + pi_ * ur_) + a * (
                sr * yi + si * yr + tr_ * vi_ + ti_ * vr_
            )
    if s + 3 < br.shape[0]:
        for k in range(br.shape[1]):
            br[s + 3, k] = 0.0
            bi[s + 3, k] = 0.0


@njit(cache=True, fastmath=True)
def point_step(vr, vi, n, u, phi, phi_true, outr, outi):
    """Detection update of the state evaluated at a single phase.

    Returns the squared norm of the updated point vector; dividing by
    the squared norm of the input gives the detection probability.
    """
    half = 0.5 * (phi_true - phi + u * math.pi)
    st = math.sin(half)
    ct = math.cos(half)
    inv = 1.0 / math.sqrt(n)
    nrm2 = 0.0
    for k in range(n):
        re = (ct * math.sqrt(n - k) * vr[k] + st * math.sqrt(k + 1.0) * vr[k + 1]) * inv
        im = (ct * math.sqrt(n - k) * vi[k] + st * math.sqrt(k + 1.0) * vi[k + 1]) * inv
        outr[k] = re
        outi[k] = im
        nrm2 += re * re + im * im
    return nrm2


@njit(cache=True, fastmath=True)
def moment_q(ar, ai, s, n, r):
    """Coefficient-space moment sum_{i,k} A[i,k] conj(A[i+r,k])."""
    re = 0.0
    im = 0.0
    for i in range(s + 1 - r):
        for k in range(n + 1):
            xr = ar[i + 1, k]
            xi = ai[i + 1, k]
            yr = ar[i + 1 + r, k]
            yi = ai[i + 1 + r, k]
            re += xr * yr + xi * yi
            im += xi * yr - xr * yi
    return re, im


@njit(cache=True, fastmath=True)
def moment_zx(ar, ai, s, n, r):
    """J_z- and J_x-weighted moments at harmonic shift r.

    z = sum (k - n/2) A[i,k] conj(A[i+r,k]);
    x = 0.5 sum sqrt((k+1)(n-k)) (A[i,k] conj(A[i+r,k+1])
                                  + A[i,k+1] conj(A[i+r,k])).
    """
    zre = 0.0
    zim = 0.0
    xre = 0.0
    xim = 0.0
    half_n = 0.5 * n
    for i in range(s + 1 - r):
        for k in range(n + 1):
            xr = ar[i + 1, k]
            xi = ai[i + 1, k]
            yr = ar[i + 1 + r, k]
            yi = ai[i + 1 + r, k]
            wz = k - half_n
            zre += wz * (xr * yr + xi * yi)
            zim += wz * (xi * yr - xr * yi)
        for k in range(n):
            sk = math.sqrt((k + 1.0) * (n - k))
            xr = ar[i + 1, k]
            xi = ai[i + 1, k]
            yr = ar[i + 1 + r, k + 1]
            yi = ai[i + 1 + r, k + 1]
            ur_ = ar[i + 1, k + 1]
            ui_ = ai[i + 1, k + 1]
            vr_ = ar[i + 1 + r, k]
            vi_ = ai[i + 1 + r, k]
            xre += 0.5 * sk * ((xr * yr + xi * yi) + (ur_ * vr_ + ui_ * vi_))
            xim += 0.5 * sk * ((xi * yr - xr * yi) + (ui_ * vr_ - ur_ * vi_))
    return zre, zim, xre, xim


@njit(cache=True, fastmath=True)
def feedback_tuw(ar, ai, s, n, r):
    """Coefficients (T, U, W) of the sharpness maximand.

    The weighted post-detection sharpness sum is
    |T + U e^{i Phi} + W e^{-i Phi}| + |T - U e^{i Phi} - W e^{-i Phi}|
    up to a positive scale that does not move the maximizer.  Single
    fused sweep over the state planes.
    """
    qre = 0.0
    qim = 0.0
    zlr = 0.0
    zli = 0.0
    xlr = 0.0
    xli = 0.0
    zhr = 0.0
    zhi = 0.0
    xhr = 0.0
    xhi = 0.0
    half_n = 0.5 * n
    for i in range(s + 1):
        row = i + 1
        rl = row + r - 1
        rq = row + r
        rh = row + r + 1
        if i + r + 1 <= s:
            # all three harmonic partners exist: one fused sweep
            for k in range(n):
                xr = ar[row, k]
                xi = ai[row, k]
                ur_ = ar[row, k + 1]
                ui_ = ai[row, k + 1]
                yr = ar[rq, k]
                yi = ai[rq, k]
                qre += xr * yr + xi * yi
                qim += xi * yr - xr * yi
                wz = k - half_n
                sk = 0.5 * math.sqrt((k + 1.0) * (n - k))
                lr = ar[rl, k]
                li = ai[rl, k]
                lr1 = ar[rl, k + 1]
                li1 = ai[rl, k + 1]
                zlr += wz * (xr * lr + xi * li)
                zli += wz * (xi * lr - xr * li)
                xlr += sk * ((xr * lr1 + xi * li1) + (ur_ * lr + ui_ * li))
                xli += sk * ((xi * lr1 - xr * li1) + (ui_ * lr - ur_ * li))
                hr = ar[rh, k]
                hi_ = ai[rh, k]
                hr1 = ar[rh, k + 1]
                hi1 = ai[rh, k + 1]
                zhr += wz * (xr * hr + xi * hi_)
                zhi += wz * (xi * hr - xr * hi_)
                xhr += sk * ((xr * hr1 + xi * hi1) + (ur_ * hr + ui_ * hi_))
                xhi += sk * ((xi * hr1 - xr * hi1) + (ui_ * hr - ur_ * hi_))
            xr = ar[row, n]
            xi = ai[row, n]
            qre += xr * ar[rq, n] + xi * ai[rq, n]
            qim += xi * ar[rq, n] - xr * ai[rq, n]
            zlr += half_n * (xr * ar[rl, n] + xi * ai[rl, n])
            zli += half_n * (xi * ar[rl, n] - xr * ai[rl, n])
            zhr += half_n * (xr * ar[rh, n] + xi * ai[rh, n])
            zhi += half_n * (xi * ar[rh, n] - xr * ai[rh, n])
        else:
            # edge rows near the top of the harmonic ladder
            if i + r <= s:
                for k in range(n + 1):
                    xr = ar[row, k]
                    xi = ai[row, k]
                    yr = ar[rq, k]
                    yi = ai[rq, k]
                    qre += xr * yr + xi * yi
                    qim += xi * yr - xr * yi
            if i + r - 1 <= s:
                for k in range(n + 1):
                    xr = ar[row, k]
                    xi = ai[row, k]
                    yr = ar[rl, k]
                    yi = ai[rl, k]
                    wz = k - half_n
                    zlr += wz * (xr * yr + xi * yi)
                    zli += wz * (xi * yr - xr * yi)
                for k in range(n):
                    sk = 0.5 * math.sqrt((k + 1.0) * (n - k))
                    xr = ar[row, k]
                    xi = ai[row, k]
                    yr = ar[rl, k + 1]
                    yi = ai[rl, k + 1]
                    ur_ = ar[row, k + 1]
                    ui_ = ai[row, k + 1]
                    vr_ = ar[rl, k]
                    vi_ = ai[rl, k]
                    xlr += sk * ((xr * yr + xi * yi) + (ur_ * vr_ + ui_ * vi_))
                    xli += sk * ((xi * yr - xr * yi) + (ui_ * vr_ - ur_ * vi_))
    tre = 0.5 * n * qre
    tim = 0.5 * n * qim
    ure = -0.5 * (zlr + xli)
    uim = -0.5 * (zli - xlr)
    wre = -0.5 * (zhr - xhi)
    wim = -0.5 * (zhi + xhr)
    return tre, tim, ure, uim, wre, wim


@njit(cache=True, fastmath=True)
def _maximand_cs(c, s, tre, tim, ure, uim, wre, wim):
    er = ure * c - uim * s + wre * c + wim * s
    ei = ure * s + uim * c - wre * s + wim * c
    fr = tre + er
    fi = tim + ei
    gr = tre - er
    gi = tim - ei
    return math.sqrt(fr * fr + fi * fi) + math.sqrt(gr * gr + gi * gi)


@njit(cache=True, fastmath=True)
def _maximand(phi, tre, tim, ure, uim, wre, wim):
    return _maximand_cs(math.cos(phi), math.sin(phi), tre, tim, ure, uim, wre, wim)


@njit(cache=True, fastmath=True)
def _golden_refine(a, b, tre, tim, ure, uim, wre, wim):
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc = _maximand(c, tre, tim, ure, uim, wre, wim)
    fd = _maximand(d, tre, tim, ure, uim, wre, wim)
    while (b - a) > PHASE_TOL:
        if fc > fd:
            b = d
            d = c
            fd = fc
            c = b - _INV_GOLDEN * (b - a)
            fc = _maximand(c, tre, tim, ure, uim, wre, wim)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INV_GOLDEN * (b - a)
            fd = _maximand(d, tre, tim, ure, uim, wre, wim)
    return 0.5 * (a + b)


@njit(cache=True, fastmath=True)
def best_phase(tre, tim, ure, uim, wre, wim):
    """Feedback phase maximizing the sharpness maximand.

    Dense scan over PHASE_GRID points of the period [0, pi), then
    golden-section refinement of each near-global local maximum to
    PHASE_TOL; among refined optima the smallest phase within tolerance
    of the best value wins, so the result lies in [0, pi).  Returns
    -1.0 when the maximand is flat, signalling the caller to substitute
    its own draw.
    """
    grid = np.empty(PHASE_GRID)
    best_m = -1.0
    worst_m = 1.0e300
    for g in range(PHASE_GRID):
        m = _maximand_cs(_COS_TAB[g], _SIN_TAB[g], tre, tim, ure, uim, wre, wim)
        grid[g] = m
        if m > best_m:
            best_m = m
        if m < worst_m:
            worst_m = m
    scale = best_m if best_m > 1e-300 else 1e-300
    if (best_m - worst_m) <= 1e-12 * scale:
        return -1.0
    tol = 1e-12 * scale
    cutoff = best_m - 4.0 * _GRID_STEP * _GRID_STEP * scale
    best_phi = -1.0
    best_val = -1.0
    for g in range(PHASE_GRID):
        prv = grid[(g - 1) % PHASE_GRID]
        nxt = grid[(g + 1) % PHASE_GRID]
        if grid[g] >= prv and grid[g] >= nxt and grid[g] >= cutoff:
            phi = _golden_refine((g - 1) * _GRID_STEP, (g + 1) * _GRID_STEP,
                                 tre, tim, ure, uim, wre, wim)
            val = _maximand(phi, tre, tim, ure, uim, wre, wim)
            phi = phi % math.pi
            if val > best_val + tol:
                best_val = val
                best_phi = phi
            elif val > best_val - tol and phi < best_phi:
                best_phi = phi
    return best_phi


@njit(cache=True, fastmath=True)
def final_moment(ar, ai, total_n, r):
    """Final posterior moment over the k = 0 column: (re, im, zeroth)."""
    qre = 0.0
    qim = 0.0
    g0 = 0.0
    for i in range(total_n + 1):
        xr = ar[i + 1, 0]
        xi = ai[i + 1, 0]
        g0 += xr * xr + xi * xi
        if i + r <= total_n:
            yr = ar[i + 1 + r, 0]
            yi = ai[i + 1 + r, 0]
            qre += xr * yr + xi * yi
            qim += xi * yr - xr * yi
    return qre, qim, g0


@njit(cache=True, fastmath=True)
def run_one(a0r, a0i, total_n, policy, fixed_phi, r, phi_true, urow,
            ar, ai, br, bi, vr, vi, v2r, v2i, wa, wb, bits, phases):
    """Simulate one full detection record; returns (estimate, status).

    status 0: ok; 1: the final posterior moment is degenerate (no
    estimate exists at this periodicity, e.g. a pi-periodic state read
    mod 2*pi).  The detection at step m consumes urow[m]; urow[0] feeds
    the initial phase draw.  Buffers are caller-allocated, zeroed.
    """
    n_tot = total_n
    for k in range(n_tot + 1):
        ar[1, k] = a0r[k]
        ai[1, k] = a0i[k]
        vr[k] = a0r[k]
        vi[k] = a0i[k]
    vnorm2 = 0.0
    for k in range(n_tot + 1):
        vnorm2 += vr[k] * vr[k] + vi[k] * vi[k]

    base_draw = TWO_PI * urow[0]
    cur_ar, cur_ai, cur_br, cur_bi = ar, ai, br, bi
    cur_vr, cur_vi, cur_wr, cur_wi = vr, vi, v2r, v2i

    for s in range(n_tot):
        n = n_tot - s
        if policy == 0:
            if s == 0:
                phi = base_draw
            else:
                tre, tim, ure, uim, wre, wim = feedback_tuw(cur_ar, cur_ai, s, n, r)
                phi = best_phase(tre, tim, ure, uim, wre, wim)
                if phi < 0.0:
                    phi = 0.0
        elif policy == 1:
            phi = (base_draw + (s + 1) * math.pi / n_tot) % TWO_PI
        else:
            phi = fixed_phi

        e0 = point_step(cur_vr, cur_vi, n, 0, phi, phi_true, cur_wr, cur_wi)
        p0 = e0 / vnorm2 if vnorm2 > 0.0 else 0.0
        if urow[s + 1] < p0:
            u = 0
            vnorm2 = e0
        else:
            u = 1
            vnorm2 = point_step(cur_vr, cur_vi, n, 1, phi, phi_true, cur_wr, cur_wi)
        bits[s] = u
        phases[s] = phi
        apply_step(cur_ar, cur_ai, s, n, u, phi, cur_br, cur_bi, wa, wb)
        cur_ar, cur_ai, cur_br, cur_bi = cur_br, cur_bi, cur_ar, cur_ai
        cur_vr, cur_vi, cur_wr, cur_wi = cur_wr, cur_wi, cur_vr, cur_vi

    qre, qim, g0 = final_moment(cur_ar, cur_ai, n_tot, r)
    qabs = math.sqrt(qre * qre + qim * qim)
    if qabs <= DEGENERATE_MOMENT * g0:
        return 0.0, 1
    est = math.atan2(qim, qre) % TWO_PI
    if r == 2:
        est = 0.5 * est
    return est, 0


@njit(cache=True, parallel=True)
def run_ensemble(a0r, a0i, total_n, policy, fixed_phi, r, phi_true, uniforms, est, status):
    """Independent trajectories over precomputed uniform rows (parallel)."""
    trials = uniforms.shape[0]
    size = total_n + 3
    width = total_n + 2
    for t in prange(trials):
        ar = np.zeros((size, width))
        ai = np.zeros((size, width))
        br = np.zeros((size, width))
        bi = np.zeros((size, width))
        vr = np.zeros(width)
        vi = np.zeros(width)
        v2r = np.zeros(width)
        v2i = np.zeros(width)
        wa = np.sqrt(np.arange(width).astype(np.float64))
        wb = np.zeros(width)
        bits = np.zeros(total_n, np.int8)
        phases = np.zeros(total_n)
        e, st = run_one(a0r, a0i, total_n, policy, fixed_phi, r, phi_true, uniforms[t],
                        ar, ai, br, bi, vr, vi, v2r, v2i, wa, wb, bits, phases)
        est[t] = e
        status[t] = st


@njit(cache=True, parallel=True)
def run_enumeration(a0r, a0i, total_n, policy, fixed_phi, r, grid_size, phi_true,
                    e_re, e_im, prob_tot, degen_weight):
    """Exact sum over all detection records for each initial-phase grid value.

    For each grid value the depth-first walk visits every record,
    weighting the leaf estimate direction by the record probability at
    phi_true.  Writes per-grid resultants, total probabilities (a
    completeness diagnostic), and the probability mass carried by
    records whose estimate is undefined (vanishing posterior moment);
    such records contribute nothing to the resultant.
    """
    n_tot = total_n
    size = n_tot + 3
    width = n_tot + 2
    for g in prange(grid_size):
        base = TWO_PI * g / grid_size
        sr = np.zeros((n_tot + 1, size, width))
        si = np.zeros((n_tot + 1, size, width))
        pvr = np.zeros((n_tot + 1, width))
        pvi = np.zeros((n_tot + 1, width))
        wa = np.sqrt(np.arange(width).astype(np.float64))
        wb = np.zeros(width)
        branch = np.zeros(n_tot + 1, np.int8)
        phase_at = np.zeros(n_tot + 1)
        acc_re = 0.0
        acc_im = 0.0
        tot = 0.0
        wdeg = 0.0

        for k in range(n_tot + 1):
            sr[0, 1, k] = a0r[k]
            si[0, 1, k] = a0i[k]
            pvr[0, k] = a0r[k]
            pvi[0, k] = a0i[k]

        d = 0
        while d >= 0:
            if d == n_tot:
                wl = pvr[d, 0] * pvr[d, 0] + pvi[d, 0] * pvi[d, 0]
                tot += wl
                if wl > _PRUNE:
                    qre, qim, g0 = final_moment(sr[d], si[d], n_tot, r)
                    qabs = math.sqrt(qre * qre + qim * qim)
                    if qabs <= DEGENERATE_MOMENT * g0:
                        wdeg += wl
                    else:
                        acc_re += wl * qre / qabs
                        acc_im += wl * qim / qabs
                d -= 1
                continue
            if branch[d] == 0:
                n = n_tot - d
                if policy == 0:
                    if d == 0:
                        phase_at[d] = base
                    else:
                        tre, tim, ure, uim, wre, wim = feedback_tuw(sr[d], si[d], d, n, r)
                        phi = best_phase(tre, tim, ure, uim, wre, wim)
                        phase_at[d] = 0.0 if phi < 0.0 else phi
                elif policy == 1:
                    phase_at[d] = (base + (d + 1) * math.pi / n_tot) % TWO_PI
                else:
                    phase_at[d] = fixed_phi
            if branch[d] == 2:
                branch[d] = 0
                d -= 1
                continue
            u = branch[d]
            branch[d] += 1
            n = n_tot - d
            cn = point_step(pvr[d], pvi[d], n, u, phase_at[d], phi_true,
                            pvr[d + 1], pvi[d + 1])
            if cn <= _PRUNE:
                tot += cn
                continue
            apply_step(sr[d], si[d], d, n, u, phase_at[d], sr[d + 1], si[d + 1], wa, wb)
            d += 1

        e_re[g] = acc_re
        e_im[g] = acc_im
        prob_tot[g] = tot
        degen_weight[g] = wdeg
