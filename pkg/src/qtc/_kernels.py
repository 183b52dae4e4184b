"""Hot loops: trellis forward-backward and inverse-encoder error tracking.

Each kernel has a numba implementation and a pure-numpy one with the same
signature.  Numba is used when importable unless ``QTC_NO_NUMBA`` is set to a
non-empty value other than ``0``.
"""

from __future__ import annotations

import os

import numpy as np

_TINY = 1e-300


def _numba_requested() -> bool:
    flag = os.environ.get("QTC_NO_NUMBA", "")
    return flag in ("", "0")


try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False


# ---------------------------------------------------------------------------
# numpy reference path


def forward_backward_numpy(alpha0, beta_end, pa_l, pch, sig, tab_p, tab_m, want_p):
    """Forward-backward over a frame of ``T`` trellis steps.

    ``pa_l[t, lam]`` and ``pch[t, P]`` are joint priors of the logical and
    physical blocks of step ``t``; ``sig[t]`` lists the admissible ancilla
    codes; ``tab_p``/``tab_m`` map ``(mu, lam, sigma)`` to the physical and
    next-memory codes.

    Returns ``(ext_l, ext_p, alpha_end, status)``.  ``ext_l[t, lam]`` is the
    step posterior of the logical block with its own prior left out and
    ``ext_p[t, P]`` the same for the physical block; both rows sum to one.
    ``alpha_end`` is the forward message after the last step.  ``status`` is
    -1 on success, else the first step whose messages vanished.
    """
    T = pa_l.shape[0]
    NM = alpha0.shape[0]
    NP = pch.shape[1]
    alpha = np.empty((T + 1, NM))
    alpha[0] = alpha0
    for t in range(T):
        P = tab_p[:, :, sig[t]]
        M = tab_m[:, :, sig[t]]
        w = alpha[t][:, None, None] * pa_l[t][None, :, None] * pch[t][P]
        a = np.bincount(M.ravel(), weights=w.ravel(), minlength=NM)
        s = a.sum()
        if not s > _TINY:
            return None, None, None, t
        alpha[t + 1] = a / s
    beta = beta_end / beta_end.sum()
    ext_l = np.zeros_like(pa_l)
    ext_p = np.zeros((T, NP)) if want_p else np.zeros((0, NP))
    for t in range(T - 1, -1, -1):
        P = tab_p[:, :, sig[t]]
        M = tab_m[:, :, sig[t]]
        base = alpha[t][:, None, None] * beta[M]
        el = (base * pch[t][P]).sum(axis=(0, 2))
        s = el.sum()
        if not s > _TINY:
            return None, None, None, t
        ext_l[t] = el / s
        if want_p:
            ep = np.bincount(P.ravel(), weights=(base * pa_l[t][None, :, None]).ravel(), minlength=NP)
            ext_p[t] = ep / ep.sum()
        b = (pa_l[t][None, :, None] * pch[t][P] * beta[M]).sum(axis=(1, 2))
        bs = b.sum()
        if not bs > _TINY:
            return None, None, None, t
        beta = b / bs
    return ext_l, ext_p, alpha[T].copy(), -1


def track_numpy(p_codes, m_end, inv_m, inv_l, inv_s):
    """Inverse-encoder pass from the last step back to the first.

    ``inv_*[p, m]`` give the previous-memory, logical and ancilla codes of
    ``(P_t : M_t) U^-1``.  Returns ``(l_codes, s_codes, m_start)``.
    """
    T = p_codes.shape[0]
    l_codes = np.empty(T, dtype=np.int64)
    s_codes = np.empty(T, dtype=np.int64)
    m = int(m_end)
    for t in range(T - 1, -1, -1):
        p = p_codes[t]
        l_codes[t] = inv_l[p, m]
        s_codes[t] = inv_s[p, m]
        m = int(inv_m[p, m])
    return l_codes, s_codes, m


def encode_numpy(m_start, l_codes, s_codes, tab_p, tab_m):
    T = l_codes.shape[0]
    p_codes = np.empty(T, dtype=np.int64)
    m = int(m_start)
    for t in range(T):
        p_codes[t] = tab_p[m, l_codes[t], s_codes[t]]
        m = int(tab_m[m, l_codes[t], s_codes[t]])
    return p_codes, m


# ---------------------------------------------------------------------------
# numba path

if HAS_NUMBA:

    @numba.njit(cache=True)
    def _forward_backward_jit(alpha0, beta_end, pa_l, pch, sig, tab_p, tab_m, want_p):
        T = pa_l.shape[0]
        NM = alpha0.shape[0]
        NL = pa_l.shape[1]
        NP = pch.shape[1]
        C = sig.shape[1]
        alpha = np.empty((T + 1, NM))
        alpha[0] = alpha0
        ext_l = np.zeros((T, NL))
        ext_p = np.zeros((T if want_p else 0, NP))
        for t in range(T):
            a = np.zeros(NM)
            for mu in range(NM):
                am = alpha[t, mu]
                if am == 0.0:
                    continue
                for lam in range(NL):
                    w1 = am * pa_l[t, lam]
                    if w1 == 0.0:
                        continue
                    for c in range(C):
                        s = sig[t, c]
                        a[tab_m[mu, lam, s]] += w1 * pch[t, tab_p[mu, lam, s]]
            tot = a.sum()
            if not tot > 1e-300:
                return ext_l, ext_p, alpha[0], t
            for i in range(NM):
                alpha[t + 1, i] = a[i] / tot
        beta = beta_end / beta_end.sum()
        el = np.zeros(NL)
        ep = np.zeros(NP)
        b = np.zeros(NM)
        for t in range(T - 1, -1, -1):
            el[:] = 0.0
            ep[:] = 0.0
            for mu in range(NM):
                am = alpha[t, mu]
                acc = 0.0
                for lam in range(NL):
                    pl = pa_l[t, lam]
                    for c in range(C):
                        s = sig[t, c]
                        p = tab_p[mu, lam, s]
                        bm = beta[tab_m[mu, lam, s]]
                        pc = pch[t, p]
                        acc += pl * pc * bm
                        base = am * bm
                        el[lam] += base * pc
                        if want_p:
                            ep[p] += base * pl
                b[mu] = acc
            tot = el.sum()
            if not tot > 1e-300:
                return ext_l, ext_p, alpha[0], t
            for lam in range(NL):
                ext_l[t, lam] = el[lam] / tot
            if want_p:
                tp = ep.sum()
                for p in range(NP):
                    ext_p[t, p] = ep[p] / tp
            bs = b.sum()
            if not bs > 1e-300:
                return ext_l, ext_p, alpha[0], t
            for i in range(NM):
                beta[i] = b[i] / bs
        return ext_l, ext_p, alpha[T].copy(), -1

    @numba.njit(cache=True)
    def _track_jit(p_codes, m_end, inv_m, inv_l, inv_s):
        T = p_codes.shape[0]
        l_codes = np.empty(T, dtype=np.int64)
        s_codes = np.empty(T, dtype=np.int64)
        m = m_end
        for t in range(T - 1, -1, -1):
            p = p_codes[t]
            l_codes[t] = inv_l[p, m]
            s_codes[t] = inv_s[p, m]
            m = inv_m[p, m]
        return l_codes, s_codes, m

    @numba.njit(cache=True)
    def _encode_jit(m_start, l_codes, s_codes, tab_p, tab_m):
        T = l_codes.shape[0]
        p_codes = np.empty(T, dtype=np.int64)
        m = m_start
        for t in range(T):
            p_codes[t] = tab_p[m, l_codes[t], s_codes[t]]
            m = tab_m[m, l_codes[t], s_codes[t]]
        return p_codes, m


def use_numba() -> bool:
    return HAS_NUMBA and _numba_requested()


def _resolve(backend):
    backend = backend or ("numba" if use_numba() else "numpy")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}; use 'numba' or 'numpy'")
    return backend


def forward_backward(alpha0, beta_end, pa_l, pch, sig, tab_p, tab_m, want_p, backend=None):
    backend = _resolve(backend)
    if backend == "numba":
        ext_l, ext_p, alpha_end, status = _forward_backward_jit(
            alpha0, beta_end, pa_l, pch, sig, tab_p, tab_m, want_p
        )
        if status >= 0:
            return None, None, None, int(status)
        return ext_l, ext_p, alpha_end, -1
    return forward_backward_numpy(alpha0, beta_end, pa_l, pch, sig, tab_p, tab_m, want_p)


def track(p_codes, m_end, inv_m, inv_l, inv_s, backend=None):
    backend = _resolve(backend)
    p_codes = np.ascontiguousarray(p_codes, dtype=np.int64)
    if backend == "numba":
        l_codes, s_codes, m = _track_jit(p_codes, np.int64(m_end), inv_m, inv_l, inv_s)
        return l_codes, s_codes, int(m)
    return track_numpy(p_codes, m_end, inv_m, inv_l, inv_s)


def encode(m_start, l_codes, s_codes, tab_p, tab_m, backend=None):
    backend = _resolve(backend)
    l_codes = np.ascontiguousarray(l_codes, dtype=np.int64)
    s_codes = np.ascontiguousarray(s_codes, dtype=np.int64)
    if backend == "numba":
        p_codes, m = _encode_jit(np.int64(m_start), l_codes, s_codes, tab_p, tab_m)
        return p_codes, int(m)
    return encode_numpy(m_start, l_codes, s_codes, tab_p, tab_m)
