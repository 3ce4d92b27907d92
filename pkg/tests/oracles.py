"""Independent brute-force estimators used to cross-check the fusion code path.

The delay-grid least-squares oracle shares no code with the matrix pencil: it
scans explicit delay tuples, projects the gapped data onto the corresponding
cisoid dictionary, and keeps the tuple with the largest projected energy
(equivalently, the global least-squares fit for that model order). Grid then
zoom: the projected-energy surface's finest lobes are at the inverse occupied
span, the coarse step oversamples that, and each zoom shrinks the step 5x
around the incumbent, ending sub-femtosecond.
"""

from itertools import combinations

import numpy as np

from mbradar.fusion import GappedSpectrum


def _occupied(g: GappedSpectrum) -> tuple[np.ndarray, np.ndarray]:
    mask = g.mask.astype(bool)
    return g.freqs[mask], g.values[mask]


def _corr(freqs: np.ndarray, values: np.ndarray, taus: np.ndarray) -> np.ndarray:
    # <e(tau), y> with e(tau)[f] = exp(-j*2*pi*f*tau).
    return np.exp(2j * np.pi * np.outer(taus, freqs)) @ values


def _projected_energy(freqs: np.ndarray, values: np.ndarray, taus: np.ndarray) -> float:
    e = np.exp(-2j * np.pi * np.outer(freqs, taus))
    v = e.conj().T @ values
    gram = e.conj().T @ e
    return float(np.real(np.vdot(v, np.linalg.solve(gram, v))))


def _zoom(freqs, values, taus, step, rounds=8, width=2):
    taus = np.asarray(taus, dtype=float)
    k = taus.size
    for _ in range(rounds):
        best = None
        offsets = np.array(np.meshgrid(*[np.arange(-width, width + 1)] * k)).reshape(k, -1).T
        for off in offsets:
            cand = taus + off * step
            if k > 1 and np.any(np.diff(np.sort(cand)) < step * 0.5):
                continue
            en = _projected_energy(freqs, values, cand)
            if best is None or en > best[0]:
                best = (en, cand)
        taus = best[1]
        step /= 5.0
    return np.sort(taus)


def grid_ls_delays(g: GappedSpectrum, k: int, tau_window: tuple[float, float]) -> np.ndarray:
    """Global least-squares delays for a k-cisoid model, k <= 3, by exhaustive search.

    Returns delays sorted ascending. The Gram entries over a uniform coarse
    grid depend only on the index lag, so they come from one lag table rather
    than per-tuple sums.
    """
    if not 1 <= k <= 3:
        raise ValueError("oracle supports k in 1..3")
    freqs, values = _occupied(g)
    span = freqs.max() - freqs.min()
    # 4x (2-scatterer pairs) / 3x (triples) oversampling of the finest lobe.
    step = 1.0 / ((4.0 if k <= 2 else 3.0) * span)
    lo, hi = tau_window
    coarse = np.arange(lo, hi + step, step)
    n = coarse.size
    v = _corr(freqs, values, coarse)

    if k == 1:
        taus = np.array([coarse[int(np.argmax(np.abs(v)))]])
        return _zoom(freqs, values, taus, step)

    # Lag table: P[m] = sum_f exp(j*2*pi*f*m*step) = <e(tau), e(tau - m*step)>.
    lag = np.exp(2j * np.pi * np.outer(np.arange(n) * step, freqs)).sum(axis=1)
    n_occ = float(freqs.size)

    if k == 2:
        ia, ib = np.triu_indices(n, 1)
        p = lag[ib - ia]  # P(tau_b - tau_a)
        va, vb = v[ia], v[ib]
        # v+ G^-1 v for G = [[n, <e_a,e_b>], [<e_b,e_a>, n]], <e_a,e_b> = conj(p).
        det = n_occ**2 - np.abs(p) ** 2
        en = (
            n_occ * (np.abs(va) ** 2 + np.abs(vb) ** 2)
            - 2.0 * np.real(np.conj(va) * vb * np.conj(p))
        ) / det
        j = int(np.argmax(en))
        taus = np.array([coarse[ia[j]], coarse[ib[j]]])
        return _zoom(freqs, values, taus, step)

    idx = np.array(list(combinations(range(n), 3)))
    best_en, best_triple = -np.inf, None
    for chunk in np.array_split(idx, max(1, idx.shape[0] // 200000)):
        ia, ib, ic = chunk[:, 0], chunk[:, 1], chunk[:, 2]
        m = chunk.shape[0]
        gram = np.empty((m, 3, 3), dtype=np.complex128)
        gram[:, 0, 0] = gram[:, 1, 1] = gram[:, 2, 2] = n_occ
        gram[:, 0, 1] = np.conj(lag[ib - ia])
        gram[:, 1, 0] = lag[ib - ia]
        gram[:, 0, 2] = np.conj(lag[ic - ia])
        gram[:, 2, 0] = lag[ic - ia]
        gram[:, 1, 2] = np.conj(lag[ic - ib])
        gram[:, 2, 1] = lag[ic - ib]
        vv = np.stack([v[ia], v[ib], v[ic]], axis=1)
        sol = np.linalg.solve(gram, vv[:, :, None])[:, :, 0]
        en = np.real(np.einsum("ij,ij->i", np.conj(vv), sol))
        j = int(np.argmax(en))
        if en[j] > best_en:
            best_en, best_triple = en[j], chunk[j]
    taus = coarse[best_triple]
    return _zoom(freqs, values, taus, step)
