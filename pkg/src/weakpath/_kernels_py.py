"""Pure numpy versions of the compiled density kernels (same signatures)."""
import numpy as np

_ROW_BLOCK = 256


def density_1d(are, aim, t0, nthreads=1):
    amps = np.asarray(are) + 1j * np.asarray(aim)
    psi = amps @ np.asarray(t0)
    return np.sum(psi.real**2 + psi.imag**2, axis=0)


def density_2d(are, aim, t0, t1, nthreads=1):
    amps = np.asarray(are) + 1j * np.asarray(aim)
    t0 = np.asarray(t0)
    t1 = np.asarray(t1)
    out = np.zeros((t0.shape[1], t1.shape[1]))
    # row blocks bound the size of the complex temporaries
    for start in range(0, t0.shape[1], _ROW_BLOCK):
        rows = t0[:, start:start + _ROW_BLOCK]
        for a in amps:
            psi = (a[:, None] * rows).T @ t1
            out[start:start + _ROW_BLOCK] += psi.real**2 + psi.imag**2
    return out
