"""Pure-numpy fallback for the truncated-product kernel in ``_jetcore.pyx``."""

import numpy as np


def convolve(a, b, ia, ib, ic, size):
    prod = a[ia] * b[ib]
    if np.iscomplexobj(prod):
        re = np.bincount(ic, weights=prod.real, minlength=size)
        im = np.bincount(ic, weights=prod.imag, minlength=size)
        return re + 1j * im
    return np.bincount(ic, weights=prod, minlength=size)
