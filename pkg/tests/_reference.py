"""Independent reference implementations used as test oracles."""

import numpy as np


def naive_reflect(x0, increments):
    """Straightforward reflection recursion, independent of the kernels.

    Returns positions, lower/upper regulator paths, last push indices,
    switch count, and the clean-switching flag.
    """
    y = [float(x0)]
    lower = [0.0]
    upper = [0.0]
    last_lower = 0
    last_upper = 0
    switches = 0
    side = 0
    for i, inc in enumerate(increments, start=1):
        v = y[-1] + float(inc)
        if v < 0.0:
            lower.append(lower[-1] + -v)
            upper.append(upper[-1])
            y.append(0.0)
            last_lower = i
            if side != 1:
                switches += 1
                side = 1
        elif v > 1.0:
            upper.append(upper[-1] + (v - 1.0))
            lower.append(lower[-1])
            y.append(1.0)
            last_upper = i
            if side != 2:
                switches += 1
                side = 2
        else:
            y.append(v)
            lower.append(lower[-1])
            upper.append(upper[-1])
    n = len(y) - 1
    clean = True
    for i in range(1, n):
        if y[i - 1] == 0.0 and y[i] == 1.0:
            j = i + 1
            while j < n and y[j] != 0.0:
                j += 1
            if all(y[t] < 1.0 for t in range(i + 1, j + 1)):
                clean = False
                break
    return {
        "positions": np.array(y),
        "lower": np.array(lower),
        "upper": np.array(upper),
        "last_lower": last_lower,
        "last_upper": last_upper,
        "switch_count": switches,
        "clean_switching": clean,
    }
