"""Published reference values used by ``mdbusy table`` and the acceptance tests.

Values are copied verbatim. For the (alpha = 1, lam = 1) block of the
distribution table the listed abscissae read 0.2 .. 0.5, but the Chebyshev
column only matches at t = 2 .. 5, so the corrected abscissae are stored in
``t`` and the listed ones in ``t_listed``.
"""

from __future__ import annotations

from dataclasses import dataclass

VARIATION_COEFF = {0.5: 0.40655883, 1.0: 0.56798436, 10.0: 0.99959129, 20.0: 0.99999999, 50.0: 0.99999999, 100.0: 0.99999999}
BETA1 = {0.5: 6.0360869, 1.0: 4.5899937, 10.0: 4.0000001, 20.0: 4.0, 50.0: 4.0, 100.0: 4.0}
BETA2 = {0.5: 11.142336, 1.0: 9.6137084, 10.0: 9.0, 20.0: 9.0, 50.0: 9.0, 100.0: 9.0}


@dataclass(frozen=True)
class CdfRow:
    t: float
    t_listed: float
    chebyshev_lower: float
    envelope_lower: float
    pab: float


@dataclass(frozen=True)
class CdfBlock:
    lam: float
    alpha: float
    delta_a: float
    delta_p: float
    rows: tuple[CdfRow, ...]
    exact_mean: float
    exact_variance: float
    computed_mean: float
    computed_variance: float


def _rows(data, t_scale: float = 1.0) -> tuple[CdfRow, ...]:
    return tuple(CdfRow(t * t_scale, t, b1, b2, bc) for t, b1, b2, bc in data)


CDF_BLOCKS = (
    CdfBlock(
        lam=1.0, alpha=0.1, delta_a=0.001, delta_p=0.001,
        rows=_rows([
            (0.11, -14.805062, 0.904837, 0.94131),
            (0.15, 0.816597, 0.904837, 0.950782),
            (0.2, 0.959013, 0.904837, 0.996209),
            (0.25, 0.982428, 0.904837, 0.999575),
        ]),
        exact_mean=0.105170918, exact_variance=0.0003685744,
        computed_mean=0.1049714128, computed_variance=0.00031661238,
    ),
    CdfBlock(
        lam=1.0, alpha=1.0, delta_a=0.1, delta_p=0.001,
        rows=_rows([
            (0.2, -11.001397, 0.367879, 0.741497),
            (0.3, 0.420202, 0.367879, 0.907228),
            (0.4, 0.817048, 0.367879, 0.969885),
            (0.5, 0.911558, 0.367879, 0.992784),
        ], t_scale=10.0),
        exact_mean=1.718281828, exact_variance=0.9524924414,
        computed_mean=1.6649785, computed_variance=0.70343785,
    ),
    CdfBlock(
        lam=1.0, alpha=3.0, delta_a=0.5, delta_p=0.01,
        rows=_rows([
            (4, -0.238790, 0.0497871, 0.099527),
            (5, -0.420929, 0.0497871, 0.148885),
            (6, -0.646402, 0.0497871, 0.198405),
            (7, -0.930133, 0.0497871, 0.244893),
            (8, -1.294064, 0.0497871, 0.288204),
            (9, -1.771539, 0.0497871, 0.329391),
            (10, -2.415214, 0.0497871, 0.368208),
            (15, -15.889655, 0.0497871, 0.530699),
            (20, -336.121704, 0.0497871, 0.65134),
            (25, -7.0691347, 0.0497871, 0.740937),
            (30, -1.366543, 0.0497871, 0.807469),
            (35, -0.133102, 0.0497871, 0.856896),
            (40, 0.355496, 0.0497871, 0.893608),
            (45, 0.580208, 0.0497871, 0.920880),
            (50, 0.705018, 0.0497871, 0.941125),
            (55, 0.781435, 0.0497871, 0.956144),
            (60, 0.831591, 0.0497871, 0.967298),
            (70, 0.891248, 0.0497871, 0.981726),
            (75, 0.909828, 0.0497871, 0.986298),
            (80, 0.924024, 0.0497871, 0.989706),
            (85, 0.935113, 0.0497871, 0.992233),
        ]),
        exact_mean=19.08553692, exact_variance=281.9155718,
        computed_mean=18.60845683, computed_variance=250.9048589,
    ),
)
