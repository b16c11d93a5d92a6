"""The ideal triangle transform If(g) = int_{T(g v0, g v1, g v2)} f dA."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInput, NegativelyOriented
from .functions import (  # noqa: F401  (re-exported catalog)
    CATALOG,
    FunctionKind,
    FunctionSpec,
    by_name,
    catalog_functions,
    constant,
    custom,
    dilation_invariant,
    gaussian_bump,
    indicator,
    linear_combination,
    odd_in_x,
    plane_wave_real_part,
)
from .hyperbolic_core import STANDARD_TRIPLE, IdealTriple, MobiusTransform
from .quadrature import IntegralResult, QuadratureConfig, integrate_ideal_triangle, worker_count


@dataclass(frozen=True)
class BaseTriple:
    t: IdealTriple = STANDARD_TRIPLE

    def __post_init__(self):
        if self.t.orientation != 1:
            raise NegativelyOriented("the base triple must be positively oriented")


DEFAULT_BASE = BaseTriple()


def config_for(f: FunctionSpec, cfg: QuadratureConfig | None) -> QuadratureConfig:
    cfg = cfg or QuadratureConfig()
    alpha = 0.0 if f.decay_exponent is None else f.decay_exponent
    return QuadratureConfig(tol=cfg.tol, max_depth=cfg.max_depth, y_cap=cfg.y_cap, tail_exponent=alpha,
                            tail_constant=max(f.sup_norm, 1e-300), max_evaluations=cfg.max_evaluations)


def ideal_transform_result(f: FunctionSpec, g: MobiusTransform, base: BaseTriple = DEFAULT_BASE,
                           cfg: QuadratureConfig | None = None) -> IntegralResult:
    return integrate_ideal_triangle(f, base.t.image(g), config_for(f, cfg))


def ideal_transform(f: FunctionSpec, g: MobiusTransform, base: BaseTriple = DEFAULT_BASE,
                    cfg: QuadratureConfig | None = None) -> float:
    """If(g) for real-valued bounded f."""
    return ideal_transform_result(f, g, base, cfg).value.real


@dataclass(frozen=True)
class TransformRow:
    g: MobiusTransform
    value: float
    error_estimate: float
    error: str | None = None


def _row(f, g, base, cfg) -> TransformRow:
    try:
        res = ideal_transform_result(f, g, base, cfg)
    except Exception as exc:  # a failing row is reported, not raised
        return TransformRow(g, float("nan"), float("nan"), f"{type(exc).__name__}: {exc}")
    return TransformRow(g, res.value.real, res.error_estimate)


def transform_table(f: FunctionSpec, isometries: Sequence[MobiusTransform], base: BaseTriple = DEFAULT_BASE,
                    cfg: QuadratureConfig | None = None) -> list[TransformRow]:
    """One row per isometry, in input order."""
    isometries = list(isometries)
    if not isometries:
        raise EmptyInput("transform_table needs at least one isometry")
    with ThreadPoolExecutor(max_workers=worker_count()) as ex:
        return list(ex.map(lambda g: _row(f, g, base, cfg), isometries))


def write_table_csv(rows: Sequence[TransformRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["a", "b", "c", "d", "value", "error_estimate"])
    for r in rows:
        w.writerow([f"{v:.17g}" for v in (*r.g.coefficients, r.value, r.error_estimate)])


def table_csv(rows: Sequence[TransformRow]) -> str:
    buf = io.StringIO()
    write_table_csv(rows, buf)
    return buf.getvalue()
