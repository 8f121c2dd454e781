"""Monte Carlo and deterministic volume estimation for the correlation sets.

Under the flat measure on the correlation cube [-1, 1]^4 (the measure induced
by the per-experiment toggle cost, see :mod:`bellvol.toggles`), the volume of
a region is 16 times the probability that four independent uniform draws
land inside it.  This module provides:

* hit-or-miss Monte Carlo volumes with reproducible counter-based parallel
  streams (one Philox substream per (seed, worker) pair, reduced in worker
  order, so results are bit-identical for fixed seed/worker_count and do not
  depend on batch size),
* shared-sample ratio estimators with delta-method standard errors,
* deterministic volumes by adaptive quadrature: every region here is a slab
  family in which the innermost coordinate integrates in closed form, and
  the remaining three are handled by nested adaptive quadrature with an
  explicit error budget,
* the closed-form constants the estimates are compared against.

Closed forms used as cross-checks: V_C = 32/3, V_L = 16, V_Q = 3*pi^2/2,
and V_T = (768*sqrt(2) - 1040)/3 (the eight corner pieces the linear bound
2*sqrt(2) cuts off the cube are pairwise disjoint, and each has the
Irwin-Hall volume 16*(17 - 12*sqrt(2))/6).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import polytopes
from .regions import (
    DEFAULT_TOLERANCE,
    QCharacterization,
    RegionId,
    region_mask,
)

SQRT2 = math.sqrt(2.0)

#: Exact linear-bound volume, derived by cutting 8 disjoint corners off the cube.
V_T_CLOSED_FORM = (768.0 * SQRT2 - 1040.0) / 3.0


class DegenerateDenominator(ZeroDivisionError):
    """Ratio estimation with zero hits in the denominator region."""


class ToleranceNotMet(RuntimeError):
    """The adaptive scheme could not certify the requested tolerance."""


@dataclass(frozen=True)
class EstimatorConfig:
    """Sampling parameters for the Monte Carlo estimators.

    ``worker_count`` partitions the sample budget into independent
    counter-based substreams keyed by (seed, worker index); partial hit
    counts are reduced in worker order, so estimates are bit-identical for
    fixed (seed, worker_count, sample_count) regardless of scheduling or
    batch size.
    """

    sample_count: int = 10_000_000
    seed: int = 0
    worker_count: int = 1
    batch_size: int | None = None

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.batch_size is None:
            object.__setattr__(self, "batch_size",
                               min(1_000_000, self.sample_count))
        if not 1 <= self.batch_size <= self.sample_count:
            raise ValueError("batch_size must be in [1, sample_count]")


@dataclass(frozen=True)
class VolumeEstimate:
    """A volume or ratio value with its error accounting.

    ``std_error`` is the CLT standard error for Monte Carlo estimates and 0
    for deterministic methods (quadrature, exact); ``region`` is the region
    tag, or "A/B" for ratios.
    """

    region: str
    method: str  # "monte-carlo" | "quadrature" | "exact"
    value: float
    std_error: float
    sample_count: int | None = None
    seed: int | None = None

    def as_json_record(self) -> dict:
        return {
            "region": self.region,
            "method": self.method,
            "value": self.value,
            "std_error": self.std_error,
            "n": self.sample_count,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class AnalyticConstants:
    """Closed-form volumes and ratios of the five regions."""

    v_c: float = 2.0 ** 5 / 3.0
    v_l: float = 2.0 ** 4
    v_q: float = 1.5 * math.pi ** 2
    ratio_qc: float = (3.0 * math.pi / 8.0) ** 2
    ratio_ql: float = 3.0 * math.pi ** 2 / 32.0
    ratio_cl: float = 2.0 / 3.0

    def as_dict(self) -> dict:
        return {
            "V_C": self.v_c, "V_L": self.v_l, "V_Q": self.v_q,
            "ratio_QC": self.ratio_qc, "ratio_QL": self.ratio_ql,
            "ratio_CL": self.ratio_cl,
        }


def analytic_constants() -> AnalyticConstants:
    return AnalyticConstants()


# --------------------------------------------------------------------------
# Monte Carlo engine
# --------------------------------------------------------------------------

def _worker_shares(cfg: EstimatorConfig) -> list[int]:
    base, extra = divmod(cfg.sample_count, cfg.worker_count)
    return [base + (1 if w < extra else 0) for w in range(cfg.worker_count)]


def _worker_generator(seed: int, worker: int) -> np.random.Generator:
    key = np.array([seed, worker], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _iter_sample_batches(cfg: EstimatorConfig):
    for worker, share in enumerate(_worker_shares(cfg)):
        gen = _worker_generator(cfg.seed, worker)
        remaining = share
        while remaining > 0:
            m = min(cfg.batch_size, remaining)
            yield 2.0 * gen.random((m, 4)) - 1.0
            remaining -= m


MaskFn = Callable[[np.ndarray], np.ndarray]


def count_hits(cfg: EstimatorConfig, predicates: Sequence[MaskFn]) -> np.ndarray:
    """Hit counts of each predicate on one shared uniform stream."""
    counts = np.zeros(len(predicates), dtype=np.int64)
    for pts in _iter_sample_batches(cfg):
        for k, fn in enumerate(predicates):
            counts[k] += int(fn(pts).sum())
    return counts


def _region_predicate(region: RegionId, tol: float) -> MaskFn:
    return lambda pts: region_mask(region, pts, tol)


def mc_volume(region: RegionId, cfg: EstimatorConfig | None = None,
              tol: float = DEFAULT_TOLERANCE) -> VolumeEstimate:
    """Hit-or-miss volume: 16 * (hits / n) on uniform draws from the cube."""
    cfg = cfg or EstimatorConfig()
    n = cfg.sample_count
    hits = int(count_hits(cfg, [_region_predicate(region, tol)])[0])
    p = hits / n
    return VolumeEstimate(
        region=region.value,
        method="monte-carlo",
        value=16.0 * p,
        std_error=16.0 * math.sqrt(p * (1.0 - p) / n),
        sample_count=n,
        seed=cfg.seed,
    )


def _ratio_with_error(n: int, n_a: int, n_b: int, n_ab: int) -> tuple[float, float]:
    """Shared-stream ratio n_a/n_b with the correlated-binomial delta method."""
    if n_b == 0:
        raise DegenerateDenominator("no hits in the denominator region")
    p_a, p_b, p_ab = n_a / n, n_b / n, n_ab / n
    ratio = n_a / n_b
    cov = p_ab - p_a * p_b
    var = (p_a * (1.0 - p_a) - 2.0 * ratio * cov
           + ratio * ratio * p_b * (1.0 - p_b)) / (n * p_b * p_b)
    return ratio, math.sqrt(max(var, 0.0))


def ratio_estimate(region_a: RegionId, region_b: RegionId,
                   cfg: EstimatorConfig | None = None,
                   tol: float = DEFAULT_TOLERANCE) -> VolumeEstimate:
    """Volume ratio V_A / V_B from one stream scored against both oracles.

    Containment is not assumed; the joint hit count enters the covariance
    term of the delta-method standard error.
    """
    cfg = cfg or EstimatorConfig()
    fa = _region_predicate(region_a, tol)
    fb = _region_predicate(region_b, tol)
    n_a = n_b = n_ab = 0
    for pts in _iter_sample_batches(cfg):
        ma, mb = fa(pts), fb(pts)
        n_a += int(ma.sum())
        n_b += int(mb.sum())
        n_ab += int((ma & mb).sum())
    ratio, err = _ratio_with_error(cfg.sample_count, n_a, n_b, n_ab)
    return VolumeEstimate(
        region=f"{region_a.value}/{region_b.value}",
        method="monte-carlo",
        value=ratio,
        std_error=err,
        sample_count=cfg.sample_count,
        seed=cfg.seed,
    )


# --------------------------------------------------------------------------
# deterministic quadrature
# --------------------------------------------------------------------------
#
# Every region is a "paired slab" family: after choosing the inner coordinate
# w and ordering the outer ones (x, y, z), membership reduces to
#
#     |w + z| <= A(x, y),   |w - z| <= B(x, y),   |w| <= box,
#
# (for the linear families A = bound - |x - y|, B = bound - |x + y|; for the
# quadratic family A, B are the circle radii sqrt(4 - (x -/+ y)^2); in arcsin
# coordinates the weight prod cos applies and the closed form for the inner
# integral is sin(hi) - sin(lo)).  The inner interval is closed-form, the
# outer three dimensions use nested adaptive quadrature with breakpoints at
# the kink loci, and the reported errors are combined into a certified bound.


@dataclass(frozen=True)
class _SlabFamily:
    box: float
    ab_of: Callable[[float, float], tuple[float, float]]
    weighted: bool           # cos weight and sin closed form (arcsin coords)
    mid_kink_shifts: tuple[float, ...]   # mid breakpoints at +/-x +/- shift
    outer_kinks: tuple[float, ...]
    scale: float = 1.0       # constant in front of the whole integral


def _linear_family(bound: float) -> _SlabFamily:
    return _SlabFamily(
        box=1.0,
        ab_of=lambda x, y: (bound - abs(x - y), bound - abs(x + y)),
        weighted=False,
        mid_kink_shifts=(0.0, bound - 1.0),
        outer_kinks=(bound - 1.0,),
    )


def _arcsin_family(half_width: float) -> _SlabFamily:
    half_box = math.pi / 2.0
    return _SlabFamily(
        box=half_box,
        ab_of=lambda x, y: (half_width - abs(x - y), half_width - abs(x + y)),
        weighted=True,
        mid_kink_shifts=(0.0, half_width - half_box, half_width),
        outer_kinks=(half_width - half_box, half_width),
    )


def _circle_family() -> _SlabFamily:
    r3 = math.sqrt(3.0)
    return _SlabFamily(
        box=1.0,
        ab_of=lambda x, y: (math.sqrt(max(0.0, 4.0 - (x - y) ** 2)),
                            math.sqrt(max(0.0, 4.0 - (x + y) ** 2))),
        weighted=False,
        mid_kink_shifts=(0.0, r3),
        outer_kinks=(r3 - 1.0,),
    )


def _paired_slab_volume(fam: _SlabFamily, abs_tol: float,
                        exploit_symmetry: bool = True) -> float:
    """Nested adaptive quadrature with a certified error budget.

    The integrand is even in the inner-adjacent coordinate z and under the
    joint sign flip of (x, y), so by default z and x integrate over the
    half-interval [0, box] with multiplicity 2 each.
    """
    box = fam.box
    length = 2.0 * box
    tol_outer = abs_tol / 8.0
    tol_mid = abs_tol / (8.0 * length)
    tol_inner = abs_tol / (16.0 * length * length)
    worst = {"inner": 0.0, "mid": 0.0}

    def f_inner(z, a, b):
        lo = max(-box, -a - z, z - b)
        hi = min(box, a - z, z + b)
        if hi <= lo:
            return 0.0
        if fam.weighted:
            return math.cos(z) * (math.sin(hi) - math.sin(lo))
        return hi - lo

    z_lo = 0.0 if exploit_symmetry else -box
    z_mult = 2.0 if exploit_symmetry else 1.0

    def inner(x, y):
        a, b = fam.ab_of(x, y)
        if a <= 0.0 or b <= 0.0:
            return 0.0
        pts = sorted({p for p in (a - box, box - a, b - box, box - b,
                                  (a - b) / 2.0, (b - a) / 2.0)
                      if z_lo < p < box})
        val, err = integrate.quad(f_inner, z_lo, box, args=(a, b),
                                  epsabs=tol_inner, epsrel=1e-12, limit=200,
                                  points=pts or None)
        worst["inner"] = max(worst["inner"], err)
        w = math.cos(x) * math.cos(y) if fam.weighted else 1.0
        return z_mult * w * val

    def mid(x):
        cand = []
        for shift in fam.mid_kink_shifts:
            cand += (x + shift, x - shift, -x + shift, -x - shift)
        pts = sorted({p for p in cand if -box < p < box})
        val, err = integrate.quad(lambda y: inner(x, y), -box, box,
                                  epsabs=tol_mid, epsrel=1e-12, limit=200,
                                  points=pts or None)
        worst["mid"] = max(worst["mid"], err)
        return val

    x_lo = 0.0 if exploit_symmetry else -box
    x_mult = 2.0 if exploit_symmetry else 1.0
    opts = sorted({p for p in fam.outer_kinks if x_lo < p < box})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, outer_err = integrate.quad(mid, x_lo, box, epsabs=tol_outer,
                                        epsrel=1e-12, limit=200,
                                        points=opts or None)
    certified = (x_mult * outer_err
                 + length * (worst["mid"] + length * z_mult * worst["inner"]))
    if certified > abs_tol:
        raise ToleranceNotMet(
            f"certified error {certified:.3e} exceeds abs_tol {abs_tol:.3e}")
    return fam.scale * x_mult * val


_QUADRATURE_MIN_TOL = 1e-9


def quadrature_volume(region: RegionId, abs_tol: float = 1e-6,
                      exploit_symmetry: bool = True) -> VolumeEstimate:
    """Deterministic volume of any of the five regions.

    For the cube the value is exact; the other four regions are slab
    families integrated as described in the module docstring.
    """
    if abs_tol < _QUADRATURE_MIN_TOL:
        raise ValueError(f"abs_tol must be >= {_QUADRATURE_MIN_TOL}")
    if region is RegionId.NO_SIGNALING_L:
        value = 16.0
    elif region is RegionId.LOCAL_C:
        value = _paired_slab_volume(_linear_family(2.0), abs_tol, exploit_symmetry)
    elif region is RegionId.TSIRELSON_T:
        value = _paired_slab_volume(_linear_family(2.0 * SQRT2), abs_tol,
                                    exploit_symmetry)
    elif region is RegionId.UFFINK_U:
        value = _paired_slab_volume(_circle_family(), abs_tol, exploit_symmetry)
    elif region is RegionId.QUANTUM_Q:
        value = _paired_slab_volume(_arcsin_family(math.pi), abs_tol,
                                    exploit_symmetry)
    else:
        raise ValueError(f"unknown region {region!r}")
    return VolumeEstimate(region=region.value, method="quadrature",
                          value=value, std_error=0.0)


def quadrature_volume_Q(abs_tol: float = 1e-6, half_width: float = math.pi,
                        exploit_symmetry: bool = True) -> VolumeEstimate:
    """Quantum-set volume in arcsin coordinates.

    The substitution s_ij = arcsin(c_ij) turns the membership condition into
    the linear slab family |sum(s) - 2 s_ij| <= pi with weight prod cos(s);
    the inner coordinate integrates to sin(hi) - sin(lo) in closed form.
    ``half_width`` replaces pi in the slab family (0 collapses the region).
    """
    if abs_tol < _QUADRATURE_MIN_TOL:
        raise ValueError(f"abs_tol must be >= {_QUADRATURE_MIN_TOL}")
    if not 0.0 <= half_width <= math.pi:
        raise ValueError("half_width must be in [0, pi]")
    value = _paired_slab_volume(_arcsin_family(half_width), abs_tol,
                                exploit_symmetry)
    return VolumeEstimate(region=RegionId.QUANTUM_Q.value, method="quadrature",
                          value=value, std_error=0.0)


def volume_T_numeric(cfg: EstimatorConfig | None = None, method: str = "mc",
                     abs_tol: float = 1e-7) -> VolumeEstimate:
    """Volume of the linear-bound region, Monte Carlo by default."""
    if method == "mc":
        return mc_volume(RegionId.TSIRELSON_T, cfg)
    if method == "quadrature":
        return quadrature_volume(RegionId.TSIRELSON_T, abs_tol)
    raise ValueError(f"unknown method {method!r}")


def volume_U_numeric(cfg: EstimatorConfig | None = None, method: str = "mc",
                     abs_tol: float = 1e-7) -> VolumeEstimate:
    """Volume of the quadratic two-circle region, Monte Carlo by default."""
    if method == "mc":
        return mc_volume(RegionId.UFFINK_U, cfg)
    if method == "quadrature":
        return quadrature_volume(RegionId.UFFINK_U, abs_tol)
    raise ValueError(f"unknown method {method!r}")


def exact_region_volume(region: RegionId) -> Fraction:
    """Exact rational volume via the polytope engine (cube and local set)."""
    if region is RegionId.LOCAL_C:
        return polytopes.exact_volume(polytopes.correlation_polytope_C())
    if region is RegionId.NO_SIGNALING_L:
        cube = polytopes.enumerate_vertices(polytopes.cube_polytope_h(4))
        return polytopes.exact_volume(cube)
    raise ValueError(f"region {region.value} has no exact rational volume")


# --------------------------------------------------------------------------
# excess report and headline table
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExcessReport:
    """How much the two outer approximations exceed the quantum set."""

    v_q: VolumeEstimate
    v_t: VolumeEstimate
    v_u: VolumeEstimate
    excess_t: float
    excess_t_std_error: float
    excess_u: float
    excess_u_std_error: float
    fraction_t_outside_q: float
    fraction_t_outside_q_std_error: float

    def as_dict(self) -> dict:
        return {
            "V_Q": self.v_q.as_json_record(),
            "V_T": self.v_t.as_json_record(),
            "V_U": self.v_u.as_json_record(),
            "excess_T": self.excess_t,
            "excess_T_std_error": self.excess_t_std_error,
            "excess_U": self.excess_u,
            "excess_U_std_error": self.excess_u_std_error,
            "fraction_T_outside_Q": self.fraction_t_outside_q,
            "fraction_T_outside_Q_std_error": self.fraction_t_outside_q_std_error,
        }


def excess_report(method: str = "quadrature",
                  cfg: EstimatorConfig | None = None,
                  abs_tol: float = 1e-7) -> ExcessReport:
    """V_T/V_Q - 1, V_U/V_Q - 1 and the fraction of T not in Q.

    With the default quadrature method all inputs are deterministic and the
    reported standard errors are 0; with method="mc" the excesses are
    shared-stream ratio estimates with delta-method errors.
    """
    if method == "quadrature":
        v_q = quadrature_volume(RegionId.QUANTUM_Q, abs_tol)
        v_t = quadrature_volume(RegionId.TSIRELSON_T, abs_tol)
        v_u = quadrature_volume(RegionId.UFFINK_U, abs_tol)
        return ExcessReport(
            v_q=v_q, v_t=v_t, v_u=v_u,
            excess_t=v_t.value / v_q.value - 1.0,
            excess_t_std_error=0.0,
            excess_u=v_u.value / v_q.value - 1.0,
            excess_u_std_error=0.0,
            fraction_t_outside_q=1.0 - v_q.value / v_t.value,
            fraction_t_outside_q_std_error=0.0,
        )
    if method == "mc":
        cfg = cfg or EstimatorConfig()
        ratio_tq = ratio_estimate(RegionId.TSIRELSON_T, RegionId.QUANTUM_Q, cfg)
        ratio_uq = ratio_estimate(RegionId.UFFINK_U, RegionId.QUANTUM_Q, cfg)
        ratio_qt = ratio_estimate(RegionId.QUANTUM_Q, RegionId.TSIRELSON_T, cfg)
        return ExcessReport(
            v_q=mc_volume(RegionId.QUANTUM_Q, cfg),
            v_t=mc_volume(RegionId.TSIRELSON_T, cfg),
            v_u=mc_volume(RegionId.UFFINK_U, cfg),
            excess_t=ratio_tq.value - 1.0,
            excess_t_std_error=ratio_tq.std_error,
            excess_u=ratio_uq.value - 1.0,
            excess_u_std_error=ratio_uq.std_error,
            fraction_t_outside_q=1.0 - ratio_qt.value,
            fraction_t_outside_q_std_error=ratio_qt.std_error,
        )
    raise ValueError(f"unknown method {method!r}")


_HEADLINE_REGIONS = (RegionId.LOCAL_C, RegionId.QUANTUM_Q, RegionId.UFFINK_U,
                     RegionId.TSIRELSON_T, RegionId.NO_SIGNALING_L)
_HEADLINE_RATIOS = ((RegionId.QUANTUM_Q, RegionId.LOCAL_C),
                    (RegionId.QUANTUM_Q, RegionId.NO_SIGNALING_L),
                    (RegionId.LOCAL_C, RegionId.NO_SIGNALING_L))


def headline_report(cfg: EstimatorConfig | None = None,
                    tol: float = DEFAULT_TOLERANCE) -> dict:
    """Everything the `ratios` command prints, from one shared sample stream.

    Returns volumes for all five regions, the three headline ratios with
    delta-method errors, the two excesses over the quantum set, the analytic
    constants, and each estimate's deviation from its constant in units of
    its standard error.
    """
    cfg = cfg or EstimatorConfig()
    n = cfg.sample_count
    masks = {r: _region_predicate(r, tol) for r in _HEADLINE_REGIONS}
    counts = {r: 0 for r in _HEADLINE_REGIONS}
    pair_keys = set(_HEADLINE_RATIOS) | {
        (RegionId.TSIRELSON_T, RegionId.QUANTUM_Q),
        (RegionId.UFFINK_U, RegionId.QUANTUM_Q)}
    joints = {pair: 0 for pair in pair_keys}
    for pts in _iter_sample_batches(cfg):
        batch = {r: masks[r](pts) for r in _HEADLINE_REGIONS}
        for r, m in batch.items():
            counts[r] += int(m.sum())
        for ra, rb in joints:
            joints[(ra, rb)] += int((batch[ra] & batch[rb]).sum())

    constants = analytic_constants()
    analytic_volumes = {
        RegionId.LOCAL_C: constants.v_c,
        RegionId.QUANTUM_Q: constants.v_q,
        RegionId.UFFINK_U: None,
        RegionId.TSIRELSON_T: None,
        RegionId.NO_SIGNALING_L: constants.v_l,
    }
    volumes = {}
    for r in _HEADLINE_REGIONS:
        p = counts[r] / n
        est = VolumeEstimate(region=r.value, method="monte-carlo",
                             value=16.0 * p,
                             std_error=16.0 * math.sqrt(p * (1.0 - p) / n),
                             sample_count=n, seed=cfg.seed)
        rec = est.as_json_record()
        ref = analytic_volumes[r]
        rec["analytic"] = ref
        rec["deviation_sigmas"] = (
            None if ref is None or est.std_error == 0.0
            else (est.value - ref) / est.std_error)
        volumes[r.value] = rec

    analytic_ratios = {
        ("Q", "C"): constants.ratio_qc,
        ("Q", "L"): constants.ratio_ql,
        ("C", "L"): constants.ratio_cl,
    }
    ratios = {}
    for ra, rb in _HEADLINE_RATIOS:
        value, err = _ratio_with_error(n, counts[ra], counts[rb],
                                       joints[(ra, rb)])
        ref = analytic_ratios[(ra.value, rb.value)]
        ratios[f"{ra.value}/{rb.value}"] = {
            "value": value, "std_error": err, "analytic": ref,
            "deviation_sigmas": (value - ref) / err if err else None,
        }

    excesses = {}
    for top, name in ((RegionId.TSIRELSON_T, "T/Q-1"),
                      (RegionId.UFFINK_U, "U/Q-1")):
        value, err = _ratio_with_error(n, counts[top],
                                       counts[RegionId.QUANTUM_Q],
                                       joints[(top, RegionId.QUANTUM_Q)])
        excesses[name] = {"value": value - 1.0, "std_error": err}

    return {
        "n": n,
        "seed": cfg.seed,
        "worker_count": cfg.worker_count,
        "volumes": volumes,
        "ratios": ratios,
        "excesses": excesses,
        "analytic": constants.as_dict(),
    }
