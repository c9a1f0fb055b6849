"""Experiment drivers producing pass/fail reports.

Exponent targets for the mu_a sweeps come from box counting with the
density ``|t1|^((m-2)a)`` near the singular plane:
``mu_a(S) ~ delta^(4 + 2(m-2)a)`` and ``mu_a(S') ~ delta^(3 + (m-2)a)``.
Since ``|C(chi_S)| ~ 1`` on ``S'``, the ratio behaves like
``delta^(-(1 - (2-m)a)/p)``.  The quadratic family is the case ``m = 2``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .boundary import DEFAULT_A, Chart, Side, SphereParam, make_boxes
from .geometry import (
    AffineImage,
    DomainSpec,
    Family,
    cpoint,
    delta,
    delta0_power_closed,
    delta0_quad_closed,
    random_unitary,
    tau,
)
from .measures import (
    LERAY_LEVI,
    SIGMA,
    MeasureKind,
    box_measure,
    chart_rule,
    density,
    leray_levi_density,
    mu,
    transported_ll,
)
from .transform import (
    BoundaryFunction,
    QuadConfig,
    blowup_data,
    cauchy_leray,
    cauchy_leray_global,
    indicator,
)

ALGEBRAIC_TOL = 1e-12
QUADRATURE_TOL = 1e-8


class ExperimentError(ValueError):
    pass


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict
    rows: list = field(default_factory=list)
    fit: dict | None = None
    checks: list = field(default_factory=list)

    def check(self, name: str, value, passed: bool, target=None, tolerance=None, relation: str = ""):
        self.checks.append({
            "name": name,
            "value": value,
            "target": target,
            "tolerance": 0.0 if tolerance is None else tolerance,
            "relation": relation,
            "pass": bool(passed),
        })
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def provenance(self) -> dict:
        blob = json.dumps(self.parameters, sort_keys=True, default=str).encode()
        return {"version": __version__, "config_hash": hashlib.sha256(blob).hexdigest()}

    def to_dict(self) -> dict:
        out = {}
        if self.fit and "target" in self.fit:
            out = {k: self.fit[k] for k in ("slope", "target", "tolerance")}
        return out | {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "rows": self.rows,
            "fit": self.fit,
            "checks": self.checks,
            "pass": self.passed,
            "provenance": self.provenance(),
        }


def fit_power_law(points):
    """Least-squares line through ``(log x, log y)``: ``(slope, intercept, residual)``.

    ``residual`` is the root-mean-square of the log residuals.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise ExperimentError("need at least two points for a power-law fit")
    if np.any(pts <= 0):
        raise ExperimentError("power-law fit needs positive abscissae and values")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    res = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(res**2)))


def _cplx(v):
    v = complex(v)
    return [v.real, v.imag]


def _stable(values, tol):
    values = np.asarray(values, float)
    ref = float(np.mean(values))
    dev = float(np.max(np.abs(values / ref - 1.0)))
    return dev, dev <= tol


def _model_spec(family: str, m: float | None) -> DomainSpec:
    return DomainSpec(Family.MODEL_QUAD) if family == "quad" else DomainSpec(Family.MODEL_POWER, m=m)


def _bounded_spec(family: str, m: float | None) -> DomainSpec:
    return DomainSpec(Family.BOUNDED_QUAD) if family == "quad" else DomainSpec(Family.BOUNDED_POWER, m=m)


def _scaled_spec(family: str, m: float | None, eps: float) -> DomainSpec:
    fam = Family.SCALED_QUAD if family == "quad" else Family.SCALED_POWER
    return DomainSpec(fam, m=m, eps=eps)


def _check_family(family, m):
    if family not in {"quad", "power"}:
        raise ExperimentError(f"family must be 'quad' or 'power', got {family!r}")
    if family == "power" and (m is None or not 1 < m < 2):
        raise ExperimentError(f"power family needs 1 < m < 2, got {m}")
    return None if family == "quad" else m


def _check_decreasing(values, name, minimum=3):
    values = list(values)
    if len(values) < minimum:
        raise ExperimentError(f"{name} needs at least {minimum} entries")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise ExperimentError(f"{name} must be strictly decreasing")


def measure_kind_for(a_measure: float) -> MeasureKind:
    return SIGMA if a_measure == 0 else mu(a_measure)


def blowup_target(family: str, p: float, a_measure: float, m: float | None) -> float:
    mm = 2.0 if family == "quad" else m
    return -(1.0 - (2.0 - mm) * a_measure) / p


def default_slope_tolerance(family: str, p: float) -> float:
    return 0.1 if (family == "quad" and p == 2) else 0.15


_BLOWUP_CACHE: dict = {}


def _blowup_point(family, m, d, a_box, mode, quad):
    key = (family, m, d, a_box, mode, quad)
    if key not in _BLOWUP_CACHE:
        s, sp = make_boxes(family, d, a_box, m)
        if mode == "model":
            chart = Chart(_model_spec(family, m))
        else:
            # boxes of the dilated domain pulled back into bD itself, eps = delta
            spec = _bounded_spec(family, m)
            chart = Chart(spec, Side.LOWER)
            s, sp = s.scaled(d, spec.kappa), sp.scaled(d, spec.kappa)
        _BLOWUP_CACHE[key] = blowup_data(chart, s, sp, quad)
    return _BLOWUP_CACHE[key]


def blowup_sweep(family: str, p: float, a_measure: float, deltas, mode: str = "model",
                 m: float | None = None, a_box: float = DEFAULT_A, quad: QuadConfig = QuadConfig(),
                 tolerance: float | None = None, stability_tol: float = 0.25,
                 direct_slope_max: float = -0.35) -> ExperimentReport:
    m = _check_family(family, m)
    if mode not in {"model", "bounded"}:
        raise ExperimentError(f"mode must be 'model' or 'bounded', got {mode!r}")
    if not p >= 1 or not np.isfinite(p):
        raise ExperimentError(f"p must lie in [1, inf), got {p}")
    deltas = [float(d) for d in deltas]
    _check_decreasing(deltas, "delta list")
    if family == "power" and a_measure >= 1.0 / (2.0 - m):
        raise ExperimentError("mu_a is not locally finite for a >= 1/(2-m)")
    kind = measure_kind_for(a_measure)
    target = blowup_target(family, p, a_measure, m)
    tol = default_slope_tolerance(family, p) if tolerance is None else tolerance
    rep = ExperimentReport("reproduce-blowup", {
        "family": family, "m": m, "p": p, "a_measure": a_measure, "a_box": a_box,
        "deltas": deltas, "mode": mode, "measure": str(kind),
        "orders": list(quad.orders), "outer_orders": list(quad.outer_orders),
        "levels": quad.levels, "graded_order": quad.graded_order,
    })
    for d in sorted(deltas, reverse=True):
        bd = _blowup_point(family, m, d, a_box, mode, quad)
        num, den = bd.norms(p, kind)
        rep.rows.append({
            "delta": d,
            "ratio": num / den,
            "lognorm_num": float(np.log(num)),
            "lognorm_den": float(np.log(den)),
            "min_re_transform": float(bd.values.real.min()),
            "min_abs_delta": bd.min_delta,
        })
    ratios = [r["ratio"] for r in rep.rows]
    slope, intercept, resid = fit_power_law([(r["delta"], r["ratio"]) for r in rep.rows])
    rep.fit = {"slope": slope, "intercept": intercept, "residual": resid, "target": target, "tolerance": tol}
    rep.check("slope", slope, abs(slope - target) <= tol, target, tol, "|slope - target| <= tol")
    rep.check("ratio_increasing", ratios, all(b > a for a, b in zip(ratios, ratios[1:])),
              relation="R(delta) strictly increasing as delta decreases")
    mins = [r["min_re_transform"] for r in rep.rows]
    rep.check("re_transform_positive", min(mins), min(mins) > 0, 0.0, None, "min Re C(chi_S) on S' > 0")
    dev, ok = _stable(mins, stability_tol)
    rep.check("re_transform_stable", dev, ok, 0.0, stability_tol, "max |c/mean - 1| <= tol")
    if mode == "bounded":
        rep.check("direct_slope", slope, slope <= direct_slope_max, direct_slope_max, None, "slope <= target")
    return rep


def _sample_cells(rng, cells, n):
    idx = rng.integers(len(cells), size=n)
    lo = np.array([cells[i][0] for i in idx])
    hi = np.array([cells[i][1] for i in idx])
    return lo + (hi - lo) * rng.uniform(size=(n, 3))


def scaling_limit(family: str, delta_: float, eps_list, m: float | None = None, n_samples: int = 16,
                  seed: int = 0, a_box: float = DEFAULT_A, quad: QuadConfig = QuadConfig(),
                  final_tol: float | None = None, contraction: float = 4.0,
                  contraction_tol: float = 0.5) -> ExperimentReport:
    """Error of the conjugated operators against the model operator on seeded points of S'."""
    m = _check_family(family, m)
    eps_list = [float(e) for e in eps_list]
    _check_decreasing(eps_list, "eps list", minimum=2)
    if final_tol is None:
        final_tol = 1e-4 if family == "quad" else 1e-2
    rng = np.random.default_rng(seed)
    s, sp = make_boxes(family, delta_, a_box, m)
    f = indicator(s)
    t = _sample_cells(rng, sp.cells(), n_samples * len(sp.cells()))
    model = Chart(_model_spec(family, m))
    c0 = cauchy_leray(model, f, model.embed(t), quad=quad)
    scale = float(np.max(np.abs(c0)))
    rep = ExperimentReport("reproduce-scaling-limit", {
        "family": family, "m": m, "delta": delta_, "eps": eps_list, "samples": len(t), "seed": seed,
        "a_box": a_box, "orders": list(quad.orders), "levels": quad.levels,
    })
    prev = None
    for e in eps_list:
        chart = Chart(_scaled_spec(family, m, e))
        ce = cauchy_leray(chart, f, chart.embed(t), quad=quad)
        err = float(np.max(np.abs(ce - c0)))
        row = {"eps": e, "max_abs_err": err, "rel_err": err / scale,
               "contraction": (prev / err) if prev else None}
        rep.rows.append(row)
        prev = err
    errs = [r["rel_err"] for r in rep.rows]
    rep.check("monotone", errs, all(b < a for a, b in zip(errs, errs[1:])), relation="error decreases with eps")
    rep.check("final_error", errs[-1], errs[-1] < final_tol, final_tol, None, "relative error < target")
    if family == "quad":
        ratios = [r["contraction"] for r in rep.rows[1:]]
        ok = all(abs(q / contraction - 1.0) <= contraction_tol for q in ratios)
        rep.check("contraction", ratios, ok, contraction, contraction_tol, "|ratio/4 - 1| <= tol per halving")
    rep.fit = dict(zip(("slope", "intercept", "residual"),
                       fit_power_law([(r["eps"], r["max_abs_err"]) for r in rep.rows])))
    return rep


# -- convexity ---------------------------------------------------------------

E6_CORRECTED = 2.0 - np.sqrt(2.0)


def convexity_slack(w, z, constant: float = 1.0):
    """``(grad rho(w), w - z)_R`` minus the printed lower bound for BoundedQuad.

    ``constant`` multiplies the ``(v1^2 + y1^2)(v1 - y1)^2`` term; the sharp
    value for the quartic is ``2 - sqrt(2)``.
    """
    spec = DomainSpec(Family.BOUNDED_QUAD)
    w = np.asarray(w, complex)
    z = np.asarray(z, complex)
    g = spec.real_gradient(w)
    d = w - z
    lhs = g[..., 0] * d[..., 0].real + g[..., 1] * d[..., 0].imag + g[..., 2] * d[..., 1].real + g[..., 3] * d[..., 1].imag
    u1, v1, u2, v2 = w[..., 0].real, w[..., 0].imag, w[..., 1].real, w[..., 1].imag
    x1, y1, x2, y2 = z[..., 0].real, z[..., 0].imag, z[..., 1].real, z[..., 1].imag
    rhs = (x1 - u1) ** 2 + (x2 - u2) ** 2 + (y2 - v2) ** 2 + constant * (v1**2 + y1**2) * (v1 - y1) ** 2
    return lhs - rhs, lhs


def _boundary_samples(spec: DomainSpec, rng, n):
    if spec.family is Family.BOUNDED_QUAD:
        params = np.column_stack([
            rng.uniform(-np.pi / 2, np.pi / 2, n), rng.uniform(0, np.pi, n), rng.uniform(0, 2 * np.pi, n)
        ])
        return SphereParam().embed(params)
    # rejection sample the base region, then pick a sheet
    out = []
    need = n
    while need > 0:
        t = rng.uniform(-1, 1, size=(2 * need, 3))
        t = t[np.abs(t[:, 0]) ** spec.m + t[:, 1] ** 2 + t[:, 2] ** 2 < 1][:need]
        sides = rng.integers(2, size=len(t))
        z = np.where(sides[:, None] == 0, Chart(spec, Side.LOWER).embed(t), Chart(spec, Side.UPPER).embed(t))
        out.append(z)
        need -= len(t)
    return np.concatenate(out)


def convexity_report(family: str = "quad", n_pairs: int = 10**6, seed: int = 0, m: float = 1.5,
                     chunk: int = 200_000, tol: float = 1e-12) -> ExperimentReport:
    m = _check_family(family, m)
    spec = _bounded_spec(family, m)
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("verify-convexity", {"family": family, "m": m, "pairs": n_pairs, "seed": seed})
    min_printed = min_sharp = min_re = np.inf
    nonpositive = 0
    for start in range(0, n_pairs, chunk):
        k = min(chunk, n_pairs - start)
        w = _boundary_samples(spec, rng, k)
        z = _boundary_samples(spec, rng, k)
        two_re = 2 * delta(spec, w, z).real
        distinct = np.any(w != z, axis=-1)
        nonpositive += int(np.sum((two_re <= 0) & distinct))
        min_re = min(min_re, float(two_re.min()))
        if family == "quad":
            printed, _ = convexity_slack(w, z)
            sharp, _ = convexity_slack(w, z, E6_CORRECTED)
            min_printed = min(min_printed, float(printed.min()))
            min_sharp = min(min_sharp, float(sharp.min()))
    rep.rows.append({"family": family, "min_two_re_delta": min_re, "nonpositive_pairs": nonpositive,
                     "min_slack_printed": None if family == "power" else min_printed,
                     "min_slack_sharp": None if family == "power" else min_sharp})
    if family == "quad":
        rep.check("slack_printed", min_printed, min_printed >= -tol, -tol, None, "min slack >= -1e-12")
        rep.check("slack_sharp_constant", min_sharp, min_sharp >= -tol, -tol, None,
                  "min slack with constant 2 - sqrt(2) >= -1e-12")
    rep.check("re_delta_nonnegative", min_re, min_re >= -tol, -tol, None, "min 2 Re Delta >= -1e-12")
    rep.check("re_delta_positive_off_diagonal", nonpositive, nonpositive == 0, 0, None,
              "no distinct pair with Re Delta <= 0")
    return rep


def clinear_failure_demo(t_list) -> ExperimentReport:
    """Zeros of the denominator on ``w = (i t, 0)`` against the Siegel model ``2 Im z2 > |z1|^2``."""
    t_list = [float(t) for t in t_list]
    if any(t == 0 for t in t_list):
        raise ExperimentError("t values must be nonzero")
    spec = DomainSpec(Family.MODEL_QUAD)
    rep = ExperimentReport("clinear-failure", {"t": t_list})
    chart = Chart(spec)
    origin = np.zeros(2, complex)
    for t in sorted(t_list, key=abs, reverse=True):
        w = chart.embed([0.0, t, 0.0])
        d = delta(spec, w, origin)
        ratio = abs(d) / np.sum(np.abs(w) ** 2)
        # Siegel model: rho = |z1|^2 - 2 y2, d rho = (conj z1, i), boundary point (i t, i t^2/2)
        ws = np.array([1j * t, 0.5j * t**2])
        ds = np.conj(ws[0]) * ws[0] + 1j * ws[1]
        rep.rows.append({"t": t, "abs_w": float(np.linalg.norm(w)), "ratio": float(ratio),
                         "siegel_ratio": float(abs(ds) / np.sum(np.abs(ws) ** 2))})
    rep.check("exact_zeros", [r["ratio"] for r in rep.rows], all(r["ratio"] == 0 for r in rep.rows),
              0.0, 0.0, "ratio == 0 exactly")
    rep.check("siegel_positive", [r["siegel_ratio"] for r in rep.rows],
              all(r["siegel_ratio"] > 0 for r in rep.rows), relation="ratio > 0")
    return rep


def bound_check(family: str, deltas, a: float | None = None, m: float | None = None, n: int = 10**5,
                seed: int = 0, stability_tol: float = 0.25, power_re_min: float = 0.4) -> ExperimentReport:
    """Pointwise bounds on the model denominator over seeded pairs of ``S x S'``.

    Quadratic: ``Re >= delta^2/4``, ``|Im| <= 3 a delta^2``, ``Re(Delta^-2) > 0``.
    Power: the same with ``delta^m`` in place of ``delta^2`` (``Re >= 0.4 delta^m``).
    """
    m = _check_family(family, m)
    if a is None:
        a = DEFAULT_A if family == "quad" else DEFAULT_A / 2
    deltas = [float(d) for d in deltas]
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("bound-check", {"family": family, "m": m, "a": a, "deltas": deltas,
                                           "samples": n, "seed": seed})
    scale_exp = 2.0 if family == "quad" else m
    for d in sorted(deltas, reverse=True):
        s, sp = make_boxes(family, d, a, m)
        w = _sample_cells(rng, s.cells(), n)
        z = _sample_cells(rng, sp.cells(), n)
        D = delta0_quad_closed(w, z) if family == "quad" else delta0_power_closed(w, z, m)
        inv2 = (1.0 / D**2).real
        rep.rows.append({
            "delta": d,
            "min_re": float(D.real.min()),
            "max_abs_im": float(np.abs(D.imag).max()),
            "min_re_scaled": float(D.real.min() / d**scale_exp),
            "max_im_scaled": float(np.abs(D.imag).max() / d**scale_exp),
            "min_re_inv2_scaled": float(inv2.min() * d ** (2 * scale_exp)),
            "n_nonpositive_re_inv2": int(np.sum(inv2 <= 0)),
        })
    rows = rep.rows
    if family == "quad":
        rep.check("re_lower", min(r["min_re_scaled"] for r in rows),
                  all(r["min_re"] >= r["delta"] ** 2 / 4 for r in rows), 0.25, None, "min Re Delta >= delta^2/4")
        rep.check("im_upper", max(r["max_im_scaled"] for r in rows),
                  all(r["max_abs_im"] <= 3 * a * r["delta"] ** 2 for r in rows), 3 * a, None,
                  "max |Im Delta| <= 3 a delta^2")
    else:
        rep.check("re_lower", min(r["min_re_scaled"] for r in rows),
                  all(r["min_re_scaled"] >= power_re_min for r in rows), power_re_min, None,
                  "min Re Delta >= 0.4 delta^m")
        rep.check("im_below_re", max(r["max_im_scaled"] for r in rows),
                  all(r["max_im_scaled"] < r["min_re_scaled"] for r in rows), None, None,
                  "max |Im Delta| < min Re Delta")
    rep.check("re_inv2_positive", sum(r["n_nonpositive_re_inv2"] for r in rows),
              all(r["n_nonpositive_re_inv2"] == 0 for r in rows), 0, None, "Re(Delta^-2) > 0 at every sample")
    dev, ok = _stable([r["min_re_inv2_scaled"] for r in rows], stability_tol)
    rep.check("re_inv2_stable", dev, ok, 0.0, stability_tol, "max |c/mean - 1| <= tol")
    return rep


# -- identities --------------------------------------------------------------

IDENTITIES = ("DeltaScaling", "Isometry", "Conjugation", "DensityTransport", "ClosedFormAgreement", "Invariance")


def _case(rep, cid, lhs, rhs, tol, relative=False):
    lhs_c, rhs_c = complex(lhs), complex(rhs)
    err = abs(lhs_c - rhs_c)
    bound = tol * max(abs(lhs_c), abs(rhs_c)) if relative else tol
    ok = err <= bound
    as_num = (lambda v: v.real) if lhs_c.imag == 0 and rhs_c.imag == 0 else _cplx
    rep.rows.append({"id": cid, "lhs": as_num(lhs_c), "rhs": as_num(rhs_c), "abs_err": err,
                     "tolerance": tol, "relative": relative, "pass": bool(ok)})
    return ok


def _random_points(rng, n, scale=1.0):
    return cpoint(scale * (rng.normal(size=n) + 1j * rng.normal(size=n)),
                  scale * (rng.normal(size=n) + 1j * rng.normal(size=n)))


def _identity_delta_scaling(rep, rng, m):
    for family in ("quad", "power"):
        mm = None if family == "quad" else m
        base = _bounded_spec(family, mm)
        for eps in (0.5, 0.1):
            scaled = _scaled_spec(family, mm, eps)
            w, z = _random_points(rng, 5, 0.5), _random_points(rng, 5, 0.5)
            lhs = delta(scaled, w, z)
            rhs = eps ** -base.kappa * delta(base, tau(w, eps, base.kappa), tau(z, eps, base.kappa))
            for i in range(len(w)):
                _case(rep, f"{family}/eps={eps:g}/{i}", lhs[i], rhs[i], 1e-13, relative=True)


def _test_box(family):
    return np.array([0.05, -0.2, -0.1]), np.array([0.3, 0.2, 0.1])


def _identity_isometry(rep, rng, m, quad):
    fns = {
        "1": lambda z: np.ones(len(z)),
        "|z1|": lambda z: np.abs(z[:, 0]),
        "Re z2": lambda z: z[:, 1].real,
    }
    for family, eps in (("quad", 0.25), ("power", 0.25)):
        mm = None if family == "quad" else m
        base = Chart(_bounded_spec(family, mm), Side.LOWER)
        kappa = base.spec.kappa
        scaled = Chart(_scaled_spec(family, mm, eps))
        lo, hi = _test_box(family)
        f = np.array([eps, eps, eps**kappa])
        sn, sw = chart_rule(base, (lo, hi), LERAY_LEVI, quad.orders)
        tn, tw = chart_rule(scaled, (lo / f, hi / f), transported_ll(eps), quad.orders)
        zb = base.embed(sn)
        zt = tau(scaled.embed(tn), eps, kappa)
        for name, F in fns.items():
            for p in (1, 2, 4):
                lhs = np.sum(sw * np.abs(F(zb)) ** p) ** (1 / p)
                rhs = eps ** (2 * kappa / p) * np.sum(tw * np.abs(F(zt)) ** p) ** (1 / p)
                _case(rep, f"{family}/F={name}/p={p}", lhs, rhs, QUADRATURE_TOL, relative=True)


def _identity_conjugation(rep, rng, m, quad, n_cases=10):
    for family in ("quad", "power"):
        mm = None if family == "quad" else m
        s, sp = make_boxes(family, 0.1, DEFAULT_A, mm)
        base = Chart(_bounded_spec(family, mm), Side.LOWER)
        kappa = base.spec.kappa
        for i in range(n_cases):
            eps = float(rng.uniform(0.05, 0.5))
            scaled = Chart(_scaled_spec(family, mm, eps))
            t = _sample_cells(rng, sp.cells(), 1)
            lhs = cauchy_leray(scaled, indicator(s), scaled.embed(t), quad=quad)[0]
            f_pull = BoundaryFunction(list(s.scaled(eps, kappa).cells()))
            rhs = cauchy_leray(base, f_pull, tau(scaled.embed(t), eps, kappa), quad=quad)[0]
            _case(rep, f"{family}/case={i}/eps={eps:.4f}", lhs, rhs, QUADRATURE_TOL, relative=True)


def _identity_density_transport(rep, rng, m):
    for family, eps in (("quad", 0.2), ("power", 0.1)):
        mm = None if family == "quad" else m
        base = Chart(_bounded_spec(family, mm), Side.LOWER)
        kappa = base.spec.kappa
        scaled = Chart(_scaled_spec(family, mm, eps))
        kind = transported_ll(eps)
        # pointwise reading: density at t equals eps^(2-kappa) times the base density at the image
        t = np.array([[0.5, 0.1, 0.3], [1.0, -0.4, 0.2]])
        s = t * np.array([eps, eps, eps**kappa])
        pt = density(scaled, t, kind)
        pb = eps ** (2 - kappa) * leray_levi_density(base, s)
        for i in range(len(t)):
            _case(rep, f"{family}/pointwise/{i}", pt[i], pb[i], 1e-10, relative=True)
        # integral identity with independent rules on each side
        lo, hi = _test_box(family)
        f = np.array([eps, eps, eps**kappa])
        F = lambda z: 1.0 + np.abs(z[:, 0]) ** 2 + z[:, 1].real
        tn, tw = chart_rule(scaled, (lo / f, hi / f), kind, 12)
        lhs = np.sum(tw * F(tau(scaled.embed(tn), eps, kappa)))
        sn, sw = chart_rule(base, (lo, hi), LERAY_LEVI, 20)
        rhs = eps ** (-2 * kappa) * np.sum(sw * F(base.embed(sn)))
        _case(rep, f"{family}/integral", lhs, rhs, QUADRATURE_TOL, relative=True)


def closed_form_agreement(rng, n=10**4, m=1.5):
    """Max deviation of the closed-form model denominators from ``delta`` on lifted pairs."""
    out = {}
    for family in ("quad", "power"):
        mm = None if family == "quad" else m
        chart = Chart(_model_spec(family, mm))
        wt = rng.uniform(-1, 1, size=(n, 3))
        zt = rng.uniform(-1, 1, size=(n, 3))
        generic = delta(chart.spec, chart.embed(wt), chart.embed(zt))
        closed = delta0_quad_closed(wt, zt) if family == "quad" else delta0_power_closed(wt, zt, mm)
        out[family] = float(np.max(np.abs(generic - closed)))
    return out


def _identity_closed_forms(rep, rng, m):
    for family, err in closed_form_agreement(rng, 10**4, m).items():
        _case(rep, f"{family}/max_over_1e4_pairs", err, 0.0, 1e-13)


def _identity_invariance(rep, rng, m):
    specs = [DomainSpec(Family.BOUNDED_QUAD), DomainSpec(Family.MODEL_POWER, m=m)]
    for spec in specs:
        w, z = _random_points(rng, 5, 0.5), _random_points(rng, 5, 0.5)
        ref = delta(spec, w, z)
        b = np.array([0.1 + 0.2j, -0.3j])
        moved = AffineImage(spec, np.eye(2, dtype=complex), b)
        tr = delta(moved, w + b, z + b)
        u = random_unitary(rng)
        rot = AffineImage(spec, u, np.zeros(2, complex))
        un = delta(rot, w @ u.T, z @ u.T)
        for i in range(len(w)):
            _case(rep, f"{spec.family.value}/translation/{i}", tr[i], ref[i], 1e-13)
            _case(rep, f"{spec.family.value}/unitary/{i}", un[i], ref[i], 1e-12)


def identity_suite(selector: str, seed: int = 0, m: float = 1.5, quad: QuadConfig = QuadConfig()) -> ExperimentReport:
    if selector not in IDENTITIES:
        raise ExperimentError(f"unknown identity {selector!r}; choose from {IDENTITIES}")
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("verify-identities", {"identity": selector, "seed": seed, "m": m,
                                                 "orders": list(quad.orders)})
    if selector == "DeltaScaling":
        _identity_delta_scaling(rep, rng, m)
    elif selector == "Isometry":
        _identity_isometry(rep, rng, m, quad)
    elif selector == "Conjugation":
        _identity_conjugation(rep, rng, m, quad)
    elif selector == "DensityTransport":
        _identity_density_transport(rep, rng, m)
    elif selector == "ClosedFormAgreement":
        _identity_closed_forms(rep, rng, m)
    else:
        _identity_invariance(rep, rng, m)
    fails = [r["id"] for r in rep.rows if not r["pass"]]
    rep.check(selector, len(rep.rows) - len(fails), not fails, len(rep.rows), None, "all cases pass")
    return rep


# -- reproducing property ----------------------------------------------------

POLY_BASIS = {
    "1": lambda z: np.ones(z.shape[:-1], complex),
    "z1": lambda z: z[..., 0],
    "z2": lambda z: z[..., 1],
    "z1*z2": lambda z: z[..., 0] * z[..., 1],
    "z1^2": lambda z: z[..., 0] ** 2,
}

DEFAULT_INTERIOR = [(0j, 1j), (0.3 + 0.2j, 0.1 + 1.1j), (0.2 - 0.1j, -0.2 + 0.8j)]


def reproducing_check(points=DEFAULT_INTERIOR, basis=tuple(POLY_BASIS), margin: float = 0.05,
                      nodes=(48, 48, 64), tol: float = 1e-2, budget: int = 10**7,
                      threads: int = 1) -> ExperimentReport:
    spec = DomainSpec(Family.BOUNDED_QUAD)
    z = np.array([list(p) for p in points], dtype=complex)
    r = spec.rho(z)
    if np.any(r >= -margin):
        raise ExperimentError(f"points must satisfy rho < -{margin}; got rho = {r.tolist()}")
    rep = ExperimentReport("verify-reproducing", {
        "points": [[_cplx(a), _cplx(b)] for a, b in z], "basis": list(basis), "margin": margin,
        "nodes": list(nodes), "tolerance": tol, "budget": budget,
    })
    evals = 0
    worst = 0.0
    for name in basis:
        F = POLY_BASIS[name]
        vals, k = cauchy_leray_global(F, z, *nodes, threads=threads)
        evals += k
        exact = F(z)
        for i, (v, e) in enumerate(zip(vals, exact)):
            err = abs(v - e)
            worst = max(worst, err)
            rep.rows.append({"basis": name, "point": i, "value": _cplx(v), "expected": _cplx(e), "abs_err": err})
    rep.check("reproduces", worst, worst < tol, 0.0, tol, "max |C(F)(z) - F(z)| < tol")
    rep.check("budget", evals, evals <= budget, budget, None, "kernel evaluations <= budget")
    return rep


# -- measures and kernel ----------------------------------------------------


def measures_report(deltas=(0.2, 0.1, 0.05, 0.025), m: float = 1.5, a: float = DEFAULT_A, seed: int = 0,
                    n_points: int = 10**4, quad: QuadConfig = QuadConfig()) -> ExperimentReport:
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("verify-measures", {"deltas": list(deltas), "m": m, "a": a, "seed": seed,
                                               "points": n_points, "orders": list(quad.orders)})
    quad_chart = Chart(DomainSpec(Family.MODEL_QUAD))
    pow_chart = Chart(DomainSpec(Family.MODEL_POWER, m=m))
    t = rng.uniform(-2, 2, size=(n_points, 3))
    dev = float(np.max(np.abs(leray_levi_density(quad_chart, t) - 1 / (4 * np.pi**2))))
    rep.check("quad_ll_constant", dev, dev <= 1e-12, 1 / (4 * np.pi**2), 1e-12, "|lambda - 1/(4 pi^2)| <= tol")
    mu_kinds = {0.0: SIGMA, 1 / 3: mu(1 / 3), 1.0: mu(1.0)}
    for d in sorted(deltas, reverse=True):
        s, sp = make_boxes("quad", d, a)
        ps, psp = make_boxes("power", d, a, m)
        row = {
            "delta": d,
            "quad_ll_S": box_measure(s, quad_chart, LERAY_LEVI, quad.orders),
            "quad_sigma_S": box_measure(s, quad_chart, SIGMA, quad.orders),
            "quad_sigma_Sp": box_measure(sp, quad_chart, SIGMA, quad.orders),
            "power_ll_S": box_measure(ps, pow_chart, LERAY_LEVI, quad.orders, quad.levels, quad.graded_order),
            "power_sigma_S": box_measure(ps, pow_chart, SIGMA, quad.orders, quad.levels, quad.graded_order),
            "power_sigma_Sp": box_measure(psp, pow_chart, SIGMA, quad.orders),
        }
        for aa, kind in mu_kinds.items():
            row[f"power_mu{aa:.4g}_S"] = box_measure(ps, pow_chart, kind, quad.orders, quad.levels, quad.graded_order)
        rep.rows.append(row)
    rows = rep.rows
    exact = a**2 / np.pi**2
    err = max(abs(r["quad_ll_S"] / r["delta"] ** 4 - exact) / exact for r in rows)
    rep.check("quad_ll_S_exact", err, err <= 1e-10, exact, 1e-10, "lambda(S) delta^-4 == a^2/pi^2")
    for key, power, tol in (("quad_sigma_S", 4, 0.05), ("quad_sigma_Sp", 3, 0.05),
                            ("power_ll_S", 2 * m, 0.10), ("power_sigma_S", 4, 0.10), ("power_sigma_Sp", 3, 0.10)):
        dev, ok = _stable([r[key] / r["delta"] ** power for r in rows], tol)
        rep.check(f"{key}_asymptotic", dev, ok, 0.0, tol, f"{key} * delta^-{power:g} constant")
    for aa in mu_kinds:
        slope, _, _ = fit_power_law([(r["delta"], r[f"power_mu{aa:.4g}_S"]) for r in rows])
        target = 4 + 2 * (m - 2) * aa
        rep.check(f"power_mu{aa:.4g}_S_slope", slope, abs(slope - target) <= 0.1, target, 0.1, "log-log slope")
    return rep


def kernel_report(seed: int = 0, n_pairs: int = 10**4, n_fd: int = 10**3, m: float = 1.5) -> ExperimentReport:
    """Closed-form agreement plus finite-difference checks of the derivative closed forms."""
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("verify-kernel", {"seed": seed, "pairs": n_pairs, "fd_points": n_fd, "m": m})
    agree = closed_form_agreement(rng, n_pairs, m)
    for fam, err in agree.items():
        rep.check(f"closed_form_{fam}", err, err <= 1e-13, 0.0, 1e-13, "max |closed - generic|")
    specs = [DomainSpec(Family.MODEL_QUAD), DomainSpec(Family.MODEL_POWER, m=m), DomainSpec(Family.BOUNDED_QUAD),
             DomainSpec(Family.BOUNDED_POWER, m=m), DomainSpec(Family.SCALED_QUAD, eps=0.3),
             DomainSpec(Family.SCALED_POWER, m=m, eps=0.3)]
    for spec in specs:
        z = rng.uniform(-1, 1, size=(n_fd, 4))
        # keep x1 away from the kink of |x1|^m
        z[:, 0] = np.where(z[:, 0] < 0, -1.0, 1.0) * np.maximum(np.abs(z[:, 0]), 0.05)
        g_err, h_err = _finite_difference_errors(spec, z)
        rep.rows.append({"family": spec.family.value, "grad_fd_err": g_err, "hess_fd_err": h_err})
        rep.check(f"grad_fd_{spec.family.value}", g_err, g_err <= 1e-6, 0.0, 1e-6, "central differences, h=1e-6")
        rep.check(f"hess_fd_{spec.family.value}", h_err, h_err <= 1e-4, 0.0, 1e-4, "second differences, h=1e-4")
    return rep


def _to_c(x):
    return cpoint(x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3])


def _finite_difference_errors(spec, x, h1=1e-6, h2=1e-4):
    eye = np.eye(4)
    grad = np.stack([(spec.rho(_to_c(x + h1 * e)) - spec.rho(_to_c(x - h1 * e))) / (2 * h1) for e in eye], -1)
    fd_holo = np.stack([(grad[:, 0] - 1j * grad[:, 1]) / 2, (grad[:, 2] - 1j * grad[:, 3]) / 2], -1)
    g_err = float(np.max(np.abs(fd_holo - spec.holo_gradient(_to_c(x)))))

    def d2(i, j):
        ei, ej = h2 * eye[i], h2 * eye[j]
        f = lambda y: spec.rho(_to_c(y))
        return (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h2**2)

    hess = spec.complex_hessian(_to_c(x))
    h_err = 0.0
    for j in range(2):
        for k in range(2):
            xj, yj, xk, yk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
            fd = (d2(xj, xk) + d2(yj, yk) + 1j * (d2(yj, xk) - d2(xj, yk))) / 4
            h_err = max(h_err, float(np.max(np.abs(fd - hess[:, j, k]))))
    return g_err, h_err
