"""Randomized verification suites behind the ``perturb`` command.

Every suite returns a :class:`SuiteResult` holding rows of the fixed schema
``(trial, j, lhs, rhs, ratio)``, a summary and named pass/fail checks.  Trial
``t`` draws from its own stream ``Rng(seed ^ t)``, so serial and parallel runs
produce identical rows.

Real-line inequalities are exercised on band-limited periodic surrogates
``f(x) = h(e^{ix})`` normalized by the circle seminorm of ``h``; the ratios
therefore test consistency with the inequalities, not their constants.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import besov, funcalc, hankel, schatten, specshift
from .funcalc import LineFn, LineTrig, apply_fn
from .linalg_core import Rng, eig_hermitian, eig_unitary, expi, hermitian_perturbation, svd
from .trigpoly import TrigPoly

SUITES = (
    "first_diff", "higher_diff", "unitary_diff", "contraction", "quasicommutator",
    "counterexample", "ssf", "boyd", "omega_scaling",
)
FAMILIES = ("random", "lacunary", "classic")
SCOPE_NOTE = "line inequalities tested on periodic band-limited surrogates f(x)=h(e^{ix}); ratios test consistency, not constants"
DEFAULT_DIM = {"counterexample": 1024, "ssf": 16, "omega_scaling": 8, "boyd": 4096}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class Config:
    suite: str
    alpha: float = 0.5
    p: float = 2.0
    m: int = 1
    dim: int | None = None
    trials: int = 100
    seed: int = 0
    unitary: bool = False
    family: str = "random"
    degree: int = 64
    workers: int = 1
    q_identity: bool = False
    fscale: float = 1.0
    shift: float = 0.0
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.dim is None:
            self.dim = DEFAULT_DIM.get(self.suite, 32)

    def as_dict(self) -> dict:
        return asdict(self)


CONFIG_TYPES = {f.name: f.type for f in fields(Config)}


def validate(cfg: Config) -> Config:
    if cfg.suite not in SUITES:
        raise ConfigError("suite", f"unknown suite {cfg.suite!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format", "must be csv or json")
    if cfg.family not in FAMILIES:
        raise ConfigError("family", f"must be one of {', '.join(FAMILIES)}")
    if not cfg.alpha > 0:
        raise ConfigError("alpha", "must be positive")
    if cfg.dim < 2:
        raise ConfigError("dim", "must be >= 2")
    if cfg.trials < 1:
        raise ConfigError("trials", "must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers", "must be >= 1")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    if cfg.degree < 2:
        raise ConfigError("degree", "must be >= 2")
    s = cfg.suite
    if s in ("first_diff", "unitary_diff", "quasicommutator"):
        if not 0 < cfg.alpha < 1:
            raise ConfigError("alpha", "first differences need 0 < alpha < 1")
        if cfg.p < 1:
            raise ConfigError("p", "must be >= 1")
    if s in ("higher_diff", "contraction"):
        lo = 2 if s == "higher_diff" else 1
        if not lo <= cfg.m <= 3:
            raise ConfigError("m", f"must be in {{{', '.join(map(str, range(lo, 4)))}}}")
        if not cfg.m - 1 <= cfg.alpha < cfg.m:
            raise ConfigError("alpha", "need m-1 <= alpha < m")
        if not cfg.p > cfg.m:
            raise ConfigError("p", "need p > m")
        if s == "higher_diff" and cfg.unitary and cfg.m != 2:
            raise ConfigError("m", "unitary higher differences support m = 2")
    if s == "counterexample":
        if not cfg.alpha <= 2:
            raise ConfigError("alpha", "need 0 < alpha <= 2")
        if cfg.dim > 4096:
            raise ConfigError("dim", "section size must be <= 4096")
    if s == "boyd" and not cfg.p > 0:
        raise ConfigError("p", "must be positive")
    if s == "omega_scaling" and (cfg.p < 1 or cfg.dim > 32):
        raise ConfigError("dim" if cfg.dim > 32 else "p", "need p >= 1 and dim <= 32")
    return cfg


@dataclass(frozen=True)
class Row:
    trial: int
    j: int
    lhs: float
    rhs: float
    ratio: float


@dataclass
class SuiteResult:
    config: Config
    rows: list
    checks: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    expected_failure: bool = False

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def summary(self) -> dict:
        ratios = np.array([r.ratio for r in self.rows], dtype=float)
        out = {
            "max_ratio": float(ratios.max()) if ratios.size else float("nan"),
            "median_ratio": float(np.median(ratios)) if ratios.size else float("nan"),
            "config": self.config.as_dict(),
            "checks": dict(self.checks),
        }
        out.update(self.info)
        if self.expected_failure:
            out["expected_failure"] = "confirmed" if self.ok else "not confirmed"
        return out


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return 1.0 if lhs == 0.0 else float("inf")
    return lhs / rhs


# function families ---------------------------------------------------------

def _band(k: np.ndarray) -> np.ndarray:
    return np.floor(np.log2(k) + 0.5)


def draw_function(rng: Rng, family: str, alpha: float, degree: int, analytic: bool = False) -> TrigPoly:
    """A trig polynomial of degree ``<= degree`` normalized to unit
    ``Lambda_alpha`` seminorm."""
    d = int(degree)
    if family == "random":
        k = np.arange(1, d + 1)
        w = 2.0 ** (-alpha * _band(k))
        pos = rng.complex_normal(d) * w
        neg = rng.complex_normal(d) * w
        c0 = rng.complex_normal(1)[0]
        coeffs = np.concatenate([np.zeros(d) if analytic else neg[::-1], [c0], pos])
        h = TrigPoly(coeffs)
    elif family == "lacunary":
        top = max(1, int(math.log2(d)))
        phases = np.exp(2j * np.pi * rng.uniform(size=2 * top))
        terms = {2 ** k: 2.0 ** (-alpha * k) * phases[k - 1] for k in range(1, top + 1)}
        if not analytic:
            terms.update({-(2 ** k): 2.0 ** (-alpha * k) * phases[top + k - 1] for k in range(1, top + 1)})
        h = TrigPoly.from_dict(terms).trim()
    elif family == "classic":
        # |sin(theta/2)|^alpha, Fourier-truncated, randomly rotated
        size = 1 << 15
        theta = 2 * np.pi * np.arange(size) / size
        c = np.fft.fft(np.abs(np.sin(theta / 2)) ** min(alpha, 1.0)) / size
        n = np.arange(-d, d + 1)
        coeffs = c[n % size]
        if analytic:
            coeffs = np.where(n < 0, 0.0, coeffs)
        h = TrigPoly(coeffs).rotate(2 * np.pi * rng.uniform())
    else:
        raise ConfigError("family", f"unknown family {family!r}")
    semi = besov.lambda_seminorm(h, alpha)
    return h / semi


def _pert_scale(rng: Rng) -> float:
    return 10.0 ** rng.uniform(-2.0, 0.0)


def _hermitian(rng: Rng, dim: int) -> np.ndarray:
    g = rng.complex_normal((dim, dim))
    return 0.5 * (g + g.conj().T)


def _haar(rng: Rng, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.complex_normal((dim, dim)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _perturbation(rng: Rng, dim: int) -> np.ndarray:
    scale = _pert_scale(rng)
    rank = int(rng.integers(1, dim + 1))
    return hermitian_perturbation(rng, dim, scale, rank)


def _sj_rows(trial, diff_s, pert_s, lam, alpha, p, extra=1.0):
    """Rows for ``s_j(lhs) <= c lam extra (1+j)^{-alpha/p} ||pert||_{S_p^j}^alpha``
    plus the aggregate ``S_{p/alpha}`` row at ``j = -1``."""
    rows = []
    partial = np.cumsum(pert_s ** p) ** (1.0 / p)
    for j in range(len(diff_s)):
        rhs = lam * extra * (1.0 + j) ** (-alpha / p) * partial[j] ** alpha
        rows.append(Row(trial, j, float(diff_s[j]), float(rhs), _ratio(float(diff_s[j]), float(rhs))))
    lhs = schatten.schatten_norm(diff_s, p / alpha)
    rhs = lam * extra * schatten.schatten_norm(pert_s, p) ** alpha
    rows.append(Row(trial, -1, float(lhs), float(rhs), _ratio(lhs, rhs)))
    return rows


# trials -----------------------------------------------------------------------

def _trial_first_diff(cfg: Config, t: int):
    rng = Rng(cfg.seed ^ t)
    if cfg.unitary or cfg.suite == "unitary_diff":
        U = _haar(rng, cfg.dim)
        K = _perturbation(rng, cfg.dim)
        V = expi(K) @ U
        h = draw_function(rng, cfg.family, cfg.alpha, cfg.degree) * cfg.fscale
        if cfg.shift:
            rot = np.exp(1j * cfg.shift)
            U, V, h = rot * U, rot * V, h.rotate(cfg.shift)
        lam = besov.lambda_seminorm(h, cfg.alpha)
        diff = apply_fn(eig_unitary(U), h) - apply_fn(eig_unitary(V), h)
        return _sj_rows(t, svd(diff).values, svd(U - V).values, lam, cfg.alpha, cfg.p)
    A = _hermitian(rng, cfg.dim)
    K = _perturbation(rng, cfg.dim)
    B = A + K
    h = draw_function(rng, cfg.family, cfg.alpha, cfg.degree) * cfg.fscale
    f = LineTrig(h)
    if cfg.shift:
        eye = cfg.shift * np.eye(cfg.dim)
        A, B, f = A + eye, B + eye, f.translate(cfg.shift)
    lam = besov.lambda_seminorm(f.h, cfg.alpha)
    fA = apply_fn(eig_hermitian(A), f)
    fB = apply_fn(eig_hermitian(B), f)
    if cfg.suite != "quasicommutator":
        return _sj_rows(t, svd(fA - fB).values, svd(A - B).values, lam, cfg.alpha, cfg.p)
    if cfg.q_identity:
        Q = np.eye(cfg.dim, dtype=np.complex128)
    else:
        G = rng.complex_normal((cfg.dim, cfg.dim))
        Q = G * (10.0 ** rng.uniform(-1.0, 1.0) / svd(G).s0)
    qn = svd(Q).s0
    lhs = fA @ Q - Q @ fB
    return _sj_rows(t, svd(lhs).values, svd(A @ Q - Q @ B).values, lam, cfg.alpha, cfg.p,
                    extra=qn ** (1.0 - cfg.alpha))


def _trial_higher_diff(cfg: Config, t: int):
    rng = Rng(cfg.seed ^ t)
    if cfg.unitary:
        U = _haar(rng, cfg.dim)
        K = _perturbation(rng, cfg.dim)
        h = draw_function(rng, cfg.family, cfg.alpha, cfg.degree) * cfg.fscale
        if cfg.shift:
            U, h = np.exp(1j * cfg.shift) * U, h.rotate(cfg.shift)
        lam = besov.lambda_seminorm(h, cfg.alpha)
        diff = funcalc.higher_diff_unitary_m2(U, K, h)
        return _sj_rows(t, svd(diff).values, svd(K).values, lam, cfg.alpha, cfg.p)
    A = _hermitian(rng, cfg.dim)
    K = _perturbation(rng, cfg.dim)
    h = draw_function(rng, cfg.family, cfg.alpha, cfg.degree) * cfg.fscale
    f = LineTrig(h)
    if cfg.shift:
        A, f = A + cfg.shift * np.eye(cfg.dim), f.translate(cfg.shift)
    lam = besov.lambda_seminorm(f.h, cfg.alpha)
    diff = funcalc.higher_diff_sa(A, K, cfg.m, f)
    return _sj_rows(t, svd(diff).values, svd(K).values, lam, cfg.alpha, cfg.p)


def _trial_contraction(cfg: Config, t: int):
    rng = Rng(cfg.seed ^ t)
    G = rng.complex_normal((cfg.dim, cfg.dim))
    T = G * (0.9 / svd(G).s0)
    E = rng.complex_normal((cfg.dim, cfg.dim))
    E = E * (0.1 * 10.0 ** rng.uniform(-2.0, 0.0) / svd(E).s0)
    R = T + E
    h = draw_function(rng, cfg.family, cfg.alpha, cfg.degree, analytic=True) * cfg.fscale
    lam = besov.lambda_seminorm(h, cfg.alpha)
    diff = funcalc.contraction_poly_diff(T, R, h, cfg.m)
    return _sj_rows(t, svd(diff).values, svd(T - R).values, lam, cfg.alpha, cfg.p)


def _ssf_functions():
    return [
        LineFn([np.sin, np.cos, lambda x: -np.sin(x)]),
        LineFn([lambda x: np.exp(-x ** 2), lambda x: -2 * x * np.exp(-x ** 2),
                lambda x: (4 * x ** 2 - 2) * np.exp(-x ** 2)]),
        LineFn([lambda x: 1 / (1 + x ** 2), lambda x: -2 * x / (1 + x ** 2) ** 2,
                lambda x: (6 * x ** 2 - 2) / (1 + x ** 2) ** 3]),
        LineFn([lambda x: np.cos(2 * x), lambda x: -2 * np.sin(2 * x), lambda x: -4 * np.cos(2 * x)]),
        LineFn([np.arctan, lambda x: 1 / (1 + x ** 2), lambda x: -2 * x / (1 + x ** 2) ** 2]),
    ]


def _trial_ssf(cfg: Config, t: int):
    rng = Rng(cfg.seed ^ t)
    A = _hermitian(rng, cfg.dim)
    K = _perturbation(rng, cfg.dim)
    sample = specshift.ssf2_sample(A, K)
    eta_p = specshift.koplienko_eta_sample(A, K, sample.grid)
    eta_m = specshift.koplienko_eta_sample(A, -K, sample.grid)
    checks = {
        "ssf_nonnegative": bool(sample.values.min() >= -1e-9),
        "eta_nonnegative": bool(min(eta_p.values.min(), eta_m.values.min()) >= -1e-9),
        "eta_decomposition": bool(np.abs(sample.values - eta_p.values - eta_m.values).max() <= 1e-9),
    }
    rows = []
    worst = 0.0
    for i, f in enumerate(_ssf_functions()):
        r = specshift.verify_trace_formula_sa(A, K, f)
        worst = max(worst, r.rel_residual)
        rows.append(Row(t, i, float(r.lhs.real), float(r.rhs.real), _ratio(r.lhs.real, r.rhs.real)))
    mass = specshift.ssf_mass(A, K)
    tk = float(np.real(np.trace(K @ K)))
    rows.append(Row(t, -1, mass, tk, _ratio(mass, tk)))
    checks["trace_formula"] = worst <= 1e-6
    checks["mass_identity"] = abs(mass - tk) <= 1e-8 * max(tk, 1e-300) or (mass == tk == 0.0)
    return rows, checks


def _trial_boyd(cfg: Config, t: int):
    spec = schatten.schatten_ideal(cfg.p)
    if t == 0:
        probes = schatten.default_probes(min(cfg.dim, 4096))
    else:
        rng = Rng(cfg.seed ^ t)
        n = int(rng.integers(2, cfg.dim + 1))
        probes = [np.sort(np.abs(rng.normal(n)) * (1.0 + np.arange(n)) ** -rng.uniform(0.0, 2.0))[::-1]]
    const = schatten.schatten_averaging_constant(cfg.p) if cfg.p > 1 else float("inf")
    rows = []
    for i, s in enumerate(probes):
        lhs = spec(schatten.sigma_seq(s))
        rhs = const * spec(s)
        rows.append(Row(t, i, lhs, rhs, _ratio(lhs, rhs)))
    return rows


TRIALS = {
    "first_diff": _trial_first_diff,
    "unitary_diff": _trial_first_diff,
    "quasicommutator": _trial_first_diff,
    "higher_diff": _trial_higher_diff,
    "contraction": _trial_contraction,
}


def _call(args):
    fn, cfg, t = args
    return fn(cfg, t)


def _map_trials(fn, cfg: Config):
    jobs = [(fn, cfg, t) for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_call, jobs))  # map preserves trial order
    return [_call(j) for j in jobs]


def _sweep(cfg: Config) -> SuiteResult:
    results = _map_trials(TRIALS[cfg.suite], cfg)
    rows = [r for rs in results for r in rs]
    ratios = np.array([r.ratio for r in rows])
    res = SuiteResult(cfg, rows, {"finite_ratios": bool(np.all(np.isfinite(ratios)))})
    sj = [r.ratio for r in rows if r.j >= 0]
    agg = [r.ratio for r in rows if r.j == -1]
    res.info = {
        "max_ratio_sj": float(max(sj)),
        "max_ratio_norm": float(max(agg)),
        "scope": SCOPE_NOTE,
        "w": besov.W_PARAMETERIZATION,
    }
    return res


def run_ssf(cfg: Config) -> SuiteResult:
    results = _map_trials(_trial_ssf, cfg)
    rows, checks = [], {}
    for rs, ch in results:
        rows.extend(rs)
        for k, v in ch.items():
            checks[k] = checks.get(k, True) and v
    return SuiteResult(cfg, rows, checks, {"simpson_panels": specshift.SIMPSON_PANELS})


def run_boyd(cfg: Config) -> SuiteResult:
    rows = [r for rs in _map_trials(_trial_boyd, cfg) for r in rs]
    res = SuiteResult(cfg, rows)
    if cfg.p > 1:
        res.checks["averaging_bound"] = all(r.ratio <= 1.0 for r in rows)
        spec = schatten.schatten_ideal(cfg.p)
        res.info["closed_form_constant"] = schatten.schatten_averaging_constant(cfg.p)
        res.info["remark_partial_sum"] = schatten.averaging_constant_bound(spec, 8)
        return res
    # p <= 1: no finite constant exists; the harmonic witness (1, 0, ..., 0)
    # has psi(sigma)/psi(s) = H_n for S_1
    res.expected_failure = True
    rows.clear()
    growth = []
    for k, n in enumerate(10 ** np.arange(1, 6)):
        s = np.zeros(int(n))
        s[0] = 1.0
        lhs = schatten.averaging_ratio(schatten.schatten_ideal(cfg.p), s)
        rhs = 0.9 * math.log(n)
        rows.append(Row(0, int(n), lhs, rhs, _ratio(lhs, rhs)))
        growth.append(lhs >= rhs)
    res.checks["witness_growth"] = all(growth)
    return res


def run_counterexample(cfg: Config) -> SuiteResult:
    N, alpha = cfg.dim, cfg.alpha
    n_max = max(1, int(math.floor(math.log(N, 4) + 1e-12)))
    g = hankel.lacunary_g(alpha, n_max)
    env = hankel.sv_envelope_check(g, alpha, N, m_max=N // 2)
    corner = hankel.corner_diff_section(g, N).spectrum().values
    rows = [
        Row(0, m, float(corner[m]), (1.0 + m) ** -alpha, _ratio(float(corner[m]), (1.0 + m) ** -alpha))
        for m in range(N)
    ]
    # S_{1/alpha} norms of nested sections grow without bound while
    # ||U - V||_{S_1} = 2 stays fixed
    nested = []
    size = N
    while size >= 16 and len(nested) < 3:
        nested.append(schatten.schatten_norm(corner[: 2 * size], 1.0 / alpha))
        size //= 4
    nested = nested[::-1]
    res = SuiteResult(cfg, rows, expected_failure=True)
    res.checks["lower_flags"] = all(env.lower_flags.values())
    res.checks["upper_slope"] = abs(env.slope + alpha) <= 0.05
    res.checks["norm_growth"] = all(b > a for a, b in zip(nested, nested[1:]))
    res.info = {
        "n_max": n_max,
        "seminorm": env.seminorm,
        "c_upper": env.c_upper,
        "slope": env.slope,
        "lower_margins": {str(k): v for k, v in env.lower_margins.items()},
        "c_min_corner": hankel.corner_lower_constant(g, alpha, N // 2, N),
        "nested_norms": nested,
        "w": besov.W_PARAMETERIZATION,
    }
    return res


def run_omega_scaling(cfg: Config) -> SuiteResult:
    q = cfg.p / cfg.alpha
    rows, worst = [], 0.0
    for t in range(cfg.trials):
        rng = Rng(cfg.seed ^ t)
        U = _haar(rng, cfg.dim)
        V = expi(_perturbation(rng, cfg.dim)) @ U
        h = draw_function(rng, cfg.family, cfg.alpha, 8)
        D = U - V
        F = apply_fn(eig_unitary(U), h) - apply_fn(eig_unitary(V), h)
        base_d = schatten.schatten_norm(svd(D), cfg.p)
        base_f = schatten.schatten_norm(svd(F), q)
        for n in (1, 2, 4, 8):
            eye = np.eye(n)
            lhs_d = schatten.schatten_norm(svd(np.kron(eye, D)), cfg.p)
            lhs_f = schatten.schatten_norm(svd(np.kron(eye, F)), q)
            rd = _ratio(lhs_d, n ** (1.0 / cfg.p) * base_d)
            rf = _ratio(lhs_f, n ** (1.0 / q) * base_f)
            rows.append(Row(t, n, lhs_d, n ** (1.0 / cfg.p) * base_d, rd))
            rows.append(Row(t, -n, lhs_f, n ** (1.0 / q) * base_f, rf))
            worst = max(worst, abs(rd - 1.0), abs(rf - 1.0))
        # commuting diagonal witness: singular values are |zeta_k - tau_k|
        zeta = np.exp(2j * np.pi * rng.uniform(size=cfg.dim))
        tau = zeta * np.exp(1j * rng.uniform(-0.1, 0.1, size=cfg.dim))
        sd = schatten.schatten_norm(svd(np.diag(zeta - tau)), cfg.p)
        worst = max(worst, abs(sd / np.sum(np.abs(zeta - tau) ** cfg.p) ** (1.0 / cfg.p) - 1.0))
        sf = schatten.schatten_norm(svd(np.diag(h(zeta) - h(tau))), q)
        worst = max(worst, abs(sf / np.sum(np.abs(h(zeta) - h(tau)) ** q) ** (1.0 / q) - 1.0))
    res = SuiteResult(cfg, rows, {"exact_scaling": worst <= 1e-10})
    res.info = {"q": q, "max_deviation": worst}
    return res


def run(cfg: Config) -> SuiteResult:
    validate(cfg)
    if cfg.suite in TRIALS:
        return _sweep(cfg)
    return {
        "ssf": run_ssf,
        "boyd": run_boyd,
        "counterexample": run_counterexample,
        "omega_scaling": run_omega_scaling,
    }[cfg.suite](cfg)
