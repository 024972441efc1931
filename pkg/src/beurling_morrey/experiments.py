"""Catalogue of numerical experiments, one per checked statement.

Each experiment fills a :class:`Table` row by row and returns a list of
:class:`Check` verdicts.  Tables are filled incrementally so that a caller
can keep the rows computed before a numerical failure.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import beltrami as bt
from .commutator import (build_test_family, dilates_disjoint, family_invariants,
                         inclusions_hold, lower_upper_bounds, oscillation_vs_commutator, product_set_invariants,
                         product_sets, separation_experiment)
from .fields import random_bandlimited, smooth_bump, truncated_log_function
from .grid import ComplexField, GridSpec, Square, make_grid, sample, square_mask
from .morrey import MorreyParams, default_morrey_family, morrey_norm
from .oscillation import bmo_norm, cmo_probe, lattice_family
from .transforms import (beurling, beurling_maximal, beurling_power, cauchy, commutator_truncation_gap,
                         default_maximal_half_counts, gradient_sup, hl_maximal_centered, wirtinger)
from .weights import (Weight, ap_constant, constant_weight, doubling_check, dyadic_family, power_weight,
                      sigma_estimate)


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration

def _parse_complex(s) -> complex:
    if isinstance(s, (int, float, complex)):
        return complex(s)
    s = str(s).strip()
    if "," in s:
        a, b = s.split(",")
        return complex(float(a), float(b))
    return complex(s.replace(" ", ""))


def _parse_list(s) -> list[float]:
    if isinstance(s, (list, tuple)):
        return [float(x) for x in s]
    return [float(x) for x in str(s).replace(";", ",").split(",") if x.strip()]


@dataclass
class ExperimentConfig:
    experiment: str = "isometry"
    seed: int = 0
    n: int | None = None
    L: float = 4.0
    weight: str = "power"
    alpha: float = 0.5
    weight_center: complex = 0j
    p: float = 2.0
    kappa: float = 0.5
    family_levels: int = 3
    family_lattice: int = 4
    probes: int | None = None
    delta: float | None = None
    K0: int = 2
    eta: list | None = None        # truncation scales in units of h
    N_max: int = 200
    tol: float = 1e-8
    symbol: str | None = None
    amplitude: float = 0.5

    _types = {"seed": int, "n": int, "L": float, "alpha": float, "weight_center": _parse_complex,
              "p": float, "kappa": float, "family_levels": int, "family_lattice": int, "probes": int,
              "delta": float, "K0": int, "eta": _parse_list, "N_max": int, "tol": float,
              "amplitude": float, "experiment": str, "weight": str, "symbol": str}

    @classmethod
    def from_mapping(cls, m: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        kw = {}
        for key, raw in m.items():
            if key not in names:
                raise ConfigError(f"unknown config key {key!r}")
            if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "auto", "none")):
                kw[key] = None
                continue
            try:
                kw[key] = cls._types[key](raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"cannot parse {key} = {raw!r}: {exc}") from None
        if kw.get("experiment") is None:
            kw.pop("experiment", None)
        for k in ("L", "alpha", "weight_center", "p", "kappa", "family_levels", "family_lattice",
                  "K0", "N_max", "tol", "amplitude", "weight", "seed"):
            if k in kw and kw[k] is None:
                kw.pop(k)
        return cls(**kw)

    def resolved(self) -> "ExperimentConfig":
        """Copy with experiment defaults filled in and every range validated."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; valid names: "
                              + ", ".join(EXPERIMENTS))
        spec = EXPERIMENTS[self.experiment]
        c = dataclasses.replace(self)
        for k, v in spec.defaults.items():
            if getattr(c, k) is None:
                setattr(c, k, v)
        if c.n is None:
            c.n = 256
        c.validate()
        return c

    def validate(self):
        n = self.n
        if n is None or n < 8 or n & (n - 1):
            raise ConfigError(f"n must be a power of two >= 8, got {n}")
        if not self.L > 0:
            raise ConfigError(f"L must be positive, got {self.L}")
        if not 1 < self.p < np.inf:
            raise ConfigError(f"p must lie in (1, inf), got {self.p}")
        if not 0 < self.kappa < 1:
            raise ConfigError(f"kappa must lie in (0, 1), got {self.kappa}")
        if self.weight not in ("power", "constant"):
            raise ConfigError(f"weight must be 'power' or 'constant', got {self.weight!r}")
        if self.weight == "power" and not -2 < self.alpha < 2 * (self.p - 1):
            raise ConfigError(f"power weight exponent alpha must lie in (-2, 2(p-1)) = "
                              f"(-2, {2 * (self.p - 1):g}), got {self.alpha}")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.family_levels < 1 or self.family_lattice < 0:
            raise ConfigError("family_levels must be >= 1 and family_lattice >= 0")
        if self.probes is not None and self.probes < 1:
            raise ConfigError(f"probes must be at least 1, got {self.probes}")
        if self.delta is not None and not self.delta > 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if self.K0 < 1:
            raise ConfigError(f"K0 must be at least 1, got {self.K0}")
        if self.eta is not None and (not self.eta or min(self.eta) < 2):
            raise ConfigError("eta lists truncation scales in units of h and each must be >= 2")
        if self.N_max < 1:
            raise ConfigError(f"N_max must be at least 1, got {self.N_max}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if not 0 <= self.amplitude < 1:
            raise ConfigError(f"amplitude (max |b|) must lie in [0, 1), got {self.amplitude}")
        allowed = EXPERIMENTS[self.experiment].symbols
        if self.symbol is not None and allowed and self.symbol not in allowed:
            raise ConfigError(f"symbol for {self.experiment} must be one of {allowed}, got {self.symbol!r}")

    def items(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex):
                v = f"{v.real:.12g},{v.imag:.12g}"
            elif isinstance(v, list):
                v = ",".join(f"{x:.12g}" for x in v)
            elif v is None:
                v = "auto"
            yield f.name, v

    # shared objects
    def grid(self) -> GridSpec:
        return make_grid(self.n, self.L)

    def make_weight(self, spec: GridSpec) -> Weight:
        if self.weight == "constant":
            return constant_weight(spec, 1.0, self.p)
        return power_weight(spec, self.alpha, self.p, self.weight_center)

    def params(self) -> MorreyParams:
        return MorreyParams(self.p, self.kappa)

    def family(self, spec: GridSpec):
        return default_morrey_family(spec, self.family_levels, self.family_lattice)

    def rng(self, *stream) -> np.random.Generator:
        return np.random.default_rng([self.seed, *stream])


# --------------------------------------------------------------------------
# results

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


class Table:
    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []

    def add(self, **kw):
        missing = set(self.columns) - set(kw)
        extra = set(kw) - set(self.columns)
        if missing or extra:
            raise KeyError(f"row keys do not match columns (missing {sorted(missing)}, extra {sorted(extra)})")
        self.rows.append([kw[c] for c in self.columns])

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def __len__(self):
        return len(self.rows)


@dataclass
class ExperimentResult:
    name: str
    anchor: str
    table: Table
    checks: list
    vacuous: bool = False

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass
class ExperimentSpec:
    name: str
    anchor: str
    columns: tuple
    fn: Callable
    defaults: dict = field(default_factory=dict)
    symbols: tuple = ()


EXPERIMENTS: dict[str, ExperimentSpec] = {}


def _register(name, anchor, columns, defaults=None, symbols=()):
    def deco(fn):
        EXPERIMENTS[name] = ExperimentSpec(name, anchor, tuple(columns), fn, defaults or {}, tuple(symbols))
        return fn
    return deco


def list_experiments() -> list[tuple[str, str]]:
    return [(s.name, s.anchor) for s in EXPERIMENTS.values()]


def new_table(name: str) -> Table:
    return Table(EXPERIMENTS[name].columns)


def run_experiment(cfg: ExperimentConfig, table: Table | None = None) -> ExperimentResult:
    cfg = cfg.resolved()
    spec = EXPERIMENTS[cfg.experiment]
    table = new_table(cfg.experiment) if table is None else table
    out = spec.fn(cfg, table)
    vacuous = False
    if isinstance(out, tuple):
        checks, vacuous = out
    else:
        checks = out
    return ExperimentResult(spec.name, spec.anchor, table, checks, vacuous)


# --------------------------------------------------------------------------
# helpers

def _rel(a: ComplexField, b: ComplexField, scale: float) -> float:
    return (a - b).l2_norm() / scale


def _localized(spec: GridSpec, rng, kmax=6, width=1.0, real=False) -> ComplexField:
    """Band-limited field times a Gaussian envelope, mean removed."""
    g = random_bandlimited(spec, rng, kmax=kmax, real=real)
    g = g * ComplexField(spec, np.exp(-np.abs(spec.z) ** 2 / width ** 2))
    return g - g.mean()


def _gaussian_pair(spec: GridSpec, rng):
    c1 = complex(*rng.uniform(-0.5, 0.5, 2))
    c2 = complex(*rng.uniform(-0.5, 0.5, 2))
    w1, w2 = rng.uniform(0.5, 1.0, 2)
    b = sample(spec, lambda z: np.exp(-np.abs(z - c1) ** 2 / w1 ** 2))
    f = sample(spec, lambda z: np.exp(-np.abs(z - c2) ** 2 / w2 ** 2))
    return b, f


def _normalized_log(spec: GridSpec):
    """Truncated ``log|z|`` scaled to unit BMO norm over a dyadic family, plus its formula."""
    raw = sample(spec, truncated_log_function(spec.h / 2))
    fam = dyadic_family(spec, radii=[spec.L / 2 ** k for k in range(1, 6)])
    c = bmo_norm(raw, fam)
    fn = truncated_log_function(spec.h / 2, scale=1.0 / c)
    return sample(spec, fn), fn, c


# --------------------------------------------------------------------------
# transforms

@_register("isometry", "multiplier conj(xi)/xi is an L2 isometry; B^N is the N-th power multiplier",
           ("probe", "l2_in", "l2_out", "ratio", "abs_dev", "power_err_2", "power_err_4", "power_err_8"),
           defaults={"probes": 20})
def exp_isometry(cfg, table):
    spec = cfg.grid()
    worst = worst_pow = 0.0
    for i in range(cfg.probes):
        f = random_bandlimited(spec, cfg.rng(i), kmax=16)
        Bf = beurling(f)
        a, b = f.l2_norm(), Bf.l2_norm()
        errs = {}
        it = f
        for N in range(1, 9):
            it = beurling(it)
            if N in (2, 4, 8):
                errs[N] = _rel(beurling_power(f, N), it, a)
        r = b / a
        worst = max(worst, abs(r - 1))
        worst_pow = max(worst_pow, max(errs.values()))
        table.add(probe=i, l2_in=a, l2_out=b, ratio=r, abs_dev=abs(r - 1),
                  power_err_2=errs[2], power_err_4=errs[4], power_err_8=errs[8])
    return [Check("isometry |ratio - 1| <= 1e-10", worst <= 1e-10, f"max deviation {worst:.3e}"),
            Check("B^N vs N-fold B <= 1e-9", worst_pow <= 1e-9, f"max relative error {worst_pow:.3e}")]


@_register("cauchy-identities", "Cauchy transform: dbar C = Id and d C = B",
           ("probe", "l2_g", "dbar_err", "d_err"), defaults={"probes": 10})
def exp_cauchy(cfg, table):
    spec = cfg.grid()
    worst = 0.0
    for i in range(cfg.probes):
        g = random_bandlimited(spec, cfg.rng(i), kmax=16)
        gn = g.l2_norm()
        Cg = cauchy(g)
        e1 = _rel(wirtinger(Cg, "dbar"), g - g.mean(), gn)
        e2 = _rel(wirtinger(Cg, "d"), beurling(g), gn)
        worst = max(worst, e1, e2)
        table.add(probe=i, l2_g=gn, dbar_err=e1, d_err=e2)
    return [Check("Cauchy identities <= 1e-9", worst <= 1e-9, f"max relative error {worst:.3e}")]


@_register("lemma32-gap", "|[b,B_eta]f - [b,B]f| <= C eta |grad b|_inf Mf",
           ("pair", "eta_over_h", "grad_sup", "max_gap", "C_eta"),
           defaults={"n": 128, "probes": 3, "eta": [8.0, 16.0, 32.0]})
def exp_lemma32(cfg, table):
    spec = cfg.grid()
    spreads = []
    for i in range(cfg.probes):
        b, f = _gaussian_pair(spec, cfg.rng(i))
        gb = gradient_sup(b)
        Mf = hl_maximal_centered(f, default_maximal_half_counts(spec))
        keep = Mf > 1e-6 * Mf.max()
        Cs = []
        for e in cfg.eta:
            eta = e * spec.h
            gap = commutator_truncation_gap(b, f, eta)
            C = float(np.max(gap[keep] / (eta * gb * Mf[keep])))
            Cs.append(C)
            table.add(pair=i, eta_over_h=e, grad_sup=gb, max_gap=float(gap.max()), C_eta=C)
        spreads.append(max(Cs) / min(Cs))
    s = max(spreads)
    return [Check("C(eta) within 4x across eta", s <= 4.0, f"worst spread {s:.3f}")]


@_register("lemma33-maximal", "||B_* f|| + ||Mf|| <= C ||f|| in L_w^(p,kappa)",
           ("probe", "kind", "norm_f", "norm_Bstar", "norm_M", "ratio"), defaults={"n": 128, "probes": 4})
def exp_lemma33(cfg, table):
    spec = cfg.grid()
    w, P, fam = cfg.make_weight(spec), cfg.params(), cfg.family(spec)
    scales = [2 * spec.h * 2 ** k for k in range(int(np.log2(spec.n // 2)))]
    half = default_maximal_half_counts(spec)
    ratios = []
    monotone = True
    for i in range(cfg.probes):
        if i == 0:
            f, kind = ComplexField(spec, square_mask(spec, Square(0.25 + 0.25j, 0.5)).astype(float)), "indicator"
        else:
            f, kind = _localized(spec, cfg.rng(i), kmax=6), "smooth"
        Bs = beurling_maximal(f, scales)
        monotone &= bool(np.all(Bs >= beurling_maximal(f, scales[:-1])))
        M = hl_maximal_centered(f, half)
        nf = morrey_norm(f, w, P, fam)
        nb, nm = morrey_norm(Bs, w, P, fam), morrey_norm(M, w, P, fam)
        r = (nb + nm) / nf
        ratios.append(r)
        table.add(probe=i, kind=kind, norm_f=nf, norm_Bstar=nb, norm_M=nm, ratio=r)
    ratios = np.array(ratios)
    spread = float(ratios.max() / ratios.min())
    return [Check("ratios finite", bool(np.all(np.isfinite(ratios))), f"max ratio {ratios.max():.4g}"),
            Check("one constant covers all probes (spread <= 10)", spread <= 10, f"spread {spread:.3f}"),
            Check("B_* monotone in the scale family", monotone)]


# --------------------------------------------------------------------------
# weights

@_register("ap-constant", "[w]_Ap = sup_Q <w>_Q <w^(1-p')>_Q^(p-1)",
           ("weight", "alpha", "family", "squares", "constant"))
def exp_ap(cfg, table):
    spec = cfg.grid()
    L = spec.L
    base = [L / 8, L / 4, L / 2]
    doubled = [L / 32, L / 16] + base
    checks = []
    w1 = constant_weight(spec, 1.0, cfg.p)
    c1 = ap_constant(w1, dyadic_family(spec, base)).constant
    c3 = ap_constant(constant_weight(spec, 3.7, cfg.p), dyadic_family(spec, base)).constant
    table.add(weight="constant", alpha=0.0, family="base", squares=len(dyadic_family(spec, base)), constant=c1)
    table.add(weight="constant*3.7", alpha=0.0, family="base", squares=len(dyadic_family(spec, base)), constant=c3)
    checks.append(Check("[1]_Ap = 1 +- 1e-6", abs(c1 - 1) <= 1e-6 and abs(c3 - 1) <= 1e-6, f"{c1:.12g}, {c3:.12g}"))
    w = power_weight(spec, 1.0, 2.0)
    vals = {}
    for name, radii in (("base", base), ("doubled", doubled)):
        fam = dyadic_family(spec, radii)
        vals[name] = ap_constant(w, fam).constant
        table.add(weight="|z|", alpha=1.0, family=name, squares=len(fam), constant=vals[name])
    change = abs(vals["doubled"] / vals["base"] - 1)
    checks.append(Check("|z| (p=2) changes < 5% when the dyadic family doubles", change < 0.05,
                        f"relative change {change:.4f}"))
    ws = power_weight(spec, 1.0, 2.0).scaled(5.0)
    cs = ap_constant(ws, dyadic_family(spec, base)).constant
    checks.append(Check("scale invariance", abs(cs / vals["base"] - 1) <= 1e-12, f"{cs:.12g}"))
    # outside the A_2 range: refining the grid near the singularity keeps raising the estimate
    grow = []
    for n in (spec.n // 2, spec.n, 2 * spec.n):
        s2 = make_grid(n, L)
        w25 = power_weight(s2, 2.5, 2.0)
        fam = dyadic_family(s2, [L / 64, L / 32] + base)
        c = ap_constant(w25, fam).constant
        grow.append(c)
        table.add(weight=f"|z|^2.5 n={n}", alpha=2.5, family="base+fine", squares=len(fam), constant=c)
    checks.append(Check("|z|^2.5 estimate grows with resolution", grow[0] < grow[1] < grow[2],
                        " < ".join(f"{g:.4g}" for g in grow)))
    return checks


@_register("doubling", "w(tQ) <= C t^(2p) w(Q); w(E)/w(Q) <= C (|E|/|Q|)^sigma",
           ("weight", "alpha", "exponent", "expected", "within_2p"))
def exp_doubling(cfg, table):
    spec = cfg.grid()
    Q = Square(0, spec.L / 16)
    factors = [2, 4, 8]
    ok = True
    worst = 0.0
    d, passed = doubling_check(constant_weight(spec, 1.0, cfg.p), Q, factors)
    table.add(weight="constant", alpha=0.0, exponent=d, expected=2.0, within_2p=passed)
    ok &= abs(d - 2) <= 1e-12
    for a in (-1.0, 0.5, 1.0, 1.5):
        d, passed = doubling_check(power_weight(spec, a, 2.0), Q, factors)
        table.add(weight="|z|^a", alpha=a, exponent=d, expected=2 + a, within_2p=passed)
        worst = max(worst, abs(d - 2 - a))
        ok &= passed
    w = power_weight(spec, 1.0, 2.0)
    c, r = 2 + 2j, 0.5
    chain = [Square(c + r * (1 + 1j) * (1 - t), r * t) for t in (0.75, 0.5, 0.25, 0.125)]
    sig, C = sigma_estimate(w, Square(c, r), chain)
    table.add(weight="|z| sigma", alpha=1.0, exponent=sig, expected=1.0, within_2p=bool(0.8 <= sig <= 1.0))
    return [Check("constant weight exponent = 2", abs(table.rows[0][2] - 2) <= 1e-12),
            Check("|z|^a exponent = 2 + a +- 0.05", worst <= 0.05, f"max deviation {worst:.4f}"),
            Check("d <= 2p + 0.2 for A_2 powers", ok),
            Check("sigma of |z| away from 0 in [0.8, 1]", 0.8 <= sig <= 1.0, f"sigma {sig:.4f}, C {C:.4f}")]


# --------------------------------------------------------------------------
# commutators

def _smooth_real(spec, rng):
    return random_bandlimited(spec, rng, kmax=4, real=True)


@_register("lemma21-productsets", "product sets E_j x F_j with |b(z) - alpha| <= |b(z) - b(u)|",
           ("symbol", "square", "E1", "E2", "F1", "F2", "cover", "half", "domination", "single_sign"),
           defaults={"probes": 10})
def exp_lemma21(cfg, table):
    spec = cfg.grid()
    h = spec.h
    ok = True
    for i in range(cfg.probes):
        rng = cfg.rng(i)
        b = _smooth_real(spec, rng)
        for q in range(5):
            r = h * int(rng.integers(4, 17))
            lim = spec.L / 2 - 5 * r
            c = complex(*(np.round(rng.uniform(-spec.L / 2 + r, lim, 2) / h) * h))
            ps = product_sets(b, Square(c, r))
            inv = product_set_invariants(ps, b, 32, rng)
            ok &= all(inv.values())
            table.add(symbol=i, square=q, E1=int(ps.E1.sum()), E2=int(ps.E2.sum()), F1=int(ps.F1.sum()),
                      F2=int(ps.F2.sum()), **inv)
    return [Check("all product-set invariants hold", ok)]


CHAIN_COLUMNS = tuple(f"T{i}" for i in range(12))


@_register("thm13-chain", "O(b;Q) <~ sum_j mean_Q |[b,B] chi_Fj| <~ ||[b,B]||",
           ("symbol",) + CHAIN_COLUMNS + ("C_chain", "kernel_inequality"), defaults={"probes": 5})
def exp_chain(cfg, table):
    spec = cfg.grid()
    w, P, fam = cfg.make_weight(spec), cfg.params(), cfg.family(spec)
    Q = Square(0, 8 * spec.h)
    steps, consts, kern = [], [], True
    for i in range(cfg.probes):
        rng = cfg.rng(i)
        b = _smooth_real(spec, rng)
        probes = [_localized(spec, rng) for _ in range(3)]
        rep = oscillation_vs_commutator(b, Q, w, P, fam, extra_probes=probes)
        steps.append(rep.step_ratios)
        consts.append(rep.chain_constant)
        kern &= rep.kernel_inequality
        table.add(symbol=str(i), **dict(zip(CHAIN_COLUMNS, rep.terms)), C_chain=rep.chain_constant,
                  kernel_inequality=rep.kernel_inequality)
    bx = sample(spec, lambda z: z.real)
    rx = oscillation_vs_commutator(bx, Q, w, P, fam)
    table.add(symbol="x", **dict(zip(CHAIN_COLUMNS, rx.terms)), C_chain=rx.chain_constant,
              kernel_inequality=rx.kernel_inequality)
    step_fit = np.max(np.array(steps), axis=0)
    Cc = max(consts)
    return [Check("single C_chain <= 1e3", Cc <= 1e3, f"C_chain {Cc:.4g}"),
            Check("each step constant <= 1e3", bool(np.all(step_fit <= 1e3)),
                  "fitted " + ", ".join(f"{s:.3g}" for s in step_fit)),
            Check("kernel inequality sample-wise", kern and rx.kernel_inequality),
            Check("b = x: C <= 64", rx.chain_constant <= 64, f"C {rx.chain_constant:.4g}")]


@_register("lemma34-bounds", "int_(Q_j^k) |[b,B]f_j|^p w >~ delta^p 3^(-2kp) w(Q_j)^(kappa-1) w(3^k Q_j), annulus upper bound",
           ("j", "k", "r_over_h", "lower_lhs", "lower_ref", "C1", "upper_lhs", "upper_ref", "C2",
            "w_ratio", "inclusions"),
           defaults={"symbol": "log"}, symbols=("log", "constant"))
def exp_lemma34(cfg, table):
    spec = cfg.grid()
    w, P = cfg.make_weight(spec), cfg.params()
    blog, fn, _ = _normalized_log(spec)
    squares = [Square(0, m * spec.h) for m in (4, 8, 16)]
    tf = build_test_family(blog, squares, w, P, K0=cfg.K0, delta=cfg.delta)
    inv = family_invariants(tf, blog)
    if cfg.symbol == "constant":
        b = ComplexField(spec, np.full((spec.n, spec.n), 0.7))
        bfn = lambda z: np.full(np.shape(z), 0.7)  # noqa: E731
    else:
        b, bfn = blog, fn
    ks = list(range(cfg.K0, cfg.K0 + 3))
    rows = lower_upper_bounds(tf, b, bfn, w, ks)
    incl = True
    for row in rows:
        Q = squares[row.j]
        ih = inclusions_hold(Q, row.k)
        incl &= ih
        table.add(j=row.j, k=row.k, r_over_h=Q.r / spec.h, lower_lhs=row.lower_lhs, lower_ref=row.lower_ref,
                  C1=row.C1, upper_lhs=row.upper_lhs, upper_ref=row.upper_ref, C2=row.C2,
                  w_ratio=row.w_Qk / row.w_3kQ, inclusions=ih)
    checks = [Check("inclusions 3^(k-1)Q in 4Q^k in 3^(k+1)Q", incl),
              Check("test family invariants", all(inv.values()), str(inv))]
    if cfg.symbol == "constant":
        zero = all(r.lower_lhs == 0 and r.upper_lhs == 0 for r in rows)
        checks.append(Check("constant symbol: every integral vanishes", zero))
        return checks, True
    C1 = np.array([r.C1 for r in rows])
    C2 = np.array([r.C2 for r in rows])
    band = max(C1[[r.j == j for r in rows]].max() / C1[[r.j == j for r in rows]].min()
               for j in range(len(squares)))
    wr = np.array([r.w_Qk / r.w_3kQ for r in rows])
    checks += [Check("C1 > 0", bool(np.all(C1 > 0)), f"min {C1.min():.4g}"),
               Check("C1 within 8x band across k", band <= 8, f"worst band {band:.3f}"),
               Check("C2 uniformly bounded (max/min <= 8)", C2.max() / C2.min() <= 8,
                     f"C2 in [{C2.min():.4g}, {C2.max():.4g}]"),
               Check("w(Q^k)/w(3^k Q) stable (max/min <= 2)", wr.max() / wr.min() <= 2,
                     f"in [{wr.min():.4g}, {wr.max():.4g}]")]
    return checks


def separation_squares(spec: GridSpec, r_cells: int = 4, dist: float = 14.0) -> list[Square]:
    """Three equal squares on a circle of radius ``dist * r`` at angles ``0, 2pi/3, 4pi/3``."""
    h = spec.h
    r = r_cells * h
    out = []
    for k in range(3):
        c = dist * r * np.exp(2j * np.pi * k / 3)
        out.append(Square(complex(np.round(c.real / h) * h, np.round(c.imag / h) * h), r))
    return out


def separation_family(squares, doubled=False) -> list[Square]:
    """Probe squares around each ``Q_j``; the doubled family adds half-octave radii and offsets."""
    facs = [1, 2, 4, 8] if not doubled else [2 ** (k / 2) for k in range(8)]
    offs = [0.0] if not doubled else [-0.5, 0.0, 0.5]
    out = []
    for Q in squares:
        for f in facs:
            for dx in offs:
                for dy in offs:
                    out.append(Square(Q.center + complex(dx, dy) * Q.r, f * Q.r))
    return out


@_register("lemma35-separation", "||[b,B]f_j - [b,B]f_(j+m)|| >= C for disjoint 3C_1 Q_j",
           ("symbol", "family", "j", "m", "separation"))
def exp_lemma35(cfg, table):
    spec = cfg.grid()
    w, P = cfg.make_weight(spec), cfg.params()
    blog, _, _ = _normalized_log(spec)
    squares = separation_squares(spec)
    tf = build_test_family(blog, squares, w, P, K0=cfg.K0, delta=cfg.delta)
    bump = smooth_bump(spec, 0.6)
    fam0 = dyadic_family(spec, radii=[spec.L / 2 ** k for k in range(1, 6)])
    bump = bump * (1.0 / bmo_norm(bump, fam0))
    res = {}
    for sym, b in (("log", blog), ("bump", bump)):
        for fname, doubled in (("base", False), ("doubled", True)):
            rep = separation_experiment(tf, b, w, separation_family(squares, doubled), C1=3.0)
            res[sym, fname] = rep.separations
            for (j, m), s in zip(rep.pairs, rep.separations):
                table.add(symbol=sym, family=fname, j=j, m=m, separation=float(s))
    lo = res["log", "base"].min()
    stab = float(np.max(np.abs(res["log", "doubled"] / res["log", "base"] - 1)))
    bump_max = max(res["bump", "base"].max(), res["bump", "doubled"].max())
    log_min = min(lo, res["log", "doubled"].min())
    return [Check("3C_1 dilates disjoint (C_1 = 3)", dilates_disjoint(squares, 9.0)),
            Check("log: min separation > 0", lo > 0, f"min {lo:.4g}"),
            Check("log: stable within 20% as the family doubles", stab <= 0.2, f"max change {stab:.3f}"),
            Check("bump separations at least 5x smaller", bump_max * 5 <= log_min,
                  f"bump max {bump_max:.4g} vs log min {log_min:.4g}")]


# --------------------------------------------------------------------------
# oscillation

def cmo_families(spec: GridSpec):
    L = spec.L
    small = [lattice_family(L / 2 ** k, 1.0) for k in (3, 4, 5, 6)]
    large = [[Q for Q in lattice_family(R, L - R) if Q.center.real ** 2 + Q.center.imag ** 2 <= (L - R) ** 2 + 1e-12]
             for R in (L / 8, L / 4, L / 2, L)]
    base = Square(0, L / 16)
    dirs = np.exp(2j * np.pi * np.arange(8) / 8)
    trans = []
    for d in (0.0, L / 4, L / 2, 3 * L / 4):
        fam = []
        for u in (dirs if d > 0 else [1.0]):
            c = d * u
            fam.append(base.translate(complex(np.round(c.real / spec.h) * spec.h, np.round(c.imag / spec.h) * spec.h)))
        trans.append(fam)
    return small, large, trans


@_register("cmo-probe", "CMO: oscillation vanishes for small squares, large squares and far translates",
           ("symbol", "sequence", "index", "max_oscillation"))
def exp_cmo(cfg, table):
    spec = cfg.grid()
    small, large, trans = cmo_families(spec)
    fields = {"bump": smooth_bump(spec, 1.0), "log": sample(spec, truncated_log_function(spec.h / 2))}
    probes = {}
    for name, f in fields.items():
        pr = cmo_probe(f, small, large, trans)
        probes[name] = pr
        for seq in ("small", "large", "translated"):
            for i, v in enumerate(getattr(pr, seq)):
                table.add(symbol=name, sequence=seq, index=i, max_oscillation=float(v))
    bump = probes["bump"]
    ok = all(getattr(bump, s)[-1] * 2 <= getattr(bump, s)[0] for s in ("small", "large", "translated"))
    lg = probes["log"].small
    return [Check("bump: every sequence decays at least 2x", ok,
                  ", ".join(f"{s} {getattr(bump, s)[0]:.3g}->{getattr(bump, s)[-1]:.3g}"
                            for s in ("small", "large", "translated"))),
            Check("log: small-square maximum does not decay 2x", lg[-1] * 2 > lg[0], f"{lg[0]:.4g}->{lg[-1]:.4g}")]


# --------------------------------------------------------------------------
# Beltrami

def beltrami_rhs(spec: GridSpec, rng) -> ComplexField:
    return _localized(spec, rng, kmax=6)


@_register("beltrami-solve", "dbar f - b d f = g solved by Neumann series; ||Df|| <= C ||g||",
           ("case", "b_sup", "N_used", "residual", "projected_residual", "grouping_gap", "apriori_ratio",
            "geometric_envelope"),
           defaults={"probes": 5})
def exp_beltrami(cfg, table):
    spec = cfg.grid()
    w, P, fam = cfg.make_weight(spec), cfg.params(), cfg.family(spec)
    b = smooth_bump(spec, 1.5, amplitude=cfg.amplitude)
    worst_res, worst_N, env_ok, ratios, gaps = 0.0, 0, True, [], 0.0
    for i in range(cfg.probes):
        g = beltrami_rhs(spec, cfg.rng(i))
        prob = bt.BeltramiProblem(b, g, P, w)
        rep = bt.solve_beltrami(prob, cfg.tol, cfg.N_max)
        rep2 = bt.solve_beltrami(prob, cfg.tol, cfg.N_max, grouping="left")
        gap = (rep.f_periodic - rep2.f_periodic).l2_norm() / g.l2_norm()
        env = bool(np.all(rep.relative_increments <= prob.b_sup ** np.arange(rep.increments.size) * (1 + 1e-9)))
        a = bt.apriori_ratio(rep, w, P, fam)
        worst_res = max(worst_res, rep.residual)
        worst_N = max(worst_N, rep.N_used)
        env_ok &= env
        gaps = max(gaps, gap)
        ratios.append(a)
        table.add(case=f"g{i}", b_sup=prob.b_sup, N_used=rep.N_used, residual=rep.residual,
                  projected_residual=rep.projected_residual, grouping_gap=gap, apriori_ratio=a,
                  geometric_envelope=env)
    mono = True
    for i in range(cfg.probes):
        g = beltrami_rhs(spec, cfg.rng(i))
        seq = []
        for amp in (0.3, 0.6, 0.9):
            bb = smooth_bump(spec, 1.5, amplitude=amp)
            rep = bt.solve_beltrami(bt.BeltramiProblem(bb, g, P, w), cfg.tol, max(cfg.N_max, 400))
            a = bt.apriori_ratio(rep, w, P, fam)
            seq.append(a)
            table.add(case=f"sweep g{i} amp={amp}", b_sup=float(amp), N_used=rep.N_used, residual=rep.residual,
                      projected_residual=rep.projected_residual, grouping_gap=0.0, apriori_ratio=a,
                      geometric_envelope=True)
        mono &= seq[0] < seq[1] < seq[2]
    ratios = np.array(ratios)
    spread = float(ratios.max() / ratios.min())
    return [Check("residual <= 1e-6", worst_res <= 1e-6, f"max {worst_res:.3e}"),
            Check("N_used <= 40", worst_N <= 40, f"max {worst_N}"),
            Check("geometric decay of Neumann terms", env_ok),
            Check("left/right grouping agree (<= 10 tol)", gaps <= 10 * cfg.tol, f"max {gaps:.3e}"),
            Check("a priori ratio finite and within 2x", bool(np.all(np.isfinite(ratios))) and spread <= 2,
                  f"spread {spread:.3f}"),
            Check("a priori ratio increases with max|b|", mono)]


@_register("n2-growth", "||b^N B^N f|| <= C N^2 ||b||_inf^N ||f||",
           ("pair", "N", "b_sup", "ratio", "envelope", "C_fit"), defaults={"probes": 3})
def exp_n2(cfg, table):
    spec = cfg.grid()
    w, P, fam = cfg.make_weight(spec), cfg.params(), cfg.family(spec)
    ok = True
    Ns = list(range(1, 9))
    for i in range(cfg.probes):
        rng = cfg.rng(i)
        b = smooth_bump(spec, rng.uniform(1.0, 1.8), amplitude=rng.uniform(0.5, 0.8))
        f = _localized(spec, rng)
        T = bt.norm_growth_probe(b, Ns, [f], w, P, fam, fit_N=[1, 2])
        ok &= bool(np.all(T.within_envelope()))
        for N, r, e in zip(Ns, T.ratios[:, 0], T.envelope()):
            table.add(pair=i, N=N, b_sup=T.b_sup, ratio=float(r), envelope=float(e), C_fit=T.C_fit)
    N = np.arange(1, 20)
    env = N ** 2 * 0.5 ** N
    dec = bool(np.all(np.diff(env[6:]) < 0))
    onset = int(N[np.argmax(np.r_[np.diff(env) < 0, True])])
    return [Check("ratios under the fitted envelope for N <= 8", ok),
            Check("envelope N^2 0.5^N decreasing from N = 7", dec, f"decreasing from N = {onset}")]
