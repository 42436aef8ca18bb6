"""Batch runs behind the command line: stats, verification suites and sweeps.

Reports contain only exact integers, exact rationals (as strings) and
fixed-precision decimals, so a replayed :class:`RunConfig` reproduces its
output byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
from dataclasses import asdict, dataclass, field
from decimal import Decimal, localcontext

from gmpy2 import mpq

from . import energy, geometry, incidence
from .errors import BadParams, BudgetExceeded, ZeroElement
from .gaussian import GaussianRational, format_rational, to_rational
from .sets import (
    FiniteComplexSet,
    _as_set,
    difference_set,
    format_set,
    generate,
    product_set,
    ratio_set,
    sumset,
)

log = logging.getLogger(__name__)

SUITES = ("identities", "claim", "incidence")
FAMILIES = ("mixed", "ap", "gp", "random", "random_sector", "lattice")
DEFAULT_FAMILY = {"identities": "mixed", "claim": "random_sector", "incidence": "random"}
DEFAULT_N_MAX = {"identities": 16, "claim": 12, "incidence": 10}

BUDGET_ENV = "SUMPROD_BUDGET_MS"
DEFAULT_BUDGET_MS = 60_000
# rough per-set cost in ms: c * n**k, fitted on a desk machine
_COST_MODEL = {"stats": (0.1, 2), "identities": (1e-2, 4), "claim": (4e-2, 4), "incidence": (2e-2, 4)}


def _decimal_str(d: Decimal) -> str:
    if not d:
        return "0"
    return format(d, ".12g")


def _dpow(n: int, exponent: Decimal) -> Decimal:
    return Decimal(n) ** exponent if n else Decimal(0)


def budget_ms() -> float:
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return DEFAULT_BUDGET_MS
    try:
        return float(raw)
    except ValueError:
        raise BadParams(f"{BUDGET_ENV} must be a number of milliseconds") from None


def estimate_cost_ms(n: int, task: str) -> float:
    c, k = _COST_MODEL[task]
    return c * n ** k


def check_budget(n: int, task: str) -> None:
    est, cap = estimate_cost_ms(n, task), budget_ms()
    if est > cap:
        raise BudgetExceeded(f"{task} on |A|={n} estimated at {est:.0f} ms exceeds budget {cap:.0f} ms")


# -- stats --------------------------------------------------------------------


@dataclass
class BoundReport:
    set_id: str
    n: int
    sumset: int
    difference_set: int
    product_set: int
    ratio_set: int
    additive_energy: int
    multiplicative_energy: int
    cubic_energy: int
    # exact numerators of the observed ratios; denominators are the powers of n named below
    sum_ratio_numerator: int = 0  # |A+A| + |A:A|
    sum_product_numerator: int = 0  # |A+A| + |A.A|
    diff_ratio_numerator: int = 0  # |A-A| + |A:A|
    diff_product_numerator: int = 0  # |A-A| + |A.A|
    observed_ratio_sum: str = ""  # / n^{4/3}
    observed_ratio_sum_product: str = ""  # / (n^{4/3} / log2^{1/3} n)
    observed_ratio_diff: str = ""  # / n^{40/31}
    observed_ratio_diff_product: str = ""  # / (n^{50/39} / log2^{5/13} n)

    COLUMNS = (
        "set_id", "n", "sumset", "difference_set", "product_set", "ratio_set",
        "additive_energy", "multiplicative_energy", "cubic_energy",
        "observed_ratio_sum", "observed_ratio_sum_product",
        "observed_ratio_diff", "observed_ratio_diff_product",
    )

    def to_json(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = str(v) if isinstance(v, int) and k != "n" else v
        return out

    def csv_row(self) -> list:
        d = asdict(self)
        return [d[c] for c in self.COLUMNS]


def cmd_stats(A, set_id: str = "A") -> BoundReport:
    A = _as_set(A)
    if A.has_zero():
        raise ZeroElement("stats need 0 not in A (ratio set and multiplicative energy)")
    n = len(A)
    check_budget(n, "stats")
    s, d = len(sumset(A, A)), len(difference_set(A, A))
    p, r = len(product_set(A, A)), len(ratio_set(A, A))
    rep = BoundReport(
        set_id=set_id,
        n=n,
        sumset=s,
        difference_set=d,
        product_set=p,
        ratio_set=r,
        additive_energy=energy.additive_energy(A).energy_value,
        multiplicative_energy=energy.multiplicative_energy(A).energy_value,
        cubic_energy=energy.cubic_energy(A).energy_value,
        sum_ratio_numerator=s + r,
        sum_product_numerator=s + p,
        diff_ratio_numerator=d + r,
        diff_product_numerator=d + p,
    )
    with localcontext() as ctx:
        ctx.prec = 50
        lg = Decimal(n).ln() / Decimal(2).ln()
        rep.observed_ratio_sum = _decimal_str((s + r) / _dpow(n, Decimal(4) / 3))
        rep.observed_ratio_sum_product = _decimal_str(
            (s + p) * (lg ** (Decimal(1) / 3) if lg else 0) / _dpow(n, Decimal(4) / 3)
        )
        rep.observed_ratio_diff = _decimal_str((d + r) / _dpow(n, Decimal(40) / 31))
        rep.observed_ratio_diff_product = _decimal_str(
            (d + p) * (lg ** (Decimal(5) / 13) if lg else 0) / _dpow(n, Decimal(50) / 39)
        )
    return rep


# -- run configuration ----------------------------------------------------------


@dataclass
class RunConfig:
    suite: list = field(default_factory=lambda: list(SUITES))
    family: str | None = None  # None: per-suite default
    count: int = 20
    n_max: int | None = None  # None: per-suite default
    seed: int = 0
    epsilon: str = "1/100"
    random_dprime: int = 5
    output: str | None = None
    format: str = "json"

    def validate(self) -> RunConfig:
        bad = [s for s in self.suite if s not in SUITES]
        if bad:
            raise BadParams(f"unknown suite(s): {bad}")
        if self.family is not None and self.family not in FAMILIES:
            raise BadParams(f"unknown family {self.family!r}")
        if self.count < 0:
            raise BadParams("count must be >= 0")
        if self.n_max is not None and self.n_max < 2:
            raise BadParams("n_max must be >= 2")
        if to_rational(self.epsilon) <= 0:
            raise BadParams("epsilon must be positive")
        if self.format not in ("json", "csv"):
            raise BadParams("format must be json or csv")
        return self

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> RunConfig:
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known).validate()


def _random_gaussian_int(rng, lo=-3, hi=3, nonzero=True):
    while True:
        z = GaussianRational(rng.randint(lo, hi), rng.randint(lo, hi))
        if z or not nonzero:
            return z


def family_set(family: str, n: int, rng: random.Random, eps) -> FiniteComplexSet:
    """Draw one set of size ``n`` from ``family`` using ``rng``."""
    if family == "ap":
        start = GaussianRational(rng.randint(1, 5), rng.randint(0, 2))
        step = _random_gaussian_int(rng, 0, 3)
        try:
            return generate("arithmetic", n=n, start=start, step=step)
        except BadParams:
            return generate("arithmetic", n=n, start=1, step=1)
    if family == "gp":
        ratio = rng.choice([2, 3, mpq(3, 2), GaussianRational(1, 1), GaussianRational(2, 1), GaussianRational(1, 2)])
        return generate("geometric", n=n, start=rng.randint(1, 3), ratio=ratio)
    if family == "random":
        return generate("random", n=n, seed=rng.getrandbits(32), height=rng.choice([3, 6, 10]))
    if family == "random_sector":
        return generate("random_sector", n=n, eps=eps, seed=rng.getrandbits(32))
    if family == "lattice":
        return generate("complex_lattice", n=n)
    raise BadParams(f"unknown family {family!r}")


def iter_family(family: str, count: int, n_max: int, seed: int, eps, n_min: int = 2):
    """Yield ``(set_id, A)`` deterministically from ``seed``."""
    rng = random.Random(seed)
    cycle = ("ap", "gp", "random", "random_sector")
    for i in range(count):
        kind = cycle[i % len(cycle)] if family == "mixed" else family
        n = rng.randint(n_min, n_max)
        yield f"{kind}-{i}", family_set(kind, n, rng, eps)


# -- suites ---------------------------------------------------------------------


class _Tally:
    def __init__(self):
        self.checks: dict = {}
        self.failures: list = []
        self.info: dict = {}

    def record(self, set_id: str, check: str, ok: bool, detail=None):
        c = self.checks.setdefault(check, {"passed": 0, "failed": 0})
        c["passed" if ok else "failed"] += 1
        if not ok:
            self.failures.append({"set": set_id, "check": check, "detail": detail})

    def note(self, key: str, value):
        self.info.setdefault(key, []).append(value)

    @property
    def passed(self) -> bool:
        return not self.failures


def _random_subsets(D: FiniteComplexSet, k: int, rng: random.Random) -> list:
    elems = list(D)
    out = []
    for _ in range(k):
        size = rng.randint(1, len(elems))
        out.append(FiniteComplexSet(rng.sample(elems, size)))
    return out


def identities_checks(A, set_id, tally: _Tally, rng: random.Random, random_dprime: int = 5):
    A = _as_set(A)
    e3 = energy.verify_e3_identity(A, strict=False)
    tally.record(set_id, "e3_identity", e3.holds, {"lhs": str(e3.lhs), "rhs": str(e3.rhs)})

    cs = energy.cauchy_schwarz_additive(A)
    tally.record(set_id, "cauchy_schwarz_plus", cs["plus"])
    tally.record(set_id, "cauchy_schwarz_minus", cs["minus"])
    if not A.has_zero():
        tally.record(set_id, "cauchy_schwarz_mult", energy.cauchy_schwarz_multiplicative(A))

    D = difference_set(A, A)
    for k, Dp in enumerate([energy.popular_differences(A)] + _random_subsets(D, random_dprime, rng)):
        chk = energy.verify_lemma_31(A, Dp)
        tally.record(set_id, "slice_inequality", chk.holds, {"dprime": k, "lhs": str(chk.lhs), "e3": str(chk.e3)})
        tally.note("slice_inequality_methods", chk.method)

    kk = energy.verify_katz_koester(A)
    tally.record(set_id, "katz_koester", kk.holds, {"lhs": str(kk.lhs), "rhs": str(kk.rhs)})
    if len(A) >= 2:
        c5 = energy.verify_corollary_5(A)
        tally.record(set_id, "energy_product_bound", c5.holds, c5.to_json())
        tally.note("energy_product_ratio", float(c5.ratio))


def claim_checks(A, set_id, tally: _Tally, eps, counterexample_dir=None):
    rep = geometry.verify_claim(A, eps)
    tally.record(set_id, "mst_non_crossing", not rep.mst.crossings)
    tally.record(set_id, "mst_angles", not rep.mst.small_angles)
    tally.record(set_id, "mst_disc_lemma", not rep.mst.disc_violations)
    tally.record(set_id, "rhombi_disjoint", not rep.rhombus_overlaps)
    tally.record(set_id, "meniscus_in_rhombus", not rep.containment_failures)
    tally.record(set_id, "images_in_menisci", not rep.meniscus_misses)
    tally.record(set_id, "injective", not rep.collisions)
    tally.record(set_id, "count_bound", rep.count_holds)
    if not rep.passed and counterexample_dir:
        persist_counterexample(counterexample_dir, set_id, A, rep.to_json())
    return rep


def persist_counterexample(directory, set_id, A, report: dict) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"claim-{set_id}.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"set": format_set(A), "report": report}, fh, indent=2, sort_keys=True)
    log.error("claim violation persisted to %s", path)
    return path


def random_incidence_instance(rng: random.Random, max_points=200, max_lines=200):
    """Points and lines over small Gaussian integers, dense enough to collide."""
    n_pts, n_lines = rng.randint(1, max_points), rng.randint(1, max_lines)

    def small():
        return GaussianRational(rng.randint(-3, 3), rng.randint(-1, 1))

    pts = list(dict.fromkeys((small(), small()) for _ in range(n_pts)))
    lines = []
    for _ in range(n_lines):
        if rng.random() < 0.1:
            lines.append(incidence.LineC.vertical(small()))
        else:
            slope = rng.choice([GaussianRational(k) for k in (-1, 0, 1, 2)] + [GaussianRational(0, 1), GaussianRational(mpq(1, 2))])
            lines.append(incidence.LineC(slope, small()))
    return pts, list(dict.fromkeys(lines))


def incidence_oracle_check(pts, lines) -> bool:
    fast = incidence.incidences(pts, lines)
    slow = incidence.incidences_naive(pts, lines)
    return (fast.total, fast.per_point, fast.per_line) == (slow.total, slow.per_point, slow.per_line)


def translated_checks(A, set_id, tally: _Tally, use_difference=False):
    sel = incidence.popular_lines(A)
    tally.record(set_id, "dyadic_bound", sel.bound_holds, {"N": sel.N, "L": len(sel.lines)})
    P = incidence.popular_point_set(A, sel.lines)
    if use_difference:
        Q = list(dict.fromkeys((p[0] - q[0], p[1] - q[1]) for p in P for q in P))
    else:
        Q = [(-x, -y) for x, y in P]
    rep = incidence.rich_sum_report(P, Q, max(1, sel.N), slopes=sel.lines, cap=sel.N)
    tally.record(set_id, "n_le_m", not rep.nm_violations)
    tally.record(set_id, "lines_per_point_le_L", not rep.multiplicity_violations)
    tally.record(set_id, "heavy_sum_two_lines", not rep.heavy_single_line)
    tally.record(set_id, "capped_weight_le_LQ", rep.total_weight <= rep.slope_count * rep.point_count)
    tally.note("rich_sum_ratio", _decimal_str(rep.ratio))
    return rep


def elekes_checks(A, set_id, tally: _Tally, ts=(1, 2, 4)):
    fam = incidence.elekes_family(A)
    for t in ts:
        chk = incidence.elekes_containment(A, t, fam)
        tally.record(set_id, f"elekes_t{t}", chk.holds, {"checked": chk.points_checked})


def _nonzero_family(family, count, n_max, seed, eps):
    for set_id, A in iter_family(family, count, n_max, seed, eps):
        if A.has_zero():  # cannot happen with the shipped generators
            continue
        yield set_id, A


def run_suite(name: str, cfg: RunConfig, counterexample_dir=None) -> dict:
    eps = to_rational(cfg.epsilon)
    family = cfg.family or DEFAULT_FAMILY[name]
    n_max = cfg.n_max or DEFAULT_N_MAX[name]
    seed = cfg.seed * 1_000_003 + SUITES.index(name)
    tally = _Tally()
    rng = random.Random(seed ^ 0x5EED)
    sets = 0
    if name == "identities":
        for set_id, A in iter_family(family, cfg.count, n_max, seed, eps):
            check_budget(len(A), "identities")
            identities_checks(A, set_id, tally, rng, cfg.random_dprime)
            sets += 1
    elif name == "claim":
        if family not in ("random_sector",):
            raise BadParams("the claim suite needs sector sets (family random_sector)")
        for set_id, A in iter_family(family, cfg.count, n_max, seed, eps):
            check_budget(len(A), "claim")
            claim_checks(A, set_id, tally, eps, counterexample_dir)
            sets += 1
    elif name == "incidence":
        for i in range(cfg.count):
            pts, lines = random_incidence_instance(rng)
            tally.record(f"inc-{i}", "hash_equals_naive", incidence_oracle_check(pts, lines))
        for i, (set_id, A) in enumerate(_nonzero_family(family, cfg.count, n_max, seed, eps)):
            check_budget(len(A), "incidence")
            translated_checks(A, set_id, tally, use_difference=(i % 5 == 4 and len(A) <= 6))
            elekes_checks(A, set_id, tally)
            sets += 1
    else:
        raise BadParams(f"unknown suite {name!r}")
    info = {}
    if "slice_inequality_methods" in tally.info:
        methods = tally.info["slice_inequality_methods"]
        info["slice_inequality_methods"] = {m: methods.count(m) for m in sorted(set(methods))}
    if "energy_product_ratio" in tally.info:
        info["energy_product_min_ratio"] = format(min(tally.info["energy_product_ratio"]), ".12g")
    if "rich_sum_ratio" in tally.info:
        vals = [Decimal(v) for v in tally.info["rich_sum_ratio"]]
        info["rich_sum_max_ratio"] = _decimal_str(max(vals))
    return {
        "family": family,
        "n_max": n_max,
        "sets": sets,
        "passed": tally.passed,
        "checks": dict(sorted(tally.checks.items())),
        "failures": tally.failures,
        "informational": info,
    }


def cmd_verify(cfg: RunConfig, counterexample_dir="counterexamples") -> dict:
    cfg.validate()
    suites = {name: run_suite(name, cfg, counterexample_dir) for name in cfg.suite}
    return {
        "config": cfg.to_json(),
        "passed": all(s["passed"] for s in suites.values()),
        "suites": suites,
    }


def verify_report_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "check", "passed", "failed"])
    for name, s in report["suites"].items():
        for check, c in s["checks"].items():
            w.writerow([name, check, c["passed"], c["failed"]])
    return buf.getvalue()


# -- sweep ----------------------------------------------------------------------


def sweep_set(family: str, n: int, seed: int, eps) -> FiniteComplexSet:
    if family == "ap":
        return generate("arithmetic", n=n)
    if family == "gp":
        return generate("geometric", n=n)
    if family == "lattice":
        return generate("complex_lattice", n=n)
    if family == "random":
        return generate("random", n=n, seed=seed, height=max(10, n))
    if family == "random_sector":
        return generate("random_sector", n=n, eps=eps, seed=seed, height=max(12, n))
    raise BadParams(f"family {family!r} cannot be swept")


def cmd_sweep(family: str, n_values, seed: int = 0, eps="1/100") -> list:
    rows = []
    for n in sorted(set(n_values)):
        check_budget(n, "stats")
        A = sweep_set(family, n, seed, to_rational(eps))
        rows.append(cmd_stats(A, set_id=f"{family}-{n}"))
    return rows


def stats_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BoundReport.COLUMNS)
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
