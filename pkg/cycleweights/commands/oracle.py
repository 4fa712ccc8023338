# cycleweights/commands/oracle.py
import argparse
import logging
import math

from cycleweights.config import settings
from cycleweights.errors import EXIT_CHECK_FAILED, EXIT_OK
from cycleweights.exact_oracle import (
    Statistic,
    build_h_table,
    enumerate_cycle_types,
    exact_statistic_pmf,
    h_exact,
    mgf_series,
)
from cycleweights.schemas import Check, RunConfig, VerificationReport
from cycleweights.utils import add_family_arguments, as_fraction, output_stream, weight_from_config
from cycleweights.weights import Family

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-10
MGF_XS = (1, 2, 3)
MGF_SS = (-1.0, 0.5, 1.0)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("oracle", parents=parents, help="small-n enumeration cross-checks")
    add_family_arguments(parser)
    parser.add_argument("--n", type=int, help="permutation size (enumerated)")
    return parser


def cross_checks(w, n: int, law) -> list:
    """Recurrence vs partition sums, normalization, MGF series vs enumeration."""
    checks = []
    table = build_h_table(w, n)
    for m in range(1, n + 1):
        rel = abs(1.0 - table[m].ratio(h_exact(w, m)))
        checks.append(Check(name=f"h_{m}_recurrence_vs_partitions", observed=rel, target=0.0, tol=EXACT_TOL))
    if w.family == Family.EWENS:
        # h_n = ϑ^{(n)}/n!
        log_closed = math.lgamma(w.parameter + n) - math.lgamma(w.parameter) - math.lgamma(n + 1)
        rel = abs(math.expm1(table[n].log() - log_closed))
        checks.append(Check(name=f"h_{n}_rising_factorial", observed=rel, target=0.0, tol=EXACT_TOL))

    total = math.fsum(p for _, p in law)
    checks.append(Check(name="probabilities_sum_to_one", observed=total, target=1.0, tol=EXACT_TOL))

    if n <= settings.SERIES_CAP:
        for x in MGF_XS:
            for s in MGF_SS:
                expected = math.fsum(p * math.exp(s * ct.tail_count(x)) for ct, p in law)
                series = mgf_series(w, n, x, s, table)
                checks.append(Check(
                    name=f"mgf_x={x}_s={s:g}",
                    observed=series / expected,
                    target=1.0,
                    tol=EXACT_TOL,
                ))
    return checks


def run(config: RunConfig) -> int:
    w = weight_from_config(config)
    n = config.n
    pmf = exact_statistic_pmf(w, n, Statistic.longest())
    law = enumerate_cycle_types(w, n)
    checks = cross_checks(w, n, law)
    report = VerificationReport(
        experiment="oracle",
        config=config.config_echo(),
        checks=checks,
        distances={f"pmf_L1={k}": p for k, p in pmf.items()},
        counts={"cycle_types": len(law)},
    )
    print("L1 pmf {" + ", ".join(f"{k}: {as_fraction(p)}" for k, p in pmf.items()) + "}")
    for check in report.failed_checks():
        logger.error("oracle check %s failed: observed %.17g", check.name, check.observed)
    print("pass" if report.passed else "FAIL")
    if config.out:
        with output_stream(config.out) as out:
            out.write(report.to_json() + "\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED
