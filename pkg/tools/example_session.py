"""
Walk through the sumlab library on small moduli.

Usage:
    # default walk-through at p = 3
    uv run python tools/example_session.py

    # another prime and character depth
    uv run python tools/example_session.py --p 5 --kappa 4
"""

import argparse
import logging

from sumlab.characters import char_from_index, gauss_sum, postnikov_eta
from sumlab.circle_method import delta_kloosterman, delta_lowered
from sumlab.classic_sums import kloosterman_sum, ramanujan_closed, weil_bound_ratio
from sumlab.config import auto_lambda
from sumlab.errors import SumLabError
from sumlab.modarith import PrimePowerModulus, primitive_root
from sumlab.oscillatory import gamma_pm, mellin_V, mellin_V_mpmath
from sumlab.paper_sums import CStarParams, check_quintic, verify_lemma6

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
logger = logging.getLogger(__name__)

DEFAULT_P = 3
DEFAULT_KAPPA = 6


def parse_args():
    parser = argparse.ArgumentParser(description="sumlab example session")
    parser.add_argument("-p", "--p", type=int, default=DEFAULT_P, help=f"Odd prime (default: {DEFAULT_P})")
    parser.add_argument(
        "-k", "--kappa", type=int, default=DEFAULT_KAPPA, help=f"Character modulus exponent (default: {DEFAULT_KAPPA})"
    )
    return parser.parse_args()


def main():
    args = parse_args()
    p, kappa = args.p, args.kappa
    modulus = PrimePowerModulus(p, kappa)
    lam = auto_lambda(kappa)

    logger.info(f"Modulus {modulus}: phi = {modulus.phi}, primitive root {primitive_root(modulus)}, lambda = {lam}")

    chi = char_from_index(modulus, 1)
    tau = gauss_sum(chi)
    logger.info(f"tau(chi_1) = {tau.value:.6f}, |tau| = {abs(tau):.6f}, p^(kappa/2) = {modulus.value**0.5:.6f}")
    eta = postnikov_eta(chi, kappa // 2)
    logger.info(f"Postnikov parameter at depth {eta.alpha}: eta = {eta.eta}")

    logger.info("--- Classical sums ---")
    for c in (p, p * p, 2 * p):
        logger.info(f"c({p}, {c}) = {ramanujan_closed(p, c)}, S(1, 1; {c}) = {kloosterman_sum(1, 1, c).real:.6f}")
        logger.info(f"Weil ratio at c = {c}: {weil_bound_ratio(1, 1, c):.4f}")

    logger.info("--- Circle method ---")
    for n in (0, 1, p**2):
        logger.info(f"delta({n}) via Q = 10: {delta_kloosterman(n, 10):.3e}, lowered: {delta_lowered(n, p, 2, 10):.3e}")

    logger.info("--- Lemma 6 at one tuple ---")
    try:
        params = CStarParams(p, kappa, lam, 0, 1, 2, 1, 1, 1, 1, 1, 1, 1)
        check = verify_lemma6(chi, params)
        for claim in check.claims:
            status = "ok" if claim.passed else "FAILED"
            logger.info(f"{claim.name}: {status} (value {claim.value}, bound {claim.bound})")
        if params.in_fast_domain:
            quintic = check_quintic(chi, params)
            logger.info(f"Quintic roots: {quintic.oracle.real:.0f}, b2 residues: {quintic.fast.real:.0f}")
    except SumLabError as e:
        logger.error(f"Lemma 6 check failed: {e}")

    logger.info("--- Kernels ---")
    logger.info(f"gamma_+(-1/2 + 10i) = {gamma_pm(complex(-0.5, 10)):.6f}")
    quad_value = mellin_V(1.0, 0.5)
    logger.info(f"V~(1, 1/2): quad {quad_value.value:.10f}, mpmath {mellin_V_mpmath(1.0, 0.5):.10f}")


if __name__ == "__main__":
    main()
