from pathlib import Path

from pipelines.common import Session
from tools.utils import reports_to_df, spawn_rng
from verify.oracle import Law, pointwise_law_check

LAWS = {
    "meet": Law.MEET,
    "join": Law.JOIN,
    "complement": Law.COMPLEMENT,
    "diff": Law.DIFFERENCE,
    "xor": Law.SYMMETRIC_DIFFERENCE,
}


def run_oracle(operation, inputs, samples=None, config_path=None, epsilon=None, seed=None, csv_path=None,
               threshold=0.999):
    """Check a stored result against its operands pointwise.

    `inputs` is (A, RESULT) for the complement and (A, B, RESULT) otherwise.
    Exits 1 when the agreement ratio is below `threshold`.
    """
    session = Session(config_path, epsilon=epsilon, seed=seed)
    console = session.console
    law = LAWS[operation]
    elements = session.load(*inputs)
    if law is Law.COMPLEMENT:
        lhs, result = elements
        rhs = None
    else:
        lhs, rhs, result = elements

    oracle = session.config.oracle
    report = pointwise_law_check(
        result, lhs, rhs, law,
        n=samples if samples is not None else oracle.samples,
        band=oracle.band_factor * session.tol.eps,
        rng=spawn_rng(session.seed, 1),  # sampling stream, separate from the loading one
        tol=session.tol,
        budget=session.config.membership.ray_budget,
        far_field_factor=oracle.far_field_factor,
        progress=True,
    )
    console.report_lines(report.lines())
    if csv_path is not None:
        Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
        reports_to_df([report], [operation]).to_csv(csv_path, index=False)
    if not report.passed(threshold):
        console.error(f"agreement {report.agreement_ratio:.5f} below {threshold}")
        return 1
    return 0
