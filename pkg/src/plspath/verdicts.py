"""Hypothesis adjudication: significance, reliability of the constructs
involved, and the hypothesized sign."""

from __future__ import annotations

from dataclasses import dataclass

from .bootstrap import BootstrapReport
from .diagnostics import ReliabilityReport, assess_constructs
from .modelspec import ModelError, ModelSpec

CONFIRMED = "Confirmed"
NOT_CONFIRMED = "Not Confirmed"


@dataclass
class Verdict:
    id: str
    source: str
    target: str
    beta: float
    sd: float
    t: float
    p: float
    expected_sign: str
    reliability_ok: bool
    verdict: str
    reason: str

    @property
    def path(self) -> str:
        return f"{self.source} -> {self.target}"


def sign_ok(beta, expected) -> bool:
    if expected == "+":
        return beta > 0
    if expected == "-":
        return beta < 0
    return True


def adjudicate(beta, p, reliability_ok, expected_sign="any", alpha=0.05) -> tuple[str, str]:
    reasons = []
    if not p < alpha:
        reasons.append(f"not significant (p = {p:.3f} >= {alpha})")
    if not reliability_ok:
        reasons.append("construct failed reliability/validity checks")
    if not sign_ok(beta, expected_sign):
        reasons.append(f"sign of beta ({beta:+.3f}) contradicts hypothesized '{expected_sign}'")
    if reasons:
        return NOT_CONFIRMED, "; ".join(reasons)
    return CONFIRMED, "significant, reliable, expected sign"


def hypothesis_verdicts(boot: BootstrapReport, rel: ReliabilityReport, spec: ModelSpec,
                        alpha: float = 0.05) -> list[Verdict]:
    """Apply the confirmation rule to every hypothesis declared in ``spec``.

    A construct counts as unreliable when it appears in ``rel`` and fails
    :func:`assess_constructs`; interaction terms inherit their moderator's
    and predictor's status.
    """
    failed = set(assess_constructs(rel))
    parts = {i.name: (i.moderator, i.predictor) for i in spec.interactions}
    out = []
    for h in spec.hypotheses:
        try:
            est = boot.get("path", h.source, h.target)
        except KeyError:
            raise ModelError(f"hypothesis {h.id} references path {h.source} -> {h.target}, "
                             "which the model does not estimate") from None
        involved = set()
        for end in (h.source, h.target):
            involved.update(parts.get(end, (end,)))
        ok = not (involved & failed)
        verdict, reason = adjudicate(est.original, est.p, ok, h.sign, alpha)
        out.append(Verdict(h.id, h.source, h.target, est.original, est.sd, est.t, est.p,
                           h.sign, ok, verdict, reason))
    return out
