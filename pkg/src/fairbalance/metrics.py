"""Per-group confusion accounting and the scalar fairness metrics.

Rate differences are privileged minus unprivileged. Zero-denominator
rates are defined as 0 and flagged as degenerate instead of propagating
NaN.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Confusion:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(
            self.tp + other.tp,
            self.fp + other.fp,
            self.tn + other.tn,
            self.fn + other.fn,
        )


@dataclass(frozen=True)
class GroupConfusion:
    privileged: Confusion
    unprivileged: Confusion

    @property
    def pooled(self) -> Confusion:
        return self.privileged + self.unprivileged


@dataclass(frozen=True)
class Rates:
    tpr: float
    fpr: float
    tnr: float
    fnr: float
    precision: float
    recall: float
    f1: float
    degenerate: bool


@dataclass(frozen=True)
class FairnessReport:
    balanced_accuracy: float
    aod: float
    aao: float
    eod: float
    tnrd: float
    tprd: float
    fprd: float
    fair_utility: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "ba": self.balanced_accuracy,
            "aod": self.aod,
            "aao": self.aao,
            "eod": self.eod,
            "tnrd": self.tnrd,
            "tprd": self.tprd,
            "fprd": self.fprd,
            "fair_utility": self.fair_utility,
            "degenerate": self.degenerate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _safe_div(num: float, den: float) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def rates(c: Confusion) -> Rates:
    tpr, d1 = _safe_div(c.tp, c.tp + c.fn)
    fpr, d2 = _safe_div(c.fp, c.fp + c.tn)
    tnr, _ = _safe_div(c.tn, c.tn + c.fp)
    fnr, _ = _safe_div(c.fn, c.fn + c.tp)
    precision, d3 = _safe_div(c.tp, c.tp + c.fp)
    recall = tpr
    f1, d4 = _safe_div(2 * precision * recall, precision + recall)
    return Rates(
        tpr=tpr,
        fpr=fpr,
        tnr=tnr,
        fnr=fnr,
        precision=precision,
        recall=recall,
        f1=f1,
        degenerate=d1 or d2 or d3 or d4,
    )


def confusion_by_group(y_true, y_pred, protected) -> GroupConfusion:
    """Exact TP/FP/TN/FN counts per protected group; positive label is 1."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    protected = np.asarray(protected)
    if not (len(y_true) == len(y_pred) == len(protected)):
        raise ValueError("y_true, y_pred and protected must have equal length")
    groups = []
    for g in (1, 0):
        m = protected == g
        t, p = y_true[m], y_pred[m]
        groups.append(
            Confusion(
                tp=int(np.count_nonzero((t == 1) & (p == 1))),
                fp=int(np.count_nonzero((t == 0) & (p == 1))),
                tn=int(np.count_nonzero((t == 0) & (p == 0))),
                fn=int(np.count_nonzero((t == 1) & (p == 0))),
            )
        )
    return GroupConfusion(privileged=groups[0], unprivileged=groups[1])


def balanced_accuracy(c: GroupConfusion) -> float:
    """Mean of pooled TPR and TNR; 0 when a pooled class is absent."""
    pooled = rates(c.pooled)
    if c.pooled.tp + c.pooled.fn == 0 or c.pooled.tn + c.pooled.fp == 0:
        return 0.0
    return 0.5 * (pooled.tpr + pooled.tnr)


def fair_utility(ba: float, tprd: float, fprd: float) -> float:
    """Balanced accuracy scaled by the average closeness-to-parity of the
    group TPR and FPR."""
    return ba * 0.5 * ((1.0 - abs(tprd)) + (1.0 - abs(fprd)))


def fairness_report(c: GroupConfusion) -> FairnessReport:
    """All scalar metrics from one per-group confusion.

    Signed differences are retained for diagnostics; eod and aao are
    magnitudes (lower = fairer).
    """
    pr = rates(c.privileged)
    up = rates(c.unprivileged)
    degenerate = (
        c.privileged.tp + c.privileged.fn == 0
        or c.privileged.tn + c.privileged.fp == 0
        or c.unprivileged.tp + c.unprivileged.fn == 0
        or c.unprivileged.tn + c.unprivileged.fp == 0
        or c.pooled.tp + c.pooled.fn == 0
        or c.pooled.tn + c.pooled.fp == 0
    )
    tprd = pr.tpr - up.tpr
    fprd = pr.fpr - up.fpr
    tnrd = pr.tnr - up.tnr
    ba = balanced_accuracy(c)
    return FairnessReport(
        balanced_accuracy=ba,
        aod=0.5 * (tprd + fprd),
        aao=0.5 * (abs(tprd) + abs(fprd)),
        eod=abs(tprd),
        tnrd=tnrd,
        tprd=tprd,
        fprd=fprd,
        fair_utility=fair_utility(ba, tprd, fprd),
        degenerate=degenerate,
    )
