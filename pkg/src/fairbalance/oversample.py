"""Resampling algorithms: fair oversampling, SMOTE, random duplication,
and the reweighing baseline.

All oversamplers preserve the original rows as an unchanged prefix and
append synthetic rows, each documented by a :class:`SynthesisRecord`.
Synthetic continuous features lie on the segment between a base row and
one of its k nearest neighbors; binary and one-hot features are copied
from the base.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset, SubgroupPartition, partition_subgroups
from .errors import ReweighError
from .neighbors import nearest_neighbors


@dataclass(frozen=True)
class SynthesisRecord:
    base_index: int
    neighbor_index: int
    r: float
    synthetic_row: np.ndarray
    assigned_label: int
    assigned_protected: int
    cell: str = ""


@dataclass(frozen=True)
class FosPlan:
    """Deficit accounting for the two oversampling phases."""

    S_pr: int
    S_up: int
    D1_cell: str
    D2_cell: str
    N_samp1: int
    N_samp2: int


def plan_fos(part: SubgroupPartition) -> FosPlan:
    n_prmaj, n_upmaj, n_prmin, n_upmin = part.counts
    s_pr = n_prmaj - n_prmin
    s_up = n_upmaj - n_upmin
    if s_pr < 0:
        warnings.warn("privileged minority cell exceeds its majority cell; deficit clamped to 0")
        s_pr = 0
    if s_up < 0:
        warnings.warn("unprivileged minority cell exceeds its majority cell; deficit clamped to 0")
        s_up = 0
    # smaller deficit first; on a tie the unprivileged cell is phase 1
    if s_up <= s_pr:
        d1, d2, n1, n2 = "upmin", "prmin", s_up, s_pr
    else:
        d1, d2, n1, n2 = "prmin", "upmin", s_pr, s_up
    return FosPlan(S_pr=s_pr, S_up=s_up, D1_cell=d1, D2_cell=d2, N_samp1=n1, N_samp2=n2)


def interpolate(base: np.ndarray, neighbor: np.ndarray, r: float, continuous_mask=None) -> np.ndarray:
    """Point on the segment from base toward neighbor at gap r in [0, 1].

    Columns outside ``continuous_mask`` are copied from the base row.
    """
    base = np.asarray(base, dtype=np.float64)
    neighbor = np.asarray(neighbor, dtype=np.float64)
    if base.shape != neighbor.shape:
        raise ValueError("base and neighbor rows must have equal arity")
    if continuous_mask is None:
        continuous_mask = np.ones(base.shape, dtype=bool)
    out = base.copy()
    out[continuous_mask] = base[continuous_mask] + r * (
        neighbor[continuous_mask] - base[continuous_mask]
    )
    return out


def _continuous_mask(d: Dataset, interpolate_protected: bool) -> np.ndarray:
    mask = np.array([c.kind == "continuous" for c in d.columns])
    if interpolate_protected and d.protected_column is not None:
        mask[d.protected_column] = True
    return mask


def _synthesize(
    d: Dataset,
    bases: np.ndarray,
    pool: np.ndarray,
    k: int,
    rng: np.random.Generator,
    label: int,
    cell: str,
    include_protected: bool,
    interpolate_protected: bool,
) -> list[SynthesisRecord]:
    """Build one synthetic row per base, neighbors drawn from ``pool``."""
    mask = _continuous_mask(d, interpolate_protected)
    records = []
    k_eff = min(k, len(pool) - 1)
    if k_eff < 1:
        warnings.warn(f"cell '{cell}' too small for interpolation; duplicating instead")
        for b in bases:
            records.append(
                SynthesisRecord(
                    base_index=int(b),
                    neighbor_index=int(b),
                    r=0.0,
                    synthetic_row=d.features[b].copy(),
                    assigned_label=label,
                    assigned_protected=int(d.protected[b]),
                    cell=cell,
                )
            )
        return records
    uniq = np.unique(bases)
    table = nearest_neighbors(d, pool, uniq, k_eff, include_protected=include_protected)
    lookup = {int(b): table[i] for i, b in enumerate(uniq)}
    for b in bases:
        nb = int(lookup[int(b)][rng.integers(k_eff)])
        r = float(rng.random())
        row = interpolate(d.features[b], d.features[nb], r, mask)
        records.append(
            SynthesisRecord(
                base_index=int(b),
                neighbor_index=nb,
                r=r,
                synthetic_row=row,
                assigned_label=label,
                assigned_protected=int(d.protected[b]),
                cell=cell,
            )
        )
    return records


def _append(d: Dataset, records: list[SynthesisRecord]) -> Dataset:
    if not records:
        return d
    X = np.vstack([d.features] + [rec.synthetic_row for rec in records])
    labels = np.concatenate([d.labels, [rec.assigned_label for rec in records]])
    protected = np.concatenate(
        [d.protected, [rec.assigned_protected for rec in records]]
    )
    weights = None
    if d.weights is not None:
        weights = np.concatenate([d.weights, np.ones(len(records))])
    ids = np.concatenate([d.ids, np.full(len(records), -1, dtype=np.int64)])
    return Dataset(
        features=X,
        labels=labels,
        protected=protected,
        columns=d.columns,
        weights=weights,
        protected_column=d.protected_column,
        ids=ids,
        dropped_rows=d.dropped_rows,
        records=tuple(records),
    )


def smote(d: Dataset, k: int = 5, seed: int = 0) -> Dataset:
    """Balance the classes with synthetic minority interpolation."""
    part = partition_subgroups(d)
    n_prmaj, n_upmaj, n_prmin, n_upmin = part.counts
    needed = (n_prmaj + n_upmaj) - (n_prmin + n_upmin)
    if needed == 0:
        return d
    minority = np.concatenate([part.idx_prmin, part.idx_upmin])
    rng = np.random.default_rng(seed)
    bases = rng.choice(minority, size=needed, replace=True)
    records = _synthesize(
        d,
        bases,
        minority,
        k,
        rng,
        label=part.minority_label,
        cell="minority",
        include_protected=False,
        interpolate_protected=False,
    )
    return _append(d, records)


def fos(
    d: Dataset,
    k: int = 5,
    seed: int = 0,
    include_protected: bool = False,
    interpolate_protected: bool = False,
) -> Dataset:
    """Fair oversampling: equalize all four class x group cell counts.

    Phase 1 fills the smaller-deficit minority cell with neighbors drawn
    within that cell; phase 2 fills the other minority cell with
    neighbors drawn from the entire minority class. Independent RNG
    streams per phase, derived from the seed.
    """
    part = partition_subgroups(d)
    plan = plan_fos(part)
    if plan.N_samp1 == 0 and plan.N_samp2 == 0:
        return d
    s1, s2 = (
        np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2)
    )
    minority = np.concatenate([part.idx_prmin, part.idx_upmin])
    records = []
    for n_samp, cell, pool, rng in (
        (plan.N_samp1, plan.D1_cell, part.cell(plan.D1_cell), s1),
        (plan.N_samp2, plan.D2_cell, minority, s2),
    ):
        if n_samp == 0:
            continue
        cell_idx = part.cell(cell)
        if n_samp <= len(cell_idx):
            bases = rng.choice(cell_idx, size=n_samp, replace=False)
        else:
            bases = rng.choice(cell_idx, size=n_samp, replace=True)
        records.extend(
            _synthesize(
                d,
                bases,
                pool,
                k,
                rng,
                label=part.minority_label,
                cell=cell,
                include_protected=include_protected,
                interpolate_protected=interpolate_protected,
            )
        )
    return _append(d, records)


def random_oversample(d: Dataset, seed: int = 0) -> Dataset:
    """Duplicate minority rows uniformly with replacement until parity."""
    part = partition_subgroups(d)
    n_prmaj, n_upmaj, n_prmin, n_upmin = part.counts
    needed = (n_prmaj + n_upmaj) - (n_prmin + n_upmin)
    if needed == 0:
        return d
    minority = np.concatenate([part.idx_prmin, part.idx_upmin])
    rng = np.random.default_rng(seed)
    bases = rng.choice(minority, size=needed, replace=True)
    records = [
        SynthesisRecord(
            base_index=int(b),
            neighbor_index=int(b),
            r=0.0,
            synthetic_row=d.features[b].copy(),
            assigned_label=part.minority_label,
            assigned_protected=int(d.protected[b]),
            cell="minority",
        )
        for b in bases
    ]
    return _append(d, records)


def reweigh(d: Dataset) -> Dataset:
    """Attach expected/observed frequency weights per class x group cell."""
    part = partition_subgroups(d)
    if any(c == 0 for c in part.counts):
        raise ReweighError(f"empty subgroup cell; counts {part.counts}")
    n = d.n
    weights = np.empty(n, dtype=np.float64)
    for cell_idx in (part.idx_prmaj, part.idx_upmaj, part.idx_prmin, part.idx_upmin):
        g = d.protected[cell_idx[0]]
        c = d.labels[cell_idx[0]]
        n_g = int(np.count_nonzero(d.protected == g))
        n_c = int(np.count_nonzero(d.labels == c))
        weights[cell_idx] = (n_g * n_c) / (n * len(cell_idx))
    return Dataset(
        features=d.features,
        labels=d.labels,
        protected=d.protected,
        columns=d.columns,
        weights=weights,
        protected_column=d.protected_column,
        ids=d.ids,
        dropped_rows=d.dropped_rows,
    )


def dump_records(records, path) -> None:
    """Write synthesis records as an audit CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["base_index", "neighbor_index", "r", "cell"])
        for rec in records:
            writer.writerow([rec.base_index, rec.neighbor_index, f"{rec.r:.17g}", rec.cell])
