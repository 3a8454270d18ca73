"""Predicted Frobenius limits and F-signatures, measured summand counts, and
the search for a split copy of the regular representation inside low degrees."""

from __future__ import annotations

import csv
import io
import os
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import diagmu, gf
from .equivmod import (DEFAULT_SLICE_CAP, GradedEquivariantModule, StandardLabel, descriptor_standard_module,
                       frobenius_pushforward, graded_hom, polynomial_ring_module, standard_labels,
                       summand_count)
from .errors import ConfigError, NotSmallError, ResourceCapError, VerificationError
from .groupscheme import (GroupSchemeDescriptor, SmallnessVerdict, infinitesimal_e0, is_linearly_reductive,
                          is_small, order)
from .modrep import (KGModule, SimpleProjectiveDatum, _make, decompose_module, hom_space, is_isomorphic,
                     primitive_idempotents, regular_module, simples_and_projective_covers, split_module)

CSV_COLUMNS = ["config_hash", "e", "label", "shift_count_breakdown", "count", "normalized", "predicted",
               "deviation"]


def worker_count() -> int:
    raw = os.environ.get("FROBSIG_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"FROBSIG_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"FROBSIG_THREADS must be a positive integer, got {raw!r}")
    return n


# ----------------------------------------------------------------------
# group data
# ----------------------------------------------------------------------
@dataclass
class GroupData:
    desc: GroupSchemeDescriptor
    simples: list  # SimpleProjectiveDatum
    labels: list  # StandardLabel

    def datum_for(self, std: StandardLabel) -> SimpleProjectiveDatum | None:
        for d in self.simples:
            if d.projective_cover is std.module:
                return d
        return None

    def label(self, name: str) -> StandardLabel:
        for L in self.labels:
            if L.label == name:
                return L
        raise ConfigError(f"unknown module label {name!r}; known: {[L.label for L in self.labels]}")


def group_data(desc: GroupSchemeDescriptor) -> GroupData:
    cached = getattr(desc, "_group_data", None)
    if cached is None:
        data = simples_and_projective_covers(desc.constant_group)
        cached = GroupData(desc, data, standard_labels(desc, data))
        desc._group_data = cached
    return cached


# ----------------------------------------------------------------------
# predictions
# ----------------------------------------------------------------------
@dataclass
class LabelPrediction:
    label: str
    coefficient: Fraction  # Frobenius limit coefficient for the configured rank
    s_value: Fraction  # generalized F-signature of the invariant module (rank one)
    u: int


@dataclass
class Prediction:
    rank: int
    group_order: int
    linearly_reductive: bool
    e0: int
    smallness: SmallnessVerdict
    labels: list
    s_A: Fraction
    reflexive_only: bool = False

    def coefficient(self, label: str) -> Fraction:
        for L in self.labels:
            if L.label == label:
                return L.coefficient
        return Fraction(0)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "group_order": self.group_order,
            "linearly_reductive": self.linearly_reductive,
            "e0": self.e0,
            "smallness": self.smallness.to_dict(),
            "s_A": str(self.s_A),
            "reflexive_only": self.reflexive_only,
            "labels": [{"label": L.label, "coefficient": str(L.coefficient), "s": str(L.s_value), "u": L.u}
                       for L in self.labels],
        }


def predict(desc: GroupSchemeDescriptor, rank: int = 1, override: bool = False,
            reflexive_only: bool = False) -> Prediction:
    """FL coefficient rank * dim V_i / (|G| dim End V_i) on the projective labels
    (zero on k (x) S when k is not projective); s(A) = 1/|G| or 0."""
    if rank < 1:
        raise ConfigError("rank must be positive")
    verdict = is_small(desc)
    if not verdict.small and not override:
        raise NotSmallError(f"action not small: {verdict.witness}", verdict)
    gd = group_data(desc)
    n = order(desc)
    lr = is_linearly_reductive(desc)
    out = []
    for std in gd.labels:
        d = gd.datum_for(std)
        if d is None:
            s_val = Fraction(0)
        else:
            s_val = Fraction(d.simple.dim, n * d.end_dim)
        out.append(LabelPrediction(std.label, rank * s_val, s_val, std.u))
    s_A = Fraction(1, n) if lr else Fraction(0)
    return Prediction(rank, n, lr, infinitesimal_e0(desc), verdict, out, s_A, reflexive_only)


# ----------------------------------------------------------------------
# measurement
# ----------------------------------------------------------------------
@dataclass
class ModuleChoice:
    """Which (G,S)-module L is pushed forward."""

    kind: str  # "S", "label", "matrices", "reflexive"
    label: str | None = None
    matrices: list | None = None
    rank: int = 1

    @classmethod
    def from_config(cls, raw) -> "ModuleChoice":
        if raw is None or raw == "S":
            return cls("S")
        if isinstance(raw, dict):
            if "label" in raw:
                return cls("label", label=str(raw["label"]))
            if "matrices" in raw:
                mats = raw["matrices"]
                dim = len(mats[0]) if mats else 1
                return cls("matrices", matrices=mats, rank=dim)
            if "reflexive_rank" in raw:
                return cls("reflexive", rank=int(raw["reflexive_rank"]))
        raise ConfigError(f"unsupported module choice {raw!r}")


def module_rank(desc: GroupSchemeDescriptor, choice: ModuleChoice) -> int:
    """S-rank of L; for a label this is dim P, since L = P (x) S."""
    if choice.kind == "label":
        return group_data(desc).label(choice.label).module.dim
    return choice.rank


def build_module(desc: GroupSchemeDescriptor, choice: ModuleChoice,
                 slice_cap: int = DEFAULT_SLICE_CAP) -> GradedEquivariantModule:
    if choice.kind == "S":
        return polynomial_ring_module(desc, slice_cap)
    if choice.kind == "label":
        std = group_data(desc).label(choice.label)
        return descriptor_standard_module(desc, std.module, 0, std.weight, slice_cap)
    if choice.kind == "matrices":
        H = desc.constant_group
        mats = [np.asarray(m, dtype=np.int64) % desc.field.q for m in choice.matrices]
        W = _make(H, mats, mats[0].shape[0] if mats else 1, "L")
        W.verify()
        return descriptor_standard_module(desc, W, 0, (), slice_cap)
    raise ConfigError("measured counts need a free module; reflexive modules get predictions only")


@dataclass
class ReportRow:
    e: int
    label: str
    per_shift: dict
    count: int
    normalized: Fraction
    predicted: Fraction

    @property
    def deviation(self) -> Fraction:
        return abs(self.normalized - self.predicted)

    def breakdown(self) -> str:
        return ";".join(f"{s}:{c}" for s, c in sorted(self.per_shift.items()) if c)


@dataclass
class FSigReport:
    prediction: Prediction
    rows: list = field(default_factory=list)
    accounted: dict = field(default_factory=dict)  # e -> sum count*u / (rank p^(de))
    trend: dict = field(default_factory=dict)  # label -> deviation non-increasing in e
    pipeline: str = ""
    truncated_at: int | None = None
    truncation_reason: str | None = None
    config_hash: str = ""
    timings: dict = field(default_factory=dict)

    def rows_for(self, label: str) -> list[ReportRow]:
        return [r for r in self.rows if r.label == label]

    def row(self, e: int, label: str) -> ReportRow:
        for r in self.rows:
            if r.e == e and r.label == label:
                return r
        raise KeyError((e, label))

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "pipeline": self.pipeline,
            "prediction": self.prediction.to_dict(),
            "rows": [{"e": r.e, "label": r.label, "shift_count_breakdown": r.breakdown(), "count": r.count,
                      "normalized": str(r.normalized), "predicted": str(r.predicted),
                      "deviation": str(r.deviation)} for r in self.rows],
            "accounted": {str(e): str(v) for e, v in sorted(self.accounted.items())},
            "complete": {str(e): v == 1 for e, v in sorted(self.accounted.items())},
            "trend_non_increasing": dict(sorted(self.trend.items())),
            "truncated_at": self.truncated_at,
            "truncation_reason": self.truncation_reason,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([self.config_hash, r.e, r.label, r.breakdown(), r.count, _fmt(r.normalized),
                        _fmt(r.predicted), _fmt(r.deviation)])
        return buf.getvalue()


def _fmt(x: Fraction) -> str:
    return f"{float(x):.6g}"


def _measure_one(desc: GroupSchemeDescriptor, choice: ModuleChoice, e: int, slice_cap: int,
                 pipeline: str) -> dict:
    """label -> (per_shift, total) at one e."""
    gd = group_data(desc)
    if pipeline == "diagmu":
        res = diagmu.veronese_summand_counts(desc.diag_orders, desc.diag_weights, desc.field.p, desc.dim, e)
        shifts = res.per_shift or {}
        return {diagmu.class_label(chi): (shifts.get(chi, {}), n) for chi, n in res.counts.items()}
    L = build_module(desc, choice, slice_cap)
    M = frobenius_pushforward(L, e, allow_infinitesimal=True)
    out = {}
    for std in gd.labels:
        sc = summand_count(std, M)
        out[std.label] = (sc.per_shift, sc.total)
    return out


def measure(desc: GroupSchemeDescriptor, e_values: Sequence[int], choice: ModuleChoice | None = None,
            slice_cap: int = DEFAULT_SLICE_CAP, threads: int | None = None,
            override: bool = False) -> FSigReport:
    choice = choice or ModuleChoice("S")
    choice = replace(choice, rank=module_rank(desc, choice))
    pred = predict(desc, choice.rank, override, reflexive_only=choice.kind == "reflexive")
    report = FSigReport(pred)
    if choice.kind == "reflexive":
        report.pipeline = "prediction-only"
        return report
    if not desc.has_constant and desc.has_diag and choice.kind == "S":
        pipeline = "diagmu"
    elif desc.has_diag:
        pipeline = "equivmod-weighted"
    else:
        pipeline = "equivmod"
    report.pipeline = pipeline
    threads = threads or worker_count()
    e_values = sorted(set(int(e) for e in e_values))
    results: dict[int, dict] = {}

    def run(e):
        t0 = time.perf_counter()
        res = _measure_one(desc, choice, e, slice_cap, pipeline)
        return e, res, time.perf_counter() - t0

    errors: dict[int, Exception] = {}
    if threads > 1 and len(e_values) > 1:
        group_data(desc)  # initialize shared data before fanning out
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run, e) for e in e_values]
            for e, fut in zip(e_values, futures):
                try:
                    _, res, dt = fut.result()
                    results[e] = res
                    report.timings[e] = dt
                except ResourceCapError as exc:
                    errors[e] = exc
    else:
        for e in e_values:
            try:
                _, res, dt = run(e)
                results[e] = res
                report.timings[e] = dt
            except ResourceCapError as exc:
                errors[e] = exc
                break
    if errors:
        first = min(errors)
        report.truncated_at = first
        report.truncation_reason = str(errors[first])
        results = {e: r for e, r in results.items() if e < first}
    p, d = desc.field.p, desc.dim
    u = {L.label: L.u for L in group_data(desc).labels}
    for e in sorted(results):
        total_gens = p ** (d * e)
        acc = Fraction(0)
        for label in sorted(results[e]):
            per_shift, n = results[e][label]
            row = ReportRow(e, label, dict(per_shift), n, Fraction(n, total_gens), pred.coefficient(label))
            report.rows.append(row)
            acc += n * u.get(label, 1)
        report.accounted[e] = acc / (choice.rank * total_gens)
    for label in sorted({r.label for r in report.rows}):
        devs = [r.deviation for r in report.rows_for(label)]
        report.trend[label] = all(b <= a for a, b in zip(devs, devs[1:]))
    return report


# ----------------------------------------------------------------------
# oracles on the generator level
# ----------------------------------------------------------------------
def generator_module(M: GradedEquivariantModule, D) -> KGModule:
    """The degree-D part of M / S_+ M as a KG-module."""
    D = Fraction(D)
    gens = [j for j, delta in enumerate(M.degrees) if delta == D]
    _, idx = M.slice(D)
    zero = (0,) * M.nvars
    pos = [idx[(j, zero)] for j in gens]
    mats = [M.slice_action(s, D)[np.ix_(pos, pos)] for s in range(len(M.group.generators))]
    return _make(M.group, mats, len(pos), f"gen[{D}]")


def generator_decomposition(M: GradedEquivariantModule, data=None) -> dict:
    """Indecomposable labels of every generator module M/S_+M in degree D."""
    data = data if data is not None else simples_and_projective_covers(M.group)
    out = {}
    for D in sorted(set(M.degrees)):
        dec = decompose_module(generator_module(M, D), data)
        out[D] = dec
    return out


def decompose_graded(M: GradedEquivariantModule, gd: GroupData) -> tuple[Counter, bool]:
    """Brute-force graded splitting: primitive idempotents of the degree-0
    endomorphism algebra acting on the slices at generator degrees, each
    summand classified by its generator module.  Only for small modules."""
    if M.orders:
        raise ValueError("graded splitting oracle supports constant groups only")
    F = M.field
    degs = sorted(set(M.degrees))
    sizes = [len(M.slice(D)[0]) for D in degs]
    offs = np.cumsum([0] + sizes)
    n = int(offs[-1])
    mats = []
    for h in graded_hom(M, M, 0):
        X = np.zeros((n, n), dtype=np.int64)
        for k, D in enumerate(degs):
            X[offs[k]:offs[k + 1], offs[k]:offs[k + 1]] = h.apply_to_slice(D)
        mats.append(X)
    idems = primitive_idempotents(F, mats, n)
    counts = Counter()
    complete = True
    zero = (0,) * M.nvars
    for e in idems:
        found = []
        for k, D in enumerate(degs):
            _, idx = M.slice(D)
            gens = [j for j, delta in enumerate(M.degrees) if delta == D]
            pos = [offs[k] + idx[(j, zero)] for j in gens]
            eb = e[np.ix_(pos, pos)]
            if eb.any():
                B = gf.column_basis(F, eb)
                found.append((D, generator_module(M, D).submodule(B)))
        label = None
        if len(found) == 1:
            D, X = found[0]
            for std in gd.labels:
                if X.dim == std.module.dim and is_isomorphic(std.module, X):
                    label = (std.label, D)
                    break
        if label is None:
            complete = False
            label = ("other", tuple(D for D, _ in found))
        counts[label] += 1
    return counts, complete


# ----------------------------------------------------------------------
# split copy of kG in low degrees
# ----------------------------------------------------------------------
@dataclass
class RegularSummandResult:
    found: bool
    r: int
    embedding: np.ndarray | None = None  # dim Z x |G|
    retraction: np.ndarray | None = None  # |G| x dim Z
    placements: list = field(default_factory=list)  # (label, degrees touched)
    verified: bool = False

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "r": self.r,
            "placements": [{"label": lab, "degrees": list(degs)} for lab, degs in self.placements],
            "verified": self.verified,
            "embedding": None if self.embedding is None else self.embedding.tolist(),
            "retraction": None if self.retraction is None else self.retraction.tolist(),
        }


def _truncated_symmetric_algebra(desc: GroupSchemeDescriptor, r: int) -> tuple[KGModule, list[int]]:
    from .invariants import InvariantRing
    ring = InvariantRing(desc)
    H = desc.constant_group
    mats = None
    degree_of = []
    for n in range(r + 1):
        Sn = ring.piece_module(n)
        degree_of += [n] * Sn.dim
        mats = Sn if mats is None else mats.direct_sum(Sn)
    Z = _make(H, list(mats.action), len(degree_of), f"S_<={r}")
    return Z, degree_of


def _find_splitting_pair(F, Q: KGModule, Z: KGModule):
    """alpha: Q -> Z and beta: Z -> Q with beta alpha invertible, if any.

    beta alpha lies in the local ring End(Q); its class mod the radical is
    bilinear in (alpha, beta), so if no basis pair works nothing does."""
    alphas = hom_space(Q, Z)
    betas = hom_space(Z, Q)
    for a in alphas:
        for b in betas:
            c = F.matmul(b, a)
            if gf.is_invertible(F, c):
                return a, b, c
    return None


def find_regular_summand(desc: GroupSchemeDescriptor, r_max: int) -> RegularSummandResult:
    """Smallest r <= r_max with kG a direct summand of S_0 + ... + S_r, with an
    explicit equivariant embedding and retraction."""
    if desc.has_diag:
        raise ConfigError("regular summand search needs a constant group")
    F = desc.field
    H = desc.constant_group
    kG = regular_module(H)
    parts = split_module(kG)
    gd = group_data(desc)
    C = np.hstack([X.basis for X in parts])
    for r in range(r_max + 1):
        Z, degree_of = _truncated_symmetric_algebra(desc, r)
        basis = np.eye(Z.dim, dtype=np.int64)  # current complement, columns in Z coords
        proj = np.eye(Z.dim, dtype=np.int64)  # Z -> coordinates on the complement
        alphas, betas, placements = [], [], []
        ok = True
        for Q in parts:
            cur = Z.submodule(basis) if basis.shape[1] else None
            pair = _find_splitting_pair(F, Q, cur) if cur is not None else None
            if pair is None:
                ok = False
                break
            a, b, c = pair
            b = F.matmul(gf.inverse(F, c), b)  # b a = 1
            a_full = F.matmul(basis, a)
            alphas.append(a_full)
            betas.append(F.matmul(b, proj))
            degs = sorted({degree_of[i] for i in np.flatnonzero(a_full.any(axis=1))})
            name = next((lab for lab in _labels_for(Q, gd)), "?")
            placements.append((name, degs))
            K = gf.kernel(F, b)
            rest = F.sub(F.eye(cur.dim), F.matmul(a, b))
            proj = F.matmul(gf.solve(F, K, rest), proj) if K.shape[1] else np.zeros((0, Z.dim), dtype=np.int64)
            basis = F.matmul(basis, K)
        if not ok:
            continue
        E = F.matmul(np.hstack(alphas), gf.inverse(F, C))
        R = F.matmul(C, np.vstack(betas))
        res = RegularSummandResult(True, r, E, R, placements)
        res.verified = _verify_split(F, kG, Z, E, R)
        if not res.verified:
            raise VerificationError("regular summand embedding failed verification")
        return res
    return RegularSummandResult(False, r_max)


def _labels_for(Q: KGModule, gd: GroupData):
    for std in gd.labels:
        if not std.weight or not any(std.weight):
            if Q.dim == std.module.dim and is_isomorphic(std.module, Q):
                yield std.label


def _verify_split(F, kG: KGModule, Z: KGModule, E: np.ndarray, R: np.ndarray) -> bool:
    if not np.array_equal(F.matmul(R, E), F.eye(kG.dim)):
        return False
    for a, z in zip(kG.action, Z.action):
        if not np.array_equal(F.matmul(E, a), F.matmul(z, E)):
            return False
        if not np.array_equal(F.matmul(R, z), F.matmul(a, R)):
            return False
    return True
