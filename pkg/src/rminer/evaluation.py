"""Evaluation against ground truth: rank-match tables, NDCG, ablation, sweep."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from sklearn.base import clone

from .heuristics import (
    HEURISTIC_IDS,
    SWEEP_ELIGIBLE,
    SWEEP_GRID,
    HeuristicScorer,
    revector,
)
from .model import LinkedCorpus, normalize_ws
from .ranking import RankedList, rank_corpus

RATIONALE_LABELS = (
    "consensus",
    "no_consensus",
    "lazy_consensus",
    "rough_consensus",
    "little_support",
    "majority",
    "no_majority",
    "bdfl_decree",
    "bdfl_pronouncement_after_no_consensus",
    "bdfl_pronouncement_over_majority",
    "inept_pep",
)

DECISIVE_STATES = ("accepted", "rejected")
RANK_TABLE_KS = (1, 2, 3, 4, 5, 10, 15, 30, 50, 100)
NDCG_KS = (5, 10, 15, 30, 50, 100)

# Order in which the coordinate sweep visits heuristics.
DEFAULT_SWEEP_ORDER = ("RFUTE", "TPCS", "DFSC", "DTIM", "SAMCER", "MT", "TPMS")


class GroundTruthError(ValueError):
    """Ground-truth file rejected (too many invalid rows or unreadable)."""


@dataclass(frozen=True)
class GroundTruthEntry:
    pep: int
    final_state: str
    message_id: str
    sentence_text: str
    rationale_label: str


@dataclass
class GroundTruthResult:
    entries: list[GroundTruthEntry] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def normalize_match_text(text: str) -> str:
    """Whitespace collapse plus trailing-punctuation strip, for text equality."""
    return normalize_ws(text).rstrip(".!?,;:")


def _gt_row_to_entry(row: dict, where: str) -> GroundTruthEntry:
    pep_raw = str(row.get("pep", "")).strip()
    try:
        pep = int(pep_raw)
    except ValueError:
        raise ValueError(f"{where}: bad pep number {pep_raw!r}")
    state = str(row.get("final_state", "")).strip().lower()
    if state not in DECISIVE_STATES:
        raise ValueError(f"{where}: final_state must be accepted/rejected, got {state!r}")
    label = str(row.get("label", row.get("rationale_label", ""))).strip().lower()
    if label not in RATIONALE_LABELS:
        raise ValueError(f"{where}: unknown rationale label {label!r}")
    message_id = str(row.get("message_id", "")).strip().strip("<>")
    if not message_id:
        raise ValueError(f"{where}: empty message_id")
    text = normalize_ws(str(row.get("sentence_text", "")))
    if not text:
        raise ValueError(f"{where}: empty sentence_text")
    return GroundTruthEntry(pep, state, message_id, text, label)


def load_ground_truth(path) -> GroundTruthResult:
    """Load and validate ground truth from CSV or JSON.

    Bad rows are reported individually; the whole file is rejected only when
    more than 10% of rows are invalid. Duplicate (pep, message_id, text)
    rows are dropped with a warning.
    """
    path = Path(path)
    result = GroundTruthResult()
    rows: list[tuple[str, dict]] = []
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise GroundTruthError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, list):
            raise GroundTruthError(f"{path}: expected a JSON array of rows")
        rows = [(f"{path}:item{i}", row) for i, row in enumerate(data)]
    else:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [(f"{path}:{lineno}", row)
                    for lineno, row in enumerate(csv.DictReader(fh), start=2)]

    seen: set[tuple] = set()
    for where, row in rows:
        try:
            entry = _gt_row_to_entry(row, where)
        except ValueError as exc:
            result.errors.append(str(exc))
            continue
        key = (entry.pep, entry.message_id, normalize_match_text(entry.sentence_text))
        if key in seen:
            result.warnings.append(f"{where}: duplicate entry for pep {entry.pep}")
            continue
        seen.add(key)
        result.entries.append(entry)

    total = len(rows)
    if total and len(result.errors) > 0.10 * total:
        raise GroundTruthError(
            f"{path}: {len(result.errors)}/{total} rows invalid (> 10%): "
            + "; ".join(result.errors[:5]))
    return result


# --- rank matching -------------------------------------------------------------

def match_rank(entry: GroundTruthEntry, ranked_list: RankedList) -> int | None:
    """Rank of the entry in a ranked list, or None when absent.

    Sentence lists match on (message_id, normalized text); message lists
    match on message_id alone.
    """
    if ranked_list.scheme == "mbs":
        for e in ranked_list.entries:
            if e.message_id == entry.message_id:
                return e.rank
        return None
    want = normalize_match_text(entry.sentence_text)
    for e in ranked_list.entries:
        if e.message_id == entry.message_id and e.text is not None \
                and normalize_match_text(e.text) == want:
            return e.rank
    return None


def _entry_rank(entry: GroundTruthEntry, rankings, scheme: str) -> int | None:
    per_scheme = rankings.get(entry.pep)
    if not per_scheme or scheme not in per_scheme:
        return None
    return match_rank(entry, per_scheme[scheme])


@dataclass
class RankMatchRow:
    counts: dict[int, int] = field(default_factory=dict)  # cumulative per k
    over_100: int = 0
    no_match: int = 0
    total: int = 0

    def pct(self, count: int) -> float:
        return round(100.0 * count / self.total, 1) if self.total else 0.0


@dataclass
class RankMatchTable:
    rows: dict[tuple[str, str], RankMatchRow] = field(default_factory=dict)
    ks: tuple = RANK_TABLE_KS


def rank_match_table(entries, rankings, ks=RANK_TABLE_KS) -> RankMatchTable:
    """Cumulative match counts at each cutoff, per (scheme, final_state)."""
    table = RankMatchTable(ks=tuple(ks))
    for scheme in ("sbs", "mbs"):
        for state in DECISIVE_STATES:
            table.rows[(scheme, state)] = RankMatchRow(
                counts={k: 0 for k in table.ks})
    for entry in entries:
        for scheme in ("sbs", "mbs"):
            row = table.rows[(scheme, entry.final_state)]
            row.total += 1
            rank = _entry_rank(entry, rankings, scheme)
            if rank is None:
                row.no_match += 1
                continue
            if rank > max(table.ks):
                row.over_100 += 1
            for k in table.ks:
                if rank <= k:
                    row.counts[k] += 1
    return table


# --- NDCG -----------------------------------------------------------------------

@dataclass
class NdcgRow:
    k: int
    dcg: float
    idcg: float
    ndcg: float
    undefined: bool = False  # set when there are no relevant items at all


def _log_discount(position: int) -> float:
    return math.log2(position + 1)


def ndcg_at_k(ranked_list: RankedList, relevant_ids, k: int,
              n_relevant: int | None = None) -> NdcgRow:
    """Binary-relevance NDCG at cutoff k.

    relevant_ids holds (message_id, sentence_index) pairs for sentence lists
    and message_ids for message lists. n_relevant overrides the ideal pool
    size when some relevant items cannot appear in the list at all.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    relevant_ids = set(relevant_ids)
    total_relevant = len(relevant_ids) if n_relevant is None else n_relevant
    gains = []
    for e in ranked_list.entries[:k]:
        item = e.message_id if ranked_list.scheme == "mbs" \
            else (e.message_id, e.sentence_index)
        if item in relevant_ids:
            gains.append(1.0 / _log_discount(e.rank))
    # fsum on both sides so a perfect ranking divides identical sums to 1.0
    dcg = math.fsum(gains)
    idcg = math.fsum(1.0 / _log_discount(i)
                     for i in range(1, min(total_relevant, k) + 1))
    if idcg == 0.0:
        return NdcgRow(k=k, dcg=dcg, idcg=0.0, ndcg=0.0, undefined=True)
    return NdcgRow(k=k, dcg=dcg, idcg=idcg, ndcg=dcg / idcg)


@dataclass
class PepNdcg:
    pep: int
    scheme: str
    final_state: str
    rows: list[NdcgRow]

    def value_at(self, k: int) -> NdcgRow | None:
        for row in self.rows:
            if row.k == k:
                return row
        return None


def _relevant_ids_for(entries, ranked_list: RankedList):
    """Resolve ground-truth entries to ranked-item ids; unmatched entries
    contribute to the ideal pool size but not to the id set."""
    if ranked_list.scheme == "mbs":
        wanted = {e.message_id for e in entries}
        return wanted, len(wanted)
    ids = set()
    for entry in entries:
        want = normalize_match_text(entry.sentence_text)
        for e in ranked_list.entries:
            if e.message_id == entry.message_id and e.text is not None \
                    and normalize_match_text(e.text) == want:
                ids.add((e.message_id, e.sentence_index))
                break
    return ids, len(entries)


def evaluate_ndcg(entries, rankings, ks=NDCG_KS) -> list[PepNdcg]:
    """Per (proposal, scheme) NDCG curves for proposals with ground truth."""
    by_pep: dict[int, list[GroundTruthEntry]] = {}
    for entry in entries:
        by_pep.setdefault(entry.pep, []).append(entry)
    out: list[PepNdcg] = []
    for pep in sorted(by_pep):
        pep_entries = by_pep[pep]
        state = pep_entries[0].final_state
        per_scheme = rankings.get(pep, {})
        for scheme in ("sbs", "mbs"):
            ranked = per_scheme.get(scheme)
            if ranked is None:
                ranked = RankedList(pep=pep, scheme=scheme, entries=[])
            relevant, n_relevant = _relevant_ids_for(pep_entries, ranked)
            rows = [ndcg_at_k(ranked, relevant, k, n_relevant) for k in ks]
            out.append(PepNdcg(pep=pep, scheme=scheme, final_state=state, rows=rows))
    return out


def average_ndcg(per_pep: list[PepNdcg], ks=NDCG_KS) -> dict:
    """Unweighted mean NDCG per (scheme, final_state); undefined rows excluded."""
    sums: dict[tuple, dict[int, list[float]]] = {}
    for item in per_pep:
        cell = sums.setdefault((item.scheme, item.final_state),
                               {k: [] for k in ks})
        for row in item.rows:
            if row.k in cell and not row.undefined:
                cell[row.k].append(row.ndcg)
    return {
        cell: {k: (math.fsum(vals) / len(vals) if vals else 0.0)
               for k, vals in per_k.items()}
        for cell, per_k in sums.items()
    }


# --- objective shared by ablation and sweep ---------------------------------------

CELLS = tuple((scheme, state) for scheme in ("sbs", "mbs")
              for state in DECISIVE_STATES)


def top_k_counts(entries, rankings, k: int = 5) -> dict[tuple, int]:
    counts = {cell: 0 for cell in CELLS}
    for entry in entries:
        for scheme in ("sbs", "mbs"):
            rank = _entry_rank(entry, rankings, scheme)
            if rank is not None and rank <= k:
                counts[(scheme, entry.final_state)] += 1
    return counts


def _counts_under(scored, entries, sweep_delta, disabled, k=5,
                  min_score: float = 0.0) -> dict[tuple, int]:
    rankings = rank_corpus(revector(scored, sweep_delta, disabled),
                           "both", min_score)
    return top_k_counts(entries, rankings, k)


# --- ablation ---------------------------------------------------------------------

@dataclass
class AblationRow:
    heuristic: str
    deltas: dict[tuple, int]
    influence: str


@dataclass
class AblationTable:
    baseline: dict[tuple, int]
    rows: list[AblationRow] = field(default_factory=list)


def classify_influence(deltas) -> str:
    """Grouping rule: mixed when signs differ, strength from max magnitude."""
    values = list(deltas)
    has_pos = any(v > 0 for v in values)
    has_neg = any(v < 0 for v in values)
    strong = any(abs(v) >= 4 for v in values)
    if has_pos and has_neg:
        return "mixed_strong" if strong else "mixed_weak"
    if strong:
        return "positive_strong"
    if any(abs(v) >= 2 for v in values):
        return "positive_medium"
    return "none"


def ablation(corpus: LinkedCorpus, scorer: HeuristicScorer | None,
             entries, k: int = 5) -> AblationTable:
    """Leave-one-out heuristic impact on top-k cumulative counts.

    Components are independent and the final score additive, so the scored
    bases are computed once and re-summed per disabled heuristic.
    """
    scorer = scorer if scorer is not None else HeuristicScorer()
    scorer.fit(corpus)
    scored = scorer.transform(corpus)
    baseline = _counts_under(scored, entries, scorer.sweep_delta_,
                             scorer.disabled_, k)
    table = AblationTable(baseline=baseline)
    for h in HEURISTIC_IDS:
        counts = _counts_under(scored, entries, scorer.sweep_delta_,
                               scorer.disabled_ | {h}, k)
        deltas = {cell: counts[cell] - baseline[cell] for cell in CELLS}
        table.rows.append(AblationRow(
            heuristic=h,
            deltas=deltas,
            influence=classify_influence(deltas.values()),
        ))
    return table


# --- parameter sweep ---------------------------------------------------------------

@dataclass
class SweepCell:
    heuristic: str
    delta: float
    objective: int


@dataclass
class SweepResult:
    best_sweep_delta: dict[str, float]
    best_scorer: HeuristicScorer
    objective_start: int
    objective_best: int
    cells: list[SweepCell] = field(default_factory=list)
    steps: list[tuple[str, float, int]] = field(default_factory=list)


def parameter_sweep(corpus: LinkedCorpus, scorer: HeuristicScorer | None,
                    entries, heuristics=None, allow_ineligible: bool = False,
                    k: int = 5) -> SweepResult:
    """Coordinate-wise delta search over the five-value grid.

    One heuristic at a time, holding the others fixed; keeps the delta with
    the best total top-k count (ties prefer the smaller magnitude, then the
    smaller value). The incumbent delta is always a candidate, so the
    objective never decreases.
    """
    order = tuple(heuristics) if heuristics is not None else DEFAULT_SWEEP_ORDER
    unknown = set(order) - set(HEURISTIC_IDS)
    if unknown:
        raise ValueError(f"unknown heuristics: {sorted(unknown)}")
    ineligible = set(order) - SWEEP_ELIGIBLE
    if ineligible and not allow_ineligible:
        raise ValueError(
            f"heuristics outside the sweep-eligible set: {sorted(ineligible)} "
            f"(eligible: {sorted(SWEEP_ELIGIBLE)})")

    scorer = scorer if scorer is not None else HeuristicScorer(sweep_delta={})
    scorer.fit(corpus)
    scored = scorer.transform(corpus)
    disabled = scorer.disabled_
    deltas = dict(scorer.sweep_delta_)

    def objective(trial: dict) -> int:
        return sum(_counts_under(scored, entries, trial, disabled, k).values())

    result = SweepResult(
        best_sweep_delta={},
        best_scorer=scorer,
        objective_start=objective(deltas),
        objective_best=0,
    )
    for h in order:
        current = deltas.get(h, 0.0)
        candidates = list(SWEEP_GRID)
        if all(abs(current - c) > 1e-9 for c in candidates):
            candidates.append(current)
        best_key = None
        best_delta = current
        for delta in candidates:
            obj = objective({**deltas, h: delta})
            result.cells.append(SweepCell(heuristic=h, delta=delta, objective=obj))
            key = (-obj, abs(delta), delta)
            if best_key is None or key < best_key:
                best_key = key
                best_delta = delta
        deltas[h] = best_delta
        result.steps.append((h, best_delta, -best_key[0]))

    result.best_sweep_delta = deltas
    result.objective_best = objective(deltas)
    result.best_scorer = clone(scorer).set_params(sweep_delta=dict(deltas))
    return result


# --- consistency checks (CLI exit-1 contract) ---------------------------------------

def verify_evaluation(entries, rankings, table: RankMatchTable,
                      ndcg_rows: list[PepNdcg]) -> list[str]:
    """Cross-checks the computed artifacts; returns violation strings."""
    problems: list[str] = []
    for cell, row in table.rows.items():
        ordered = [row.counts[k] for k in table.ks]
        if ordered != sorted(ordered):
            problems.append(f"{cell}: counts not monotone in k")
        if ordered and ordered[-1] + row.over_100 + row.no_match != row.total:
            problems.append(f"{cell}: counts + over_100 + no_match != total")
    for item in ndcg_rows:
        for row in item.rows:
            if not row.undefined and not 0.0 <= row.ndcg <= 1.0 + 1e-9:
                problems.append(
                    f"pep {item.pep} {item.scheme}: NDCG@{row.k} out of range")
    for entry in entries:
        sbs = _entry_rank(entry, rankings, "sbs")
        mbs = _entry_rank(entry, rankings, "mbs")
        if sbs is not None and (mbs is None or mbs > sbs):
            problems.append(
                f"pep {entry.pep} {entry.message_id}: message rank "
                f"{mbs} worse than sentence rank {sbs}")
    return problems


# --- CSV emission --------------------------------------------------------------------

_TABLE_CELLS = (("sbs", "accepted"), ("sbs", "rejected"),
                ("mbs", "accepted"), ("mbs", "rejected"))


def write_rank_match_csv(table: RankMatchTable, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["rank"]
        for scheme, state in _TABLE_CELLS:
            header += [f"{scheme}_{state}_count", f"{scheme}_{state}_pct"]
        writer.writerow(header)
        for k in table.ks:
            row = [f"top_{k}"]
            for cell in _TABLE_CELLS:
                r = table.rows[cell]
                row += [r.counts[k], r.pct(r.counts[k])]
            writer.writerow(row)
        for label, attr in (("over_100", "over_100"), ("no_match", "no_match")):
            row = [label]
            for cell in _TABLE_CELLS:
                r = table.rows[cell]
                value = getattr(r, attr)
                row += [value, r.pct(value)]
            writer.writerow(row)
        row = ["total"]
        for cell in _TABLE_CELLS:
            row += [table.rows[cell].total, ""]
        writer.writerow(row)


def write_ndcg_csv(per_pep: list[PepNdcg], averages: dict, path,
                   ks=NDCG_KS) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scope", "pep", "scheme", "final_state", "k",
                         "dcg", "idcg", "ndcg", "undefined"])
        for item in per_pep:
            for row in item.rows:
                writer.writerow([
                    "pep", item.pep, item.scheme, item.final_state, row.k,
                    f"{row.dcg:.6f}", f"{row.idcg:.6f}", f"{row.ndcg:.6f}",
                    int(row.undefined),
                ])
        for (scheme, state), per_k in sorted(averages.items()):
            for k in ks:
                writer.writerow([
                    "average", "", scheme, state, k,
                    "", "", f"{per_k[k]:.6f}", 0,
                ])


def write_ablation_csv(table: AblationTable, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["heuristic", "sbs_accepted", "sbs_rejected",
                         "mbs_accepted", "mbs_rejected", "influence"])
        for row in table.rows:
            writer.writerow([
                row.heuristic,
                row.deltas[("sbs", "accepted")],
                row.deltas[("sbs", "rejected")],
                row.deltas[("mbs", "accepted")],
                row.deltas[("mbs", "rejected")],
                row.influence,
            ])
        writer.writerow([
            "baseline",
            table.baseline[("sbs", "accepted")],
            table.baseline[("sbs", "rejected")],
            table.baseline[("mbs", "accepted")],
            table.baseline[("mbs", "rejected")],
            "",
        ])


def write_sweep_csv(result: SweepResult, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["heuristic", "delta", "objective"])
        for cell in result.cells:
            writer.writerow([cell.heuristic, cell.delta, cell.objective])
