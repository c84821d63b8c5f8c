"""Label exact-match rate and character error rate against OCR output.

Both metrics are case-insensitive and whitespace-normalized: all runs of
whitespace (including line breaks inside a label) collapse to single
spaces before comparison.

LEM counts a label as found iff its normalized form occurs as a substring
of the normalized concatenated OCR text. CER matches each expected label
independently against the closest OCR candidate (tokens plus contiguous
n-grams up to three tokens), caps each distance at the label's length so a
fully missing label contributes exactly its length, and normalizes by the
total expected character count; an optional assignment mode forbids two
labels from consuming the same candidate.
"""

from __future__ import annotations

from collections.abc import Sequence

from cage.metrics.ocr import OcrResult

CER_MAX_NGRAM = 3


def normalize_text(s: str) -> str:
    """Case-fold and collapse internal whitespace to single spaces."""
    return " ".join(s.casefold().split())


def levenshtein(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute edit distance."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1,        # delete
                               current[j - 1] + 1,     # insert
                               previous[j - 1] + cost))  # substitute
        previous = current
    return previous[-1]


def _ocr_text(ocr: OcrResult | str) -> str:
    return ocr if isinstance(ocr, str) else ocr.concatenated_text


def _ocr_tokens(ocr: OcrResult | Sequence[str]) -> list[str]:
    if isinstance(ocr, OcrResult):
        return ocr.token_texts
    return list(ocr)


def lem_counts(labels: Sequence[str], ocr: OcrResult | str) -> tuple[int, int]:
    """(labels found, labels total); pool these to aggregate across images."""
    if not labels:
        raise ValueError("labels must be non-empty")
    text = normalize_text(_ocr_text(ocr))
    hits = sum(1 for label in labels if normalize_text(label) in text)
    return hits, len(labels)


def lem(labels: Sequence[str], ocr: OcrResult | str) -> float:
    """Fraction of labels found verbatim (after normalization) in the OCR text."""
    hits, total = lem_counts(labels, ocr)
    return hits / total


def candidate_strings(tokens: Sequence[str], max_ngram: int = CER_MAX_NGRAM) -> list[str]:
    """Normalized tokens plus contiguous space-joined n-grams up to max_ngram."""
    normalized = [normalize_text(t) for t in tokens]
    out: list[str] = []
    seen: set[str] = set()
    for n in range(1, max_ngram + 1):
        for i in range(len(normalized) - n + 1):
            cand = " ".join(normalized[i:i + n])
            if cand not in seen:
                seen.add(cand)
                out.append(cand)
    return out


def cer_counts(labels: Sequence[str], ocr: OcrResult | Sequence[str],
               max_ngram: int = CER_MAX_NGRAM) -> tuple[int, int]:
    """(summed capped distance, summed label length); poolable across images."""
    if not labels:
        raise ValueError("labels must be non-empty")
    folded = [normalize_text(label) for label in labels]
    lengths = [len(f) for f in folded]
    if sum(lengths) == 0:
        raise ValueError("labels normalize to empty strings")
    candidates = candidate_strings(_ocr_tokens(ocr), max_ngram)
    if not candidates:
        return sum(lengths), sum(lengths)  # every label missing, capped at its length
    total = 0
    for f, cap in zip(folded, lengths):
        best = min(levenshtein(f, cand) for cand in candidates)
        total += min(best, cap)
    return total, sum(lengths)


def cer(labels: Sequence[str], ocr: OcrResult | Sequence[str],
        max_ngram: int = CER_MAX_NGRAM, assignment: bool = False) -> float:
    """Summed capped edit distance to closest OCR candidates over total label chars.

    With ``assignment=True`` candidates are consumed at most once via a
    minimum-cost matching (sensitivity analysis); the default independent
    minimization allows candidate reuse and upper-bounds any assignment.
    """
    if not assignment:
        distance, total_len = cer_counts(labels, ocr, max_ngram)
        return distance / total_len

    if not labels:
        raise ValueError("labels must be non-empty")
    folded = [normalize_text(label) for label in labels]
    lengths = [len(f) for f in folded]
    if sum(lengths) == 0:
        raise ValueError("labels normalize to empty strings")
    candidates = candidate_strings(_ocr_tokens(ocr), max_ngram)
    if not candidates:
        return 1.0  # every label missing, each capped at its own length

    # Minimum-cost matching: pad with per-label "miss" columns priced at the
    # cap so unmatched labels fall back to full-length cost.
    import numpy as np
    from scipy.optimize import linear_sum_assignment

    n, m = len(folded), len(candidates)
    big = max(lengths) + 1
    cost = np.full((n, m + n), float(big))
    for i, (f, cap) in enumerate(zip(folded, lengths)):
        for j, cand in enumerate(candidates):
            cost[i, j] = min(levenshtein(f, cand), cap)
        cost[i, m + i] = cap
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum()) / sum(lengths)
