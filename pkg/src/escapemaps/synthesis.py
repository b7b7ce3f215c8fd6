"""Constructing interval maps realizing prescribed transition data.

The inverse problem: given a primitive 0/1 transition matrix and an escape
block saying which branches reach which gaps, build a piecewise-affine map
whose recomputed matrices equal the inputs exactly.

Feasibility is combinatorial: an affine image is an interval, so the unit
entries of each row — Markov targets and gap targets merged in interleaved
symbol order — must form a contiguous segment.  In ``strict`` mode segments
must start and end at Markov symbols (branch images are then exact unions of
intervals and fully covered gaps); ``partial`` mode lets a segment end at a
gap symbol, realized by covering that gap up to its midpoint.  Either way
every gap's interior must end up covered by the branch images, which needs an
interior occurrence or partial occurrences from both sides.

Widths come from the Perron eigenvector of the transition matrix (power
iteration, snapped to small-denominator rationals); expansion is then
re-verified exactly, so floating point never leaks into the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import InfeasibleSpecError, MapFormatError, WidthSnapError
from .maps import AffineBranch, MarkovMap, ValidationReport
from .rationals import format_rational
from .transitions import (
    Matrix,
    as_binary_matrix,
    gap_symbol,
    is_primitive,
    markov_symbol,
    transition_data,
)

STRICT = "strict"
PARTIAL = "partial"

SNAP_DENOMINATOR = 10**6
SNAP_RETRIES = 3
POWER_TOLERANCE = 1e-12
POWER_ITERATION_CAP = 10**6


@dataclass(frozen=True)
class SynthesisSpec:
    """Target transition matrix, escape block, and coverage mode.

    ``escape`` is n x m (m may be 0).  ``gap_positions`` assigns escape
    column k to the gap between intervals p_k and p_k + 1; None asks the
    planner to pick the first workable placement."""

    markov: Matrix
    escape: Matrix
    gap_positions: tuple[int, ...] | None = None
    mode: str = STRICT

    def __post_init__(self) -> None:
        markov = as_binary_matrix(self.markov)
        object.__setattr__(self, "markov", markov)
        n = len(markov)
        escape = self.escape
        if not isinstance(escape, Sequence) or len(escape) != n:
            raise MapFormatError("escape block needs one row per interval")
        widths = {len(row) for row in escape} if escape else set()
        if len(widths) > 1:
            raise MapFormatError("escape block rows must be equally long")
        for row in escape:
            for entry in row:
                if isinstance(entry, bool) or entry not in (0, 1):
                    raise MapFormatError(
                        f"escape block entries must be 0 or 1, got {entry!r}"
                    )
        object.__setattr__(
            self, "escape", tuple(tuple(int(e) for e in row) for row in escape)
        )
        if self.gap_positions is not None:
            positions = tuple(int(p) for p in self.gap_positions)
            if len(positions) != self.m:
                raise MapFormatError(
                    "gap_positions must list one position per escape column"
                )
            if any(not 1 <= p <= n - 1 for p in positions):
                raise MapFormatError(
                    f"gap positions must lie in 1..{n - 1} "
                    f"(between consecutive intervals)"
                )
            if any(a >= b for a, b in itertools.pairwise(positions)):
                raise MapFormatError("gap positions must be strictly increasing")
            object.__setattr__(self, "gap_positions", positions)
        if self.mode not in (STRICT, PARTIAL):
            raise MapFormatError(
                f"mode must be '{STRICT}' or '{PARTIAL}', got {self.mode!r}"
            )

    @property
    def n(self) -> int:
        return len(self.markov)

    @property
    def m(self) -> int:
        return len(self.escape[0]) if self.escape and self.escape[0] else 0


# -- interleaved layout helpers -----------------------------------------


def _columns(n: int, positions: Sequence[int]) -> list[tuple[str, int]]:
    """Column plan in interleaved symbol order: ("markov", j) entries with
    ("gap", column_index) slotted in after each listed position."""
    slot = {p: col for col, p in enumerate(positions)}
    out: list[tuple[str, int]] = []
    for j in range(1, n + 1):
        out.append(("markov", j))
        if j in slot:
            out.append(("gap", slot[j]))
    return out


def _column_symbol(kind: str, idx: int, positions: Sequence[int]) -> str:
    if kind == "markov":
        return markov_symbol(idx)
    return gap_symbol(positions[idx])


def _row_units(
    markov_row: Sequence[int],
    escape_row: Sequence[int],
    columns: Sequence[tuple[str, int]],
) -> list[int]:
    units = []
    for pos, (kind, idx) in enumerate(columns):
        value = markov_row[idx - 1] if kind == "markov" else escape_row[idx]
        if value:
            units.append(pos)
    return units


@dataclass(frozen=True)
class RowSegment:
    """Contiguous target segment of one row, as interleaved symbols."""

    row: int
    symbols: tuple[str, ...]


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    mode: str
    positions: tuple[int, ...]
    structure_issues: tuple[str, ...]
    row_issues: tuple[str, ...]
    column_issues: tuple[str, ...]
    segments: tuple[RowSegment, ...]

    def to_jsonable(self) -> dict:
        return {
            "feasible": self.feasible,
            "mode": self.mode,
            "gap_positions": list(self.positions),
            "structure_issues": list(self.structure_issues),
            "row_issues": list(self.row_issues),
            "column_issues": list(self.column_issues),
            "segments": [
                {"row": seg.row, "symbols": list(seg.symbols)}
                for seg in self.segments
            ],
        }


def _layout_issues(
    markov: Matrix,
    escape: Matrix,
    positions: Sequence[int],
    mode: str,
) -> tuple[list[str], list[str], list[RowSegment]]:
    n = len(markov)
    columns = _columns(n, positions)
    row_issues: list[str] = []
    segments: list[RowSegment] = []
    runs: list[list[int]] = []
    for i in range(1, n + 1):
        units = _row_units(markov[i - 1], escape[i - 1], columns)
        runs.append(units)
        symbols = tuple(
            _column_symbol(*columns[pos], positions) for pos in units
        )
        if not units:
            row_issues.append(f"row {i} has no targets")
            continue
        if units != list(range(units[0], units[-1] + 1)):
            row_issues.append(
                f"targets of row {i} are not contiguous in symbol order: "
                + " ".join(symbols)
            )
            continue
        if all(columns[pos][0] == "gap" for pos in units):
            row_issues.append(
                f"row {i} targets only an escape symbol; its image would "
                f"collapse to a point"
            )
            continue
        segments.append(RowSegment(i, symbols))
        if mode == STRICT:
            for end in dict.fromkeys((units[0], units[-1])):
                kind, idx = columns[end]
                if kind == "gap":
                    row_issues.append(
                        f"row {i} segment ends at escape symbol "
                        f"{gap_symbol(positions[idx])}; strict mode requires "
                        f"Markov symbols at both ends"
                    )

    column_issues: list[str] = []
    for col, p in enumerate(positions):
        gap_pos = columns.index(("gap", col))
        interior = left_end = right_end = False
        for units in runs:
            if gap_pos not in units or not units:
                continue
            if units == list(range(units[0], units[-1] + 1)):
                if units[0] < gap_pos < units[-1]:
                    interior = True
                elif gap_pos == units[0] and gap_pos != units[-1]:
                    left_end = True
                elif gap_pos == units[-1] and gap_pos != units[0]:
                    right_end = True
        if not (interior or (left_end and right_end)):
            column_issues.append(
                f"the gap at position {p} ({gap_symbol(p)}) would not be fully "
                f"covered by the branch images: it needs a branch whose segment "
                f"contains it strictly inside, or partial branches reaching it "
                f"from both sides"
            )
    return row_issues, column_issues, segments


def auto_gap_positions(
    markov: Matrix, escape: Matrix, mode: str
) -> tuple[int, ...] | None:
    """First placement (in lexicographic order) of the escape columns into the
    n-1 inter-interval slots that makes every row and column workable, or None
    when no placement does."""
    n = len(markov)
    m = len(escape[0]) if escape and escape[0] else 0
    for combo in itertools.combinations(range(1, n), m):
        rows, cols, _ = _layout_issues(markov, escape, combo, mode)
        if not rows and not cols:
            return combo
    return None


def feasibility_check(spec: SynthesisSpec) -> FeasibilityReport:
    """Decide whether the spec is realizable, with per-row and per-column
    diagnostics.  Never raises; infeasibility is data."""
    structure: list[str] = []
    prim = is_primitive(spec.markov)
    if not prim.primitive:
        if prim.zero_entry is None:
            structure.append("transition matrix is not primitive")
        else:
            r, c = prim.zero_entry
            structure.append(
                f"transition matrix is not primitive: entry ({r}, {c}) of the "
                f"Wielandt-bound power is still zero"
            )
    for col in range(spec.m):
        if all(spec.escape[i][col] == 0 for i in range(spec.n)):
            structure.append(
                f"escape column {col + 1} is all zero; no branch would ever "
                f"reach that gap"
            )
    if spec.m > spec.n - 1:
        structure.append(
            f"{spec.m} escape columns cannot be placed into {spec.n - 1} "
            f"inter-interval slots"
        )

    positions = spec.gap_positions
    row_issues: list[str] = []
    column_issues: list[str] = []
    segments: list[RowSegment] = []
    if positions is None:
        if spec.m <= max(spec.n - 1, 0):
            found = auto_gap_positions(spec.markov, spec.escape, spec.mode)
        else:
            found = None
        if found is None:
            positions = ()
            if spec.m > 0:
                structure.append(
                    "no placement of the escape columns makes every row "
                    "contiguous and every gap covered"
                )
            else:
                rows, cols, segs = _layout_issues(
                    spec.markov, spec.escape, (), spec.mode
                )
                row_issues, column_issues, segments = rows, cols, segs
                positions = ()
        else:
            positions = found
            row_issues, column_issues, segments = _layout_issues(
                spec.markov, spec.escape, positions, spec.mode
            )
    else:
        row_issues, column_issues, segments = _layout_issues(
            spec.markov, spec.escape, positions, spec.mode
        )

    feasible = not (structure or row_issues or column_issues)
    return FeasibilityReport(
        feasible=feasible,
        mode=spec.mode,
        positions=tuple(positions),
        structure_issues=tuple(structure),
        row_issues=tuple(row_issues),
        column_issues=tuple(column_issues),
        segments=tuple(segments),
    )


# -- width allocation ----------------------------------------------------


@dataclass(frozen=True)
class WidthAllocation:
    """Interval and gap widths summing to 1 (ambient [0, 1]), with the
    floating-point eigenvalue estimate they were snapped from."""

    markov_widths: tuple[Fraction, ...]
    escape_widths: tuple[Fraction, ...]
    perron_estimate: float
    perron_error_bound: float

    def to_jsonable(self) -> dict:
        return {
            "markov_widths": [format_rational(w) for w in self.markov_widths],
            "escape_widths": [format_rational(w) for w in self.escape_widths],
            "perron_estimate": self.perron_estimate,
            "perron_error_bound": self.perron_error_bound,
        }


def _row_spans(
    markov: Matrix,
    escape: Matrix,
    positions: Sequence[int],
    markov_widths: Sequence[Fraction],
    escape_widths: Sequence[Fraction],
) -> list[Fraction]:
    """Exact image-span length of each row under the given widths: full
    widths for Markov targets and interior gaps, half for a gap at either
    segment end."""
    n = len(markov)
    columns = _columns(n, positions)
    spans = []
    for i in range(1, n + 1):
        units = _row_units(markov[i - 1], escape[i - 1], columns)
        total = Fraction(0)
        for pos in units:
            kind, idx = columns[pos]
            if kind == "markov":
                total += markov_widths[idx - 1]
            elif pos in (units[0], units[-1]):
                total += escape_widths[idx] / 2
            else:
                total += escape_widths[idx]
        spans.append(total)
    return spans


def perron_widths(
    markov: Matrix,
    escape: Matrix,
    positions: Sequence[int],
    mode: str,
    *,
    snap_denominator: int = SNAP_DENOMINATOR,
    tolerance: float = POWER_TOLERANCE,
    iteration_cap: int = POWER_ITERATION_CAP,
) -> WidthAllocation:
    """Interval widths proportional to the Perron eigenvector, snapped to
    rationals and verified exactly: each row's image span must strictly
    exceed its width (that quotient is the branch slope).  Gap widths are a
    quarter of the smallest interval width.  Snapping retries with doubled
    denominators before giving up."""
    n = len(markov)
    a = np.array(markov, dtype=float)
    if not np.all(a.sum(axis=1) > 0):
        raise WidthSnapError("transition matrix has a zero row")
    v = np.full(n, 1.0 / n)
    low, high = 0.0, float("inf")
    for _ in range(iteration_cap):
        w = a @ v
        ratios = w / v
        low, high = float(ratios.min()), float(ratios.max())
        v = w / w.sum()
        if high - low < tolerance:
            break
    estimate = (low + high) / 2

    m = len(positions)
    denominator = snap_denominator
    for _ in range(SNAP_RETRIES + 1):
        widths = [Fraction(x).limit_denominator(denominator) for x in v]
        if all(w > 0 for w in widths):
            gap = min(widths) / 4
            gaps = [gap] * m
            spans = _row_spans(markov, escape, positions, widths, gaps)
            if all(span > width for span, width in zip(spans, widths)):
                total = sum(widths) + sum(gaps)
                return WidthAllocation(
                    tuple(w / total for w in widths),
                    tuple(g / total for g in gaps),
                    estimate,
                    high - low,
                )
        denominator *= 2
    raise WidthSnapError(
        f"could not snap the eigenvector estimate {v.tolist()} to rational "
        f"widths with exact expansion (denominators up to {denominator // 2})"
    )


# -- construction --------------------------------------------------------


@dataclass(frozen=True)
class SynthesisResult:
    map: MarkovMap
    spec: SynthesisSpec
    positions: tuple[int, ...]
    allocation: WidthAllocation
    feasibility: FeasibilityReport
    validation: ValidationReport


def synthesize(
    spec: SynthesisSpec, *, allocation: WidthAllocation | None = None
) -> SynthesisResult:
    """Build a map realizing the spec exactly.

    Raises InfeasibleSpecError (carrying the report) when the spec cannot be
    realized and WidthSnapError when no workable widths are found.  A
    precomputed ``allocation`` may be supplied (e.g. reused across specs that
    share a transition matrix); its expansion margin is re-verified exactly
    for this spec.  The recomputed matrices of the result are asserted equal
    to the inputs before returning."""
    report = feasibility_check(spec)
    if not report.feasible:
        raise InfeasibleSpecError(report)
    positions = report.positions
    if allocation is None:
        allocation = perron_widths(spec.markov, spec.escape, positions, spec.mode)
    else:
        spans = _row_spans(
            spec.markov,
            spec.escape,
            positions,
            allocation.markov_widths,
            allocation.escape_widths,
        )
        if not all(
            span > width for span, width in zip(spans, allocation.markov_widths)
        ):
            raise WidthSnapError(
                "supplied width allocation violates the exact expansion check "
                "for this spec"
            )

    columns = _columns(spec.n, positions)
    cursor = Fraction(0)
    interval_bounds: dict[int, tuple[Fraction, Fraction]] = {}
    gap_bounds: dict[int, tuple[Fraction, Fraction]] = {}
    for kind, idx in columns:
        width = (
            allocation.markov_widths[idx - 1]
            if kind == "markov"
            else allocation.escape_widths[idx]
        )
        if kind == "markov":
            interval_bounds[idx] = (cursor, cursor + width)
        else:
            gap_bounds[idx] = (cursor, cursor + width)
        cursor += width

    branches = []
    for i in range(1, spec.n + 1):
        units = _row_units(spec.markov[i - 1], spec.escape[i - 1], columns)
        first_kind, first_idx = columns[units[0]]
        last_kind, last_idx = columns[units[-1]]
        if first_kind == "markov":
            left_target = interval_bounds[first_idx][0]
        else:
            glo, ghi = gap_bounds[first_idx]
            left_target = (glo + ghi) / 2
        if last_kind == "markov":
            right_target = interval_bounds[last_idx][1]
        else:
            glo, ghi = gap_bounds[last_idx]
            right_target = (glo + ghi) / 2
        left, right = interval_bounds[i]
        slope = (right_target - left_target) / (right - left)
        branches.append(
            AffineBranch(
                slope=slope,
                intercept=left_target - slope * left,
                left=left,
                right=right,
            )
        )

    built = MarkovMap(tuple(branches))
    validation = built.validate()
    if not validation.all_ok:
        raise AssertionError(
            "synthesized map failed validation: "
            + "; ".join(
                validation.p1_issues
                + validation.p2_issues
                + validation.p3_issues
                + validation.p4_issues
            )
        )
    if spec.mode == STRICT and not validation.p5_ok:
        raise AssertionError("strict synthesis produced partial gap coverage")
    data = transition_data(built)
    if data.markov != spec.markov or data.escape != spec.escape:
        raise AssertionError("synthesized map does not reproduce the input matrices")
    if data.gap_positions != positions:
        raise AssertionError("synthesized map placed gaps at the wrong positions")
    return SynthesisResult(
        map=built,
        spec=spec,
        positions=positions,
        allocation=allocation,
        feasibility=report,
        validation=validation,
    )


# -- JSON surface --------------------------------------------------------

_A_KEYS = {"rows"}
_B_KEYS = {"rows", "mode", "gap_positions"}


def _matrix_block(data: object, allowed: set[str], label: str) -> tuple[object, dict]:
    if isinstance(data, Mapping):
        unknown = set(data) - allowed
        if unknown:
            raise MapFormatError(f"unknown keys in {label} file: {sorted(unknown)}")
        if "rows" not in data:
            raise MapFormatError(f"{label} file object needs a 'rows' array")
        return data["rows"], {k: v for k, v in data.items() if k != "rows"}
    return data, {}


def spec_from_jsonable(
    a_data: object, b_data: object, mode: str | None = None
) -> SynthesisSpec:
    """Assemble a SynthesisSpec from parsed JSON matrix files.

    Each file is either a bare row-major array or an object with a ``rows``
    key; the escape file may also carry ``mode`` and ``gap_positions``.  A
    mode passed here (e.g. from a command-line flag) must agree with one in
    the file."""
    a_rows, _ = _matrix_block(a_data, _A_KEYS, "transition-matrix")
    b_rows, extras = _matrix_block(b_data, _B_KEYS, "escape-block")
    file_mode = extras.get("mode")
    if file_mode is not None and not isinstance(file_mode, str):
        raise MapFormatError("mode must be a string")
    if mode is not None and file_mode is not None and mode != file_mode:
        raise MapFormatError(
            f"mode {mode!r} conflicts with mode {file_mode!r} in the escape file"
        )
    chosen_mode = mode or file_mode or STRICT
    positions = extras.get("gap_positions")
    if positions is not None:
        if not isinstance(positions, Sequence) or not all(
            isinstance(p, int) and not isinstance(p, bool) for p in positions
        ):
            raise MapFormatError("gap_positions must be an array of integers")
        positions = tuple(positions)
    try:
        markov = as_binary_matrix(a_rows)
    except MapFormatError as exc:
        raise MapFormatError(f"transition-matrix file: {exc}") from exc
    return SynthesisSpec(
        markov=markov,
        escape=b_rows if isinstance(b_rows, Sequence) else (),
        gap_positions=positions,
        mode=chosen_mode,
    )
