import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from escapemaps import (
    PARTIAL,
    STRICT,
    InfeasibleSpecError,
    MapFormatError,
    SynthesisSpec,
    WidthSnapError,
    auto_gap_positions,
    escape_matrix,
    feasibility_check,
    is_primitive,
    perron_widths,
    spec_from_jsonable,
    synthesize,
    transition_data,
)
from escapemaps.corpus import CLAIMED_ESCAPE_ROWS, FOUR_INTERVAL_MARKOV

F = Fraction


# -- spec validation -----------------------------------------------------


def test_spec_rejects_malformed_inputs():
    with pytest.raises(MapFormatError):
        SynthesisSpec(((1, 1), (1, 1)), ((1,),))  # one escape row missing
    with pytest.raises(MapFormatError):
        SynthesisSpec(((1, 1), (1, 1)), ((1,), (0, 1)))  # ragged
    with pytest.raises(MapFormatError):
        SynthesisSpec(((1, 1), (1, 1)), ((2,), (0,)))
    with pytest.raises(MapFormatError):
        SynthesisSpec(((1, 1), (1, 1)), ((True,), (False,)))
    with pytest.raises(MapFormatError):
        SynthesisSpec(((1, 1), (1, 1)), ((1,), (1,)), gap_positions=(1, 1))
    with pytest.raises(MapFormatError):
        SynthesisSpec(((1, 1), (1, 1)), ((1,), (1,)), gap_positions=(2,))
    with pytest.raises(MapFormatError):
        SynthesisSpec(((1, 1), (1, 1)), ((1,), (1,)), mode="loose")
    spec = SynthesisSpec(((1, 1), (1, 1)), ((1,), (1,)), gap_positions=(1,))
    assert (spec.n, spec.m) == (2, 1)


# -- feasibility ---------------------------------------------------------


def test_partial_spec_is_feasible_with_auto_position(partial_spec):
    report = feasibility_check(partial_spec)
    assert report.feasible
    assert report.positions == (2,)
    assert report.row_issues == () and report.column_issues == ()
    segs = {seg.row: seg.symbols for seg in report.segments}
    assert segs[1] == ("2", "2^", "3")
    assert segs[4] == ("2^", "3")


def test_strict_rejects_the_reaching_block_at_position_two():
    spec = SynthesisSpec(
        FOUR_INTERVAL_MARKOV,
        ((1,), (0,), (0,), (1,)),
        gap_positions=(2,),
        mode=STRICT,
    )
    report = feasibility_check(spec)
    assert not report.feasible
    assert report.row_issues == (
        "row 4 segment ends at escape symbol 2^; strict mode requires "
        "Markov symbols at both ends",
    )
    with pytest.raises(InfeasibleSpecError) as err:
        synthesize(spec)
    assert err.value.report == report


def test_strict_reaching_block_has_no_workable_placement():
    spec = SynthesisSpec(
        FOUR_INTERVAL_MARKOV, ((1,), (0,), (0,), (1,)), mode=STRICT
    )
    report = feasibility_check(spec)
    assert not report.feasible
    assert report.structure_issues == (
        "no placement of the escape columns makes every row contiguous and "
        "every gap covered",
    )


def test_structure_issues():
    non_primitive = SynthesisSpec(((0, 1), (1, 0)), ((1,), (0,)), mode=PARTIAL)
    report = feasibility_check(non_primitive)
    assert any("not primitive" in msg for msg in report.structure_issues)

    zero_column = SynthesisSpec(((1, 1), (1, 1)), ((0,), (0,)))
    report = feasibility_check(zero_column)
    assert any("all zero" in msg for msg in report.structure_issues)

    crowded = SynthesisSpec(((1, 1), (1, 1)), ((1, 1), (1, 1)))
    report = feasibility_check(crowded)
    assert any("inter-interval slots" in msg for msg in report.structure_issues)


def test_row_level_issues():
    # Row 2 of the transition matrix is zero and its escape entry is set, so
    # its image would be a single point.
    spec = SynthesisSpec(((1, 1), (0, 0)), ((0,), (1,)), gap_positions=(1,))
    report = feasibility_check(spec)
    assert any("collapse to a point" in msg for msg in report.row_issues)

    gap_hole = SynthesisSpec(
        ((1, 1, 1), (1, 1, 1), (1, 0, 1)), ((0,), (0,), (0,)), gap_positions=(2,)
    )
    report = feasibility_check(gap_hole)
    assert any("not contiguous" in msg for msg in report.row_issues)
    assert any("would not be fully covered" in msg for msg in report.column_issues)


def test_auto_positions(partial_spec):
    assert auto_gap_positions(
        FOUR_INTERVAL_MARKOV, ((1,), (0,), (0,), (0,)), STRICT
    ) == (2,)
    assert (
        auto_gap_positions(partial_spec.markov, partial_spec.escape, PARTIAL) == (2,)
    )
    assert (
        auto_gap_positions(FOUR_INTERVAL_MARKOV, ((1,), (0,), (0,), (1,)), STRICT)
        is None
    )


# -- width allocation ----------------------------------------------------


def test_perron_widths_on_the_full_shift():
    alloc = perron_widths(((1, 1), (1, 1)), ((), ()), (), STRICT)
    assert alloc.markov_widths == (F(1, 2), F(1, 2))
    assert alloc.escape_widths == ()
    assert abs(alloc.perron_estimate - 2.0) < 1e-9


def test_perron_widths_on_the_four_interval_matrix():
    alloc = perron_widths(
        FOUR_INTERVAL_MARKOV, ((1,), (0,), (0,), (0,)), (2,), STRICT
    )
    assert abs(alloc.perron_estimate - 1.465571231876837) < 1e-9
    total = sum(alloc.markov_widths) + sum(alloc.escape_widths)
    assert total == 1
    widths = alloc.markov_widths
    gap = alloc.escape_widths[0]
    # Each row's image span strictly exceeds its own width (expansion).
    spans = [
        widths[1] + gap + widths[2],
        widths[3],
        widths[0] + widths[1],
        widths[2],
    ]
    for span, width in zip(spans, widths):
        assert span > width
    data = alloc.to_jsonable()
    assert set(data) == {
        "markov_widths",
        "escape_widths",
        "perron_estimate",
        "perron_error_bound",
    }


def test_perron_widths_rejects_zero_rows():
    with pytest.raises(WidthSnapError):
        perron_widths(((1, 1), (0, 0)), ((), ()), (), STRICT)


def test_single_interval_spec_cannot_expand():
    with pytest.raises(WidthSnapError):
        synthesize(SynthesisSpec(((1,),), ((),)))


# -- synthesis round trips ----------------------------------------------


def test_synthesized_full_shift_is_the_bundled_map(full2_map):
    result = synthesize(SynthesisSpec(((1, 1), (1, 1)), ((), ())))
    assert result.map == full2_map
    assert result.positions == ()
    assert result.validation.all_ok


def test_partial_synthesis_matches_the_claimed_matrix(partial_result):
    assert partial_result.positions == (2,)
    data = transition_data(partial_result.map)
    assert data.markov == FOUR_INTERVAL_MARKOV
    assert data.escape == ((1,), (0,), (0,), (1,))
    assert escape_matrix(partial_result.map).entries == CLAIMED_ESCAPE_ROWS
    assert partial_result.validation.all_ok
    assert not partial_result.validation.p5_ok  # branch 4 reaches partway in
    coverage = [
        (c.branch, c.gap, c.full)
        for c in partial_result.validation.escape_coverage
    ]
    assert coverage == [(1, 2, True), (4, 2, False)]


def test_strict_synthesis_fully_covers_every_gap():
    result = synthesize(
        SynthesisSpec(FOUR_INTERVAL_MARKOV, ((1,), (0,), (0,), (0,)), mode=STRICT)
    )
    data = transition_data(result.map)
    assert data.markov == FOUR_INTERVAL_MARKOV
    assert data.escape == ((1,), (0,), (0,), (0,))
    assert data.gap_positions == (2,)
    assert result.validation.p5_ok


def test_two_gap_synthesis():
    markov = (
        (1, 1, 0),
        (1, 1, 1),
        (0, 1, 1),
    )
    escape = ((1, 0), (1, 1), (0, 1))
    spec = SynthesisSpec(markov, escape, mode=STRICT)
    result = synthesize(spec)
    data = transition_data(result.map)
    assert data.markov == markov
    assert data.escape == escape
    assert data.gap_positions == (1, 2)
    assert result.map.n == 3
    assert len(result.map.gaps) == 2


def test_allocation_reuse_across_specs_sharing_a_matrix():
    markov = ((1, 1, 0), (1, 1, 1), (0, 1, 1))
    first = SynthesisSpec(markov, ((1,), (1,), (0,)), gap_positions=(1,))
    second = SynthesisSpec(markov, ((0,), (1,), (1,)), gap_positions=(2,))
    base = synthesize(first)
    reused = synthesize(second, allocation=base.allocation)
    data = transition_data(reused.map)
    assert data.markov == markov
    assert data.escape == ((0,), (1,), (1,))
    assert reused.allocation == base.allocation


# -- the straddle rule for strict single-column specs --------------------


def _rows_contiguous(markov):
    for row in markov:
        idx = [j for j, v in enumerate(row) if v]
        if not idx or idx != list(range(idx[0], idx[-1] + 1)):
            return False
    return True


def _straddle_column(markov, pos):
    return tuple(
        1 if markov[i][pos - 1] and markov[i][pos] else 0
        for i in range(len(markov))
    )


@pytest.mark.parametrize("n", [2, 3])
def test_strict_single_column_feasibility_is_the_straddle_rule(n):
    """Exhaustive cross-check: with one escape column at position p, a strict
    spec is feasible iff the matrix is primitive with contiguous rows and the
    column marks exactly the rows whose targets straddle p."""
    for bits in itertools.product((0, 1), repeat=n * n):
        markov = tuple(
            tuple(bits[i * n : (i + 1) * n]) for i in range(n)
        )
        primitive = is_primitive(markov).primitive
        for pos in range(1, n):
            straddle = _straddle_column(markov, pos)
            for u in itertools.product((0, 1), repeat=n):
                spec = SynthesisSpec(
                    markov,
                    tuple((v,) for v in u),
                    gap_positions=(pos,),
                    mode=STRICT,
                )
                predicted = (
                    primitive
                    and _rows_contiguous(markov)
                    and u == straddle
                    and any(u)
                )
                assert feasibility_check(spec).feasible == predicted, (
                    markov,
                    pos,
                    u,
                )


# -- JSON assembly -------------------------------------------------------


def test_spec_from_jsonable_variants():
    spec = spec_from_jsonable([[1, 1], [1, 1]], [[1], [1]])
    assert spec.mode == STRICT and spec.gap_positions is None
    spec = spec_from_jsonable(
        {"rows": [[1, 1], [1, 1]]},
        {"rows": [[1], [1]], "mode": "partial", "gap_positions": [1]},
    )
    assert spec.mode == PARTIAL and spec.gap_positions == (1,)
    spec = spec_from_jsonable([[1, 1], [1, 1]], {"rows": [[1], [1]]}, mode=PARTIAL)
    assert spec.mode == PARTIAL


def test_spec_from_jsonable_rejects_conflicts_and_garbage():
    with pytest.raises(MapFormatError):
        spec_from_jsonable(
            [[1, 1], [1, 1]], {"rows": [[1], [1]], "mode": "strict"}, mode=PARTIAL
        )
    with pytest.raises(MapFormatError):
        spec_from_jsonable([[1, 1], [1, 1]], {"rows": [[1], [1]], "note": 1})
    with pytest.raises(MapFormatError):
        spec_from_jsonable("nope", [[1], [1]])
    with pytest.raises(MapFormatError):
        spec_from_jsonable([[1, 2], [1, 1]], [[1], [1]])
    with pytest.raises(MapFormatError):
        spec_from_jsonable(
            [[1, 1], [1, 1]], {"rows": [[1], [1]], "gap_positions": [1.0]}
        )


# -- property: feasibility and synthesis agree ---------------------------


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 3).flatmap(
        lambda n: st.tuples(
            st.lists(
                st.lists(st.integers(0, 1), min_size=n, max_size=n),
                min_size=n,
                max_size=n,
            ),
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
            st.integers(1, n - 1),
            st.sampled_from([STRICT, PARTIAL]),
        )
    )
)
def test_synthesize_succeeds_exactly_on_feasible_specs(case):
    rows, u, pos, mode = case
    spec = SynthesisSpec(
        tuple(tuple(r) for r in rows),
        tuple((v,) for v in u),
        gap_positions=(pos,),
        mode=mode,
    )
    report = feasibility_check(spec)
    if not report.feasible:
        with pytest.raises(InfeasibleSpecError):
            synthesize(spec)
        return
    result = synthesize(spec)
    data = transition_data(result.map)
    assert data.markov == spec.markov
    assert data.escape == spec.escape
    assert data.gap_positions == (pos,)
    assert result.validation.all_ok
    if mode == STRICT:
        assert result.validation.p5_ok
