import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigenwl.graphs import (
    MatrixKind,
    complete_graph,
    cycle_graph,
    disjoint_union,
    random_connected_graph,
    star_graph,
)
from eigenwl.refinement import (
    AlgorithmSpec,
    UsageError,
    compare_partitions,
    distinguishes,
    initial_coloring,
    joint_initial_coloring,
    refine_once,
    signature,
    signatures,
    stable_coloring,
)

ALL_SPEC_LABELS = [
    "wl1",
    "epwl:A",
    "epwl:L",
    "epwl:Lhat",
    "swl",
    "pswl",
    "fwl2",
    "gdwl:spd",
    "gdwl:rd",
    "gdwl:htd",
    "gdwl:ctd",
    "gdwl:prd",
    "gdwl:diffusion",
    "gdwl:biharmonic",
    "spectralign:A",
    "siamese:Lhat",
    "weakspectralign:L",
    "basisnet:A:layers=1",
    "spe:A",
    "peg:Lhat",
    "girt:K=8",
    "ign2wl",
    "ign2wl:atp",
    "ign2wl:proj:A",
]


# ---------------------------------------------------------------------------
# spec grammar


def test_spec_labels_round_trip():
    for label in ALL_SPEC_LABELS:
        spec = AlgorithmSpec.parse(label)
        assert AlgorithmSpec.parse(spec.label()) == spec


def test_spec_grammar_variants():
    assert AlgorithmSpec.parse("epwl:Lhat").kind is MatrixKind.NORMALIZED_LAPLACIAN
    assert AlgorithmSpec.parse("gdwl:prd:w=0,1,0.5").distance.weights == (0.0, 1.0, 0.5)
    assert AlgorithmSpec.parse("basisnet:A:layers=2").layers == 2
    assert AlgorithmSpec.parse("girt:K=4").steps == 4
    # bare distance specs are gdwl shorthand
    assert AlgorithmSpec.parse("prd:w=0,1,0.5").variant == "gdwl"
    assert AlgorithmSpec.parse("sign:A") == AlgorithmSpec.parse("spectralign:A")


@pytest.mark.parametrize(
    "bad",
    ["epwl", "epwl:D", "wl1:A", "basisnet", "basisnet:A:layer=1", "girt:J=2", "gdwl", "bogus"],
)
def test_spec_grammar_rejects(bad):
    with pytest.raises(UsageError):
        AlgorithmSpec.parse(bad)


def test_lhat_specs_reject_isolated_vertices():
    g = disjoint_union(complete_graph(2), complete_graph(1))
    with pytest.raises(UsageError, match="isolated"):
        stable_coloring(AlgorithmSpec.parse("epwl:Lhat"), [g])


# ---------------------------------------------------------------------------
# initial colorings


def test_wl1_initial_is_constant():
    state = initial_coloring(AlgorithmSpec.parse("wl1"), random_connected_graph(6, 0.5, 1))
    assert len(set(state.colors[0])) == 1


def test_swl_initial_marks_diagonal(k2):
    state = initial_coloring(AlgorithmSpec.parse("swl"), k2)
    colors = state.colors[0]
    n = 2
    diag = {colors[u * n + u] for u in range(n)}
    off = {colors[u * n + v] for u in range(n) for v in range(n) if u != v}
    assert len(diag) == 1 and len(off) == 1 and diag != off


def test_spectral_ign_initial_domain_on_k2(k2):
    state = initial_coloring(AlgorithmSpec.parse("spectralign:A"), k2)
    # two distinct eigenvalues, four ordered pairs each
    assert state.domain_size(0) == 8
    # colors keyed by (eigenvalue, projection entry): three distinct values
    # {(-1, .5), (-1, -.5), (1, .5)} since the +1 slice is constant
    assert len(set(state.colors[0])) == 3


# ---------------------------------------------------------------------------
# single refinement steps


def test_wl1_one_step_splits_star_by_degree():
    spec = AlgorithmSpec.parse("wl1")
    state = refine_once(spec, initial_coloring(spec, star_graph(3)))
    colors = state.colors[0]
    assert colors[1] == colors[2] == colors[3] != colors[0]


def test_epwl_one_step_separates_c6_from_triangles(c6, two_triangles):
    spec = AlgorithmSpec.parse("epwl:A")
    state = refine_once(spec, joint_initial_coloring(spec, [c6, two_triangles]))
    assert set(state.colors[0]).isdisjoint(set(state.colors[1]))


def test_pair_update_splits_diagonal_first():
    spec = AlgorithmSpec.parse("ign2wl")
    g = random_connected_graph(5, 0.5, 3)
    state = refine_once(spec, initial_coloring(spec, g))
    colors = state.colors[0]
    n = g.n
    diag = {colors[u * n + u] for u in range(n)}
    off = {colors[u * n + v] for u in range(n) for v in range(n) if u != v}
    assert diag.isdisjoint(off)


def test_refine_once_requires_matching_spec(k2):
    state = initial_coloring(AlgorithmSpec.parse("wl1"), k2)
    with pytest.raises(UsageError):
        refine_once(AlgorithmSpec.parse("swl"), state)


# ---------------------------------------------------------------------------
# stable colorings


def test_wl1_stable_on_complete_graph():
    spec = AlgorithmSpec.parse("wl1")
    state = stable_coloring(spec, [complete_graph(5)])
    assert state.iteration == 1  # vertex-transitive: stable immediately
    assert len(set(state.colors[0])) == 1


def test_pswl_stable_on_triangle():
    state = stable_coloring(AlgorithmSpec.parse("pswl"), [complete_graph(3)])
    colors = state.colors[0]
    diag = {colors[u * 3 + u] for u in range(3)}
    off = {colors[u * 3 + v] for u in range(3) for v in range(3) if u != v}
    assert len(diag) == 1 and len(off) == 1 and diag != off


def test_epwl_stable_separates_joint_run(c6, two_triangles):
    state = stable_coloring(AlgorithmSpec.parse("epwl:A"), [c6, two_triangles])
    assert set(state.colors[0]).isdisjoint(set(state.colors[1]))


def test_monotone_refinement_every_step():
    rng = random.Random(12)
    graphs = [random_connected_graph(6, 0.5, rng.randrange(1 << 30)) for _ in range(3)]
    for label in ("wl1", "pswl", "spectralign:A", "girt:K=4", "spe:L"):
        spec = AlgorithmSpec.parse(label)
        state = joint_initial_coloring(spec, graphs)
        for _ in range(30):
            nxt = refine_once(spec, state)
            new_to_old = {}
            for old_cols, new_cols in zip(state.colors, nxt.colors):
                for o, nw in zip(old_cols, new_cols):
                    assert new_to_old.setdefault(nw, o) == o, label
            if nxt.stable:
                break
            state = nxt
        else:
            pytest.fail(f"{label} did not stabilize")


def test_iteration_stays_below_domain_cap():
    graphs = [random_connected_graph(7, 0.4, s) for s in (1, 2, 3)]
    for label in ("wl1", "swl", "fwl2", "weakspectralign:A"):
        state = stable_coloring(AlgorithmSpec.parse(label), graphs)
        cap = sum(state.domain_size(i) for i in range(len(graphs)))
        assert state.iteration <= cap


# ---------------------------------------------------------------------------
# signatures and distinguishability


def test_identical_graphs_share_signature(k2):
    spec = AlgorithmSpec.parse("pswl")
    state = stable_coloring(spec, [k2, k2])
    sigs = signatures(state)
    assert sigs[0] == sigs[1]


def test_wl1_blind_on_c6_vs_triangles(c6, two_triangles):
    assert not distinguishes(AlgorithmSpec.parse("wl1"), c6, two_triangles)
    assert distinguishes(AlgorithmSpec.parse("epwl:A"), c6, two_triangles)


def test_signature_requires_membership(c6, two_triangles, k2):
    spec = AlgorithmSpec.parse("wl1")
    state = stable_coloring(spec, [c6, two_triangles])
    with pytest.raises(UsageError):
        signature(spec, k2, state)


def test_signatures_not_comparable_across_runs(k2):
    spec = AlgorithmSpec.parse("wl1")
    sig_a = signatures(stable_coloring(spec, [k2]))[0]
    sig_b = signatures(stable_coloring(spec, [k2]))[0]
    with pytest.raises(UsageError):
        sig_a == sig_b


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 7), st.integers(0, 2**30), st.permutations(list(range(7))))
def test_relabeling_never_distinguished(n, seed, perm7):
    g = random_connected_graph(n, 0.5, seed)
    perm = [p for p in perm7 if p < n]
    h = g.relabel([perm.index(i) for i in range(n)] if len(perm) == n else list(range(n)))
    for label in ("wl1", "epwl:A", "pswl", "gdwl:rd", "weakspectralign:A", "girt:K=4"):
        assert not distinguishes(AlgorithmSpec.parse(label), g, h), label


# ---------------------------------------------------------------------------
# corpus comparisons


def test_compare_partitions_self_is_equivalent(connected_n6):
    corpus = [g for g in connected_n6 if not g.has_isolated][:40]
    spec = AlgorithmSpec.parse("epwl:A")
    report = compare_partitions(spec, spec, corpus)
    assert report.relation == "equivalent"
    assert not report.violations_ab and not report.violations_ba


def test_compare_partitions_reports_witnesses(c6, two_triangles):
    corpus = [c6, two_triangles, complete_graph(6)]
    report = compare_partitions(
        AlgorithmSpec.parse("epwl:A"), AlgorithmSpec.parse("wl1"), corpus
    )
    assert report.a_refines_b
    assert not report.b_refines_a
    assert report.relation == "a_strictly_finer"
    assert (0, 1) in report.violations_ba  # wl1 merges the pair epwl splits


def test_compare_partitions_rejects_empty_corpus():
    with pytest.raises(UsageError):
        compare_partitions(AlgorithmSpec.parse("wl1"), AlgorithmSpec.parse("pswl"), [])


def test_every_variant_is_relabel_invariant():
    g = random_connected_graph(6, 0.5, 5)
    h = g.relabel([2, 0, 5, 1, 4, 3])
    for label in ALL_SPEC_LABELS:
        assert not distinguishes(AlgorithmSpec.parse(label), g, h), label


def test_single_vertex_graph_edge_cases():
    from eigenwl.graphs import empty_graph

    k1 = empty_graph(1)
    for label in ("wl1", "swl", "pswl", "fwl2", "epwl:A", "epwl:L"):
        state = stable_coloring(AlgorithmSpec.parse(label), [k1, k1])
        sigs = signatures(state)
        assert sigs[0] == sigs[1]


def test_stability_is_a_fixpoint(c6, two_triangles):
    """One more update after stability must neither split nor merge
    anything, within or across graphs."""
    for label in ("wl1", "epwl:A", "pswl", "spectralign:L"):
        spec = AlgorithmSpec.parse(label)
        state = stable_coloring(spec, [c6, two_triangles, complete_graph(6)])
        nxt = refine_once(spec, state)
        assert nxt.stable
        mapping = {}
        for old_cols, new_cols in zip(state.colors, nxt.colors):
            for o, nw in zip(old_cols, new_cols):
                assert mapping.setdefault(o, nw) == nw
        # the signature bucket structure is unchanged as well
        old_sigs = [s.value for s in signatures(state)]
        new_sigs = [s.value for s in signatures(nxt)]
        assert [old_sigs.index(v) for v in old_sigs] == [new_sigs.index(v) for v in new_sigs]
