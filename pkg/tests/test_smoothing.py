import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from smoothdyn.graph import DynamicGraph, all_pairs, random_graph
from smoothdyn.rng import adversary_stream, smoothing_stream, stream
from smoothdyn.smoothing import (
    ChangeEvent,
    ContractViolation,
    FlipSimulatingARAdversary,
    Kind,
    LazyFlipAdapter,
    Model,
    Provenance,
    ScriptedFlipAdversary,
    SmoothedSource,
    SmoothingParams,
    UniformAddRemoveAdversary,
    UniformFlipAdversary,
    apply_event,
    p_prime,
    run_sequence,
    smooth_initial,
    write_event_log,
)


def test_params_validation():
    with pytest.raises(ValueError):
        SmoothingParams(1.5)
    with pytest.raises(ValueError):
        SmoothingParams(0.5, restriction=())
    SmoothingParams(0.0)
    SmoothingParams(1.0, restriction=((0, 1),))


def test_smooth_initial_p1_identity():
    rng = np.random.default_rng(0)
    h0 = random_graph(10, rng)
    out = smooth_initial(h0, SmoothingParams(1.0), rng)
    assert out.edge_set() == h0.edge_set()


def test_smooth_initial_marginals():
    rng = np.random.default_rng(1)
    h0 = DynamicGraph(4, [(0, 1)])
    present_in = present_out = 0
    for _ in range(10000):
        g = smooth_initial(h0, SmoothingParams(0.5), rng)
        present_in += g.has(0, 1)
        present_out += g.has(2, 3)
    assert abs(present_in / 10000 - 0.75) < 0.02  # p + (1-p)/2
    assert abs(present_out / 10000 - 0.25) < 0.02  # (1-p)/2


def test_smooth_initial_p0_marginal_half():
    rng = np.random.default_rng(2)
    h0 = DynamicGraph(4, [(0, 1)])
    hits = sum(
        smooth_initial(h0, SmoothingParams(0.0), rng).has(0, 1) for _ in range(10000)
    )
    assert abs(hits / 10000 - 0.5) < 0.02


def test_next_change_p1_scripted():
    adv = ScriptedFlipAdversary([(0, 1)])
    source = SmoothedSource(Model.OBLIVIOUS_FLIP, SmoothingParams(1.0, seed=3), adv, 4)
    for _ in range(20):
        ev = source.next_change()
        assert ev == ChangeEvent((0, 1), Kind.FLIP, Provenance.ADVERSARIAL)


def test_next_change_p0_uniform_chi2():
    restriction = tuple(all_pairs(5))[:6]
    params = SmoothingParams(0.0, restriction=restriction)
    adv = ScriptedFlipAdversary([restriction[0]])
    source = SmoothedSource(
        Model.OBLIVIOUS_FLIP, params, adv, 5, rng=np.random.default_rng(4)
    )
    counts = {e: 0 for e in restriction}
    draws = 12000
    for _ in range(draws):
        counts[source.next_change().edge] += 1
    _, pvalue = stats.chisquare(list(counts.values()))
    assert pvalue > 1e-3


def test_adversarial_fraction():
    adv = UniformFlipAdversary(8, np.random.default_rng(5))
    source = SmoothedSource(
        Model.OBLIVIOUS_FLIP, SmoothingParams(0.5), adv, 8, rng=np.random.default_rng(6)
    )
    hits = sum(
        source.next_change().provenance is Provenance.ADVERSARIAL for _ in range(10000)
    )
    assert abs(hits / 10000 - 0.5) < 0.02


def test_restriction_contract_violation():
    params = SmoothingParams(1.0, restriction=((0, 1),))
    adv = ScriptedFlipAdversary([(2, 3)])
    source = SmoothedSource(Model.OBLIVIOUS_FLIP, params, adv, 4)
    with pytest.raises(ContractViolation):
        source.next_change()


def test_realized_edges_respect_restriction():
    restriction = tuple(all_pairs(6))[:5]
    for seed in range(30):
        params = SmoothingParams(0.4, restriction=restriction)
        adv = UniformFlipAdversary(6, adversary_stream(seed), restriction)
        source = SmoothedSource(
            Model.OBLIVIOUS_FLIP, params, adv, 6, rng=smoothing_stream(seed)
        )
        for _ in range(200):
            assert source.next_change().edge in restriction


def test_oblivious_replay_invariance():
    # same adversary seed, different smoothing seeds -> identical proposals
    def realized_adversarial(smoothing_seed):
        adv = UniformFlipAdversary(10, adversary_stream(42))
        source = SmoothedSource(
            Model.OBLIVIOUS_FLIP,
            SmoothingParams(0.5),
            adv,
            10,
            rng=smoothing_stream(smoothing_seed),
        )
        return [
            (ev.edge if ev.provenance is Provenance.ADVERSARIAL else None)
            for ev in (source.next_change() for _ in range(300))
        ]

    a = realized_adversarial(1)
    b = realized_adversarial(2)
    # wherever both runs kept the adversarial proposal, the edges agree
    agreements = [(x, y) for x, y in zip(a, b) if x is not None and y is not None]
    assert agreements and all(x == y for x, y in agreements)


def test_run_sequence_basics():
    g = DynamicGraph(4, [(0, 1)])
    adv = ScriptedFlipAdversary([(0, 1)])
    source = SmoothedSource(Model.OBLIVIOUS_FLIP, SmoothingParams(1.0), adv, 4)
    assert run_sequence(g, source, 0) == []
    log = run_sequence(g, source, 2)
    assert len(log) == 2
    assert g.edge_set() == {(0, 1)}  # flip twice restores


def test_run_sequence_mixing_density():
    rng = np.random.default_rng(7)
    densities = []
    for seed in range(20):
        g = DynamicGraph(10)
        adv = ScriptedFlipAdversary([(0, 1)])
        source = SmoothedSource(
            Model.OBLIVIOUS_FLIP,
            SmoothingParams(0.0),
            adv,
            10,
            rng=np.random.default_rng(seed),
        )
        run_sequence(g, source, 10000)
        densities.append(g.edge_count() / 45)
    assert abs(float(np.mean(densities)) - 0.5) < 0.05


def test_event_log_determinism_and_format():
    def render(seed):
        adv = UniformAddRemoveAdversary(6, adversary_stream(seed))
        source = SmoothedSource(
            Model.OBLIVIOUS_AR, SmoothingParams(0.5), adv, 6, rng=smoothing_stream(seed)
        )
        g = DynamicGraph(6)
        log = run_sequence(g, source, 100)
        buf = io.StringIO()
        write_event_log(log, buf)
        return buf.getvalue()

    one, two = render(9), render(9)
    assert one == two
    assert one.startswith("step,kind,u,v,provenance\n")
    assert "\r" not in one


class _RecordingFlipAlgo:
    def __init__(self):
        self.calls = []

    def update(self, edge, now_present):
        self.calls.append((edge, now_present))


def test_lazy_adapter_translations():
    g = DynamicGraph(4)
    algo = _RecordingFlipAlgo()
    adapter = LazyFlipAdapter(algo)
    # Add on absent -> one flip forwarded
    ev = ChangeEvent((0, 1), Kind.ADD, Provenance.ADVERSARIAL)
    effective, present = apply_event(g, ev)
    assert effective
    adapter.update(ev.edge, present)
    g.flip(*ev.edge)
    assert algo.calls == [((0, 1), True)]
    # second Add is a no-op -> a null step, caught up on the next flip
    effective, _ = apply_event(g, ev)
    assert not effective
    adapter.null_step()
    ev2 = ChangeEvent((0, 1), Kind.REMOVE, Provenance.ADVERSARIAL)
    effective, present = apply_event(g, ev2)
    assert effective
    adapter.update(ev2.edge, present)
    assert algo.calls == [((0, 1), True), (None, False), ((0, 1), False)]


@given(st.lists(st.tuples(st.sampled_from(list(all_pairs(5))), st.booleans()), max_size=60))
@settings(max_examples=50, deadline=None)
def test_lazy_adapter_differential(ops):
    """Adapter over add/remove events == direct run on the induced flips."""
    from smoothdyn.counters import STriangleCounter

    g1 = DynamicGraph(5)
    wrapped = LazyFlipAdapter(STriangleCounter(g1, 0))
    g2 = DynamicGraph(5)
    direct = STriangleCounter(g2, 0)
    for e, is_add in ops:
        ev = ChangeEvent(e, Kind.ADD if is_add else Kind.REMOVE, Provenance.ADVERSARIAL)
        effective, present = apply_event(g1, ev)
        if effective:
            wrapped.update(e, present)
            g1.flip(*e)
            direct.update(e, present)
            g2.flip(*e)
        else:
            wrapped.null_step()
    assert wrapped.query() == direct.query()
    assert g1.edge_set() == g2.edge_set()


def test_p_prime_values():
    assert p_prime(0.0) == 0.0
    assert p_prime(1.0) == 1.0
    assert abs(p_prime(0.5) - 1 / 3) < 1e-12


def test_ar_simulation_null_fraction():
    # the add/remove strategy copying a flip strategy yields nulls w.p. p/2
    p = 0.5
    flip_adv = UniformFlipAdversary(8, adversary_stream(11))
    adv = FlipSimulatingARAdversary(flip_adv, stream(11, 99))
    source = SmoothedSource(
        Model.OBLIVIOUS_AR, SmoothingParams(p), adv, 8, rng=smoothing_stream(11)
    )
    g = DynamicGraph(8)
    nulls = 0
    steps = 10000
    for _ in range(steps):
        ev = source.next_change()
        effective, _ = apply_event(g, ev)
        if effective:
            g.flip(*ev.edge)
        else:
            nulls += 1
    assert abs(nulls / steps - p / 2) < 0.02
