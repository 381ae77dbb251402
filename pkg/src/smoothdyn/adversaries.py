"""Constructive adversary strategies: edge embedding under smoothing noise.

An embedding task asks an adversary to realize a prescribed flip set
R' inside a controlled region R of node pairs, while each step is only
kept with probability p (and replaced by a uniformly random flip
otherwise).  The adaptive strategy watches the realized graph and
re-proposes still-needed flips; the oblivious add/remove strategy
round-robins idempotent add/remove proposals toward known targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .graph import DynamicGraph, Pair, pair, uniform_pair
from .smoothing import (
    ChangeEvent,
    Model,
    Provenance,
    SmoothedSource,
    SmoothingParams,
)


class InfeasibleTaskError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingTask:
    n: int
    region: frozenset  # controlled region R of canonical pairs
    flips: Tuple[Pair, ...]  # R' -- the flips to realize, subset of R
    p: float
    budget: int  # step budget l

    def __post_init__(self):
        region = frozenset(pair(u, v) for u, v in self.region)
        flips = tuple(pair(u, v) for u, v in self.flips)
        object.__setattr__(self, "region", region)
        object.__setattr__(self, "flips", flips)
        if not set(flips) <= region:
            raise InfeasibleTaskError("flip set must lie inside the region")
        if len(set(flips)) != len(flips):
            raise InfeasibleTaskError("duplicate flips in R'")

    @property
    def feasible(self) -> bool:
        """Feasibility proviso r <= p n^2 / 18."""
        return len(self.region) <= self.p * self.n * self.n / 18.0

    def require_feasible(self) -> "EmbeddingTask":
        if not self.feasible:
            raise InfeasibleTaskError(
                f"|R|={len(self.region)} exceeds p*n^2/18={self.p * self.n ** 2 / 18:.1f}"
            )
        return self


@dataclass
class EmbedResult:
    success: bool
    steps_used: int
    random_hits_on_region: int = 0


class AdaptiveEmbedAdversary:
    """Adaptive flip adversary realizing R' inside R.

    Keeps the pending set (edges of R whose state differs from target)
    incrementally: the driver reports each realized flip via
    :meth:`notify`, costing O(1) per event.  Every proposal is a pending
    edge, hence always inside R.
    """

    def __init__(self, task: EmbeddingTask):
        self._region = task.region
        # insertion-ordered; proposal picks an arbitrary (first) element
        self._pending: Dict[Pair, None] = dict.fromkeys(task.flips)

    @property
    def done(self) -> bool:
        return not self._pending

    def propose(self, graph: DynamicGraph) -> Pair:
        return next(iter(self._pending))

    def notify(self, edge: Pair) -> None:
        if edge in self._region:
            if edge in self._pending:
                del self._pending[edge]
            else:
                self._pending[edge] = None


def run_adaptive_embed(
    g: DynamicGraph,
    task: EmbeddingTask,
    rng: np.random.Generator,
    check_feasible: bool = True,
) -> EmbedResult:
    """Drive the adaptive embedding until success or budget exhaustion."""
    if check_feasible:
        task.require_feasible()
    adversary = AdaptiveEmbedAdversary(task)
    source = SmoothedSource(
        Model.ADAPTIVE, SmoothingParams(task.p), adversary, g.n, rng=rng
    )
    hits = 0
    steps = 0
    while not adversary.done and steps < task.budget:
        ev = source.next_change(g)
        g.flip(*ev.edge)
        if ev.provenance is Provenance.RANDOM and ev.edge in task.region:
            hits += 1
        adversary.notify(ev.edge)
        steps += 1
    return EmbedResult(adversary.done, steps, hits)


@dataclass(frozen=True)
class PhaseScript:
    region: frozenset
    phases: Tuple[Tuple[Pair, ...], ...]  # per-phase flip sets, each <= r_hat

    @property
    def r_hat(self) -> int:
        return max((len(ph) for ph in self.phases), default=0)


@dataclass
class MultiphaseResult:
    success: bool
    per_phase_steps: List[int]
    total_steps: int
    budget: float  # 12 k r_hat / p
    within_budget: bool


def multiphase_embed(
    g: DynamicGraph,
    script: PhaseScript,
    p: float,
    rng: np.random.Generator,
    c: float = 1.0,
    check_feasible: bool = True,
    on_phase_done=None,
) -> MultiphaseResult:
    """Realize k flip batches in sequence with a per-phase step cutoff.

    The cutoff is 40(c+2) * r_hat * log(k) / p (log floored at 1 so the
    k=1 case degenerates to a single adaptive embedding with a positive
    budget); the advertised total budget is 12 k r_hat / p.
    """
    k = len(script.phases)
    r_hat = script.r_hat
    if k == 0:
        return MultiphaseResult(True, [], 0, 0.0, True)
    if p <= 0:
        raise InfeasibleTaskError("multiphase embedding requires p > 0")
    cutoff = math.ceil(40.0 * (c + 2.0) * r_hat * max(math.log(k), 1.0) / p)
    budget = 12.0 * k * r_hat / p
    per_phase: List[int] = []
    success = True
    for flips in script.phases:
        task = EmbeddingTask(g.n, script.region, tuple(flips), p, cutoff)
        result = run_adaptive_embed(g, task, rng, check_feasible=check_feasible)
        per_phase.append(result.steps_used)
        if not result.success:
            success = False
            break
        if on_phase_done is not None:
            on_phase_done(g)
    total = sum(per_phase)
    return MultiphaseResult(success, per_phase, total, budget, success and total <= budget)


def run_oblivious_ar_embed(
    n: int,
    region: Sequence[Pair],
    flips: Sequence[Pair],
    p: float,
    budget: int,
    rng: np.random.Generator,
    initial_state: Optional[Dict[Pair, bool]] = None,
) -> EmbedResult:
    """Oblivious add/remove embedding of R' inside R.

    The adversary knows the intended pre-state of every R' edge and
    round-robins idempotent Add/Remove proposals toward the flipped
    targets; it gets no feedback.  Success is measured post hoc as
    (G xor G_start) intersected with R equal to R' exactly.  Only the
    region's edge states are tracked; flips outside R cannot affect the
    outcome.
    """
    region_pairs = [pair(u, v) for u, v in region]
    flip_list = [pair(u, v) for u, v in flips]
    if initial_state is None:
        bits = rng.random(len(region_pairs)) < 0.5
        state = {e: bool(b) for e, b in zip(region_pairs, bits)}
    else:
        state = {e: bool(initial_state[e]) for e in region_pairs}
    start = dict(state)
    target = {e: not start[e] for e in flip_list}
    hits = 0
    k = 0
    for _ in range(budget):
        if rng.random() < p:
            e = flip_list[k % len(flip_list)]
            k += 1
            state[e] = target[e]  # idempotent add/remove toward the target
        else:
            f = uniform_pair(n, rng)
            if f in state:
                state[f] = not state[f]
                hits += 1
    flip_set = set(flip_list)
    success = all(
        (state[e] != start[e]) == (e in flip_set) for e in region_pairs
    )
    return EmbedResult(success, budget, hits)


def oblivious_ar_failure_bound(r_prime: int, r: int, n: int, q: float, budget: int) -> float:
    """Numeric value of the failure bound r' q^{l/r'} + q l r / n^2."""
    return r_prime * q ** (budget / r_prime) + q * budget * r / float(n * n)


# -- scripted worst-case phase driver ------------------------------------


@dataclass
class PhaseOutcome:
    realized: bool
    expected: str
    observed: Optional[str]

    @property
    def agrees(self) -> Optional[bool]:
        return None if not self.realized else self.observed == self.expected


def parse_phase_script(text: str) -> List[Tuple[List[Pair], str]]:
    """Parse the phase-script format.

    One block per phase::

        phase
        flip u v
        ...
        expect <token>
    """
    phases: List[Tuple[List[Pair], str]] = []
    flips: Optional[List[Pair]] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line == "phase":
            if flips is not None:
                raise ValueError(f"line {lineno}: previous phase missing 'expect'")
            flips = []
        elif line.startswith("flip "):
            if flips is None:
                raise ValueError(f"line {lineno}: 'flip' outside a phase")
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'flip u v'")
            flips.append(pair(int(parts[1]), int(parts[2])))
        elif line.startswith("expect "):
            if flips is None:
                raise ValueError(f"line {lineno}: 'expect' outside a phase")
            phases.append((flips, line.split(None, 1)[1]))
            flips = None
        else:
            raise ValueError(f"line {lineno}: unrecognized directive {line!r}")
    if flips is not None:
        raise ValueError("final phase missing 'expect'")
    return phases


def scripted_phase_driver(
    g: DynamicGraph,
    region: Sequence[Pair],
    script: Sequence[Tuple[Sequence[Pair], str]],
    p: float,
    rng: np.random.Generator,
    query_fn,
    c: float = 1.0,
    check_feasible: bool = True,
) -> List[PhaseOutcome]:
    """Realize each scripted flip batch, then record the answer under test.

    Phases whose embedding fails are marked unverifiable (realized=False)
    and carry no observed answer.
    """
    region_set = frozenset(pair(u, v) for u, v in region)
    k = max(len(script), 1)
    r_hat = max((len(flips) for flips, _ in script), default=1)
    cutoff = math.ceil(40.0 * (c + 2.0) * max(r_hat, 1) * max(math.log(k), 1.0) / p)
    outcomes: List[PhaseOutcome] = []
    for flips, expected in script:
        task = EmbeddingTask(g.n, region_set, tuple(flips), p, cutoff)
        result = run_adaptive_embed(g, task, rng, check_feasible=check_feasible)
        if result.success:
            outcomes.append(PhaseOutcome(True, expected, str(query_fn(g))))
        else:
            outcomes.append(PhaseOutcome(False, expected, None))
    return outcomes
