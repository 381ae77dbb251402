"""Reduction pipeline: parity OuMv via path counting.

Contents:

* exact Poisson sampling (sequential exponential spacings) and
  parity-conditioned Poisson sampling;
* the adversarial change distribution over a P3-partite layout and a
  histogram authenticity check against synthesized reduction sequences;
* the three-copy solver answering online u^T M v over F2 through s-t
  3-path counters;
* the sixteen-graph construction that recovers a restricted instance's
  interior count from unrestricted counters by inclusion-exclusion;
* worst-case-to-average massaging for OuMv (random zeroing of M and the
  8-way random split).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import IO, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .counters import InvariantError, STPath3Counter
from .graph import DynamicGraph, Pair, pair
from .oracles import bf_st_paths
from .smoothing import Model, SmoothedSource, SmoothingParams, UniformFlipAdversary


# -- Poisson machinery ---------------------------------------------------


def poisson_sample(lam: float, rng: np.random.Generator) -> int:
    """Exact Poisson(lam) draw via exponential spacings, O(output+1)."""
    if lam < 0:
        raise ValueError(f"lambda={lam} must be nonnegative")
    if lam == 0:
        return 0
    k = 0
    total = rng.standard_exponential()
    while total <= lam:
        k += 1
        total += rng.standard_exponential()
    return k


class ParitySamplingError(RuntimeError):
    pass


_PARITY_RETRY_CAP = 64


def poisson_parity_conditional(lam: float, parity: int, rng: np.random.Generator) -> int:
    """Poisson(lam) conditioned on the output's parity, by rejection.

    The target parity has mass (1 +- e^{-2 lam})/2 >= 1/3 for lam >= ln(3)/2,
    so 64 retries push the failure probability below 2^-64 at any
    reasonable lambda; an exhausted cap signals a pathologically small
    lambda paired with parity 1.
    """
    if lam <= 0:
        raise ValueError(f"lambda={lam} must be positive")
    parity &= 1
    for _ in range(_PARITY_RETRY_CAP):
        z = poisson_sample(lam, rng)
        if z % 2 == parity:
            return z
    raise ParitySamplingError(
        f"no Poisson({lam}) draw of parity {parity} in {_PARITY_RETRY_CAP} tries"
    )


def poisson_even_mass(lam: float) -> float:
    """P(Poisson(lam) is even) = (1 + e^{-2 lam})/2."""
    return (1.0 + math.exp(-2.0 * lam)) / 2.0


# -- P3-partite layout and the adversarial change distribution -----------


@dataclass(frozen=True)
class P3Layout:
    """Node layout {s} + A + B + {t} with allowed edges sA, AB, Bt.

    Node ids: s=0, A = 1..n, B = n+1..2n, t = 2n+1.
    """

    n: int

    @property
    def n_nodes(self) -> int:
        return 2 * self.n + 2

    @property
    def s(self) -> int:
        return 0

    @property
    def t(self) -> int:
        return 2 * self.n + 1

    def a(self, i: int) -> int:
        return 1 + i

    def b(self, j: int) -> int:
        return self.n + 1 + j

    def sa_edge(self, i: int) -> Pair:
        return pair(self.s, self.a(i))

    def bt_edge(self, j: int) -> Pair:
        return pair(self.b(j), self.t)

    def ab_edge(self, i: int, j: int) -> Pair:
        return pair(self.a(i), self.b(j))

    def interior_edges(self) -> List[Pair]:
        n = self.n
        out = [self.sa_edge(i) for i in range(n)]
        out += [self.bt_edge(j) for j in range(n)]
        out += [self.ab_edge(i, j) for i in range(n) for j in range(n)]
        return out

    def classify(self, e: Pair) -> Optional[str]:
        u, v = e
        n = self.n
        u_role = self._role(u)
        v_role = self._role(v)
        kinds = {u_role, v_role}
        if kinds == {"s", "A"}:
            return "sA"
        if kinds == {"A", "B"}:
            return "AB"
        if kinds == {"B", "t"}:
            return "Bt"
        return None

    def _role(self, v: int) -> str:
        if v == 0:
            return "s"
        if v <= self.n:
            return "A"
        if v <= 2 * self.n:
            return "B"
        return "t"

    def graph_of(self, M: np.ndarray, u: np.ndarray, v: np.ndarray) -> DynamicGraph:
        """Graph mirroring the matrix (AB) and the two vectors (sA / Bt)."""
        n = self.n
        edges = [self.sa_edge(i) for i in range(n) if u[i]]
        edges += [self.bt_edge(j) for j in range(n) if v[j]]
        edges += [self.ab_edge(i, j) for i in range(n) for j in range(n) if M[i][j]]
        return DynamicGraph(self.n_nodes, edges)


@dataclass(frozen=True)
class ChangeDistribution:
    """Per-edge adversarial change distribution over a P3 layout.

    Side (sA/Bt) edges each carry p/(2n) + (1-p)/(n(n+2)); middle (AB)
    edges carry (1-p)/(n(n+2)); the 2n side + n^2 middle masses sum to 1.
    """

    p: float
    n: int

    @property
    def q_side(self) -> float:
        n = self.n
        return self.p / (2 * n) + (1 - self.p) / (n * (n + 2))

    @property
    def q_mid(self) -> float:
        n = self.n
        return (1 - self.p) / (n * (n + 2))

    def normalization_defect(self) -> float:
        return abs(2 * self.n * self.q_side + self.n * self.n * self.q_mid - 1.0)

    @staticmethod
    def exact_normalization(p: Fraction, n: int) -> Fraction:
        q_side = p / (2 * n) + (1 - p) / (n * (n + 2))
        q_mid = (1 - p) / (n * (n + 2))
        return 2 * n * q_side + n * n * q_mid

    def sample_edge(self, layout: P3Layout, rng: np.random.Generator) -> Pair:
        n = self.n
        if rng.random() < self.p:
            k = int(rng.integers(2 * n))
            return layout.sa_edge(k) if k < n else layout.bt_edge(k - n)
        k = int(rng.integers(n * (n + 2)))
        if k < n:
            return layout.sa_edge(k)
        if k < 2 * n:
            return layout.bt_edge(k - n)
        k -= 2 * n
        return layout.ab_edge(k // n, k % n)


def rounds_parameter(n: int, p: float) -> int:
    """t = ceil(5 n ln(n) / p); natural log."""
    if p <= 0:
        raise ValueError("the round parameter requires p > 0")
    if n < 2:
        raise ValueError("need n >= 2")
    return math.ceil(5.0 * n * math.log(n) / p)


# -- OuMv instances ------------------------------------------------------


@dataclass
class OuMvInstance:
    n: int
    M: np.ndarray  # n x n bits
    rounds: List[Tuple[np.ndarray, np.ndarray]]  # n+1 pairs (u_i, v_i)

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=np.uint8) % 2
        if self.M.shape != (self.n, self.n):
            raise ValueError("M dimension mismatch")
        self.rounds = [
            (np.asarray(u, dtype=np.uint8) % 2, np.asarray(v, dtype=np.uint8) % 2)
            for u, v in self.rounds
        ]
        for u, v in self.rounds:
            if u.shape != (self.n,) or v.shape != (self.n,):
                raise ValueError("vector dimension mismatch")


def random_oumv_instance(n: int, rng: np.random.Generator) -> OuMvInstance:
    M = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
    rounds = [
        (
            rng.integers(0, 2, size=n, dtype=np.uint8),
            rng.integers(0, 2, size=n, dtype=np.uint8),
        )
        for _ in range(n + 1)
    ]
    return OuMvInstance(n, M, rounds)


def write_oumv_instance(inst: OuMvInstance, fp: IO[str]) -> None:
    fp.write(f"{inst.n}\n")
    for row in inst.M:
        fp.write("".join(str(int(b)) for b in row) + "\n")
    for u, v in inst.rounds:
        fp.write(
            "".join(str(int(b)) for b in u) + " " + "".join(str(int(b)) for b in v) + "\n"
        )


def read_oumv_instance(fp: IO[str]) -> OuMvInstance:
    n = int(fp.readline())
    M = np.array(
        [[int(ch) for ch in fp.readline().strip()] for _ in range(n)], dtype=np.uint8
    )
    rounds = []
    for _ in range(n + 1):
        ub, vb = fp.readline().split()
        rounds.append(
            (np.array([int(c) for c in ub], np.uint8), np.array([int(c) for c in vb], np.uint8))
        )
    return OuMvInstance(n, M, rounds)


def f2_oumv_oracle(M, u, v) -> int:
    """u^T M v over F2 by direct evaluation."""
    M = np.asarray(M, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if M.shape != (u.shape[0], v.shape[0]):
        raise ValueError("dimension mismatch")
    return int(u @ (M @ v)) % 2


def int_oumv_oracle(M, u, v) -> int:
    M = np.asarray(M, dtype=np.int64)
    return int(np.asarray(u, np.int64) @ (M @ np.asarray(v, np.int64)))


# -- the three-copy solver (parity OuMv via st3 counting) ----------------


def st3_counter_factory(g: DynamicGraph, s: int, t: int) -> STPath3Counter:
    return STPath3Counter(g, s, t)


class ExactST3Counter:
    """Oracle-backed stand-in with the counter interface."""

    def __init__(self, g: DynamicGraph, s: int, t: int):
        self.g, self.s, self.t = g, s, t

    def update(self, e, now_present) -> None:
        pass

    def query(self) -> int:
        return bf_st_paths(self.g, self.s, self.t, 3)


def exact_st3_counter_factory(g: DynamicGraph, s: int, t: int) -> ExactST3Counter:
    return ExactST3Counter(g, s, t)


class ParityOuMvSolver:
    """Answers online u^T M v over F2 through three st3 counters.

    Three graph copies, all initially mirroring (M, u_0, v_0), absorb
    each round's difference vectors through a shared parity-exact batch
    of side-edge changes plus pairwise-shared Poisson batches of AB
    changes; the AB batches cancel mod 2 so the three matrices always
    sum to M over F2, and the answer is the parity of the three queries.
    """

    def __init__(
        self,
        M: np.ndarray,
        u0: np.ndarray,
        v0: np.ndarray,
        p: float,
        counter_factory: Callable[[DynamicGraph, int, int], object],
        rng: np.random.Generator,
    ):
        self.n = len(u0)
        self.p = p
        self.rng = rng
        self.layout = P3Layout(self.n)
        self.t_param = rounds_parameter(self.n, p)
        self.dist = ChangeDistribution(p, self.n)
        self.lam_side = self.dist.q_side * self.t_param
        self.lam_ab = (1.0 - p) * self.n / (self.n + 2) * self.t_param / 2.0
        self.graphs = [self.layout.graph_of(M, u0, v0) for _ in range(3)]
        self.counters = [
            counter_factory(g, self.layout.s, self.layout.t) for g in self.graphs
        ]
        self.u_prev = np.asarray(u0, dtype=np.uint8) % 2
        self.v_prev = np.asarray(v0, dtype=np.uint8) % 2

    def initial_answer(self) -> int:
        return self.counters[0].query() % 2

    def _apply(self, j: int, seq: List[Pair]) -> None:
        g, counter = self.graphs[j], self.counters[j]
        for e in seq:
            present = not g.has_pair(e)
            counter.update(e, present)
            g.flip(*e)

    def round(self, u: np.ndarray, v: np.ndarray) -> int:
        layout, rng, n = self.layout, self.rng, self.n
        u = np.asarray(u, dtype=np.uint8) % 2
        v = np.asarray(v, dtype=np.uint8) % 2
        u_dif = u ^ self.u_prev
        v_dif = v ^ self.v_prev
        shared: List[Pair] = []
        for i in range(n):
            z = poisson_parity_conditional(self.lam_side, int(u_dif[i]), rng)
            shared.extend([layout.sa_edge(i)] * z)
        for j in range(n):
            z = poisson_parity_conditional(self.lam_side, int(v_dif[j]), rng)
            shared.extend([layout.bt_edge(j)] * z)
        seqs: List[List[Pair]] = [list(shared) for _ in range(3)]
        if self.lam_ab > 0:
            for j in range(3):
                z = poisson_sample(self.lam_ab, rng)
                for _ in range(z):
                    e = layout.ab_edge(int(rng.integers(n)), int(rng.integers(n)))
                    for other in range(3):
                        if other != j:
                            seqs[other].append(e)
        for j in range(3):
            rng.shuffle(seqs[j])
            self._apply(j, seqs[j])
        self.u_prev, self.v_prev = u, v
        return sum(c.query() for c in self.counters) % 2


@dataclass
class SolOutcome:
    answers: List[int]
    oracle_answers: List[int]

    @property
    def errors(self) -> int:
        return sum(a != b for a, b in zip(self.answers, self.oracle_answers))


def sol_solve(
    instance: OuMvInstance,
    p: float,
    counter_factory: Callable,
    rng: np.random.Generator,
) -> SolOutcome:
    u0, v0 = instance.rounds[0]
    solver = ParityOuMvSolver(instance.M, u0, v0, p, counter_factory, rng)
    answers = [solver.initial_answer()]
    oracle = [f2_oumv_oracle(instance.M, u0, v0)]
    for u, v in instance.rounds[1:]:
        answers.append(solver.round(u, v))
        oracle.append(f2_oumv_oracle(instance.M, u, v))
    return SolOutcome(answers, oracle)


# -- sequence authenticity check -----------------------------------------


@dataclass
class HistogramFit:
    type_counts: np.ndarray  # 2 x 3: rows genuine/synthesized, cols sA/Bt/AB
    type_pvalue: float
    length_pvalue: float


def _two_sample_chi2_pvalue(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample chi-square on integer samples, shared adaptive bins."""
    combined = np.concatenate([a, b])
    lo, hi = combined.min(), combined.max()
    edges = np.unique(np.percentile(combined, np.linspace(0, 100, 21)))
    if len(edges) < 3:
        edges = np.array([lo - 0.5, (lo + hi) / 2.0, hi + 0.5])
    edges[0] -= 0.5
    edges[-1] += 0.5
    ca, _ = np.histogram(a, bins=edges)
    cb, _ = np.histogram(b, bins=edges)
    keep = (ca + cb) >= 5
    table = np.vstack([ca[keep], cb[keep]])
    if table.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(table).pvalue)


def dadvp_verify_histogram(
    p: float,
    n: int,
    samples: int,
    rng: np.random.Generator,
    t_param: Optional[int] = None,
) -> HistogramFit:
    """Compare synthesized reduction sequences against genuine ones.

    Genuine: Poisson(t)-length i.i.d. samples from the adversarial change
    distribution.  Synthesized: one copy's sequence built by the solver's
    construction, with the round's difference vectors themselves drawn
    from the adversarial process.  Compares edge-type occupancy and total
    sequence length by chi-square.
    """
    if t_param is None:
        t_param = rounds_parameter(n, p)
    dist = ChangeDistribution(p, n)
    lam_side = dist.q_side * t_param
    lam_ab = (1.0 - p) * n / (n + 2) * t_param / 2.0
    p_side_total = 2 * n * dist.q_side
    p_mid_total = n * n * dist.q_mid
    probs = [p_side_total / 2.0, p_side_total / 2.0, p_mid_total]
    genuine = np.empty((samples, 3), dtype=np.int64)
    for i in range(samples):
        length = poisson_sample(t_param, rng)
        genuine[i] = rng.multinomial(length, probs)
    synth = np.empty((samples, 3), dtype=np.int64)
    for i in range(samples):
        n_sa = n_bt = 0
        for _ in range(n):  # sA edges
            parity = poisson_sample(lam_side, rng) % 2  # u_dif entry
            n_sa += poisson_parity_conditional(lam_side, parity, rng)
        for _ in range(n):  # Bt edges
            parity = poisson_sample(lam_side, rng) % 2
            n_bt += poisson_parity_conditional(lam_side, parity, rng)
        n_ab = 0
        if lam_ab > 0:
            n_ab = poisson_sample(lam_ab, rng) + poisson_sample(lam_ab, rng)
        synth[i] = (n_sa, n_bt, n_ab)
    totals = np.vstack([genuine.sum(axis=0), synth.sum(axis=0)])
    cols = totals.sum(axis=0) > 0
    type_p = float(stats.chi2_contingency(totals[:, cols]).pvalue) if cols.sum() > 1 else 1.0
    length_p = _two_sample_chi2_pvalue(genuine.sum(axis=1), synth.sum(axis=1))
    return HistogramFit(totals, type_p, length_p)


# -- sixteen-graph inclusion-exclusion -----------------------------------


def alpha_of(p, n: int):
    """Mixing coefficient alpha and induced p' = alpha * p.

    |R| = n(n+2) interior pairs; |R-bar| = binom(2n+2, 2) - |R| exterior
    pairs (including (s,t)).  Exact rational arithmetic when p is a
    Fraction.
    """
    r = n * (n + 2)
    total = (n + 1) * (2 * n + 1)
    rbar = total - r
    if isinstance(p, Fraction):
        alpha = Fraction(r, 1) / (r + (1 - p) * rbar)
    else:
        alpha = r / (r + (1.0 - p) * rbar)
    if not (Fraction(1, 2) <= Fraction(alpha) <= 1):
        raise InvariantError(f"alpha={alpha} outside [1/2, 1]")
    return alpha, alpha * p


EXTERIOR_TYPES = ("sB", "At", "AA", "BB")


class SixteenPack:
    """Sixteen unrestricted graphs recovering a P3 instance's count.

    All sixteen graphs share the interior (sA/AB/Bt) edges and the (s,t)
    bit; each of the four exterior edge types (sB, At, AA, BB) is split
    into two random parts and every graph takes one part per type -- all
    16 part combinations.  Every realized flip lands on all sixteen
    graphs, which keeps the parts a proper partition; the interior 3-path
    count is recovered as

        C = (sum_i C^i - 4 C_AB - 4(n-1) (C_sA + C_Bt)) / 16
    """

    def __init__(
        self,
        layout: P3Layout,
        interior: DynamicGraph,
        p: float,
        rng: np.random.Generator,
    ):
        n = layout.n
        self.layout = layout
        self.p = p
        self.interior = interior.copy()
        for e in self.interior.edges():
            if layout.classify(e) is None:
                raise ValueError(f"interior graph holds exterior edge {e}")
        self.st_edge = pair(layout.s, layout.t)
        a_nodes = [layout.a(i) for i in range(n)]
        b_nodes = [layout.b(j) for j in range(n)]
        self.type_edges: Dict[str, List[Pair]] = {
            "sB": [pair(layout.s, b) for b in b_nodes],
            "At": [pair(a, layout.t) for a in a_nodes],
            "AA": [pair(x, y) for x, y in combinations(a_nodes, 2)],
            "BB": [pair(x, y) for x, y in combinations(b_nodes, 2)],
        }
        self._type_of: Dict[Pair, str] = {
            e: name for name, edges in self.type_edges.items() for e in edges
        }
        self.parts: Dict[str, Tuple[set, set]] = {}
        for name, edges in self.type_edges.items():
            coins = rng.random(len(edges)) < 0.5
            part1 = {e for e, c in zip(edges, coins) if c}
            part0 = set(edges) - part1
            self.parts[name] = (part0, part1)
        self.st_present = bool(rng.random() < 0.5)
        alpha, p_prime = alpha_of(p, n)
        self.alpha = float(alpha)
        self.p_prime = float(p_prime)
        self.exterior_all: List[Pair] = [self.st_edge]
        for edges in self.type_edges.values():
            self.exterior_all.extend(edges)
        # interior per-type edge counts
        self.c_sa = self.c_ab = self.c_bt = 0
        for e in self.interior.edges():
            self._count_interior(e, +1)
        self.graphs: List[DynamicGraph] = []
        for i in range(16):
            edges = set(self.interior.edges())
            for l, name in enumerate(EXTERIOR_TYPES):
                edges |= self.parts[name][(i >> l) & 1]
            if self.st_present:
                edges.add(self.st_edge)
            self.graphs.append(DynamicGraph(layout.n_nodes, edges))

    def _count_interior(self, e: Pair, delta: int) -> None:
        kind = self.layout.classify(e)
        if kind == "sA":
            self.c_sa += delta
        elif kind == "AB":
            self.c_ab += delta
        elif kind == "Bt":
            self.c_bt += delta

    def step(self, next_interior: Callable[[], Pair], rng: np.random.Generator) -> Tuple[Pair, bool]:
        """One step: with probability alpha consume an interior change,
        else flip a uniform exterior pair; apply to all sixteen graphs."""
        if rng.random() < self.alpha:
            e = next_interior()
            if self.layout.classify(e) is None:
                raise ValueError(f"interior source produced exterior edge {e}")
            delta = -1 if self.interior.has_pair(e) else +1
            self._count_interior(e, delta)
            self.interior.flip(*e)
            interior = True
        else:
            e = self.exterior_all[int(rng.integers(len(self.exterior_all)))]
            if e == self.st_edge:
                self.st_present = not self.st_present
            else:
                kind = self._exterior_type(e)
                p0, p1 = self.parts[kind]
                p0.symmetric_difference_update({e})
                p1.symmetric_difference_update({e})
            interior = False
        for g in self.graphs:
            g.flip(*e)
        return e, interior

    def _exterior_type(self, e: Pair) -> str:
        try:
            return self._type_of[e]
        except KeyError:
            raise ValueError(f"{e} is not an exterior edge") from None

    def recombine(self, counts: Sequence[int]) -> int:
        n = self.layout.n
        numerator = (
            sum(counts) - 4 * self.c_ab - 4 * (n - 1) * (self.c_sa + self.c_bt)
        )
        if numerator % 16 != 0:
            raise InvariantError(
                f"recombination numerator {numerator} not divisible by 16"
            )
        return numerator // 16

    def query(self, count_fn: Callable[[DynamicGraph], int]) -> int:
        return self.recombine([count_fn(g) for g in self.graphs])

    def check_partition(self) -> None:
        signatures = set()
        for i, g in enumerate(self.graphs):
            edge_set = g.edge_set()
            sig = []
            for l, name in enumerate(EXTERIOR_TYPES):
                p0, p1 = self.parts[name]
                expected = p1 if (i >> l) & 1 else p0
                got = edge_set & frozenset(self.type_edges[name])
                if got != expected:
                    raise InvariantError(
                        f"graph {i} type {name}: partition part mismatch"
                    )
                sig.append(frozenset(expected))
            signatures.add(tuple(sig))
        if len(signatures) != 16:
            raise InvariantError("the 16 part combinations are not distinct")
        for name in EXTERIOR_TYPES:
            p0, p1 = self.parts[name]
            if p0 & p1:
                raise InvariantError(f"type {name} parts overlap")
            if (p0 | p1) != set(self.type_edges[name]):
                raise InvariantError(f"type {name} parts do not cover the type")


@dataclass
class P3ToGeneralRun:
    queries: List[Tuple[int, int, int]]  # (step, recovered, oracle)
    aborted: bool
    interior_steps: int
    total_steps: int


def run_p3_to_general(
    n: int,
    p: float,
    total_steps: int,
    query_every: int,
    rng: np.random.Generator,
    count_fn: Optional[Callable[[DynamicGraph], int]] = None,
    check_every_step: bool = False,
    interior_budget: Optional[int] = None,
    cap_factor: float = 3.0,
) -> P3ToGeneralRun:
    """Drive a SixteenPack against a p-smoothed interior source.

    The interior source is an oblivious-flip smoothed sequence restricted
    to the P3 pairs with a uniform adversary.  At every query the
    recovered count is paired with the interior oracle's count.  With an
    ``interior_budget`` T the run aborts once cap_factor*T total steps
    have elapsed (the configurable abort of the reduction).
    """
    layout = P3Layout(n)
    restriction = tuple(layout.interior_edges())
    params = SmoothingParams(p, restriction=restriction)
    adversary = UniformFlipAdversary(
        layout.n_nodes, rng.spawn(1)[0], restriction=restriction
    )
    source = SmoothedSource(
        Model.OBLIVIOUS_FLIP, params, adversary, layout.n_nodes, rng=rng.spawn(1)[0]
    )
    from .graph import random_graph

    interior0 = random_graph(layout.n_nodes, rng, restriction=restriction)
    pack = SixteenPack(layout, interior0, p, rng)
    if count_fn is None:
        count_fn = lambda g: bf_st_paths(g, layout.s, layout.t, 3)
    interior_steps = 0
    queries: List[Tuple[int, int, int]] = []
    aborted = False
    cap = None if interior_budget is None else int(cap_factor * interior_budget)

    def next_interior() -> Pair:
        nonlocal interior_steps
        interior_steps += 1
        return source.next_change().edge

    step = 0
    for step in range(1, total_steps + 1):
        if cap is not None and step > cap and interior_steps < interior_budget:
            aborted = True
            break
        pack.step(next_interior, rng)
        if check_every_step:
            pack.check_partition()
        if step % query_every == 0:
            recovered = pack.query(count_fn)
            oracle = bf_st_paths(pack.interior, layout.s, layout.t, 3)
            queries.append((step, recovered, oracle))
    return P3ToGeneralRun(queries, aborted, interior_steps, step)


# -- OMv massaging (random zeroing + 8-way split) ------------------------


def omv_parity_reduction(
    M, u, v, parity_solver: Callable, repetitions: int, rng: np.random.Generator
) -> int:
    """Existence (u^T M v > 0?) from a parity solver by random zeroing.

    Each repetition keeps every 1-entry of M independently with
    probability 1/2; a zero integer product stays zero, a positive one
    has odd parity with probability 1/2 per repetition.
    """
    M = np.asarray(M, dtype=np.uint8) % 2
    for _ in range(repetitions):
        keep = rng.integers(0, 2, size=M.shape, dtype=np.uint8)
        if parity_solver(M * keep, u, v) == 1:
            return 1
    return 0


def worstcase_to_average_split(
    M, u, v, avg_solver: Callable, rng: np.random.Generator
) -> int:
    """Parity of u^T M v from a solver for uniformly random inputs.

    Splits M = M1 + M2, u = u1 + u2, v = v1 + v2 over F2 with uniform
    first halves; the answer is the mod-2 sum of the eight sub-products.
    """
    M = np.asarray(M, dtype=np.uint8) % 2
    u = np.asarray(u, dtype=np.uint8) % 2
    v = np.asarray(v, dtype=np.uint8) % 2
    n = M.shape[0]
    M1 = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
    u1 = rng.integers(0, 2, size=n, dtype=np.uint8)
    v1 = rng.integers(0, 2, size=n, dtype=np.uint8)
    M2, u2, v2 = M ^ M1, u ^ u1, v ^ v1
    total = 0
    for ub in (u1, u2):
        for Mb in (M1, M2):
            for vb in (v1, v2):
                total += avg_solver(Mb, ub, vb)
    return total % 2
