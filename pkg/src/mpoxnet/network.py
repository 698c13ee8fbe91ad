"""Temporal configuration-model network with main, casual and one-time ties.

Persistent (main/casual) partnerships carry a geometric lifetime.  When one
expires both endpoints join a FIFO wait-list for that kind and are re-paired
with anyone except their most recent ex-partner.  One-time ties are redrawn
from scratch every day.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels as _default_kernels
from .errors import ConfigurationError, QueryError
from .rng import draw_categorical, draw_count_geometric, draw_duration_geometric

MAIN, CASUAL, ONETIME = 0, 1, 2
KIND_NAMES = ("main", "casual", "onetime")

# Relationship classes, indexed 0..5: (target main, target casual).
REL_CLASS_WEIGHTS = (0.471, 0.167, 0.074, 0.22, 0.047, 0.021)
REL_CLASS_MAIN = np.array([0, 0, 0, 1, 1, 1], dtype=np.int64)
REL_CLASS_CASUAL = np.array([0, 1, 2, 0, 1, 2], dtype=np.int64)
REL_CLASS_LABELS = ("0M0C", "0M1C", "0M2C", "1M0C", "1M1C", "1M2C")

STRATUM_WEIGHTS = (0.19, 0.19, 0.19, 0.19, 0.19, 0.05)
STRATUM_P_ONETIME = (0.0, 0.001, 0.0054, 0.0101, 0.0315, 0.286)

MAIN_DURATION = 407.0
CASUAL_DURATION = 166.0

_MAX_PARITY_TRIES = 10_000


@dataclass
class Population:
    rel_class: np.ndarray
    stratum: np.ndarray  # 1..6
    target_main: np.ndarray
    target_casual: np.ndarray
    p_onetime_base: np.ndarray
    p_onetime: np.ndarray
    n_onetime0: np.ndarray

    @property
    def n(self) -> int:
        return int(self.rel_class.size)


def create_population(n_nodes, rng, *, rel_class_weights=REL_CLASS_WEIGHTS,
                      stratum_weights=STRATUM_WEIGHTS,
                      stratum_p_onetime=STRATUM_P_ONETIME,
                      rel_class=None, stratum=None) -> Population:
    """Assign relationship class, activity stratum and day-0 one-time counts.

    The whole assignment is redrawn until the main, casual and one-time stub
    totals are all even.  ``rel_class``/``stratum`` may be passed to pin those
    attributes (tests use this); pinned values are not redrawn.
    """
    if n_nodes < 2:
        raise ConfigurationError("population needs at least 2 nodes")
    p_table = np.asarray(stratum_p_onetime, dtype=np.float64)
    if p_table.size != 6 or np.any(p_table < 0) or np.any(p_table >= 1):
        raise ConfigurationError("stratum one-time probabilities must be six values in [0, 1)")
    fixed_rc = None if rel_class is None else np.asarray(rel_class, dtype=np.int64)
    fixed_st = None if stratum is None else np.asarray(stratum, dtype=np.int64)
    if fixed_rc is not None and fixed_rc.size != n_nodes:
        raise ConfigurationError("pinned rel_class has the wrong length")
    if fixed_st is not None and fixed_st.size != n_nodes:
        raise ConfigurationError("pinned stratum has the wrong length")

    for _ in range(_MAX_PARITY_TRIES):
        rc = fixed_rc if fixed_rc is not None else draw_categorical(rel_class_weights, rng, size=n_nodes)
        st = fixed_st if fixed_st is not None else draw_categorical(stratum_weights, rng, size=n_nodes) + 1
        p = p_table[st - 1]
        n_o = draw_count_geometric(p, rng, size=n_nodes)
        n_m = REL_CLASS_MAIN[rc]
        n_c = REL_CLASS_CASUAL[rc]
        if n_m.sum() % 2 == 0 and n_c.sum() % 2 == 0 and n_o.sum() % 2 == 0:
            return Population(
                rel_class=rc.astype(np.int64),
                stratum=st.astype(np.int64),
                target_main=n_m.copy(),
                target_casual=n_c.copy(),
                p_onetime_base=p.copy(),
                p_onetime=p.copy(),
                n_onetime0=n_o,
            )
    raise ConfigurationError("could not reach even stub totals; pinned attributes have odd parity")


def _edge_keys(u, v, n):
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    return lo * n + hi


class EdgeLog:
    """Append-only record of every partnership lifetime.

    A persistent edge formed on day ``f`` and removed during day ``d``'s
    update is live on snapshot days ``f .. d-1``.  One-time edges are live on
    the single day they were drawn.  Edges still live when the log is closed
    get ``dissolved = -1``.
    """

    def __init__(self):
        self._p = []
        self._o = []
        self.first_day = 0
        self.last_day = -1
        self._table = None

    def persistent(self, u, v, kind, formed, dissolved):
        if len(u):
            self._p.append(np.column_stack([u, v, kind, formed, dissolved]).astype(np.int64))
            self._table = None

    def onetime(self, u, v, day):
        self.last_day = max(self.last_day, day)
        if len(u):
            self._o.append(np.column_stack([u, v, np.full(len(u), day)]).astype(np.int64))
            self._table = None

    def close(self, parts: "PartnershipSet", day):
        self.last_day = max(self.last_day, day)
        self.persistent(parts.u, parts.v, parts.kind, parts.formed, np.full(parts.u.size, -1))

    def persistent_table(self) -> np.ndarray:
        """Rows of (u, v, kind, formed_day, dissolved_day)."""
        return np.concatenate(self._p) if self._p else np.empty((0, 5), np.int64)

    def onetime_table(self) -> np.ndarray:
        """Rows of (u, v, day)."""
        return np.concatenate(self._o) if self._o else np.empty((0, 3), np.int64)

    def lifetimes(self) -> np.ndarray:
        """All edges as (u, v, kind, formed_day, dissolved_day); one-time edges dissolve the next day."""
        p = self.persistent_table()
        o = self.onetime_table()
        o_rows = np.column_stack([o[:, 0], o[:, 1], np.full(len(o), ONETIME), o[:, 2], o[:, 2] + 1])
        return np.concatenate([p, o_rows.astype(np.int64)])


@dataclass
class PartnershipSet:
    n_nodes: int
    u: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    v: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    kind: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    remaining: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    formed: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    ou: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    ov: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    day: int = 0

    def add(self, u, v, kind, durations, day):
        self.u = np.concatenate([self.u, u])
        self.v = np.concatenate([self.v, v])
        self.kind = np.concatenate([self.kind, np.full(len(u), kind, dtype=np.int64)])
        self.remaining = np.concatenate([self.remaining, durations])
        self.formed = np.concatenate([self.formed, np.full(len(u), day, dtype=np.int64)])

    def live_edges(self):
        """(u, v, kind) of every live edge: persistent first, then one-time."""
        return (
            np.concatenate([self.u, self.ou]),
            np.concatenate([self.v, self.ov]),
            np.concatenate([self.kind, np.full(self.ou.size, ONETIME, dtype=np.int64)]),
        )

    def degree(self, kind) -> np.ndarray:
        if kind == ONETIME:
            u, v = self.ou, self.ov
        else:
            m = self.kind == kind
            u, v = self.u[m], self.v[m]
        return np.bincount(u, minlength=self.n_nodes) + np.bincount(v, minlength=self.n_nodes)

    def count(self, kind) -> int:
        if kind == ONETIME:
            return int(self.ou.size)
        return int(np.count_nonzero(self.kind == kind))


@dataclass
class RewiringState:
    n_nodes: int
    want: dict = field(default_factory=dict)  # kind -> (nodes, entry_day) FIFO arrays
    last_partner: dict = field(default_factory=dict)  # kind -> int64[N], -1 if none
    entries: dict = field(default_factory=lambda: {MAIN: 0, CASUAL: 0})
    delayed: dict = field(default_factory=lambda: {MAIN: 0, CASUAL: 0})

    def __post_init__(self):
        for k in (MAIN, CASUAL):
            self.want.setdefault(k, (np.empty(0, np.int64), np.empty(0, np.int64)))
            self.last_partner.setdefault(k, np.full(self.n_nodes, -1, dtype=np.int64))

    def enqueue(self, kind, nodes, day):
        nodes = np.asarray(nodes, dtype=np.int64)
        w, d = self.want[kind]
        self.want[kind] = (np.concatenate([w, nodes]), np.concatenate([d, np.full(nodes.size, day, np.int64)]))

    def waiting(self, kind) -> np.ndarray:
        return self.want[kind][0]

    def delayed_percent(self, kind) -> float:
        e = self.entries[kind]
        return 100.0 * self.delayed[kind] / e if e else float("nan")


def _stub_list(counts) -> np.ndarray:
    return np.repeat(np.arange(counts.size, dtype=np.int64), counts)


def init_relationships(pop: Population, rng, *, main_duration=MAIN_DURATION,
                       casual_duration=CASUAL_DURATION, kern=None, log: EdgeLog | None = None):
    """Shuffle-and-pair stubs for one-time, then main, then casual ties.

    Returns ``(PartnershipSet, RewiringState)``.  Nodes left short of their
    target by an unrepairable pairing start out on the wait-list.
    """
    kern = kern or _default_kernels
    n = pop.n
    parts = PartnershipSet(n_nodes=n)
    rewiring = RewiringState(n_nodes=n)

    stubs = rng.permutation(_stub_list(pop.n_onetime0))
    ou, ov, _ = kern.pair_stubs(stubs, n)
    parts.ou, parts.ov = ou, ov
    if log is not None:
        log.onetime(ou, ov, 0)

    for kind, target, mean in ((MAIN, pop.target_main, main_duration),
                               (CASUAL, pop.target_casual, casual_duration)):
        stubs = rng.permutation(_stub_list(target))
        u, v, dropped = kern.pair_stubs(stubs, n)
        parts.add(u, v, kind, draw_duration_geometric(mean, rng, size=u.size), 0)
        if dropped:
            deficit = target - parts.degree(kind)
            rewiring.enqueue(kind, _stub_list(np.maximum(deficit, 0)), 0)
    return parts, rewiring


def update_onetime(pop: Population, parts: PartnershipSet, rng, day, *, kern=None,
                   log: EdgeLog | None = None):
    """Replace yesterday's one-time ties with a fresh draw for ``day``."""
    kern = kern or _default_kernels
    n = pop.n
    parts.ou = np.empty(0, np.int64)
    parts.ov = np.empty(0, np.int64)
    for _ in range(_MAX_PARITY_TRIES):
        counts = draw_count_geometric(pop.p_onetime, rng, size=n)
        if counts.sum() % 2 == 0:
            break
    else:  # pragma: no cover - probability ~2**-10000
        raise RuntimeError("one-time stub parity never reached")
    stubs = rng.permutation(_stub_list(counts))
    ou, ov, _ = kern.pair_stubs(stubs, n)
    parts.ou, parts.ov = ou, ov
    parts.day = day
    if log is not None:
        log.onetime(ou, ov, day)
    return parts


def update_persistent(pop: Population, parts: PartnershipSet, rewiring: RewiringState, day, rng, *,
                      main_duration=MAIN_DURATION, casual_duration=CASUAL_DURATION,
                      kern=None, log: EdgeLog | None = None):
    """Age persistent ties by one day, dissolve expired ones and rewire.

    Expired endpoints join the wait-list of that kind (one entry per lost
    edge, today's entries in random order behind anyone already waiting) and
    record each other as the excluded most recent partner.  Any entry made
    today that is still waiting afterwards counts as a delayed rewiring.
    """
    kern = kern or _default_kernels
    n = parts.n_nodes
    parts.remaining = parts.remaining - 1
    expired = parts.remaining <= 0
    if expired.any():
        eu, ev, ek = parts.u[expired], parts.v[expired], parts.kind[expired]
        if log is not None:
            log.persistent(eu, ev, ek, parts.formed[expired], np.full(eu.size, day))
        keep = ~expired
        parts.u, parts.v, parts.kind = parts.u[keep], parts.v[keep], parts.kind[keep]
        parts.remaining, parts.formed = parts.remaining[keep], parts.formed[keep]
        for kind in (MAIN, CASUAL):
            m = ek == kind
            if not m.any():
                continue
            a, b = eu[m], ev[m]
            last = rewiring.last_partner[kind]
            last[a] = b
            last[b] = a
            rewiring.enqueue(kind, rng.permutation(np.column_stack([a, b]).ravel()), day)
            rewiring.entries[kind] += 2 * int(m.sum())

    for kind, mean in ((MAIN, main_duration), (CASUAL, casual_duration)):
        wait, entered = rewiring.want[kind]
        if wait.size == 0:
            continue
        if wait.size > 1:
            live = parts.kind == kind
            keys = np.sort(_edge_keys(parts.u[live], parts.v[live], n))
            u, v, left = kern.pair_waitlist(wait, rewiring.last_partner[kind], keys, n)
            if u.size:
                parts.add(u, v, kind, draw_duration_geometric(mean, rng, size=u.size), day)
        else:
            left = np.ones(1, dtype=bool)
        rewiring.delayed[kind] += int(np.count_nonzero(left & (entered == day)))
        rewiring.want[kind] = (wait[left], entered[left])
    return parts


def cumulative_window_graph(log: EdgeLog, t0, t1, n_nodes):
    """Simple undirected graph of every edge live on any day in ``[t0, t1]``.

    Network updates run after transmission each day, so an edge logged as
    formed on day ``f`` is first live on ``f + 1`` and one dissolved on day
    ``d`` was last live on ``d``.  One-time edges drawn on day ``t`` are live
    on ``t + 1`` only.  All ``n_nodes`` nodes are present, isolated ones
    included.
    """
    import networkx as nx

    if t0 > t1:
        raise QueryError(f"window start {t0} is after end {t1}")
    if t0 < log.first_day or t1 > log.last_day:
        raise QueryError(f"window [{t0}, {t1}] outside logged days [{log.first_day}, {log.last_day}]")
    p = log.persistent_table()
    last_live = np.where(p[:, 4] < 0, np.iinfo(np.int64).max, p[:, 4])
    pm = (p[:, 3] + 1 <= t1) & (last_live >= t0)
    o = log.onetime_table()
    om = (o[:, 2] + 1 >= t0) & (o[:, 2] + 1 <= t1)
    g = nx.Graph()
    g.add_nodes_from(range(n_nodes))
    g.add_edges_from(zip(p[pm, 0].tolist(), p[pm, 1].tolist()))
    g.add_edges_from(zip(o[om, 0].tolist(), o[om, 1].tolist()))
    return g
