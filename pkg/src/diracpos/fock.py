"""Truncated fermionic Fock space over box modes (species c, d; momentum n; spin s).

Basis states are occupation bitmasks; bit ``k`` is the slot ``k`` of the
``ModeTable``. Ladder operators use the Jordan-Wigner sign string over the
lower-ordered slots. Operators are plain ``scipy.sparse`` CSR matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb, pi

import numpy as np
from scipy import sparse

from .spinors import DomainError, dispersion

SPECIES = ("c", "d")
SPIN_ORDER = (-0.5, 0.5)
DEFAULT_MAX_DIM = 250_000


class ResourceError(RuntimeError):
    def __init__(self, dim: int, budget: int):
        super().__init__(f"Fock dimension {dim} exceeds budget {budget}")
        self.dim = dim
        self.budget = budget


@dataclass(frozen=True)
class ModeTable:
    L: float
    N: int
    m: float

    def __post_init__(self):
        if self.L <= 0 or self.N < 0 or self.m <= 0:
            raise DomainError(f"invalid mode table L={self.L} N={self.N} m={self.m}")

    @cached_property
    def slots(self) -> tuple[tuple[str, int, float], ...]:
        return tuple(
            (sp, n, s) for sp in SPECIES for n in range(-self.N, self.N + 1) for s in SPIN_ORDER
        )

    @cached_property
    def _slot_index(self) -> dict[tuple[str, int, float], int]:
        return {key: k for k, key in enumerate(self.slots)}

    @property
    def n_modes(self) -> int:
        """Number of (p, s) modes per species."""
        return (2 * self.N + 1) * 2

    @property
    def n_slots(self) -> int:
        return 2 * self.n_modes

    @property
    def ns(self) -> range:
        return range(-self.N, self.N + 1)

    def momentum(self, n):
        return 2 * pi * np.asarray(n) / self.L

    def energy(self, n):
        return dispersion(self.momentum(n), self.m)

    def slot(self, species: str, n: int, s: float) -> int:
        try:
            return self._slot_index[(species, int(n), float(s))]
        except KeyError:
            raise DomainError(f"unknown slot ({species}, {n}, {s})") from None

    def mode_of_momentum(self, p: float, tol: float = 1e-9) -> int:
        n = p * self.L / (2 * pi)
        k = int(round(n))
        if abs(n - k) > tol or abs(k) > self.N:
            raise DomainError(f"momentum {p} is not a box mode of L={self.L}, N={self.N}")
        return k


def sector_dimension(n_slots: int, cap: int | None) -> int:
    if cap is None or cap >= n_slots:
        return 2**n_slots
    return sum(comb(n_slots, k) for k in range(cap + 1))


def _parity_below(b: int, k: int) -> int:
    return -1 if (b & ((1 << k) - 1)).bit_count() & 1 else 1


@dataclass(frozen=True, eq=False)
class FockSpace:
    table: ModeTable
    max_occupation: int | None = None
    states: tuple[int, ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> dict[int, int]:
        return {b: k for k, b in enumerate(self.states)}

    @cached_property
    def _ladder_cache(self) -> dict:
        return {}

    @cached_property
    def _structure_cache(self) -> dict:
        return {}

    def identity(self) -> sparse.csr_matrix:
        return sparse.identity(self.dim, dtype=complex, format="csr")

    def occupation(self, slot: int) -> np.ndarray:
        return np.array([(b >> slot) & 1 for b in self.states], dtype=float)

    def number_operator(self, species: str | None = None) -> sparse.csr_matrix:
        mask = 0
        for k, (sp, _, _) in enumerate(self.table.slots):
            if species is None or sp == species:
                mask |= 1 << k
        diag = np.array([(b & mask).bit_count() for b in self.states], dtype=complex)
        return sparse.diags(diag, format="csr")

    def structure(self, kind: str):
        """Index arrays (rows, cols, i, j, sign) for one family of quadratic terms.

        kind "AD": a_i^+ a_j; "DD": a_i^+ a_j^+; "AA": a_i a_j. Out-of-sector
        images are dropped (truncation).
        """
        cache = self._structure_cache
        if kind in cache:
            return cache[kind]
        rows, cols, ii, jj, sg = [], [], [], [], []
        index = self.index
        M = self.table.n_slots
        cap = self.max_occupation
        for col, b in enumerate(self.states):
            occ = [k for k in range(M) if (b >> k) & 1]
            if kind == "AD":
                for j in occ:
                    b1 = b ^ (1 << j)
                    s1 = _parity_below(b, j)
                    for i in range(M):
                        if (b1 >> i) & 1:
                            continue
                        row = index.get(b1 | (1 << i))
                        if row is None:
                            continue
                        rows.append(row), cols.append(col), ii.append(i), jj.append(j)
                        sg.append(s1 * _parity_below(b1, i))
            elif kind == "DD":
                if cap is not None and len(occ) + 2 > cap:
                    continue
                for j in range(M):
                    if (b >> j) & 1:
                        continue
                    b1 = b | (1 << j)
                    s1 = _parity_below(b, j)
                    for i in range(M):
                        if (b1 >> i) & 1:
                            continue
                        row = index.get(b1 | (1 << i))
                        if row is None:
                            continue
                        rows.append(row), cols.append(col), ii.append(i), jj.append(j)
                        sg.append(s1 * _parity_below(b1, i))
            elif kind == "AA":
                for j in occ:
                    b1 = b ^ (1 << j)
                    s1 = _parity_below(b, j)
                    for i in occ:
                        if i == j:
                            continue
                        row = index[b1 ^ (1 << i)]
                        rows.append(row), cols.append(col), ii.append(i), jj.append(j)
                        sg.append(s1 * _parity_below(b1, i))
            else:
                raise ValueError(kind)
        out = tuple(np.asarray(x, dtype=np.int64) for x in (rows, cols, ii, jj, sg))
        cache[kind] = out
        return out


def build_space(table: ModeTable, max_occupation: int | None = None, max_dim: int = DEFAULT_MAX_DIM) -> FockSpace:
    M = table.n_slots
    dim = sector_dimension(M, max_occupation)
    if dim > max_dim:
        raise ResourceError(dim, max_dim)
    if max_occupation is None or max_occupation >= M:
        return FockSpace(table, None, tuple(range(2**M)))
    states = [0]
    for k in range(1, max_occupation + 1):
        states.extend(sum(1 << i for i in idx) for idx in combinations(range(M), k))
    return FockSpace(table, max_occupation, tuple(states))


def ladder(space: FockSpace, slot: int, kind: str = "annihilate") -> sparse.csr_matrix:
    if not 0 <= slot < space.table.n_slots:
        raise DomainError(f"unknown slot {slot}")
    if kind not in ("annihilate", "create"):
        raise ValueError(f"kind must be 'annihilate' or 'create', got {kind!r}")
    cache = space._ladder_cache
    if slot not in cache:
        rows, cols, vals = [], [], []
        bit = 1 << slot
        for col, b in enumerate(space.states):
            if b & bit:
                rows.append(space.index[b ^ bit])
                cols.append(col)
                vals.append(_parity_below(b, slot))
        cache[slot] = sparse.csr_matrix(
            (np.asarray(vals, dtype=complex), (rows, cols)), shape=(space.dim, space.dim)
        )
    a = cache[slot]
    return a if kind == "annihilate" else a.conj().T.tocsr()


@dataclass
class QuadraticForm:
    """const + sum A_ij a_i^+ a_j + sum B_ij a_i^+ a_j^+ + sum C_ij a_i a_j (slot indices)."""

    const: complex
    A: np.ndarray
    B: np.ndarray | None = None
    C: np.ndarray | None = None

    @classmethod
    def zeros(cls, n_slots: int) -> "QuadraticForm":
        z = lambda: np.zeros((n_slots, n_slots), dtype=complex)  # noqa: E731
        return cls(0.0, z(), z(), z())

    def __add__(self, other: "QuadraticForm") -> "QuadraticForm":
        def add(x, y):
            if x is None:
                return y
            if y is None:
                return x
            return x + y

        return QuadraticForm(self.const + other.const, self.A + other.A, add(self.B, other.B), add(self.C, other.C))

    def scaled(self, f: complex) -> "QuadraticForm":
        return QuadraticForm(
            self.const * f,
            self.A * f,
            None if self.B is None else self.B * f,
            None if self.C is None else self.C * f,
        )

    def to_sparse(self, space: FockSpace) -> sparse.csr_matrix:
        D = space.dim
        parts_r, parts_c, parts_v = [np.arange(D)], [np.arange(D)], [np.full(D, self.const, dtype=complex)]
        for kind, coef in (("AD", self.A), ("DD", self.B), ("AA", self.C)):
            if coef is None or not np.any(coef):
                continue
            rows, cols, i, j, sg = space.structure(kind)
            parts_r.append(rows)
            parts_c.append(cols)
            parts_v.append(sg * coef[i, j])
        mat = sparse.coo_matrix(
            (np.concatenate(parts_v), (np.concatenate(parts_r), np.concatenate(parts_c))), shape=(D, D)
        ).tocsr()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        return mat

    def expectation(self, space: FockSpace, state: np.ndarray, moments=None) -> complex:
        """<state|form|state> without building the sparse matrix."""
        rho, kappa, lam = moments if moments is not None else one_body_moments(space, state)
        out = self.const * np.vdot(state, state)
        out += np.sum(self.A * rho)
        if self.B is not None:
            out += np.sum(self.B * kappa)
        if self.C is not None:
            out += np.sum(self.C * lam)
        return complex(out)


def one_body_moments(space: FockSpace, state: np.ndarray):
    """<a_i^+ a_j>, <a_i^+ a_j^+>, <a_i a_j> as dense slot-indexed arrays."""
    M = space.table.n_slots
    out = []
    for kind in ("AD", "DD", "AA"):
        rows, cols, i, j, sg = space.structure(kind)
        arr = np.zeros((M, M), dtype=complex)
        np.add.at(arr, (i, j), sg * state[rows].conj() * state[cols])
        out.append(arr)
    return tuple(out)


def anticommutator(a, b):
    return a @ b + b @ a


def build_state(space: FockSpace, spec: dict) -> np.ndarray:
    """Normalized test states.

    spec["kind"] is one of
      "vacuum";
      "wavepacket": species, s, and either amplitudes (dict n -> phi_n or array
        over n = -N..N) or pbar, sigma for phi_n ~ exp(-(p_n - pbar)^2 / 4 sigma^2);
      "pair": p, s, sprime, alpha, beta for alpha|0> + beta c^+(-p,s') d^+(p,s)|0>.
    """
    table = space.table
    psi = np.zeros(space.dim, dtype=complex)
    kind = spec.get("kind", "vacuum")
    if kind == "vacuum":
        psi[0] = 1.0
        return psi
    if kind == "wavepacket":
        amps = spec.get("amplitudes")
        if amps is None:
            p = table.momentum(np.array(list(table.ns)))
            amps = np.exp(-((p - spec["pbar"]) ** 2) / (4 * spec["sigma"] ** 2))
        elif isinstance(amps, dict):
            amps = np.array([amps.get(n, 0.0) for n in table.ns], dtype=complex)
        amps = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm == 0:
            raise DomainError("wavepacket amplitudes are not normalizable")
        amps = amps / norm
        species, s = spec.get("species", "c"), float(spec.get("s", 0.5))
        for n, phi in zip(table.ns, amps):
            if phi != 0:
                k = table.slot(species, n, s)
                row = space.index.get(1 << k)
                if row is None:
                    raise DomainError("one-particle states are outside the occupation sector")
                psi[row] += phi
        return psi
    if kind == "pair":
        alpha, beta = complex(spec["alpha"]), complex(spec["beta"])
        norm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm == 0 or not np.isfinite(norm):
            raise DomainError("pair state is not normalizable")
        n = table.mode_of_momentum(spec["p"])
        kc = table.slot("c", -n, float(spec["sprime"]))
        kd = table.slot("d", n, float(spec["s"]))
        vac = np.zeros(space.dim, dtype=complex)
        vac[0] = 1.0
        pair = ladder(space, kc, "create") @ (ladder(space, kd, "create") @ vac)
        if not np.any(pair):
            raise DomainError("pair state is outside the occupation sector")
        return (alpha * vac + beta * pair) / norm
    raise DomainError(f"unknown state kind {kind!r}")


def expectation(op, state: np.ndarray) -> complex:
    return complex(np.vdot(state, op @ state))
