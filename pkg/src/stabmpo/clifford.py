"""Stabilizer tableau for N-qubit Clifford unitaries.

The tableau stores the images of the 2N generators X_j, Z_j under forward
conjugation P -> C P C^dag, with exact signs.  Gate updates act directly on
the packed (x, z, phase) representation; conjugation of arbitrary strings
multiplies generator images with the exact Pauli group law.  The module
also provides the circuit container, its line-oriented serialization, and
the two samplers used by the experiment drivers: brick-wall layers of
uniformly random two-qubit Cliffords (drawn by index from an exhaustive
canonical enumeration of all 11520 elements) and random U(1)-symmetric
Cliffords in CZ / phase-power / permutation form.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .pauli import PauliString

TWO_QUBIT_CLIFFORD_COUNT = 11520


class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]


GATE_ARITY = {
    "H": 1,
    "S": 1,
    "SDG": 1,
    "X": 1,
    "Z": 1,
    "CNOT": 2,
    "CZ": 2,
    "SWAP": 2,
}

_INVERSE_NAME = {"S": "SDG", "SDG": "S"}


def gate(name: str, *qubits: int) -> Gate:
    name = name.upper()
    if name not in GATE_ARITY:
        raise ValueError(f"unsupported gate {name!r}")
    if len(qubits) != GATE_ARITY[name]:
        raise ValueError(f"{name} expects {GATE_ARITY[name]} qubit(s)")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"{name} qubits must be distinct")
    return Gate(name, tuple(qubits))


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list; gates[0] acts first."""

    n: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if g.name not in GATE_ARITY:
                raise ValueError(f"unsupported gate {g.name!r}")
            if any(not 0 <= q < self.n for q in g.qubits):
                raise ValueError(f"gate {g} out of range for n={self.n}")
            if len(set(g.qubits)) != len(g.qubits):
                raise ValueError(f"gate {g} has repeated qubits")

    def inverse(self) -> "CliffordCircuit":
        inv = tuple(
            Gate(_INVERSE_NAME.get(g.name, g.name), g.qubits)
            for g in reversed(self.gates)
        )
        return CliffordCircuit(self.n, inv)

    def __add__(self, other: "CliffordCircuit") -> "CliffordCircuit":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        return CliffordCircuit(self.n, self.gates + other.gates)

    # line-oriented text format: header "qubits N", one gate per line
    def to_text(self) -> str:
        lines = [f"qubits {self.n}"]
        lines += [" ".join((g.name, *map(str, g.qubits))) for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliffordCircuit":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("qubits"):
            raise ValueError("circuit text must start with 'qubits N'")
        n = int(lines[0].split()[1])
        gates = []
        for ln in lines[1:]:
            parts = ln.split()
            gates.append(gate(parts[0], *map(int, parts[1:])))
        return cls(n, tuple(gates))


# ----------------------------------------------------------------------
# elementary conjugation rules on packed (x, z, phase) triples
# ----------------------------------------------------------------------
def _conjugate_bits(x: int, z: int, phase: int, g: Gate) -> tuple[int, int, int]:
    """Forward-conjugate the packed string by one elementary gate."""
    name = g.name
    if name == "H":
        q = g.qubits[0]
        m = 1 << q
        xb, zb = x & m, z & m
        if xb and zb:
            phase += 2
        x = (x & ~m) | (m if zb else 0)
        z = (z & ~m) | (m if xb else 0)
    elif name == "S":
        q = g.qubits[0]
        m = 1 << q
        if x & m:
            phase += 1
            z ^= m
    elif name == "SDG":
        q = g.qubits[0]
        m = 1 << q
        if x & m:
            phase += 3
            z ^= m
    elif name == "X":
        if z & (1 << g.qubits[0]):
            phase += 2
    elif name == "Z":
        if x & (1 << g.qubits[0]):
            phase += 2
    elif name == "CNOT":
        c, t = g.qubits
        mc, mt = 1 << c, 1 << t
        if z & mt:
            z ^= mc
        if x & mc:
            x ^= mt
    elif name == "CZ":
        c, t = g.qubits
        mc, mt = 1 << c, 1 << t
        if (x & mc) and (x & mt):
            phase += 2
        if x & mt:
            z ^= mc
        if x & mc:
            z ^= mt
    elif name == "SWAP":
        a, b = g.qubits
        ma, mb = 1 << a, 1 << b
        xa, xb = x & ma, x & mb
        za, zb = z & ma, z & mb
        x = (x & ~(ma | mb)) | (ma if xb else 0) | (mb if xa else 0)
        z = (z & ~(ma | mb)) | (ma if zb else 0) | (mb if za else 0)
    else:
        raise ValueError(f"unsupported gate {name!r}")
    return x, z, phase


class CliffordTableau:
    """Forward-conjugation images of X_j and Z_j; immutable by convention."""

    __slots__ = ("n", "x_images", "z_images", "_inv")

    def __init__(
        self,
        n: int,
        x_images: Iterable[PauliString],
        z_images: Iterable[PauliString],
    ) -> None:
        self.n = n
        self.x_images = tuple(x_images)
        self.z_images = tuple(z_images)
        self._inv: "CliffordTableau | None" = None
        if len(self.x_images) != n or len(self.z_images) != n:
            raise ValueError("tableau needs n X-images and n Z-images")

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        xs = [PauliString.single(n, j, 1) for j in range(n)]
        zs = [PauliString.single(n, j, 3) for j in range(n)]
        return cls(n, xs, zs)

    @classmethod
    def from_circuit(cls, circ: CliffordCircuit) -> "CliffordTableau":
        return cls.identity(circ.n).apply_circuit(circ)

    # ------------------------------------------------------------------
    def _images_packed(self) -> list[tuple[int, int, int]]:
        return [(p.x, p.z, p.phase_exp) for p in self.x_images + self.z_images]

    def apply_gate(self, g: Gate) -> "CliffordTableau":
        """Tableau of g o C (gate applied after the current circuit)."""
        return self.apply_circuit(CliffordCircuit(self.n, (g,)))

    def apply_circuit(self, circ: CliffordCircuit) -> "CliffordTableau":
        if circ.n != self.n:
            raise ValueError("qubit count mismatch")
        packed = self._images_packed()
        for g in circ.gates:
            packed = [_conjugate_bits(x, z, ph, g) for (x, z, ph) in packed]
        imgs = [PauliString(self.n, x, z, ph) for (x, z, ph) in packed]
        return CliffordTableau(self.n, imgs[: self.n], imgs[self.n :])

    # ------------------------------------------------------------------
    def conjugate(self, p: PauliString, direction: str = "forward") -> PauliString:
        """Return C P C^dag (forward) or C^dag P C (inverse), sign exact."""
        if p.n != self.n:
            raise ValueError("length mismatch")
        if direction == "inverse":
            return self.inverse().conjugate(p, "forward")
        if direction != "forward":
            raise ValueError(f"unknown direction {direction!r}")
        out = PauliString(self.n, 0, 0, p.phase_exp)
        for j in range(self.n):
            if (p.x >> j) & 1:
                out = out.mul(self.x_images[j])
            if (p.z >> j) & 1:
                out = out.mul(self.z_images[j])
        return out

    def inverse(self) -> "CliffordTableau":
        """Tableau of C^dag; cached.  Bit part inverts via the symplectic form."""
        if self._inv is not None:
            return self._inv
        n = self.n
        m = np.zeros((2 * n, 2 * n), dtype=np.int64)
        for i, img in enumerate(self.x_images + self.z_images):
            for j in range(n):
                m[i, j] = (img.x >> j) & 1
                m[i, n + j] = (img.z >> j) & 1
        lam = np.zeros_like(m)
        lam[:n, n:] = np.eye(n, dtype=np.int64)
        lam[n:, :n] = np.eye(n, dtype=np.int64)
        minv = (lam @ m.T @ lam) % 2

        xs: list[PauliString] = []
        zs: list[PauliString] = []
        for k in range(2 * n):
            x = z = 0
            for j in range(n):
                x |= int(minv[k, j]) << j
                z |= int(minv[k, n + j]) << j
            cand = PauliString(n, x, z, (x & z).bit_count())
            forward = self.conjugate(cand, "forward")
            gen = (
                PauliString.single(n, k, 1)
                if k < n
                else PauliString.single(n, k - n, 3)
            )
            if (forward.x, forward.z) != (gen.x, gen.z):
                raise ValueError("tableau is not symplectic")
            if forward.sign < 0:
                cand = cand.negate()
            (xs if k < n else zs).append(cand)
        inv = CliffordTableau(n, xs, zs)
        inv._inv = self
        self._inv = inv
        return inv

    # ------------------------------------------------------------------
    def key(self) -> tuple:
        """Hashable canonical form (letters + sign per image)."""
        return tuple(
            (p.x, p.z, p.letter_exp) for p in self.x_images + self.z_images
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CliffordTableau) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def is_identity(self) -> bool:
        return self == CliffordTableau.identity(self.n)

    def validate(self) -> None:
        """Check the symplectic pattern and Hermitian +-1 signs of all images."""
        gens = [PauliString.single(self.n, j, 1) for j in range(self.n)]
        gens += [PauliString.single(self.n, j, 3) for j in range(self.n)]
        imgs = self.x_images + self.z_images
        for i, a in enumerate(imgs):
            if a.letter_exp not in (0, 2):
                raise AssertionError(f"image {i} is not a signed Hermitian string")
            for j, b in enumerate(imgs):
                if a.commutes(b) != gens[i].commutes(gens[j]):
                    raise AssertionError(
                        f"symplectic pattern broken between images {i} and {j}"
                    )

    def to_text(self) -> str:
        lines = [f"qubits {self.n}"]
        for j in range(self.n):
            lines.append(f"X{j} -> {self.x_images[j].to_literal()}")
        for j in range(self.n):
            lines.append(f"Z{j} -> {self.z_images[j].to_literal()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliffordTableau":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("qubits"):
            raise ValueError("tableau text must start with 'qubits N'")
        n = int(lines[0].split()[1])
        xs: dict[int, PauliString] = {}
        zs: dict[int, PauliString] = {}
        for ln in lines[1:]:
            head, _, lit = ln.partition("->")
            head = head.strip()
            target = xs if head[0] == "X" else zs
            target[int(head[1:])] = PauliString.from_literal(lit.strip())
        return cls(n, [xs[j] for j in range(n)], [zs[j] for j in range(n)])


# ----------------------------------------------------------------------
# exhaustive two-qubit Clifford enumeration
# ----------------------------------------------------------------------
@lru_cache(maxsize=1)
def two_qubit_clifford_sequences() -> tuple[tuple[Gate, ...], ...]:
    """Gate realizations of all 11520 two-qubit Cliffords (on qubits 0,1).

    Built once by breadth-first closure over {H, S, CNOT} generators and
    deduplicated by canonical tableau form (i.e. up to global phase).  The
    BFS order is deterministic, so index i always denotes the same element.
    """
    generators = (
        Gate("H", (0,)),
        Gate("H", (1,)),
        Gate("S", (0,)),
        Gate("S", (1,)),
        Gate("CNOT", (0, 1)),
    )
    start = CliffordTableau.identity(2)
    seen: dict[tuple, tuple[Gate, ...]] = {start.key(): ()}
    order: list[tuple[Gate, ...]] = [()]
    queue: deque[tuple[CliffordTableau, tuple[Gate, ...]]] = deque([(start, ())])
    while queue:
        tab, seq = queue.popleft()
        for g in generators:
            nxt = tab.apply_gate(g)
            k = nxt.key()
            if k not in seen:
                s = seq + (g,)
                seen[k] = s
                order.append(s)
                queue.append((nxt, s))
    if len(order) != TWO_QUBIT_CLIFFORD_COUNT:
        raise AssertionError(
            f"two-qubit Clifford enumeration found {len(order)} elements"
        )
    return tuple(order)


def sample_two_qubit_clifford(rng: np.random.Generator, pair: tuple[int, int]) -> list[Gate]:
    """Uniformly random two-qubit Clifford as gates on the given qubit pair."""
    table = two_qubit_clifford_sequences()
    seq = table[int(rng.integers(len(table)))]
    a, b = pair
    remap = (a, b)
    return [Gate(g.name, tuple(remap[q] for q in g.qubits)) for g in seq]


def sample_brickwall(
    n: int,
    depth_d: int,
    rng: np.random.Generator,
    start_parity: int = 0,
) -> CliffordCircuit:
    """Brick-wall circuit of ``depth_d`` sublayers of random 2q Cliffords.

    Sublayer k (1-based) pairs (i, i+1) at even offsets for odd k and odd
    offsets for even k, open boundaries, leftover qubit idle.
    ``start_parity`` shifts the alternation so consecutive circuits can
    continue a single brick wall.
    """
    if n < 2:
        raise ValueError("brick wall needs n >= 2")
    if depth_d < 1:
        raise ValueError("depth must be >= 1")
    gates: list[Gate] = []
    for k in range(depth_d):
        offset = (start_parity + k) % 2
        for i in range(offset, n - 1, 2):
            gates.extend(sample_two_qubit_clifford(rng, (i, i + 1)))
    return CliffordCircuit(n, tuple(gates))


def sample_u1_clifford(n: int, rng: np.random.Generator) -> CliffordCircuit:
    """Random magnetization-preserving Clifford.

    Drawn in the parametrized form (prod CZ^nu) (prod S^mu) P with a
    uniform permutation P realized by SWAPs, uniform mu in {0..3} per
    qubit and independent nu in {0,1} per pair; the global phase is fixed
    to zero.  Every sample conjugates each Z_j to +Z_{pi(j)}.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    gates: list[Gate] = []

    perm = [int(v) for v in rng.permutation(n)]
    # realize qubit j -> position perm[j] with a selection-sort SWAP chain
    pos = list(range(n))  # pos[p] = qubit currently at position p
    target = [0] * n
    for j, p in enumerate(perm):
        target[p] = j
    for p in range(n):
        q = pos.index(target[p], p)
        if q != p:
            gates.append(Gate("SWAP", (p, q)))
            pos[p], pos[q] = pos[q], pos[p]

    s_names = (None, "S", "Z", "SDG")
    for j in range(n):
        name = s_names[int(rng.integers(4))]
        if name is not None:
            gates.append(Gate(name, (j,)))

    for i in range(n):
        for j in range(i + 1, n):
            if int(rng.integers(2)):
                gates.append(Gate("CZ", (i, j)))

    return CliffordCircuit(n, tuple(gates))
