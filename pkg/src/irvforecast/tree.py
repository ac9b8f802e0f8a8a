"""Win vectors and the weighted elimination tree, plus their text exports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .domain import Candidate


@dataclass(frozen=True)
class WinVector:
    candidates: tuple[Candidate, ...]
    probs: dict[int, float]

    def __getitem__(self, key: int | str) -> float:
        if isinstance(key, str):
            key = next(c.index for c in self.candidates if c.code == key)
        return self.probs.get(key, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.probs.get(c.index, 0.0) for c in self.candidates])

    def by_code(self) -> dict[str, float]:
        return {c.code: self.probs.get(c.index, 0.0) for c in self.candidates}

    def total(self) -> float:
        return float(sum(self.probs[k] for k in sorted(self.probs)))

    def argmax(self) -> int:
        return int(np.argmax(self.as_array()))


@dataclass
class TreeNode:
    order: tuple[int, ...]
    remaining: tuple[int, ...]
    elim_probs: dict[int, float] = field(default_factory=dict)
    win: dict[int, float] = field(default_factory=dict)
    tie_probs: dict[tuple[int, ...], float] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return len(self.remaining) == 1

    def children(self) -> list[tuple[int, ...]]:
        return [self.order + (a,) for a in self.remaining] if not self.is_leaf else []


@dataclass
class EliminationTree:
    """Rounds keyed by elimination order; edges carry elimination probabilities."""

    candidates: tuple[Candidate, ...]
    nodes: dict[tuple[int, ...], TreeNode] = field(default_factory=dict)

    @property
    def root(self) -> TreeNode:
        return self.nodes[()]

    def __iter__(self) -> Iterator[TreeNode]:
        return iter(self.nodes.values())

    def __len__(self) -> int:
        return len(self.nodes)

    def edge_weight(self, order: Sequence[int]) -> float:
        """Conditional probability of the last elimination in ``order``."""
        order = tuple(order)
        return self.nodes[order[:-1]].elim_probs[order[-1]]

    def path_prob(self, order: Sequence[int]) -> float:
        p = 1.0
        order = tuple(order)
        for k in range(1, len(order) + 1):
            p *= self.edge_weight(order[:k])
        return p

    def code(self, i: int) -> str:
        return self.candidates[i].code

    def _codes(self, idx: Sequence[int]) -> list[str]:
        return [self.code(i) for i in idx]

    def to_dict(self) -> dict:
        nodes = []
        for key in sorted(self.nodes, key=lambda k: (len(k), k)):
            node = self.nodes[key]
            nodes.append({
                "order": self._codes(node.order),
                "remaining": self._codes(node.remaining),
                "path_prob": self.path_prob(node.order),
                "elimination_probs": {self.code(a): p for a, p in sorted(node.elim_probs.items())},
                "win": {self.code(a): node.win.get(a, 0.0) for a in range(len(self.candidates))},
            })
        return {"candidates": [c.code for c in self.candidates], "nodes": nodes}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_dot(self) -> str:
        """Graphviz description; edge labels are path probabilities in percent."""
        def node_id(order: tuple[int, ...]) -> str:
            rem = self.nodes[order].remaining
            return '"' + ",".join(self._codes(rem)) + "|" + ",".join(self._codes(order)) + '"'

        lines = ["digraph elimination_tree {", "  rankdir=LR;", "  node [shape=circle];"]
        for key in sorted(self.nodes, key=lambda k: (len(k), k)):
            node = self.nodes[key]
            lines.append(f'  {node_id(key)} [label="{",".join(self._codes(node.remaining))}"];')
        for key in sorted(self.nodes, key=lambda k: (len(k), k)):
            if not key:
                continue
            p = self.path_prob(key)
            width = max(0.1, 5.0 * p)
            lines.append(f'  {node_id(key[:-1])} -> {node_id(key)} '
                         f'[label="{100 * p:.1f}%", penwidth={width:.3f}];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = []
        for key in sorted(self.nodes):
            node = self.nodes[key]
            indent = "  " * len(key)
            label = ",".join(self._codes(node.remaining))
            if key:
                out.append(f"{indent}{label}  [{100 * self.path_prob(key):.1f}%]")
            else:
                out.append(label)
        return "\n".join(out) + "\n"
