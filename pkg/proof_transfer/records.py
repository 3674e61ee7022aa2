import json
from dataclasses import dataclass, field

from graph_iso.graph import Graph, Permutation, graph_to_record


@dataclass(frozen=True)
class ProofTuple:
    h_graph: Graph
    xi: Permutation
    b: int

    def to_record(self) -> dict:
        return {'H': graph_to_record(self.h_graph), 'xi': list(self.xi.mapping), 'b': self.b}


@dataclass
class Transcript:
    """V 交给 Eve 的记录，外加每轮的测量/传送细节"""
    header: dict
    tuples: list[ProofTuple] = field(default_factory=list)
    rounds: list[dict] = field(default_factory=list)

    def add_round(self, tup: ProofTuple, **details):
        self.tuples.append(tup)
        self.rounds.append({'round': len(self.rounds), **tup.to_record(), **details})

    def to_lines(self) -> list[str]:
        return [json.dumps({'header': self.header})] + [json.dumps(r) for r in self.rounds]


@dataclass
class CheatResult:
    tuples: list[ProofTuple]
    success: bool
    collision_calls: int
    # 不需要碰撞的轮数（奇偶/挑战位恰好一致）
    matched_rounds: int
    failed_rounds: int
    challenges: list = field(default_factory=list)
