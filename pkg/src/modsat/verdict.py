"""Solver verdicts shared by every engine."""

from __future__ import annotations

from dataclasses import dataclass

from .kripke import KripkeModel

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"
VALID, INVALID = "VALID", "INVALID"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure.

    For ``task == "sat"`` the answer is SAT, UNSAT or UNKNOWN and the witness
    is a model of the circuit. For ``task == "valid"`` the answer is VALID,
    INVALID or UNKNOWN and the witness is a countermodel.
    """

    answer: str
    engine: str
    task: str = "sat"
    witness: KripkeModel | None = None

    @property
    def satisfiable(self) -> bool | None:
        if self.task != "sat" or self.answer == UNKNOWN:
            return None
        return self.answer == SAT

    @property
    def decided(self) -> bool:
        return self.answer != UNKNOWN

    def to_dict(self) -> dict:
        return {
            "answer": self.answer,
            "task": self.task,
            "engine": self.engine,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def sat_verdict(ok: bool, engine: str, witness: KripkeModel | None = None) -> Verdict:
    return Verdict(SAT if ok else UNSAT, engine, "sat", witness if ok else None)
