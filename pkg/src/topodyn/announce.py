"""Announcement updates on subset-space scenarios.

Announcing a box/next-fragment formula shrinks the scenario set to the
interior of the formula's extension; the precondition is that the current
point survives.  Executing the corresponding test program inside ``O[...]``
does exactly the same thing, and ``check_test_announcement_identity`` compares
the two routes computed independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .checker import SubsetEvaluator, state_extension
from .formula import (
    Formula,
    FragmentViolation,
    Language,
    Next,
    Test,
    format_formula,
    in_language,
)
from .models import Scenario, SubsetModel, validate_scenario


@dataclass(frozen=True)
class AnnouncementResult:
    precondition_holds: bool
    updated: Optional[Scenario]

    def to_json(self) -> dict:
        return {
            "precondition_holds": self.precondition_holds,
            "updated": self.updated.to_json() if self.updated else None,
        }


def announce(model: SubsetModel, phi: Formula, s: Scenario) -> AnnouncementResult:
    """Update (x, U) by phi: the new set is U cut down to int([[phi]])."""
    if not in_language(phi, Language.BOX_NEXT):
        raise FragmentViolation(
            f"announcements take box/next-fragment formulas: {format_formula(phi)}"
        )
    validate_scenario(model, s)
    guard = model.space.interior(state_extension(model, phi))
    if not guard >> s.x & 1:
        return AnnouncementResult(False, None)
    return AnnouncementResult(True, Scenario(s.x, s.u & guard))


def check_test_announcement_identity(
    model: SubsetModel, phi: Formula, psi: Formula, s: Scenario
) -> bool:
    """Does executing the test ?(phi) agree with announcing phi, for psi?

    Route one evaluates ``O[?(phi)] psi`` directly.  Route two announces phi
    and, when the precondition holds, evaluates psi at the updated scenario.
    Returns True when the verdicts coincide.
    """
    test_route = SubsetEvaluator(model).truth(Next(Test(phi), psi), s)
    result = announce(model, phi, s)
    if not result.precondition_holds:
        announce_route = False
    else:
        announce_route = SubsetEvaluator(model).truth(psi, result.updated)
    return test_route == announce_route
