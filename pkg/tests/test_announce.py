"""Announcements and their agreement with test programs."""

import itertools

import pytest

from topodyn.announce import announce, check_test_announcement_identity
from topodyn.checker import eval_subset, state_extension
from topodyn.formula import FragmentViolation, parse
from topodyn.frameprops import is_open_map
from topodyn.harness import GenConfig, gen_model, gen_formula, _derived_rng
from topodyn.formula import Language
from topodyn.models import Scenario, SubsetModel
from topodyn.topology import all_topologies, iter_points


def test_announce_shrinks_to_interior(const1_subset):
    # v(p) = {1}: announcing p at (1, X) shrinks the set to {1}
    result = announce(const1_subset, parse("p"), Scenario(1, 0b11))
    assert result.precondition_holds
    assert result.updated == Scenario(1, 0b10)


def test_announce_precondition_can_fail(const1_subset):
    result = announce(const1_subset, parse("p"), Scenario(0, 0b11))
    assert not result.precondition_holds
    assert result.updated is None


def test_announce_turns_knowable_into_known(const1_subset):
    s = Scenario(1, 0b11)
    assert not eval_subset(const1_subset, parse("K p"), s)
    updated = announce(const1_subset, parse("p"), s).updated
    assert eval_subset(const1_subset, parse("K p"), updated)


def test_announce_top_is_identity(const1_subset):
    for u in (0b10, 0b11):
        s = Scenario(1, u)
        assert announce(const1_subset, parse("top"), s).updated == s


def test_announce_requires_fragment(const1_subset):
    with pytest.raises(FragmentViolation, match="box/next"):
        announce(const1_subset, parse("K p"), Scenario(1, 0b11))


def test_announce_validates_scenario(const1_subset):
    with pytest.raises(ValueError, match="not open"):
        announce(const1_subset, parse("p"), Scenario(0, 0b01))


def test_updated_set_is_interior_restriction():
    for i in range(60):
        m = gen_model(GenConfig(seed=400, max_points=5, model_class="subset"), index=i)
        rng = _derived_rng(400, 1, i)
        phi = gen_formula(rng, ("p", "q"), m.alphabet, lang=Language.BOX_NEXT, allow_tests=True)
        guard = m.space.interior(state_extension(m, phi))
        for u in m.space.opens_sorted():
            for x in iter_points(u):
                result = announce(m, phi, Scenario(x, u))
                assert result.precondition_holds == bool(guard >> x & 1)
                if result.precondition_holds:
                    assert result.updated == Scenario(x, u & guard)


def test_announce_is_idempotent():
    # announcing the same formula twice adds nothing beyond the first time
    for i in range(40):
        m = gen_model(GenConfig(seed=401, max_points=5, model_class="subset"), index=i)
        rng = _derived_rng(401, 1, i)
        phi = gen_formula(rng, ("p", "q"), m.alphabet, lang=Language.BOX_NEXT)
        for u in m.space.opens_sorted():
            for x in iter_points(u):
                first = announce(m, phi, Scenario(x, u))
                if first.precondition_holds:
                    again = announce(m, phi, first.updated)
                    assert again.precondition_holds
                    assert again.updated == first.updated


def test_identity_on_sierpinski_by_hand(sierpinski):
    m = SubsetModel(sierpinski, ("a",), {"a": (1, 1)}, {"p": 0b10, "q": 0b01})
    phis = [parse("p"), parse("q"), parse("box p"), parse("top")]
    psis = [parse("p"), parse("K p"), parse("O[a] p"), parse("Khat q")]
    for u in sierpinski.opens_sorted():
        for x in iter_points(u):
            for phi in phis:
                for psi in psis:
                    assert check_test_announcement_identity(m, phi, psi, Scenario(x, u))


def test_identity_exhaustive_two_points():
    # all topologies on 2 points, all open partial maps, all valuations of p
    phis = [parse("p"), parse("box p")]
    psis = [parse("p"), parse("K p"), parse("O[a] p")]
    for space in all_topologies(2):
        maps = [
            fn
            for fn in itertools.product((None, 0, 1), repeat=2)
            if is_open_map(space, fn).holds
        ]
        for fn in maps:
            for vp in range(4):
                m = SubsetModel(space, ("a",), {"a": fn}, {"p": vp})
                for u in space.opens_sorted():
                    for x in iter_points(u):
                        for phi in phis:
                            for psi in psis:
                                assert check_test_announcement_identity(m, phi, psi, Scenario(x, u))


def test_identity_generated_models():
    for i in range(100):
        m = gen_model(GenConfig(seed=402, max_points=5, model_class="subset"), index=i)
        rng = _derived_rng(402, 1, i)
        phi = gen_formula(rng, ("p", "q"), m.alphabet, lang=Language.BOX_NEXT, allow_tests=True)
        psi = gen_formula(rng, ("p", "q"), m.alphabet, lang=Language.K_BOX_NEXT, allow_tests=True)
        u = m.space.full
        for x in iter_points(u):
            assert check_test_announcement_identity(m, phi, psi, Scenario(x, u))
