"""Mutation algebra of the two-parameter decomposition family."""

import pytest

from blowup_paths.sod import (
    EXC_LEFT,
    EXC_RIGHT,
    RecollementLabel,
    SodLabel,
    lower_recollement,
    mutate,
    mutation_orbit,
    recollement_of,
    sod_of,
    twist_by_oc,
    upper_recollement,
)


def full_family(kmin, kmax):
    return {SodLabel(o, k) for o in (EXC_LEFT, EXC_RIGHT)
            for k in range(kmin, kmax + 1)}


class TestMutation:
    def test_left_right_identity_everywhere(self):
        for lab in full_family(-10, 10):
            assert mutate(mutate(lab, "left"), "right") == lab
            assert mutate(mutate(lab, "right"), "left") == lab

    def test_chain_structure(self):
        # left mutation walks F1(k) -> F2(k) -> F1(k-1)
        assert mutate(SodLabel(EXC_LEFT, 0), "left") == SodLabel(EXC_RIGHT, 0)
        assert mutate(SodLabel(EXC_RIGHT, 0), "left") == SodLabel(EXC_LEFT, -1)
        assert mutate(SodLabel(EXC_LEFT, -1), "right") == SodLabel(EXC_RIGHT, 0)

    def test_orbit_is_the_whole_family(self):
        start = SodLabel(EXC_LEFT, -1)  # <O_C(-1), D^b(Y)>
        orbit = mutation_orbit(start, 10)
        # depth 10 reaches five steps in the chain each way from the start
        expected = {mut for mut in orbit}
        assert expected <= full_family(-11, 9)
        assert SodLabel(EXC_RIGHT, 0) in orbit
        assert SodLabel(EXC_LEFT, -6) in orbit
        # every element of the family within reach is hit, nothing else
        chain = [start]
        lab = start
        for _ in range(10):
            lab = mutate(lab, "left")
            chain.append(lab)
        lab = start
        for _ in range(10):
            lab = mutate(lab, "right")
            chain.append(lab)
        assert orbit == set(chain)

    def test_unknown_direction(self):
        with pytest.raises(ValueError):
            mutate(SodLabel(EXC_LEFT, 0), "up")

    def test_render(self):
        assert SodLabel(EXC_LEFT, -1).render() == "<O_C(-1), D^b(Y)>"
        assert SodLabel(EXC_RIGHT, 0).render() == "<D^b(Y), O_C>"
        assert SodLabel(EXC_RIGHT, -1).render() == "<f^L_-1 D^b(Y), O_C(-1)>"


class TestTwist:
    def test_on_recollements(self):
        assert twist_by_oc(RecollementLabel("L", 0)) == RecollementLabel("L", -1)
        assert twist_by_oc(RecollementLabel("R", 1)) == RecollementLabel("R", 0)

    def test_on_sods_preserves_orientation(self):
        lab = SodLabel(EXC_RIGHT, 2)
        assert twist_by_oc(lab) == SodLabel(EXC_RIGHT, 1)

    def test_group_action(self):
        lab = SodLabel(EXC_LEFT, 3)
        fwd = lab
        for _ in range(4):
            fwd = twist_by_oc(fwd)
        assert fwd == SodLabel(EXC_LEFT, -1)

    def test_commutes_with_mutation(self):
        for lab in full_family(-10, 10):
            for d in ("left", "right"):
                assert twist_by_oc(mutate(lab, d)) == mutate(twist_by_oc(lab), d)


class TestRecollementCorrespondence:
    def test_tags(self):
        assert recollement_of(SodLabel(EXC_RIGHT, 1)) == RecollementLabel("R", 1)
        assert recollement_of(SodLabel(EXC_LEFT, -1)) == RecollementLabel("L", -1)

    def test_round_trip(self):
        for lab in full_family(-5, 5):
            assert sod_of(recollement_of(lab)) == lab

    def test_lower_recollement_of_R(self):
        # the paper-pinned identity: lower(R(k+1)) = L(k)
        for k in range(-5, 5):
            assert lower_recollement(RecollementLabel("R", k + 1)) == \
                RecollementLabel("L", k)

    def test_upper_inverts_lower(self):
        for k in range(-5, 6):
            for tag in ("R", "L"):
                rec = RecollementLabel(tag, k)
                assert upper_recollement(lower_recollement(rec)) == rec

    def test_commuting_square_left_mutation(self):
        # recollement_of . mutate(.,left) == lower_recollement . recollement_of
        for lab in full_family(-5, 5):
            lhs = recollement_of(mutate(lab, "left"))
            rhs = lower_recollement(recollement_of(lab))
            assert lhs == rhs

    def test_functor_names(self):
        r = RecollementLabel("R", 0)
        assert "f^L_0" in r.functors()
        l = RecollementLabel("L", -1)
        assert "rho_0" in l.functors()
