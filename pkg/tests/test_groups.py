import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import signatures
from cqi.errors import CapExceeded, NonPrime, OutOfRange
from cqi.groups import (
    CompositeGroupSpec,
    DeltaProfile,
    GroupElement,
    PrimePowerSignature,
    ProductGroup,
    count_cyclic_subgroups,
    crt_decompose,
    cyclic_subgroup,
    element_order_exponent,
    enumerate_cyclic_subgroups,
    euler_phi_prime_power,
    factorize,
    is_prime,
    iter_elements,
    normalize_signature,
    valuation,
    valuation_profile,
    valuations_array,
)


def test_is_prime_matches_trial_division():
    naive = [n for n in range(200) if n > 1 and all(n % d for d in range(2, n))]
    assert [n for n in range(200) if is_prime(n)] == naive


@given(st.integers(1, 10**6))
def test_factorize_reconstructs(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(is_prime(p) for p in f)


@pytest.mark.parametrize("p,k", [(2, 0), (2, 1), (2, 5), (3, 3), (5, 2), (7, 1)])
def test_phi_prime_power(p, k):
    assert euler_phi_prime_power(p, k) == oracles.phi(p**k)


def test_valuation_examples():
    assert valuation(0, 2, 5) == 5
    assert valuation(12, 2, 5) == 2
    assert valuation(9, 3, 3) == 2
    assert valuation(1, 3, 3) == 0
    with pytest.raises(OutOfRange):
        valuation(32, 2, 5)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 6), st.data())
def test_valuations_array_matches_scalar(p, r, data):
    xs = data.draw(st.lists(st.integers(0, p**r - 1), min_size=1, max_size=20))
    got = valuations_array(np.asarray(xs, dtype=np.int64), p, r)
    assert list(got) == [valuation(x, p, r) for x in xs]


class TestSignature:
    def test_normalize_merges_and_sorts(self):
        sig = normalize_signature(2, [(5, 1), (2, 1), (5, 2)])
        assert sig.parts == ((2, 1), (5, 3))
        assert sig.expanded == (2, 5, 5, 5)

    def test_derived_fields(self):
        sig = PrimePowerSignature(3, ((1, 2), (4, 1)))
        assert sig.length == 3
        assert sig.prefix_sums == (2, 3)
        assert sig.order == 3**6
        assert sig.moduli == (3, 3, 81)
        assert sig.candidate_space == 2 * 2 * 5
        assert not sig.is_homocyclic
        assert PrimePowerSignature(2, ((3, 4),)).is_homocyclic

    def test_endomorphism_space_counts_tables(self):
        for sig in [PrimePowerSignature(2, ((1, 1), (2, 1))), PrimePowerSignature(3, ((1, 2),))]:
            assert sig.endomorphism_space() == sum(1 for _ in oracles.endomorphisms(sig.moduli))

    @pytest.mark.parametrize(
        "p,parts,exc",
        [
            (4, ((1, 1),), NonPrime),
            (2, (), OutOfRange),
            (2, ((2, 1), (1, 1)), OutOfRange),
            (2, ((0, 1),), OutOfRange),
            (2, ((1, 0),), OutOfRange),
        ],
    )
    def test_rejects(self, p, parts, exc):
        with pytest.raises(exc):
            PrimePowerSignature(p, parts)

    def test_huge_exponents_allowed_but_not_materialised(self):
        sig = PrimePowerSignature(2, ((70, 1),))
        assert sig.candidate_space == 71
        with pytest.raises(OutOfRange):
            sig.group()

    def test_text(self):
        assert normalize_signature(2, [(2, 1), (5, 1)]).text() == "p=2: 4^1+32^1"


class TestComposite:
    def test_crt(self):
        comps = crt_decompose(CompositeGroupSpec((6, 12)))
        assert comps[2].parts == ((1, 1), (2, 1))
        assert comps[3].parts == ((1, 2),)

    def test_trivial(self):
        spec = CompositeGroupSpec((1,))
        assert spec.order == 1
        assert crt_decompose(spec) == {}
        assert spec.text() == "Z(1)"

    @given(st.lists(st.integers(1, 60), min_size=1, max_size=4))
    def test_crt_preserves_order(self, mods):
        spec = CompositeGroupSpec(tuple(mods))
        comps = crt_decompose(spec)
        assert math.prod(s.order for s in comps.values()) == spec.order
        assert sorted(comps) == sorted(spec.primes())


class TestElements:
    def test_order_exponent_matches_repeated_addition(self):
        sig = PrimePowerSignature(2, ((1, 1), (3, 1)))
        for g in iter_elements(sig):
            assert sig.p ** element_order_exponent(g, sig) == oracles.order(g.coords, sig.moduli)

    def test_element_check(self):
        sig = PrimePowerSignature(2, ((1, 1), (3, 1)))
        with pytest.raises(OutOfRange):
            GroupElement((2, 0)).check(sig)
        with pytest.raises(OutOfRange):
            GroupElement((0,)).check(sig)

    def test_iter_elements_count(self):
        sig = PrimePowerSignature(3, ((1, 1), (2, 1)))
        assert sum(1 for _ in iter_elements(sig)) == 27


class TestCyclicSubgroups:
    @pytest.mark.parametrize("moduli_parts", [(2, ((1, 1), (2, 1))), (2, ((1, 2), (3, 1))), (3, ((1, 1), (2, 1))), (5, ((1, 2),))])
    def test_enumeration_matches_reference(self, moduli_parts):
        p, parts = moduli_parts
        sig = PrimePowerSignature(p, parts)
        ref = oracles.cyclic_subgroups(sig.moduli)
        subs = enumerate_cyclic_subgroups(sig)
        assert len(subs) == len(ref) == count_cyclic_subgroups(sig)
        assert {oracles.span(H.generator.coords, sig.moduli) for H in subs} == ref
        # canonical generator is the lexicographic minimum over generators of the subgroup
        for H in subs:
            S = oracles.span(H.generator.coords, sig.moduli)
            gens = [g for g in S if oracles.span(g, sig.moduli) == S]
            assert H.generator.coords == min(gens)

    def test_sorted_by_generator(self):
        sig = PrimePowerSignature(2, ((1, 1), (2, 1)))
        gens = [H.generator.coords for H in enumerate_cyclic_subgroups(sig)]
        assert gens == sorted(gens)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_cyclic_subgroups(PrimePowerSignature(2, ((5, 2),)), cap=100)

    @settings(max_examples=40, deadline=None)
    @given(signatures(max_blocks=2, max_exp=3, max_mult=2), st.data())
    def test_cyclic_subgroup_canonical(self, sig, data):
        if sig.order > 2000:
            return
        coords = tuple(data.draw(st.integers(0, q - 1)) for q in sig.moduli)
        H = cyclic_subgroup(GroupElement(coords), sig)
        S = oracles.span(coords, sig.moduli)
        assert oracles.span(H.generator.coords, sig.moduli) == S
        # the profile depends only on the subgroup
        for g in S:
            if oracles.span(g, sig.moduli) == S:
                assert valuation_profile(cyclic_subgroup(GroupElement(g), sig), sig) == valuation_profile(H, sig)

    @settings(max_examples=30, deadline=None)
    @given(signatures(max_blocks=3, max_exp=3, max_mult=2))
    def test_census_matches_enumeration(self, sig):
        if sig.order > 5000:
            return
        assert count_cyclic_subgroups(sig) == len(enumerate_cyclic_subgroups(sig))


class TestProductGroup:
    def test_encode_decode_roundtrip(self):
        grp = ProductGroup((6, 4, 5))
        idx = np.arange(grp.order)
        assert (grp.encode(grp.decode(idx)) == idx).all()

    def test_first_coordinate_most_significant(self):
        grp = ProductGroup((3, 4))
        assert list(grp.decode(np.array([5]))[0]) == [1, 1]

    def test_generated_subgroup(self):
        grp = ProductGroup((4, 6))
        mask = grp.generated_subgroup(np.array([[2, 3]]))
        got = {tuple(int(x) for x in r) for r in grp.decode(np.flatnonzero(mask))}
        assert got == set(oracles.span((2, 3), (4, 6)))

    def test_canonical_generators_count(self):
        for mods in [(6, 12), (4, 6), (2, 2, 3), (1,)]:
            grp = ProductGroup(mods)
            assert len(grp.canonical_generators()) == len(oracles.cyclic_subgroups(mods))

    def test_torsion(self):
        grp = ProductGroup((4, 6))
        got = {tuple(int(x) for x in r) for r in grp.torsion(2)}
        assert got == {(a, b) for a in range(4) for b in range(6) if (2 * a) % 4 == 0 and (2 * b) % 6 == 0}


class TestDeltaProfile:
    def test_blocks_and_norms(self):
        sig = PrimePowerSignature(2, ((1, 2), (3, 1)))
        d = DeltaProfile.from_flat((1, 0, 2), sig)
        assert d.blocks == ((1, 0), (2,))
        assert d.norm == 2
        assert d.block_norms == (1, 2)
        d.check(sig)

    def test_check_rejects(self):
        sig = PrimePowerSignature(2, ((1, 2), (3, 1)))
        with pytest.raises(OutOfRange):
            DeltaProfile.from_flat((2, 0, 0), sig).check(sig)
        with pytest.raises(OutOfRange):
            DeltaProfile.from_flat((0, 0), sig)

    def test_profile_of_generator(self):
        sig = PrimePowerSignature(2, ((2, 1), (5, 1)))
        H = cyclic_subgroup(GroupElement((1, 4)), sig)
        assert valuation_profile(H, sig).flat == (2, 3)


def test_all_profiles_realised():
    sig = PrimePowerSignature(3, ((1, 1), (2, 1)))
    profiles = {valuation_profile(H, sig).flat for H in enumerate_cyclic_subgroups(sig)}
    assert profiles == set(itertools.product(range(2), range(3)))
