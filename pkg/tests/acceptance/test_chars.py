"""Researcher acceptance tests for residue symbols and quadratic characters"""

import numpy as np
import pytest

from hecke_moments.chars import (
    QuadChar,
    chi,
    chi_at,
    chi_sieved,
    residue_symbol,
    residue_symbol_euler,
    symbol_array,
)
from hecke_moments.errors import DomainError
from hecke_moments.gint import GInt, PrimaryLattice, gcd, primary_associate


def test_researcher_can_evaluate_residue_symbols():
    """As a researcher, I want the quadratic residue symbol by reciprocity
    so that characters never need a discrete logarithm"""
    assert residue_symbol(GInt(0, 1), GInt(-1, -2)) == -1
    assert residue_symbol(GInt(1, 1), GInt(-1, -2)) == -1
    assert residue_symbol(GInt(5), GInt(-1, -2)) == 0
    assert residue_symbol(GInt(1), GInt(1)) == 1
    assert residue_symbol_euler(GInt(2), GInt(-3)) == 1


def test_symbol_ignores_the_unit_of_the_modulus():
    """As a researcher, I want (a/n) to depend on the ideal (n) only
    so that any generator can be passed in"""
    for unit in GInt.UNITS:
        assert residue_symbol(GInt(0, 1), unit * GInt(-1, -2)) == -1


def test_reciprocity_matches_euler_criterion(rng, small_primes):
    """As a researcher, I want the fast symbol cross-checked against the Euler criterion
    so that sign conventions in the supplementary laws are trusted"""
    for prime in small_primes:
        for _ in range(10):
            a = GInt(rng.randint(-500, 500), rng.randint(-500, 500))
            assert residue_symbol(a, prime) == residue_symbol_euler(a, prime), (a, prime)


def test_symbol_is_multiplicative_in_the_numerator(rng, sample_moduli):
    """As a researcher, I want (ab/n) = (a/n)(b/n)
    so that characters extend from primes"""
    for n in sample_moduli:
        for _ in range(20):
            a = GInt(rng.randint(-99, 99), rng.randint(-99, 99))
            b = GInt(rng.randint(-99, 99), rng.randint(-99, 99))
            assert residue_symbol(a * b, n) == residue_symbol(a, n) * residue_symbol(b, n)


def test_symbol_rejects_even_moduli():
    """As a researcher, I want even moduli rejected
    so that the symbol is only used where it is defined"""
    with pytest.raises(DomainError):
        residue_symbol(GInt(1), GInt(1, 1))
    with pytest.raises(DomainError):
        residue_symbol_euler(GInt(1), GInt(-3, 2) * GInt(-1, 2))


def test_vectorised_symbol_matches_scalar(sample_moduli):
    """As a researcher, I want the array symbol to agree with the scalar one
    so that sieves and spot checks see the same character"""
    re_part, im_part = np.meshgrid(np.arange(-20, 21), np.arange(-20, 21))
    re_part, im_part = re_part.ravel(), im_part.ravel()
    for n in sample_moduli:
        values = symbol_array(re_part, im_part, n)
        for x, y, v in zip(re_part[::17], im_part[::17], values[::17]):
            assert v == residue_symbol(GInt(int(x), int(y)), n)


def test_researcher_can_evaluate_the_family_character():
    """As a researcher, I want chi_{(1+i)^5 d}
    so that L-values of the family can be assembled"""
    trivial = QuadChar(GInt(1))
    assert chi(trivial, GInt(-1, -2)) == -1
    assert trivial(GInt(-1, -2)) == -1
    assert chi(trivial, GInt(1, 1)) == 0
    assert trivial.conductor_norm == 32
    assert QuadChar(GInt(-1, -2)).conductor_norm == 160


@pytest.mark.parametrize("d", [GInt(4), GInt(9), GInt(1, 1), GInt(0)])
def test_character_rejects_bad_parameters(d):
    """As a researcher, I want non-square-free or even d rejected
    so that only primitive characters enter the family"""
    with pytest.raises(DomainError):
        QuadChar(d)


def test_array_character_matches_pointwise(sample_moduli):
    """As a researcher, I want chi over arrays to match chi pointwise
    so that the vectorised L-sums are correct"""
    re_part, im_part = np.meshgrid(np.arange(-15, 16), np.arange(-15, 16))
    re_part, im_part = re_part.ravel(), im_part.ravel()
    for d in [GInt(1), GInt(0, 1), *sample_moduli]:
        c = QuadChar(d)
        values = chi_at(c, re_part, im_part)
        expected = [chi(c, GInt(int(x), int(y))) for x, y in zip(re_part, im_part)]
        assert values.tolist() == expected


def test_minus_d_gives_the_same_character(sample_moduli):
    """As a researcher, I want chi_{-d} = chi_d
    so that each ideal contributes exactly two distinct L-values"""
    lattice = PrimaryLattice(400)
    for d in sample_moduli:
        for u in (GInt(1), GInt(0, 1)):
            a = chi_at(QuadChar(u * d), lattice.re, lattice.im)
            b = chi_at(QuadChar(-u * d), lattice.re, lattice.im)
            assert np.array_equal(a, b)


def test_sieved_character_matches_direct_evaluation(sample_moduli):
    """As a researcher, I want the completely multiplicative sieve of chi
    so that long L-sums avoid per-point reciprocity"""
    for d in sample_moduli[:3]:
        c = QuadChar(d)
        table = chi_sieved(c, 600)
        lattice = table.lattice
        for index in range(0, len(table.values), 5):
            n = lattice.element(index)
            assert table[n] == chi(c, n)


def _random_primary(rng, bound: int) -> GInt:
    while True:
        n = GInt(rng.randint(-bound, bound), rng.randint(-bound, bound))
        if n and n.is_odd() and not n.is_unit():
            return primary_associate(n)[1]


def test_reciprocity_holds_for_coprime_primary_pairs(rng):
    """As a researcher, I want (m/n) = (n/m) for coprime primary m and n
    so that the flipping step of the symbol loop is sound"""
    checked = 0
    while checked < 1000:
        m, n = _random_primary(rng, 60), _random_primary(rng, 60)
        if not gcd(m, n).is_unit():
            continue
        assert residue_symbol(m, n) == residue_symbol(n, m), (m, n)
        checked += 1


def test_symbol_is_periodic_modulo_the_prime(rng, small_primes):
    """As a researcher, I want (a/p) to depend on a mod p only, agreeing with the Euler criterion,
    so that residue tables can be reduced before lookup"""
    for _ in range(500):
        prime = rng.choice(small_primes)
        a = GInt(rng.randint(-200, 200), rng.randint(-200, 200))
        shift = GInt(rng.randint(-20, 20), rng.randint(-20, 20)) * prime
        expected = residue_symbol_euler(a, prime)
        assert residue_symbol(a, prime) == expected
        assert residue_symbol(a + shift, prime) == expected


def test_family_characters_are_quadratic(sample_moduli):
    """As a researcher, I want chi(n^2) = 1 wherever chi(n) is nonzero
    so that the characters are genuinely quadratic"""
    lattice = PrimaryLattice(300)
    for d in [GInt(1), GInt(0, 1), *sample_moduli]:
        c = QuadChar(d)
        for index in range(len(lattice)):
            n = lattice.element(index)
            if chi(c, n):
                assert chi(c, n * n) == 1, (d, n)
