import math
from fractions import Fraction

import pytest

from relalg import (
    build_affine,
    build_power,
    build_xi,
    check_xi_fast,
    eval_bounds,
    eval_bounds_power,
    image,
    montecarlo,
    search_weakrep,
    sufficiency_thresholds,
    verify_full,
    verify_weak,
)
from relalg.structures import Xi, bits_to_rows, product_rows
from relalg.xi import ExplicitPartition, PartitionRecipe, XiFastChecker, mix64


def mix64_reference(z):
    """Independent re-implementation: explicit byte-level wraparound."""
    mask = (1 << 64) - 1

    def mul(a, b):
        return int.from_bytes(
            ((a * b) & mask).to_bytes(8, "little"), "little"
        )

    z &= mask
    z = (z ^ (z >> 30)) & mask
    z = mul(z, 0xBF58476D1CE4E5B9)
    z = (z ^ (z >> 27)) & mask
    z = mul(z, 0x94D049BB133111EB)
    z = (z ^ (z >> 31)) & mask
    return z


def test_mix64_reference_values():
    # first outputs of the standard stream seeded with 0
    assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF
    assert mix64((2 * 0x9E3779B97F4A7C15) % 2**64) == 0x6E789E6AA1B965F4
    for z in (0, 1, 0xDEADBEEF, 2**64 - 1, 0x123456789ABCDEF0):
        assert mix64(z) == mix64_reference(z)


def test_partition_recipe_golden_vector():
    # classes of edges e = x*d+y for x=0, y=0..8 at seed=1, d=9, n=2,
    # computed once from the finalizer definition and cross-checked by
    # two independent mix64 implementations
    r = PartitionRecipe(1, 2, 9)
    assert [r.class_of(0, y) for y in range(9)] == [1, 2, 2, 2, 1, 1, 2, 2, 1]


def test_partition_recipe_bitsets_agree_with_classes():
    r = PartitionRecipe(7, 3, 10)
    for x in range(10):
        for y in range(10):
            i = r.class_of(x, y)
            assert 1 <= i <= 3
            assert r.row_bits(i, x) >> y & 1
            assert r.col_bits(i, y) >> x & 1
            for other in range(1, 4):
                if other != i:
                    assert not r.row_bits(other, x) >> y & 1


def test_explicit_partition_matches_recipe():
    r = PartitionRecipe(5, 2, 9)
    classes = {(x, y): r.class_of(x, y) for x in range(9) for y in range(9)}
    e = ExplicitPartition(2, 9, classes)
    aff = build_affine(3)
    xa = build_xi(aff, 2, r)
    xb = build_xi(aff, 2, e)
    assert check_xi_fast(xa).ok == check_xi_fast(xb).ok
    for mask in (0, 1, 2, 96):
        assert image(xa, mask).bits == image(xb, mask).bits


def test_explicit_partition_must_be_total():
    with pytest.raises(ValueError):
        ExplicitPartition(2, 3, {(0, 0): 1})


def test_build_xi_validation(aff3, doubled3):
    with pytest.raises(ValueError):
        build_xi(aff3, 0, 1)
    with pytest.raises(ValueError):
        build_xi(doubled3, 2, 1)  # inner must be over L(p,0)
    with pytest.raises(ValueError):
        build_xi(aff3, 2, PartitionRecipe(1, 3, 9))  # n mismatch


def test_xi_n1_equals_doubling(aff3, doubled3):
    for seed in (0, 1, 99):
        x = build_xi(aff3, 1, seed)
        assert x.base_size == 18
        for mask in range(x.algebra.top_mask + 1):
            assert image(x, mask).bits == image(doubled3, mask).bits
        assert check_xi_fast(x).ok
        assert verify_weak(x).ok
        assert verify_full(x).ok


def test_xi_images_have_block_structure(aff3):
    x = build_xi(aff3, 2, 7)
    a0 = image(x, 1 << 1)
    inner = image(aff3, 1 << 1)
    for u in range(9):
        for v in range(9):
            assert a0.has(u, v) == inner.has(u, v)
            assert a0.has(9 + u, 9 + v) == inner.has(u, v)
            assert not a0.has(u, 9 + v) and not a0.has(9 + u, v)
    t1 = image(x, 1 << 5)
    t2 = image(x, 1 << 6)
    assert t1.bits & t2.bits == 0
    assert not any(t1.has(u, v) for u in range(9) for v in range(9))


def test_fast_checker_matches_generic_small_grid():
    for (p, n, m) in [(3, 2, 1), (3, 3, 1), (4, 2, 1)]:
        theta = build_power(build_affine(p), m)
        checker = XiFastChecker(theta, n)
        for seed in range(8):
            part = PartitionRecipe(seed, n, theta.base_size)
            fast = checker.check(part)
            generic = verify_weak(Xi(theta, n, part, checker.algebra))
            assert fast.ok == generic.ok, (p, n, m, seed)


def _replay_certificate(structure, cert):
    """The certificate's element pair must break the composition equality
    at the certificate's point pair, under the generic image semantics."""
    x, y = cert.elements
    alg = structure.algebra
    z = alg.compose_masks(x, y)
    d = structure.base_size
    expected = image(structure, z)
    rx = bits_to_rows(image(structure, x).bits, d)
    ry = bits_to_rows(image(structure, y).bits, d)
    prod = product_rows(rx, ry)
    u, v = cert.point
    return expected.has(u, v) != bool(prod[u] >> v & 1)


def test_fast_checker_certificates_replay(aff3):
    found = 0
    for seed in range(6):
        x = build_xi(aff3, 2, seed)
        report = check_xi_fast(x)
        if not report.ok:
            found += 1
            assert _replay_certificate(x, report.certificate)
            assert not verify_weak(x).ok
    assert found  # at p=3 these seeds are overwhelmingly failing


def test_union_defect_blocks_all_seeds_at_m2(aff3):
    theta = build_power(aff3, 2)
    checker = XiFastChecker(theta, 2)
    assert checker.union_defect is not None
    e, (u, v) = checker.union_defect
    # the defect pair mixes identity and slope coordinates
    for seed in (0, 5, 123456):
        part = PartitionRecipe(seed, 2, 81)
        report = checker.check(part)
        assert not report.ok
        assert report.certificate.condition == "union-defect"
        x = Xi(theta, 2, part, checker.algebra)
        assert _replay_certificate(x, report.certificate)
    # additive inner structures have no defect
    assert XiFastChecker(aff3, 2).union_defect is None


def test_search_weakrep_deterministic():
    a = search_weakrep(3, 2, 1, range(10))
    b = search_weakrep(3, 2, 1, range(10))
    assert [(r.seed, r.ok, r.condition, r.point) for r in a.results] == [
        (r.seed, r.ok, r.condition, r.point) for r in b.results
    ]


def test_search_weakrep_strict_mode_agrees():
    report = search_weakrep(3, 2, 1, range(5), mode="strict")
    for r in report.results:
        assert r.strict_ok == r.ok
    report = search_weakrep(3, 1, 1, range(3), mode="strict")
    assert all(r.ok and r.strict_ok for r in report.results)


def test_xi_over_power_inner_n1_weak_but_not_full(aff3):
    # n = 1 over a proper power: still a weak representation, but the
    # inner blocks inherit the power's complement defect
    theta = build_power(aff3, 2)
    x = build_xi(theta, 1, 4)
    assert check_xi_fast(x).ok
    assert verify_weak(x).ok
    fullr = verify_full(x)
    assert not fullr.ok
    assert fullr.failure.clause == "complement"


def test_full_representation_transfers_to_xi(aff3):
    # when the inner structure is a full representation and the fast
    # check passes, the doubled structure is a full representation too
    assert verify_full(aff3).ok
    passing = [s for s in range(5) if check_xi_fast(build_xi(aff3, 1, s)).ok]
    assert passing  # n = 1 always passes
    for seed in passing:
        assert verify_full(build_xi(aff3, 1, seed)).ok
    # n = 2: no passing seed exists at desk scale; the transfer property
    # is vacuously covered and the sweep stays honest about it
    assert not [s for s in range(10) if check_xi_fast(build_xi(aff3, 2, s)).ok]


# -- bound calculus -------------------------------------------------------------


def test_eval_bounds_examples():
    r = eval_bounds_power(3, 2, 1)
    assert r.d == 9 and r.k == 2
    assert r.ineq1 is False and r.ineq2 is False
    # exact cross-check of the bound at (p,n,d,k) = (3,2,9,2)
    exact = eval_bounds(3, 2, 9, 2, mode="exact")
    expected = Fraction(2 * 9 * 8 * 4, 1) * Fraction(3, 4) ** 9 + Fraction(
        2 * 4 * 81 * 2, 1
    ) * Fraction(1, 2) ** 2
    assert exact.failure_bound_exact == expected
    assert math.isclose(r.failure_bound, float(expected), rel_tol=1e-9)


def test_eval_bounds_minimal_m_regression():
    # first exponent where both inequalities hold for (p,n) = (3,2),
    # frozen from an exact-rational scan
    flags = [eval_bounds_power(3, 2, m).both_hold for m in range(1, 8)]
    assert flags == [False, False, False, False, False, True, True]


def test_eval_bounds_n1_not_applicable():
    r = eval_bounds(3, 1, 9, 2)
    assert r.ineq1 is None and r.ineq2 is None
    assert r.failure_bound == 0.0


def test_eval_bounds_log_agrees_with_exact_on_grid():
    points = 0
    for p in (3, 4, 5, 7, 9):
        for n in (2, 3, 4):
            for m in (1, 2, 3, 4):
                if p ** (2 * m) > 1 << 21:  # exact-mode exponent cap
                    continue
                log = eval_bounds_power(p, n, m, mode="log")
                exact = eval_bounds_power(p, n, m, mode="exact")
                assert (log.ineq1, log.ineq2) == (exact.ineq1, exact.ineq2)
                points += 1
    assert points >= 30


def test_thresholds_values():
    th = sufficiency_thresholds(3, 2)
    assert math.isclose(th.m_ineq1, math.log(64) / math.log(3), rel_tol=1e-12)
    assert math.isclose(th.m_ineq2_growth, 2 * math.log2(48), rel_tol=1e-12)
    assert math.isclose(th.m_ineq2_start, math.log2(32) / 3, rel_tol=1e-12)
    assert th.p_ineq1 == 64
    assert th.p_ineq2 == 1 + 96**2
    with pytest.raises(ValueError):
        sufficiency_thresholds(3, 1)


def test_thresholds_are_sufficient():
    for p, n in [(3, 2), (5, 2), (9, 3)]:
        th = sufficiency_thresholds(p, n)
        m0 = math.ceil(th.m_all)
        for m in (m0, m0 + 1):
            assert eval_bounds_power(p, n, m).both_hold, (p, n, m)


def test_montecarlo_reports():
    r = montecarlo(3, 1, 1, trials=10, seed0=0)
    assert r.failures == 0 and r.rate == 0.0
    assert r.consistency in ("consistent", "vacuous, consistent")
    r = montecarlo(3, 2, 1, trials=10, seed0=0)
    assert r.analytic_bound >= 1.0
    assert r.consistency == "vacuous, consistent"
    assert 0.0 <= r.wilson_low <= r.rate <= r.wilson_high <= 1.0
