import numpy as np
import pytest

from advbound import bounds, problems, products, symmetry


def test_tensor_problem_single_factor_matches_base():
    base = problems.build_search(3)
    prod = products.tensor_problem(base, 1)
    assert prod.problem.functions == base.functions
    assert prod.problem.labels == base.labels


def test_tensor_problem_counts_and_gram():
    base = problems.build_search(2)
    prod = products.tensor_problem(base, 2)
    assert prod.problem.size == 4
    assert prod.problem.n_inputs == 4
    base3 = problems.build_search(3)
    prod3 = products.tensor_problem(base3, 2)
    assert np.allclose(prod3.problem.gram_matrix(), np.eye(9))  # distinct label tuples
    pe = problems.build_index_erasure(2, 3)
    prod_e = products.tensor_problem(pe, 2)
    assert np.abs(prod_e.problem.gram - np.kron(pe.gram, pe.gram)).max() < 1e-12


def test_tensor_problem_agreement_factorizes():
    base = problems.build_search(3)
    prod = products.tensor_problem(base, 2)
    ones = np.ones((3, 3))
    for i in range(2):
        for x in range(3):
            d = problems.agreement_matrix(prod.problem, prod.letter(i, x))
            d_base = problems.agreement_matrix(base, x)
            expected = np.kron(d_base, ones) if i == 0 else np.kron(ones, d_base)
            assert np.array_equal(d, expected)
            # row sums multiply: base agreement count times the free factor size
            base_sums = d_base.sum(axis=0)
            free = np.full(3, 3.0)
            target = np.kron(base_sums, free) if i == 0 else np.kron(free, base_sums)
            assert np.array_equal(d.sum(axis=0), target)


def test_tensor_problem_size_guard():
    base = problems.build_search(16)
    with pytest.raises(products.ProductError):
        products.tensor_problem(base, 5)


def test_tensor_adversary_requires_multiplicative():
    adv = bounds.search_adversary(3)
    with pytest.raises(products.ProductError):
        products.tensor_adversary(adv, 2)


def test_tensor_adversary_spectrum_and_identity():
    ident = bounds.AdversaryMatrix(matrix=np.eye(3), kind="multiplicative")
    assert np.array_equal(products.tensor_adversary(ident, 2).matrix, np.eye(9))
    fam = bounds.multiplicative_family(bounds.search_adversary(3), 2.0)
    power = products.tensor_adversary(fam, 2)
    base_w = np.linalg.eigvalsh(fam.matrix)
    expected = np.sort(np.multiply.outer(base_w, base_w).ravel())
    assert np.abs(np.sort(np.linalg.eigvalsh(power.matrix)) - expected).max() < 1e-9
    assert np.linalg.norm(power.matrix, 2) == pytest.approx(
        np.linalg.norm(fam.matrix, 2) ** 2, abs=1e-9
    )


def test_factor_norm_identity():
    base = problems.build_search(3)
    fam = bounds.multiplicative_family(bounds.search_adversary(3), 2.0)
    for k in (2, 3):
        rep = products.verify_factor_norm_identity(fam, base, k)
        assert rep.passed(1e-8)
        assert rep.max_gap <= 1e-9
    ident = bounds.AdversaryMatrix(matrix=np.eye(3), kind="multiplicative")
    rep = products.verify_factor_norm_identity(ident, base, 2)
    assert rep.base_value == pytest.approx(1.0, abs=1e-12)
    assert all(abs(v - 1.0) < 1e-12 for _, _, v in rep.per_letter)


def test_bad_subspace_inclusion_search():
    base = problems.build_search(3)
    fam = bounds.multiplicative_family(bounds.search_adversary(3), 2.0)
    rep = products.bad_subspace_inclusion(fam, base, 3.0, 2)
    assert rep.inclusion_holds
    below = [pattern for pattern in rep.patterns if pattern[2]]
    assert below and all(good == 0 for _, good, _ in below)
    # one well-progressed factor keeps the product above the raised threshold
    assert all(value >= 3.0 for value, good, _ in rep.patterns if good >= 1)


def test_bad_subspace_inclusion_matches_bruteforce_classification():
    base = problems.build_search(4)
    fam = bounds.multiplicative_family(bounds.search_adversary(4), 3.0)
    lam = 1 + 3.0
    rep = products.bad_subspace_inclusion(fam, base, lam, 2)
    spec = fam.spectrum
    flags = spec.eigenvalues >= lam - 1e-9
    idx = 0
    for i in range(4):
        for j in range(4):
            value, good, below = rep.patterns[idx]
            assert value == pytest.approx(
                float(spec.eigenvalues[i] * spec.eigenvalues[j]), abs=1e-12
            )
            assert good == int(flags[i]) + int(flags[j])
            idx += 1
    assert rep.inclusion_holds


def test_coherent_eta_shrinks_under_powers():
    pe = problems.build_index_erasure(2, 3)
    decomp = symmetry.isotypic_decomposition(symmetry.full_product_action(pe))
    adv, _ = bounds.erasure_adversary(decomp)
    fam = bounds.multiplicative_family(adv, 1.0)
    rep = products.bad_subspace_inclusion(fam, pe, 2.0, 2)
    assert rep.eta_base == pytest.approx(2 / 3, abs=1e-10)
    assert rep.eta_power is not None
    assert rep.eta_power <= rep.eta_base + 1e-12
    assert rep.eta_power == pytest.approx((2 / 3) ** 2, abs=1e-9)
