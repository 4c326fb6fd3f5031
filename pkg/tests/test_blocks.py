import math

import numpy as np
import pytest

from advbound import blocks, bounds, linalg, problems, symmetry


@pytest.fixture(scope="module")
def search4_setup():
    p = problems.build_search(4)
    action = symmetry.input_action(p)
    decomp = symmetry.isotypic_decomposition(action)
    return p, action, decomp


@pytest.fixture(scope="module")
def erasure23_setup():
    p = problems.build_index_erasure(2, 3)
    action = symmetry.full_product_action(p)
    decomp = symmetry.isotypic_decomposition(action)
    return p, action, decomp


def test_restrict_search_copy_structure(search4_setup):
    p, action, decomp = search4_setup
    restricted = blocks.restrict(decomp, action, 0)
    dims = sorted((c.parent, c.dim) for c in restricted.copies)
    # the uniform line stays whole; the 3-dim block splits into a second
    # copy of the trivial piece plus a 2-dim piece
    assert dims == [(0, 1), (1, 1), (1, 2)]
    trivial_class = [cls for cls in restricted.classes if len(cls) == 2]
    assert len(trivial_class) == 1
    total = sum(c.dim for c in restricted.copies)
    assert total == p.size


def test_restrict_requires_multiplicity_free(search4_setup):
    p, _, decomp = search4_setup
    shift = symmetry.GroupElement(pi=(1, 2, 3, 0), tau=(0, 1))
    cyclic = symmetry.action_from_generators(p, [shift])
    with pytest.raises(blocks.BlockError):
        blocks.restrict(decomp, cyclic, 0)


def test_restrict_trivial_stabilizer():
    p = problems.build_search(3)
    action = symmetry.input_action(p)
    decomp = symmetry.isotypic_decomposition(action)
    # freeze two of three letters: the stabilizer of both is trivial on the rest
    sub_action = symmetry.product_action(p, pi_moving=(0,), tau_moving=())
    pieces = []
    for block in decomp.blocks:
        pieces.extend(blocks.split_under_subgroup(block.basis, sub_action))
    assert all(piece.shape[1] == 1 for piece in pieces)


def test_progress_blocks_search_paper_values(search4_setup):
    p, action, decomp = search4_setup
    adv = bounds.search_adversary(4)
    weights = bounds.block_weights(adv, decomp)
    restricted = blocks.restrict(decomp, action, 1)
    blks = blocks.progress_blocks(weights, restricted, p, 1, "additive")
    doubled = [b for b in blks if len(b.copy_ids) == 2][0]
    gamma = -1 / 3
    alpha = 0.5
    assert doubled.norm == pytest.approx((1 - gamma) * alpha * math.sqrt(1 - alpha**2), abs=1e-9)
    assert doubled.norm == pytest.approx(1 / math.sqrt(3), abs=1e-9)
    single = [b for b in blks if len(b.copy_ids) == 1][0]
    assert single.norm < 1e-9

    fam = bounds.multiplicative_family(adv, 2.0)
    fam_weights = bounds.block_weights(fam, decomp)
    mult = blocks.progress_blocks(fam_weights, restricted, p, 1, "multiplicative")
    msingle = [b for b in mult if len(b.copy_ids) == 1][0]
    assert msingle.matrix[0, 0] == pytest.approx(1.0, abs=1e-9)


def test_progress_blocks_equal_weights_vanish(search4_setup):
    p, action, decomp = search4_setup
    restricted = blocks.restrict(decomp, action, 0)
    blks = blocks.progress_blocks([0.7, 0.7], restricted, p, 0, "additive")
    assert max(b.norm for b in blks) < 1e-9


def test_progress_blocks_weight_validation(search4_setup):
    p, action, decomp = search4_setup
    restricted = blocks.restrict(decomp, action, 0)
    with pytest.raises(blocks.BlockError):
        blocks.progress_blocks([1.5, 0.0], restricted, p, 0, "additive")
    with pytest.raises(blocks.BlockError):
        blocks.progress_blocks([1.0, 0.5], restricted, p, 0, "multiplicative")


def test_verify_block_norms_search(search4_setup):
    p, action, decomp = search4_setup
    adv = bounds.search_adversary(4)
    weights = bounds.block_weights(adv, decomp)
    fam = bounds.multiplicative_family(adv, 1.5)
    fam_weights = bounds.block_weights(fam, decomp)
    for x in range(p.n_inputs):
        restricted = blocks.restrict(decomp, action, x)
        rep = blocks.verify_block_norms(
            blocks.progress_blocks(weights, restricted, p, x, "additive"), adv, p, x, "additive"
        )
        assert rep.gap <= 1e-8
        repm = blocks.verify_block_norms(
            blocks.progress_blocks(fam_weights, restricted, p, x, "multiplicative"),
            fam,
            p,
            x,
            "multiplicative",
        )
        assert repm.gap <= 1e-8 and repm.gap_backward <= 1e-8


def test_verify_block_norms_identity_weights(search4_setup):
    p, action, decomp = search4_setup
    restricted = blocks.restrict(decomp, action, 0)
    ident = bounds.AdversaryMatrix(matrix=np.eye(4), kind="multiplicative")
    blks = blocks.progress_blocks([1.0, 1.0], restricted, p, 0, "multiplicative")
    rep = blocks.verify_block_norms(blks, ident, p, 0, "multiplicative")
    assert rep.direct == pytest.approx(1.0, abs=1e-12)
    assert rep.from_blocks == pytest.approx(1.0, abs=1e-12)


def test_fast_y_path_matches_full_sum(erasure23_setup):
    p, action, decomp = erasure23_setup
    adv, weights = bounds.erasure_adversary(decomp)
    restricted = blocks.restrict(decomp, action, 1)
    full = blocks.progress_blocks(weights, restricted, p, 1, "additive")
    fast = blocks.progress_blocks(weights, restricted, p, 1, "additive", fast_y_path=True)
    for a, b in zip(full, fast):
        assert np.abs(a.matrix - b.matrix).max() < 1e-12


def test_block_reconstruction(erasure23_setup):
    p, action, decomp = erasure23_setup
    adv, weights = bounds.erasure_adversary(decomp)
    for x in range(p.n_inputs):
        restricted = blocks.restrict(decomp, action, x)
        rebuilt = blocks.reconstruct_masked(weights, restricted, p)
        assert (
            linalg.norm(rebuilt - bounds.masked(adv.matrix, p, x), "frobenius") <= 1e-7
        )


def test_nonzero_blocks_follow_shape_rules():
    # Only stabilizer irreps whose output shape adds at most two boxes to the
    # input shape can carry weight.
    p = problems.build_index_erasure(3, 4)
    action = symmetry.full_product_action(p)
    decomp = symmetry.isotypic_decomposition(action)
    adv, weights = bounds.erasure_adversary(decomp)
    for x in range(p.n_inputs):
        restricted = blocks.restrict(decomp, action, x)
        blks = blocks.progress_blocks(weights, restricted, p, x, "additive")
        sub = restricted.subgroup
        for blk in blks:
            rep_copy = restricted.copies[blk.copy_ids[0]]
            label = symmetry._match_product_label(
                np.asarray(rep_copy.fingerprint),
                rep_copy.dim,
                [key for _, key in sub.class_representatives()],
                (len(sub.product.pi_moving), len(sub.product.tau_moving)),
            )
            assert label is not None
            lam_in, lam_out = label
            allowed = lam_out.contains(lam_in) and lam_out.size - lam_in.size <= 2
            if blk.norm > 1e-8:
                assert allowed, f"block {label} should vanish but has norm {blk.norm}"


def test_trace_identities_search_and_erasure(search4_setup, erasure23_setup):
    for p, action, decomp in (search4_setup, erasure23_setup):
        rep = blocks.projector_trace_identities(decomp, action, 0, 0)
        assert rep.tuples_checked > 0
        assert rep.max_factorization_gap <= 1e-8
        assert rep.max_magnitude_gap <= 1e-8
        assert rep.max_nonisomorphic_residual <= 1e-9


def test_identical_leaf_tuple_consistency(search4_setup):
    # All four positions equal: the factorized form collapses to the
    # dimension, an internal consistency point of the identity.
    p, action, decomp = search4_setup
    sub = action.stabilizer(0)
    block = decomp.blocks[1]
    leaf = blocks.split_under_subgroup(block.basis, sub)[0]
    proj = leaf @ leaf.conj().T
    d = leaf.shape[1]
    lhs = float(np.real(np.trace(proj @ proj @ proj @ proj)))
    assert lhs == pytest.approx(d, abs=1e-9)
