"""Named invariant checks backing the ``verify`` command.

Every check compares an identity against an independent computation at
small desk scale and reports the observed gap against its budget.  The
whole suite is deterministic for a fixed seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from advbound import blocks, bounds, linalg, problems, products, simulator, symmetry, young


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    observed: float
    budget: float
    note: str = ""


def _gap_check(name: str, observed: float, budget: float, note: str = "") -> Check:
    return Check(name=name, passed=bool(observed <= budget), observed=float(observed), budget=float(budget), note=note)


def _flag_check(name: str, ok: bool, note: str = "") -> Check:
    return Check(name=name, passed=bool(ok), observed=0.0 if ok else 1.0, budget=0.0, note=note)


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (raw + raw.conj().T) / 2


# --------------------------------------------------------------------- linalg


def checks_linalg(seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 1])
    out = []
    worst_order = 0.0
    worst_hoelder = 0.0
    worst_pairing = 0.0
    for _ in range(10):
        a = _random_hermitian(rng, 8)
        worst_order = max(
            worst_order,
            linalg.norm(a, "spectral") - linalg.norm(a, "frobenius"),
            linalg.norm(a, "frobenius") - linalg.norm(a, "trace"),
        )
        b = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        c = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        worst_hoelder = max(
            worst_hoelder,
            linalg.norm(b @ c, "trace") - linalg.norm(b, "frobenius") * linalg.norm(c, "frobenius"),
        )
        h = _random_hermitian(rng, 6)
        psd = h @ h.conj().T
        worst_pairing = max(
            worst_pairing,
            float(np.real(np.trace(h @ psd)))
            - linalg.norm(h, "spectral") * linalg.norm(psd, "trace"),
        )
    out.append(_gap_check("linalg.norm-ordering", worst_order, 1e-12))
    out.append(_gap_check("linalg.hoelder", worst_hoelder, 1e-9))
    out.append(_gap_check("linalg.trace-pairing", worst_pairing, 1e-9))

    a = _random_hermitian(rng, 8)
    spec = linalg.eig_hermitian(a)
    rec = linalg.norm(a - spec.reconstruct(), "frobenius")
    budget = 1e-9 * max(1.0, linalg.norm(a, "frobenius"))
    out.append(_gap_check("linalg.eig-reconstruction", rec, budget))
    v = spec.eigenvectors
    out.append(
        _gap_check(
            "linalg.eig-orthonormal",
            float(np.abs(v.conj().T @ v - np.eye(8)).max()),
            1e-9,
        )
    )

    psd = a @ a.conj().T + 0.1 * np.eye(8)
    root = linalg.psd_power(psd, 0.5)
    inv_root = linalg.psd_power(psd, -0.5)
    out.append(_gap_check("linalg.psd-root", float(np.abs(root @ root - psd).max()), 1e-9))
    out.append(
        _gap_check(
            "linalg.psd-inverse-root",
            float(np.abs(root @ inv_root - np.eye(8)).max()),
            1e-9,
        )
    )

    p = problems.build_search(4)
    projs = [problems.output_projector(p, 1, y) for y in range(2)]
    pinched = linalg.pinch(psd[:4, :4], projs)
    out.append(
        _gap_check(
            "linalg.pinch-trace-preserving",
            abs(float(np.real(np.trace(pinched) - np.trace(psd[:4, :4])))),
            1e-10,
        )
    )
    out.append(
        _gap_check(
            "linalg.pinch-psd-preserving",
            max(0.0, -float(np.linalg.eigvalsh(pinched).min())),
            1e-10,
        )
    )
    return out


# ------------------------------------------------------------------- problems


def checks_problems(seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 2])
    out = []
    for p in (problems.build_search(4), problems.build_index_erasure(2, 3)):
        worst_part = 0.0
        worst_mask = 0.0
        for x in range(p.n_inputs):
            projs = [problems.output_projector(p, x, y) for y in range(p.n_outputs)]
            worst_part = max(worst_part, float(np.abs(sum(projs) - np.eye(p.size)).max()))
            a = _random_hermitian(rng, p.size)
            direct = linalg.hadamard(a, problems.agreement_matrix(p, x))
            worst_mask = max(worst_mask, float(np.abs(direct - linalg.pinch(a, projs)).max()))
        out.append(_gap_check(f"problems.{p.name}.projector-partition", worst_part, 0.0))
        out.append(_gap_check(f"problems.{p.name}.mask-equals-pinch", worst_mask, 1e-12))

    p = problems.build_index_erasure(2, 3)
    rho = problems.target_gram(p)
    delta = problems.uniform_state(p)
    out.append(
        _gap_check(
            "problems.index-erasure-2-3.uniform-weight",
            abs(float(np.real(delta @ rho @ delta)) - 2.0 / 3.0),
            1e-12,
        )
    )
    s = problems.build_search(5)
    out.append(
        _gap_check(
            "problems.search-5.target-identity",
            float(np.abs(problems.target_gram(s) - np.eye(5) / 5).max()),
            0.0,
        )
    )
    perm = rng.permutation(p.size)
    shuffled = problems.OracleProblem(
        n_inputs=p.n_inputs,
        n_outputs=p.n_outputs,
        functions=tuple(p.functions[i] for i in perm),
        kind=p.kind,
        gram=p.gram[np.ix_(perm, perm)],
        name="shuffled",
    )
    rho_shuffled = problems.target_gram(shuffled)
    out.append(
        _gap_check(
            "problems.target-gram-reorder-invariance",
            float(np.abs(rho_shuffled - rho[np.ix_(perm, perm)]).max()),
            0.0,
        )
    )
    return out


# ------------------------------------------------------------------- symmetry


def checks_symmetry(seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 3])
    out = []
    search = problems.build_search(4)
    erasure = problems.build_index_erasure(2, 3)
    cases = [
        (search, symmetry.input_action(search)),
        (erasure, symmetry.full_product_action(erasure)),
    ]
    for p, action in cases:
        out.append(
            _flag_check(
                f"symmetry.{p.name}.automorphism",
                symmetry.verify_automorphism(action).passed,
            )
        )
        labels = symmetry.pair_orbit_labels(action)
        worst = 0
        for perm in action.generator_perms():
            moved = labels[np.ix_(perm, perm)]
            worst = max(worst, int(np.abs(moved - labels).max()))
        out.append(_gap_check(f"symmetry.{p.name}.orbits-invariant", worst, 0.0))
        out.append(
            _flag_check(
                f"symmetry.{p.name}.multiplicity-free",
                symmetry.is_multiplicity_free(action),
            )
        )
        decomp = symmetry.isotypic_decomposition(action, seed=seed)
        total = np.zeros((p.size, p.size), dtype=np.complex128)
        worst_proj = 0.0
        worst_comm = 0.0
        for block in decomp.blocks:
            proj = block.projector
            total += proj
            worst_proj = max(worst_proj, float(np.abs(proj @ proj - proj).max()))
            for perm in action.generator_perms():
                inv = np.empty(p.size, dtype=np.int64)
                inv[perm] = np.arange(p.size)
                worst_comm = max(worst_comm, float(np.abs(proj[inv, :] - proj[:, perm]).max()))
        out.append(_gap_check(f"symmetry.{p.name}.projectors-idempotent", worst_proj, 1e-8))
        out.append(_gap_check(f"symmetry.{p.name}.projectors-commute", worst_comm, 1e-8))
        out.append(
            _gap_check(
                f"symmetry.{p.name}.projectors-resolve-identity",
                float(np.abs(total - np.eye(p.size)).max()),
                1e-8,
            )
        )

        a = _random_hermitian(rng, p.size)
        avg = symmetry.symmetrize(a, action)
        delta = problems.uniform_state(p)
        out.append(
            _gap_check(
                f"symmetry.{p.name}.symmetrize-trace",
                abs(complex(np.trace(avg) - np.trace(a))),
                1e-12 * p.size,
            )
        )
        out.append(
            _gap_check(
                f"symmetry.{p.name}.symmetrize-uniform-element",
                abs(complex(delta @ avg @ delta - delta @ a @ delta)),
                1e-12 * p.size,
            )
        )
        out.append(
            _gap_check(
                f"symmetry.{p.name}.symmetrize-idempotent",
                float(np.abs(symmetry.symmetrize(avg, action) - avg).max()),
                1e-9,
            )
        )
        cap = max(
            linalg.norm(bounds.masked(a, p, x) - a) for x in range(p.n_inputs)
        )
        worst_contract = 0.0
        for x in range(p.n_inputs):
            worst_contract = max(
                worst_contract, linalg.norm(bounds.masked(avg, p, x) - avg) - cap
            )
        out.append(
            _gap_check(f"symmetry.{p.name}.symmetrize-contracts", worst_contract, 1e-9)
        )

    # Shift-only relabelings leave a circulant, non-symmetric commutant.
    n = 4
    shift = symmetry.GroupElement(
        pi=tuple((i + 1) % n for i in range(n)), tau=(0, 1)
    )
    cyclic = symmetry.action_from_generators(search, [shift])
    out.append(
        _flag_check(
            "symmetry.search-4.cyclic-not-multiplicity-free",
            not symmetry.is_multiplicity_free(cyclic),
        )
    )
    flip = symmetry.GroupElement(pi=tuple(range(4)), tau=(1, 0))
    broken = symmetry.action_from_generators(search, [flip])
    out.append(
        _flag_check(
            "symmetry.search-4.output-flip-rejected",
            not symmetry.verify_automorphism(broken).passed,
        )
    )
    return out


# ---------------------------------------------------------------------- young


def checks_young(seed: int) -> list[Check]:
    out = []
    ok = True
    for n in range(1, 9):
        total = sum(
            young.hook_dimension(lam, n) ** 2 for lam in young.enumerate_below_row(n, n)
        )
        ok = ok and total == math.factorial(n)
    out.append(_flag_check("young.sum-of-squared-dimensions", ok))

    ok = True
    for n in range(2, 13):
        for lam in young.enumerate_below_row(3, n):
            left = young.hook_dimension(lam, n)
            right = sum(
                young.hook_dimension(mu, n - 1) for mu in young.branching_restrictions(lam, n)
            )
            ok = ok and left == right
    out.append(_flag_check("young.branching-dimension-sums", ok))

    ok = True
    for n in range(1, 7):
        parts = young._partitions_of(n)
        sizes = {
            ct: math.factorial(n) // _class_size_denominator(ct) for ct in parts
        }
        for la in parts:
            for mu in parts:
                total = sum(
                    sizes[ct] * young.character(la, ct) * young.character(mu, ct)
                    for ct in parts
                )
                expected = math.factorial(n) if la == mu else 0
                ok = ok and total == expected
    out.append(_flag_check("young.character-orthogonality", ok))

    ok = True
    for n in range(1, 7):
        for m in range(n, 7):
            entries = young.erasure_census(n, m)
            total = sum(e.dim for e in entries)
            ok = ok and total == math.factorial(m) // math.factorial(m - n)
    out.append(_flag_check("young.census-completeness", ok))

    ok = all(
        young.character(young.full_diagram(lam, 7), (1,) * 7) == young.hook_dimension(lam, 7)
        for lam in young.enumerate_below_row(3, 7)
    )
    out.append(_flag_check("young.character-at-identity", ok))

    w = young.erasure_weights(4)
    out.append(
        _flag_check(
            "young.erasure-weights",
            w[0] == 1.0 and abs(w[1] - 0.5) < 1e-15 and w[2] == 0.0,
        )
    )
    return out


def _class_size_denominator(cycle_type: tuple[int, ...]) -> int:
    denom = 1
    for length in set(cycle_type):
        count = cycle_type.count(length)
        denom *= length**count * math.factorial(count)
    return denom


# --------------------------------------------------------------------- bounds


def checks_bounds(seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 4])
    out = []
    worst_eq = 0.0
    worst_den = 0.0
    for n in (4, 8):
        p = problems.build_search(n)
        adv = bounds.search_adversary(n)
        for eps in (0.0, 0.04, 0.1):
            rep = bounds.additive_bound(adv, p, eps)
            expected = bounds.search_closed_forms(n, eps)[0]
            worst_eq = max(worst_eq, abs(rep.bound - expected))
            worst_den = max(worst_den, abs(rep.denominator - 1 / math.sqrt(n - 1)))
    out.append(_gap_check("bounds.search-additive-closed-form", worst_eq, 1e-9))
    out.append(_gap_check("bounds.search-additive-denominator", worst_den, 1e-10))

    p = problems.build_search(6)
    adv = bounds.search_adversary(6)
    rho = problems.target_gram(p)
    worst_junk = 0.0
    for _ in range(20):
        raw = rng.standard_normal((p.size, 4)) + 1j * rng.standard_normal((p.size, 4))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        junk = raw @ raw.conj().T
        worst_junk = max(worst_junk, abs(complex(np.trace(adv.matrix @ (rho * junk)))))
    out.append(_gap_check("bounds.zero-condition-random-junk", worst_junk, 1e-9))

    worst_cap = 0.0
    for x in range(p.n_inputs):
        worst_cap = max(worst_cap, linalg.norm(bounds.masked(adv.matrix, p, x) - adv.matrix) - 2)
    out.append(_gap_check("bounds.masked-difference-cap", worst_cap, 1e-12))

    p8 = problems.build_search(8)
    adv8 = bounds.search_adversary(8)
    ok = True
    for eps in (0.0, 0.05, 0.1, 0.15):
        lam_t = (4 / (1 - eps)) ** (1 / 3) - 1
        hyb = bounds.hybrid_bound(adv8, p8, eps, lam_t).bound
        add = bounds.additive_bound(adv8, p8, eps).bound
        ok = ok and hyb >= add / 60 - 1e-12
    out.append(_flag_check("bounds.hybrid-dominates-additive-over-60", ok))

    rep = bounds.additive_bound(adv8, p8, 0.25)
    out.append(_flag_check("bounds.vacuous-flag", "vacuous" in rep.flags and rep.bound <= 0))

    rep = bounds.hybrid_bound(
        bounds.search_adversary(4), problems.build_search(4), 0.5, -1.0 / 3.0
    )
    expected = (4.0 / 3.0) * (math.sqrt(0.5) - 0.5) ** 2 * math.sqrt(3)
    out.append(_gap_check("bounds.hybrid-search-example", abs(rep.bound - expected), 1e-9))

    hyb = bounds.hybrid_bound(adv8, p8, 0.3, 0.0).bound
    scan = bounds.madv_gamma_scan(adv8, p8, 0.3, 0.0, [1e-3])
    out.append(
        _gap_check(
            "bounds.family-scan-limit", abs(scan[0][1].bound - hyb) / hyb, 0.02
        )
    )

    p_e = problems.build_index_erasure(2, 3)
    delta = problems.uniform_state(p8)
    eta_search = bounds.eta(p8, np.outer(delta, delta))
    decomp = symmetry.isotypic_decomposition(symmetry.full_product_action(p_e), seed=seed)
    adv_e, _ = bounds.erasure_adversary(decomp)
    bad = decomp.blocks[0].projector  # trivial block: both shapes empty
    out.append(
        _gap_check(
            "bounds.eta-values",
            max(
                abs(eta_search - 1.0 / 8.0),
                abs(bounds.eta(p_e, bad) - 2.0 / 3.0),
                bounds.eta(p8, np.zeros((8, 8))),
            ),
            1e-10,
        )
    )
    val = bounds.validate(adv_e, p_e)
    out.append(
        _flag_check(
            "bounds.erasure-zero-condition-fails",
            val.zero_condition is False,
            note="weighted bad blocks overlap the target state",
        )
    )
    return out


# --------------------------------------------------------------------- blocks


def checks_blocks(seed: int) -> list[Check]:
    out = []
    # Search: the reduction must match dense norms for both variants.
    p = problems.build_search(4)
    action = symmetry.input_action(p)
    decomp = symmetry.isotypic_decomposition(action, seed=seed)
    adv = bounds.search_adversary(4)
    weights = bounds.block_weights(adv, decomp)
    fam = bounds.multiplicative_family(adv, 1.5)
    fam_weights = bounds.block_weights(fam, decomp)
    worst_add = 0.0
    worst_mult = 0.0
    worst_rec = 0.0
    for x in range(p.n_inputs):
        restricted = blocks.restrict(decomp, action, x, seed=seed)
        add_blocks = blocks.progress_blocks(weights, restricted, p, x, "additive")
        rep = blocks.verify_block_norms(add_blocks, adv, p, x, "additive")
        worst_add = max(worst_add, rep.gap)
        mult_blocks = blocks.progress_blocks(fam_weights, restricted, p, x, "multiplicative")
        repm = blocks.verify_block_norms(mult_blocks, fam, p, x, "multiplicative")
        worst_mult = max(worst_mult, repm.gap, repm.gap_backward)
        rebuilt = blocks.reconstruct_masked(weights, restricted, p)
        worst_rec = max(
            worst_rec,
            linalg.norm(rebuilt - bounds.masked(adv.matrix, p, x), "frobenius"),
        )
    out.append(_gap_check("blocks.search-4.additive-norm-equivalence", worst_add, 1e-8))
    out.append(_gap_check("blocks.search-4.multiplicative-norm-equivalence", worst_mult, 1e-8))
    out.append(_gap_check("blocks.search-4.mask-reconstruction", worst_rec, 1e-7))

    restricted = blocks.restrict(decomp, action, 0, seed=seed)
    add_blocks = blocks.progress_blocks(weights, restricted, p, 0, "additive")
    two_dim = [b for b in add_blocks if len(b.copy_ids) == 2]
    single = [b for b in add_blocks if len(b.copy_ids) == 1]
    gamma = -1.0 / 3.0
    expected = (1 - gamma) * 0.5 * math.sqrt(1 - 0.25)
    out.append(
        _gap_check(
            "blocks.search-4.doubled-trivial-norm",
            abs(two_dim[0].norm - expected) if len(two_dim) == 1 else 1.0,
            1e-9,
        )
    )
    out.append(
        _gap_check(
            "blocks.search-4.multiplicity-one-vanishes",
            max(b.norm for b in single) if single else 1.0,
            1e-9,
        )
    )
    mult_blocks = blocks.progress_blocks(fam_weights, restricted, p, 0, "multiplicative")
    singles = [b for b in mult_blocks if len(b.copy_ids) == 1]
    out.append(
        _gap_check(
            "blocks.search-4.multiplicity-one-ratio-is-one",
            max(abs(b.matrix[0, 0] - 1.0) for b in singles) if singles else 1.0,
            1e-9,
        )
    )

    # Index erasure at (2, 3): same equivalences plus the trace identities.
    p = problems.build_index_erasure(2, 3)
    action = symmetry.full_product_action(p)
    decomp = symmetry.isotypic_decomposition(action, seed=seed)
    adv, weights = bounds.erasure_adversary(decomp)
    fam = bounds.multiplicative_family(adv, 1.5)
    fam_weights = bounds.block_weights(fam, decomp)
    worst_add = 0.0
    worst_mult = 0.0
    for x in range(p.n_inputs):
        restricted = blocks.restrict(decomp, action, x, seed=seed)
        add_blocks = blocks.progress_blocks(weights, restricted, p, x, "additive")
        rep = blocks.verify_block_norms(add_blocks, adv, p, x, "additive")
        worst_add = max(worst_add, rep.gap)
        mult_blocks = blocks.progress_blocks(fam_weights, restricted, p, x, "multiplicative")
        repm = blocks.verify_block_norms(mult_blocks, fam, p, x, "multiplicative")
        worst_mult = max(worst_mult, repm.gap, repm.gap_backward)
        fast = blocks.progress_blocks(weights, restricted, p, x, "additive", fast_y_path=True)
        worst_add = max(
            worst_add,
            max(
                float(np.abs(a.matrix - b.matrix).max())
                for a, b in zip(fast, add_blocks)
            ),
        )
    out.append(_gap_check("blocks.index-erasure-2-3.additive-norm-equivalence", worst_add, 1e-7))
    out.append(
        _gap_check("blocks.index-erasure-2-3.multiplicative-norm-equivalence", worst_mult, 1e-7)
    )

    rep = blocks.projector_trace_identities(decomp, action, 0, 0, seed=seed)
    out.append(
        _gap_check(
            "blocks.index-erasure-2-3.trace-identities",
            max(rep.max_factorization_gap, rep.max_magnitude_gap, rep.max_nonisomorphic_residual),
            1e-8,
        )
    )
    p4 = problems.build_search(4)
    action4 = symmetry.input_action(p4)
    decomp4 = symmetry.isotypic_decomposition(action4, seed=seed)
    rep4 = blocks.projector_trace_identities(decomp4, action4, 0, 0, seed=seed)
    out.append(
        _gap_check(
            "blocks.search-4.trace-identities",
            max(rep4.max_factorization_gap, rep4.max_magnitude_gap, rep4.max_nonisomorphic_residual),
            1e-8,
        )
    )
    return out


# ------------------------------------------------------------------ simulator


def checks_simulator(seed: int) -> list[Check]:
    out = []
    p4 = problems.build_search(4)
    traj4 = simulator.run(simulator.grover_for_search(4, 1), p4)
    out.append(
        _gap_check(
            "simulator.grover-4-exact", abs(simulator.success_probability(traj4, p4) - 1.0), 1e-9
        )
    )
    p16 = problems.build_search(16)
    traj16 = simulator.run(simulator.grover_for_search(16, 3), p16)
    theta = math.asin(0.25)
    expected = math.sin(7 * theta) ** 2
    out.append(
        _gap_check(
            "simulator.grover-16-closed-form",
            abs(simulator.success_probability(traj16, p16) - expected),
            1e-9,
        )
    )
    traj0 = simulator.run(simulator.grover_for_search(4, 0), p4)
    out.append(
        _gap_check(
            "simulator.grover-0-iterations",
            abs(simulator.success_probability(traj0, p4) - 0.25),
            1e-12,
        )
    )

    oracle = simulator.super_oracle(problems.build_search(3))
    out.append(
        _flag_check(
            "simulator.super-oracle-involution",
            bool(
                np.array_equal(oracle, oracle.astype(int))
                and np.abs(oracle @ oracle - np.eye(oracle.shape[0])).max() == 0
            ),
        )
    )

    adv4 = bounds.search_adversary(4)
    rep = simulator.check_per_query(traj4, adv4, p4, "additive")
    out.append(_flag_check("simulator.per-query-additive", rep.passed))
    p8 = problems.build_search(8)
    traj8 = simulator.run(simulator.grover_for_search(8, 2), p8)
    fam8 = bounds.multiplicative_family(bounds.search_adversary(8), 1.0)
    repm = simulator.check_per_query(traj8, fam8, p8, "multiplicative")
    out.append(_flag_check("simulator.per-query-multiplicative", repm.passed))

    out.append(
        _gap_check("simulator.rho-update-identity", simulator.rho_update_gap(traj16, p16), 1e-8)
    )

    worst_final = 0.0
    for traj, p, adv in ((traj4, p4, adv4), (traj16, p16, bounds.search_adversary(16))):
        eps_obs = 1 - simulator.success_probability(traj, p)
        w_series = simulator.progress_trajectory(traj, adv)
        worst_final = max(worst_final, w_series[-1] - bounds.success_term(eps_obs))
        hyb_budget = 1 - (1 - 0.0) * (math.sqrt(1 - eps_obs) - math.sqrt(1.0 / p.size)) ** 2
        worst_final = max(worst_final, w_series[-1] - hyb_budget)
    out.append(_gap_check("simulator.final-progress-budgets", worst_final, 1e-6))

    prep = simulator.grover_for_search(4, 0)
    traj_local = simulator.run(prep, p4)
    w_series = simulator.progress_trajectory(traj_local, adv4)
    out.append(
        _gap_check(
            "simulator.local-circuit-constant-progress",
            float(np.abs(np.diff(w_series)).max(initial=0.0)),
            1e-12,
        )
    )
    return out


# ------------------------------------------------------------------- products


def checks_products(seed: int) -> list[Check]:
    out = []
    p3 = problems.build_search(3)
    fam = bounds.multiplicative_family(bounds.search_adversary(3), 2.0)
    power = products.tensor_adversary(fam, 2)
    base_w = np.linalg.eigvalsh(fam.matrix)
    prod_w = np.sort(np.multiply.outer(base_w, base_w).ravel())
    out.append(
        _gap_check(
            "products.kron-spectrum",
            float(np.abs(np.sort(np.linalg.eigvalsh(power.matrix)) - prod_w).max()),
            1e-9,
        )
    )
    for k in (2, 3):
        rep = products.verify_factor_norm_identity(fam, p3, k)
        out.append(_gap_check(f"products.factor-norm-identity-k{k}", rep.max_gap, 1e-9))

    rep = products.bad_subspace_inclusion(fam, p3, 1 + 2.0, 2)
    out.append(_flag_check("products.bad-subspace-inclusion", rep.inclusion_holds))

    pe = problems.build_index_erasure(2, 3)
    decomp = symmetry.isotypic_decomposition(symmetry.full_product_action(pe), seed=seed)
    adv_e, _ = bounds.erasure_adversary(decomp)
    fam_e = bounds.multiplicative_family(adv_e, 1.0)
    rep_e = products.bad_subspace_inclusion(fam_e, pe, 1 + 1.0, 2)
    out.append(
        _flag_check(
            "products.coherent-eta-monotone",
            rep_e.eta_power is not None and rep_e.eta_power <= rep_e.eta_base + 1e-12,
        )
    )

    prod = products.tensor_problem(p3, 2)
    worst = 0.0
    for i in range(2):
        for x in range(3):
            letter = prod.letter(i, x)
            d_prod = problems.agreement_matrix(prod.problem, letter)
            d_base = problems.agreement_matrix(p3, x)
            expected = np.kron(d_base, np.ones((3, 3))) if i == 0 else np.kron(np.ones((3, 3)), d_base)
            worst = max(worst, float(np.abs(d_prod - expected).max()))
    out.append(_gap_check("products.per-letter-mask-structure", worst, 0.0))
    return out


SUITES = {
    "linalg": checks_linalg,
    "problems": checks_problems,
    "symmetry": checks_symmetry,
    "young": checks_young,
    "bounds": checks_bounds,
    "blocks": checks_blocks,
    "simulator": checks_simulator,
    "products": checks_products,
}


def run_suite(suite: str = "all", seed: int = 1) -> list[Check]:
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; options: all, {', '.join(SUITES)}")
    checks: list[Check] = []
    for name in names:
        checks.extend(SUITES[name](seed))
    return checks


def suite_to_json(checks: list[Check], config: dict | None = None) -> str:
    doc = {
        "config": dict(sorted((config or {}).items())),
        "checks": [asdict(c) for c in checks],
        "passed": all(c.passed for c in checks),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
