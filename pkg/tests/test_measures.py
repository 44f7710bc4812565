import numpy as np
import pytest

from detwitness import measures, states
from detwitness.linalg import partial_transpose
from detwitness.measures import bound_report, concurrence, g_concurrence_pure, negativity, pi_d, pi2
from detwitness.states import bell_diagonal, bell_state, random_density, werner

SY = np.array([[0, -1j], [1j, 0]])


def wootters_eig_concurrence(m):
    """Textbook route: square roots of the eigenvalues of rho (sy sy) rho* (sy sy)."""
    yy = np.kron(SY, SY)
    ev = np.linalg.eigvals(m @ yy @ m.conj() @ yy)
    mu = np.sort(np.sqrt(np.abs(ev.real)))[::-1]
    return max(0.0, mu[0] - mu[1] - mu[2] - mu[3])


def entangled_samples(rng, n):
    out = []
    while len(out) < n:
        rho = random_density(4, 1 + len(out) % 4, rng)
        if measures.pt_det(rho) < -1e-9:
            out.append(rho)
    return out


def test_negativity_examples(rng):
    a = random_density(2, rng=rng, dims=(2,)).matrix
    assert negativity(states.product_state(a, a)) == 0
    assert negativity(bell_state()) == pytest.approx(1, abs=1e-12)
    for p in np.linspace(0, 1, 13):
        assert negativity(werner(p)) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-12)


def test_negativity_2xd_counts_all_negative_eigenvalues(rng):
    rho = random_density(6, 2, rng, (2, 3))
    lam = np.linalg.eigvalsh(partial_transpose(rho.matrix, (2, 3)))
    assert negativity(rho) == pytest.approx(np.abs(lam).sum() - 1, abs=1e-12)


def test_concurrence_examples():
    assert concurrence(bell_state()) == pytest.approx(1, abs=1e-12)
    for p in np.linspace(0, 1, 13):
        assert concurrence(werner(p)) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-12)
    with pytest.raises(ValueError):
        concurrence(states.maximally_mixed((3, 3)))


def test_concurrence_matches_textbook_route(rng):
    for i in range(500):
        rho = random_density(4, 2 + i % 3, rng)
        assert concurrence(rho) == pytest.approx(wootters_eig_concurrence(rho.matrix), abs=1e-7)


def test_concurrence_bell_diagonal_closed_form(rng):
    for _ in range(200):
        p = rng.dirichlet(np.ones(4))
        assert concurrence(bell_diagonal(*p)) == pytest.approx(max(0, 2 * p.max() - 1), abs=1e-12)


def test_pure_state_concurrence_is_twice_abs_det(rng):
    for _ in range(200):
        psi = states.random_pure((2, 2), rng)
        c = 2 * abs(np.linalg.det(psi.coefficient_matrix()))
        rho = psi.density()
        assert concurrence(rho) == pytest.approx(c, abs=1e-12)
        assert pi2(rho) == pytest.approx(c, abs=1e-10)


def test_pi_d_examples(rng):
    for _ in range(50):
        assert pi2(states.random_product_mixture(10, (2, 2), rng)) == 0
    assert pi2(bell_state()) == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        pi_d(random_density(6, rng=rng, dims=(2, 3)))
    with pytest.raises(ValueError):
        pi_d(bell_state(), 3)


def test_pi2_bell_diagonal_product_formula(rng):
    hits = 0
    for _ in range(500):
        p = rng.dirichlet(np.ones(4) * 0.5)
        rho = bell_diagonal(*p)
        if p.max() > 0.5 + 1e-6:
            hits += 1
            assert pi2(rho) == pytest.approx(np.prod(np.abs(1 - 2 * p) ** 0.25), abs=1e-10)
            assert pi2(rho) >= 2 * p.max() - 1 - 1e-12
        elif p.max() < 0.5 - 1e-6:
            assert pi2(rho) == 0
    assert hits > 50


def test_pi_d_clamps_numerical_noise():
    # werner(1/3) sits exactly on the boundary; round-off must not create entanglement
    assert pi2(werner(1 / 3)) == 0


def test_g_concurrence_examples(rng):
    prod = states.PureState(np.kron([1, 0], [0.6, 0.8]), (2, 2))
    assert g_concurrence_pure(prod) == pytest.approx(0, abs=1e-15)
    phi = states.PureState(states.BELL_VECTORS["phi+"], (2, 2))
    assert g_concurrence_pure(phi) == pytest.approx(1, abs=1e-15)
    for d in (2, 3, 4):
        psi = states.random_pure((d, d), rng)
        s = np.linalg.svd(psi.coefficient_matrix(), compute_uv=False)
        assert g_concurrence_pure(psi) == pytest.approx(d * np.prod(s**2) ** (1 / d), abs=1e-12)
    with pytest.raises(ValueError):
        g_concurrence_pure(states.random_pure((2, 3), rng))


def test_g_concurrence_equals_pi2_for_qubits(rng):
    for _ in range(200):
        psi = states.random_pure((2, 2), rng)
        assert g_concurrence_pure(psi) == pytest.approx(pi_d(psi.density()), abs=1e-10)


def test_pi_d_of_pure_qutrit_state_is_d_abs_det(rng):
    # The PT spectrum of a pure state is {s_i^2} u {+-s_i s_j}, so |det| = prod s_i^(2d)
    # and pi_d = d |det A|; this meets G_d = d |det A|^(2/d) only at d = 2.
    for _ in range(50):
        psi = states.random_pure((3, 3), rng)
        a = abs(np.linalg.det(psi.coefficient_matrix()))
        assert pi_d(psi.density()) == pytest.approx(3 * a, abs=1e-10)


def test_bound_report_bell():
    r = bound_report(bell_state())
    for v in (r.negativity, r.concurrence, r.pi2, r.lower_bound_eq6, r.upper_bound_fig1):
        assert v == pytest.approx(1, abs=1e-12)


def test_bound_report_separable(rng):
    r = bound_report(states.random_product_mixture(20, (2, 2), rng))
    assert r.negativity == r.concurrence == r.pi2 == 0
    assert r.lower_bound_eq6 == 0 and r.upper_bound_fig1 == 0.5


def test_bound_chain_10k(rng):
    worst = min(min(bound_report(rho).chain_slacks().values())
                for rho in (random_density(4, 1 + i % 4, rng) for i in range(10_000)))
    assert worst >= -1e-10


def test_pi2_decomposition_identity(rng):
    for rho in entangled_samples(rng, 1000):
        lam = np.linalg.eigvalsh(partial_transpose(rho.matrix))
        assert np.sum(lam < 0) == 1
        expect = 2 * (0.5 * negativity(rho) * np.prod(lam[1:])) ** 0.25
        assert pi2(rho) == pytest.approx(expect, abs=1e-10)


def test_local_unitary_invariance(rng):
    for rho in entangled_samples(rng, 100):
        u = np.kron(states.random_unitary(2, rng), states.random_unitary(2, rng))
        rotated = states.DensityMatrix(u @ rho.matrix @ u.conj().T)
        assert pi2(rotated) == pytest.approx(pi2(rho), abs=1e-10)


def test_filter_covariance_of_pi2_and_concurrence(rng):
    for rho in entangled_samples(rng, 200):
        a, b = states.ginibre(2, 2, rng), states.ginibre(2, 2, rng)
        out, _ = states.apply_filter(rho, a, b)
        factor = measures.filter_factor(rho, a, b)
        assert pi2(out) == pytest.approx(factor * pi2(rho), rel=1e-8, abs=1e-10)
        assert concurrence(out) == pytest.approx(factor * concurrence(rho), rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("d", [2, 3])
def test_pure_local_operations_do_not_increase_pi_d(rng, d):
    checked = 0
    for i in range(300):
        rho = random_density(d * d, 1 + i % 3, rng, (d, d))
        # inside the clamp band pi_d reads 0 while a rescaled outcome need not
        if abs(measures.pt_det(rho)) <= measures.DET_CLAMP:
            continue
        checked += 1
        outcomes = states.apply_instrument(rho, states.random_two_outcome_instrument(d, rng))
        assert sum(p * pi_d(r) for p, r in outcomes) <= pi_d(rho) + 1e-10
    assert checked > 100


def clifford_group():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    s = np.diag([1, 1j])

    def key(u):
        k = np.flatnonzero(np.abs(u.reshape(-1)) > 1e-9)[0]
        v = u / (u.reshape(-1)[k] / abs(u.reshape(-1)[k]))
        return tuple(np.round(v.reshape(-1), 8))

    group = {key(np.eye(2)): np.eye(2, dtype=complex)}
    frontier = [np.eye(2, dtype=complex)]
    while frontier:
        nxt = []
        for g in frontier:
            for gen in (h, s):
                u = gen @ g
                if key(u) not in group:
                    group[key(u)] = u
                    nxt.append(u)
        frontier = nxt
    return list(group.values())


def test_werner_twirl_matches_clifford_average(rng):
    cliffords = clifford_group()
    assert len(cliffords) == 24
    for _ in range(10):
        rho = random_density(4, rng=rng)
        avg = sum(np.kron(u, u) @ rho.matrix @ np.kron(u, u).conj().T for u in cliffords) / 24
        np.testing.assert_allclose(measures.werner_twirl(rho).matrix, avg, atol=1e-12)


def test_twirl_increases_pi2_on_hand_picked_state():
    rho = bell_diagonal(0.7, 0.3, 0, 0)
    assert pi2(rho) == pytest.approx((0.4 * 0.4) ** 0.25, abs=1e-12)
    twirled = measures.werner_twirl(rho)
    assert pi2(twirled) == pytest.approx((0.4 * 0.8**3) ** 0.25, abs=1e-12)
    assert pi2(twirled) > pi2(rho)


def test_find_twirl_increase(rng):
    inc = measures.find_twirl_increase(rng)
    assert inc.pi2_after > inc.pi2_before > 0
    assert pi2(bell_diagonal(*inc.probabilities)) == pytest.approx(inc.pi2_before)
