"""Hamiltonian assembly, diagonalization, and propagation cross-checks."""

import numpy as np
import pytest

from toricsim import ed, lattice, pauli, stabilizer


def one_hot(dim, i):
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1.0
    return v


def column_oracle(terms, basis_index, dim):
    """H|b> assembled term by term from single-basis Pauli application."""
    col = np.zeros(dim, dtype=np.complex128)
    for coef, op in terms:
        tgt, amp = pauli.apply_to_basis(op, basis_index)
        col[tgt] += coef * amp
    return col


def test_term_list_uniform_z(geo23):
    spec = ed.HamiltonianSpec(geo23, U=1.2, J=0.8, h=0.3)
    terms = spec.term_list()
    n_sites = geo23.L1 * geo23.L2
    assert len(terms) == 2 * n_sites + geo23.n_spins
    plaq = terms[:n_sites]
    star = terms[n_sites : 2 * n_sites]
    field = terms[2 * n_sites :]
    assert all(c == -1.2 and op.x_mask == 0 for c, op in plaq)
    assert all(c == -0.8 and op.z_mask == 0 for c, op in star)
    assert all(c == -0.3 and op.x_mask == 0 for c, op in field)
    assert sorted(op.support()[0] for _, op in field) == list(range(geo23.n_spins))


def test_term_list_split_field(geo23):
    spec = ed.HamiltonianSpec(geo23, h=0.4, kappa=0.5, field_mode="split_HV")
    terms = spec.term_list()
    n_sites = geo23.L1 * geo23.L2
    field = terms[2 * n_sites :]
    z_terms = [t for t in field if t[1].x_mask == 0]
    x_terms = [t for t in field if t[1].z_mask == 0]
    assert {t[1].support()[0] for t in z_terms} == set(geo23.horizontal_spins)
    assert {t[1].support()[0] for t in x_terms} == set(geo23.vertical_spins)
    assert all(abs(c + 0.4) < 1e-15 for c, _ in z_terms)
    assert all(abs(c + 0.2) < 1e-15 for c, _ in x_terms)


def test_spec_validation(geo22):
    with pytest.raises(ValueError):
        ed.HamiltonianSpec(geo22, field_mode="diagonal")
    with pytest.raises(ValueError):
        ed.HamiltonianSpec(geo22, h=float("nan"))
    with pytest.raises(ValueError):
        ed.HamiltonianSpec(geo22, U=float("inf"))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"h": 0.3},
        {"h": 0.25, "kappa": 0.6, "field_mode": "split_HV"},
    ],
)
def test_operator_is_hermitian(geo22, kwargs):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22, **kwargs))
    rng = np.random.default_rng(71)
    for _ in range(5):
        u = rng.standard_normal(op.dimension) + 1j * rng.standard_normal(op.dimension)
        v = rng.standard_normal(op.dimension) + 1j * rng.standard_normal(op.dimension)
        left = np.vdot(u, op.matvec(v))
        right = np.vdot(v, op.matvec(u)).conjugate()
        assert abs(left - right) < 1e-10 * max(1.0, abs(left))


def test_matvec_matches_per_term_application(geo22):
    spec = ed.HamiltonianSpec(geo22, U=1.1, J=0.9, h=0.35)
    op = ed.build_hamiltonian(spec)
    terms = spec.term_list()
    rng = np.random.default_rng(73)
    for b in rng.integers(0, op.dimension, size=20):
        want = column_oracle(terms, int(b), op.dimension)
        got = op.matvec(one_hot(op.dimension, int(b)))
        assert np.allclose(got, want, atol=1e-14)


def test_dense_matches_matvec_columns(geo22):
    spec = ed.HamiltonianSpec(geo22, h=0.2, kappa=0.3, field_mode="split_HV")
    op = ed.build_hamiltonian(spec)
    mat = op.dense()
    assert np.allclose(mat, mat.conj().T, atol=1e-14)
    rng = np.random.default_rng(79)
    for b in rng.integers(0, op.dimension, size=12):
        assert np.allclose(mat[:, int(b)], op.matvec(one_hot(op.dimension, int(b))))


@pytest.mark.parametrize("U,J", [(1.0, 1.0), (1.5, 1.0), (1.0, 0.6)])
def test_ground_energy_degeneracy_and_gap(geo22, U, J):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22, U=U, J=J))
    w, vecs = ed.full_spectrum(op)
    e0 = -geo22.L1 * geo22.L2 * (U + J)
    assert np.all(np.abs(w[:4] - e0) < 1e-10)
    # stars and plaquettes flip in pairs, so the gap is 4*min(U, J)
    assert abs((w[4] - w[0]) - 4 * min(U, J)) < 1e-10
    # eigenvectors diagonalize: residual of the first columns
    for i in range(5):
        r = op.matvec(vecs[:, i]) - w[i] * vecs[:, i]
        assert np.linalg.norm(r) < 1e-10


def test_lanczos_resolves_ground_degeneracy(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22))
    tol = 1e-9
    pairs = ed.lanczos_extremal(op, k=4, tol=tol)
    assert len(pairs) == 4
    vecs = [v for _, v in pairs]
    for lam, v in pairs:
        assert abs(lam - (-8.0)) < 1e-8
        assert np.linalg.norm(op.matvec(v) - lam * v) <= tol
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    assert np.allclose(gram, np.eye(4), atol=1e-9)


def test_lanczos_deterministic(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22, h=0.3))
    a = ed.lanczos_extremal(op, k=1)
    b = ed.lanczos_extremal(op, k=1)
    assert a[0][0] == b[0][0]
    assert np.array_equal(a[0][1], b[0][1])


def test_lanczos_on_diagonal_operator(geo22):
    n = geo22.n_spins
    terms = [(-0.5, pauli.single(n, "Z", j)) for j in range(n)]
    op = ed.HamiltonianOperator(terms, stabilizer.FullBasis(n))
    (lam, vec), = ed.lanczos_extremal(op, k=1, tol=1e-10)
    # all spins up minimizes -0.5 * sum sigma^z
    assert abs(lam - (-0.5 * n)) < 1e-9
    assert abs(abs(vec[0]) - 1.0) < 1e-6


def test_lanczos_matches_full_spectrum(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22, h=0.3))
    w, _ = ed.full_spectrum(op)
    pairs = ed.lanczos_extremal(op, k=2, tol=1e-10)
    assert abs(pairs[0][0] - w[0]) < 1e-8
    assert abs(pairs[1][0] - w[1]) < 1e-8


def test_lanczos_nonconvergence_raises(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22, h=0.37))
    with pytest.raises(RuntimeError, match="did not converge"):
        ed.lanczos_extremal(op, k=1, tol=1e-14, max_iter=2)


def test_full_spectrum_cap(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22))
    with pytest.raises(ValueError, match="cap"):
        ed.full_spectrum(op, cap=100)
    w1, _ = ed.full_spectrum(op)
    w1[0] = 123.0
    w2, _ = ed.full_spectrum(op)
    assert w2[0] != 123.0


def test_identity_operator_spectrum():
    op = ed.HamiltonianOperator([(2.5, pauli.identity(4))], stabilizer.FullBasis(4))
    w, _ = ed.full_spectrum(op)
    assert np.allclose(w, 2.5)


def test_operator_rejects_bad_terms(geo22):
    n = geo22.n_spins
    basis = stabilizer.FullBasis(n)
    with pytest.raises(ValueError, match="non-Hermitian"):
        ed.HamiltonianOperator([(1.0, pauli.PauliOperator(n, 1, 1, 0))], basis)
    with pytest.raises(ValueError):
        ed.HamiltonianOperator([(1.0, pauli.identity(4))], basis)


@pytest.mark.parametrize("l1,l2,dim", [(2, 2, 32), (2, 3, 128), (3, 3, 1024)])
def test_sector_dimension(l1, l2, dim):
    geo = lattice.build_lattice(l1, l2)
    basis = ed.build_sector(geo)
    assert basis.dimension == dim
    assert basis.dimension == 1 << (geo.n_spins - (l1 * l2 - 1))


def test_sector_membership_brute_force(geo23):
    basis = ed.build_sector(geo23)
    plaq_masks = [sum(1 << s for s in sup) for sup in geo23.plaquette_supports]
    members = [
        idx
        for idx in range(1 << geo23.n_spins)
        if all((idx & m).bit_count() % 2 == 0 for m in plaq_masks)
    ]
    assert list(basis.kept_indices) == members


def test_sector_spot_checks(geo33):
    basis = ed.build_sector(geo33)
    plaq_masks = [sum(1 << s for s in sup) for sup in geo33.plaquette_supports]
    rng = np.random.default_rng(83)
    for idx in rng.choice(basis.kept_indices, size=50, replace=False):
        assert all((int(idx) & m).bit_count() % 2 == 0 for m in plaq_masks)
    assert 1 not in set(basis.kept_indices[:64].tolist())
    with pytest.raises(ValueError):
        ed.build_sector(geo33, which="something_else")


def test_sector_positions_and_project(geo22):
    basis = ed.build_sector(geo22)
    pos = basis.positions(basis.kept_indices[[3, 7]])
    assert list(pos) == [3, 7]
    with pytest.raises(ValueError):
        basis.positions(np.array([1], dtype=np.int64))

    full = stabilizer.ground_state(geo22)
    sec = basis.project(full)
    assert abs(np.linalg.norm(sec.amplitudes) - 1.0) < 1e-12
    back = basis.expand(sec)
    assert np.allclose(back.amplitudes, full.amplitudes, atol=1e-14)

    # a single spin flip violates two plaquettes and has no sector weight
    flipped = np.zeros(1 << geo22.n_spins, dtype=np.complex128)
    flipped[1] = 1.0
    bad = stabilizer.StateVector(flipped, stabilizer.FullBasis(geo22.n_spins))
    with pytest.raises(ValueError, match="outside the sector"):
        basis.project(bad)
    with pytest.raises(ValueError):
        basis.expand(full)


def test_sector_hamiltonian_requires_commuting_terms(geo22):
    basis = ed.build_sector(geo22)
    spec = ed.HamiltonianSpec(geo22, h=0.2, kappa=0.4, field_mode="split_HV")
    with pytest.raises(ValueError, match="sector"):
        ed.build_hamiltonian(spec, basis)
    ed.build_hamiltonian(ed.HamiltonianSpec(geo22, h=0.2), basis)


def test_sector_spectrum_contains_ground_state(geo22):
    spec = ed.HamiltonianSpec(geo22, h=0.4)
    full_op = ed.build_hamiltonian(spec)
    sec_op = ed.build_hamiltonian(spec, ed.build_sector(geo22))
    wf, _ = ed.full_spectrum(full_op)
    ws, _ = ed.full_spectrum(sec_op)
    assert abs(wf[0] - ws[0]) < 1e-10


def test_sector_ground_energy_matches_full_space_lanczos(geo33):
    # the sector computation at 1024 states reproduces the 262144-state result
    spec = ed.HamiltonianSpec(geo33, h=0.3)
    ws, _ = ed.full_spectrum(ed.build_hamiltonian(spec, ed.build_sector(geo33)))
    pairs = ed.lanczos_extremal(ed.build_hamiltonian(spec), k=1, tol=1e-9)
    assert abs(ws[0] - pairs[0][0]) < 1e-8


def test_evolve_t0_is_identity(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22, h=0.3))
    state = stabilizer.ground_state(geo22)
    for method in ("spectrum", "krylov"):
        out = ed.evolve(state, op, 0.0, method=method)
        assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-14)
    out.amplitudes[0] += 1.0
    assert state.amplitudes[0] != out.amplitudes[0]


def test_evolve_eigenstate_accumulates_pure_phase(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22))
    state = stabilizer.ground_state(geo22)
    t = 3.7
    for method in ("spectrum", "krylov"):
        out = ed.evolve(state, op, t, method=method)
        expected = np.exp(-1j * (-8.0) * t) * state.amplitudes
        assert np.allclose(out.amplitudes, expected, atol=1e-8)


def test_krylov_matches_spectrum(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22, h=0.3))
    state = stabilizer.ground_state(geo22)
    e_ref = op.expectation(state.amplitudes)
    for t in (0.7, 3.3, 10.0, -2.1):
        a = ed.evolve(state, op, t, method="spectrum")
        b = ed.evolve(state, op, t, method="krylov", tol=1e-10)
        overlap = abs(np.vdot(a.amplitudes, b.amplitudes))
        assert 1.0 - overlap < 1e-8
        assert abs(np.linalg.norm(b.amplitudes) - 1.0) < 1e-10
        assert abs(op.expectation(b.amplitudes) - e_ref) < 1e-8


def test_sector_evolution_matches_full(geo22):
    spec = ed.HamiltonianSpec(geo22, h=0.2)
    basis = ed.build_sector(geo22)
    full_op = ed.build_hamiltonian(spec)
    sec_op = ed.build_hamiltonian(spec, basis)
    full0 = stabilizer.ground_state(geo22)
    sec0 = basis.project(full0)
    t = 1.7
    full_t = ed.evolve(full0, full_op, t)
    sec_t = ed.evolve(sec0, sec_op, t)
    assert np.max(np.abs(full_t.amplitudes[basis.kept_indices] - sec_t.amplitudes)) < 1e-9


def test_winding_loops_commute_with_bare_hamiltonian(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22))
    rng = np.random.default_rng(89)
    v = rng.standard_normal(op.dimension) + 1j * rng.standard_normal(op.dimension)
    v /= np.linalg.norm(v)
    state = stabilizer.StateVector(v, stabilizer.FullBasis(geo22.n_spins))
    for d in (1, 2):
        w = stabilizer.loop_operator(geo22, d)
        hw = op.matvec(stabilizer.apply_pauli(w, state))
        wh_state = stabilizer.StateVector(
            op.matvec(v) / np.linalg.norm(op.matvec(v)), state.basis
        )
        wh = stabilizer.apply_pauli(w, wh_state) * np.linalg.norm(op.matvec(v))
        assert np.allclose(hw, wh, atol=1e-10)


def test_evolve_errors(geo22):
    op = ed.build_hamiltonian(ed.HamiltonianSpec(geo22))
    state = stabilizer.ground_state(geo22)
    with pytest.raises(ValueError, match="method"):
        ed.evolve(state, op, 1.0, method="cayley")
    small = ed.build_hamiltonian(ed.HamiltonianSpec(geo22), ed.build_sector(geo22))
    with pytest.raises(ValueError):
        ed.evolve(state, small, 1.0)


def test_dump_spectrum_format(tmp_path):
    path = tmp_path / "spec.csv"
    ed.dump_spectrum(path, np.array([-8.0, -4.0, 0.125]))
    lines = path.read_text().splitlines()
    assert lines[0] == "index,eigenvalue"
    assert lines[1] == "0,-8"
    assert lines[3] == "2,0.125"
    assert len(lines) == 4


def test_checkpoint_aliases(tmp_path, geo22):
    state = stabilizer.ground_state(geo22, (1, 0))
    path = tmp_path / "chk.npz"
    ed.save_checkpoint(path, state)
    back = ed.load_checkpoint(path)
    assert np.array_equal(back.amplitudes, state.amplitudes)
