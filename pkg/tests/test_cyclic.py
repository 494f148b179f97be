import random

import pytest

from pgtensors import cyclic, gf
from pgtensors.cyclic import (CyclicTensor, IsotopyTriple, LinearizedMap,
                              bel_rank, bilinear_eval, contraction,
                              contraction_space, contraction_space_key,
                              dickson_matrix, field_tensor, is_nonsingular_tensor,
                              isotopy_apply, s3_apply, s3_images, sigma_map,
                              sigma_power, tensor_from_pure_sum)


def t9():
    return gf.field_create(3, 1, 2)


def t27():
    return gf.field_create(3, 1, 3)


def random_tensor(t, rng):
    return CyclicTensor(t, tuple(tuple(rng.randrange(t.order) for _ in range(t.n))
                                 for _ in range(t.n)))


# --- Dickson matrices ----------------------------------------------------------

def test_dickson_identity():
    f = LinearizedMap.identity(t9())
    d, r = dickson_matrix(f)
    assert d == ((1, 0), (0, 1)) and r == 2


def test_dickson_of_xq_minus_x():
    t = t9()
    f = LinearizedMap(t, (2, 1))  # f(x) = -x + x^q
    d, r = dickson_matrix(f)
    assert d == ((2, 1), (1, 2)) and r == 1
    # kernel oracle: evaluate f on the whole field
    assert sorted(f.kernel()) == [0, 1, 2]


def test_dickson_determinant_in_base_field():
    t = t27()
    rng = random.Random(1)
    for _ in range(25):
        f = LinearizedMap(t, tuple(rng.randrange(27) for _ in range(3)))
        det = cyclic.mat_det(t, f.dickson())
        assert t.frob_i(det, 1) == det


@pytest.mark.parametrize("make", [t9, t27])
def test_rank_plus_kernel_dimension(make):
    t = make()
    n = t.n
    for enc in range(t.order ** n):
        coeffs = []
        v = enc
        for _ in range(n):
            v, r = divmod(v, t.order)
            coeffs.append(r)
        f = LinearizedMap(t, tuple(coeffs))
        kdim = {1: 0, 3: 1, 9: 2, 27: 3}[len(f.kernel())]
        assert f.rank() + kdim == n
        assert f.is_invertible("det") == f.is_invertible("kernel")


# --- pure tensors and the bilinear product --------------------------------------

def test_pure_sum_all_ones():
    t = t9()
    M = tensor_from_pure_sum(t, [(1, 1, 1)])
    assert M.entries == ((1, 1), (1, 1))


def test_single_pure_term_has_rank_one():
    t = t9()
    rng = random.Random(2)
    for _ in range(20):
        a, b, g = (rng.randrange(1, 9) for _ in range(3))
        assert tensor_from_pure_sum(t, [(a, b, g)]).rank() == 1


def test_field_tensor_is_multiplication():
    t = t9()
    E = field_tensor(t)
    assert all(bilinear_eval(E, x, y) == t.mul_i(x, y)
               for x in range(9) for y in range(9))


def test_bilinear_all_ones_and_zero():
    t = t9()
    ones = CyclicTensor(t, ((1, 1), (1, 1)))
    assert bilinear_eval(ones, 1, 1) == 1  # four unit terms, char 3
    M = random_tensor(t, random.Random(3))
    assert all(bilinear_eval(M, 0, y) == 0 for y in range(9))


def test_bilinearity_additive():
    t = t9()
    rng = random.Random(4)
    M = random_tensor(t, rng)
    for _ in range(15):
        x1, x2, y = (rng.randrange(9) for _ in range(3))
        lhs = bilinear_eval(M, t.add_i(x1, x2), y)
        rhs = t.add_i(bilinear_eval(M, x1, y), bilinear_eval(M, x2, y))
        assert lhs == rhs


# --- sigma ----------------------------------------------------------------------

def test_sigma_rule_n2():
    t = t9()
    rng = random.Random(5)
    for _ in range(10):
        a, b, c, d = (rng.randrange(9) for _ in range(4))
        M = CyclicTensor(t, ((a, b), (c, d)))
        F = t.frob_i
        assert sigma_map(M).entries == ((F(d, 1), F(c, 1)), (F(b, 1), F(a, 1)))


def test_sigma_fixes_exactly_the_dickson_matrices():
    t = t9()
    fixed = 0
    for enc in range(9 ** 4):
        e = [enc // 9 ** k % 9 for k in range(4)]
        M = CyclicTensor(t, ((e[0], e[1]), (e[2], e[3])))
        if sigma_map(M).entries == M.entries:
            fixed += 1
            # fixed matrices have the map-matrix shape
            assert e[3] == t.frob_i(e[0], 1) and e[1] == t.frob_i(e[2], 1)
    assert fixed == 9 ** 2  # one matrix per linearized map


@pytest.mark.parametrize("make", [t9, t27])
def test_sigma_order_n(make):
    t = make()
    rng = random.Random(6)
    for _ in range(10):
        M = random_tensor(t, rng)
        assert sigma_power(M, t.n).entries == M.entries


# --- contraction ----------------------------------------------------------------

def test_contraction_of_field_tensor():
    t = t9()
    E = field_tensor(t)
    for z in range(9):
        h = contraction(E, z)
        assert h.coeffs == (z, 0)  # multiplication by z


def test_contraction_zero_gives_zero_map():
    t = t9()
    M = random_tensor(t, random.Random(7))
    assert contraction(M, 0).coeffs == (0, 0)


def test_contractions_are_sigma_fixed():
    t = t27()
    rng = random.Random(8)
    for _ in range(10):
        M = random_tensor(t, rng)
        for z in (1, 5, 20):
            D = contraction(M, z).dickson()
            assert sigma_map(CyclicTensor(t, D)).entries == D


def test_contraction_space_generic_dimension():
    t = t9()
    rng = random.Random(9)
    full = 0
    for _ in range(30):
        M = random_tensor(t, rng)
        dim = len(contraction_space(M))
        assert dim <= t.n
        full += dim == t.n
    assert full >= 25  # generic tensors achieve the maximum


def test_contraction_matches_paper_h_z_shape():
    # for n=2: h_z(x) = (alpha z + delta^q z^q) x + (gamma z + beta^q z^q) x^q
    t = t9()
    rng = random.Random(10)
    F = t.frob_i
    for _ in range(10):
        a, b, c, d = (rng.randrange(9) for _ in range(4))
        M = CyclicTensor(t, ((a, b), (c, d)))
        for z in range(1, 9):
            h = contraction(M, z)
            zq = F(z, 1)
            h0 = t.add_i(t.mul_i(a, z), t.mul_i(F(d, 1), zq))
            h1 = t.add_i(t.mul_i(c, z), t.mul_i(F(b, 1), zq))
            assert h.coeffs == (h0, h1)


# --- symmetric-group action ------------------------------------------------------

def test_tau_relations():
    t = t9()
    rng = random.Random(11)
    for _ in range(30):
        M = random_tensor(t, rng)
        assert s3_apply("t1 t1", M).entries == M.entries
        assert s3_apply("t2 t2 t2", M).entries == M.entries
        assert s3_apply("t1 t2 t1 t2", M).entries == M.entries


def test_six_distinct_images_generically():
    t = t9()
    rng = random.Random(12)
    sizes = []
    for _ in range(10):
        M = random_tensor(t, rng)
        imgs = {v.entries for v in s3_images(M).values()}
        assert len(imgs) <= 6
        sizes.append(len(imgs))
    assert max(sizes) == 6  # tensors without accidental symmetry exist


def test_s3_preserves_nonsingularity():
    t = t9()
    rng = random.Random(13)
    checked = 0
    while checked < 8:
        M = random_tensor(t, rng)
        base = is_nonsingular_tensor(M)
        for img in s3_images(M).values():
            assert is_nonsingular_tensor(img) == base
        checked += base  # make sure several nonsingular cases occur
    assert checked == 8


# --- isotopy ----------------------------------------------------------------------

def _random_invertible(t, rng):
    while True:
        f = LinearizedMap(t, tuple(rng.randrange(t.order) for _ in range(t.n)))
        if any(f.coeffs) and f.is_invertible():
            return f


def test_identity_triple_fixes_tensor():
    t = t9()
    ident = LinearizedMap.identity(t)
    M = random_tensor(t, random.Random(14))
    assert isotopy_apply(IsotopyTriple(ident, ident, ident), M).entries == M.entries


def test_fg_action_preserves_matrix_rank():
    t = t9()
    rng = random.Random(15)
    ident = LinearizedMap.identity(t)
    for _ in range(20):
        M = random_tensor(t, rng)
        triple = IsotopyTriple(_random_invertible(t, rng), _random_invertible(t, rng), ident)
        assert isotopy_apply(triple, M).rank() == M.rank()


def test_h_action_preserves_contraction_space():
    t = t9()
    rng = random.Random(16)
    ident = LinearizedMap.identity(t)
    for _ in range(20):
        M = random_tensor(t, rng)
        triple = IsotopyTriple(ident, ident, _random_invertible(t, rng))
        assert contraction_space_key(isotopy_apply(triple, M)) == contraction_space_key(M)


def test_isotopy_preserves_nonsingularity():
    t = t9()
    rng = random.Random(17)
    for _ in range(15):
        M = random_tensor(t, rng)
        triple = IsotopyTriple(_random_invertible(t, rng), _random_invertible(t, rng),
                               _random_invertible(t, rng))
        assert is_nonsingular_tensor(isotopy_apply(triple, M)) == is_nonsingular_tensor(M)


def test_singular_component_rejected():
    t = t9()
    ident = LinearizedMap.identity(t)
    bad = LinearizedMap(t, (2, 1))  # x^q - x, kernel F_3
    with pytest.raises(cyclic.SingularIsotopyComponent):
        IsotopyTriple(ident, ident, bad)


# --- nonsingularity ----------------------------------------------------------------

def test_nonsingular_examples():
    t = t9()
    assert is_nonsingular_tensor(field_tensor(t))
    assert not is_nonsingular_tensor(CyclicTensor(t, ((1, 0), (0, 1))))
    assert not is_nonsingular_tensor(CyclicTensor(t, ((0, 0), (0, 0))))


def test_nonsingular_det_vs_kernel_routes():
    t = t9()
    rng = random.Random(18)
    for _ in range(60):
        M = random_tensor(t, rng)
        assert is_nonsingular_tensor(M, "det") == is_nonsingular_tensor(M, "kernel")


# --- BEL rank -----------------------------------------------------------------------

def test_bel_rank_of_field_tensor():
    assert bel_rank(field_tensor(t9())) == 1
    assert bel_rank(field_tensor(t27())) == 1


def test_bel_rank_one_for_sample_of_2x2_nonsingular():
    t = t9()
    rng = random.Random(19)
    found = 0
    while found < 10:
        M = random_tensor(t, rng)
        if is_nonsingular_tensor(M):
            assert bel_rank(M) == 1
            found += 1


def test_bel_rank_zero_tensor_rejected():
    t = t9()
    with pytest.raises(ValueError):
        bel_rank(CyclicTensor(t, ((0, 0), (0, 0))))


def test_bel_rank_report_flags_degenerate_span():
    t = t9()
    rep = cyclic.bel_rank_report(field_tensor(t))
    assert rep["bel_rank"] == 1
    # sigma-images of the field tensor are independent
    assert rep["sigma_images_independent"]
    D = CyclicTensor(t, LinearizedMap(t, (1, 1)).dickson())
    rep2 = cyclic.bel_rank_report(D)
    assert not rep2["sigma_images_independent"]  # sigma fixes map matrices


# --- the analytic bound ---------------------------------------------------------------

def test_qbound_n5_vs_direct_evaluation():
    # the displayed inequality already holds well below the quoted q > 11;
    # both facts are reported side by side and not reconciled
    q0 = cyclic.belrank_qbound(5)
    assert 2 < q0 < 11
    assert cyclic.belrank_inequality_holds(5, 11)
    assert cyclic.belrank_inequality_holds(5, q0 + 0.01)
    assert not cyclic.belrank_inequality_holds(5, q0 - 0.01)


def test_qbound_n3_finite():
    q0 = cyclic.belrank_qbound(3)
    assert q0 < 50
    assert cyclic.belrank_inequality_holds(3, q0 + 1)


# --- tiny tensor rank ------------------------------------------------------------------

def test_tensor_rank_bounds_matrix_rank_tiny():
    t = gf.field_create(2, 1, 2)  # F_4, the smallest cyclic model
    count = 0
    for enc in range(1, 4 ** 4):
        e = [enc // 4 ** k % 4 for k in range(4)]
        M = CyclicTensor(t, ((e[0], e[1]), (e[2], e[3])))
        trk = cyclic.tensor_rank_upper(M, 4)
        assert trk is not None
        assert trk >= M.rank()
        count += 1
    assert count == 255


# --- rank-one coordinate shape -----------------------------------------------------------

@pytest.mark.parametrize("make", [t9, t27])
def test_rank_one_maps_have_conjugate_coordinate_shape(make):
    t = make()
    n = t.n
    for enc in range(1, t.order ** n):
        coeffs = []
        v = enc
        for _ in range(n):
            v, r = divmod(v, t.order)
            coeffs.append(r)
        f = LinearizedMap(t, tuple(coeffs))
        if f.rank() != 1:
            continue
        shaped = False
        for u in range(1, t.order):
            inv = t.inv_i(u)
            v0 = t.mul_i(inv, f.coeffs[0])
            if all(f.coeffs[i] == t.mul_i(u, t.frob_i(v0, i)) for i in range(n)):
                shaped = True
                break
        assert shaped


# --- serialization ------------------------------------------------------------------------

def test_tensor_json_roundtrip():
    t = t9()
    M = random_tensor(t, random.Random(20))
    M2 = CyclicTensor.from_json(M.to_json(), t)
    assert M2.entries == M.entries
    M3 = CyclicTensor.from_json(M.to_json())  # tower rebuilt from the payload
    assert M3.entries == M.entries
