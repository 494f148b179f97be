import random

import numpy as np
import pytest

from pgtensors import cyclic, geom, gf
from pgtensors.geom import (IN_SIGMA, DegenerateLine, Geometry, OrbitLabel,
                            ProjPoint4, SigmaLine, class_representative,
                            plane_distribution_identities)


@pytest.fixture(scope="module")
def g3():
    return Geometry(3)


@pytest.fixture(scope="module")
def g5():
    return Geometry(5)


# --- forms -----------------------------------------------------------------------

def test_forms_unit_point(g3):
    Q, H, D = g3.forms(g3.point((1, 0, 0, 0)))
    assert (Q.val, H.val, D.val) == (0, 1, 1)


def test_forms_vanish_on_subgeometry(g3):
    pts = g3.points()
    sig = g3.sigma_mask_arr(pts)
    _, _, Dv = g3.forms_arr(pts)
    assert np.all(Dv[sig] == 0)


def test_forms_i_point(g3):
    # (1, 0, 0, i): Q = i, H = 2, Delta = 0
    i = g3.tower.gen().val
    Q, H, D = g3.forms(g3.point((1, 0, 0, i)))
    assert (Q.val, H.val, D.val) == (i, 2, 0)


def test_forms_square_class_scaling_invariant(g3):
    rng = random.Random(0)
    pts = g3.points()
    for _ in range(40):
        P = pts[rng.randrange(len(pts))]
        lam = rng.randrange(1, 9)
        scaled = np.array([[g3.mul(lam, int(v)) for v in P]])
        _, _, D0 = g3.forms_arr(np.array([P]))
        _, _, D1 = g3.forms_arr(scaled)
        assert int(g3._SQ[D0[0]]) == int(g3._SQ[D1[0]])


# --- rho and the polarities ---------------------------------------------------------

def test_rho_fixes_map_point(g3):
    P = g3.point((1, 0, 0, 1))
    assert g3.rho(P).coords == P.coords


def test_rho_involution(g3):
    rng = random.Random(1)
    pts = g3.points()
    for _ in range(50):
        P = ProjPoint4(tuple(int(v) for v in pts[rng.randrange(len(pts))]))
        assert g3.rho(g3.rho(P)).coords == P.coords


def test_polarity_composition_is_rho(g3):
    rng = random.Random(2)
    pts = g3.points()
    for _ in range(100):
        P = ProjPoint4(tuple(int(v) for v in pts[rng.randrange(len(pts))]))
        comp = g3.perp_point(g3.perp(P, "hermitian"), "quadric")
        assert comp.coords == g3.rho(P).coords


def test_polarities_commute(g3):
    rng = random.Random(3)
    pts = g3.points()
    for _ in range(100):
        P = ProjPoint4(tuple(int(v) for v in pts[rng.randrange(len(pts))]))
        a = g3.perp_point(g3.perp(P, "hermitian"), "quadric")
        b = g3.perp_point(g3.perp(P, "quadric"), "hermitian")
        assert a.coords == b.coords


def test_hermitian_incidence_criterion(g3):
    # P lies on its own polar plane iff H(P) = 0
    pts = g3.points()
    _, Hv, _ = g3.forms_arr(pts)
    rng = random.Random(4)
    for _ in range(60):
        i = rng.randrange(len(pts))
        P = ProjPoint4(tuple(int(v) for v in pts[i]))
        assert g3.incident(g3.perp(P, "hermitian"), P) == (int(Hv[i]) == 0)


# --- subgeometry lines ----------------------------------------------------------------

def test_sigma_line_types_examples(g3):
    i = g3.tower.gen().val
    ext = SigmaLine(g3, (1, 0), (i, 0))
    assert g3.subline_type(ext) == "external"
    sec = SigmaLine(g3, (1, 0), (0, 1))
    assert g3.subline_type(sec) == "secant"
    gen = SigmaLine(g3, (1, i), (i, g3.mul(i, i)))
    assert g3.subline_type(gen) == "generator"


def test_degenerate_line_rejected(g3):
    with pytest.raises(DegenerateLine):
        SigmaLine(g3, (1, 0), (2, 0))  # F_q-proportional parameters
    with pytest.raises(DegenerateLine):
        SigmaLine(g3, (0, 0), (1, 0))


def test_sigma_line_through_membership_and_uniqueness(g3):
    pts = g3.points()
    sig = g3.sigma_mask_arr(pts)
    non_sigma = np.nonzero(~sig)[0]
    rng = random.Random(5)
    for _ in range(40):
        P = ProjPoint4(tuple(int(v) for v in pts[non_sigma[rng.randrange(len(non_sigma))]]))
        line = g3.sigma_line_through(P)
        assert isinstance(line, SigmaLine)
        assert g3.pack(P.coords) in line.extension_points()
    # a subgeometry point gets the marker
    assert g3.sigma_line_through(g3.point((1, 0, 0, 1))) is IN_SIGMA


def test_every_nonsigma_point_on_exactly_one_line(g3):
    from pgtensors.qh import sigma_lines
    lines = sigma_lines(g3)
    q = g3.q
    assert len(lines) == (q * q + 1) * (q * q + q + 1)
    covered = []
    sigma_packed = set()
    pts = g3.points()
    sig = g3.sigma_mask_arr(pts)
    sigma_packed = set(int(v) for v in g3.pack_arr(pts[sig]))
    for line in lines:
        covered.extend(p for p in line.extension_points() if p not in sigma_packed)
    # each non-subgeometry point appears exactly once over all lines
    assert len(covered) == len(set(covered)) == g3.point_count() - len(sigma_packed)


def test_line_type_census_q3(g3):
    from collections import Counter
    from pgtensors.qh import sigma_lines
    q = g3.q
    types = Counter(g3.subline_type(l) for l in sigma_lines(g3))
    assert types["external"] == q * q * (q - 1) ** 2 // 2
    assert types["generator"] == 2 * (q + 1)
    assert types["tangent"] == (q + 1) ** 2 * (q - 1)  # one tangent per (point, polar-conic point)
    assert sum(types.values()) == (q * q + 1) * (q * q + q + 1)


# --- classification --------------------------------------------------------------------

def test_classify_examples(g3):
    i = g3.tower.gen().val
    assert g3.classify_point(g3.point((1, 1, 1, 1))).tag == "Q0"
    assert g3.classify_point(g3.point((1, 0, 0, 1))).tag == "SigmaTilde"
    assert g3.classify_point(g3.point((1, 0, 0, 0))).tag == "QTilde"
    # (1,0,0,i) is rho-fixed (i = a^{q-1} for some a), hence in the subgeometry
    assert g3.classify_point(g3.point((1, 0, 0, i))).tag == "SigmaTilde"
    # 1+i has norm 2, so H = 0 and Delta = 1: a nonsingular Hermitian point
    one_plus_i = g3.tower.element([1, 1]).val
    assert g3.classify_point(g3.point((1, 0, 0, one_plus_i))).tag == "H1"


def test_classify_scaling_invariance(g3):
    rng = random.Random(6)
    pts = g3.points()
    for _ in range(60):
        P = tuple(int(v) for v in pts[rng.randrange(len(pts))])
        lam = rng.randrange(1, 9)
        scaled = tuple(g3.mul(lam, v) for v in P)
        assert g3.classify_point(g3.point(P)) == g3.classify_point(g3.point(scaled))


def test_classifier_vs_semifield_brute_force_sample(g3):
    # triple route on a sample: label, full z-scan via determinant, and the
    # kernel-enumeration route from the tensor module
    codes, _ = g3.classification()
    pts = g3.points()
    rng = random.Random(7)
    for _ in range(40):
        i = rng.randrange(len(pts))
        P = ProjPoint4(tuple(int(v) for v in pts[i]))
        label_ns = geom.LABELS[int(codes[i])] in geom.NONSINGULAR_TAGS
        M = g3.tensor_of_point(P)
        assert cyclic.is_nonsingular_tensor(M, "kernel") == label_ns


def test_s_labels_xi_property(g5):
    codes, xis = g5.classification()
    z1, z2 = g5.zsets()
    s1 = xis[codes == geom._CODES["S1"]]
    s2 = xis[codes == geom._CODES["S2"]]
    assert set(int(v) for v in np.unique(s1)) == set(z1)
    assert set(int(v) for v in np.unique(s2)) == set(z2)
    # xi^{2(q-1)} = 1 on the branch
    for v in np.unique(np.concatenate([s1, s2])):
        assert g5.tower.pow_i(int(v), 2 * (g5.q - 1)) == 1


# --- censuses ---------------------------------------------------------------------------

def test_census_q3_exact(g3):
    rep = g3.orbit_census()
    c = rep.counts
    assert (c["Q0"], c["SigmaTilde"], c["T"], c["QTilde"], c["DTilde"],
            c["H1"], c["H2"]) == (16, 24, 48, 36, 192, 72, 144)
    assert c["S1"] == {}
    assert sorted(c["S2"].values()) == [144, 144]
    assert rep.total() == 820


def test_census_q5_exact(g5):
    rep = g5.orbit_census()
    c = rep.counts
    assert (c["Q0"], c["SigmaTilde"], c["T"], c["QTilde"], c["DTilde"],
            c["H1"], c["H2"]) == (36, 120, 240, 400, 2880, 1200, 1800)
    assert sorted(c["S1"].values()) == [1200, 1200]
    assert sorted(c["S2"].values()) == [1800] * 4
    assert rep.total() == 16276


def test_census_against_closed_forms(g3, g5):
    for g in (g3, g5):
        rep = g.orbit_census()
        q = g.q
        for tag in geom.LABELS[:7]:
            assert rep.counts[tag] == geom.ORBIT_SIZE_FORMULAS[tag](q)


def test_census_workers_deterministic(g3):
    seq = g3.orbit_census(workers=1)
    par = g3.orbit_census(workers=2)
    assert seq.counts == par.counts


def test_nonsingular_total_equals_external_line_count(g3):
    rep = g3.orbit_census()
    q = g3.q
    ns = rep.counts["QTilde"] + rep.counts["H1"] + sum(rep.counts["S1"].values())
    assert ns == q * q * (q - 1) ** 2 * (q * q - q) // 2
    from pgtensors.qh import sigma_lines
    externals = sum(1 for l in sigma_lines(g3) if g3.subline_type(l) == "external")
    assert ns == externals * (q * q - q)


def test_brute_force_oracle_full_space(g3):
    mask = geom.brute_nonsingular_mask(g3)
    codes, _ = g3.classification()
    label_mask = np.isin(codes, [geom._CODES[t] for t in geom.NONSINGULAR_TAGS])
    assert np.array_equal(mask, label_mask)


# --- surfaces ---------------------------------------------------------------------------

def test_zsets_sizes(g3, g5):
    for g in (g3, g5):
        z1, z2 = g.zsets()
        assert len(z1) == g.q - 3 and len(z2) == g.q - 1


def test_surface_contains_base_and_splits(g3):
    z1, z2 = g3.zsets()
    base = g3.base_locus_points()
    assert len(base) == (g3.q + 1) * (2 * g3.q ** 2 - g3.q + 1)
    for xi in z2:
        surf = set(int(v) for v in g3.surface_points(xi))
        st = set(int(v) for v in g3.s_tilde_points(xi))
        assert set(int(v) for v in base) <= surf
        assert st == surf - set(int(v) for v in base)
        assert len(surf) == 64 + 144  # base plus the singular piece at q=3


def test_invalid_xi_rejected(g3):
    with pytest.raises(geom.InvalidXi):
        g3.surface_points(g3.tower.element([1, 1]).val)  # norm 2, (2(q-1))-th power != 1
    with pytest.raises(geom.InvalidXi):
        g3.surface_points(0)


def test_external_secant_lines_meet_surfaces(g3, g5):
    # every external line extension meets each Z1-side surface piece in q+1
    # points; every secant one meets each Z2-side piece in q-1 points (the
    # counts below force q-1: the piece sizes equal #secants * (q-1), and
    # each piece point lies on exactly one line, which is a secant)
    from pgtensors.qh import sigma_lines
    _, z2_3 = g3.zsets()
    st = {xi: set(int(v) for v in g3.s_tilde_points(xi)) for xi in z2_3}
    lines3 = sigma_lines(g3)
    secants = [l for l in lines3 if g3.subline_type(l) == "secant"]
    assert len(secants) * (g3.q - 1) == len(next(iter(st.values())))
    for line in secants:
        ext = set(line.extension_points())
        for xi in z2_3:
            assert len(ext & st[xi]) == g3.q - 1
    z1_5, _ = g5.zsets()
    st5 = {xi: set(int(v) for v in g5.s_tilde_points(xi)) for xi in z1_5}
    count = 0
    for line in sigma_lines(g5):
        if g5.subline_type(line) != "external":
            continue
        ext = set(line.extension_points())
        for xi in z1_5:
            assert len(ext & st5[xi]) == g5.q + 1
        count += 1
        if count >= 8:
            break


# --- tangent plane counts ----------------------------------------------------------------

def test_tangent_plane_counts_examples(g3):
    assert g3.tangent_plane_count(g3.point((1, 1, 1, 1))) == 7
    assert g3.tangent_plane_count(g3.point((1, 0, 0, 0))) == 0
    P = class_representative(g3, "DTilde")
    assert g3.tangent_plane_count(P) == 1


def test_tangent_plane_count_five_way_table(g3):
    expected = {"Q0": 2 * g3.q + 1, "SigmaTilde": g3.q + 1, "T": g3.q + 1,
                "QTilde": 0, "H1": 0, "S1": 0,
                "H2": 2, "S2": 2, "DTilde": 1}
    codes, _ = g3.classification()
    pts = g3.points()
    for i in range(len(pts)):
        tag = geom.LABELS[int(codes[i])]
        P = ProjPoint4(tuple(int(v) for v in pts[i]))
        assert g3.tangent_plane_count(P) == expected[tag]


# --- plane distributions ------------------------------------------------------------------

def test_plane_distribution_q0_row_q3(g3):
    rep = g3.plane_distribution(class_representative(g3, "Q0"))
    c = rep.counts
    assert (c["Q0"], c["SigmaTilde"], c["T"], c["QTilde"], c["DTilde"],
            c["H1"], c["H2"]) == (7, 6, 12, 0, 12, 0, 18)
    assert sorted(c["S2"].values()) == [18, 18]
    assert rep.total() == 91


def test_plane_distribution_sigma_row_q5(g5):
    rep = g5.plane_distribution(class_representative(g5, "SigmaTilde"))
    c = rep.counts
    assert (c["Q0"], c["SigmaTilde"], c["T"], c["QTilde"], c["DTilde"],
            c["H1"], c["H2"]) == (6, 25, 0, 20, 120, 60, 60)
    assert sorted(c["S1"].values()) == [60, 60]
    assert sorted(c["S2"].values()) == [60] * 4
    assert rep.total() == 651


def test_plane_distribution_identities_all_rows(g3, g5):
    for g in (g3, g5):
        z1, z2 = g.zsets()
        for tag in geom.LABELS:
            xi = None
            if tag == "S1":
                if not z1:
                    continue
                xi = z1[0]
            elif tag == "S2":
                xi = z2[0]
            rep = g.plane_distribution(class_representative(g, tag, xi))
            checks = plane_distribution_identities(g, rep)
            assert checks["row_sum_ok"], (g.q, tag)
            assert checks["hermitian_ok"], (g.q, tag)
            assert checks["quadric_ok"], (g.q, tag)
            assert checks["sigma_ok"], (g.q, tag)


def test_plane_distribution_constant_on_classes(g3):
    codes, xis = g3.classification()
    pts = g3.points()
    rng = random.Random(8)
    for tag in ("QTilde", "H2", "DTilde"):
        idxs = np.nonzero(codes == geom._CODES[tag])[0]
        reps = [g3.plane_distribution(
            ProjPoint4(tuple(int(v) for v in pts[idxs[rng.randrange(len(idxs))]])))
            for _ in range(3)]
        base = {k: v for k, v in reps[0].counts.items() if not isinstance(v, dict)}
        for rep in reps[1:]:
            assert {k: v for k, v in rep.counts.items() if not isinstance(v, dict)} == base


# --- errata -----------------------------------------------------------------------------

def test_errata_contains_certified_corrections(g3, g5):
    errs3 = geom.errata_report(g3)
    assert {"source": "plane-table", "row": "QTilde", "column": "DTilde", "q": 3,
            "xi": None, "paper": 14, "computed": 16} in errs3
    errs5 = geom.errata_report(g5)
    assert {"source": "plane-table", "row": "DTilde", "column": "DTilde", "q": 5,
            "xi": None, "paper": 145, "computed": 135} in errs5
    # no orbit-size errata: the census matches every published orbit size
    assert not [e for e in errs3 + errs5 if e["source"] == "orbit-size"]


def test_consistent_rows_produce_no_errata(g3, g5):
    for g, errs in ((g3, geom.errata_report(g3)), (g5, geom.errata_report(g5))):
        rows_with_errata = {e["row"] for e in errs if e["source"] == "plane-table"}
        assert "Q0" not in rows_with_errata
        assert "SigmaTilde" not in rows_with_errata
        assert "T" not in rows_with_errata


# --- group orbits -------------------------------------------------------------------------

def test_bfs_orbits_q3(g3):
    sizes = {(1, 1, 1, 1): 16, (1, 0, 0, 1): 24, (1, 0, 0, 0): 36}
    for seed, size in sizes.items():
        orbit = g3.orbit_bfs(g3.point(seed))
        assert len(orbit) == size


def test_bfs_orbits_match_classifier_partition(g3):
    codes, xis = g3.classification()
    pts = g3.points()
    packed = g3.pack_arr(pts)
    label_of = {}
    z1, z2 = g3.zsets()
    for i in range(len(pts)):
        tag = geom.LABELS[int(codes[i])]
        xi = int(xis[i])
        if tag in ("S1", "S2"):
            # the full group merges the xi and -xi pieces
            xi_key = min(xi, g3.neg(xi))
            label_of[int(packed[i])] = (tag, xi_key)
        else:
            label_of[int(packed[i])] = (tag, None)
    remaining = set(label_of)
    orbits = []
    while remaining:
        seed = ProjPoint4(g3.unpack(min(remaining)))
        orbit = g3.orbit_bfs(seed)
        assert orbit <= remaining
        orbits.append(orbit)
        remaining -= orbit
    # every orbit is exactly one class (the subgeometry classes stay whole,
    # the deformation-surface classes appear as xi/-xi pairs)
    for orbit in orbits:
        assert len({label_of[p] for p in orbit}) == 1
    assert len(orbits) == 8  # Q0, SigmaTilde, T, QTilde, DTilde, H1, H2, S2-pair


# --- reports ----------------------------------------------------------------------------

def test_census_report_serialization(g3):
    rep = g3.orbit_census()
    js = rep.to_jsonable()
    assert js["total"] == 820 and js["scope"] == "space"
    rows = rep.to_csv_rows()
    assert rows[0] == "label,count"
    assert "Q0,16" in rows
    assert any(r.startswith("S2:") for r in rows)
