import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import RELATIVE_TABLE
from steklab.chromatic import (
    EmbeddingCertificate,
    RotationSystem,
    SurfaceSignature,
    canonical_cycle,
    check_certificate,
    chr0_bounds,
    chr0_exact,
    chr0_interval,
    chr_closed,
    classify_surface,
    complete_graph,
    face_id,
    fixture_names,
    greedy_color,
    is_proper,
    load_certificate,
    load_fixture,
    min_degree_bound,
    parse_surface,
    rotation_system_from_faces,
    save_certificate,
    trace_faces,
    verify_proper,
)
from steklab.chromatic.bounds import colour_bound
from steklab.chromatic.coloring import elimination_order
from steklab.chromatic.search import SearchExhausted, search_embedding

TETRAHEDRON = [(1, 2, 3), (1, 4, 2), (2, 4, 3), (3, 4, 1)]


def k3_disk():
    return RotationSystem(3, {1: (2, 3), 2: (3, 1), 3: (1, 2)})


# ---------------------------------------------------------------------------
# maps


def test_canonical_cycle():
    assert canonical_cycle((3, 1, 2)) == (1, 2, 3)
    assert canonical_cycle((3, 2, 1)) == (1, 2, 3)
    assert canonical_cycle((5, 6, 2, 8)) == (2, 6, 5, 8)
    assert canonical_cycle(()) == ()


def test_k3_has_two_faces_on_sphere():
    rs = k3_disk()
    faces = trace_faces(rs)
    assert [f.vertices for f in faces] == [(1, 2, 3), (1, 2, 3)]
    sig = classify_surface(rs)
    assert (sig.chi, sig.orientable) == (2, True)


def test_tetrahedron():
    rs = rotation_system_from_faces(4, TETRAHEDRON)
    faces = trace_faces(rs)
    assert len(faces) == 4
    assert sorted(f.vertices for f in faces) == sorted(canonical_cycle(f) for f in TETRAHEDRON)
    assert (classify_surface(rs).chi, classify_surface(rs).orientable) == (2, True)


def test_verify_proper_needs_every_vertex_on_a_hole():
    rs = rotation_system_from_faces(4, TETRAHEDRON)
    assert not verify_proper(EmbeddingCertificate(rs, ((1, 2, 3),)))
    assert verify_proper(EmbeddingCertificate(rs, ((1, 2, 3), (1, 2, 4))))


def test_removed_non_face_raises():
    rs = rotation_system_from_faces(4, TETRAHEDRON)
    with pytest.raises(ValueError):
        verify_proper(EmbeddingCertificate(rs, ((1, 2, 3, 4),)))
    with pytest.raises(ValueError):
        verify_proper(EmbeddingCertificate(rs, ((1, 2, 3), (3, 2, 1))))


def test_k3_both_faces_removable():
    rs = k3_disk()
    # the two faces share a vertex cycle; the walking direction tells them apart
    assert face_id(rs, (1, 2, 3)) != face_id(rs, (3, 2, 1))
    assert verify_proper(EmbeddingCertificate(rs, ((1, 2, 3),)))
    assert verify_proper(EmbeddingCertificate(rs, ((1, 2, 3), (3, 2, 1))))


def test_invalid_rotation_systems():
    with pytest.raises(ValueError):
        RotationSystem(2, {1: (2,), 2: ()})
    with pytest.raises(ValueError):
        RotationSystem(2, {1: (1,), 2: ()})
    with pytest.raises(ValueError):
        RotationSystem(3, {1: (2,), 2: (1,), 3: ()}, {(1, 3): -1})
    with pytest.raises(ValueError):
        RotationSystem(2, {1: (2,), 2: (1,)}, {(1, 2): 2})


def test_disconnected_map_cannot_be_classified():
    rs = RotationSystem(4, {1: (2,), 2: (1,), 3: (4,), 4: (3,)})
    with pytest.raises(ValueError):
        classify_surface(rs)


def test_switching_at_a_vertex_keeps_the_surface():
    # reversing the rotation at a vertex and flipping its edge signs describes the same map
    for rs in (rotation_system_from_faces(4, TETRAHEDRON), load_fixture("k6_klein").rotation_system):
        rot = dict(rs.rotations)
        rot[1] = rot[1][::-1]
        switched = RotationSystem(rs.n, rot, {e: (-s if 1 in e else s) for e, s in rs.signs.items()})
        assert classify_surface(switched) == classify_surface(rs)
        assert sorted(f.vertices for f in trace_faces(switched)) == sorted(f.vertices for f in trace_faces(rs))


@st.composite
def rotation_systems(draw):
    n = draw(st.integers(3, 6))
    rot = {v: draw(st.permutations([w for w in range(1, n + 1) if w != v])) for v in range(1, n + 1)}
    edges = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    signs = {e: draw(st.sampled_from((1, -1))) for e in edges}
    return RotationSystem(n, rot, signs)


@settings(max_examples=60, deadline=None)
@given(rotation_systems(), st.data())
def test_walk_reversal(rs, data):
    u = data.draw(st.integers(1, rs.n))
    w = data.draw(st.sampled_from(rs.neighbours(u)))
    s = data.draw(st.sampled_from((1, -1)))
    x = (u, w, s)
    assert rs.reverse(rs.reverse(x)) == x
    assert rs.step(rs.reverse(rs.step(x))) == rs.reverse(x)


@settings(max_examples=60, deadline=None)
@given(rotation_systems())
def test_faces_cover_every_edge_twice(rs):
    faces = trace_faces(rs)
    assert sum(len(f) for f in faces) == 2 * len(rs.edges)
    sig = classify_surface(rs)
    assert sig.chi <= 2
    if all(s == 1 for s in rs.signs.values()):
        assert sig.orientable


# ---------------------------------------------------------------------------
# certificates


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_certificates(name):
    cert = load_fixture(name)
    rep = check_certificate(cert)
    assert rep["proper"] and rep["claims_match"]
    assert rep["n"] - len(cert.rotation_system.edges) + rep["faces"] == rep["chi"]
    chi_b = rep["chi"] - rep["p"]
    if chi_b <= 0:
        # a proper embedding of K_n forces the minimum degree n-1 under the bound
        assert rep["n"] - 1 <= math.floor(min_degree_bound(chi_b))


def test_expected_fixtures_present():
    assert {"k3_disk", "k5_mobius", "k6_klein", "k8_genus2_p3"} <= set(fixture_names())


def test_json_round_trip(tmp_path):
    cert = load_fixture("k6_klein")
    path = tmp_path / "c.json"
    save_certificate(cert, path)
    back = load_certificate(path)
    assert back.rotation_system.rotations == cert.rotation_system.rotations
    assert back.rotation_system.signs == cert.rotation_system.signs
    assert back.removed_faces == cert.removed_faces and back.claims == cert.claims
    save_certificate(back, tmp_path / "d.json")
    assert (tmp_path / "d.json").read_bytes() == path.read_bytes()


def test_malformed_certificate(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3, "rotations": [[2, 3], [3, 1]]}')
    with pytest.raises(ValueError):
        load_certificate(path)
    with pytest.raises(KeyError):
        load_fixture("nope")


# ---------------------------------------------------------------------------
# bounds


def test_parse_surface():
    assert parse_surface("sphere") == SurfaceSignature(2, True)
    assert parse_surface("projective") == SurfaceSignature(1, False)
    assert parse_surface("klein") == SurfaceSignature(0, False)
    assert parse_surface("torus") == SurfaceSignature(0, True)
    assert parse_surface("genus2o") == SurfaceSignature(-2, True)
    assert parse_surface("sum3T") == SurfaceSignature(-4, True)
    assert parse_surface("sum5P") == SurfaceSignature(-3, False)
    for bad in ("cube", "sum0T", "sumT"):
        with pytest.raises(ValueError):
            parse_surface(bad)


def test_surface_signature_validation():
    for args in ((3, True), (1, True), (2, False), (0, True, -1)):
        with pytest.raises(ValueError):
            SurfaceSignature(*args)


@pytest.mark.parametrize("chi,orientable,expected", [
    (2, True, 4), (1, False, 6), (0, False, 6), (0, True, 7), (-1, False, 7), (-2, True, 8), (-4, True, 9),
])
def test_chr_closed(chi, orientable, expected):
    assert chr_closed(SurfaceSignature(chi, orientable)) == expected


def test_min_degree_bound():
    assert min_degree_bound(0) == 4
    assert min_degree_bound(-1) == 5
    assert min_degree_bound(-5) == pytest.approx((3 + math.sqrt(145)) / 2)
    with pytest.raises(ValueError):
        min_degree_bound(1)


@pytest.mark.parametrize("chi,p", [(2, 1), (1, 2), (0, 3), (-4, 2), (-7, 5)])
def test_integer_colour_bound_is_floor_of_real_bound(chi, p):
    closed = SurfaceSignature(chi, chi == 2)
    upper = chr0_bounds(closed, p)[1]
    assert upper == min(chr_closed(closed), math.floor(colour_bound(chi, p) + 1e-12))


def test_chr0_bounds_examples():
    assert chr0_bounds(parse_surface("sphere"), 1) == (3, 3)
    assert chr0_bounds(parse_surface("torus"), 3) == (6, 7)
    assert chr0_bounds(parse_surface("klein"), 2) == (5, 6)
    with pytest.raises(ValueError):
        chr0_bounds(parse_surface("torus"), 0)


@pytest.mark.parametrize("label", sorted(RELATIVE_TABLE))
def test_table_rows(label):
    chi, orientable, row = RELATIVE_TABLE[label]
    sig = SurfaceSignature(chi, orientable)
    assert tuple(chr0_exact(sig, p) for p in range(1, 6)) == row


closed_surfaces = st.one_of(
    st.integers(-9, 1).map(lambda c: SurfaceSignature(c, False)),
    st.integers(-5, 1).map(lambda g: SurfaceSignature(2 * g, True)),
)


@settings(max_examples=80, deadline=None)
@given(closed_surfaces, st.integers(1, 8))
def test_interval_inside_bounds_and_monotone(sig, p):
    lo_b, hi_b = chr0_bounds(sig, p)
    lo, hi = chr0_interval(sig, p)
    assert lo_b <= lo <= hi <= hi_b
    nlo, nhi = chr0_interval(sig, p + 1)
    assert lo <= nlo and hi <= nhi
    ex = chr0_exact(sig, p)
    assert ex is None or lo == ex == hi


# ---------------------------------------------------------------------------
# colouring


def cycle(n):
    return {v: {(v - 1) % n, (v + 1) % n} for v in range(n)}


def test_greedy_examples():
    assert greedy_color(complete_graph(4), 4).success
    res = greedy_color(cycle(5), 3)
    assert res.success and res.n_colors == 3 and is_proper(cycle(5), res.colors)
    bad = greedy_color(complete_graph(4), 3)
    assert not bad.success and bad.blocking_vertex is not None


def test_elimination_order_smallest_last():
    star = {0: {1, 2, 3}, 1: {0}, 2: {0}, 3: {0}}
    order = elimination_order(star)
    assert sorted(order) == [0, 1, 2, 3]
    res = greedy_color(star, 2)
    assert res.success and is_proper(star, res.colors)


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_graph_colouring(name):
    cert = load_fixture(name)
    claims = cert.claims
    closed = SurfaceSignature(claims.chi, claims.orientable)
    c = chr0_bounds(closed, claims.p)[1]
    res = greedy_color(cert.rotation_system, c)
    assert res.success and res.n_colors <= c
    assert is_proper(cert.rotation_system.adjacency(), res.colors)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12))
def test_complete_graph_needs_n_colours(n):
    assert greedy_color(complete_graph(n), n).success
    assert not greedy_color(complete_graph(n), n - 1).success


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.data())
def test_greedy_is_proper_when_it_succeeds(n, data):
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    adj = {v: set() for v in range(n)}
    for a, b in chosen:
        adj[a].add(b)
        adj[b].add(a)
    degeneracy = max((len(a) for a in adj.values()), default=0)
    res = greedy_color(adj, degeneracy + 1)
    assert res.success and is_proper(adj, res.colors)


# ---------------------------------------------------------------------------
# search


def test_search_sphere_and_projective_plane():
    res = search_embedding(4, {3: 4}, True)
    assert classify_surface(res.rotation_system) == SurfaceSignature(2, True)
    res = search_embedding(5, {3: 5, 5: 1}, False)
    sig = classify_surface(res.rotation_system)
    assert (sig.chi, sig.orientable) == (1, False)
    assert sorted(len(f) for f in trace_faces(res.rotation_system)) == [3] * 5 + [5]


def test_search_torus_k7_with_required_face():
    res = search_embedding(7, {3: 14}, True, required=[(1, 2, 3)])
    assert classify_surface(res.rotation_system) == SurfaceSignature(0, True)
    assert (1, 2, 3) in {f.vertices for f in trace_faces(res.rotation_system)}


def test_search_errors():
    with pytest.raises(ValueError):
        search_embedding(4, {3: 3}, True)
    with pytest.raises(SearchExhausted):
        # K_5 is not planar
        search_embedding(5, {3: 6, 4: 0, 2: 1}, True, seeds=range(2), node_limit=2000)
