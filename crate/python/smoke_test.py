"""Smoke test for the foldcover Python module.

Build and install first, e.g. `maturin develop -m crates/foldcover-py/Cargo.toml`.
"""

import json

import foldcover


def main():
    a = foldcover.Alphabet.surface(1, 2)
    assert a.names() == ["a1", "b1", "x1"]
    assert a.reduce("a1 b1 b1^-1 x1") == "a1 x1"

    g = foldcover.Graph(a).add_loop("a1 b1").add_loop("a1 b1^-1")
    folded, _ = g.fold()
    assert folded.vertex_count == 2
    assert folded.is_member("a1 b1 b1 a1^-1")
    assert not folded.is_member("a1")
    assert g.accepts_unfolded("a1 b1")

    spec = foldcover.CoverSpec.from_json(json.dumps({
        "genus": 1,
        "boundary": [1, 1],
        "d": [2, 2],
        "w": ["a1 b1"],
        "y": ["a1"],
        "sigma": {"1,1,1": "b1", "2,1,1": "a1^-1"},
    }))
    fam = foldcover.build(spec)
    assert fam.case == "case1-even" and fam.n_min % 2 == 0
    cover = fam.instantiate(fam.n_min)
    assert cover.vertex_count == 2 * fam.n_min + 1
    cert = foldcover.verify(cover, spec, fam.n_min)
    assert cert.passed, cert.to_text()
    assert cover.cycle_type("x1") == [cover.vertex_count]

    assert foldcover.slope_intersection((1, 0), (0, 1)) == 1
    assert foldcover.cusp_cover_index(3, 5, (1, 0), (0, 1)) == 15
    d, lcm = foldcover.slope_d("torus 1 s1=1/0 c1=2 s2=0/1 c2=2\n", 1)
    assert d == [2] and lcm == 2

    try:
        foldcover.build(foldcover.CoverSpec.from_json(json.dumps(
            {"genus": 1, "boundary": [1, 1], "d": [2, 2], "w": ["x1"], "y": ["a1"]})))
    except ValueError as e:
        assert "SUBGROUP_NOT_PERIPHERAL_FREE" in str(e)
    else:
        raise AssertionError("peripheral w accepted")

    print("smoke test ok: n_min=%d degree=%d" % (fam.n_min, cover.vertex_count))


if __name__ == "__main__":
    main()
