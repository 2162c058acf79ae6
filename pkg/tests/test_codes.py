import json

import numpy as np
import pytest

from autensemble import perm as P
from autensemble.codes import (
    QRM15_EXAMPLE_CYCLES,
    available_codes,
    bb_shift_generators,
    build_bb,
    build_from_manifest,
    css_distance_bruteforce,
    get_code,
    gl_matrix_from_images,
    qrm15_example_automorphism,
    qrm15_generators,
    qrm_code_automorphism,
)
from autensemble.gf2 import BinaryMatrix, gf2_mul, kernel_basis, permute_columns, rank
from autensemble.tanner_aut import group_order

BB_EXPS = ([(3, 0), (0, 1), (0, 2)], [(0, 3), (1, 0), (2, 0)])


def same_rowspace(a: BinaryMatrix, b: BinaryMatrix) -> bool:
    return rank(a) == rank(b) == rank(a.vstack(b))


def test_qrm_parameters(qrm):
    assert (qrm.n, qrm.k) == (15, 1)
    assert gf2_mul(qrm.hx, qrm.hz.T).is_zero()
    assert css_distance_bruteforce(qrm) == (3, 7)


def test_qrm_logicals(qrm):
    assert qrm.lx.nrows == qrm.lz.nrows == 1
    assert gf2_mul(qrm.hz, qrm.lx.T).is_zero()
    assert gf2_mul(qrm.hx, qrm.lz.T).is_zero()
    assert gf2_mul(qrm.lx, qrm.lz.T) == BinaryMatrix.identity(1)


@pytest.mark.parametrize("name,nk", [("bb72", (72, 12)), ("bb90", (90, 8)), ("bb108", (108, 8)), ("bb144", (144, 12))])
def test_manifest_codes(name, nk):
    code = get_code(name)
    assert (code.n, code.k) == nk
    assert code.k == code.n - rank(code.hx) - rank(code.hz)
    code.check()


def test_bb72_logicals(bb72):
    assert rank(gf2_mul(bb72.lx, bb72.lz.T)) == 12
    assert gf2_mul(bb72.hz, bb72.lx.T).is_zero()
    # independent of the stabiliser row space
    assert rank(bb72.hx.vstack(bb72.lx)) == rank(bb72.hx) + 12


def test_build_bb_direct():
    code = build_bb(6, 6, *BB_EXPS)
    assert (code.n, code.k) == (72, 12)
    assert code.hx.shape == (36, 72)


def test_manifest_mismatch_raises():
    entry = {"name": "bad", "l": 6, "m": 6, "a_exps": BB_EXPS[0], "b_exps": BB_EXPS[1], "expect_n": 72, "expect_k": 10}
    with pytest.raises(ValueError):
        build_from_manifest(entry)


def test_custom_manifest(tmp_path):
    entry = {"name": "tiny", "l": 6, "m": 6, "a_exps": BB_EXPS[0], "b_exps": BB_EXPS[1], "expect_n": 72, "expect_k": 12}
    path = tmp_path / "m.json"
    path.write_text(json.dumps([entry]))
    assert available_codes(path) == ["qrm15", "tiny"]
    assert get_code("tiny", path).k == 12


def test_unknown_code():
    with pytest.raises(KeyError):
        get_code("nope")


def test_identity_matrix_gives_identity_perm():
    assert qrm_code_automorphism(BinaryMatrix.identity(4)) == P.identity(15)


def test_example_automorphism_cycles():
    a = qrm_code_automorphism(gl_matrix_from_images((1, 9, 15, 3)))
    assert a == qrm15_example_automorphism()
    assert a == P.from_cycles(QRM15_EXAMPLE_CYCLES, 15)
    assert sorted(P.to_cycles(a)) == [(2, 9), (3, 8), (4, 15), (5, 14)]


def test_random_gl_preserve_rowspaces(qrm):
    rng = np.random.default_rng(7)
    seen = 0
    while seen < 100:
        m = rng.integers(0, 2, (4, 4), dtype=np.uint8)
        M = BinaryMatrix.from_array(m)
        if rank(M) < 4:
            continue
        a = qrm_code_automorphism(M)
        assert same_rowspace(permute_columns(qrm.hx, a), qrm.hx)
        assert same_rowspace(permute_columns(qrm.hz, a), qrm.hz)
        seen += 1


def test_gl_group_order():
    assert group_order(qrm15_generators()) == 20160


@pytest.mark.parametrize("name", ["bb72", "bb144"])
def test_shift_subgroup(name):
    code = get_code(name)
    l, m = code.meta["l"], code.meta["m"]
    gens = bb_shift_generators(l, m)
    assert group_order(gens) == l * m
    for g in gens:
        assert same_rowspace(permute_columns(code.hx, g), code.hx)
        assert same_rowspace(permute_columns(code.hz, g), code.hz)


def test_distance_oracle_on_repetition_like_code():
    # Steane code: both distances 3
    h = BinaryMatrix.from_array([[1, 0, 1, 0, 1, 0, 1], [0, 1, 1, 0, 0, 1, 1], [0, 0, 0, 1, 1, 1, 1]])
    from autensemble.codes import make_css

    steane = make_css("steane", h, h)
    assert steane.k == 1
    assert css_distance_bruteforce(steane) == (3, 3)
    assert kernel_basis(h).nrows == 4
