import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autensemble import perm as P
from autensemble.bp import BpConfig, BpDecoder, Priors
from autensemble.codes import bb_shift_generators, qrm15_example_automorphism, qrm15_generators
from autensemble.ensemble import Candidate, build_ensemble, ensemble_decode, select_best
from autensemble.gf2 import permute_columns
from autensemble.stab_map import NotAnAutomorphismError
from autensemble.tanner_aut import group_elements, sample_ensemble

from conftest import in_rowspace, unit

CFG = BpConfig(15)


def qrm_auts(k=5, seed=0):
    return sample_ensemble(qrm15_generators(), k, seed=seed, include=[qrm15_example_automorphism()], degree=15)


def random_syndromes(H, shots, p, seed):
    rng = np.random.default_rng(seed)
    E = (rng.random((shots, H.ncols)) < p).astype(np.uint8)
    return (E @ H.to_array().T) % 2


def test_member_invariants(qrm):
    ens = build_ensemble(qrm.hx, Priors.uniform(15, 0.05), qrm_auts(), CFG)
    assert len(ens) == 5
    assert ens.members[1].automorphism == qrm15_example_automorphism()
    for mem in ens.members:
        assert mem.matrix == permute_columns(qrm.hx, mem.automorphism)
        assert P.is_identity(ens.members[0].automorphism)


def test_bb72_full_shift_group(bb72):
    auts = group_elements(bb_shift_generators(6, 6), cap=100)
    ens = build_ensemble(bb72.hx, Priors.uniform(72, 0.05), auts, CFG)
    assert len(ens) == 36
    assert all(m.map.is_row_permutation for m in ens.members)


def test_zero_syndrome(qrm):
    ens = build_ensemble(qrm.hx, Priors.uniform(15, 0.05), qrm_auts(), CFG)
    out = ensemble_decode(ens, np.zeros(4, dtype=np.uint8))
    assert not out.correction.any() and out.winner == 0 and out.success_flag


def test_example_corrects_z15(qrm):
    ens = build_ensemble(qrm.hx, Priors.uniform(15, 0.02), [P.identity(15), qrm15_example_automorphism()], CFG)
    out = ensemble_decode(ens, np.ones(4, dtype=np.uint8))
    assert out.success_flag
    assert in_rowspace(qrm.hz, out.correction ^ unit(15, 14))


@pytest.mark.parametrize("side", ["z", "x"])
def test_weight_one_sweep(qrm, side):
    H, S = (qrm.hx, qrm.hz) if side == "z" else (qrm.hz, qrm.hx)
    ens = build_ensemble(H, Priors.uniform(15, 0.02), qrm_auts(), CFG)
    for j in range(15):
        e = unit(15, j)
        out = ens.decode((H.to_array() @ e) % 2)
        assert out.success_flag
        assert in_rowspace(S, out.correction ^ e)


def test_degenerate_ensemble_is_plain_bp(bb72):
    S = random_syndromes(bb72.hx, 200, 0.06, 1)
    pri = Priors.uniform(72, 0.04)
    cfg = BpConfig(100)
    plain = BpDecoder(bb72.hx, pri, cfg).decode_batch(S)
    out = build_ensemble(bb72.hx, pri, [P.identity(72)], cfg).decode_batch(S)
    assert np.array_equal(out.corrections, plain.hard)
    assert np.array_equal(out.success, plain.converged)


def test_degenerate_osd_ensemble(qrm):
    from autensemble.osd import osd_decode

    S = random_syndromes(qrm.hx, 100, 0.1, 2)
    pri = Priors.uniform(15, 0.05)
    dec = BpDecoder(qrm.hx, pri, CFG)
    out = build_ensemble(qrm.hx, pri, [P.identity(15)], CFG, "bp+osd0").decode_batch(S)
    assert out.success.all()
    for i, s in enumerate(S):
        r = dec.decode(s)
        expect = r.hard if r.converged else osd_decode(qrm.hx, r.posterior_llrs, pri, s)
        assert np.array_equal(out.corrections[i], expect)


@pytest.mark.parametrize("side", ["hx", "hz"])
def test_validity_random_syndromes(qrm, bb72, side):
    for code, auts, p in ((qrm, qrm_auts(), 0.1), (bb72, sample_ensemble(bb_shift_generators(6, 6), 4, seed=1, degree=72), 0.05)):
        H = getattr(code, side)
        S = random_syndromes(H, 1000, p, 3)
        for kind in ("bp", "bp+osd0"):
            ens = build_ensemble(H, Priors.uniform(code.n, p), auts, BpConfig(30), kind)
            out = ens.decode_batch(S)
            ok = np.all((out.corrections @ H.to_array().T) % 2 == S, axis=1)
            assert np.all(ok[out.success])
            if kind == "bp+osd0":
                assert out.success.all()
        for s in S[:30]:
            for c in ens.candidates(s):
                if c.converged:
                    assert np.array_equal((H.to_array() @ c.correction) % 2, s)


def test_order_independence(qrm):
    S = random_syndromes(qrm.hx, 300, 0.1, 4)
    ens = build_ensemble(qrm.hx, Priors.uniform(15, 0.07), qrm_auts(), CFG, "bp+osd0")
    a = ens.decode_batch(S, workers=1)
    b = ens.decode_batch(S, workers=4)
    assert np.array_equal(a.corrections, b.corrections)
    assert np.array_equal(a.winner, b.winner)


def test_success_is_monotone(qrm):
    S = random_syndromes(qrm.hx, 500, 0.1, 5)
    auts = qrm_auts(8, seed=2)
    pri = Priors.uniform(15, 0.07)
    prev = None
    for k in range(1, len(auts) + 1):
        ok = build_ensemble(qrm.hx, pri, auts[:k], CFG).decode_batch(S).success
        if prev is not None:
            assert np.all(ok[prev])
        prev = ok


def test_build_errors(qrm):
    pri = Priors.uniform(15, 0.05)
    with pytest.raises(ValueError):
        build_ensemble(qrm.hx, pri, [qrm15_example_automorphism()])
    with pytest.raises(NotAnAutomorphismError):
        build_ensemble(qrm.hx, pri, [P.identity(15), P.from_cycles([(1, 2)], 15)])
    with pytest.raises(ValueError):
        build_ensemble(qrm.hx, pri, [P.identity(15)], inner_kind="mystery")


def _cand(ws, member):
    c = np.zeros(6, dtype=np.uint8)
    c[:ws] = 1
    return Candidate(c, float(ws), member, True)


def test_select_best_examples():
    one = _cand(2, 0)
    assert select_best([one]) is one
    cands = [_cand(3, 0), _cand(1, 1), _cand(2, 2)]
    assert select_best(cands).member == 1
    assert select_best([_cand(1, 3), _cand(1, 2)]).member == 2
    with pytest.raises(ValueError):
        select_best([])


@given(st.lists(st.lists(st.integers(0, 1), min_size=6, max_size=6), min_size=1, max_size=8), st.floats(0.01, 0.45))
def test_uniform_metrics_agree(rows, p):
    cands = [Candidate(np.array(r, dtype=np.uint8), 0.0, i, True) for i, r in enumerate(rows)]
    pri = Priors.uniform(6, p)
    assert select_best(cands, "min-weight").member == select_best(cands, "prior-likelihood", pri).member
