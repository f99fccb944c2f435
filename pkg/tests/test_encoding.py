"""Forwarding-free translation: structure, validity, homomorphism,
name invariance, reduction completeness."""

import random

import pytest

from cpi.encoding import (
    SourceModeError, check_completeness, encode, encode_with_handlers,
    handler, renaming_policy, source_reductions,
)
from cpi.gen import random_pi_process
from cpi.parser import PI, parse, render
from cpi.syntax import (
    Par, Prefixed, ReservedNameError, Restrict, alpha_equivalent,
    canonicalize, chan, free_names, substitute, validate_cpi, var,
)


def test_renaming_policy():
    t = renaming_policy(chan("a"))
    assert t.n_name.ident == "#n_a" and t.m_name.ident == "#m_a"
    assert t.n_name.is_channel
    tv = renaming_policy(var("x"))
    assert tv.n_name.is_variable
    with pytest.raises(ReservedNameError):
        renaming_policy(chan("#0"))


def test_handler_is_confidential():
    h = handler(chan("k"))
    assert validate_cpi(h).ok


def test_encode_output_shape():
    e = encode(parse("a!<b>.0", mode=PI))
    assert isinstance(e, Restrict) and len(e.channels) == 2
    assert render(e) == ("new #e0,#e1 in "
                        "#n_a!<#e0>.#m_b!<#e0,#e1>.#e1?(#y2).#y2!<#e0>.0")


def test_encode_input_shape():
    e = encode(parse("a?(x).0", mode=PI))
    assert isinstance(e, Prefixed)
    recv = e.prefix
    # binders: x, its attached reveal/broker pair, the continuation channel
    assert len(recv.binders) == 4
    x = recv.binders[0]
    assert recv.binders[1].ident == f"#n_{x.ident}"
    assert recv.binders[2].ident == f"#m_{x.ident}"


def test_encode_is_homomorphic():
    rng = random.Random(31)
    for _ in range(30):
        p = random_pi_process(rng, 6, repl_weight=0.1)
        q = random_pi_process(rng, 6, repl_weight=0.1)
        lhs = canonicalize(encode(Par(p, q)))
        rhs = canonicalize(Par(encode(p), encode(q, fresh_start=1000)))
        assert lhs == rhs


def test_encoded_terms_are_confidential():
    rng = random.Random(32)
    for _ in range(50):
        p = random_pi_process(rng, 8, repl_weight=0.1)
        rep = validate_cpi(encode(p))
        assert rep.ok, (render(p), rep.to_json())


def test_encode_forwarding_source():
    src = parse("a?(x).b!<x>.0", mode=PI)
    assert not validate_cpi(src).ok
    assert validate_cpi(encode(src)).ok


def test_name_invariance():
    # translating a substituted source equals substituting the
    # translation along the attached-name policy
    src = parse("a?(x).0 | c!<b>.0", mode=PI)
    k, c = chan("k"), chan("c")
    tk, tc = renaming_policy(k), renaming_policy(c)
    lhs = encode(substitute(src, {c: k}))
    rhs = substitute(encode(src), {c: k, tc.n_name: tk.n_name,
                                   tc.m_name: tk.m_name})
    assert alpha_equivalent(lhs, rhs)


def test_encode_restriction_installs_handler():
    e = encode(parse("new k in k!<k>.0", mode=PI))
    assert isinstance(e, Restrict) and len(e.channels) == 3
    assert isinstance(e.body, Par)


def test_encode_with_handlers_free_names():
    p = parse("a!<b>.0", mode=PI)
    e = encode_with_handlers(p)
    assert isinstance(e, Par)
    # one handler per free channel, none for a closed term
    closed = parse("new a,b in (a!<b>.0 | a?(x).0)", mode=PI)
    assert not isinstance(encode_with_handlers(closed), Par)


def test_encode_rejects_polyadic():
    with pytest.raises(SourceModeError):
        encode(parse("a!<b,c>.0", mode=PI))
    with pytest.raises(SourceModeError):
        encode(parse("a?(x,y).0", mode=PI))


def test_encode_rejects_free_reserved():
    with pytest.raises(SourceModeError):
        encode(parse("#q!<a>.0", mode=PI, allow_reserved=True))


def test_source_reductions_need_closed_terms():
    with pytest.raises(SourceModeError):
        source_reductions(parse("a!<b>.0 | a?(x).0", mode=PI))
    reds = source_reductions(parse("new a,b in (a!<b>.0 | a?(x).0)", mode=PI))
    assert len(reds) == 1


def test_completeness_plain_comm_six_steps():
    rep = check_completeness(parse("new a,b in (a!<b>.0 | a?(x).0)", mode=PI),
                             tau_budget=12, depth=4)
    assert rep.ok
    (r,) = rep.results
    assert r.tau_steps == 6  # the synchronization protocol takes 6 steps
    assert r.witness is not None and r.verdict.bisimilar


def test_completeness_budget_too_small():
    rep = check_completeness(parse("new a,b in (a!<b>.0 | a?(x).0)", mode=PI),
                             tau_budget=3, depth=4)
    assert not rep.ok
    (r,) = rep.results
    assert r.found is False and r.tau_steps is None


def test_completeness_report_json():
    rep = check_completeness(parse("new k in (k!<k>.0 | k?(x).0)", mode=PI),
                             tau_budget=8, depth=3)
    j = rep.to_json()
    assert j["ok"] and j["reducts"][0]["tau_steps"] == 6
