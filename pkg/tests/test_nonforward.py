"""Non-forwarding analysis: trace search, static guarantee, witnesses."""

import random

import pytest

from cpi.gen import random_cpi_process
from cpi.nonforward import (
    WitnessNotCpi, check_nonforwarding, static_guarantee, witness_check,
)
from cpi.parser import PI, parse
from cpi.syntax import validate_cpi

SATISFYING = "k?(x).new l in (l!<x>.0 | l?(y).0)"
VIOLATING = "k?(x).new l in (k!<l>.l!<x>.0 | l?(y).0)"


def test_satisfying_example():
    v = check_nonforwarding(parse(SATISFYING, mode=PI), 5)
    assert v.satisfied and v.violation is None
    assert v.to_json()["result"] == "satisfied-up-to-depth"


def test_violating_example():
    v = check_nonforwarding(parse(VIOLATING, mode=PI), 5)
    assert not v.satisfied
    viol = v.violation
    assert viol.receive_index == 0 and viol.send_index == 2
    # received on k, extruded l, then forwarded the received name on l
    kinds = [a["kind"] for a in v.to_json()["violation"]["trace"]]
    assert kinds == ["in", "bound-out", "out"]


def test_direct_forward():
    v = check_nonforwarding(parse("a?(x).b!<x>.0", mode=PI), 2)
    assert not v.satisfied
    assert v.violation.receive_index == 0 and v.violation.send_index == 1


def test_already_free_name_is_not_watched():
    # receiving a name that was already free is not a confidentiality leak
    v = check_nonforwarding(parse("a?(x).a!<a>.0", mode=PI), 3)
    assert v.satisfied


def test_depth_zero_trivially_satisfied():
    assert check_nonforwarding(parse(VIOLATING, mode=PI), 0).satisfied


def test_violation_beyond_depth_not_found():
    v = check_nonforwarding(parse(VIOLATING, mode=PI), 2)
    assert v.satisfied  # the forward needs a 3-step trace


def test_static_guarantee():
    g = static_guarantee(parse(SATISFYING, mode=PI))
    assert not g.guaranteed  # outside the fragment despite being safe
    g2 = static_guarantee(parse("a?(x).x!<b>.0", mode=PI))
    assert g2.guaranteed


def test_fragment_members_never_forward():
    # the static guarantee, sampled behaviorally
    rng = random.Random(77)
    for _ in range(40):
        p = random_cpi_process(rng, 8)
        assert validate_cpi(p).ok
        assert check_nonforwarding(p, 4).satisfied


def test_witness_check_positive():
    p = parse(SATISFYING, mode=PI)
    q = parse("k?(x).new l in (l?(y).0 | l!<x>.0)", mode=PI)
    # q is outside the fragment too, so it is rejected as a witness
    with pytest.raises(WitnessNotCpi):
        witness_check(p, q, 3)
    # a genuine confidential witness: the private exchange on l is
    # invisible either way, so sending a instead of x changes nothing
    w = parse("k?(x).new l in (l!<a>.0 | l?(y).0)", mode=PI)
    ev = witness_check(p, w, 4)
    assert ev.positive


def test_witness_check_negative():
    p = parse(VIOLATING, mode=PI)
    w = parse("k?(x).0")
    ev = witness_check(p, w, 3)
    assert not ev.positive
