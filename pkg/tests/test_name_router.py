import random

import pytest

from internames.errors import MissingFcn, UnsupportedPair
from internames.name_router import (
    AccessPolicy,
    BridgeRule,
    PolicyAction,
    PolicyOperation,
    PolicyRule,
    bridge,
    check_access,
)
from internames.names import Name, parse_name
from internames.nrs import NextHopTech, Protocol, ServiceDescriptor
from internames.wire import MessageKind, WireMessage

HTTP = Protocol.HTTPISH
CCN = Protocol.CCNISH_OVER_UDPISH


def rule(inbound, outbound):
    return BridgeRule(inbound, outbound, "realmA", "realmB")


def sd(fcn="FCN1"):
    proto = CCN if fcn else HTTP
    return ServiceDescriptor(proto, fcn, NextHopTech.CCNISH if fcn else NextHopTech.IPISH, "hop")


def msg(kind, fcn=""):
    return WireMessage(
        msg_id=7,
        kind=kind,
        target_fcn=fcn,
        target_name=parse_name("n2n://ccn.com:article.pdf"),
        source_name=parse_name("n2n://users:alice"),
        body=b"payload",
    )


def test_rule_requires_distinct_realms():
    with pytest.raises(ValueError):
        BridgeRule(HTTP, CCN, "same", "same")


def test_http_get_to_interest():
    out = bridge(msg(MessageKind.HTTP_GET), rule(HTTP, CCN), sd("FCN1"))
    assert out.kind is MessageKind.CCN_INTEREST
    assert out.target_fcn == "FCN1"
    assert out.msg_id == 7
    assert out.source_name == parse_name("n2n://users:alice")


def test_http_get_without_fcn():
    with pytest.raises(MissingFcn):
        bridge(msg(MessageKind.HTTP_GET), rule(HTTP, CCN), sd(""))


def test_interest_to_http_get():
    out = bridge(msg(MessageKind.CCN_INTEREST, "FCN1"), rule(CCN, HTTP), sd(""))
    assert out.kind is MessageKind.HTTP_GET
    assert out.target_fcn == ""


def test_data_to_http_resp_and_back():
    out = bridge(msg(MessageKind.CCN_DATA, "FCN1"), rule(CCN, HTTP), sd(""))
    assert out.kind is MessageKind.HTTP_RESP
    assert out.body == b"payload"
    back = bridge(out, rule(HTTP, CCN), sd("FCN1"))
    assert back.kind is MessageKind.CCN_DATA
    assert back.target_fcn == "FCN1"


def test_push_to_data():
    out = bridge(msg(MessageKind.HTTP_PUSH), rule(HTTP, CCN), sd("FCN1"))
    assert out.kind is MessageKind.CCN_DATA


def test_sub_is_unsupported():
    with pytest.raises(UnsupportedPair):
        bridge(msg(MessageKind.SUB, "topic"), rule(HTTP, CCN), sd("FCN1"))


def test_bridging_preserves_identity_fields():
    for kind, r in [
        (MessageKind.HTTP_GET, rule(HTTP, CCN)),
        (MessageKind.CCN_DATA, rule(CCN, HTTP)),
        (MessageKind.HTTP_PUSH, rule(HTTP, CCN)),
    ]:
        m = msg(kind, "FCN1" if kind is not MessageKind.HTTP_GET else "")
        out = bridge(m, r, sd("FCN1"))
        assert out.msg_id == m.msg_id
        assert out.source_name == m.source_name
        assert out.body == m.body


def test_empty_policy_allows():
    assert check_access(AccessPolicy(), parse_name("n2n://r:who"),
                        PolicyOperation.PULL) is PolicyAction.ALLOW


def test_prefix_deny():
    policy = AccessPolicy((
        PolicyRule(parse_name("n2n://nriA:evil"), PolicyAction.DENY),
    ))
    assert check_access(policy, parse_name("n2n://nriA:evil/bot1"),
                        PolicyOperation.PULL) is PolicyAction.DENY
    assert check_access(policy, parse_name("n2n://nriA:good"),
                        PolicyOperation.PULL) is PolicyAction.ALLOW


def test_first_match_wins_and_operation_filter():
    policy = AccessPolicy((
        PolicyRule(parse_name("n2n://r:a"), PolicyAction.ALLOW, PolicyOperation.PULL),
        PolicyRule(parse_name("n2n://r:a"), PolicyAction.DENY, PolicyOperation.ANY),
    ))
    assert check_access(policy, parse_name("n2n://r:a/x"),
                        PolicyOperation.PULL) is PolicyAction.ALLOW
    assert check_access(policy, parse_name("n2n://r:a/x"),
                        PolicyOperation.PUSH) is PolicyAction.DENY


def test_randomized_policies_match_linear_scan_oracle():
    rng = random.Random(23)
    ops = list(PolicyOperation)
    for _ in range(100):
        rules = tuple(
            PolicyRule(
                Name("r", tuple(rng.choice("ab") for _ in range(rng.randint(1, 3)))),
                rng.choice(list(PolicyAction)),
                rng.choice(ops),
            )
            for _ in range(rng.randint(0, 6))
        )
        policy = AccessPolicy(rules)
        for _ in range(20):
            principal = Name("r", tuple(rng.choice("ab") for _ in range(rng.randint(1, 4))))
            op = rng.choice([o for o in ops if o is not PolicyOperation.ANY])
            expected = PolicyAction.ALLOW
            for r in rules:
                if r.operation not in (PolicyOperation.ANY, op):
                    continue
                k = len(r.principal_prefix.segments)
                if principal.segments[:k] == r.principal_prefix.segments:
                    expected = r.action
                    break
            assert check_access(policy, principal, op) is expected
