"""Security analysis: auth scheme checks and private-data taint paths."""

from euarch import fixtures
from euarch.analyses import SecurityPolicy, security_analysis


def test_wrong_auth_scheme_flagged_once(dna_style, email_arch):
    policy = SecurityPolicy(required_auth="token")
    violations = security_analysis(email_arch, dna_style, policy)
    assert [(v.rule_id, v.culprits) for v in violations] == \
        [("AUTH_SCHEME", ["mail"])]
    assert "password" in violations[0].message


def test_fixing_auth_clears_the_violation(dna_style):
    src = fixtures.FIG5_ARCH.replace('auth = "password";', 'auth = "token";')
    arch = fixtures.architecture(src, dna_style)
    assert security_analysis(arch, dna_style, SecurityPolicy()) == []


def test_components_without_auth_are_not_flagged(dna_style, email_arch):
    violations = security_analysis(email_arch, dna_style, SecurityPolicy())
    flagged = {c for v in violations for c in v.culprits}
    assert "patterns_src" not in flagged and "config_src" not in flagged


def test_private_data_taint_reaches_untrusted_components(dna_style, email_arch):
    policy = SecurityPolicy(
        required_auth="password" if False else "token",
        private_data_sources={"mail"},
        trusted_components={"MailExtractor", "FilterText", "Delete"})
    violations = security_analysis(email_arch, dna_style, policy)
    taints = [v for v in violations if v.rule_id == "PRIVATE_DATA_FLOW"]
    culprits = {c for v in taints for c in v.culprits}
    # meta and topics are downstream of mail and not trusted
    assert {"meta", "topics"} <= culprits
    # the sources feeding only patterns/config never see private data
    assert "patterns_src" not in culprits and "config_src" not in culprits


def test_taint_message_includes_the_path(dna_style, email_arch):
    policy = SecurityPolicy(private_data_sources={"mail"},
                            trusted_components={"MailExtractor"})
    taints = [v for v in security_analysis(email_arch, dna_style, policy)
              if v.rule_id == "PRIVATE_DATA_FLOW"]
    about_meta = [v for v in taints if "meta" in v.culprits]
    assert about_meta
    assert "mail" in about_meta[0].message and "meta" in about_meta[0].message


def test_taint_matches_transitive_closure_oracle(dna_style, email_arch):
    from euarch.conformance import dataflow_edges
    policy = SecurityPolicy(private_data_sources={"mail"},
                            trusted_components=set())
    taints = {c for v in security_analysis(email_arch, dna_style, policy)
              if v.rule_id == "PRIVATE_DATA_FLOW" for c in v.culprits}
    # oracle: repeated-squaring style closure over the raw edge set
    edges = dataflow_edges(email_arch, dna_style)
    closure = set(edges)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(closure):
            for (c, d) in list(closure):
                if b == c and (a, d) not in closure:
                    closure.add((a, d))
                    changed = True
    expected = {b for (a, b) in closure if a == "mail"}
    assert taints == expected


def test_pubsub_models_use_channel_topology_for_taint(ozone_style):
    arch, style = fixtures.dashboard(restricted=True)
    policy = SecurityPolicy(private_data_sources={"map"},
                            trusted_components={"MapWidget", "ChartWidget"})
    taints = {c for v in security_analysis(arch, style, policy)
              if v.rule_id == "PRIVATE_DATA_FLOW" for c in v.culprits}
    # map -> chart (allowed by restriction) -> table via rows
    assert taints == {"table"}
