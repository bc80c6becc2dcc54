"""Start the HTTP gateway preloaded with the demo styles, an open analyst
role, a bearer token, and a repository seeded with the text-mining operations.

Usage: python3 scripts/serve_demo.py [--port 8000]
Token: `demo-token` (user `ann`, role `analyst`).
"""

import argparse

import uvicorn

from euarch import fixtures
from euarch.executor import AccessRule
from euarch.gateway import GatewayConfig, GatewayState, create_app
from euarch.repository import Ontology, Repository, metadata_for


def build_state() -> GatewayState:
    state = GatewayState(GatewayConfig())
    for source in (fixtures.WORKFLOW_STYLE, fixtures.DNA_STYLE,
                   fixtures.NEURO_STYLE, fixtures.OZONE_STYLE):
        state.add_style(source)
    state.tokens["demo-token"] = {"user": "ann", "roles": ["analyst"]}
    state.runtime.rules.extend([
        AccessRule(principal="analyst", resource="*", action="use"),
        AccessRule(principal="analyst", resource="*", action="read")])

    ontology = Ontology.from_config(
        {"root": [{"TextMining": ["Extraction", "Cleaning", "Analysis"]}]})
    repo = Repository(ontology)
    style = fixtures.resolved("DNA")
    categories = {
        "MailExtractor": ["root", "TextMining", "Extraction"],
        "DataSource": ["root", "TextMining", "Extraction"],
        "FilterText": ["root", "TextMining", "Cleaning"],
        "Delete": ["root", "TextMining", "Cleaning"],
        "GenerateMetaNetwork": ["root", "TextMining", "Analysis"],
        "HotTopics": ["root", "TextMining", "Analysis"],
    }
    for name, path in categories.items():
        decl = style.component_types[name]
        repo.register(decl, metadata_for(decl, style, ontology_path=path,
                                         description=f"{name} operation"))
    state.repo = repo
    return state


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=None)
    args = parser.parse_args()
    config = GatewayConfig()
    port = args.port if args.port is not None else config.resolved_port()
    uvicorn.run(create_app(build_state()), host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
