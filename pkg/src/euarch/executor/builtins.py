"""Builtin pure transforms used by tests and demos.

A builtin maps (params, ordered input byte strings) to one or more output
byte strings; all of them are deterministic so re-running a plan reproduces
the exact artifact digests.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter

BUILTINS = {}


def builtin(name):
    def wrap(fn):
        BUILTINS[name] = fn
        return fn
    return wrap


def get_builtin(name: str):
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin '{name}'")
    return BUILTINS[name]


@builtin("const_text")
def const_text(params, inputs):
    return params.get("text", "").encode()


@builtin("identity")
def identity(params, inputs):
    return inputs[0]


@builtin("emit_input")
def emit_input(params, inputs):
    """Pass-through for synthesized source steps fed by external artifacts."""
    return inputs[0]


@builtin("upper")
def upper(params, inputs):
    return inputs[0].upper()


@builtin("concat")
def concat(params, inputs):
    return b"".join(inputs)


@builtin("fail")
def fail(params, inputs):
    raise RuntimeError(params.get("message", "builtin 'fail' invoked"))


@builtin("extract_mail")
def extract_mail(params, inputs):
    """Deterministic stand-in for a mail fetch: derives a small corpus from
    the server parameter so different servers give different artifacts."""
    server = params.get("server", "mail.example.org")
    seed = hashlib.sha256(server.encode()).hexdigest()[:8]
    lines = [f"From: analyst@{server}",
             f"Subject: weekly sync {seed}",
             "the quick brown fox discussed the flood relief effort",
             "a meeting about water supplies and medical aid",
             f"Signed-off: {server}"]
    return "\n".join(lines).encode()


@builtin("filter_text")
def filter_text(params, inputs):
    """Drop lines containing any pattern from the second input (one per line)."""
    text = inputs[0].decode()
    patterns = [p for p in inputs[1].decode().splitlines() if p] if len(inputs) > 1 else []
    kept = [line for line in text.splitlines()
            if not any(p in line for p in patterns)]
    return "\n".join(kept).encode()


@builtin("delete_words")
def delete_words(params, inputs):
    """Remove common keywords given as a comma-separated param or dictionary input."""
    text = inputs[0].decode()
    stopwords = set(filter(None, params.get("dictionary", "a,an,the,of,and").split(",")))
    words = [w for w in re.split(r"(\s+)", text) if w.strip() == "" or w.lower() not in stopwords]
    return "".join(words).encode()


@builtin("meta_network")
def meta_network(params, inputs):
    """Build a toy co-occurrence network: words sharing a line are linked.
    Output is a deterministic JSON document standing in for DyNetML."""
    text = inputs[0].decode()
    config = inputs[1].decode() if len(inputs) > 1 else ""
    min_len = 4
    for line in config.splitlines():
        if line.startswith("min_len="):
            min_len = int(line.split("=", 1)[1])
    edges = set()
    nodes = set()
    for line in text.splitlines():
        words = sorted({w.lower() for w in re.findall(r"[A-Za-z]+", line)
                        if len(w) >= min_len})
        nodes.update(words)
        edges.update((a, b) for i, a in enumerate(words) for b in words[i + 1:])
    doc = {"nodes": sorted(nodes), "edges": sorted(list(e) for e in edges)}
    return json.dumps(doc, sort_keys=True).encode()


@builtin("hot_topics")
def hot_topics(params, inputs):
    """Rank network nodes by degree and emit a plain-text report."""
    doc = json.loads(inputs[0].decode())
    degree = Counter()
    for a, b in doc.get("edges", []):
        degree[a] += 1
        degree[b] += 1
    top = int(params.get("top", 5))
    ranked = sorted(degree.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    lines = ["hot topics report"] + [f"{i+1}. {w} ({d})" for i, (w, d) in enumerate(ranked)]
    return "\n".join(lines).encode()
