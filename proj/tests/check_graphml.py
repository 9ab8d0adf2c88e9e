#!/usr/bin/env python3
"""Builds a graph with the CLI and checks the GraphML export.

usage: check_graphml.py <reviewgraph binary> <reviews.jsonl> <scratch dir>
"""
import pathlib
import shutil
import subprocess
import sys
import xml.etree.ElementTree as ET

NS = "{http://graphml.graphdrawing.org/xmlns}"


def run(cli, args):
    result = subprocess.run([cli, *args], capture_output=True, text=True)
    if result.returncode != 0:
        sys.exit(f"{' '.join(args)} exited {result.returncode}: {result.stderr.strip()}")


def main():
    cli, reviews, scratch = sys.argv[1], sys.argv[2], pathlib.Path(sys.argv[3])
    shutil.rmtree(scratch, ignore_errors=True)
    scratch.mkdir(parents=True)
    common = ["--input", reviews, "--out", str(scratch)]
    run(cli, ["extract", *common])
    run(cli, ["graph", "build", *common])
    run(cli, ["graph", "export", "--format", "graphml", *common])
    exported = sorted(scratch.glob("*.graphml"))
    if len(exported) != 1:
        sys.exit(f"expected one .graphml file, found {exported}")
    path = exported[0]

    root = ET.parse(path).getroot()
    assert root.tag == NS + "graphml", root.tag
    keys = {k.get("id"): k for k in root.findall(NS + "key")}
    for k in keys.values():
        assert k.get("for") in ("node", "edge", "graph", "all"), k.attrib
        assert k.get("attr.type") in ("string", "int", "long", "double", "float", "boolean"), k.attrib
    graphs = root.findall(NS + "graph")
    assert len(graphs) == 1
    graph = graphs[0]
    nodes = graph.findall(NS + "node")
    edges = graph.findall(NS + "edge")
    ids = {n.get("id") for n in nodes}
    assert len(ids) == len(nodes), "duplicate node ids"
    for e in edges:
        assert e.get("source") in ids and e.get("target") in ids, e.attrib
    for element in nodes + edges:
        for d in element.findall(NS + "data"):
            assert d.get("key") in keys, f"undeclared key {d.get('key')}"
    assert nodes and edges, "empty graph"

    try:
        import networkx
    except ImportError:
        print(f"{path.name}: {len(nodes)} nodes, {len(edges)} edges (networkx unavailable, XML checks only)")
        return
    g = networkx.read_graphml(path)
    assert g.number_of_nodes() == len(nodes), (g.number_of_nodes(), len(nodes))
    assert g.number_of_edges() == len(edges), (g.number_of_edges(), len(edges))
    print(f"{path.name}: {len(nodes)} nodes, {len(edges)} edges, read by networkx {networkx.__version__}")


if __name__ == "__main__":
    main()
