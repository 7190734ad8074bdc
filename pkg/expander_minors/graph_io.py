"""
File formats
Canonical edge list: a header line `n m`, then m lines `u v` with 0-indexed
u < v. Witnesses are JSON objects {"kind", "threshold", "order", "branch_sets"}.
"""
import json
import logging

from .errors import GraphError
from .graph_core import build_graph
from .minor_engine import MinorWitness

logger = logging.getLogger(__name__)


def format_edge_list(graph) -> str:
    lines = [f'{graph.n} {graph.m}']
    lines.extend(f'{u} {v}' for u, v in graph.edges())
    return '\n'.join(lines) + '\n'


def write_edge_list(graph, stream):
    stream.write(format_edge_list(graph))


def _content_lines(text):
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split('#', 1)[0].strip()
        if stripped:
            yield number, stripped


def parse_edge_list(text):
    """Canonical edge list to Graph; the header's edge count must match"""
    lines = list(_content_lines(text))
    if not lines:
        raise GraphError('empty edge list')
    number, header = lines[0]
    try:
        n, m = (int(token) for token in header.split())
    except ValueError:
        raise GraphError(f'line {number}: expected header "n m", got {header!r}')
    edges = []
    for number, line in lines[1:]:
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphError(f'line {number}: expected "u v", got {line!r}')
        try:
            edges.append((int(tokens[0]), int(tokens[1])))
        except ValueError:
            raise GraphError(f'line {number}: non-integer endpoint in {line!r}')
    if len(edges) != m:
        raise GraphError(f'header declares {m} edges, found {len(edges)}')
    return build_graph(n, edges)


def read_edge_list(stream):
    return parse_edge_list(stream.read())


def parse_labelled_edges(text):
    """
    Headerless `a b` lines with arbitrary labels. Labels are renumbered in
    first-appearance order; returns (graph, labels) with labels[i] the
    original label of vertex i.
    """
    ids = {}
    edges = []
    for number, line in _content_lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphError(f'line {number}: expected two labels, got {line!r}')
        pair = []
        for token in tokens:
            if token not in ids:
                ids[token] = len(ids)
            pair.append(ids[token])
        edges.append(tuple(pair))
    labels = list(ids)
    logger.debug(f'normalised {len(labels)} labels from {len(edges)} edges')
    return build_graph(len(labels), edges), labels


def witness_to_json(witness: MinorWitness) -> str:
    return json.dumps(witness.to_dict(), sort_keys=True)


def witness_from_json(text) -> MinorWitness:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphError(f'witness is not valid JSON: {e}')
    try:
        kind = data.get('kind', 'complete')
        sets = [frozenset(int(v) for v in members) for members in data['branch_sets']]
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise GraphError(f'malformed witness: {e}')
    if 'order' in data and data['order'] != len(sets):
        raise GraphError(f'witness order {data["order"]} does not match {len(sets)} branch sets')
    return MinorWitness(sets, kind=kind, threshold=data.get('threshold'))


__all__ = [
    'format_edge_list', 'write_edge_list', 'parse_edge_list', 'read_edge_list',
    'parse_labelled_edges', 'witness_to_json', 'witness_from_json',
]
