#!/usr/bin/env python3
"""
Command-line front end for expander_minors.

    python cli.py gen --family regular --n 1024 --d 8 > g.txt
    python cli.py analyze g.txt --eps 0.4
    python cli.py find-minor g.txt --eps 0.4 --mode sparse --witness w.json
    python cli.py verify g.txt w.json
    python cli.py experiment sweep.json --out results.csv --jobs 4
"""
import json
import logging
import sys

import click

from expander_minors.config import Config
from expander_minors.errors import MinorsError
from expander_minors.generators import FAMILIES, GenSpec
from expander_minors.graph_io import format_edge_list, read_edge_list, witness_from_json, witness_to_json
from expander_minors.harness import CsvSink, completed_keys, emit, load_config, run_experiment
from expander_minors.minor_engine import SUCCESS, compute_params, find_minor, verify_witness
from expander_minors.spectral import analyze as analyze_graph, gate_theorem_hypotheses
from expander_minors.walks import STATIONARY, RngStream, run_walk

logger = logging.getLogger('expander_minors.cli')

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2


def _load_graph(stream):
    graph = read_edge_list(stream)
    logger.debug(f'loaded {graph}')
    return graph


@click.group()
@click.option('--seed', type=int, default=0, show_default=True, help='Base seed for every random choice.')
@click.option('--format', 'fmt', type=click.Choice(['text', 'json', 'csv']), default='text',
              show_default=True, help='Output format where a command supports several.')
@click.option('--jobs', type=int, default=1, show_default=True, help='Worker processes for experiments.')
@click.option('--log-level', default=None, help='Logging level (defaults to MINORS_LOG_LEVEL).')
@click.pass_context
def cli(ctx, seed, fmt, jobs, log_level):
    """Complete minors in expander graphs."""
    logging.basicConfig(level=(log_level or Config.LOG_LEVEL).upper(),
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s', stream=sys.stderr)
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, fmt=fmt, jobs=jobs)


@cli.command()
@click.option('--family', type=click.Choice(FAMILIES), required=True)
@click.option('--n', type=int, default=None)
@click.option('--d', type=int, default=None)
@click.option('--p', type=float, default=None)
@click.option('--a', type=int, default=None)
@click.option('--b', type=int, default=None)
@click.pass_context
def gen(ctx, family, n, d, p, a, b):
    """Generate a graph in edge-list format on stdout."""
    graph = GenSpec(family, n=n, d=d, p=p, a=a, b=b, seed=ctx.obj['seed']).generate()
    click.echo(format_edge_list(graph), nl=False)


@cli.command()
@click.argument('graph_file', type=click.File('r'))
@click.option('--k', type=int, default=None, help='Size bound for h_k (exact only).')
@click.option('--eps', type=float, default=None, help='Also gate the theorem hypotheses at this eps.')
def analyze(graph_file, k, eps):
    """Expansion metrics of a graph as JSON."""
    graph = _load_graph(graph_file)
    data = analyze_graph(graph, k=k).to_dict()
    if eps is not None:
        data['gate'] = gate_theorem_hypotheses(graph, eps).to_dict()
    click.echo(json.dumps(data, indent=2))


@cli.command()
@click.argument('graph_file', type=click.File('r'))
@click.option('--steps', type=int, required=True)
@click.option('--start', default=STATIONARY, show_default=True, help="Vertex id or 'stationary'.")
@click.pass_context
def walk(ctx, graph_file, steps, start):
    """Lazy random walk trace, one vertex per line."""
    graph = _load_graph(graph_file)
    trace = run_walk(graph, steps, RngStream(ctx.obj['seed']), start=start if start == STATIONARY else int(start))
    click.echo('\n'.join(str(v) for v in trace.vertices))


@cli.command('find-minor')
@click.argument('graph_file', type=click.File('r'))
@click.option('--eps', type=float, default=0.4, show_default=True)
@click.option('--mode', type=click.Choice(['sparse', 'constd', 'constant-degree', 'intermediate']),
              default='sparse', show_default=True)
@click.option('--profile', type=click.Choice(['desk', 'literal']), default='desk', show_default=True)
@click.option('--max-iter', type=int, default=None, help='Iteration budget (default 2n).')
@click.option('--emit-history', is_flag=True, help='Include the per-iteration event log.')
@click.option('--witness', 'witness_file', type=click.File('w'), default=None, help='Write the witness JSON here.')
@click.pass_context
def find_minor_cmd(ctx, graph_file, eps, mode, profile, max_iter, emit_history, witness_file):
    """Run the minor engine; exit 0 on success, 2 otherwise."""
    graph = _load_graph(graph_file)
    params = compute_params(graph.n, graph.max_degree, eps, mode, profile)
    report = find_minor(graph, params, RngStream(ctx.obj['seed']), max_iter=max_iter)
    click.echo(json.dumps(report.to_dict(history=emit_history), indent=2))
    if witness_file is not None and report.witness is not None:
        witness_file.write(witness_to_json(report.witness) + '\n')
    ctx.exit(EXIT_OK if report.outcome == SUCCESS else EXIT_FAILED)


@cli.command()
@click.argument('graph_file', type=click.File('r'))
@click.argument('witness_file', type=click.File('r'))
@click.pass_context
def verify(ctx, graph_file, witness_file):
    """Check a witness against a graph; exit 0 iff valid."""
    graph = _load_graph(graph_file)
    result = verify_witness(graph, witness_from_json(witness_file.read()))
    click.echo(json.dumps(result.to_dict()))
    ctx.exit(EXIT_OK if result.valid else EXIT_FAILED)


@cli.command()
@click.argument('config_path', required=False, type=click.Path(dir_okay=False))
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Results file (overrides config).')
@click.option('--resume', is_flag=True, help='Skip cells already present in the CSV output.')
@click.option('--progress/--no-progress', default=False)
@click.pass_context
def experiment(ctx, config_path, out, resume, progress):
    """Run a sweep; exit 0 if every cell succeeded, 2 if any did not."""
    config_path = config_path or Config.DEFAULT_CONFIG
    if not config_path:
        raise click.UsageError('no config given and MINORS_CONFIG is unset')
    config = load_config(config_path)
    out = out or config.output
    fmt = ctx.obj['fmt'] if ctx.obj['fmt'] in ('csv', 'json') else config.format
    jobs = ctx.obj['jobs']

    if out and fmt == 'csv':
        skip = completed_keys(out) if resume else frozenset()
        if not resume:
            open(out, 'w').close()
        sink = CsvSink(out)
        try:
            rows = run_experiment(config, jobs=jobs, sink=sink, skip=skip, progress=progress)
        finally:
            sink.close()
    else:
        rows = run_experiment(config, jobs=jobs, progress=progress)
        if out:
            with open(out, 'w', newline='') as f:
                emit(rows, f, fmt)
        else:
            emit(rows, sys.stdout, fmt)
    failed = sum(row.outcome != SUCCESS for row in rows)
    logger.info(f'experiment finished: {len(rows) - failed}/{len(rows)} cells succeeded')
    ctx.exit(EXIT_FAILED if failed else EXIT_OK)


def main():
    try:
        code = cli(standalone_mode=False, obj={})
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_ERROR)
    except click.Abort:
        sys.exit(EXIT_ERROR)
    except MinorsError as e:
        logger.error(f'{type(e).__name__}: {e}')
        sys.exit(EXIT_ERROR)
    sys.exit(code if isinstance(code, int) else EXIT_OK)


if __name__ == '__main__':
    main()
