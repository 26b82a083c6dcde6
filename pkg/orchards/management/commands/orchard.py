"""
Comando de línea de órdenes del toolkit de redes orchard

Uso: python manage.py orchard <subcomando> [opciones]

Cada subcomando lee ficheros eNewick/JSON, delega en los módulos de
``orchards`` y escribe eNewick o JSON en stdout o en --out.
Códigos de salida: 0 éxito, 1 fallo de dominio (p. ej. red no orchard),
2 error de uso o de lectura.
"""
import argparse
import json
import logging

import chardet
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from orchards import canonicalizer, cherry_engine, enewick_io, hgt_labelling, rearrangement, space_explorer
from orchards.exceptions import ENewickError, ENewickSemanticError, OrchardKitError
from orchards.limits_config import get_limits_config
from orchards.network_core import summary, validate
from orchards.serializers import SpaceSummarySerializer, SummarySerializer, render_json

logger = logging.getLogger(__name__)


def read_text(path):
    """Lee un fichero detectando su codificación; los bytes no decodificables lanzan UnicodeDecodeError"""
    with open(path, 'rb') as handle:
        file_content = handle.read()
    detected = chardet.detect(file_content)
    encoding = detected['encoding'] if detected['confidence'] > 0.7 else 'utf-8'
    try:
        return file_content.decode(encoding)
    except LookupError:
        return file_content.decode('utf-8')


def parse_pair(value):
    parts = value.split(',')
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"Par inválido '{value}', se esperaba x,y")
    return parts[0].strip(), parts[1].strip()


class Command(BaseCommand):
    help = 'Redes filogenéticas orchard: reconocimiento, etiquetados, movimientos rNNI, caminos y espacios'
    requires_system_checks = []

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        sub = self._subparser(subparsers, 'validate', 'Valida una red y resume sus nodos')
        sub.add_argument('network', help='Fichero eNewick')

        sub = self._subparser(subparsers, 'is-orchard', 'Busca una secuencia de cherry picking')
        sub.add_argument('network', help='Fichero eNewick')
        sub.add_argument('--sequence-out', help='Fichero JSON donde guardar la secuencia')

        sub = self._subparser(subparsers, 'label', 'Construye un etiquetado HGT-consistente')
        sub.add_argument('network', help='Fichero eNewick')

        sub = self._subparser(subparsers, 'base-tree', 'Árbol base de una red binaria orchard')
        sub.add_argument('network', help='Fichero eNewick')

        sub = self._subparser(subparsers, 'reduce', 'Reduce un par (x,y)')
        sub.add_argument('network', help='Fichero eNewick')
        sub.add_argument('--pair', required=True, type=parse_pair, help='Par a reducir, formato x,y')

        sub = self._subparser(subparsers, 'reconstruct', 'Reconstruye una red desde una secuencia')
        sub.add_argument('--seq', required=True, help='Fichero JSON con la secuencia [[x,y],...]')
        sub.add_argument('--survivor', help='Taxón superviviente (necesario si la secuencia es vacía)')

        sub = self._subparser(subparsers, 'neighbors', 'Vecinos a un movimiento rNNI')
        sub.add_argument('network', help='Fichero eNewick')
        sub.add_argument('--orchard-only', action='store_true', help='Solo vecinos orchard')

        sub = self._subparser(subparsers, 'path', 'Camino rNNI entre dos redes orchard', default_format='json')
        sub.add_argument('source', help='Fichero eNewick de origen')
        sub.add_argument('target', help='Fichero eNewick de destino')
        sub.add_argument('--leaf', help='Hoja respecto de la que se canoniza')

        sub = self._subparser(subparsers, 'canonicalize', 'Forma canónica de una red orchard')
        sub.add_argument('network', help='Fichero eNewick')
        sub.add_argument('--leaf', required=True, help='Hoja que queda sola bajo la parte superior')

        sub = self._subparser(subparsers, 'explore', 'Enumera Orch(n,k) y su grafo rNNI')
        sub.add_argument('--leaves', required=True, type=int)
        sub.add_argument('--retics', required=True, type=int)
        sub.add_argument('--budget', type=int, help='Máximo de vértices (por defecto ORCHARDKIT_BUDGET)')
        sub.add_argument('--diameter', action='store_true', help='Calcular el diámetro exacto')
        sub.add_argument('--dump-edges', help='Fichero de aristas "id1 id2"')
        sub.add_argument('--dump-manifest', help='Fichero CSV id,enewick')

        sub = self._subparser(subparsers, 'random', 'Red binaria orchard aleatoria')
        sub.add_argument('--leaves', required=True, type=int)
        sub.add_argument('--retics', required=True, type=int)
        sub.add_argument('--seed', type=int, help='Semilla (por defecto ORCHARDKIT_DEFAULT_SEED)')

    def _subparser(self, subparsers, name, help_text, default_format='enewick'):
        sub = subparsers.add_parser(
            name,
            help=help_text,
            called_from_command_line=self._called_from_command_line,
        )
        sub.add_argument('--format', choices=['json', 'enewick'], default=default_format, help='Formato de salida')
        sub.add_argument('--out', help='Fichero de salida (por defecto stdout)')
        return sub

    def handle(self, *args, **options):
        subcommand = options['subcommand']
        handler = getattr(self, 'handle_' + subcommand.replace('-', '_'))
        try:
            output = handler(options)
        except ENewickError as exc:
            logger.error(f"{subcommand}: eNewick inválido: {exc}")
            raise CommandError(str(exc), returncode=2)
        except serializers.ValidationError as exc:
            logger.error(f"{subcommand}: JSON inválido: {exc.detail}")
            raise CommandError(f"JSON inválido: {exc.detail}", returncode=2)
        except (OSError, json.JSONDecodeError) as exc:
            logger.error(f"{subcommand}: no se pudo leer la entrada: {exc}")
            raise CommandError(str(exc), returncode=2)
        except UnicodeDecodeError as exc:
            logger.error(f"{subcommand}: codificación no válida: {exc}")
            raise CommandError(f"Codificación no válida: {exc}", returncode=2)
        except OrchardKitError as exc:
            logger.error(f"{subcommand}: {exc}")
            raise CommandError(str(exc), returncode=1)
        self.emit(output, options)

    # Entrada y salida

    def load(self, path):
        return enewick_io.parse(read_text(path))

    def load_json(self, path):
        return json.loads(read_text(path))

    def emit(self, text, options):
        if options.get('out'):
            with open(options['out'], 'w', encoding='utf-8') as handle:
                handle.write(text + '\n')
            self.stdout.write(self.style.SUCCESS(f"Salida escrita en {options['out']}"))
        else:
            self.stdout.write(text)

    def render_network(self, net, options):
        if options['format'] == 'json':
            return render_json({'enewick': enewick_io.write(net)})
        return enewick_io.write(net)

    def render_trace(self, trace, options):
        if options['format'] == 'json':
            return render_json({
                'start': enewick_io.write(trace.start),
                'steps': enewick_io.trace_to_json(trace),
            })
        return '\n'.join(enewick_io.write(net) for net in trace.networks())

    def fail(self, message):
        logger.error(message)
        raise CommandError(message, returncode=1)

    # Subcomandos

    def handle_validate(self, options):
        try:
            net = self.load(options['network'])
        except ENewickSemanticError as exc:
            if exc.report is None:
                raise
            data = {
                'valid': False,
                'violations': [
                    {'kind': v.kind, 'message': v.message, 'nodes': list(v.nodes)}
                    for v in exc.report.violations
                ],
            }
            self.emit(render_json(SummarySerializer(data).data), options)
            self.fail(f"Red inválida: {exc.report}")
        report = validate(net)
        info = summary(net)
        data = {
            'valid': report.is_valid,
            'n_leaves': info.n_leaves,
            'n_reticulations': info.n_reticulations,
            'reticulation_number': info.reticulation_number,
            'is_binary': info.is_binary,
            'violations': [],
        }
        return render_json(SummarySerializer(data).data)

    def handle_is_orchard(self, options):
        net = self.load(options['network'])
        seq = cherry_engine.is_orchard(net)
        if seq is None:
            self.fail('not orchard: ninguna secuencia de cherry picking reduce la red')
        pairs = enewick_io.sequence_to_json(seq)
        if options.get('sequence_out'):
            with open(options['sequence_out'], 'w', encoding='utf-8') as handle:
                handle.write(render_json(pairs) + '\n')
        if options['format'] == 'json':
            return render_json({'orchard': True, 'length': len(seq), 'sequence': pairs})
        return str(seq)

    def handle_label(self, options):
        net = self.load(options['network'])
        t = hgt_labelling.construct(net)
        if t is None:
            self.fail('not orchard: la red no admite un etiquetado HGT-consistente')
        return render_json(enewick_io.labelling_to_json(net, t))

    def handle_base_tree(self, options):
        net = self.load(options['network'])
        t = hgt_labelling.construct(net)
        if t is None:
            self.fail('not orchard: la red no tiene un árbol base derivado de un etiquetado')
        return self.render_network(hgt_labelling.base_tree(net, t), options)

    def handle_reduce(self, options):
        net = self.load(options['network'])
        x, y = options['pair']
        if cherry_engine.pair_kind(net, x, y) is None:
            logger.warning(f"({x},{y}) no es un par reducible; la red no cambia")
        return self.render_network(cherry_engine.reduce_pair(net, x, y), options)

    def handle_reconstruct(self, options):
        seq = enewick_io.sequence_from_json(self.load_json(options['seq']))
        net = cherry_engine.reconstruct(seq, survivor=options.get('survivor'))
        return self.render_network(net, options)

    def handle_neighbors(self, options):
        net = self.load(options['network'])
        neighbors = rearrangement.rnni_neighbors(net, orchard_only=options['orchard_only'])
        if options['format'] == 'json':
            return render_json([
                {'move': enewick_io.move_to_json(net, move), 'enewick': enewick_io.write(result)}
                for move, result in neighbors
            ])
        return '\n'.join(enewick_io.write(result) for _move, result in neighbors)

    def handle_path(self, options):
        source = self.load(options['source'])
        target = self.load(options['target'])
        trace = canonicalizer.orchard_path(source, target, l=options.get('leaf'))
        return self.render_trace(trace, options)

    def handle_canonicalize(self, options):
        net = self.load(options['network'])
        trace = canonicalizer.canonicalize(net, options['leaf'])
        if options['format'] == 'json':
            return self.render_trace(trace, options)
        return enewick_io.write(trace.final)

    def handle_explore(self, options):
        try:
            space = space_explorer.build_space(options['leaves'], options['retics'], options.get('budget'))
        except ValueError as exc:
            raise CommandError(str(exc), returncode=2)
        space_explorer.dump_space(space, options.get('dump_edges'), options.get('dump_manifest'))
        data = space_explorer.space_summary(space, with_diameter=options['diameter'])
        return render_json(SpaceSummarySerializer(data).data)

    def handle_random(self, options):
        seed = options.get('seed')
        if seed is None:
            seed = get_limits_config().default_seed
        try:
            net = cherry_engine.random_orchard(options['leaves'], options['retics'], seed)
        except ValueError as exc:
            raise CommandError(str(exc), returncode=2)
        return self.render_network(net, options)
