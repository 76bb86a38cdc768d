import functools
import logging

import numpy
import pandas
import yaml
from joblib import Parallel, delayed
from sklearn.utils import check_random_state

from ep_holonomy import analytic2x2, curves, evolve, lib, phase, reports, tracking
from ep_holonomy.exceptions import ConfigError, InvalidCurve, InvalidParams, NearEP
from ep_holonomy.families.Polynomial import MultivariatePolynomial, Polynomial

ANALYZE = 'analyze'
PHASE = 'phase'
CURVATURE = 'curvature'
SWEEP = 'sweep'
COMMANDS = [ANALYZE, PHASE, CURVATURE, SWEEP]

CONFIG_KEYS = {'family', 'polynomial', 'curve', 'loops', 'labels', 'samples', 'commands', 'output', 'grid', 'sweep',
               'workers', 'seed', 'self_test'}

# Largest relative change of a holonomy factor under a random gauge before the self test complains
GAUGE_SELF_TEST_TOL = 1e-9


def load_config(path):
    """
    Read a YAML job description

    :param path: Path to the YAML file
    :type path: str
    :return: The parsed configuration
    :rtype: dict
    """
    try:
        with open(path) as config_file:
            config = yaml.safe_load(config_file)
    except (OSError, yaml.YAMLError) as error:
        raise ConfigError('Could not read config: {}. {}'.format(path, error))
    if not isinstance(config, dict):
        raise ConfigError('Config: {} must be a mapping of keys to values'.format(path))
    logging.info('Loaded config: {} with keys: {}'.format(path, sorted(config.keys())))
    return config


class Runner():
    """
    A Runner object, executes the analyses described by a job config.

    The config names a matrix family, one or more curves and the commands to run:

     - `analyze`: monodromy permutations, label periods and the generated group
     - `phase`: dynamical and geometric phases per label, on automatically lifted loops
     - `curvature`: curvature over a 2D grid of parameter points
     - `sweep`: adiabatic convergence of direct time evolution
    """

    def __init__(self, config, family_handlers=dict(), curve_handlers=dict()):
        """
        :param config: A parsed job config, see `load_config`
        :type config: dict
        :param family_handlers: Any custom family classes, in the format {'name': FamilyClass}
        :type family_handlers: {str:class}
        :param curve_handlers: Any custom curve builders, in the format {'kind': function(spec)}
        :type curve_handlers: {str:callable}
        """
        self.config = config
        self._check_config_keys()

        # Set up family handlers
        self.family_handlers = dict(analytic2x2.FAMILY_HANDLERS)
        self.family_handlers.update(family_handlers)

        # Set up curve handlers
        self.curve_handlers = {'circle': self._circle,
                               'ellipse': self._ellipse,
                               'perturbed-circle': self._perturbed_circle,
                               'polyline': self._polyline,
                               'parametric-polynomial': self._parametric_polynomial,
                               'concatenation': self._concatenation}
        self.curve_handlers.update(curve_handlers)

        self.command_handlers = {ANALYZE: self.cmd_analyze,
                                 PHASE: self.cmd_phase,
                                 CURVATURE: self.cmd_curvature,
                                 SWEEP: self.cmd_sweep}

        # Family
        self.family = self._build_family()
        logging.info('Providing family: {} with dimension: {}'.format(self.family.name, self.family.dim))

        # Curves
        self.curve = self.build_curve(config['curve']) if 'curve' in config else None
        self.loops = [self.build_curve(spec) for spec in config.get('loops', list())]

        # Run settings
        self.samples = config.get('samples', 512)
        self.labels = self._parse_labels(config.get('labels', 'all'))
        self.commands = config.get('commands', list())
        output = config.get('output', dict()) or dict()
        self.output_dir = output.get('dir', 'ep_holonomy_output')
        self.output_format = output.get('format', reports.CSV)
        self.plot = bool(output.get('plot', False))
        self.workers = config.get('workers', 1)
        self.seed = config.get('seed', 0)
        self.gauge_trials = (config.get('self_test', dict()) or dict()).get('gauge_trials', 0)

        # Exit checks
        self._valid_configurations_check()

    def run(self, commands=None):
        """
        Run commands in order

        :param commands: Command names; defaults to the config's `commands` list
        :type commands: [str]
        :return: Each command's result, in the format {'command': result}
        :rtype: dict
        """
        commands = self.commands if commands is None else commands
        self._check_commands(commands)
        results = dict()
        for command in commands:
            logging.info('Running command: {}'.format(command))
            results[command] = self.command_handlers[command]()
        return results

    def cmd_analyze(self):
        """
        Monodromy of every loop (or of the single curve), label periods, and the order of the generated group

        :return: One row per loop, with the cycle notation, periods, group order and minimum gap
        :rtype: pandas.DataFrame
        """
        loops = self._loops()
        rows = list()
        paths = list()
        for loop in loops:
            path = tracking.track(self.family, loop, self.samples)
            monodromy = tracking.monodromy_of(path)
            paths.append(path)
            rows.append(dict(loop=loop.name,
                             sigma=monodromy.notation(),
                             periods=' '.join(str(period) for period in monodromy.periods),
                             min_gap=path.min_gap,
                             refinement_depth=path.refinement_depth))

        group = tracking.monodromy_group(self.family, loops, self.samples, paths=paths)
        for row in rows:
            row['group_order'] = group.order
            logging.info('{}: sigma = {}, |H| = {}'.format(row['loop'], row['sigma'], group.order))
        logging.info('Label orbits under the monodromy group: {}'.format(group.orbits))

        frame = pandas.DataFrame(rows, columns=['loop', 'sigma', 'periods', 'group_order', 'min_gap',
                                                'refinement_depth'])
        reports.write_table(frame, self.output_dir, 'monodromy', self.output_format)
        return frame

    def cmd_phase(self):
        """
        Phases per label. Each label's loop is lifted to the label's period, so that its branch is cyclic

        :return: One report row per label
        :rtype: [reports.ReportRow]
        """
        if len(self.labels) == 0:
            logging.warning('No labels requested, skipping phase')
            return list()
        curve = self._closed_curve()
        base = tracking.track(self.family, curve, self.samples)
        monodromy = tracking.monodromy_of(base)

        outcomes = Parallel(n_jobs=self.workers, prefer='threads')(
            delayed(self._lifted_phase)(curve, base, monodromy, label) for label in self.labels)

        rows = list()
        for label, (result, path) in zip(self.labels, outcomes):
            rows.append(reports.phase_row(result, path, self.family.name))
            logging.info('label {}: sigma = {}, k = {}, gamma mod 2pi = {:.12g}, Im gamma = {:.12g}, '
                         '|holonomy| = {:.12g}'.format(label + 1, monodromy.notation(), result.traversals,
                                                       result.geometric_wrapped, result.geometric_imag,
                                                       abs(result.holonomy_factor)))
            self._gauge_self_test(path, label, result)
        reports.write_rows(rows, self.output_dir, self.output_format)

        if self.plot:
            reports.plot_eigencurves(base, self.labels, reports.output_path(self.output_dir, 'eigencurves'))
            running = {label: (path.times, phase.running_phase(path, label))
                       for label, (_, path) in zip(self.labels, outcomes)}
            reports.plot_running_phase(running, reports.output_path(self.output_dir, 'phase_running'),
                                       title='Running geometric phase along {}'.format(curve.name))
        return rows

    def cmd_curvature(self):
        """
        Curvature of every label over a 2D grid of points center + x u + y v. Points near a degeneracy are masked

        :return: One row per grid point and label
        :rtype: pandas.DataFrame
        """
        grid = self.config.get('grid')
        if not isinstance(grid, dict):
            raise ConfigError('The curvature command needs a grid block')
        xs = self._grid_axis(grid, 'x')
        ys = self._grid_axis(grid, 'y')
        center = lib.as_point(grid.get('center', numpy.zeros(self.family.dim_params)))
        u, v = self._grid_axes(grid, len(center))
        methods = grid.get('methods', [phase.SUM_OVER_STATES])
        h = grid.get('h', None)
        coordinates = [(x, y) for y in ys for x in xs]
        points = [center + x * u + y * v for x, y in coordinates]

        frames = list()
        for label in self.labels:
            values = dict()
            for method in methods:
                samples = phase.curvature_grid(self.family, points, label, method=method, h=h, workers=self.workers)
                values[method] = [None if sample is None else complex(u @ sample.components @ v)
                                  for sample in samples]
            primary = values[methods[0]]
            masked = [value is None for value in primary]
            frame = pandas.DataFrame(dict(x=[x for x, _ in coordinates], y=[y for _, y in coordinates]))
            frame['label'] = label + 1
            frame['F_re'] = [0. if value is None else value.real for value in primary]
            frame['F_im'] = [0. if value is None else value.imag for value in primary]
            for method in methods:
                frame['{}_re'.format(method)] = [0. if value is None else value.real for value in values[method]]
                frame['{}_im'.format(method)] = [0. if value is None else value.imag for value in values[method]]
            frame['disagreement'] = self._disagreement(values, methods)
            frame['masked'] = masked
            frames.append(frame)

        if len(frames) == 0:
            logging.warning('No labels requested, skipping curvature')
            return pandas.DataFrame()
        result = pandas.concat(frames, ignore_index=True)
        if result['masked'].all():
            raise NearEP('Every curvature grid point lies within the EP guard')
        logging.info('Curvature grid: {} cells, {} masked'.format(len(result.index), int(result['masked'].sum())))

        reports.write_table(result, self.output_dir, 'curvature', self.output_format)
        if self.plot:
            reports.plot_curvature(frames[0], reports.output_path(self.output_dir, 'curvature'))
        return result

    def cmd_sweep(self):
        """
        Adiabatic convergence table per label, over the config's list of durations T

        :rtype: pandas.DataFrame
        """
        settings = self.config.get('sweep')
        if not isinstance(settings, dict) or 'T' not in settings:
            raise ConfigError('The sweep command needs a sweep block with a T list')
        if len(self.labels) == 0:
            logging.warning('No labels requested, skipping sweep')
            return pandas.DataFrame(columns=['label'] + evolve.SWEEP_COLUMNS)
        T_list = [float(T) for T in settings['T']]
        rel_tol = float(settings.get('rel_tol', 1e-8))
        k = lib.as_complex(settings.get('k', 1.))

        curve = self._closed_curve()
        monodromy = tracking.monodromy_of(tracking.track(self.family, curve, self.samples))
        frames = list()
        for label in self.labels:
            lifted = tracking.lift_closed(curve, label, monodromy)
            frame = evolve.sweep(self.family, lifted, label, T_list, rel_tol=rel_tol, k=k,
                                 n_samples=self.samples * monodromy.periods[label], workers=self.workers)
            frame.insert(0, 'label', label + 1)
            frames.append(frame)
        result = pandas.concat(frames, ignore_index=True)
        reports.write_table(result, self.output_dir, 'sweep', self.output_format)
        return result

    def build_curve(self, spec):
        """
        Build a curve from its config block: a `kind`, the kind's parameters, and optionally `repeat` (traversal
        count), `orientation`, `period` and `name`

        :type spec: dict
        :rtype: curves.CurveSpec
        """
        if not isinstance(spec, dict) or 'kind' not in spec:
            raise ConfigError('Curve blocks need a kind, got: {}'.format(spec))
        kind = spec['kind']
        if kind not in self.curve_handlers:
            raise ConfigError('Unknown curve kind: {}. Available kinds: {}'.format(kind,
                                                                                  list(self.curve_handlers.keys())))
        try:
            curve = self.curve_handlers[kind](spec)
            repeat = spec.get('repeat', 1)
            if repeat != 1:
                curve = curve.repeated(repeat)
        except (InvalidCurve, KeyError, TypeError, ValueError) as error:
            raise ConfigError('Invalid curve block: {}. {}'.format(spec, error))
        logging.info('Built curve: {} of kind: {}'.format(curve.name, kind))
        return curve

    def _build_family(self):
        if ('family' in self.config) == ('polynomial' in self.config):
            raise ConfigError('Config needs exactly one of: family, polynomial')
        try:
            if 'family' in self.config:
                block = self.config['family']
                name = block.get('name') if isinstance(block, dict) else block
                params = (block.get('params', dict()) if isinstance(block, dict) else dict()) or dict()
                if name not in self.family_handlers:
                    raise ConfigError('Unknown family: {}. Available families: {}'.format(
                        name, list(self.family_handlers.keys())))
                return self.family_handlers[name](**params)

            block = self.config['polynomial']
            variables = block.get('variables', 'z')
            name = block.get('name', 'polynomial')
            if variables == 'z':
                return Polynomial(block['entries'], name=name)
            if variables == 'real':
                return MultivariatePolynomial(block['entries'], block['dim_params'], name=name)
            raise ConfigError('Polynomial variables must be z or real, got: {}'.format(variables))
        except ConfigError:
            raise
        except (InvalidParams, KeyError, TypeError, ValueError) as error:
            raise ConfigError('Invalid family block. {}'.format(error))

    def _orientation(self, spec):
        orientation = str(spec.get('orientation', curves.POSITIVE)).capitalize()
        if orientation not in (curves.POSITIVE, curves.NEGATIVE):
            raise ConfigError('Orientation must be positive or negative, got: {}'.format(spec['orientation']))
        return orientation

    def _center(self, spec):
        return spec.get('center', numpy.zeros(self.family.dim_params))

    def _circle(self, spec):
        return curves.circle(self._center(spec), float(spec['radius']), axes=spec.get('axes'),
                             orientation=self._orientation(spec), period=float(spec.get('period', 1.)),
                             start_angle=float(spec.get('start_angle', 0.)), name=spec.get('name', 'circle'))

    def _ellipse(self, spec):
        return curves.ellipse(self._center(spec), spec['radii'], axes=spec.get('axes'),
                              orientation=self._orientation(spec), period=float(spec.get('period', 1.)),
                              start_angle=float(spec.get('start_angle', 0.)), name=spec.get('name', 'ellipse'))

    def _perturbed_circle(self, spec):
        return curves.perturbed_circle(self._center(spec), float(spec['radius']), spec['coefficients'],
                                       axes=spec.get('axes'), orientation=self._orientation(spec),
                                       period=float(spec.get('period', 1.)),
                                       name=spec.get('name', 'perturbed_circle'))

    def _polyline(self, spec):
        return curves.polyline(spec['points'], closed=bool(spec.get('closed', False)),
                               period=float(spec.get('period', 1.)), name=spec.get('name', 'polyline'))

    def _parametric_polynomial(self, spec):
        return curves.parametric_polynomial(spec['coefficients'], closed=spec.get('closed'),
                                            period=float(spec.get('period', 1.)),
                                            name=spec.get('name', 'parametric_polynomial'))

    def _concatenation(self, spec):
        parts = [self.build_curve(part) for part in spec['parts']]
        if len(parts) < 2:
            raise ConfigError('Concatenations need at least two parts')
        return functools.reduce(lambda first, second: curves.concatenate(first, second), parts)

    def _lifted_phase(self, curve, base, monodromy, label):
        lifted = tracking.lift_closed(curve, label, monodromy)
        path = base
        if lifted is not curve:
            path = tracking.track(self.family, lifted, self.samples * monodromy.periods[label])
        return phase.geometric_phase(path, label), path

    def _gauge_self_test(self, path, label, result):
        """
        Recompute the holonomy under random per sample gauges, and log the largest relative change
        """
        if self.gauge_trials <= 0:
            return None
        random_state = check_random_state(self.seed)
        shape = (len(path.frames), path.dim)
        worst = 0.
        for _ in range(self.gauge_trials):
            rescalings = random_state.uniform(0.5, 2., shape) * numpy.exp(
                1j * random_state.uniform(-numpy.pi, numpy.pi, shape))
            perturbed = phase.geometric_phase(phase.gauge_perturb(path, rescalings), label)
            worst = max(worst, abs(perturbed.holonomy_factor - result.holonomy_factor) / abs(result.holonomy_factor))
        if worst > GAUGE_SELF_TEST_TOL:
            logging.warning('Gauge self test for label: {} changed the holonomy by: {}'.format(label + 1, worst))
        else:
            logging.info('Gauge self test for label: {} passed, {} trials, worst change: {}'.format(
                label + 1, self.gauge_trials, worst))
        return worst

    @staticmethod
    def _disagreement(values, methods):
        if len(methods) < 2:
            return [0.] * len(values[methods[0]])
        return [0. if first is None or second is None else abs(first - second)
                for first, second in zip(values[methods[0]], values[methods[1]])]

    def _grid_axis(self, grid, key):
        try:
            start, stop, count = grid[key]
            return numpy.linspace(float(start), float(stop), int(count))
        except (KeyError, TypeError, ValueError):
            raise ConfigError('Grid axis: {} must be [start, stop, count], got: {}'.format(key, grid.get(key)))

    def _grid_axes(self, grid, dim):
        try:
            return curves._plane_axes(dim, grid.get('axes'))
        except InvalidCurve as error:
            raise ConfigError('Invalid grid axes. {}'.format(error))

    def _loops(self):
        loops = self.loops if len(self.loops) > 0 else [self.curve]
        if loops[0] is None:
            raise ConfigError('Config needs a curve or a list of loops')
        return loops

    def _closed_curve(self):
        if self.curve is None:
            raise ConfigError('Config needs a curve')
        if not self.curve.closed:
            raise ConfigError('Curve: {} must be closed'.format(self.curve.name))
        return self.curve

    def _parse_labels(self, labels):
        if labels == 'all':
            return list(range(self.family.dim))
        if not isinstance(labels, list):
            raise ConfigError('Labels must be a list of 1-based indices, or all, got: {}'.format(labels))
        try:
            zero_based = [int(label) - 1 for label in labels]
            lib.check_labels_are_valid(zero_based, self.family.dim)
        except (TypeError, ValueError) as error:
            raise ConfigError('Invalid labels: {}. {}'.format(labels, error))
        return zero_based

    def _check_config_keys(self):
        unknown = set(self.config.keys()) - CONFIG_KEYS
        if len(unknown) > 0:
            raise ConfigError('Unknown config keys: {}. Known keys: {}'.format(sorted(unknown), sorted(CONFIG_KEYS)))
        return True

    def _check_commands(self, commands):
        for command in commands:
            if command not in self.command_handlers:
                raise ConfigError('Unknown command: {}. Available commands: {}'.format(command, COMMANDS))
        return True

    def _valid_configurations_check(self):
        """
        Check the parsed settings, raising ConfigError on the first problem

        :return: True, if the configuration is valid
        :rtype: bool
        """
        if not isinstance(self.samples, int) or self.samples < lib.MIN_SAMPLES:
            raise ConfigError('samples must be an integer >= {}, got: {}'.format(lib.MIN_SAMPLES, self.samples))
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError('workers must be a positive integer, got: {}'.format(self.workers))
        if self.output_format not in reports.FORMATS:
            raise ConfigError('Unknown output format: {}. Choose from: {}'.format(self.output_format,
                                                                                 reports.FORMATS))
        if not isinstance(self.gauge_trials, int) or self.gauge_trials < 0:
            raise ConfigError('self_test.gauge_trials must be a non negative integer, got: {}'.format(
                self.gauge_trials))
        if not isinstance(self.commands, list):
            raise ConfigError('commands must be a list, got: {}'.format(self.commands))
        self._check_commands(self.commands)
        for curve in [self.curve] + self.loops:
            if curve is not None and curve.dim_params != self.family.dim_params:
                raise ConfigError('Curve: {} has {} coordinates, but family: {} takes {}'.format(
                    curve.name, curve.dim_params, self.family.name, self.family.dim_params))
        return True
