from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from deviant_learning.benchmark import BenchmarkOptions, parse_extents, run_experiment1, run_experiment2
from deviant_learning.exceptions import DatasetError, DeviantLearningError

USAGE_ERROR = 2
ALGORITHM_ERROR = 1


class Command(BaseCommand):
    help = 'Run the deviant learning benchmark (experiment 1: MAPCA table, experiment 2: learning-extent sweep)'
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--experiment', type=int, choices=[1, 2], default=1, help='Experiment to run')
        parser.add_argument('--dataset', action='append', dest='datasets',
                            help='iris, heart, wordsim or a CSV path (repeatable)')
        parser.add_argument('--algo', choices=['dla', 'htm', 'both'], default='both', help='Algorithm(s) for experiment 1')
        parser.add_argument('--config', type=str, help='key = value configuration file')
        parser.add_argument('--seed', type=int, help='Override the configured seed')
        parser.add_argument('--extents', type=str, default='50,100,150,200,250',
                            help='Comma-separated learning extents for experiment 2')
        parser.add_argument('--out', type=str, help='Output directory (defaults to DLA_OUTPUT_DIR)')
        parser.add_argument('--exclude-label', action='store_true', help='Drop the class column before learning')
        parser.add_argument('--shuffle', action='store_true', help='Shuffle exemplars with the configured seed')

    def handle(self, *args, **options):
        if not options['datasets']:
            raise CommandError('Please specify at least one --dataset', returncode=USAGE_ERROR)
        if options['experiment'] == 2 and len(options['datasets']) != 1:
            raise CommandError('Experiment 2 takes exactly one --dataset', returncode=USAGE_ERROR)
        if options['config'] and not Path(options['config']).is_file():
            raise CommandError(f"Config file not found: {options['config']}", returncode=USAGE_ERROR)
        try:
            extents = parse_extents(options['extents'])
        except DeviantLearningError as e:
            raise CommandError(str(e), returncode=USAGE_ERROR)

        benchmark_options = BenchmarkOptions(
            datasets=options['datasets'],
            algo=options['algo'],
            config_path=Path(options['config']) if options['config'] else None,
            seed=options['seed'],
            extents=extents,
            out_dir=Path(options['out']) if options['out'] else None,
            exclude_label=options['exclude_label'],
            shuffle=options['shuffle'],
        )

        try:
            if options['experiment'] == 1:
                result = run_experiment1(benchmark_options)
            else:
                result = run_experiment2(benchmark_options)
        except ValidationError as e:
            raise CommandError(f"Invalid configuration: {self.format_validation_error(e)}", returncode=USAGE_ERROR)
        except DatasetError as e:
            raise CommandError(f"Dataset error: {e}", returncode=USAGE_ERROR)
        except OSError as e:
            raise CommandError(f"I/O error: {e}", returncode=USAGE_ERROR)
        except DeviantLearningError as e:
            raise CommandError(f"Algorithm error: {e}", returncode=ALGORITHM_ERROR)

        for report in result.reports:
            self.stdout.write(report)
        if result.comparison:
            self.stdout.write("\n📊 Measured vs published MAPCA (%)")
            self.stdout.write("=" * 44)
            self.stdout.write(result.comparison)
        for path in result.files:
            self.stdout.write(f"  wrote {path}")
        self.stdout.write(self.style.SUCCESS(
            f"✅ Experiment {options['experiment']} finished: {len(result.files)} files in {result.output_dir}"
        ))

    def format_validation_error(self, error):
        if hasattr(error, 'message_dict'):
            return '; '.join(f"{field}: {', '.join(messages)}" for field, messages in sorted(error.message_dict.items()))
        return '; '.join(error.messages)
