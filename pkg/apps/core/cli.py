"""
``wsfl <subcommand>``: hyphenated subcommands dispatched to the management
commands of the apps that own them.

Exit codes: 0 success, 1 validation error or bad usage, 2 I/O error.
"""
import os
import sys

import django
from django.core.management import load_command_class
from django.core.management.base import CommandError, handle_default_options

COMMANDS = {
    'synth-gen': ('apps.datasets', 'synth_gen'),
    'ddt-boxes': ('apps.colocalization', 'ddt_boxes'),
    'make-masks': ('apps.masks', 'make_masks'),
    'train-head': ('apps.training', 'train_head'),
    'predict': ('apps.localization', 'predict'),
    'render-overlay': ('apps.localization', 'render_overlay'),
    'score-proposals': ('apps.detection', 'score_proposals'),
    'eval-wsol': ('apps.evaluation', 'eval_wsol'),
    'eval-map': ('apps.evaluation', 'eval_map'),
}

PROG = 'wsfl'


def usage_text():
    lines = [f'usage: {PROG} <subcommand> [options]', '', 'Subcommands:']
    lines.extend(f'    {name}' for name in COMMANDS)
    lines.append('')
    lines.append(f"Run '{PROG} <subcommand> --help' for the options of one subcommand.")
    return '\n'.join(lines) + '\n'


def setup():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    django.setup()


def cli_dispatch(argv, stdout=None, stderr=None) -> int:
    setup()
    stderr = stderr or sys.stderr
    argv = list(argv)

    if not argv or argv[0] in ('-h', '--help', 'help'):
        stderr.write(usage_text())
        return 0 if argv else 1

    name = argv[0]
    if name not in COMMANDS:
        stderr.write(f"Unknown subcommand '{name}'.\n")
        stderr.write(usage_text())
        return 1

    app_name, module = COMMANDS[name]
    command = load_command_class(app_name, module)
    parser = command.create_parser(PROG, name)
    try:
        options = parser.parse_args(argv[1:])
    except CommandError as exc:
        stderr.write(parser.format_usage())
        stderr.write(f'{exc}\n')
        return exc.returncode
    except SystemExit as exc:
        # --help
        return exc.code or 0

    handle_default_options(options)
    command_options = vars(options)
    args = command_options.pop('args', ())
    if stdout is not None:
        command_options['stdout'] = stdout
    command_options['stderr'] = stderr
    try:
        command.execute(*args, **command_options)
    except CommandError as exc:
        stderr.write(f'{name}: {exc}\n')
        return exc.returncode
    return 0


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))
