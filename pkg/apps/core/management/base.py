"""
Base class for the WSFL management commands.

Every command accepts ``--seed``, ``--config`` and ``--threads``. Option values
resolve as: explicit flag, then the key=value config file, then the project
settings, then the built-in default.
"""
import logging

from decouple import Config, RepositoryEnv
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.core.exceptions import InvalidInputError, WsflError

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 1
EXIT_IO = 2


class WsflCommand(BaseCommand):
    requires_system_checks = []
    requires_migrations_checks = False

    # not recorded in report config blocks
    unrecorded_settings = ('threads',)

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=None, help='Random seed')
        parser.add_argument('--config', dest='config_file', default=None,
                            help='key=value file with option defaults')
        parser.add_argument('--threads', type=int, default=None,
                            help='Parallel width for per-image work (default 1)')

    def handle(self, *args, **options):
        self.options = options
        self.resolved = {}
        try:
            self.file_config = self._load_config(options.get('config_file'))
            self.run(**options)
        except WsflError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except OSError as exc:
            raise CommandError(f'I/O error: {exc}', returncode=EXIT_IO) from exc

    def run(self, **options):
        raise NotImplementedError('subclasses of WsflCommand must provide a run() method')

    def _load_config(self, path):
        if not path:
            return None
        logger.debug('Reading option defaults from %s', path)
        return Config(RepositoryEnv(path))

    def setting(self, name, default=None, cast=None):
        """Resolve one option and remember it for the provenance record."""
        value = self.options.get(name)
        if value is None and self.file_config is not None:
            value = self.file_config(name, default=None)
            if value is not None and cast is not None:
                try:
                    value = cast(value)
                except ValueError as exc:
                    raise InvalidInputError(f'config key {name}: {exc}') from exc
        if value is None:
            value = default
        if name not in self.unrecorded_settings:
            self.resolved[name] = value
        return value

    @property
    def seed(self):
        return self.setting('seed', settings.WSFL['SEED'], int)

    @property
    def threads(self):
        threads = self.setting('threads', settings.WSFL['THREADS'], int)
        if threads < 1:
            raise InvalidInputError(f'--threads must be >= 1, got {threads}')
        return threads

    def raw_setting(self, name):
        """Unvalidated value from flags or config file, for form-based validation."""
        value = self.options.get(name)
        if value is None and self.file_config is not None:
            value = self.file_config(name, default=None)
        return value
