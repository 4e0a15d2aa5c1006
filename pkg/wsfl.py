#!/usr/bin/env python
"""Weakly supervised foreground learning pipeline: ``python wsfl.py <subcommand>``."""
import os


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    from apps.core.cli import main as run
    run()


if __name__ == '__main__':
    main()
