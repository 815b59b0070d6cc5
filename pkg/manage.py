#!/usr/bin/env python
"""plqeigen's command-line utility for solves, sweeps and limit checks."""
import os
import sys


def main():
    """Run a plqeigen command."""
    # Explicitly use development settings by default
    # Override in production with: PLQEIGEN_SETTINGS_MODULE=config.settings.production
    os.environ.setdefault('PLQEIGEN_SETTINGS_MODULE', 'config.settings.development')
    from apps.cli.management import main as run_command

    return run_command(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
