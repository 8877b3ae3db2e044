"""Entry point for ``python -m xclab``."""

from .cli import main

raise SystemExit(main())
