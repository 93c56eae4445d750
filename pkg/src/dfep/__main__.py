"""Allow ``python -m dfep`` to behave exactly like the installed CLI."""

from dfep.harness.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
