"""Module entry point for running MomentRate as `python -m momentrate`."""

from momentrate.cli import app

if __name__ == "__main__":
    app()
