"""
Entry point: python run.py <command> [options]
"""
import sys

from app.cli import cli_main

if __name__ == "__main__":
    raise SystemExit(cli_main(sys.argv[1:]))
