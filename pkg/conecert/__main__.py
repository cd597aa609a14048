"""Run the command line interface with `python -m conecert`."""
from conecert.cli import entry_point


if __name__ == '__main__':
    entry_point()
