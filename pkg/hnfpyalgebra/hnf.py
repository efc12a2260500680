import sys

from hnfpyalgebra import commands


def main():
    sys.exit(commands.run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
