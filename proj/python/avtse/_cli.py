import os
import sys

from avtse import cli_path


def main():
    path = cli_path()
    if path is None:
        sys.stderr.write("avtse: bundled binary not found (source install?)\n")
        return 1
    os.execv(path, [path] + sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
