import shlex
import subprocess


def run_quiet(cmd):
    parts = shlex.split(cmd)
    result = subprocess.run(parts, capture_output=True, text=True)
    return result.returncode
