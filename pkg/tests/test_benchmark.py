import subprocess
import sys
from pathlib import Path

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernel.py"


def test_benchmark_backends_agree():
    r = subprocess.run([sys.executable, str(BENCH), "--repeat", "1", "--quick"],
                       capture_output=True, text=True, timeout=300)
    assert r.returncode == 0, r.stderr
    assert "MISMATCH" not in r.stdout
