"""Build the extension with cargo, import it and check a few known values.

Usage: python3 python/smoke_test.py
Set BH_LAB_SKIP_BUILD=1 to reuse an existing build.
"""

import math
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_module(dest):
    if not os.environ.get("BH_LAB_SKIP_BUILD"):
        subprocess.run(
            ["cargo", "build", "-p", "bh-lab-python", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
    target = Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target")) / "debug"
    for name in ("libbh_lab_py.so", "libbh_lab_py.dylib", "bh_lab_py.dll"):
        lib = target / name
        if lib.exists():
            suffix = ".pyd" if name.endswith(".dll") else ".so"
            shutil.copy(lib, Path(dest) / ("bh_lab" + suffix))
            return
    sys.exit("built library not found in " + str(target))


def main():
    with tempfile.TemporaryDirectory() as tmp:
        build_module(tmp)
        sys.path.insert(0, tmp)
        import bh_lab

        assert bh_lab.multi_index_count(3, 2) == 6
        assert bh_lab.squarefree_count(3, 2) == 3
        assert bh_lab.excess_count(3, 2) == 3
        assert bh_lab.falling_factorial(3, 2) == 6
        assert bh_lab.enumerate_multi_indices(2, 2) == [[2, 0], [1, 1], [0, 2]]
        assert bh_lab.unrank(bh_lab.rank([1, 0, 1]), 3, 2) == [1, 0, 1]
        assert bh_lab.critical_exponent(2) == 4 / 3

        # z1 * z2 has sup 1 on the torus and form entry 1/2 off the diagonal.
        p = bh_lab.Polynomial(2, 2, [0, 1, 0])
        assert abs(p.sup_norm_estimate().lower_bound - 1.0) < 1e-9
        assert p.form_entry([0, 1]) == 0.5
        grid = p.grid_oracle(64)
        assert grid.lower_bound <= 1.0 + 1e-12 <= grid.upper_bound + 1e-12

        r = bh_lab.Polynomial.random_signs(4, 2, 7)
        assert bh_lab.Polynomial.from_json(r.to_json()).coefficients == r.coefficients
        est = r.sup_norm_estimate(seed=1)
        assert math.sqrt(len(r)) - 1e-6 <= est.lower_bound <= len(r) + 1e-9

        rec = bh_lab.ksz_record(1, 2)
        assert abs(rec["constant_estimate"] - 1 / math.sqrt(math.log(2))) < 1e-9

        try:
            bh_lab.multi_index_count(40, 30)
        except OverflowError:
            pass
        else:
            raise AssertionError("expected OverflowError")

        print("python smoke test: ok")


if __name__ == "__main__":
    main()
