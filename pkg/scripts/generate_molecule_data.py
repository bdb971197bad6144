"""Regenerate the bundled Hamiltonian files under data/molecules/.

Each file is an independent conditioned draw at coefficient scale 0.04 with
an exact analytic triplet in the two-electron sector.  Seeds derive from the
molecule name and bond distance, so reruns reproduce the files byte for byte.
"""

import argparse
from pathlib import Path

from qcbench.hamiltonian import random_molecular_hamiltonian, save, stable_cell_seed

MOLECULES = ("LiH", "NaH", "KH", "RbH")
DISTANCES = (0.5, 1.0, 1.5, 2.0, 2.5)
SCALE = 0.04


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "data" / "molecules",
    )
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for molecule in MOLECULES:
        for distance in DISTANCES:
            seed = stable_cell_seed("molecule-data", molecule, distance)
            h = random_molecular_hamiltonian(
                seed,
                triplet_split=True,
                scale=SCALE,
                molecule=molecule,
                bond_distance=distance,
            )
            path = args.out_dir / f"{molecule}_{distance:.2f}.json"
            save(h, path)
            print(path)


if __name__ == "__main__":
    main()
