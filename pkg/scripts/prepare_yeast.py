#!/usr/bin/env python3
"""Convert the Yeast.mat sparse adjacency into the bundled edge list.

The yeast protein interaction benchmark circulates as a MATLAB sparse matrix
('net') in link-prediction repositories. This script symmetrizes it, strips
the diagonal, and writes data/yeast.txt with 1-based node ids. The converted
file ships with the repository; re-running this only matters if you replace
the upstream .mat.

Requires scipy (not a package dependency).
"""
import argparse
from pathlib import Path

import scipy.io as sio
import scipy.sparse as sp


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("mat_file", help="path to Yeast.mat (variable 'net')")
    ap.add_argument("--out", default="data/yeast.txt")
    args = ap.parse_args()

    adj = sp.csr_matrix(sio.loadmat(args.mat_file)["net"])
    adj = ((adj + adj.T) > 0).astype(int)
    adj.setdiag(0)
    adj.eliminate_zeros()
    upper = sp.triu(adj).tocoo()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        fh.write("% yeast protein interaction network (link-prediction benchmark)\n")
        fh.write("% converted from the Yeast.mat sparse adjacency; 1-based node ids\n")
        for u, v in zip(upper.row, upper.col):
            fh.write(f"{u + 1} {v + 1}\n")
    print(f"wrote {out}: {adj.shape[0]} nodes, {upper.nnz} edges")


if __name__ == "__main__":
    main()
