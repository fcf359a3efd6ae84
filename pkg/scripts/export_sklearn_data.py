"""Write the wine and breast-cancer datasets bundled with scikit-learn as
dataset CSVs (plus descriptors) into a data directory.

    python3 scripts/export_sklearn_data.py [--out data]

divorce, flags and emotions are not bundled anywhere installable; download
them and convert with ``fuzzylabel convert-arff`` (or write a CSV with
``fuzzylabel.save_csv``) into the same directory.
"""
import argparse

import numpy as np
from sklearn import datasets

from fuzzylabel.dataset import Dataset, save_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data")
    args = ap.parse_args(argv)
    for name, loader in (("wine", datasets.load_wine), ("breast_cancer", datasets.load_breast_cancer)):
        bunch = loader()
        classes = [str(c) for c in bunch.target_names]
        ds = Dataset(bunch.data, np.eye(len(classes))[bunch.target], "single", name=name,
                     label_names=tuple(classes))
        print(f"wrote {save_csv(ds, f'{args.out}/{name}.csv')}")


if __name__ == "__main__":
    main()
