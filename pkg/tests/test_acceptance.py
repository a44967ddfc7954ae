"""Exit criteria for the build, one test per criterion.

Synthetic-data criteria use the default seed (1) for both the generator and
the fold partitions, a single run of 10-fold CV, 1000 instances.
"""

import math
import time
import warnings
from functools import lru_cache

import numpy as np

from conftest import record
from lwnb.bayes import fit_weighted_nb
from lwnb.classifiers import ClassifierConfig
from lwnb.cli import main, manifest_path
from lwnb.dataset import AttributeSpec, Dataset, DatasetSchema, stratified_folds
from lwnb.evaluation import corrected_resampled_ttest, cross_validate
from lwnb.generators import gen_checkers, gen_two_spheres
from lwnb.neighbors import NeighborSet, k_nearest
from lwnb.preprocess import mdl_cut_points
from lwnb.weighting import compute_weights, rescale_weights

from oracles import brute_force_neighbors, corrected_t, exhaustive_mdl_cuts, unweighted_nb
from test_bayes import random_dataset
from test_classifiers import check_trace

SEED = 1
ALL = 10**6  # clamped to the training-fold size


@lru_cache(maxsize=None)
def data(kind):
    return gen_two_spheres(500, SEED) if kind == "spheres" else gen_checkers(1000, SEED)


@lru_cache(maxsize=None)
def accuracy(kind, spec):
    """Percent correct, one run of stratified 10-fold CV."""
    cfg = ClassifierConfig.parse(spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return 100 * float(cross_validate(data(kind), cfg, runs=1, folds=10, seed=SEED).mean())


def gate(criterion, ok, detail):
    record(criterion, bool(ok), detail)
    assert ok, detail


def test_c1_spheres_nb():
    start = time.perf_counter()
    d = gen_two_spheres(500, SEED)
    acc = 100 * float(cross_validate(d, ClassifierConfig("nb"), runs=1, folds=10, seed=SEED).mean())
    elapsed = time.perf_counter() - start
    gate("C1 two-spheres NB = 97.9 +/- 2.0, < 10 s", abs(acc - 97.9) <= 2.0 and elapsed < 10,
         f"{acc:.2f}% in {elapsed:.2f} s")


def test_c2_spheres_lwnb_all():
    acc = accuracy("spheres", f"lwnb/k={ALL}")
    gate("C2 two-spheres LWNB k=n = 95.9 +/- 2.5", abs(acc - 95.9) <= 2.5, f"{acc:.2f}%")


def test_c3_checkers_nb():
    acc = accuracy("checkers", "nb")
    gate("C3 checkers NB = 50 +/- 4", abs(acc - 50) <= 4, f"{acc:.2f}%")


def test_c4_checkers_lwnb_degrades_to_nb():
    k5, k150, nb = accuracy("checkers", "lwnb/k=5"), accuracy("checkers", "lwnb/k=150"), accuracy("checkers", "nb")
    gate("C4 checkers LWNB k5 - k150 >= 30, |k150 - NB| <= 5", k5 - k150 >= 30 and abs(k150 - nb) <= 5,
         f"k=5 {k5:.2f}%, k=150 {k150:.2f}%, NB {nb:.2f}%")


def test_c5_checkers_knn_collapse():
    k5, k60 = accuracy("checkers", "knn/k=5"), accuracy("checkers", "knn/k=60")
    gate("C5 checkers kNN k60 <= k5 - 25", k60 <= k5 - 25, f"k=5 {k5:.2f}%, k=60 {k60:.2f}%")


def test_c6_spheres_sweep():
    ks = range(20, 201, 20)
    lw5, lw40 = accuracy("spheres", "lwnb/k=5"), accuracy("spheres", "lwnb/k=40")
    lw_worst = min(accuracy("spheres", f"lwnb/k={k}") for k in ks)
    knn_worst = min(accuracy("spheres", f"knn/k={k}") for k in ks)
    gate("C6 two-spheres LWNB k40 >= k5, worst LWNB > worst kNN over k=20..200",
         lw40 >= lw5 and lw_worst > knn_worst,
         f"k=5 {lw5:.2f}%, k=40 {lw40:.2f}%, worst LWNB {lw_worst:.2f}%, worst kNN {knn_worst:.2f}%")


def test_c7_unit_weight_oracle():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        d, kinds, cards, o = random_dataset(rng)
        m = fit_weighted_nb(d, np.ones(len(d)))
        priors, tables, gauss = unweighted_nb(d.X.tolist(), d.y.tolist(), kinds, cards, o)
        worst = max(worst, np.abs(m.priors - priors).max())
        for j in range(len(kinds)):
            if tables[j] is not None:
                worst = max(worst, np.abs(m.tables[j] - np.array(tables[j])).max())
            elif gauss[j] is not None:
                for c, (mu, sd) in enumerate(gauss[j]):
                    worst = max(worst, abs(m.gaussians[j][0][c] - mu), abs(m.gaussians[j][1][c] - sd))
            else:
                assert m.gaussians[j] is None
    gate("C7 unit weights == unweighted Laplace NB on 50 datasets, 1e-12", worst <= 1e-12,
         f"max deviation {worst:.2e}")


def test_c8_hand_trace():
    # check_trace asserts every intermediate quantity at 1e-12
    check_trace(3)
    gate("C8 six-point k=3 hand trace, 1e-12", True, "distances, weights, priors, conditionals, posterior match")


def _invariants():
    rng = np.random.default_rng(99)
    results = {}

    ok = True
    for _ in range(50):
        d, *_ = random_dataset(rng)
        w = rng.random(len(d)) + 1e-3
        m = fit_weighted_nb(d, w)
        P = m.posterior(d.X)
        ok &= np.allclose(P.sum(axis=1), 1, atol=1e-12) and (P > 0).all()
        ok &= abs(m.priors.sum() - 1) <= 1e-9
        ok &= all(np.allclose(t.sum(axis=1), 1, atol=1e-9) for t in m.tables if t is not None)
    results["posterior and conditional rows normalized"] = ok

    ok_sum, ok_mono = True, True
    for _ in range(200):
        d = np.sort(rng.random(int(rng.integers(1, 60))) * rng.choice([1e-3, 1, 1e3]))
        nbrs = NeighborSet(np.arange(d.size), d)
        raw = compute_weights(nbrs)
        ok_mono &= bool((np.diff(raw) <= 0).all())
        ok_sum &= abs(rescale_weights(raw, d.size).sum() - d.size) <= 1e-9
    results["rescaled weights sum to r"] = ok_sum
    results["weights monotone in distance"] = ok_mono

    ok = True
    for _ in range(200):
        n = int(rng.integers(1, 201))
        train = rng.integers(0, 5, size=(n, 3)) / 4.0
        q = rng.integers(0, 5, size=3) / 4.0
        k = int(rng.integers(1, n + 1))
        dists = [math.sqrt(sum((a - b) ** 2 for a, b in zip(row, q))) for row in train.tolist()]
        ok &= k_nearest(train, q, k).indices.tolist() == brute_force_neighbors(dists, k)[0]
    results["k_nearest == brute force (200 instances)"] = ok

    ok = True
    for _ in range(50):
        n = int(rng.integers(2, 21))
        v = rng.integers(0, 8, n).astype(float)
        y = rng.integers(0, int(rng.integers(2, 4)), n)
        ok &= mdl_cut_points(v, y, 3) == exhaustive_mdl_cuts(v.tolist(), y.tolist())
    results["discretizer == exhaustive oracle (50 datasets)"] = ok

    ok = True
    for _ in range(50):
        a = rng.random(100)
        b = np.clip(a + rng.normal(0, 0.05, 100), 0, 1)
        ok &= abs(corrected_resampled_ttest(a, b).t - corrected_t(a.tolist(), b.tolist(), 0.9)) <= 1e-10
    results["t statistic == formula oracle, 1e-10"] = ok

    ok = True
    schema = DatasetSchema((AttributeSpec.numeric("x"), AttributeSpec.nominal("c", ["a", "b", "c"])), 1)
    for _ in range(50):
        n = int(rng.integers(3, 80))
        d = Dataset(schema, np.zeros((n, 1)), rng.integers(0, 3, n))
        folds = int(rng.integers(2, min(n, 10) + 1))
        for c in range(3):
            counts = [int((d.y[t] == c).sum()) for _, t in stratified_folds(d, folds, int(rng.integers(1 << 30)))]
            ok &= max(counts) - min(counts) <= 1
    results["stratification balance <= 1"] = ok
    return results


def test_c9_invariant_suite():
    res = _invariants()
    failed = [name for name, ok in res.items() if not ok]
    gate("C9 invariant suite", not failed, "all hold: " + "; ".join(res) if not failed else f"failed: {failed}")


def test_c10_cli_determinism(tmp_path):
    sp, ch = tmp_path / "spheres.csv", tmp_path / "checkers.csv"
    commands = [
        ["generate", "--kind", "two_spheres", "--n", "1000", "--seed", "1", "--out", str(sp)],
        ["generate", "--kind", "checkers", "--n", "1000", "--seed", "1", "--out", str(ch)],
        ["evaluate", "--data", str(sp), "--clf", "nb", "--runs", "10", "--folds", "10",
         "--out", str(tmp_path / "eval.tsv")],
        ["compare", "--data", str(ch), "--baseline", "nb", "--challenger", "lwnb/k=50", "--runs", "2",
         "--out", str(tmp_path / "cmp.tsv")],
        ["sweep-k", "--data", str(ch), "--clf", "lwnb", "knn", "knn_dw", "--k", "5", "60", "150",
         "--out", str(tmp_path / "sweep.txt")],
    ]
    mismatched = []
    for argv in commands:
        out = tmp_path / argv[argv.index("--out") + 1]
        snaps = []
        for _ in range(2):
            assert main(argv) == 0
            snaps.append((out.read_bytes(), manifest_path(out).read_bytes()))
        if snaps[0] != snaps[1]:
            mismatched.append(argv[0])
    cmp_rows = (tmp_path / "cmp.tsv").read_text().splitlines()
    gate("C10 CLI re-runs byte-identical", not mismatched,
         f"{len(commands)} commands identical; compare verdict lwnb/k=50 vs nb: {cmp_rows[1].split()[-1]}"
         if not mismatched else f"differ: {mismatched}")
