"""Regenerate the data files bundled under src/treegraft/data/.

iris is the classic Fisher measurement data (taken from scikit-learn's
copy at generation time).  The other five files are deterministic
synthetic reconstructions: they reproduce the published schema, size,
class balance and missing-value rate of the familiar UCI datasets, with
values drawn from per-class clusters in the continuous attributes, but
they do not redistribute the original records.

Run from the repository root:  python tools/make_bundled_data.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from treegraft.rng import Xoshiro256StarStar  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "src" / "treegraft" / "data"


def _round_to(value: float, decimals: int, lo: float, hi: float) -> float:
    value = max(lo, min(hi, value))
    return round(value, decimals) if decimals > 0 else float(round(value))


def _format(value: float, decimals: int) -> str:
    if decimals == 0:
        return str(int(value))
    return f"{value:.{decimals}f}"


class Cluster:
    def __init__(self, weight, centers, spreads):
        self.weight = weight
        self.centers = centers
        self.spreads = spreads


def synth_dataset(
    *,
    name: str,
    seed: int,
    class_names: list[str],
    class_counts: list[int],
    cont_attrs: list[tuple[str, int, float, float]],  # (name, decimals, lo, hi)
    disc_attrs: list[tuple[str, list[str]]],
    clusters: dict[str, list[Cluster]],
    disc_profiles: dict[str, list[list[float]]],  # class -> per-attr value probs
    missing_cells: int,
    attr_order: list[str],
) -> None:
    """Write name.names / name.data with exact class counts and missing cells."""
    rng = Xoshiro256StarStar(seed)
    cont_by_name = {a[0]: a for a in cont_attrs}
    disc_by_name = {a[0]: a for a in disc_attrs}

    rows = []
    for cls, count in zip(class_names, class_counts):
        cls_clusters = clusters[cls]
        weights = [c.weight for c in cls_clusters]
        total_w = sum(weights)
        for _ in range(count):
            u = rng.uniform() * total_w
            acc = 0.0
            chosen = cls_clusters[-1]
            for c in cls_clusters:
                acc += c.weight
                if u <= acc:
                    chosen = c
                    break
            values = {}
            for (aname, decimals, lo, hi), center, spread in zip(
                cont_attrs, chosen.centers, chosen.spreads
            ):
                values[aname] = _round_to(rng.normal(center, spread), decimals, lo, hi)
            for ai, (aname, avalues) in enumerate(disc_attrs):
                probs = disc_profiles[cls][ai]
                u2 = rng.uniform()
                acc2 = 0.0
                pick = avalues[-1]
                for v, p in zip(avalues, probs):
                    acc2 += p
                    if u2 <= acc2:
                        pick = v
                        break
                values[aname] = pick
            rows.append((values, cls))

    rng.shuffle(rows)

    # punch exact missing cells into input attributes
    n_attrs = len(attr_order)
    taken = set()
    while len(taken) < missing_cells:
        cell = rng.below(len(rows) * n_attrs)
        taken.add(cell)
    for cell in taken:
        row, col = divmod(cell, n_attrs)
        rows[row][0][attr_order[col]] = None

    names_lines = [",".join(class_names) + "."]
    for aname in attr_order:
        if aname in cont_by_name:
            names_lines.append(f"{aname}: continuous.")
        else:
            names_lines.append(f"{aname}: {','.join(disc_by_name[aname][1])}.")
    (OUT / f"{name}.names").write_text("\n".join(names_lines) + "\n", encoding="utf-8")

    data_lines = []
    for values, cls in rows:
        fields = []
        for aname in attr_order:
            v = values[aname]
            if v is None:
                fields.append("?")
            elif aname in cont_by_name:
                fields.append(_format(v, cont_by_name[aname][1]))
            else:
                fields.append(v)
        fields.append(cls)
        data_lines.append(",".join(fields))
    (OUT / f"{name}.data").write_text("\n".join(data_lines) + "\n", encoding="utf-8")
    print(f"wrote {name}: {len(rows)} rows")


def make_iris():
    from sklearn.datasets import load_iris

    bunch = load_iris()
    attr_names = ["sepal-length", "sepal-width", "petal-length", "petal-width"]
    class_names = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
    names_lines = [",".join(class_names) + "."]
    names_lines += [f"{a}: continuous." for a in attr_names]
    (OUT / "iris.names").write_text("\n".join(names_lines) + "\n", encoding="utf-8")
    lines = []
    for row, target in zip(bunch.data, bunch.target):
        fields = [f"{v:.1f}" for v in row] + [class_names[int(target)]]
        lines.append(",".join(fields))
    (OUT / "iris.data").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote iris: {len(lines)} rows")


def make_pima():
    # 768 objects, 8 continuous, neg 500 / pos 268 (65% most common)
    cont = [
        ("preg", 0, 0, 17),
        ("plas", 0, 40, 199),
        ("pres", 0, 20, 122),
        ("skin", 0, 0, 99),
        ("insu", 0, 0, 846),
        ("mass", 1, 15.0, 67.1),
        ("pedi", 3, 0.05, 2.5),
        ("age", 0, 21, 81),
    ]
    neg = [
        Cluster(0.6, [2, 105, 66, 22, 80, 29.0, 0.35, 26], [2.0, 18, 11, 9, 70, 5.5, 0.22, 5]),
        Cluster(0.4, [5, 122, 74, 28, 130, 33.5, 0.45, 41], [3.0, 20, 11, 10, 95, 6.0, 0.28, 9]),
    ]
    pos = [
        Cluster(0.55, [5, 148, 74, 30, 180, 35.5, 0.55, 37], [3.5, 24, 12, 10, 110, 6.5, 0.33, 9]),
        Cluster(0.45, [8, 168, 78, 33, 240, 38.0, 0.62, 47], [3.5, 20, 12, 10, 130, 6.5, 0.35, 10]),
    ]
    synth_dataset(
        name="pima_diabetes",
        seed=2001,
        class_names=["neg", "pos"],
        class_counts=[500, 268],
        cont_attrs=cont,
        disc_attrs=[],
        clusters={"neg": neg, "pos": pos},
        disc_profiles={"neg": [], "pos": []},
        missing_cells=0,
        attr_order=[a[0] for a in cont],
    )


def make_breast_cancer():
    # 699 objects, 9 integer-valued attributes on a 1..10 grid, 66% benign
    attrs = [
        "clump-thickness",
        "cell-size-uniformity",
        "cell-shape-uniformity",
        "marginal-adhesion",
        "epithelial-cell-size",
        "bare-nuclei",
        "bland-chromatin",
        "normal-nucleoli",
        "mitoses",
    ]
    cont = [(a, 0, 1, 10) for a in attrs]
    benign = [
        Cluster(1.0, [2.9, 1.3, 1.4, 1.4, 2.1, 1.3, 2.1, 1.3, 1.1], [1.6, 0.9, 1.0, 1.0, 0.9, 1.1, 1.1, 1.0, 0.5]),
    ]
    malignant = [
        Cluster(0.7, [7.2, 6.6, 6.5, 5.5, 5.3, 7.6, 5.9, 5.9, 2.5], [2.4, 2.7, 2.6, 3.2, 2.4, 3.0, 2.2, 3.3, 2.5]),
        Cluster(0.3, [5.2, 4.5, 4.6, 3.5, 4.0, 5.0, 4.2, 3.8, 1.5], [2.0, 2.0, 2.0, 2.2, 1.8, 2.8, 1.8, 2.5, 1.2]),
    ]
    synth_dataset(
        name="breast_cancer_wisconsin",
        seed=2002,
        class_names=["benign", "malignant"],
        class_counts=[462, 237],
        cont_attrs=cont,
        disc_attrs=[],
        clusters={"benign": benign, "malignant": malignant},
        disc_profiles={"benign": [], "malignant": []},
        missing_cells=16,
        attr_order=attrs,
    )


def make_glass():
    # 214 objects, 9 continuous, three classes 86/77/51 (40% most common)
    attrs = [
        ("RI", 4, 1.51, 1.54),
        ("Na", 2, 10.7, 17.4),
        ("Mg", 2, 0.0, 4.5),
        ("Al", 2, 0.3, 3.5),
        ("Si", 2, 69.8, 75.4),
        ("K", 2, 0.0, 6.2),
        ("Ca", 2, 5.4, 16.2),
        ("Ba", 2, 0.0, 3.2),
        ("Fe", 2, 0.0, 0.5),
    ]
    float_glass = [
        Cluster(1.0, [1.5185, 13.2, 3.5, 1.2, 72.6, 0.45, 8.6, 0.02, 0.06], [0.0025, 0.5, 0.35, 0.3, 0.6, 0.2, 0.6, 0.1, 0.09]),
    ]
    nonfloat = [
        Cluster(0.7, [1.5170, 13.1, 3.4, 1.4, 72.6, 0.55, 8.4, 0.05, 0.06], [0.0022, 0.65, 0.5, 0.3, 0.7, 0.25, 0.6, 0.15, 0.09]),
        Cluster(0.3, [1.5215, 12.9, 2.6, 1.2, 71.8, 0.45, 10.2, 0.05, 0.07], [0.0035, 0.6, 1.1, 0.35, 0.8, 0.25, 1.3, 0.15, 0.1]),
    ]
    other = [
        Cluster(0.55, [1.5175, 14.3, 1.1, 2.1, 72.8, 0.35, 8.8, 0.6, 0.03], [0.0030, 0.9, 1.3, 0.6, 0.9, 0.5, 1.1, 0.7, 0.05]),
        Cluster(0.45, [1.5160, 14.5, 2.3, 1.6, 73.0, 0.1, 8.5, 0.4, 0.02], [0.0025, 0.7, 1.4, 0.5, 0.8, 0.15, 0.8, 0.6, 0.04]),
    ]
    synth_dataset(
        name="glass_type",
        seed=2003,
        class_names=["float", "nonfloat", "other"],
        class_counts=[86, 77, 51],
        cont_attrs=attrs,
        disc_attrs=[],
        clusters={"float": float_glass, "nonfloat": nonfloat, "other": other},
        disc_profiles={"float": [], "nonfloat": [], "other": []},
        missing_cells=0,
        attr_order=[a[0] for a in attrs],
    )


def make_cleveland():
    # 303 objects, 13 attributes (6 continuous), healthy 164 / sick 139 (54%)
    cont = [
        ("age", 0, 29, 77),
        ("trestbps", 0, 94, 200),
        ("chol", 0, 126, 564),
        ("thalach", 0, 71, 202),
        ("oldpeak", 1, 0.0, 6.2),
        ("ca", 0, 0, 3),
    ]
    disc = [
        ("sex", ["female", "male"]),
        ("cp", ["typical", "atypical", "nonanginal", "asymptomatic"]),
        ("fbs", ["f", "t"]),
        ("restecg", ["normal", "stt", "hypertrophy"]),
        ("exang", ["no", "yes"]),
        ("slope", ["up", "flat", "down"]),
        ("thal", ["normal", "fixed", "reversable"]),
    ]
    healthy = [
        Cluster(0.6, [50, 128, 238, 162, 0.5, 0.25], [8.5, 15, 46, 17, 0.65, 0.55]),
        Cluster(0.4, [56, 132, 250, 150, 0.9, 0.5], [8.0, 17, 50, 18, 0.8, 0.75]),
    ]
    sick = [
        Cluster(0.6, [58, 136, 252, 136, 1.8, 1.3], [7.5, 18, 48, 20, 1.1, 1.0]),
        Cluster(0.4, [62, 142, 260, 126, 2.6, 1.8], [7.0, 19, 52, 20, 1.2, 1.0]),
    ]
    disc_profiles = {
        "healthy": [
            [0.45, 0.55],
            [0.12, 0.25, 0.42, 0.21],
            [0.86, 0.14],
            [0.55, 0.03, 0.42],
            [0.82, 0.18],
            [0.55, 0.37, 0.08],
            [0.75, 0.07, 0.18],
        ],
        "sick": [
            [0.17, 0.83],
            [0.05, 0.08, 0.17, 0.70],
            [0.84, 0.16],
            [0.44, 0.04, 0.52],
            [0.45, 0.55],
            [0.25, 0.64, 0.11],
            [0.30, 0.09, 0.61],
        ],
    }
    synth_dataset(
        name="cleveland_heart_disease",
        seed=2004,
        class_names=["healthy", "sick"],
        class_counts=[164, 139],
        cont_attrs=cont,
        disc_attrs=disc,
        clusters={"healthy": healthy, "sick": sick},
        disc_profiles=disc_profiles,
        missing_cells=6,
        attr_order=[
            "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
            "thalach", "exang", "oldpeak", "slope", "ca", "thal",
        ],
    )


def make_credit():
    # 690 objects, 15 attributes (6 continuous), plus 387 / minus 303 (56%)
    cont = [
        ("A2", 2, 13.75, 80.25),
        ("A3", 3, 0.0, 28.0),
        ("A8", 3, 0.0, 28.5),
        ("A11", 0, 0, 67),
        ("A14", 0, 0, 2000),
        ("A15", 0, 0, 100000),
    ]
    disc = [
        ("A1", ["a", "b"]),
        ("A4", ["u", "y", "l"]),
        ("A5", ["g", "p", "gg"]),
        ("A6", ["c", "d", "cc", "i", "j", "k", "m", "q", "w", "x", "e", "aa", "ff"]),
        ("A7", ["v", "h", "bb", "j", "n", "z", "dd", "ff", "o"]),
        ("A9", ["t", "f"]),
        ("A10", ["t", "f"]),
        ("A12", ["t", "f"]),
        ("A13", ["g", "p", "s"]),
    ]
    plus = [
        Cluster(0.6, [33.5, 5.8, 3.4, 5.2, 150, 2200], [11.0, 4.8, 3.3, 6.0, 160, 4800]),
        Cluster(0.4, [37.5, 6.8, 4.4, 7.2, 120, 5200], [11.5, 5.2, 3.9, 7.5, 150, 9500]),
    ]
    minus = [
        Cluster(0.7, [29.5, 3.6, 1.0, 0.7, 190, 140], [10.0, 3.8, 1.35, 1.4, 170, 450]),
        Cluster(0.3, [33.0, 4.8, 1.6, 1.8, 240, 520], [11.0, 4.4, 1.9, 2.6, 190, 1500]),
    ]
    uniform13 = [1.0 / 13.0] * 13
    disc_profiles = {
        "plus": [
            [0.30, 0.70],
            [0.72, 0.25, 0.03],
            [0.72, 0.25, 0.03],
            uniform13,
            [0.55, 0.18, 0.07, 0.04, 0.03, 0.02, 0.03, 0.05, 0.03],
            [0.91, 0.09],
            [0.68, 0.32],
            [0.47, 0.53],
            [0.92, 0.02, 0.06],
        ],
        "minus": [
            [0.32, 0.68],
            [0.79, 0.18, 0.03],
            [0.79, 0.18, 0.03],
            uniform13,
            [0.64, 0.12, 0.08, 0.05, 0.03, 0.02, 0.03, 0.01, 0.02],
            [0.22, 0.78],
            [0.32, 0.68],
            [0.45, 0.55],
            [0.89, 0.03, 0.08],
        ],
    }
    synth_dataset(
        name="credit_rating",
        seed=2005,
        class_names=["plus", "minus"],
        class_counts=[387, 303],
        cont_attrs=cont,
        disc_attrs=disc,
        clusters={"plus": plus, "minus": minus},
        disc_profiles=disc_profiles,
        missing_cells=100,
        attr_order=[
            "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8",
            "A9", "A10", "A11", "A12", "A13", "A14", "A15",
        ],
    )


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    make_iris()
    make_pima()
    make_breast_cancer()
    make_glass()
    make_cleveland()
    make_credit()


if __name__ == "__main__":
    main()
