"""Writes the synthetic scenario under data/synthetic/.

The tables are smooth closed-form curves, not real statistics: a Gompertz-
Makeham life table, a Gaussian fertility schedule peaking at age 29, a
Gaussian young-adult migration profile and an integer baseline population
whose totals are printed for reference.
"""

import math
import pathlib

AGES = 110
OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic"


def qx(sex, age):
    makeham, gompertz = (0.0006, 0.000045) if sex == "m" else (0.0004, 0.000025)
    hazard = makeham + gompertz * math.exp(0.095 * age)
    if age == 0:
        hazard += 0.005 if sex == "m" else 0.004
    return min(1.0 - math.exp(-hazard), 0.95)


def population(sex, age):
    base = 2.1e6 if sex == "m" else 2.0e6
    shape = math.exp(-((age / (72.0 if sex == "m" else 77.0)) ** 4))
    wave = 1.0 + 0.08 * math.sin(age / 9.0)
    return round(base * shape * wave)


def fertility(age):
    return 0.165 * math.exp(-(((age - 29.0) / 6.0) ** 2))


def migration(sex, age):
    peak = 6500.0 if sex == "m" else 6000.0
    return round(peak * math.exp(-(((age - 27.0) / 9.0) ** 2)) + 150.0 * math.exp(-age / 10.0), 1)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "population.csv", "w") as f:
        f.write("sex,age,count\n")
        for sex in "mf":
            for age in range(AGES):
                f.write(f"{sex},{age},{population(sex, age)}\n")
    with open(OUT / "life_table.csv", "w") as f:
        f.write("sex,age,qx\n")
        for sex in "mf":
            for age in range(AGES):
                f.write(f"{sex},{age},{qx(sex, age):.10f}\n")
    with open(OUT / "fertility.csv", "w") as f:
        f.write("age,rate\n")
        for age in range(14, 50):
            f.write(f"{age},{fertility(age):.10f}\n")
    with open(OUT / "migration.csv", "w") as f:
        f.write("sex,age,net_per_year\n")
        for sex in "mf":
            for age in range(AGES):
                f.write(f"{sex},{age},{migration(sex, age)}\n")
    for sex in "mf":
        print(sex, sum(population(sex, a) for a in range(AGES)))


if __name__ == "__main__":
    main()
