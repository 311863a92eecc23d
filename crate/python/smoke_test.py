"""Quick check that the compiled `sector` module loads and answers sensibly."""

import json
import math

import sector


def main():
    assert sector.quotients("sqrt:2", 5) == [1, 2, 2, 2, 2]
    assert sector.convergents("sqrt:2", 4) == [(1, 1), (3, 2), (7, 5), (17, 12)]
    assert sector.quotients("e", 6) == [2, 1, 2, 1, 1, 4]

    theta, area, branch = sector.area("sqrt:2", "1.2")
    assert abs(float(theta) - 2 * math.pi) < 1e-12
    assert abs(float(area) - math.pi * 1.44) < 1e-12
    assert branch == -1

    lim = sector.limits("sqrt:2")
    assert lim["C"][0][1] == "1 + √2"
    assert lim["mu"][1] == "2"

    rows = sector.bounds("sqrt:3", 10)
    assert len(rows) == 11 * 4 and all(r["holds"] for r in rows)

    ext = sector.extrema("e", 12)
    assert len(ext) > 0 and float(ext[0]["M"]) > 0

    point, exact, cf, agree = sector.best_point("sqrt:2", "1.2")
    assert point == (0, 1) and not agree

    gaps = sector.discrepancy_scan("pi", "10", "30")
    assert [(g["r2_lo"], g["r2_hi"]) for g in gaps] == [("185", "281"), ("281", "397"), ("397", "533")]
    assert sector.discrepancy_scan("phi", "r2:5", "100") == []

    status, text = sector.run("limits", "sqrt:2", json=True)
    assert status == 0 and json.loads(text)["period"] == ["2"]

    for bad in ("sqrt:4", "nonsense"):
        try:
            sector.quotients(bad, 3)
        except sector.InputError:
            pass
        else:
            raise AssertionError(bad)
    assert issubclass(sector.PrecisionError, sector.SectorError)

    print("smoke test ok")


if __name__ == "__main__":
    main()
