"""Smoke test for the scengen_py extension module.

Build the module first, then run this script from the repository root:

    cargo build -p scengen-py --release --features extension-module
    python3 python/smoke_test.py
"""

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SO = ROOT / "target" / "release" / "libscengen_py.so"


def load_module():
    staging = Path(tempfile.mkdtemp(prefix="scengen_py_"))
    shutil.copy(SO, staging / "scengen_py.so")
    sys.path.insert(0, str(staging))
    import scengen_py

    return scengen_py


def main():
    if not SO.exists():
        sys.exit(f"{SO} not found, build scengen-py with --features extension-module first")
    sg = load_module()

    # Scenario construction and sampling.
    problem = sg.Problem("robot")
    s = problem.sample(seed=42)
    assert s.n_cols > 0
    assert len(s.rows) == 3
    assert problem.sample(seed=42).rows == s.rows, "sampling must be deterministic"

    # Evaluation and novelty.
    result = problem.evaluate(s)
    assert set(result) == {"fitness", "constraint_violation", "truncated"}
    assert problem.novelty(s, s) == 0.0

    # A short end-to-end search on each problem.
    config = sg.SearchConfig(pop_size=30, n_gen=15, test_suite_size=3, seed=7)
    for kind in ["robot", "lkas"]:
        p = sg.Problem(kind)
        run = sg.run_search(p, "nsga2", config)
        population = run.population()
        assert len(population) == 30, f"{kind}: population size {len(population)}"
        stats = run.stats()
        assert stats["seed"] == 7
        assert list(stats["convergence"]) == sorted(stats["convergence"])
        suite, diversity = run.test_suite(p, 3)
        assert len(suite) <= 3
        assert 0.0 <= diversity <= 1.0
        fitness_values = [fitness for _, fitness, _ in suite]
        assert fitness_values == sorted(fitness_values, reverse=True)
        svg = p.render_svg(suite[0][0])
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")

    # Determinism across bindings runs.
    again = sg.run_search(sg.Problem("robot"), "nsga2", config)
    assert again.stats()["convergence"] == sg.run_search(
        sg.Problem("robot"), "nsga2", config
    ).stats()["convergence"]

    # Comparison artifacts from two saved stats dirs.
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        import json

        for name in ["stats_a", "stats_b"]:
            (tmp / name).mkdir()
            for i in range(2):
                run = sg.run_search(sg.Problem("robot"), "random", config)
                stats = run.stats()
                stats["suite_fitness"] = [f for _, f, _ in run.test_suite(sg.Problem("robot"), 3)[0]]
                (tmp / name / f"stats_run_{i}.json").write_text(json.dumps(stats))
        artifacts = sg.compare([str(tmp / "stats_a"), str(tmp / "stats_b")], ["A", "B"], str(tmp / "out"))
        assert len(artifacts) == 6
        for artifact in artifacts:
            assert Path(artifact).exists(), artifact

    print("smoke test passed")


if __name__ == "__main__":
    main()
