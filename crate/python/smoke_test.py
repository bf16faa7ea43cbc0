"""Smoke test for the pychidenn extension module.

Build and install the module first, for example with `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke_test.py` from the repository root.
"""

import math
import pathlib
import tempfile

import pychidenn as ch

ROOT = pathlib.Path(__file__).resolve().parent.parent


def check_mesh():
    plate = ch.Mesh.notched_plate()
    assert plate.element_count == 450, plate
    assert plate.dim == 2
    assert len(plate.node_set("notch_tip")) >= 1
    again = ch.Mesh.from_text(plate.to_text())
    assert again.node_count == plate.node_count
    assert plate.refine(2).element_count == 1800


def check_shape():
    grid = ch.Mesh.quad_grid(4, 4)
    cfg = ch.ConvolutionConfig.rbf(2, 2, 1.0)
    sample = ch.shape(grid, 5, [0.3, -0.2], cfg)
    assert abs(sum(sample["values"]) - 1.0) < 1e-10
    # linear reproduction: sum of N_K x_K equals the point
    nodes = grid.nodes
    for j in range(2):
        value = sum(n * nodes[k][j] for n, k in zip(sample["values"], sample["nodes"]))
        assert abs(value - sample["x"][j]) < 1e-10
    fe = ch.shape(grid, 5, [0.3, -0.2])
    assert len(fe["nodes"]) == 4


def check_material():
    mat = ch.NeoHookean.from_moduli(2.0, 6.0, 1.0)
    identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    assert abs(mat.strain_energy(identity)) < 1e-14
    assert all(abs(v) < 1e-14 for row in mat.pk1_stress(identity) for v in row)
    shear = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    assert mat.von_mises(shear) > 0.0
    assert math.isclose(mat.shear_modulus, 2.0)
    try:
        mat.pk1_stress([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    except RuntimeError:
        pass
    else:
        raise AssertionError("singular F accepted")


def check_run():
    config = ROOT / "scenarios" / "free_flight" / "free_flight.toml"
    with tempfile.TemporaryDirectory() as out:
        summary = ch.run_scenario(str(config), out)
        assert pathlib.Path(summary["csv"]).exists()
        assert summary["timings"]["per_step"] > 0.0


def check_suites():
    passed, report = ch.verify("fast")
    assert passed, report
    table = ch.convergence("bar1d", [4, 8, 16])
    (fem_errors, fem_rate), = [v for k, v in table.items() if k.startswith("fem")]
    assert fem_rate > 1.8 and all(e is not None for e in fem_errors)
    f_error, residual = ch.patch_test(ch.ConvolutionConfig.rbf(1, 2, 1.0))
    assert f_error < 1e-9 and residual < 1e-9


if __name__ == "__main__":
    for check in (check_mesh, check_shape, check_material, check_run, check_suites):
        check()
        print(f"ok {check.__name__}")
