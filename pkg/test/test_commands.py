import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

import xarray
from sympy import Rational

from hnfpyalgebra import commands, errors, hnf, ioutils
from hnfpyalgebra.dsl import parse_fn

TEST_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(TEST_DIR, "data")
GOLDEN_DIR = os.path.join(DATA_DIR, "golden")
CONFIG_DIR = os.path.join(os.path.dirname(TEST_DIR), "config")


def data(name: str) -> str:
    return os.path.join(DATA_DIR, name)


def run(*argv) -> tuple:
    out, err = io.StringIO(), io.StringIO()
    code = commands.run_command(list(argv), stream=out, err_stream=err)
    return code, out.getvalue(), err.getvalue()


GOLDEN_CASES = [
    ("mul_sign_sign", ["mul", data("sign.fn"), data("sign.fn")]),
    ("eval_sign", ["eval", data("sign.fn"), "0", "1/2"]),
    ("rho_zero_one_eps", ["rho", data("zero.fn"), data("one.fn"), "--eps", "1/2"]),
    ("classify_sign", ["classify", data("sign.fn")]),
    ("sets_reciprocal_eps", ["sets", data("reciprocal.fn"), "--eps", "1"]),
    ("interpose_bounds", ["interpose", data("lower_bound.fn"), data("upper_bound.fn")]),
    ("limit_sequence", ["limit", data("sequence"), "--moduli", "1/2,1/4"]),
    ("rephom_x_abs", ["rephom", data("x.fn"), data("abs.fn")]),
    ("inv_reciprocal", ["inv", data("reciprocal.fn")]),
    ("quotient_sign", ["quotient", data("sign.fn")]),
    ("sup_x_zero", ["sup", data("x.fn"), data("zero.fn")]),
    ("restrict_sign", ["restrict", data("sign.fn"), "-1", "0", "0", "1"]),
]


class TestGoldenOutputs(unittest.TestCase):

    def test_golden_outputs(self):
        for name, argv in GOLDEN_CASES:
            with self.subTest(name=name):
                with open(os.path.join(GOLDEN_DIR, f"{name}.txt"), "r") as f:
                    expected = f.read()
                code, out, err = run(*argv)
                self.assertEqual(code, 0, err)
                self.assertEqual(out, expected)


class TestVerbs(unittest.TestCase):

    def test_rho_with_decimals(self):
        code, out, _ = run("rho", data("zero.fn"), data("one.fn"), "--tol", "1e-9", "--decimal", "1")
        self.assertEqual(code, 0)
        self.assertEqual(out, "rho in [0.5, 0.5]\n")

    def test_rho_of_unbounded_difference(self):
        code, out, _ = run("rho", data("zero.fn"), data("inverse_square.fn"))
        self.assertEqual(code, 0)
        self.assertEqual(out, "rho in [1, 1]\n")

    def test_linear_verbs(self):
        self.assertEqual(run("neg", data("x.fn"))[1], "piecewise on [-1,1] { -1: 1; (-1,1): -x; 1: -1 }\n")
        self.assertEqual(run("scale", "2", data("x.fn"))[1], "piecewise on [-1,1] { -1: -2; (-1,1): 2*x; 1: 2 }\n")
        self.assertEqual(run("sub", data("abs.fn"), data("abs.fn"))[1],
                         "piecewise on [-1,1] { -1: 0; (-1,1): 0; 1: 0 }\n")
        self.assertEqual(run("add", data("x.fn"), data("one.fn"))[1],
                         "piecewise on [-1,1] { -1: 0; (-1,1): x + 1; 1: 2 }\n")

    def test_comparisons(self):
        self.assertEqual(run("leq", data("x.fn"), data("abs.fn"))[1], "true\n")
        self.assertEqual(run("leq", data("x.fn"), data("abs.fn"), "--strict")[1], "false\n")
        self.assertEqual(run("equal", data("sign.fn"), data("sign.fn"))[1], "true\n")
        self.assertEqual(run("equal", data("sign.fn"), data("x.fn"))[1], "false\n")

    def test_inline_literals(self):
        code, out, _ = run("extend", "piecewise on [-1,1] { (-1,0): -1; (0,1): 1 }")
        self.assertEqual(code, 0)
        self.assertEqual(out, "piecewise on [-1,1] { -1: -1; (-1,0): -1; 0: [-1,1]; (0,1): 1; 1: 1 }\n")
        code, out, _ = run("canon", "piecewise on [-1,1] { (-1,0): x; (0,1): x }")
        self.assertEqual(out, "piecewise on [-1,1] { -1: -1; (-1,1): x; 1: 1 }\n")

    def test_envelopes(self):
        code, out, _ = run("envelopes", data("sequence"))
        self.assertEqual(code, 0)
        keys = [line.split(":")[0] for line in out.splitlines()]
        self.assertEqual(keys, ["phi_0", "phi_1", "phi_2", "psi_0", "psi_1", "psi_2"])

    def test_witness(self):
        code, out, _ = run("witness", data("sign.fn"), data("x.fn"))
        self.assertEqual(code, 0)
        w = parse_fn(out)
        self.assertEqual(w.domain, (-1, 1))
        self.assertTrue(w.is_h_continuous)

    def test_approx(self):
        code, out, _ = run("approx", data("small_jump.fn"), "2")
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[-1], "sandwich: true")

    def test_json(self):
        code, out, _ = run("mul", data("sign.fn"), data("sign.fn"), "--format", "json")
        self.assertEqual(code, 0)
        document = json.loads(out)
        self.assertEqual(document["verb"], "mul")
        result = document["results"]["result"]
        self.assertEqual(result["domain"], ["-1", "1"])
        self.assertEqual(result["breakpoints"], ["-1", "1"])
        self.assertEqual(result["values"], [["1", "1"], ["1", "1"]])
        self.assertEqual(result["segments"], [{"lo": "1", "hi": "1"}])
        code, out, _ = run("rho", data("zero.fn"), data("one.fn"), "--format", "json", "--eps", "3/4")
        document = json.loads(out)
        self.assertEqual(document["results"]["rho"]["lo"], "1/2")
        self.assertEqual(document["results"]["order_ball"]["rho_below_eps"], "true")
        self.assertTrue(document["results"]["order_ball"]["agree"])

    def test_non_function_report_falls_back_to_text(self):
        code, out, _ = run("rho", data("zero.fn"), data("one.fn"), "--format", "csv")
        self.assertEqual(code, 0)
        self.assertEqual(out, "rho in [1/2, 1/2]\n")

    def test_decimal_rho_report(self):
        code, out, err = run("rho", data("zero.fn"), data("one.fn"), "--tol", "1e-9", "--decimal", "1")
        self.assertEqual(code, 0, err)
        self.assertEqual(out, "rho in [0.5, 0.5]\n")
        code, out, _ = run("rho", data("zero.fn"), data("x.fn"), "--decimal", "2")
        self.assertEqual(out, "rho in [0.50, 0.50]\n")


class TestErrors(unittest.TestCase):

    def test_core_errors_exit_with_one(self):
        code, out, err = run("inv", data("pluspart.fn"))
        self.assertEqual(code, 1)
        self.assertEqual(out, "")
        self.assertEqual(err, "error: ZeroDivisor: Z(f) contains (-1,0)\n")
        code, _, err = run("eval", data("sign.fn"), "2")
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: OutOfDomain"))
        code, _, err = run("canon", data("interior_pole.fn"))
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: InteriorPole"))
        self.assertIn("(line 1, column 23)", err)
        code, _, err = run("limit", data("zero.fn"), data("one.fn"), "--moduli", "1/10")
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: ModulusViolated"))

    def test_usage_errors_exit_with_two(self):
        code, _, err = run("canon", data("syntax_error.fn"))
        self.assertEqual(code, 2)
        self.assertEqual(err, "error: ParseError: Expected ':', found '1' (line 1, column 41)\n")
        code, _, err = run("mul", data("sign.fn"))
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error: UsageError"))
        code, _, err = run("limit", data("sequence"))
        self.assertEqual(code, 2)
        code, _, err = run("restrict", data("sign.fn"), "0", "1", "1/2")
        self.assertEqual(code, 2)
        code, _, err = run("eval", data("sign.fn"), "0.1.2")
        self.assertEqual(code, 2)

    def test_malformed_scalars_exit_with_two(self):
        cases = [
            ["approx", data("small_jump.fn"), "two"],
            ["approx", data("small_jump.fn"), "0"],
            ["scale", "1/0", data("sign.fn")],
            ["rho", data("zero.fn"), data("one.fn"), "--eps", "half"],
            ["limit", data("sequence"), "--moduli", "1/2,x"],
            ["limit", data("sequence"), "--moduli", "1/4,1/2"],
            ["limit", data("sequence"), "--moduli", "1/2"],
            ["sets", data("reciprocal.fn"), "--eps", "0"],
            ["restrict", data("sign.fn"), "0", "one"],
        ]
        for argv in cases:
            with self.subTest(argv=argv[0]):
                code, _, err = run(*argv)
                self.assertEqual(code, 2)
                self.assertTrue(err.startswith("error: UsageError"), err)

    def test_value_errors_of_the_core_are_not_usage_errors(self):
        with mock.patch.object(commands, "density_approx", side_effect=ValueError("internal")):
            with self.assertRaises(ValueError):
                run("approx", data("small_jump.fn"), "2")

    def test_unknown_verb(self):
        with contextlib.redirect_stderr(io.StringIO()):
            code, _, _ = run("pow", data("sign.fn"))
        self.assertEqual(code, 2)

    def test_entry_point(self):
        out = io.StringIO()
        with mock.patch("sys.argv", ["hnf", "mul", data("sign.fn"), data("sign.fn")]), \
                contextlib.redirect_stdout(out):
            with self.assertRaises(SystemExit) as ctx:
                hnf.main()
        self.assertEqual(ctx.exception.code, 0)
        self.assertEqual(out.getvalue(), "piecewise on [-1,1] { -1: 1; (-1,1): 1; 1: 1 }\n")


class TestConfig(unittest.TestCase):

    def test_read_hnf_config(self):
        config = commands.read_hnf_config(data("test-hnf-config.yml"))
        self.assertEqual(config.tolerance, Rational(1, 10 ** 9))
        self.assertEqual(config.output_format, "json")
        self.assertEqual(config.samples, 50)
        self.assertEqual(config.decimal, 3)
        self.assertEqual(config.scheduler, "threads")
        self.assertEqual(config.bridge_floor_exponent, 12)
        self.assertIsNone(config.logging_config)

    def test_default_config_file(self):
        config = commands.read_hnf_config(os.path.join(CONFIG_DIR, "hnf-config.yml"))
        self.assertEqual(config.tolerance, Rational(1, 10 ** 12))
        self.assertEqual(config.output_format, "text")
        self.assertIsNone(config.decimal)

    def test_invalid_config(self):
        with self.assertRaises(errors.ConfigError):
            commands.read_hnf_config(data("test-invalid-config.yml"))
        code, _, err = run("canon", data("sign.fn"), "--config", data("test-invalid-config.yml"))
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error: ConfigError"))

    def test_config_validation(self):
        invalid = [{"threads": 4}, {"tolerance": 2}, {"tolerance": "small"}, {"samples": 1}, {"decimal": -1},
                   {"scheduler": "gpu"}, {"bridgeFloorExponent": 0}]
        for config in invalid:
            with self.subTest(config=config):
                with self.assertRaises(errors.ConfigError):
                    commands.config_from_dict(config)
        with self.assertRaises(errors.ConfigError):
            commands.read_hnf_config(data("missing.yml"))

    def test_config_file_and_overrides(self):
        code, out, _ = run("rho", data("zero.fn"), data("one.fn"), "--config", data("test-hnf-config.yml"))
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["results"]["rho"]["lo"], "0.500")
        code, out, _ = run("rho", data("zero.fn"), data("one.fn"), "--config", data("test-hnf-config.yml"),
                           "--format", "text", "--decimal", "2")
        self.assertEqual(out, "rho in [0.50, 0.50]\n")

    def test_invalid_logging_config(self):
        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, "logging.yml")
            with open(path, "w") as f:
                f.write("version: 99\n")
            with self.assertRaises(errors.ConfigError):
                commands.setup_logging(path)
        finally:
            shutil.rmtree(tmp)


class TestPlotOutputs(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_csv(self):
        code, out, _ = run("plot", data("sign.fn"), "--samples", "100", "--format", "csv")
        self.assertEqual(code, 0)
        rows = out.splitlines()
        self.assertEqual(rows[0], "x,lo,hi")
        self.assertIn("0,-1,1", rows)
        self.assertEqual(rows[1], "-1,-1,-1")
        self.assertEqual(rows[-1], "1,1,1")

    def test_plot_defaults_to_csv(self):
        code, out, _ = run("plot", data("reciprocal.fn"), "--samples", "3")
        self.assertEqual(code, 0)
        self.assertEqual(out, "x,lo,hi\n-1,-1,-1\n0,-inf,inf\n1,1,1\n")

    def test_csv_file(self):
        path = os.path.join(self.tmp, "sign.csv")
        code, out, _ = run("plot", data("sign.fn"), "--samples", "3", "--format", "csv", "--output", path)
        self.assertEqual(code, 0)
        self.assertEqual(out, "")
        with open(path, "r") as f:
            self.assertEqual(f.read(), "x,lo,hi\n-1,-1,-1\n0,-1,1\n1,1,1\n")

    def test_svg(self):
        path = os.path.join(self.tmp, "sign.svg")
        code, _, err = run("plot", data("reciprocal.fn"), "--format", "svg", "--output", path)
        self.assertEqual(code, 0, err)
        with open(path, "r") as f:
            content = f.read()
        self.assertIn('viewBox="0 0 800 600"', content)

    def test_comparison_svg(self):
        path = os.path.join(self.tmp, "compare.svg")
        code, _, err = run("plot", data("sign.fn"), data("x.fn"), "--format", "svg", "--output", path)
        self.assertEqual(code, 0, err)
        self.assertTrue(os.path.isfile(path))
        code, _, _ = run("plot", data("sign.fn"), data("x.fn"), "--format", "csv")
        self.assertEqual(code, 2)

    def test_output_required(self):
        code, _, err = run("plot", data("sign.fn"), "--format", "svg")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error: UsageError"))

    def test_netcdf(self):
        path = os.path.join(self.tmp, "sign.nc")
        code, _, err = run("plot", data("sign.fn"), "--samples", "20", "--format", "netcdf", "--output", path)
        self.assertEqual(code, 0, err)
        with xarray.open_dataset(path, engine="h5netcdf") as xds:
            self.assertEqual(xds.sizes["x"], 21)
            self.assertEqual(int(xds.attrs["samples"]), 20)
            at_zero = xds.sel(x=0.0)
            self.assertEqual(float(at_zero["lo"]), -1.0)
            self.assertEqual(float(at_zero["hi"]), 1.0)

    def test_zarr(self):
        path = os.path.join(self.tmp, "reciprocal.zarr")
        code, _, err = run("plot", data("reciprocal.fn"), "--samples", "5", "--format", "zarr", "--output", path)
        self.assertEqual(code, 0, err)
        with xarray.open_zarr(path) as xds:
            self.assertEqual(xds.sizes["x"], 5)
            self.assertEqual(float(xds["hi"].sel(x=0.0)), float("inf"))


class TestIoUtils(unittest.TestCase):

    def test_sample_grid(self):
        f = parse_fn("piecewise on [-1,1] { (-1,0): -1; (0,1): 1 }")
        self.assertEqual([x for x, _ in ioutils.sample_grid(f, 2)], [-1, 0, 1])
        self.assertEqual(len(ioutils.sample_grid(f, 5)), 5)
        with self.assertRaises(ValueError):
            ioutils.sample_grid(f, 1)

    def test_discover_function_files(self):
        files = ioutils.discover_function_files(data("sequence"))
        self.assertEqual([os.path.basename(f) for f in files], ["f0.fn", "f1.fn", "f2.fn"])
        with self.assertLogs("hnfpyalgebra.ioutils", level="WARNING"):
            self.assertEqual(ioutils.discover_function_files(GOLDEN_DIR), [])

    def test_read_operand(self):
        self.assertEqual(ioutils.read_operand("x on [0,1]"), "x on [0,1]")
        self.assertEqual(ioutils.read_operand(data("x.fn")).strip(), "x on [-1,1]")

    def test_unsupported_plot_format(self):
        f = parse_fn("x on [0,1]")
        with self.assertRaises(ValueError):
            ioutils.emit_plot(f, None, 10, "png")


if __name__ == '__main__':
    unittest.main()
