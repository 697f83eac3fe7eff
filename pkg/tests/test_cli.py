# Copyright (C) 2022  Max Wiklund
#
# Licensed under the Apache License, Version 2.0 (the “License”);
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an “AS IS” BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import contextlib
import csv
import io
import json
import math
import os
import shutil
import tempfile
from unittest import TestCase, mock

import zetawalk


def _read_csv(path: str) -> dict:
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
    return {name: [row[name] for row in rows] for name in rows[0]}


def _read_summary(path: str) -> dict:
    with open(path, encoding="utf-8") as f:
        return dict(line[2:].rstrip("\n").split(",", 1) for line in f if line.startswith("# "))


def _floats(values) -> list:
    return [float(v) for v in values]


class TestCommandLine(TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.stderr = io.StringIO()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _path(self, name: str) -> str:
        return os.path.join(self.temp_dir, name)

    def _run(self, *argv: str) -> int:
        with contextlib.redirect_stderr(self.stderr):
            return zetawalk._main(list(argv))

    def _exit_code(self, *argv: str) -> int:
        with self.assertRaises(SystemExit) as context:
            self._run(*argv)
        return context.exception.code

    def test_eval(self):
        path = self._path("eval.csv")
        self.assertEqual(0, self._run("eval", "--p", "1/3", "--s", "2", "--t-max", "100", "--points", "2000", "-o", path))
        table = _read_csv(path)
        self.assertEqual(["t", "cl", "trend_factor", "upper_envelope"], list(table))
        self.assertEqual(2000, len(table["t"]))
        self.assertEqual(0.0, float(table["t"][0]))
        self.assertEqual(1.0, float(table["cl"][0]))
        self.assertIn("Done", self.stderr.getvalue())

    def test_eval_sign_change(self):
        path = self._path("harmonic.csv")
        self._run("eval", "--p", "1", "--s", "1", "--t-max", "3", "--points", "301", "-o", path)
        table = _read_csv(path)
        t, cl = _floats(table["t"]), _floats(table["cl"])
        changes = [t[i] for i in range(1, len(t)) if cl[i - 1] > 0 and cl[i] < 0]
        self.assertTrue(changes)
        self.assertAlmostEqual(1.5707963, changes[0], delta=0.011)

    def test_invalid_probability(self):
        self.assertEqual(2, self._exit_code("eval", "--p", "1.5", "--s", "2"))
        self.assertEqual(2, self._exit_code("eval", "--p", "0", "--s", "2"))
        self.assertEqual(2, self._exit_code("eval", "--p", "1/3", "--s", "0.5"))

    def test_existing_output(self):
        path = self._path("exists.csv")
        with open(path, "w") as f:
            f.write("keep\n")
        self.assertEqual(2, self._exit_code("lattice", "--p", "1/3", "--s", "2", "--steps", "2", "-o", path))
        with open(path) as f:
            self.assertEqual("keep\n", f.read())

        self._run("lattice", "--p", "1/3", "--s", "2", "--steps", "2", "-o", path, "--force")
        self.assertEqual(9, len(_read_csv(path)["omega"]))

    def test_trend(self):
        path = self._path("trend.csv")
        self._run("trend", "--s", "2", "--p", "1/3", "-o", path)
        table = _read_csv(path)
        self.assertAlmostEqual(0.5670179, float(table["c_ps"][0]), delta=2e-6)
        self.assertEqual("series", table["method"][0])

    def test_trend_boundary(self):
        path = self._path("boundary.csv")
        self._run("trend", "--s", "1", "--p", "1/2", "-o", path)
        self.assertEqual("quadrature", _read_csv(path)["method"][0])

    def test_trend_grid(self):
        path = self._path("grid.csv")
        self._run("trend", "--s", "1", "--p-grid", "0.1:0.4:0.1", "-o", path)
        table = _read_csv(path)
        self.assertEqual([0.1, 0.2, 0.3, 0.4], _floats(table["p"]))
        c = _floats(table["c_ps"])
        self.assertEqual(sorted(c), c)

    def test_lattice(self):
        path = self._path("lattice.csv")
        self._run("lattice", "--p", "1/3", "--s", "2", "--steps", "2", "-o", path)
        table = _read_csv(path)
        self.assertEqual(9, len(table["omega"]))
        self.assertAlmostEqual(1.0, sum(_floats(table["probability"])), places=14)

    def test_sample(self):
        path = self._path("sample.csv")
        argv = ("sample", "--p", "1/3", "--s", "2", "--steps", "50", "--walks", "500", "--seed", "3", "--single-thread")
        self._run(*argv, "-o", path)
        counts = [int(v) for v in _read_csv(path)["count"]]
        self.assertEqual(500, sum(counts))

        again = self._path("again.csv")
        self._run(*argv, "-o", again)
        self.assertEqual(_read_csv(path), _read_csv(again))

    def test_power(self):
        path = self._path("power.csv")
        self._run("power", "--kind", "euler_sinc", "--t-max", "20", "-o", path)
        self.assertLess(max(_floats(_read_csv(path)["abs_diff"])), 1e-9)

    def test_power_general_needs_base(self):
        self.assertEqual(2, self._exit_code("power", "--kind", "morrison_general"))

    def test_typicality_json(self):
        path = self._path("typicality.json")
        self._run("typicality", "--source", "mobius", "--n", "10000", "--format", "json", "-o", path)
        with open(path, encoding="utf-8") as f:
            document = json.load(f)
        self.assertEqual(zetawalk.__version__, document["meta"]["version"])
        self.assertEqual(10000, document["meta"]["n"])
        self.assertEqual(len(document["columns"]["n"]), len(document["columns"]["growth"]))

    def test_typicality_csv_summary(self):
        path = self._path("liouville.csv")
        self._run("typicality", "--source", "liouville", "--n", "1000", "-o", path)
        summary = _read_summary(path)
        self.assertEqual("liouville", summary["source"])
        self.assertEqual(1.0, float(summary["nonzero_freq"]))
        self.assertEqual("0", summary["longest_zero_run"])
        self.assertEqual(0, int(summary["pair[0:0]"]))
        self.assertEqual(999, sum(int(v) for k, v in summary.items() if k.startswith("pair[")))
        self.assertEqual(["n", "growth"], list(_read_csv(path)))

    def test_typicality_sources(self):
        for source, extra in (("all_ones", ()), ("sampled", ("--p", "1/2", "--seed", "3"))):
            path = self._path(f"{source}.csv")
            self.assertEqual(0, self._run("typicality", "--source", source, "--n", "5000", *extra, "-o", path))
            summary = _read_summary(path)
            self.assertEqual("5000", summary["n"])
            growth = _floats(_read_csv(path)["growth"])
            self.assertTrue(all(value >= 0.0 for value in growth))
        self.assertEqual("1", _read_summary(self._path("all_ones.csv"))["mean_coeff"])

    def test_pdf(self):
        path = self._path("pdf.csv")
        self._run("pdf", "--p", "1/3", "--s", "2", "--width", "2", "--points", "41", "-o", path)
        table = _read_csv(path)
        self.assertEqual(["omega", "density", "levy_or_cauchy"], list(table))
        self.assertEqual(41, len(table["omega"]))
        density = _floats(table["density"])
        self.assertTrue(all(value >= 0.0 for value in density))
        self.assertAlmostEqual(density[0], density[-1], delta=1e-6)
        self.assertTrue(all(value > 0.0 for value in _floats(table["levy_or_cauchy"])))

    def test_pdf_harmonic(self):
        path = self._path("harmonic_pdf.csv")
        self._run("pdf", "--p", "1", "--s", "1", "--width", "1", "--points", "21", "-o", path)
        table = _read_csv(path)
        # exp(-pi/2 |t|) is the Cauchy law with scale pi/2.
        cauchy = _floats(table["levy_or_cauchy"])
        self.assertAlmostEqual(2.0 / math.pi**2, cauchy[10], delta=1e-9)
        self.assertGreater(float(table["density"][10]), 0.0)

    def test_pdf_without_trend_law(self):
        path = self._path("no_law.csv")
        self._run("pdf", "--p", "1/3", "--s", "1.5", "--width", "1", "--points", "11", "-o", path)
        self.assertEqual([""] * 11, _read_csv(path)["levy_or_cauchy"])

    def test_eval_full_weight(self):
        path = self._path("full.csv")
        self.assertEqual(0, self._run("eval", "--p", "1", "--s", "2", "--t-max", "50", "--points", "101", "-o", path))
        table = _read_csv(path)
        self.assertEqual(1.0, float(table["cl"][0]))
        self.assertTrue(all(abs(value) <= 1.0 for value in _floats(table["cl"])))

    def test_power_general(self):
        path = self._path("general.csv")
        self._run("power", "--kind", "morrison_general", "--s", "3", "--t-max", "20", "-o", path)
        self.assertLess(max(_floats(_read_csv(path)["abs_diff"])), 1e-9)

    def test_sample_geometric(self):
        path = self._path("geometric.csv")
        argv = ("sample", "--p", "1/3", "--s", "2", "--walk", "geometric", "--steps", "30", "--walks", "200", "--single-thread")
        self._run(*argv, "-o", path)
        self.assertEqual(200, sum(int(v) for v in _read_csv(path)["count"]))
        self.assertEqual(2, self._exit_code("sample", "--p", "1/3", "--s", "1", "--walk", "geometric"))

    def test_sampled_needs_p(self):
        self.assertEqual(2, self._exit_code("typicality", "--source", "sampled", "--n", "100"))

    def test_stdout(self):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            self._run("lattice", "--p", "1", "--s", "2", "--steps", "1")
        self.assertEqual(["omega,probability", "-1,0.5", "1,0.5"], stdout.getvalue().splitlines())

    def test_run_failure(self):
        argv = ["zetawalk", "lattice", "--p", "1/3", "--s", "2", "--steps", "30"]
        with mock.patch("sys.argv", argv), contextlib.redirect_stderr(self.stderr):
            with self.assertRaises(SystemExit) as context:
                zetawalk.run()
        self.assertEqual(1, context.exception.code)
        self.assertIn("30", self.stderr.getvalue())

    def test_run_unexpected_failure(self):
        argv = ["zetawalk", "lattice", "--p", "1/3", "--s", "2", "--steps", "2"]
        with mock.patch("sys.argv", argv), mock.patch("zetawalk.commands.execute", side_effect=RuntimeError("disk on fire")):
            with contextlib.redirect_stderr(self.stderr), self.assertRaises(SystemExit) as context:
                zetawalk.run()
        self.assertEqual(1, context.exception.code)
        self.assertIn("disk on fire", self.stderr.getvalue())
