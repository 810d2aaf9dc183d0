import io
import math
import unittest

import speckit
from speckit import ErrorReport, SchemeConfig, SchemeId


def sweep(problem, scheme, ks, p=math.inf, eta=1e-6, workers=1):
    base = SchemeConfig(scheme, 1.0, eta)
    return speckit.convergence_sweep(problem, scheme, ks, p, base, workers)


def by_N(reports):
    return {r.N: r for r in reports}


class TestErrors(unittest.TestCase):

    def test_exact_trajectory(self):
        traj = speckit.Trajectory(0.0, 0.5, [0.0, 0.5, 1.0], [0.0, 0.5, 1.0])
        for p in (1.0, 2.0, math.inf):
            self.assertEqual(
                speckit.accumulated_error(traj, lambda t: t, p), 0.0)

    def test_two_nodes(self):
        e = 0.25
        traj = speckit.Trajectory(0.0, 1.0, [0.0, 1.0], [0.0, 1.0 + e])
        self.assertEqual(speckit.accumulated_error(traj, lambda t: t,
                                                   math.inf), e)
        self.assertEqual(speckit.accumulated_error(traj, lambda t: t, 1.0), e)
        self.assertEqual(speckit.accumulated_error(traj, lambda t: t, 2.0), e)
        with self.assertRaises(ValueError):
            speckit.accumulated_error(traj, lambda t: t, 3.0)

    def test_norm_relations(self):
        problem = speckit.dahlquist(-3.0)
        for h in (0.1, 1 / 32):
            traj = speckit.solve_ivp(problem, SchemeConfig(SchemeId.EE, h))
            errors = [abs(problem.exact(t) - u) for t, u in traj.nodes]
            E_inf = speckit.accumulated_error(traj, problem.exact, math.inf)
            E_1 = speckit.accumulated_error(traj, problem.exact, 1.0)
            self.assertEqual(E_inf, max(errors))
            self.assertLessEqual(E_1, len(traj) * h * E_inf * (1 + 1e-12))

    def test_error_ratio(self):
        self.assertEqual(speckit.error_ratio(2.0, 1.0), 1.0)
        self.assertEqual(speckit.error_ratio(4e-3, 1e-3), 2.0)
        self.assertAlmostEqual(speckit.error_ratio(2.0e-3, 5.0e-4), 2.0)
        for E_half, E in ((0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)):
            with self.assertRaises(ValueError):
                speckit.error_ratio(E_half, E)


class TestSweep(unittest.TestCase):

    def test_single_k(self):
        reports = sweep(speckit.exponential_growth(), SchemeId.EE, [5])
        self.assertEqual(len(reports), 1)
        self.assertIsNone(reports[0].R)
        self.assertEqual(reports[0].N, 32)
        self.assertEqual(reports[0].h, 1 / 32)

    def test_ratio_chaining(self):
        reports = sweep(speckit.exponential_growth(), SchemeId.EE, [3, 4, 6])
        self.assertIsNone(reports[0].R)
        self.assertAlmostEqual(
            reports[1].R, math.log2(reports[0].E / reports[1].E))
        self.assertIsNone(reports[2].R)

    def test_invalid(self):
        problem = speckit.exponential_growth()
        with self.assertRaises(ValueError):
            sweep(problem, SchemeId.EE, [])
        with self.assertRaises(ValueError):
            sweep(problem, SchemeId.EE, [4, 3])
        no_exact = speckit.IvpProblem(problem.source, 0.0, 1.0, 1.0)
        with self.assertRaises(ValueError):
            sweep(no_exact, SchemeId.EE, [3])

    def test_solver_error(self):
        problem = speckit.IvpProblem(lambda t, u: 1e308, 0.0, 1e308, 2.0,
                                     exact=lambda t: 1e308)
        with self.assertRaises(speckit.SolverError) as ctx:
            sweep(problem, SchemeId.EE, [0, 1])
        self.assertEqual(ctx.exception.N, 1)
        self.assertIs(ctx.exception.scheme, SchemeId.EE)

    def test_deterministic(self):
        problem = speckit.circle_problem(0.9)
        first = sweep(problem, SchemeId.SE5, range(3, 8))
        second = sweep(problem, SchemeId.SE5, range(3, 8))
        parallel = sweep(problem, SchemeId.SE5, range(3, 8), workers=4)
        self.assertListEqual(first, second)
        self.assertListEqual(first, parallel)


class TestCircle(unittest.TestCase):

    def setUp(self):
        self.problem = speckit.circle_problem(0.9)

    def test_explicit_euler(self):
        reports = by_N(sweep(self.problem, SchemeId.EE, [3, 17]))
        self.assertAlmostEqual(reports[8].E, 8.1e-2, delta=8.1e-3)
        self.assertAlmostEqual(reports[131072].E, 5.2e-6, delta=5.2e-7)

    def test_crank_nicolson(self):
        reports = by_N(sweep(self.problem, SchemeId.CN, [4, 5, 13]))
        self.assertAlmostEqual(reports[32].R, 2.0, delta=0.15)
        self.assertAlmostEqual(reports[8192].E, 2.2e-8, delta=0.3 * 2.2e-8)

    def test_specular_euler_ratios(self):
        for scheme in (SchemeId.SE5, SchemeId.SE6):
            reports = sweep(self.problem, scheme, range(13, 18))
            for r in reports[1:]:
                self.assertAlmostEqual(r.R, 2.0, delta=0.15, msg=scheme)

    def test_specular_euler_plateau(self):
        for r in sweep(self.problem, SchemeId.SE5, range(3, 9)):
            self.assertLessEqual(r.E, 5e-7)


class TestDahlquist(unittest.TestCase):

    def setUp(self):
        self.problem = speckit.dahlquist(-3.0, u0=1.0, T=2.5)

    def test_first_order(self):
        for scheme in (SchemeId.EE, SchemeId.IE):
            for r in sweep(self.problem, scheme, range(3, 11)):
                if r.N >= 64:
                    self.assertAlmostEqual(r.R, 1.0, delta=0.1, msg=scheme)

    def test_second_order(self):
        for scheme in (SchemeId.CN, SchemeId.SE5):
            for r in sweep(self.problem, scheme, range(3, 11)):
                if r.N >= 16:
                    self.assertAlmostEqual(r.R, 2.0, delta=0.1, msg=scheme)

    def test_specular_euler_error(self):
        report, = sweep(self.problem, SchemeId.SE5, [4])
        self.assertAlmostEqual(report.E, 1.4e-3, delta=0.15 * 1.4e-3)


class TestNonsmooth(unittest.TestCase):

    def test_specular_euler_wins(self):
        problem = speckit.nonsmooth_linear(0.3)
        ks = range(3, 11)
        se5 = sweep(problem, SchemeId.SE5, ks)
        ee = sweep(problem, SchemeId.EE, ks)
        ie = sweep(problem, SchemeId.IE, ks)
        for a, b, c in zip(se5, ee, ie):
            self.assertLess(a.E, b.E)
            self.assertLess(a.E, c.E)


class TestOrder(unittest.TestCase):

    def setUp(self):
        self.problem = speckit.exponential_growth()
        self.ks = range(8, 15)

    def order(self, scheme, eta=1e-6):
        reports = sweep(self.problem, scheme, self.ks, eta=eta)
        return speckit.fit_order([r.h for r in reports],
                                 [r.E for r in reports])

    def test_explicit_euler(self):
        self.assertAlmostEqual(self.order(SchemeId.EE), 1.0, delta=0.1)

    def test_crank_nicolson(self):
        self.assertAlmostEqual(self.order(SchemeId.CN, eta=1e-12), 2.0,
                               delta=0.1)

    def test_specular_euler(self):
        self.assertAlmostEqual(self.order(SchemeId.SE5, eta=1e-12), 2.0,
                               delta=0.1)

    def test_fit_order(self):
        hs = [2.0 ** -k for k in range(3, 8)]
        self.assertAlmostEqual(
            speckit.fit_order(hs, [3 * h ** 2 for h in hs]), 2.0, delta=1e-12)
        with self.assertRaises(ValueError):
            speckit.fit_order([0.1], [0.2])


class TestLocalTruncationError(unittest.TestCase):

    def setUp(self):
        self.problem = speckit.exponential_growth()
        self.hs = [2.0 ** -k for k in range(4, 9)]

    def max_tau(self, scheme):
        return [speckit.local_truncation_error(self.problem, h, scheme)
                .abs().max().item() for h in self.hs]

    def test_consistency(self):
        for scheme in SchemeId:
            order = speckit.fit_order(self.hs, self.max_tau(scheme))
            self.assertGreaterEqual(order, 0.9, scheme)

    def test_orders(self):
        self.assertAlmostEqual(
            speckit.fit_order(self.hs, self.max_tau(SchemeId.EE)), 1.0,
            delta=0.1)
        self.assertAlmostEqual(
            speckit.fit_order(self.hs, self.max_tau(SchemeId.SE5)), 2.0,
            delta=0.1)

    def test_shape(self):
        tau = speckit.local_truncation_error(self.problem, 1 / 16)
        self.assertTupleEqual(tau.size(), (16,))
        tau = speckit.local_truncation_error(self.problem, 1 / 16,
                                             SchemeId.SE1)
        self.assertTupleEqual(tau.size(), (15,))


class TestReportFormats(unittest.TestCase):

    def setUp(self):
        problem = speckit.circle_problem(0.9)
        self.reports = (sweep(problem, SchemeId.EE, range(3, 7))
                        + sweep(problem, SchemeId.CN, range(3, 7)))

    def assertReportsClose(self, parsed, reports):
        def key(r):
            return r.problem, r.p, r.scheme.value, r.N

        self.assertEqual(len(parsed), len(reports))
        for a, b in zip(sorted(parsed, key=key), sorted(reports, key=key)):
            self.assertEqual((a.problem, a.scheme, a.p, a.N),
                             (b.problem, b.scheme, b.p, b.N))
            self.assertAlmostEqual(a.E, b.E, delta=1e-5 * b.E)
            if b.R is None:
                self.assertIsNone(a.R)
            else:
                self.assertAlmostEqual(a.R, b.R, delta=1e-5 * abs(b.R))

    def test_csv(self):
        stream = io.StringIO()
        speckit.write_reports_csv(self.reports, stream)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], "problem,scheme,p,N,h,E,R")
        self.assertEqual(len(lines), 9)
        self.assertTrue(lines[1].startswith("circle,ee,inf,8,1.25000e-01,"))
        self.assertTrue(lines[1].endswith(","))

        stream.seek(0)
        self.assertReportsClose(speckit.read_reports_csv(stream),
                                self.reports)

    def test_markdown(self):
        text = speckit.render_markdown(self.reports)
        lines = text.splitlines()
        self.assertEqual(lines[0], "### circle, p = inf")
        self.assertEqual(lines[2], "| N | EE E | EE R | CN E | CN R |")
        self.assertEqual(len(lines), 8)
        self.assertIn("--", lines[4])
        self.assertReportsClose(speckit.parse_markdown(text), self.reports)

    def test_report_fields(self):
        report = ErrorReport("exp", SchemeId.EE, 1.0, 8, 0.125, 0.5)
        self.assertIsNone(report.R)


if __name__ == "__main__":
    unittest.main()
