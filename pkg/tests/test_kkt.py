"""KKT system construction, counts, residuals, and export round-trips."""

from fractions import Fraction

import numpy as np
import pytest

from psdbound.bounds import triangular
from psdbound.kkt import (
    PatakiViolationError,
    PolySystem,
    SystemInfo,
    assignment_from_solution,
    build_kkt,
    build_kkt_normalized,
    build_kkt_rank,
    export_plain,
    export_system,
    parse_system,
    poly_degree,
    residual,
    to_fraction,
)
from psdbound.pencil import Pencil
from psdbound.polar import pentagon_fixture, segment_fixture
from psdbound.sdp import solve_sdp


def small_pencil(m, n, seed=0):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((m, m))
    a0 = (g + g.T) / 2
    lam = np.linalg.eigvalsh(a0)[0]
    mats = [a0 + (abs(lam) + 0.5) * np.eye(m)]
    for _ in range(n):
        g = rng.standard_normal((m, m))
        a = (g + g.T) / 2
        a -= np.trace(a) / m * np.eye(m)
        mats.append(a)
    return Pencil(mats=tuple(mats))


class TestToFraction:
    def test_exact_decimal(self):
        assert to_fraction(0.1) == Fraction(1, 10)
        assert to_fraction(-2.5) == Fraction(-5, 2)
        assert to_fraction(3) == Fraction(3)
        assert to_fraction(np.float64(0.2)) == Fraction(1, 5)

    def test_rejects_strings(self):
        with pytest.raises(TypeError):
            to_fraction("0.5")


class TestCounts:
    def test_plain_m2_n1(self):
        system = build_kkt(segment_fixture(), [1.0])
        assert system.num_variables == 1 + 2 * triangular(2) == 7
        assert system.num_equations == 1 + triangular(2) + 4 == 8
        assert system.metadata.bezout_product == 2**4

    @pytest.mark.parametrize("m,n", [(2, 1), (3, 2), (3, 5), (4, 3), (5, 6)])
    def test_closed_form_counts(self, m, n):
        pencil = small_pencil(m, n)
        system = build_kkt(pencil, list(range(1, n + 1)))
        assert system.num_variables == n + 2 * triangular(m)
        assert system.num_equations == n + triangular(m) + m * m
        assert system.metadata.bezout_product == 2 ** (m * m)
        degrees = system.degrees()
        assert degrees.count(1) == n + triangular(m)
        assert degrees.count(2) == m * m

    def test_normalized_counts(self):
        pencil = small_pencil(3, 2)
        system = build_kkt_normalized(pencil)
        assert system.num_variables == 2 + 2 * triangular(3) + 2
        assert system.num_equations == 2 + triangular(3) + 9 + 1
        assert system.metadata.variant == "normalized"
        assert system.metadata.bezout_product == 2 ** (9 + 1)

    def test_objective_length_checked(self):
        with pytest.raises(ValueError):
            build_kkt(segment_fixture(), [1.0, 2.0])


class TestRankVariant:
    def test_m2_r1_minor_counts(self):
        system = build_kkt_rank(segment_fixture(), 1)
        assert system.metadata.minor_counts == (1, 1)
        base = build_kkt_normalized(segment_fixture())
        assert system.num_equations == base.num_equations + 2

    def test_m3_r1_minor_counts(self):
        pencil = small_pencil(3, 3)
        system = build_kkt_rank(pencil, 1)
        assert system.metadata.minor_counts == (9, 1)
        degrees = system.degrees()[-10:]
        assert degrees.count(2) == 9 and degrees.count(3) == 1

    def test_r_equals_m_vacuous_x_block(self):
        pencil = small_pencil(3, 3)
        system = build_kkt_rank(pencil, 3, force=True)
        assert system.metadata.minor_counts[0] == 0

    def test_pataki_gate(self):
        pencil = small_pencil(3, 3)  # range is {1, 2}
        with pytest.raises(PatakiViolationError):
            build_kkt_rank(pencil, 3)
        system = build_kkt_rank(pencil, 3, force=True)
        assert system.metadata.rank == 3


class TestResidual:
    def test_zero_system(self):
        empty = PolySystem(
            variables=("x1",), equations=(), metadata=SystemInfo(1, 1, "plain", 1)
        )
        max_abs, per_eq = residual(empty, {"x1": 5})
        assert max_abs == 0 and per_eq == []

    def test_hand_triple_exact_zero(self):
        system = build_kkt(segment_fixture(), [1])
        assignment = {
            "x1": 1,
            "X_1_1": 2,
            "X_1_2": 0,
            "X_2_2": 0,
            "Z_1_1": 0,
            "Z_1_2": 0,
            "Z_2_2": 1,
        }
        max_abs, per_eq = residual(system, assignment)
        assert max_abs == 0
        assert all(v == 0 for v in per_eq)

    def test_perturbation_sensitivity(self):
        system = build_kkt(segment_fixture(), [1])
        assignment = {
            "x1": 1 + 1e-3,
            "X_1_1": 2,
            "X_1_2": 0,
            "X_2_2": 0,
            "Z_1_1": 0,
            "Z_1_2": 0,
            "Z_2_2": 1,
        }
        max_abs, _ = residual(system, assignment)
        assert max_abs >= 1e-4

    def test_missing_variable(self):
        system = build_kkt(segment_fixture(), [1.0])
        with pytest.raises(ValueError, match="missing"):
            residual(system, {"x1": 1.0})

    def test_lifted_solver_solutions(self):
        lifted = 0
        for t in range(12):
            pencil = small_pencil(3, 3, seed=(7, t))
            c = np.random.default_rng((8, t)).standard_normal(3)
            sol = solve_sdp(pencil, c)
            if sol.status != "optimal":
                continue
            lifted += 1
            system = build_kkt(pencil, c)
            assignment = assignment_from_solution(system, sol)
            max_abs, _ = residual(system, assignment)
            scale = 1 + max(
                np.linalg.norm(sol.X), np.linalg.norm(sol.Z), np.linalg.norm(sol.x)
            )
            assert max_abs <= 1e-6 * scale
        assert lifted >= 8

    def test_rescaling_into_plain_system(self):
        # a solution of the lambda-scaled objective, with Z scaled back by
        # the original objective value, solves the original system
        for t in range(6):
            pencil = small_pencil(3, 2, seed=(17, t))
            c0 = np.random.default_rng((18, t)).standard_normal(2)
            sol = solve_sdp(pencil, c0)
            if sol.status != "optimal" or abs(sol.value) < 1e-6:
                continue
            lam = 1.0 / sol.value
            sol_scaled = solve_sdp(pencil, lam * c0)
            if sol_scaled.status != "optimal":
                continue
            # (x, X, Z_scaled) solves KKT(lam c0) with lam c0^T x = 1;
            # multiplying Z by c0^T x must land in the KKT(c0) solution set
            s = float(c0 @ sol_scaled.x)
            assert lam * s == pytest.approx(1.0, abs=1e-6)
            system = build_kkt(pencil, c0)
            assignment = assignment_from_solution(system, sol_scaled)
            for i in range(1, 4):
                for j in range(i, 4):
                    key = f"Z_{i}_{j}"
                    if key in assignment:
                        assignment[key] *= s
            max_abs, _ = residual(system, assignment)
            scale = 1 + max(np.linalg.norm(sol_scaled.X), abs(s) * np.linalg.norm(sol_scaled.Z))
            assert max_abs <= 1e-5 * scale

    def test_normalized_lift_of_boundary_point(self):
        # scale the objective so the optimal value is 1, lift with symbolic c
        pencil = small_pencil(3, 3, seed=99)
        c0 = np.array([1.0, -0.5, 0.25])
        sol = solve_sdp(pencil, c0)
        assert sol.status == "optimal" and sol.value > 0
        c_star = c0 / sol.value
        sol2 = solve_sdp(pencil, c_star)
        assert sol2.status == "optimal"
        assert sol2.value == pytest.approx(1.0, abs=1e-7)
        system = build_kkt_normalized(pencil)
        assignment = assignment_from_solution(system, sol2, c=c_star)
        max_abs, _ = residual(system, assignment)
        assert max_abs <= 1e-6 * (1 + np.linalg.norm(sol2.X) + np.linalg.norm(sol2.Z))


class TestExport:
    def test_empty_system_header_only(self):
        empty = PolySystem(
            variables=("x1", "X_1_1"),
            equations=(),
            metadata=SystemInfo(1, 1, "plain", 1),
        )
        assert export_plain(empty) == "vars: x1 X_1_1\n"

    def test_plain_m2_line_count(self):
        system = build_kkt(segment_fixture(), [1.0])
        text = export_system(system, "plain_text")
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith(("vars:", "#"))]
        assert len(lines) == 8
        assert all(ln.endswith("= 0") for ln in lines)

    @pytest.mark.parametrize("fmt", ["plain_text", "json"])
    def test_round_trips(self, fmt):
        for system in (
            build_kkt(segment_fixture(), [1.0]),
            build_kkt(small_pencil(3, 2, seed=5), [0.5, -0.25]),
            build_kkt_normalized(small_pencil(3, 2, seed=5)),
            build_kkt_rank(segment_fixture(), 1),
        ):
            text = export_system(system, fmt)
            assert parse_system(text, fmt) == system

    def test_pentagon_json_round_trip(self):
        system = build_kkt_normalized(pentagon_fixture())
        text = export_system(system, "json")
        assert parse_system(text, "json") == system

    def test_rational_coefficients_survive(self):
        pencil = Pencil(mats=(np.eye(2), np.array([[0.1, 0.2], [0.2, -0.3]])))
        system = build_kkt(pencil, [0.7])
        text = export_system(system, "plain_text")
        assert "1/10" in text or "-1/10" in text
        back = parse_system(text, "plain_text")
        assert back == system

    def test_unknown_format(self):
        system = build_kkt(segment_fixture(), [1.0])
        with pytest.raises(ValueError):
            export_system(system, "yaml")


class TestPolyDegree:
    def test_degrees(self):
        assert poly_degree({}) == 0
        assert poly_degree({(): Fraction(3)}) == 0
        assert poly_degree({((0, 2), (3, 1)): Fraction(1)}) == 3
