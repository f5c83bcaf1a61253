#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "vhpf/harmonic_field.hpp"

using namespace vhpf;

namespace {

constexpr double kTol = 1e-8;

ScalarGridField solved_strip() {
  auto f = ScalarGridField::from_classes(oracle::strip_grid(), oracle::strip_classes());
  relax(f, kTol);
  return f;
}

ScalarGridField solved_square() {
  return solve_dirichlet(oracle::square_workspace(), {}, oracle::square_goal(), kTol);
}

}  // namespace

TEST(HarmonicStrip, LinearProfile) {
  const auto f = solved_strip();
  const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int c = 0; c < 5; ++c) EXPECT_NEAR(f.values[c], expected[c], kTol) << "cell " << c;
  EXPECT_EQ(f.values[0], 0.0);
  EXPECT_EQ(f.values[4], 1.0);
  EXPECT_LT(f.residual, kTol);
}

TEST(HarmonicStrip, MatchesDenseSolve) {
  const auto f = solved_strip();
  const auto ref = oracle::dense_laplace(f.grid, f.cls);
  for (std::size_t c = 0; c < ref.size(); ++c) EXPECT_NEAR(f.values[c], ref[c], 10 * kTol);
}

TEST(HarmonicStrip, GradientIsQuarterPerCell) {
  const auto f = solved_strip();
  const Vec g = gradient_at(f, vec2(2.5, 0.5));
  EXPECT_NEAR(g[0], 0.25 / f.grid.h, 1e-6);
  EXPECT_NEAR(g[1], 0.0, 1e-12);
  const Vec g2 = gradient_at(f, vec2(2.1, 0.5));
  EXPECT_NEAR(g2[0], 0.25, 1e-6);
}

TEST(HarmonicStrip, StatsBoundIsQuarterPerCell) {
  const auto s = field_stats(solved_strip());
  EXPECT_NEAR(s.max_gradient, 0.25, 1e-6);
  EXPECT_NEAR(s.min_interior_value, 0.25, 1e-6);
}

TEST(HarmonicStrip, WallCellReequilibratesNeighbors) {
  auto f = solved_strip();
  const auto warm = resolve_incremental(f, {2}, kTol);
  auto cls = oracle::strip_classes();
  cls[2] = CellClass::ObstacleBc;
  auto cold = ScalarGridField::from_classes(oracle::strip_grid(), cls);
  relax(cold, kTol);
  EXPECT_NEAR(cold.values[1], 0.5, kTol);
  EXPECT_NEAR(cold.values[3], 1.0, kTol);
  for (int c = 0; c < 5; ++c) EXPECT_NEAR(warm.values[c], cold.values[c], kTol);
  EXPECT_EQ(warm.values[2], 1.0);
}

TEST(HarmonicSquare, MatchesDenseSolveAndIsSymmetric) {
  const auto f = solved_square();
  const auto ref = oracle::dense_laplace(f.grid, f.cls);
  for (std::size_t c = 0; c < ref.size(); ++c) EXPECT_NEAR(f.values[c], ref[c], 10 * kTol) << "cell " << c;

  const Grid& g = f.grid;
  auto at = [&](int i, int j) { return f.values[g.index(i, j)]; };
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      EXPECT_NEAR(at(i, j), at(4 - i, j), 2 * kTol);
      EXPECT_NEAR(at(i, j), at(i, 4 - j), 2 * kTol);
      EXPECT_NEAR(at(i, j), at(j, i), 2 * kTol);
      if (f.cls[g.index(i, j)] == CellClass::Free) {
        EXPECT_GT(at(i, j), 0.0);
        EXPECT_LT(at(i, j), 1.0);
      }
    }
  }
  EXPECT_EQ(at(2, 2), 0.0);
}

TEST(HarmonicSquare, GradientVanishesAtCenter) {
  const auto f = solved_square();
  EXPECT_LT(gradient_at(f, oracle::square_goal()).norm(), 1e-12);
}

TEST(HarmonicSquare, StatsBoundFromDenseSolve) {
  const auto f = solved_square();
  // Exhaustive cell scan of central differences on the dense solution.
  const auto ref = oracle::dense_laplace(f.grid, f.cls);
  const Grid& g = f.grid;
  double best = 0.0;
  for (int i = 1; i < 4; ++i) {
    for (int j = 1; j < 4; ++j) {
      if (i == 2 && j == 2) continue;
      const double gx = (ref[g.index(i + 1, j)] - ref[g.index(i - 1, j)]) / 2.0;
      const double gy = (ref[g.index(i, j + 1)] - ref[g.index(i, j - 1)]) / 2.0;
      best = std::max(best, std::hypot(gx, gy));
    }
  }
  EXPECT_NEAR(field_stats(f).max_gradient, best, 1e-6);
  EXPECT_GT(best, 0.0);
}

TEST(HarmonicSolve, GoalGradientIsFlat) {
  const Workspace ws(2, Box{vec2(0, 0), vec2(10, 10)}, {}, 0.5);
  const auto f = solve_dirichlet(ws, {}, vec2(3.25, 6.75), kTol);
  EXPECT_EQ(value_at(f, vec2(3.25, 6.75)), 0.0);
  EXPECT_LT(gradient_at(f, vec2(3.25, 6.75)).norm(), 10 * kTol);
}

TEST(HarmonicSolve, ErrorsAreReported) {
  const Workspace ws(2, Box{vec2(0, 0), vec2(10, 10)}, {Box{vec2(4, 4), vec2(6, 6)}}, 0.5);
  EXPECT_THROW(solve_dirichlet(ws, ws.boundary(), vec2(1, 1), 0.0), ConfigError);
  EXPECT_THROW(solve_dirichlet(ws, ws.boundary(), vec2(20, 1), kTol), ConfigError);
  const Vec inside = ws.grid().center(*ws.boundary().begin());
  EXPECT_THROW(solve_dirichlet(ws, ws.boundary(), inside, kTol), ConfigError);

  const auto f = solve_dirichlet(ws, ws.boundary(), vec2(1.25, 1.25), kTol);
  EXPECT_THROW(gradient_at(f, inside), QueryError);
  EXPECT_THROW(value_at(f, vec2(-3, 0)), QueryError);
  // Unknown interior obstacle cells remain free and queryable.
  EXPECT_NO_THROW(gradient_at(f, vec2(5, 5)));
}

TEST(HarmonicSolve, IterationCapRaisesSolverError) {
  const Workspace ws(2, Box{vec2(0, 0), vec2(10, 10)}, {}, 1.0);
  try {
    solve_dirichlet(ws, {}, vec2(5.5, 5.5), 1e-300);
    FAIL() << "expected a solver error";
  } catch (const SolverError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(HarmonicSolve, StatsRequireAGoal) {
  std::vector<CellClass> cls(5, CellClass::OuterBc);
  cls[2] = CellClass::Free;
  auto f = ScalarGridField::from_classes(oracle::strip_grid(), cls);
  relax(f, kTol);
  EXPECT_THROW(field_stats(f), ConfigError);
}

TEST(HarmonicIncremental, EmptyUpdateLeavesFieldUnchanged) {
  const auto f = solved_square();
  const auto g = resolve_incremental(f, {}, kTol);
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ(g.iterations, 0);
}

TEST(HarmonicIncremental, CellByCellWallMatchesColdSolve) {
  const Workspace ws(2, Box{vec2(0, 0), vec2(12, 8)}, {Box{vec2(5, 1), vec2(6, 6)}}, 0.5);
  const Vec goal = vec2(10.25, 4.25);
  auto f = solve_dirichlet(ws, {}, goal, kTol);
  for (CellId c : ws.boundary()) f = resolve_incremental(std::move(f), {c}, kTol);
  const auto cold = solve_dirichlet(ws, ws.boundary(), goal, kTol);
  for (CellId c = 0; c < cold.values.size(); ++c) {
    EXPECT_NEAR(f.values[c], cold.values[c], 10 * kTol);
    EXPECT_EQ(f.cls[c], cold.cls[c]);
  }
}

TEST(HarmonicIncremental, InflationPinsWithoutHardCells) {
  const Workspace ws(2, Box{vec2(0, 0), vec2(12, 8)}, {Box{vec2(5, 1), vec2(6, 6)}}, 0.25);
  const auto f = solve_dirichlet(ws, ws.boundary(), vec2(10.1, 4.1), kTol, 1.0);
  // Cell centers at x = 4.125 lie exactly one unit from the wall's boundary cells.
  const Vec edge = vec2(4.125, 3.125);
  const auto cell = ws.grid().locate(edge);
  ASSERT_TRUE(cell);
  EXPECT_EQ(f.cls[*cell], CellClass::ObstacleBc);
  EXPECT_EQ(f.values[*cell], 1.0);
  EXPECT_FALSE(f.hard[*cell]);
  EXPECT_EQ(f.cls[*ws.grid().locate(vec2(3.875, 3.125))], CellClass::Free);
  // One-sided difference toward the open side: descent points away from the wall.
  EXPECT_GT(gradient_at(f, edge)[0], 0.0);
}

TEST(HarmonicProperties, RandomWorkspaces) {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto r = oracle::check_random_field(seed, kTol);
    EXPECT_TRUE(r.max_principle) << "seed " << seed;
    EXPECT_LE(r.mean_value_error, 10 * kTol) << "seed " << seed;
    EXPECT_EQ(r.local_minima, 0) << "seed " << seed;
    EXPECT_LE(r.warm_cold_gap, 10 * kTol) << "seed " << seed;
  }
}

TEST(HarmonicProperties, RefinementConverges) {
  const Vec goal = vec2(7.0, 3.0);
  const Vec probes[] = {vec2(2.1, 2.2), vec2(4.3, 6.1), vec2(9.4, 4.8)};
  std::vector<double> diffs;
  std::vector<double> prev;
  for (double h : {1.0, 0.5, 0.25}) {
    const Workspace ws(2, Box{vec2(0, 0), vec2(12, 8)}, {}, h);
    // The goal cell is the one just above and right of the shared corner.
    const auto f = solve_dirichlet(ws, {}, goal + vec2(1e-9, 1e-9), 1e-10);
    std::vector<double> v;
    for (const auto& p : probes) v.push_back(value_at(f, p));
    if (!prev.empty()) {
      double d = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) d = std::max(d, std::abs(v[k] - prev[k]));
      diffs.push_back(d);
    }
    prev = v;
  }
  ASSERT_EQ(diffs.size(), 2u);
  EXPECT_LT(diffs[1], diffs[0]);
}

TEST(HarmonicField, CsvDumpHasOneRowPerCell) {
  std::ostringstream os;
  write_field_csv(os, solved_strip());
  const std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 6);
  EXPECT_EQ(s.rfind("cell,class,value\n0,goal,0\n", 0), 0u);
}
