// Copyright 2026 The DMHE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "dmhe/box.h"
#include "dmhe/box_qp.h"
#include "dmhe/error.h"
#include "test_support.h"

namespace dmhe {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Box RandomBox(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Box b{Vector(dim), Vector(dim)};
  for (Index j = 0; j < dim; ++j) {
    const double a = normal(rng), c = normal(rng);
    b.lower(j) = std::min(a, c);
    b.upper(j) = std::max(a, c);
  }
  return b;
}

TEST(ProjectBoxTest, InteriorAndAbove) {
  const Box b{Vector::Constant(3, -1.0), Vector::Constant(3, 2.0)};
  const Vector inside = (Vector(3) << 0.0, 1.5, -0.5).finished();
  EXPECT_EQ(ProjectBox(inside, b), inside);
  EXPECT_EQ(ProjectBox(Vector::Constant(3, 9.0), b), b.upper);
}

// argmin_y ||y - v|| over the box separates per coordinate; each 1-D
// problem is solved by comparing the three candidates.
TEST(ProjectBoxTest, MatchesPerCoordinateMinimizer) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Box b = RandomBox(rng, 5);
    const Vector v = testing::RandomVector(rng, 5, 2.0);
    const Vector p = ProjectBox(v, b);
    for (Index j = 0; j < 5; ++j) {
      double best = b.lower(j);
      for (double cand : {b.upper(j), v(j)}) {
        if (cand < b.lower(j) || cand > b.upper(j)) continue;
        if (std::abs(cand - v(j)) < std::abs(best - v(j))) best = cand;
      }
      EXPECT_EQ(p(j), best);
    }
  }
}

TEST(ProjectBoxTest, IdempotentAndNonexpansive) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const Box b = RandomBox(rng, 6);
    const Vector a = testing::RandomVector(rng, 6, 3.0);
    const Vector c = testing::RandomVector(rng, 6, 3.0);
    const Vector pa = ProjectBox(a, b);
    EXPECT_EQ(ProjectBox(pa, b), pa);
    EXPECT_TRUE(b.Contains(pa));
    EXPECT_LE((pa - ProjectBox(c, b)).norm(), (a - c).norm() + 1e-15);
  }
}

TEST(BoxConstraintsTest, ValidationErrors) {
  std::mt19937_64 rng(3);
  const testing::RandomProblem p = testing::MakeRandomProblem(rng);
  BoxConstraints ok = BoxConstraints::Unbounded(p.model);
  EXPECT_NO_THROW(ok.Validate(p.model));
  std::vector<SubsystemBox> boxes;
  for (int i = 0; i < p.model.num_subsystems(); ++i) {
    boxes.push_back(ok.subsystem(i));
  }
  boxes[0].x_lower(0) = 1.0;
  boxes[0].x_upper(0) = 0.0;
  EXPECT_THROW(BoxConstraints(boxes).Validate(p.model), Error);
  boxes[0].x_upper(0) = std::nan("");
  EXPECT_THROW(BoxConstraints(boxes).Validate(p.model), Error);
  boxes[0].x_upper(0) = 2.0;
  boxes[0].w_lower = Vector::Zero(9);
  EXPECT_THROW(BoxConstraints(boxes).Validate(p.model), DimensionError);
  EXPECT_THROW(ok.subsystem(-1), UnknownSubsystemError);
}

TEST(BoxConstraintsTest, LocalAndGlobalAgree) {
  std::mt19937_64 rng(4);
  const testing::RandomProblem p = testing::MakeRandomProblem(rng);
  std::vector<SubsystemBox> boxes;
  for (int i = 0; i < p.model.num_subsystems(); ++i) {
    const Index d = p.model.block(i).state_dim;
    const Box bx = RandomBox(rng, d), bw = RandomBox(rng, d);
    boxes.push_back({bx.lower, bx.upper, bw.lower, bw.upper});
  }
  const BoxConstraints bc(boxes);
  const DecisionLayout layout(p.model, p.horizon);
  const Box global = bc.Global(layout);
  for (int i = 0; i < p.model.num_subsystems(); ++i) {
    const Box local = bc.Local(i, p.horizon);
    EXPECT_EQ(Gather(global.lower, layout.z_indices(i)), local.lower);
    EXPECT_EQ(Gather(global.upper, layout.z_indices(i)), local.upper);
    const Index d = p.model.block(i).state_dim;
    for (int s = 0; s < p.horizon; ++s) {
      EXPECT_EQ(local.lower.segment(d * (1 + s), d), boxes[i].w_lower);
    }
  }
}

// Exact box-QP minimizer by enumerating active sets: every coordinate is
// free, at its lower bound or at its upper bound.
Vector EnumerateBoxQp(const Matrix& h, const Vector& c, const Box& b) {
  const Index n = h.rows();
  Vector best;
  double best_f = kInf;
  int combos = 1;
  for (Index j = 0; j < n; ++j) combos *= 3;
  for (int code = 0; code < combos; ++code) {
    Vector z = Vector::Zero(n);
    std::vector<Index> free;
    int rest = code;
    for (Index j = 0; j < n; ++j) {
      const int s = rest % 3;
      rest /= 3;
      if (s == 0) free.push_back(j);
      if (s == 1) z(j) = b.lower(j);
      if (s == 2) z(j) = b.upper(j);
    }
    if (!free.empty()) {
      Matrix hf(free.size(), free.size());
      Vector rhs(free.size());
      for (size_t a = 0; a < free.size(); ++a) {
        rhs(a) = c(free[a]);
        for (Index j = 0; j < n; ++j) {
          bool is_free = false;
          for (Index f : free) is_free = is_free || f == j;
          if (!is_free) rhs(a) -= h(free[a], j) * z(j);
        }
        for (size_t d = 0; d < free.size(); ++d) hf(a, d) = h(free[a], free[d]);
      }
      const Vector zf = hf.ldlt().solve(rhs);
      for (size_t a = 0; a < free.size(); ++a) z(free[a]) = zf(a);
    }
    if (!b.Contains(z)) continue;
    const double f = 0.5 * z.dot(h * z) - c.dot(z);
    if (f < best_f) {
      best_f = f;
      best = z;
    }
  }
  return best;
}

class BoxQpMethodTest
    : public ::testing::TestWithParam<BoxQpOptions::Method> {};

TEST_P(BoxQpMethodTest, MatchesActiveSetEnumeration) {
  std::mt19937_64 rng(5);
  BoxQpOptions opt;
  opt.method = GetParam();
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + trial % 4;
    const Matrix h = testing::RandomSpd(rng, n, 0.2, 5.0);
    const Vector c = testing::RandomVector(rng, n, 3.0);
    const Box b = RandomBox(rng, n);
    const BoxQp qp(h, opt);
    const BoxQpResult r = qp.Solve(c, b, Vector::Zero(n));
    EXPECT_TRUE(b.Contains(r.z));
    EXPECT_LE(r.residual, opt.tolerance);
    EXPECT_LT((r.z - EnumerateBoxQp(h, c, b)).norm(), 1e-8) << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Methods, BoxQpMethodTest,
    ::testing::Values(BoxQpOptions::Method::kAccelerated,
                      BoxQpOptions::Method::kProjectedGradient));

TEST(BoxQpTest, OneDimensionalClamp) {
  const BoxQp qp(Matrix::Constant(1, 1, 2.0));
  const Box b{Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
  // Unconstrained minimizer c/h = 5 lies above the upper bound.
  const BoxQpResult r = qp.Solve(Vector::Constant(1, 10.0), b, Vector::Zero(1));
  EXPECT_EQ(r.z(0), 1.0);
}

TEST(BoxQpTest, CapRaisesConvergenceErrorWithResidual) {
  std::mt19937_64 rng(6);
  Matrix h = testing::RandomSpd(rng, 6, 1e-3, 10.0);
  BoxQpOptions opt;
  opt.method = BoxQpOptions::Method::kProjectedGradient;
  opt.max_iterations = 3;
  const BoxQp qp(h, opt);
  const Box b{Vector::Constant(6, -kInf), Vector::Constant(6, kInf)};
  try {
    qp.Solve(testing::RandomVector(rng, 6), b, Vector::Zero(6));
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), opt.tolerance);
    EXPECT_EQ(e.iterations(), 3);
  }
}

}  // namespace
}  // namespace dmhe
