// Copyright 2026 The stairgait Authors
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

#include "stairgait/model.hpp"

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "stairgait/ik.hpp"

using namespace stairgait;

namespace {

Configuration random_config(std::mt19937_64& rng, double amplitude = 1.0) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Configuration q;
  for (int i = 0; i < 5; ++i) q[i] = u(rng);
  return q;
}

}  // namespace

TEST_CASE("forward kinematics matches hand-computed reference points", "[model]") {
  const RobotModel model = rabbit_model();
  const auto poses = forward_kinematics(model, Configuration::Zero());

  CHECK(poses.hip().x() == Catch::Approx(0.0).margin(1e-15));
  CHECK(poses.hip().y() == Catch::Approx(0.8).margin(1e-15));
  CHECK(poses.torso_tip.x() == Catch::Approx(0.0).margin(1e-15));
  CHECK(poses.torso_tip.y() == Catch::Approx(1.425).margin(1e-15));
  // The swing leg folds back onto the stance leg at the zero configuration.
  CHECK(poses.swing_foot().norm() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("consecutive joints are separated by the link lengths", "[model]") {
  const RobotModel model = rabbit_model();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Configuration q = random_config(rng, 2.0);
    const auto p = forward_kinematics(model, q);
    CHECK((p.joint_positions[1] - p.joint_positions[0]).norm() ==
          Catch::Approx(model.links[0].length).epsilon(1e-12));
    CHECK((p.joint_positions[2] - p.joint_positions[1]).norm() ==
          Catch::Approx(model.links[1].length).epsilon(1e-12));
    CHECK((p.joint_positions[3] - p.joint_positions[2]).norm() == Catch::Approx(0.0).margin(1e-15));
    CHECK((p.joint_positions[4] - p.joint_positions[3]).norm() ==
          Catch::Approx(model.links[3].length).epsilon(1e-12));
    CHECK((p.joint_positions[5] - p.joint_positions[4]).norm() ==
          Catch::Approx(model.links[4].length).epsilon(1e-12));
    CHECK((p.torso_tip - p.hip()).norm() == Catch::Approx(model.links[2].length).epsilon(1e-12));
  }
}

TEST_CASE("swing foot jacobian agrees with central finite differences", "[model]") {
  const RobotModel model = rabbit_model();
  std::mt19937_64 rng(11);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Configuration q = random_config(rng, 1.5);
    const SwingFoot sf = swing_foot(model, q);
    CHECK((sf.position - forward_kinematics(model, q).swing_foot()).norm() < 1e-14);
    for (int j = 0; j < 5; ++j) {
      Configuration qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const Vec2 fd =
          (swing_foot(model, qp).position - swing_foot(model, qm).position) / (2.0 * h);
      CHECK(std::abs(fd.x() - sf.jacobian(0, j)) < 1e-6);
      CHECK(std::abs(fd.y() - sf.jacobian(1, j)) < 1e-6);
    }
  }
}

TEST_CASE("swing foot ahead of the stance foot has positive x", "[model]") {
  const RobotModel model = rabbit_model();
  const Configuration q =
      configuration_from_targets(model, -0.1, Vec2(0.05, 0.65), Vec2(0.3, 0.1));
  CHECK(swing_foot(model, q).position.x() > 0.0);
  CHECK(swing_foot(model, q).position.x() == Catch::Approx(0.3).margin(1e-9));
  CHECK(swing_foot(model, q).position.y() == Catch::Approx(0.1).margin(1e-9));
}

TEST_CASE("center of mass", "[model]") {
  const RobotModel model = rabbit_model();

  SECTION("total mass from the link table") {
    CHECK(com(model, Configuration::Zero()).total_mass == Catch::Approx(40.0));
  }

  SECTION("symmetric folded configuration is balanced") {
    CHECK(com(model, Configuration::Zero()).position.x() == Catch::Approx(0.0).margin(1e-15));
  }

  SECTION("matches direct summation over forward kinematics") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const Configuration q = random_config(rng, 2.0);
      const auto poses = forward_kinematics(model, q);
      Vec2 weighted = Vec2::Zero();
      double mtot = 0.0;
      for (int i = 0; i < 5; ++i) {
        weighted += model.links[i].mass * poses.com_positions[i];
        mtot += model.links[i].mass;
      }
      const auto c = com(model, q);
      CHECK((c.position - weighted / mtot).norm() < 1e-12);
      CHECK(c.total_mass == Catch::Approx(mtot));
    }
  }
}

TEST_CASE("relabel", "[model]") {
  SECTION("zero velocity maps to zero velocity") {
    State s{Configuration::Ones(), Vec5::Zero()};
    CHECK(relabel(s, RelabelMap::standard()).qd.norm() == 0.0);
  }

  SECTION("identity map leaves the state unchanged") {
    State s{Configuration::Random(), Vec5::Random()};
    const State r = relabel(s, RelabelMap::identity());
    CHECK((r.q - s.q).norm() == 0.0);
    CHECK((r.qd - s.qd).norm() == 0.0);
  }

  SECTION("standard map is an involution") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    State s;
    for (int i = 0; i < 5; ++i) {
      s.q[i] = u(rng);
      s.qd[i] = u(rng);
    }
    const State twice = relabel(relabel(s, RelabelMap::standard()), RelabelMap::standard());
    CHECK((twice.q - s.q).norm() < 1e-15);
    CHECK((twice.qd - s.qd).norm() < 1e-15);
  }

  SECTION("published boundary table follows a signed leg-exchange pattern") {
    // Initial and final joint values of the reference stair step; the final
    // row maps onto the initial row under q2<->q5, q3<->-q4 with a small
    // torso-angle correction.
    Configuration q_init, q_final;
    q_init << 0.2618, 1.3140, -1.2267, -0.0219, 0.0;
    q_final << 0.1964, 0.0, 0.0219, 1.2267, 1.3140;

    RelabelMap candidate;
    candidate.matrix.setZero();
    candidate.matrix(0, 0) = 1.0;
    candidate.matrix(1, 4) = 1.0;   // q2+ <- q5-
    candidate.matrix(2, 3) = -1.0;  // q3+ <- -q4-
    candidate.matrix(3, 2) = -1.0;
    candidate.matrix(4, 1) = 1.0;
    candidate.q1_correction = 0.2618 - 0.1964;

    const State mapped = relabel(State{q_final, Vec5::Zero()}, candidate);
    CHECK((mapped.q - q_init).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("non-permutation matrix is rejected") {
    RelabelMap bad;
    bad.matrix.setZero();
    bad.matrix(0, 0) = 1.0;
    bad.matrix(1, 0) = 1.0;  // duplicate column use
    bad.matrix(2, 2) = 1.0;
    bad.matrix(3, 3) = 1.0;
    bad.matrix(4, 4) = 1.0;
    CHECK_THROWS_AS(relabel(State{Vec5::Zero(), Vec5::Zero()}, bad), std::invalid_argument);

    RelabelMap scaled = RelabelMap::identity();
    scaled.matrix(0, 0) = 2.0;
    CHECK_THROWS_AS(relabel(State{Vec5::Zero(), Vec5::Zero()}, scaled), std::invalid_argument);
  }
}

TEST_CASE("stair clearance", "[model]") {
  const StairGeometry stair = StairGeometry::make(0.2, 0.4);

  SECTION("points on the current tread have zero clearance") {
    CHECK(stair_clearance(stair, Vec2(0.0, 0.0)) == 0.0);
    CHECK(stair_clearance(stair, Vec2(0.15, 0.0)) == 0.0);
    CHECK(stair_clearance(stair, Vec2(-0.15, 0.0)) == 0.0);
  }

  SECTION("point above the next tread") {
    CHECK(stair_clearance(stair, Vec2(0.3, 0.25)) == Catch::Approx(0.05));
  }

  SECTION("point below the current tread is negative") {
    CHECK(stair_clearance(stair, Vec2(0.0, -0.03)) == Catch::Approx(-0.03));
  }

  SECTION("previous tread sits one rise lower") {
    CHECK(stair_clearance(stair, Vec2(-0.3, 0.0)) == Catch::Approx(0.2));
  }

  SECTION("descending stairs use the same profile with negative rise") {
    const StairGeometry down = StairGeometry::make(-0.2, 0.4);
    CHECK(stair_clearance(down, Vec2(0.3, -0.2)) == Catch::Approx(0.0).margin(1e-15));
    CHECK(stair_clearance(down, Vec2(0.3, 0.0)) == Catch::Approx(0.2));
  }

  SECTION("tread surfaces are exact zeros across several steps") {
    for (int k = -3; k <= 3; ++k) {
      const double x = stair.footprint_offset + stair.run * (k + 0.5);
      const double y = stair.rise * (k + 1);
      CHECK(stair_clearance(stair, Vec2(x, y)) == Catch::Approx(0.0).margin(1e-12));
    }
  }
}

TEST_CASE("boundary regeneration places the feet exactly", "[model][ik]") {
  const RobotModel model = rabbit_model();
  const StairGeometry stair = StairGeometry::make(0.2, 0.4);
  const auto bc = regenerate_boundary(model, stair);

  const Vec2 sw0 = swing_foot(model, bc.q_init).position;
  const Vec2 swT = swing_foot(model, bc.q_final).position;
  CHECK(sw0.norm() < 1e-9);
  CHECK((swT - Vec2(stair.run, stair.rise)).norm() < 1e-9);

  // Both knees bend the human way (negative coordinate) within the default
  // range at both ends of the step.
  for (const auto& q : {bc.q_init, bc.q_final}) {
    CHECK(q[2] < -0.05);
    CHECK(q[2] > -2.0);
    CHECK(q[4] < -0.05);
    CHECK(q[4] > -2.0);
  }
}

TEST_CASE("unreachable targets are rejected", "[model][ik]") {
  const RobotModel model = rabbit_model();
  CHECK_THROWS_AS(configuration_from_targets(model, 0.0, Vec2(0.0, 0.9), Vec2(0, 0)),
                  std::invalid_argument);
  const StairGeometry tall = StairGeometry::make(1.5, 0.4);
  CHECK_THROWS_AS(regenerate_boundary(model, tall), std::invalid_argument);
}

TEST_CASE("parameter validation", "[model]") {
  CHECK_THROWS_AS(LinkParams{-1.0, 1.0, 1.0, 0.5}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(LinkParams{1.0, 1.0, 0.4, 0.5}.validate(), std::invalid_argument);
  CHECK_NOTHROW(rabbit_model().validate());
  CHECK_THROWS_AS(StairGeometry::make(0.2, -0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(StairGeometry::make(2.0, 0.4).validate(1.6), std::invalid_argument);
}
