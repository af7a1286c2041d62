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

#ifndef STAIRGAIT_LINALG_HPP_
#define STAIRGAIT_LINALG_HPP_

#include <Eigen/Dense>

namespace stairgait {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat25 = Eigen::Matrix<double, 2, 5>;
using Mat27 = Eigen::Matrix<double, 2, 7>;
using Mat54 = Eigen::Matrix<double, 5, 4>;
using Mat55 = Eigen::Matrix<double, 5, 5>;
using Mat77 = Eigen::Matrix<double, 7, 7>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

}  // namespace stairgait

#endif  // STAIRGAIT_LINALG_HPP_
