// Copyright 2026 The DADP Authors
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

#include "dadp/mixdiff/diffusion.h"

#include <algorithm>

#include "dadp/errors.h"
#include "dadp/mixdiff/schedule.h"

namespace dadp {
namespace {

void CheckShapes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 const Eigen::VectorXd& mask) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != mask.size()) {
    throw ValidationError("diffusion operands have mismatched shapes");
  }
}

}  // namespace

Eigen::MatrixXd ForwardPerturb(const Eigen::MatrixXd& x0,
                               const Eigen::MatrixXd& z_tiled,
                               const Eigen::MatrixXd& eps,
                               const Eigen::RowVectorXd& alpha,
                               const Eigen::RowVectorXd& sigma, double lambda,
                               const Eigen::VectorXd& mask) {
  CheckShapes(x0, z_tiled, mask);
  CheckShapes(x0, eps, mask);
  Eigen::MatrixXd out = x0;
  for (Eigen::Index c = 0; c < x0.cols(); ++c) {
    for (Eigen::Index i = 0; i < x0.rows(); ++i) {
      if (mask[i] != 0.0) continue;
      const double lz = lambda * z_tiled(i, c);
      out(i, c) = alpha[c] * (x0(i, c) - lz) + lz + sigma[c] * eps(i, c);
    }
  }
  return out;
}

Eigen::VectorXd ForwardPerturb(const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& z_tiled,
                               const Eigen::VectorXd& eps, double k,
                               double lambda, const Eigen::VectorXd& mask) {
  const Eigen::RowVectorXd a = Eigen::RowVectorXd::Constant(1, ScheduleAlpha(k));
  const Eigen::RowVectorXd s = Eigen::RowVectorXd::Constant(1, ScheduleSigma(k));
  return ForwardPerturb(Eigen::MatrixXd(x0), Eigen::MatrixXd(z_tiled),
                        Eigen::MatrixXd(eps), a, s, lambda, mask)
      .col(0);
}

Eigen::MatrixXd CompositeTarget(const Eigen::MatrixXd& z_tiled,
                                const Eigen::MatrixXd& eps,
                                const Eigen::RowVectorXd& alpha,
                                const Eigen::RowVectorXd& sigma, double lambda,
                                const Eigen::VectorXd& mask) {
  CheckShapes(z_tiled, eps, mask);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(eps.rows(), eps.cols());
  for (Eigen::Index c = 0; c < eps.cols(); ++c) {
    for (Eigen::Index i = 0; i < eps.rows(); ++i) {
      if (mask[i] != 0.0) continue;
      out(i, c) = (1.0 - alpha[c]) * lambda * z_tiled(i, c) + sigma[c] * eps(i, c);
    }
  }
  return out;
}

Eigen::VectorXd CompositeTarget(const Eigen::VectorXd& z_tiled,
                                const Eigen::VectorXd& eps, double k,
                                double lambda, const Eigen::VectorXd& mask) {
  const Eigen::RowVectorXd a = Eigen::RowVectorXd::Constant(1, ScheduleAlpha(k));
  const Eigen::RowVectorXd s = Eigen::RowVectorXd::Constant(1, ScheduleSigma(k));
  return CompositeTarget(Eigen::MatrixXd(z_tiled), Eigen::MatrixXd(eps), a, s,
                         lambda, mask)
      .col(0);
}

Eigen::MatrixXd DdimStep(const Eigen::MatrixXd& x, const Eigen::MatrixXd& eps_hat,
                         double alpha, double sigma, double alpha_prev,
                         double sigma_prev, const Eigen::MatrixXd& known,
                         const Eigen::VectorXd& mask) {
  CheckShapes(x, eps_hat, mask);
  CheckShapes(x, known, mask);
  const double ca = alpha_prev / std::max(alpha, kScheduleFloor);
  const double cs = sigma_prev / std::max(sigma, kScheduleFloor);
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(i, c) = mask[i] != 0.0
                      ? known(i, c)
                      : ca * (x(i, c) - eps_hat(i, c)) + cs * eps_hat(i, c);
    }
  }
  return out;
}

Eigen::VectorXd DdimStep(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& eps_hat, double k,
                         double k_prev, const Eigen::VectorXd& known,
                         const Eigen::VectorXd& mask) {
  if (!(k_prev < k)) throw ValidationError("ddim step needs k_prev < k");
  return DdimStep(Eigen::MatrixXd(x), Eigen::MatrixXd(eps_hat),
                  ScheduleAlpha(k), ScheduleSigma(k), ScheduleAlpha(k_prev),
                  ScheduleSigma(k_prev), Eigen::MatrixXd(known), mask)
      .col(0);
}

}  // namespace dadp
