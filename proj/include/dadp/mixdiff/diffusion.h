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

#ifndef DADP_MIXDIFF_DIFFUSION_H_
#define DADP_MIXDIFF_DIFFUSION_H_

#include <Eigen/Core>

namespace dadp {

// Batched forms take one window per column and one (alpha, sigma) pair per
// column. Z is the broadcast representation (already zero on masked
// entries). Masked entries always carry x0 (or `known`) unchanged.

// x_k = alpha (x0 - lambda Z) + lambda Z + sigma eps on unmasked entries.
Eigen::MatrixXd ForwardPerturb(const Eigen::MatrixXd& x0,
                               const Eigen::MatrixXd& z_tiled,
                               const Eigen::MatrixXd& eps,
                               const Eigen::RowVectorXd& alpha,
                               const Eigen::RowVectorXd& sigma, double lambda,
                               const Eigen::VectorXd& mask);
Eigen::VectorXd ForwardPerturb(const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& z_tiled,
                               const Eigen::VectorXd& eps, double k,
                               double lambda, const Eigen::VectorXd& mask);

// (1 - alpha) lambda Z + sigma eps, zero on masked entries. Satisfies
// x_k = alpha x0 + target on unmasked entries.
Eigen::MatrixXd CompositeTarget(const Eigen::MatrixXd& z_tiled,
                                const Eigen::MatrixXd& eps,
                                const Eigen::RowVectorXd& alpha,
                                const Eigen::RowVectorXd& sigma, double lambda,
                                const Eigen::VectorXd& mask);
Eigen::VectorXd CompositeTarget(const Eigen::VectorXd& z_tiled,
                                const Eigen::VectorXd& eps, double k,
                                double lambda, const Eigen::VectorXd& mask);

// x' = (alpha' / alpha)(x - eps_hat) + (sigma' / sigma) eps_hat on unmasked
// entries, with the divisors floored; masked entries are re-imposed from
// `known`.
Eigen::MatrixXd DdimStep(const Eigen::MatrixXd& x, const Eigen::MatrixXd& eps_hat,
                         double alpha, double sigma, double alpha_prev,
                         double sigma_prev, const Eigen::MatrixXd& known,
                         const Eigen::VectorXd& mask);
// Requires k_prev < k. Uses the raw schedule values at both ends.
Eigen::VectorXd DdimStep(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& eps_hat, double k,
                         double k_prev, const Eigen::VectorXd& known,
                         const Eigen::VectorXd& mask);

}  // namespace dadp

#endif  // DADP_MIXDIFF_DIFFUSION_H_
