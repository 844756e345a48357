// SPDX-License-Identifier: Apache-2.0
//
// fdxlab - full-duplex radio simulation and optimization toolkit
// Copyright (C) 2026 The fdxlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "bvls.hpp"

#include <algorithm>
#include <limits>

namespace fdx::detail
{
namespace
{

// Pivots are kept down to this fraction of the largest; the canceller basis
// is legitimately conditioned near 1e15 and must not be truncated.
constexpr double qr_threshold = 1e-18;

using Real = long double;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

enum class State
{
    Lower,
    Upper,
    Free
};

double objective(const Matrix &a, const Vector &b, const Vector &x)
{
    return static_cast<double>((b - a * x).squaredNorm());
}

class Solver
{
public:
    Solver(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, const Eigen::VectorXd &lo, const Eigen::VectorXd &hi)
        : a_(a.cast<Real>()), b_(b.cast<Real>()), lo_(lo.cast<Real>()), hi_(hi.cast<Real>()),
          state_(static_cast<std::size_t>(a.cols()), State::Lower)
    {
    }

    void start(const Eigen::VectorXd &x0)
    {
        x_ = x0.cast<Real>();
        for (Eigen::Index j = 0; j < x_.size(); ++j)
        {
            x_[j] = std::clamp(x_[j], lo_[j], hi_[j]);
            state(j) = x_[j] == lo_[j] ? State::Lower : x_[j] == hi_[j] ? State::Upper : State::Free;
        }
    }

    /// Stark-Parker inner loop: move toward the unconstrained optimum of the
    /// free variables, pinning any that hit a bound. Returns false if the
    /// variable `pick` (released this round) heads back across its bound.
    bool relax(Eigen::Index pick, State picked_from)
    {
        const Eigen::Index n = a_.cols();
        for (Eigen::Index inner = 0; inner <= n; ++inner)
        {
            std::vector<Eigen::Index> free_idx;
            for (Eigen::Index j = 0; j < n; ++j)
                if (state(j) == State::Free)
                    free_idx.push_back(j);
            if (free_idx.empty())
                return true;

            Vector rhs = b_;
            for (Eigen::Index j = 0; j < n; ++j)
                if (state(j) != State::Free)
                    rhs.noalias() -= a_.col(j) * x_[j];

            Matrix af(a_.rows(), static_cast<Eigen::Index>(free_idx.size()));
            for (std::size_t k = 0; k < free_idx.size(); ++k)
                af.col(static_cast<Eigen::Index>(k)) = a_.col(free_idx[k]);
            Eigen::ColPivHouseholderQR<Matrix> qr(af);
            qr.setThreshold(qr_threshold);
            const Vector z = qr.solve(rhs);

            bool feasible = true;
            for (std::size_t k = 0; k < free_idx.size(); ++k)
            {
                const Eigen::Index j = free_idx[k];
                const Real zj = z[static_cast<Eigen::Index>(k)];
                if (!(zj >= lo_[j] && zj <= hi_[j]))
                    feasible = false;
            }
            if (feasible)
            {
                for (std::size_t k = 0; k < free_idx.size(); ++k)
                    x_[free_idx[k]] = z[static_cast<Eigen::Index>(k)];
                return true;
            }

            // The freshly released variable wants to go straight back across its
            // bound: the multiplier sign was numerical noise.
            if (inner == 0 && pick >= 0)
            {
                const auto it = std::find(free_idx.begin(), free_idx.end(), pick);
                const Real zp = z[static_cast<Eigen::Index>(it - free_idx.begin())];
                if ((picked_from == State::Lower && zp < lo_[pick]) || (picked_from == State::Upper && zp > hi_[pick]))
                    return false;
            }

            // Step toward z until the first free variable reaches a bound.
            Real alpha = 1.0;
            for (std::size_t k = 0; k < free_idx.size(); ++k)
            {
                const Eigen::Index j = free_idx[k];
                const Real zj = z[static_cast<Eigen::Index>(k)];
                const Real xj = x_[j];
                if (zj < lo_[j] && xj - zj > 0.0)
                    alpha = std::min(alpha, (xj - lo_[j]) / (xj - zj));
                else if (zj > hi_[j] && zj - xj > 0.0)
                    alpha = std::min(alpha, (hi_[j] - xj) / (zj - xj));
            }
            alpha = std::clamp(alpha, Real{0}, Real{1});
            for (std::size_t k = 0; k < free_idx.size(); ++k)
            {
                const Eigen::Index j = free_idx[k];
                x_[j] += alpha * (z[static_cast<Eigen::Index>(k)] - x_[j]);
                const Real span = hi_[j] - lo_[j];
                if (x_[j] <= lo_[j] + 1e-14 * span)
                {
                    x_[j] = lo_[j];
                    state(j) = State::Lower;
                }
                else if (x_[j] >= hi_[j] - 1e-14 * span)
                {
                    x_[j] = hi_[j];
                    state(j) = State::Upper;
                }
            }
        }
        return true;
    }

    BvlsResult run(double tol, double gradient_scale, std::size_t max_iterations)
    {
        const Eigen::Index n = a_.cols();
        std::vector<bool> skip(static_cast<std::size_t>(n), false);
        BvlsResult out;
        out.objective.push_back(objective(a_, b_, x_));

        // A warm start with interior variables first settles them.
        if (std::find(state_.begin(), state_.end(), State::Free) != state_.end())
        {
            const Vector x_before = x_;
            const std::vector<State> state_before = state_;
            relax(-1, State::Free);
            const double f = objective(a_, b_, x_);
            if (f <= out.objective.back())
                out.objective.push_back(f);
            else
            {
                x_ = x_before;
                state_ = state_before;
            }
        }

        for (std::size_t outer = 0; outer < max_iterations; ++outer)
        {
            out.iterations = outer + 1;
            const Vector w = a_.transpose() * (b_ - a_ * x_);

            // Most violated bound constraint.
            Eigen::Index pick = -1;
            Real worst = tol;
            for (Eigen::Index j = 0; j < n; ++j)
            {
                if (skip[static_cast<std::size_t>(j)])
                    continue;
                Real v = 0.0;
                if (state(j) == State::Lower)
                    v = gradient_scale * w[j];
                else if (state(j) == State::Upper)
                    v = -gradient_scale * w[j];
                if (v > worst)
                {
                    worst = v;
                    pick = j;
                }
            }
            if (pick < 0)
            {
                out.converged = true;
                break;
            }

            const Vector x_before = x_;
            const std::vector<State> state_before = state_;
            const State picked_from = state(pick);
            state(pick) = State::Free;

            const bool accepted = relax(pick, picked_from);
            const double f = objective(a_, b_, x_);
            if (!accepted || f > out.objective.back())
            {
                // Rounding-level increase: the previous iterate is as good as this
                // arithmetic can resolve.
                x_ = x_before;
                state_ = state_before;
                skip[static_cast<std::size_t>(pick)] = true;
                continue;
            }
            out.objective.push_back(f);
            std::fill(skip.begin(), skip.end(), false);
        }
        out.x = x_.cast<double>();
        return out;
    }

private:
    State &state(Eigen::Index j) { return state_[static_cast<std::size_t>(j)]; }

    Matrix a_;
    Vector b_;
    Vector lo_;
    Vector hi_;
    Vector x_;
    std::vector<State> state_;
};

} // namespace

BvlsResult bvls(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, const Eigen::VectorXd &lo,
                const Eigen::VectorXd &hi, double tol, double gradient_scale, std::size_t max_iterations)
{
    return bvls(a, b, lo, hi, lo, tol, gradient_scale, max_iterations);
}

BvlsResult bvls(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, const Eigen::VectorXd &lo,
                const Eigen::VectorXd &hi, const Eigen::VectorXd &x0, double tol, double gradient_scale,
                std::size_t max_iterations)
{
    Solver s(a, b, lo, hi);
    s.start(x0);
    return s.run(tol, gradient_scale, max_iterations);
}

} // namespace fdx::detail
