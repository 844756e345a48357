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

#include "fdx/netopt.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace fdx
{
namespace
{

using Eigen::MatrixXcd;

double log2det_pd(const MatrixXcd &a)
{
    Eigen::LLT<MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success)
        throw InvalidArgument("log-det of a matrix that is not positive definite");
    double acc = 0.0;
    const MatrixXcd &l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        acc += std::log(l(i, i).real());
    return 2.0 * acc / std::log(2.0);
}

MatrixXcd hermitian(const MatrixXcd &a) { return 0.5 * (a + a.adjoint()); }

double inner(const MatrixXcd &a, const MatrixXcd &b) { return (a.adjoint() * b).trace().real(); }

using Gradient = std::array<std::array<MatrixXcd, 2>, 2>;

// d/dQ of the slot-averaged sum rate.
Gradient rate_gradient(const MimoLink &l, const CovarianceSchedule &s)
{
    const double k = 0.5 / std::log(2.0);
    Gradient g;
    for (std::size_t t = 0; t < 2; ++t)
    {
        const MatrixXcd &q1 = s.q[0][t];
        const MatrixXcd &q2 = s.q[1][t];
        const auto n1 = l.antennas1();
        const auto n2 = l.antennas2();

        // Receiver at node 2.
        const MatrixXcd b2 = l.noise_power * MatrixXcd::Identity(n2, n2) + l.eta * l.h22 * q2 * l.h22.adjoint();
        const MatrixXcd a2 = b2 + l.h12 * q1 * l.h12.adjoint();
        // Receiver at node 1.
        const MatrixXcd b1 = l.noise_power * MatrixXcd::Identity(n1, n1) + l.eta * l.h11 * q1 * l.h11.adjoint();
        const MatrixXcd a1 = b1 + l.h21 * q2 * l.h21.adjoint();

        const MatrixXcd a2i = a2.llt().solve(MatrixXcd::Identity(n2, n2));
        const MatrixXcd b2i = b2.llt().solve(MatrixXcd::Identity(n2, n2));
        const MatrixXcd a1i = a1.llt().solve(MatrixXcd::Identity(n1, n1));
        const MatrixXcd b1i = b1.llt().solve(MatrixXcd::Identity(n1, n1));

        g[0][t] = hermitian(k * (l.h12.adjoint() * a2i * l.h12 + l.eta * l.h11.adjoint() * (a1i - b1i) * l.h11));
        g[1][t] = hermitian(k * (l.h21.adjoint() * a1i * l.h21 + l.eta * l.h22.adjoint() * (a2i - b2i) * l.h22));
    }
    return g;
}

} // namespace

void MimoLink::validate() const
{
    const auto n1 = h12.cols();
    const auto n2 = h12.rows();
    if (n1 < 1 || n2 < 1)
        throw InvalidArgument("MimoLink: empty channel matrix");
    if (h21.rows() != n1 || h21.cols() != n2 || h11.rows() != n1 || h11.cols() != n1 || h22.rows() != n2 ||
        h22.cols() != n2)
        throw InvalidArgument("MimoLink: channel dimensions are not conformable");
    if (!(eta >= 0.0))
        throw InvalidArgument("MimoLink: eta must be non-negative");
    if (!(noise_power > 0.0))
        throw InvalidArgument("MimoLink: noise power must be positive");
    if (!(p1 > 0.0) || !(p2 > 0.0))
        throw InvalidArgument("MimoLink: power budgets must be positive");
}

CovarianceSchedule CovarianceSchedule::zeros(const MimoLink &link)
{
    CovarianceSchedule s;
    for (std::size_t t = 0; t < 2; ++t)
    {
        s.q[0][t] = MatrixXcd::Zero(link.antennas1(), link.antennas1());
        s.q[1][t] = MatrixXcd::Zero(link.antennas2(), link.antennas2());
    }
    return s;
}

double CovarianceSchedule::average_power(std::size_t node) const
{
    return 0.5 * (q[node][0].trace().real() + q[node][1].trace().real());
}

bool CovarianceSchedule::feasible(const MimoLink &link, double tol) const
{
    const Eigen::Index dims[2] = {link.antennas1(), link.antennas2()};
    const double budget[2] = {link.p1, link.p2};
    for (std::size_t i = 0; i < 2; ++i)
    {
        for (std::size_t t = 0; t < 2; ++t)
        {
            const MatrixXcd &m = q[i][t];
            if (m.rows() != dims[i] || m.cols() != dims[i])
                return false;
            if ((m - m.adjoint()).norm() > 1e-9 * (1.0 + m.norm()))
                return false;
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -tol)
                return false;
        }
        if (average_power(i) > budget[i] + tol)
            return false;
    }
    return true;
}

double link_rate(const MatrixXcd &h, const MatrixXcd &q_tx, const MatrixXcd &h_si, const MatrixXcd &q_self,
                 double eta, double noise_power)
{
    const auto nr = h.rows();
    const MatrixXcd interference =
        noise_power * MatrixXcd::Identity(nr, nr) + eta * h_si * q_self * h_si.adjoint();
    const MatrixXcd total = interference + h * q_tx * h.adjoint();
    return std::max(0.0, log2det_pd(hermitian(total)) - log2det_pd(hermitian(interference)));
}

double pair_sum_rate(const MimoLink &link, const CovarianceSchedule &s)
{
    link.validate();
    if (!s.feasible(link))
        throw InvalidArgument("pair_sum_rate: schedule is not feasible");
    double r = 0.0;
    for (std::size_t t = 0; t < 2; ++t)
    {
        r += link_rate(link.h12, s.q[0][t], link.h22, s.q[1][t], link.eta, link.noise_power);
        r += link_rate(link.h21, s.q[1][t], link.h11, s.q[0][t], link.eta, link.noise_power);
    }
    return 0.5 * r;
}

ModeDecision select_mode(double p1, double p2, double g12, double g21, double eta, double noise_power)
{
    if (!(p1 > 0.0 && p2 > 0.0 && g12 > 0.0 && g21 > 0.0 && noise_power > 0.0 && eta >= 0.0))
        throw InvalidArgument("select_mode: powers, gains and noise must be positive");
    ModeDecision d;
    d.fd_rate = std::log2(1.0 + p1 * g12 / (noise_power + eta * p2)) +
                std::log2(1.0 + p2 * g21 / (noise_power + eta * p1));
    d.hd_rate = 0.5 * (std::log2(1.0 + p1 * g12 / noise_power) + std::log2(1.0 + p2 * g21 / noise_power));
    d.mode = d.fd_rate > d.hd_rate ? DuplexMode::FullDuplex : DuplexMode::HalfDuplex;
    return d;
}

MatrixXcd water_filling_covariance(const MatrixXcd &h, double noise_power, double power)
{
    const MatrixXcd gram = hermitian(h.adjoint() * h / noise_power);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
    const Eigen::VectorXd g = es.eigenvalues().cwiseMax(0.0);
    const Eigen::Index n = g.size();

    // Active channels sorted by decreasing gain; find the water level.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return g[a] > g[b]; });
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (std::size_t active = order.size(); active >= 1; --active)
    {
        double inv_sum = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < active; ++k)
        {
            if (!(g[order[k]] > 0.0))
            {
                ok = false;
                break;
            }
            inv_sum += 1.0 / g[order[k]];
        }
        if (!ok)
            continue;
        const double level = (power + inv_sum) / static_cast<double>(active);
        if (level - 1.0 / g[order[active - 1]] >= 0.0)
        {
            for (std::size_t k = 0; k < active; ++k)
                p[order[k]] = level - 1.0 / g[order[k]];
            break;
        }
    }
    return hermitian(es.eigenvectors() * p.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
}

double water_filling_rate(const MatrixXcd &h, double noise_power, double power)
{
    const MatrixXcd q = water_filling_covariance(h, noise_power, power);
    const auto nr = h.rows();
    return log2det_pd(hermitian(MatrixXcd::Identity(nr, nr) + h * q * h.adjoint() / noise_power));
}

CovarianceSchedule half_duplex_schedule(const MimoLink &link)
{
    link.validate();
    CovarianceSchedule s = CovarianceSchedule::zeros(link);
    s.q[0][0] = water_filling_covariance(link.h12, link.noise_power, 2.0 * link.p1);
    s.q[1][1] = water_filling_covariance(link.h21, link.noise_power, 2.0 * link.p2);
    return s;
}

CovarianceSchedule isolated_schedule(const MimoLink &link)
{
    link.validate();
    CovarianceSchedule s;
    s.q[0][0] = s.q[0][1] = water_filling_covariance(link.h12, link.noise_power, link.p1);
    s.q[1][0] = s.q[1][1] = water_filling_covariance(link.h21, link.noise_power, link.p2);
    return s;
}

void project_node(MatrixXcd &q0, MatrixXcd &q1, double power)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> e0(hermitian(q0));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> e1(hermitian(q1));
    Eigen::VectorXd l0 = e0.eigenvalues().cwiseMax(0.0);
    Eigen::VectorXd l1 = e1.eigenvalues().cwiseMax(0.0);
    const double budget = 2.0 * power;

    if (l0.sum() + l1.sum() > budget)
    {
        // Shift all eigenvalues down by a common mu so the clipped sum meets the budget.
        double lo = 0.0;
        double hi = std::max(l0.maxCoeff(), l1.maxCoeff());
        for (int it = 0; it < 200; ++it)
        {
            const double mu = 0.5 * (lo + hi);
            const double sum = (l0.array() - mu).max(0.0).sum() + (l1.array() - mu).max(0.0).sum();
            (sum > budget ? lo : hi) = mu;
        }
        l0 = (l0.array() - hi).max(0.0).matrix();
        l1 = (l1.array() - hi).max(0.0).matrix();
    }
    q0 = hermitian(e0.eigenvectors() * l0.cast<cplx>().asDiagonal() * e0.eigenvectors().adjoint());
    q1 = hermitian(e1.eigenvectors() * l1.cast<cplx>().asDiagonal() * e1.eigenvectors().adjoint());
}

ScheduleResult optimize_schedule_from(const MimoLink &link, const CovarianceSchedule &start, double tol,
                                      std::size_t max_iters)
{
    link.validate();
    if (max_iters < 1)
        throw InvalidArgument("optimize_schedule: max_iters must be at least 1");

    ScheduleResult res;
    res.schedule = start;
    project_node(res.schedule.q[0][0], res.schedule.q[0][1], link.p1);
    project_node(res.schedule.q[1][0], res.schedule.q[1][1], link.p2);
    res.rate = pair_sum_rate(link, res.schedule);
    res.trace.push_back(res.rate);

    double step = 1.0;
    for (std::size_t it = 0; it < max_iters; ++it)
    {
        res.iterations = it + 1;
        const Gradient g = rate_gradient(link, res.schedule);

        bool accepted = false;
        CovarianceSchedule next;
        double next_rate = res.rate;
        for (int bt = 0; bt < 60; ++bt)
        {
            next = res.schedule;
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t t = 0; t < 2; ++t)
                    next.q[i][t] += step * g[i][t];
            project_node(next.q[0][0], next.q[0][1], link.p1);
            project_node(next.q[1][0], next.q[1][1], link.p2);

            double ascent = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t t = 0; t < 2; ++t)
                    ascent += inner(g[i][t], next.q[i][t] - res.schedule.q[i][t]);
            if (!(ascent > 0.0))
                break;

            next_rate = pair_sum_rate(link, next);
            if (next_rate >= res.rate + 1e-4 * ascent)
            {
                accepted = true;
                break;
            }
            step *= 0.5;
        }

        if (!accepted)
        {
            res.converged = true;
            return res;
        }

        const double gain = next_rate - res.rate;
        res.schedule = std::move(next);
        res.rate = next_rate;
        res.trace.push_back(res.rate);
        step = std::min(step * 2.0, 1e6);
        if (gain <= tol * std::max(res.rate, 1e-12))
        {
            res.converged = true;
            return res;
        }
    }
    return res;
}

ScheduleResult optimize_schedule(const MimoLink &link, double tol, std::size_t max_iters)
{
    link.validate();
    CovarianceSchedule uniform;
    const auto n1 = link.antennas1();
    const auto n2 = link.antennas2();
    uniform.q[0][0] = uniform.q[0][1] = (link.p1 / static_cast<double>(n1)) * MatrixXcd::Identity(n1, n1);
    uniform.q[1][0] = uniform.q[1][1] = (link.p2 / static_cast<double>(n2)) * MatrixXcd::Identity(n2, n2);

    const CovarianceSchedule starts[] = {half_duplex_schedule(link), isolated_schedule(link), uniform};
    ScheduleResult best;
    bool have = false;
    for (const auto &s : starts)
    {
        ScheduleResult r = optimize_schedule_from(link, s, tol, max_iters);
        if (!have || r.rate > best.rate)
        {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

MimoLink random_link(std::uint64_t seed, Eigen::Index n1, Eigen::Index n2, double eta, double noise_power,
                     double p1, double p2)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    auto draw = [&](Eigen::Index r, Eigen::Index c) {
        MatrixXcd m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i)
            {
                const double re = nd(rng);
                const double im = nd(rng);
                m(i, j) = {re, im};
            }
        return m;
    };
    MimoLink l;
    l.h12 = draw(n2, n1);
    l.h21 = draw(n1, n2);
    l.h11 = draw(n1, n1);
    l.h22 = draw(n2, n2);
    l.eta = eta;
    l.noise_power = noise_power;
    l.p1 = p1;
    l.p2 = p2;
    l.validate();
    return l;
}

} // namespace fdx
