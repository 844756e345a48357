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

#include "fdx/anece.hpp"

#include "fdx/parallel.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace fdx
{

using Eigen::MatrixXcd;

namespace
{

MatrixXcd gaussian(std::mt19937_64 &rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    MatrixXcd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
        {
            const double re = nd(rng);
            const double im = nd(rng);
            m(r, c) = {re, im};
        }
    return m;
}

MatrixXcd pinv(const MatrixXcd &m)
{
    Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    const double cut = s.size() > 0 ? rank_threshold * s(0) : 0.0;
    MatrixXcd out = MatrixXcd::Zero(m.cols(), m.rows());
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > cut)
            out += svd.matrixV().col(k) * (1.0 / s(k)) * svd.matrixU().col(k).adjoint();
    return out;
}

void scale_to_budget(PilotBook &book)
{
    const double target = static_cast<double>(book.length) * book.power;
    for (auto &p : book.pilots)
    {
        const double e = p.squaredNorm();
        if (e > 0.0)
            p *= std::sqrt(target / e);
    }
}

PilotBook from_factors(std::size_t users, std::size_t antennas, std::size_t length, double power,
                       const std::vector<MatrixXcd> &mix, const MatrixXcd &base)
{
    PilotBook book{users, antennas, length, power, {}};
    for (const auto &a : mix)
        book.pilots.push_back(a * base);
    scale_to_budget(book);
    return book;
}

void check_dimensions(std::size_t users, std::size_t antennas, std::size_t length, double power)
{
    if (users < 2)
        throw InvalidArgument("pilots: at least two users are required");
    if (antennas < 1)
        throw InvalidArgument("pilots: at least one antenna per user is required");
    if (length < (users - 1) * antennas)
        throw InvalidArgument("pilots: length must be at least (users - 1) * antennas");
    if (!(power > 0.0))
        throw InvalidArgument("pilots: power must be positive");
}

// sum_i trace((P~_i P~_i^H)^-1); +inf when any leave-one-out Gram is singular.
double trace_objective(const PilotBook &book)
{
    double f = 0.0;
    for (std::size_t i = 0; i < book.users; ++i)
    {
        const MatrixXcd t = book.leave_one_out(i);
        Eigen::LLT<MatrixXcd> llt(t * t.adjoint());
        if (llt.info() != Eigen::Success)
            return std::numeric_limits<double>::infinity();
        const MatrixXcd inv = llt.solve(MatrixXcd::Identity(t.rows(), t.rows()));
        const double v = inv.trace().real();
        if (!(v > 0.0) || !std::isfinite(v))
            return std::numeric_limits<double>::infinity();
        f += v;
    }
    return f;
}

// Gradient with respect to conj(P): sum over i != j of the user-j block of -M_i^-2 P~_i.
MatrixXcd trace_gradient(const PilotBook &book)
{
    const auto n = static_cast<Eigen::Index>(book.antennas);
    MatrixXcd g = MatrixXcd::Zero(static_cast<Eigen::Index>(book.users) * n, static_cast<Eigen::Index>(book.length));
    for (std::size_t i = 0; i < book.users; ++i)
    {
        const MatrixXcd t = book.leave_one_out(i);
        const MatrixXcd inv = t * t.adjoint();
        const MatrixXcd mi = inv.llt().solve(MatrixXcd::Identity(t.rows(), t.rows()));
        const MatrixXcd d = -(mi * mi) * t;
        Eigen::Index row = 0;
        for (std::size_t j = 0; j < book.users; ++j)
        {
            if (j == i)
                continue;
            g.middleRows(static_cast<Eigen::Index>(j) * n, n) += d.middleRows(row, n);
            row += n;
        }
    }
    return g;
}

PilotBook from_stack(const PilotBook &like, const MatrixXcd &stack)
{
    PilotBook out = like;
    const auto n = static_cast<Eigen::Index>(like.antennas);
    for (std::size_t i = 0; i < like.users; ++i)
        out.pilots[i] = stack.middleRows(static_cast<Eigen::Index>(i) * n, n);
    return out;
}

} // namespace

void PilotBook::validate() const
{
    check_dimensions(users, antennas, length, power);
    if (pilots.size() != users)
        throw InvalidArgument("PilotBook: one pilot matrix per user is required");
    const double budget = static_cast<double>(length) * power;
    for (const auto &p : pilots)
    {
        if (p.rows() != static_cast<Eigen::Index>(antennas) || p.cols() != static_cast<Eigen::Index>(length))
            throw InvalidArgument("PilotBook: pilot matrix has the wrong shape");
        if (!p.allFinite())
            throw InvalidArgument("PilotBook: pilot entries must be finite");
        if (p.squaredNorm() > budget * (1.0 + 1e-9))
            throw InvalidArgument("PilotBook: pilot exceeds the power budget");
    }
}

MatrixXcd PilotBook::stacked() const
{
    const auto n = static_cast<Eigen::Index>(antennas);
    MatrixXcd s(static_cast<Eigen::Index>(users) * n, static_cast<Eigen::Index>(length));
    for (std::size_t i = 0; i < users; ++i)
        s.middleRows(static_cast<Eigen::Index>(i) * n, n) = pilots[i];
    return s;
}

MatrixXcd PilotBook::leave_one_out(std::size_t user) const
{
    if (user >= users)
        throw InvalidArgument("PilotBook::leave_one_out: user index out of range");
    const auto n = static_cast<Eigen::Index>(antennas);
    MatrixXcd s(static_cast<Eigen::Index>(users - 1) * n, static_cast<Eigen::Index>(length));
    Eigen::Index row = 0;
    for (std::size_t j = 0; j < users; ++j)
    {
        if (j == user)
            continue;
        s.middleRows(row, n) = pilots[j];
        row += n;
    }
    return s;
}

PilotBook build_pilots(std::size_t users, std::size_t antennas, std::size_t length, double power,
                       std::uint64_t seed)
{
    check_dimensions(users, antennas, length, power);
    const auto r = static_cast<Eigen::Index>((users - 1) * antennas);
    const auto n = static_cast<Eigen::Index>(antennas);
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt)
    {
        const MatrixXcd q = gaussian(rng, r, static_cast<Eigen::Index>(length));
        std::vector<MatrixXcd> mix;
        for (std::size_t i = 0; i < users; ++i)
            mix.push_back(gaussian(rng, n, r));
        PilotBook book = from_factors(users, antennas, length, power, mix, q);
        if (verify_ranks(book).all_ok())
            return book;
    }
    throw std::runtime_error("build_pilots: no rank-valid draw after 100 attempts");
}

PilotBook ill_conditioned_pilots(std::size_t users, std::size_t antennas, std::size_t length, double power,
                                 double condition, std::uint64_t seed)
{
    check_dimensions(users, antennas, length, power);
    if (!(condition >= 1.0))
        throw InvalidArgument("ill_conditioned_pilots: condition must be at least 1");
    const auto r = static_cast<Eigen::Index>((users - 1) * antennas);
    const auto n = static_cast<Eigen::Index>(antennas);
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt)
    {
        const MatrixXcd u = gaussian(rng, r, r).householderQr().householderQ();
        const MatrixXcd v =
            gaussian(rng, static_cast<Eigen::Index>(length), r).householderQr().householderQ() *
            MatrixXcd::Identity(static_cast<Eigen::Index>(length), r);
        Eigen::VectorXd s(r);
        for (Eigen::Index k = 0; k < r; ++k)
            s(k) = r == 1 ? 1.0 : std::pow(condition, -static_cast<double>(k) / static_cast<double>(r - 1));
        const MatrixXcd q = u * s.cast<cplx>().asDiagonal() * v.adjoint();
        std::vector<MatrixXcd> mix;
        for (std::size_t i = 0; i < users; ++i)
            mix.push_back(gaussian(rng, n, r));
        PilotBook book = from_factors(users, antennas, length, power, mix, q);
        if (verify_ranks(book).all_ok())
            return book;
    }
    throw std::runtime_error("ill_conditioned_pilots: no rank-valid draw after 100 attempts");
}

std::size_t numerical_rank(const MatrixXcd &m)
{
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    const auto &s = svd.singularValues();
    if (!(s(0) > 0.0))
        return 0;
    std::size_t rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > rank_threshold * s(0))
            ++rank;
    return rank;
}

bool RankReport::all_ok() const
{
    for (bool b : leave_one_out_full)
        if (!b)
            return false;
    return full_deficient;
}

RankReport verify_ranks(const PilotBook &book)
{
    book.validate();
    RankReport rep;
    const std::size_t need = (book.users - 1) * book.antennas;
    for (std::size_t i = 0; i < book.users; ++i)
    {
        const std::size_t r = numerical_rank(book.leave_one_out(i));
        rep.leave_one_out_ranks.push_back(r);
        rep.leave_one_out_full.push_back(r == need);
    }
    rep.full_rank = numerical_rank(book.stacked());
    rep.full_deficient = rep.full_rank < book.users * book.antennas;
    rep.ambiguity_dimension = book.users * book.antennas - rep.full_rank;
    return rep;
}

double noise_variance(const PilotBook &book, double snr_db)
{
    if (std::isinf(snr_db) && snr_db > 0.0)
        return 0.0;
    if (!std::isfinite(snr_db))
        throw InvalidArgument("noise_variance: SNR must be finite or +inf");
    return book.power * std::pow(10.0, -snr_db / 10.0);
}

double user_sum_mse(const PilotBook &book, double snr_db)
{
    book.validate();
    return noise_variance(book, snr_db) * trace_objective(book);
}

EstimationReport simulate_estimation(const PilotBook &book, std::size_t eve_antennas,
                                     std::span<const double> snr_db, std::size_t trials, std::uint64_t seed)
{
    book.validate();
    if (trials < 1)
        throw InvalidArgument("simulate_estimation: at least one trial is required");
    if (eve_antennas < 1)
        throw InvalidArgument("simulate_estimation: Eve needs at least one antenna");
    std::vector<double> sigma2;
    for (double s : snr_db)
        sigma2.push_back(noise_variance(book, s));

    const std::size_t k_users = book.users;
    const auto n = static_cast<Eigen::Index>(book.antennas);
    const auto len = static_cast<Eigen::Index>(book.length);
    const auto ne = static_cast<Eigen::Index>(eve_antennas);
    const MatrixXcd full = book.stacked();
    const MatrixXcd full_pinv = pinv(full);
    std::vector<MatrixXcd> loo, loo_pinv;
    for (std::size_t i = 0; i < k_users; ++i)
    {
        loo.push_back(book.leave_one_out(i));
        loo_pinv.push_back(pinv(loo.back()));
    }

    const std::size_t ns = sigma2.size();
    // Per trial: [user noiseless, eve noiseless, user(snr)..., eve(snr)...].
    std::vector<std::vector<double>> per_trial(trials, std::vector<double>(2 + 2 * ns, 0.0));

    parallel_for(trials, [&](std::size_t t) {
        std::mt19937_64 rng(derive_seed(seed, t));
        std::vector<MatrixXcd> h;
        for (std::size_t i = 0; i < k_users; ++i)
            h.push_back(gaussian(rng, n, loo[i].rows()));
        const MatrixXcd g = gaussian(rng, ne, full.rows());
        auto &out = per_trial[t];

        std::vector<MatrixXcd> clean_user;
        for (std::size_t i = 0; i < k_users; ++i)
        {
            clean_user.push_back(h[i] * loo[i]);
            out[0] += (clean_user[i] * loo_pinv[i] - h[i]).squaredNorm() / h[i].squaredNorm();
        }
        out[0] /= static_cast<double>(k_users);
        const MatrixXcd clean_eve = g * full;
        out[1] = (clean_eve * full_pinv - g).squaredNorm() / g.squaredNorm();

        for (std::size_t s = 0; s < ns; ++s)
        {
            const double amp = std::sqrt(sigma2[s]);
            double user = 0.0;
            for (std::size_t i = 0; i < k_users; ++i)
            {
                const MatrixXcd y = clean_user[i] + amp * gaussian(rng, n, len);
                user += (y * loo_pinv[i] - h[i]).squaredNorm() / h[i].squaredNorm();
            }
            out[2 + s] = user / static_cast<double>(k_users);
            const MatrixXcd ye = clean_eve + amp * gaussian(rng, ne, len);
            out[2 + ns + s] = (ye * full_pinv - g).squaredNorm() / g.squaredNorm();
        }
    });

    std::vector<double> sum(2 + 2 * ns, 0.0);
    for (const auto &row : per_trial)
        for (std::size_t c = 0; c < sum.size(); ++c)
            sum[c] += row[c];
    const double tn = static_cast<double>(trials);

    EstimationReport rep;
    rep.snr_db.assign(snr_db.begin(), snr_db.end());
    rep.trials = trials;
    rep.ambiguity_dimension = verify_ranks(book).ambiguity_dimension;
    rep.user_noiseless_mse = sum[0] / tn;
    rep.eve_floor = sum[1] / tn;
    for (std::size_t s = 0; s < ns; ++s)
    {
        rep.user_mse_db.push_back(power_db(sum[2 + s] / tn));
        rep.eve_mse_db.push_back(power_db(sum[2 + ns + s] / tn));
    }
    return rep;
}

PilotOptimization optimize_pilots(const PilotBook &book0, double snr_db, std::size_t max_iters, double tol)
{
    book0.validate();
    const double s2 = noise_variance(book0, snr_db);
    if (!(s2 > 0.0))
        throw InvalidArgument("optimize_pilots: SNR must be finite");
    if (!verify_ranks(book0).all_ok())
        throw InvalidArgument("optimize_pilots: input book violates the rank invariants");

    const auto r = static_cast<Eigen::Index>((book0.users - 1) * book0.antennas);
    PilotOptimization res;
    res.book = book0;
    double f = trace_objective(book0);
    res.trace.push_back(s2 * f);
    res.history.push_back(book0);

    MatrixXcd grad = trace_gradient(res.book);
    double step = 0.1 * res.book.stacked().norm() / std::max(grad.norm(), 1e-300);

    for (std::size_t it = 0; it < max_iters; ++it)
    {
        res.iterations = it + 1;
        const MatrixXcd p = res.book.stacked();
        if (step * grad.norm() <= 1e-15 * p.norm())
        {
            res.converged = true;
            break;
        }

        Eigen::JacobiSVD<MatrixXcd> svd(p - step * grad, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::Index keep = std::min<Eigen::Index>(r, svd.singularValues().size());
        const MatrixXcd truncated = svd.matrixU().leftCols(keep) *
                                    svd.singularValues().head(keep).cast<cplx>().asDiagonal() *
                                    svd.matrixV().leftCols(keep).adjoint();
        PilotBook cand = from_stack(res.book, truncated);
        scale_to_budget(cand);

        const double fc = trace_objective(cand);
        if (fc < f && verify_ranks(cand).all_ok())
        {
            const double gain = (f - fc) / f;
            res.book = std::move(cand);
            f = fc;
            res.trace.push_back(s2 * f);
            res.history.push_back(res.book);
            grad = trace_gradient(res.book);
            step *= 2.0;
            if (gain <= tol)
            {
                res.converged = true;
                break;
            }
        }
        else
        {
            step *= 0.5;
        }
    }
    return res;
}

nlohmann::json to_json(const PilotBook &book)
{
    nlohmann::json pilots = nlohmann::json::array();
    for (const auto &p : book.pilots)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < p.rows(); ++r)
        {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < p.cols(); ++c)
                row.push_back({p(r, c).real(), p(r, c).imag()});
            rows.push_back(row);
        }
        pilots.push_back(rows);
    }
    return {{"users", book.users},
            {"antennas", book.antennas},
            {"length", book.length},
            {"power", book.power},
            {"pilots", pilots}};
}

PilotBook pilots_from_json(const nlohmann::json &j)
{
    PilotBook book;
    try
    {
        book.users = j.at("users").get<std::size_t>();
        book.antennas = j.at("antennas").get<std::size_t>();
        book.length = j.at("length").get<std::size_t>();
        book.power = j.at("power").get<double>();
        for (const auto &rows : j.at("pilots"))
        {
            MatrixXcd p(static_cast<Eigen::Index>(book.antennas), static_cast<Eigen::Index>(book.length));
            if (rows.size() != book.antennas)
                throw InvalidArgument("pilots_from_json: wrong row count");
            for (std::size_t r = 0; r < rows.size(); ++r)
            {
                if (rows[r].size() != book.length)
                    throw InvalidArgument("pilots_from_json: wrong column count");
                for (std::size_t c = 0; c < rows[r].size(); ++c)
                    p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {rows[r][c].at(0).get<double>(),
                                                                                     rows[r][c].at(1).get<double>()};
            }
            book.pilots.push_back(p);
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        throw InvalidArgument(std::string("pilots_from_json: ") + e.what());
    }
    book.validate();
    return book;
}

} // namespace fdx
