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

#include "fdx/experiment.hpp"

#include "fdx/anece.hpp"
#include "fdx/blind.hpp"
#include "fdx/netopt.hpp"
#include "fdx/secrecy.hpp"
#include "fdx/sicancel.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

namespace fdx
{

using nlohmann::json;

namespace
{

enum class PType
{
    Number,
    Integer,
    Bool,
    String,
    NumberList,
    IntegerList
};

enum class Bound
{
    Any,
    NonNegative,
    Positive
};

struct ParamDef
{
    std::string name;
    PType type;
    json def;
    Bound bound = Bound::Any;
    std::vector<std::string> choices = {};
};

using Table = std::vector<ParamDef>;

const std::map<std::string, Table> &param_tables()
{
    using P = PType;
    using B = Bound;
    static const std::map<std::string, Table> tables = {
        {"sicancel",
         {{"clusters", P::Integer, 5, B::Positive},
          {"large_delay_bw", P::Number, 0.1, B::Positive},
          {"carrier_hz", P::Number, 2.4e9, B::Positive},
          {"bandwidth_hz", P::Number, 100e6, B::Positive},
          {"points", P::Integer, 201, B::Positive},
          {"si_model", P::String, "single-path", B::Any, {"single-path", "multipath"}},
          {"si_delay_fraction", P::Number, 0.5, B::NonNegative},
          {"si_amplitude", P::Number, 0.5, B::Positive},
          {"si_phase_deg", P::Number, 0.0},
          {"si_taps", P::Integer, 3, B::Positive},
          {"si_delay_spread_s", P::Number, 5e-9, B::NonNegative},
          {"quant_step_db", P::Number, 0.5, B::NonNegative}}},
        {"blind-tune",
         {{"clusters", P::Integer, 1, B::Positive},
          {"sweeps", P::Integer, 50, B::NonNegative},
          {"measurement_samples", P::Integer, 0, B::NonNegative},
          {"carrier_hz", P::Number, 2.4e9, B::Positive},
          {"bandwidth_hz", P::Number, 100e6, B::Positive},
          {"points", P::Integer, 201, B::Positive},
          {"direct_amplitude", P::Number, 0.5, B::Positive},
          {"reflection_db", P::Number, -20.0},
          {"reflections", P::Integer, 3, B::NonNegative},
          {"reflection_spread_s", P::Number, 1e-8, B::Positive},
          {"tx_noise_power", P::Number, 0.0, B::NonNegative},
          {"pattern_move", P::Bool, true}}},
        {"tdtb",
         {{"si_taps", P::Integer, 4, B::Positive},
          {"si_delay_spread_s", P::Number, 50e-9, B::NonNegative},
          {"si_length", P::Integer, 16, B::Positive},
          {"sample_rate_hz", P::Number, 100e6, B::Positive},
          {"aux_model", P::String, "impulse", B::Any, {"impulse", "multipath"}},
          {"aux_delay", P::Integer, 0, B::NonNegative},
          {"aux_taps", P::Integer, 2, B::Positive},
          {"aux_length", P::Integer, 4, B::Positive},
          {"max_filter_length", P::Integer, 32, B::Positive}}},
        {"rate-hybrid",
         {{"n1", P::Integer, 2, B::Positive},
          {"n2", P::Integer, 2, B::Positive},
          {"eta", P::Number, 1.0, B::NonNegative},
          {"noise_power", P::Number, 1.0, B::Positive},
          {"p1", P::Number, 1.0, B::Positive},
          {"p2", P::Number, 1.0, B::Positive},
          {"tol", P::Number, 1e-10, B::Positive},
          {"max_iters", P::Integer, 2000, B::Positive}}},
        {"secrecy-map",
         {{"alpha", P::Number, 2.0, B::Positive},
          {"clamp_distance", P::Number, 0.01, B::Positive},
          {"rho", P::Number, 0.5, B::NonNegative},
          {"noise_power", P::Number, 1.0, B::Positive},
          {"power_a", P::Number, 1.0, B::NonNegative},
          {"power_b", P::Number, 1.0, B::NonNegative},
          {"x_min", P::Number, -2.0},
          {"x_max", P::Number, 2.0},
          {"y_min", P::Number, -2.0},
          {"y_max", P::Number, 2.0},
          {"nx", P::Integer, 101, B::Positive},
          {"ny", P::Integer, 101, B::Positive},
          {"jam_candidates", P::Integer, 25, B::NonNegative}}},
        {"secrecy-alloc",
         {{"subcarriers", P::Integer, 64, B::Positive},
          {"mean_ab", P::Number, 1.0, B::NonNegative},
          {"mean_ae", P::Number, 0.5, B::NonNegative},
          {"mean_be", P::Number, 0.5, B::NonNegative},
          {"mean_rho", P::Number, 0.1, B::NonNegative},
          {"noise_power", P::Number, 1.0, B::Positive},
          {"total_info_power", P::Number, 64.0, B::Positive},
          {"total_jam_power", P::Number, 64.0, B::Positive},
          {"tol", P::Number, 1e-9, B::Positive},
          {"max_iters", P::Integer, 200, B::Positive}}},
        {"eve-antennas",
         {{"alpha", P::Number, 2.0, B::Positive},
          {"clamp_distance", P::Number, 0.01, B::Positive},
          {"rho", P::Number, 0.01, B::NonNegative},
          {"noise_power", P::Number, 1.0, B::Positive},
          {"power_a", P::Number, 1.0, B::NonNegative},
          {"power_b", P::Number, 1.0, B::NonNegative},
          {"jam_power", P::Number, 1.0, B::NonNegative},
          {"eve_x", P::Number, 0.0},
          {"eve_y", P::Number, 1.0},
          {"antennas", P::IntegerList, json::array({1, 2, 4, 8, 16}), B::Positive},
          {"trials", P::Integer, 10000, B::Positive}}},
        {"anece",
         {{"users", P::Integer, 2, B::Positive},
          {"antennas", P::Integer, 2, B::Positive},
          {"length", P::Integer, 4, B::Positive},
          {"power", P::Number, 1.0, B::Positive},
          {"eve_antennas", P::Integer, 4, B::Positive},
          {"snr_db", P::NumberList, json::array({0.0, 10.0, 20.0, 30.0, 40.0})},
          {"trials", P::Integer, 1000, B::Positive},
          {"pilot_condition", P::Number, 0.0, B::NonNegative},
          {"optimize", P::Bool, false},
          {"optimize_snr_db", P::Number, 20.0},
          {"optimize_iters", P::Integer, 500, B::Positive}}},
    };
    return tables;
}

std::string type_name(PType t)
{
    switch (t)
    {
    case PType::Number:
        return "a number";
    case PType::Integer:
        return "a non-negative integer";
    case PType::Bool:
        return "a boolean";
    case PType::String:
        return "a string";
    case PType::NumberList:
        return "an array of numbers";
    case PType::IntegerList:
        return "an array of non-negative integers";
    }
    return "";
}

bool is_count(const json &v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); }

bool bound_ok(double v, Bound b)
{
    switch (b)
    {
    case Bound::Any:
        return std::isfinite(v);
    case Bound::NonNegative:
        return std::isfinite(v) && v >= 0.0;
    case Bound::Positive:
        return std::isfinite(v) && v > 0.0;
    }
    return false;
}

std::string bound_text(Bound b)
{
    return b == Bound::Positive ? "positive" : b == Bound::NonNegative ? "non-negative" : "finite";
}

json resolve_value(const std::string &kind, const ParamDef &def, const json &v)
{
    const std::string where = "parameter \"" + def.name + "\" of kind " + kind;
    auto bad_type = [&] { return ConfigError(where + " must be " + type_name(def.type)); };
    auto check_number = [&](double x) {
        if (!bound_ok(x, def.bound))
            throw ConfigError(where + " must be " + bound_text(def.bound));
        return x;
    };
    switch (def.type)
    {
    case PType::Number:
        if (!v.is_number())
            throw bad_type();
        return check_number(v.get<double>());
    case PType::Integer:
        if (!is_count(v))
            throw bad_type();
        check_number(static_cast<double>(v.get<std::uint64_t>()));
        return v.get<std::uint64_t>();
    case PType::Bool:
        if (!v.is_boolean())
            throw bad_type();
        return v;
    case PType::String:
        if (!v.is_string())
            throw bad_type();
        if (!def.choices.empty() &&
            std::find(def.choices.begin(), def.choices.end(), v.get<std::string>()) == def.choices.end())
        {
            std::string list;
            for (const auto &c : def.choices)
                list += (list.empty() ? "" : ", ") + c;
            throw ConfigError(where + " must be one of: " + list);
        }
        return v;
    case PType::NumberList:
    {
        if (!v.is_array() || v.empty())
            throw bad_type();
        json out = json::array();
        for (const auto &e : v)
        {
            if (!e.is_number())
                throw bad_type();
            out.push_back(check_number(e.get<double>()));
        }
        return out;
    }
    case PType::IntegerList:
    {
        if (!v.is_array() || v.empty())
            throw bad_type();
        json out = json::array();
        for (const auto &e : v)
        {
            if (!is_count(e))
                throw bad_type();
            check_number(static_cast<double>(e.get<std::uint64_t>()));
            out.push_back(e.get<std::uint64_t>());
        }
        return out;
    }
    }
    throw bad_type();
}

std::string kinds_list()
{
    std::string list;
    for (const auto &k : experiment_kinds())
        list += (list.empty() ? "" : ", ") + k;
    return list;
}

// --- output helpers ---

class Csv
{
public:
    explicit Csv(const std::string &header) { os_ << header << '\n'; }

    template <class... Ts>
    void row(const Ts &...values)
    {
        bool first = true;
        ((os_ << (first ? "" : ",") << fmt(values), first = false), ...);
        os_ << '\n';
    }

    std::string str() const { return os_.str(); }

private:
    static std::string fmt(double v)
    {
        std::ostringstream s;
        s.imbue(std::locale::classic());
        s << std::setprecision(17) << v;
        return s.str();
    }
    static std::string fmt(std::size_t v) { return std::to_string(v); }
    static std::string fmt(int v) { return std::to_string(v); }
    static std::string fmt(const std::string &v) { return v; }
    static std::string fmt(const char *v) { return v; }

    std::ostringstream os_;
};

std::string dump(const json &j) { return j.dump(2) + "\n"; }

json matrix_json(const Eigen::MatrixXcd &m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

json settings_json(const AttenuatorSettings &s)
{
    json out = json::array();
    for (const auto &c : s.gains())
        out.push_back({c[0], c[1], c[2], c[3]});
    return out;
}

double num(const json &p, const char *key) { return p.at(key).get<double>(); }
std::size_t count(const json &p, const char *key) { return p.at(key).get<std::size_t>(); }

FrequencyGrid grid_from(const json &p)
{
    FrequencyGrid g{num(p, "carrier_hz"), num(p, "bandwidth_hz"), count(p, "points")};
    g.validate();
    return g;
}

// --- experiments ---

using Outputs = std::vector<OutputFile>;

Outputs run_sicancel(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const FrequencyGrid grid = grid_from(p);
    const CancellerConfig cfg = CancellerConfig::standard(count(p, "clusters"), grid, num(p, "large_delay_bw"));
    cfg.validate();

    const MultipathChannel si_channel =
        p.at("si_model") == "single-path"
            ? MultipathChannel::single_path(num(p, "si_delay_fraction") * cfg.span_s(),
                                            std::polar(num(p, "si_amplitude"), num(p, "si_phase_deg") * std::numbers::pi / 180.0))
            : sample_multipath(derive_seed(spec.seed, 0), count(p, "si_taps"), num(p, "si_delay_spread_s"),
                               num(p, "si_amplitude") * num(p, "si_amplitude"));
    const ComplexSpectrum si = frequency_response(si_channel, grid);
    const FitResult fit = fit_attenuators(si, cfg);
    const ResidualReport rep = residual_report(si, canceller_response(cfg, fit.settings));

    Outputs out;
    std::ostringstream csv;
    rep.write_csv(csv);
    out.push_back({"residual.csv", csv.str()});

    json summary = {{"worst_db", rep.worst_db},
                    {"mean_db", rep.mean_db},
                    {"iterations", fit.iterations},
                    {"settings", settings_json(fit.settings)},
                    {"si_channel", to_json(si_channel)},
                    {"validity", cfg.validity().flags}};
    if (num(p, "quant_step_db") > 0.0)
    {
        const AttenuatorSettings q = quantize_settings(fit.settings, {num(p, "quant_step_db"), -60.0});
        const ResidualReport qrep = residual_report(si, canceller_response(cfg, q));
        std::ostringstream qcsv;
        qrep.write_csv(qcsv);
        out.push_back({"residual_quantized.csv", qcsv.str()});
        summary["quantized_worst_db"] = qrep.worst_db;
        summary["quantized_mean_db"] = qrep.mean_db;
        summary["quantized_settings"] = settings_json(q);
    }
    out.push_back({"fit.json", dump(summary)});
    return out;
}

Outputs run_blind(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const FrequencyGrid grid = grid_from(p);
    BlindLoopModel model;
    model.g_config = CancellerConfig::standard(count(p, "clusters"), grid);
    model.g = AttenuatorSettings(count(p, "clusters"));
    model.tx_noise_power = num(p, "tx_noise_power");
    const std::size_t samples = count(p, "measurement_samples");
    model.measurement_samples = samples == 0 ? BlindLoopModel::noiseless : samples;

    std::mt19937_64 rng(derive_seed(spec.seed, 0));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Tap> taps;
    {
        const double delay = u(rng) * model.g_config.span_s();
        const double phase = two_pi * u(rng);
        taps.push_back({delay, std::polar(num(p, "direct_amplitude"), phase)});
    }
    for (std::size_t k = 0; k < count(p, "reflections"); ++k)
    {
        const double delay = u(rng) * num(p, "reflection_spread_s");
        const double phase = two_pi * u(rng);
        const double amp =
            num(p, "direct_amplitude") * std::pow(10.0, (num(p, "reflection_db") - 10.0 * static_cast<double>(k)) / 20.0);
        taps.push_back({delay, std::polar(amp, phase)});
    }
    model.h2 = MultipathChannel(taps);
    model.validate();

    BlindTuneOptions opts;
    opts.pattern_move = p.at("pattern_move").get<bool>();
    const BlindTuneResult res = blind_tune(model, count(p, "sweeps"), derive_seed(spec.seed, 1), opts);
    const FitResult oracle = fit_attenuators(equivalent_target(model), model.g_config);

    Csv trace("sweep,measured_power_db");
    for (std::size_t i = 0; i < res.trace.size(); ++i)
        trace.row(i, power_db(res.trace[i]));

    BlindLoopModel tuned = model;
    tuned.g = res.settings;
    const NoiseFloors floors = tx_noise_floor_compare(tuned, grid);
    json summary = {{"blind_residual_db", power_db(residual_power(model, res.settings))},
                    {"fit_residual_db", power_db(residual_power(model, oracle.settings))},
                    {"measurements", res.measurements},
                    {"settings", settings_json(res.settings)},
                    {"si_channel", to_json(model.h2)},
                    {"baseband_ref_floor_db", floors.baseband_ref_floor_db},
                    {"rf_tap_floor_db", floors.rf_tap_floor_db}};
    return {{"trace.csv", trace.str()}, {"blind.json", dump(summary)}};
}

Outputs run_tdtb(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const double fs = num(p, "sample_rate_hz");
    const auto si = sample_to_fir(
        sample_multipath(derive_seed(spec.seed, 0), count(p, "si_taps"), num(p, "si_delay_spread_s"), 1.0), fs,
        count(p, "si_length"));
    std::vector<cplx> aux;
    if (p.at("aux_model") == "impulse")
    {
        aux.assign(count(p, "aux_delay") + 1, cplx{0.0, 0.0});
        aux.back() = 1.0;
    }
    else
    {
        aux = sample_to_fir(sample_multipath(derive_seed(spec.seed, 1), count(p, "aux_taps"),
                                             num(p, "si_delay_spread_s"), 1.0),
                            fs, count(p, "aux_length"));
    }

    Csv csv("filter_length,residual_db,normal_equation_residual");
    for (std::size_t len = 1; len <= count(p, "max_filter_length"); ++len)
    {
        const TdtbFilter f = design_tdtb(si, aux, len);
        csv.row(len, f.residual_db, f.normal_equation_residual);
    }
    return {{"tdtb.csv", csv.str()}};
}

Outputs run_rate(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const MimoLink link = random_link(derive_seed(spec.seed, 0), static_cast<Eigen::Index>(count(p, "n1")),
                                      static_cast<Eigen::Index>(count(p, "n2")), num(p, "eta"), num(p, "noise_power"),
                                      num(p, "p1"), num(p, "p2"));
    const ScheduleResult res = optimize_schedule(link, num(p, "tol"), count(p, "max_iters"));

    Csv trace("iteration,rate");
    for (std::size_t i = 0; i < res.trace.size(); ++i)
        trace.row(i, res.trace[i]);

    json q = json::array();
    for (std::size_t node = 0; node < 2; ++node)
        q.push_back({matrix_json(res.schedule.q[node][0]), matrix_json(res.schedule.q[node][1])});
    json doc = {{"rate", res.rate},
                {"converged", res.converged},
                {"iterations", res.iterations},
                {"half_duplex_rate", pair_sum_rate(link, half_duplex_schedule(link))},
                {"isolated_rate", pair_sum_rate(link, isolated_schedule(link))},
                {"covariances", q}};
    return {{"trace.csv", trace.str()}, {"schedule.json", dump(doc)}};
}

SecrecyScenario scenario_from(const json &p)
{
    SecrecyScenario s;
    s.pathloss = {num(p, "alpha"), num(p, "clamp_distance")};
    s.noise_power = num(p, "noise_power");
    s.power_a = num(p, "power_a");
    s.power_b = num(p, "power_b");
    s.rho = num(p, "rho");
    if (p.contains("jam_power"))
        s.jam_power = num(p, "jam_power");
    s.validate();
    return s;
}

Outputs run_secrecy_map(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const SecrecyScenario scn = scenario_from(p);
    const RegionGrid grid{num(p, "x_min"), num(p, "x_max"), num(p, "y_min"), num(p, "y_max"), count(p, "nx"),
                          count(p, "ny")};
    const auto ladder = default_jam_ladder(count(p, "jam_candidates"));
    const RegionMap map = positivity_map(scn, grid, ladder);

    Csv csv("x,y,class,best_S,best_PJ");
    for (const auto &c : map.cells)
        csv.row(c.eve.x, c.eve.y, c.cls == CellClass::PositiveSecrecy ? "positive" : "zero", c.best_rate,
                c.best_jam_power);
    json dis = json::array();
    for (const auto &pt : map.analytic_disagreements)
        dis.push_back({pt.x, pt.y});
    json doc = {{"cells", map.cells.size()}, {"zero_cells", map.zero_count()}, {"analytic_disagreements", dis}};
    return {{"map.csv", csv.str()}, {"region.json", dump(doc)}};
}

Outputs run_secrecy_alloc(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const SubcarrierSet set =
        sample_subcarriers(derive_seed(spec.seed, 0), count(p, "subcarriers"), num(p, "mean_ab"), num(p, "mean_ae"),
                           num(p, "mean_be"), num(p, "mean_rho"), num(p, "noise_power"), num(p, "total_info_power"),
                           num(p, "total_jam_power"));
    const AllocationResult res = allocate_subcarrier_powers(set, num(p, "tol"), count(p, "max_iters"));

    Csv alloc("k,pA,pJ,S_k");
    for (std::size_t k = 0; k < set.size(); ++k)
        alloc.row(k, res.allocation.info[k], res.allocation.jam[k],
                  subcarrier_secrecy(set, k, res.allocation.info[k], res.allocation.jam[k]));
    Csv trace("iteration,secrecy_rate");
    for (std::size_t i = 0; i < res.trace.size(); ++i)
        trace.row(i, res.trace[i]);
    json doc = {{"secrecy_rate", res.secrecy_rate},
                {"uniform_rate", total_secrecy(set, uniform_allocation(set))},
                {"iterations", res.iterations},
                {"converged", res.converged}};
    return {{"allocation.csv", alloc.str()}, {"trace.csv", trace.str()}, {"allocation.json", dump(doc)}};
}

Outputs run_eve_antennas(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const SecrecyScenario scn = scenario_from(p);
    const auto counts = p.at("antennas").get<std::vector<std::size_t>>();
    const auto pts =
        secrecy_vs_eve_antennas(scn, {num(p, "eve_x"), num(p, "eve_y")}, counts, count(p, "trials"), spec.seed);
    Csv csv("N,median_S");
    for (const auto &pt : pts)
        csv.row(pt.antennas, pt.median_rate);
    return {{"eve_antennas.csv", csv.str()}};
}

Outputs run_anece(const ExperimentSpec &spec)
{
    const json &p = spec.params;
    const std::size_t k = count(p, "users"), n = count(p, "antennas"), len = count(p, "length");
    const double cond = num(p, "pilot_condition");
    PilotBook book = cond > 0.0 ? ill_conditioned_pilots(k, n, len, num(p, "power"), cond, derive_seed(spec.seed, 0))
                                : build_pilots(k, n, len, num(p, "power"), derive_seed(spec.seed, 0));
    Outputs out;
    json doc;
    if (p.at("optimize").get<bool>())
    {
        const PilotOptimization opt = optimize_pilots(book, num(p, "optimize_snr_db"), count(p, "optimize_iters"));
        Csv trace("iteration,user_sum_mse_db");
        for (std::size_t i = 0; i < opt.trace.size(); ++i)
            trace.row(i, power_db(opt.trace[i]));
        out.push_back({"optimization.csv", trace.str()});
        doc["optimization"] = {{"initial_db", power_db(opt.trace.front())},
                               {"final_db", power_db(opt.trace.back())},
                               {"iterations", opt.iterations},
                               {"converged", opt.converged}};
        book = opt.book;
    }
    const auto snr = p.at("snr_db").get<std::vector<double>>();
    const EstimationReport rep = simulate_estimation(book, count(p, "eve_antennas"), snr, count(p, "trials"),
                                                     derive_seed(spec.seed, 1));
    const RankReport ranks = verify_ranks(book);

    Csv csv("snr_db,user_mse_db,eve_mse_db");
    for (std::size_t i = 0; i < snr.size(); ++i)
        csv.row(snr[i], rep.user_mse_db[i], rep.eve_mse_db[i]);
    out.insert(out.begin(), {"anece.csv", csv.str()});

    doc["ranks"] = {{"leave_one_out", ranks.leave_one_out_ranks},
                    {"full_stack", ranks.full_rank},
                    {"all_ok", ranks.all_ok()}};
    doc["ambiguity_dimension"] = ranks.ambiguity_dimension;
    doc["eve_floor_db"] = power_db(rep.eve_floor);
    doc["user_noiseless_mse"] = rep.user_noiseless_mse;
    doc["pilots"] = to_json(book);
    out.push_back({"anece.json", dump(doc)});
    return out;
}

const std::map<std::string, std::function<Outputs(const ExperimentSpec &)>> &runners()
{
    static const std::map<std::string, std::function<Outputs(const ExperimentSpec &)>> r = {
        {"sicancel", run_sicancel},       {"blind-tune", run_blind},
        {"tdtb", run_tdtb},               {"rate-hybrid", run_rate},
        {"secrecy-map", run_secrecy_map}, {"secrecy-alloc", run_secrecy_alloc},
        {"eve-antennas", run_eve_antennas}, {"anece", run_anece}};
    return r;
}

} // namespace

const std::vector<std::string> &experiment_kinds()
{
    static const std::vector<std::string> kinds = {"sicancel",    "blind-tune",    "tdtb",         "rate-hybrid",
                                                   "secrecy-map", "secrecy-alloc", "eve-antennas", "anece"};
    return kinds;
}

json default_params(const std::string &kind)
{
    const auto it = param_tables().find(kind);
    if (it == param_tables().end())
        throw ConfigError("unknown kind \"" + kind + "\"; valid kinds: " + kinds_list());
    json out = json::object();
    for (const auto &d : it->second)
        out[d.name] = resolve_value(kind, d, d.def);
    return out;
}

ExperimentSpec parse_config(std::string_view text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        std::size_t line = 1, column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                column = 1;
            }
            else
                ++column;
        }
        throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config must be a JSON object");

    for (const auto &[key, value] : doc.items())
        if (key != "kind" && key != "seed" && key != "output_dir" && key != "params")
            throw ConfigError("unknown key \"" + key + "\"");

    ExperimentSpec spec;
    if (!doc.contains("kind"))
        throw ConfigError("missing required key \"kind\"");
    if (!doc["kind"].is_string())
        throw ConfigError("key \"kind\" must be a string");
    spec.kind = doc["kind"].get<std::string>();
    const auto table = param_tables().find(spec.kind);
    if (table == param_tables().end())
        throw ConfigError("unknown kind \"" + spec.kind + "\"; valid kinds: " + kinds_list());

    if (doc.contains("seed"))
    {
        if (!is_count(doc["seed"]))
            throw ConfigError("key \"seed\" must be a non-negative integer");
        spec.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output_dir"))
    {
        if (!doc["output_dir"].is_string())
            throw ConfigError("key \"output_dir\" must be a string");
        spec.output_dir = doc["output_dir"].get<std::string>();
    }

    const json given = doc.value("params", json::object());
    if (!given.is_object())
        throw ConfigError("key \"params\" must be an object");
    for (const auto &[key, value] : given.items())
    {
        const auto def = std::find_if(table->second.begin(), table->second.end(),
                                      [&](const ParamDef &d) { return d.name == key; });
        if (def == table->second.end())
            throw ConfigError("unknown parameter \"" + key + "\" for kind " + spec.kind);
    }
    for (const auto &d : table->second)
        spec.params[d.name] = resolve_value(spec.kind, d, given.contains(d.name) ? given[d.name] : d.def);
    return spec;
}

json to_json(const ExperimentSpec &spec)
{
    return {{"kind", spec.kind}, {"seed", spec.seed}, {"output_dir", spec.output_dir}, {"params", spec.params}};
}

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::vector<OutputFile> compute_outputs(const ExperimentSpec &spec)
{
    const auto it = runners().find(spec.kind);
    if (it == runners().end())
        throw ConfigError("unknown kind \"" + spec.kind + "\"; valid kinds: " + kinds_list());

    Outputs files;
    try
    {
        files = it->second(spec);
    }
    catch (const ConfigError &)
    {
        throw;
    }
    catch (const std::exception &e)
    {
        throw std::runtime_error("experiment " + spec.kind + ": " + e.what());
    }

    json entries = json::array();
    for (const auto &f : files)
        entries.push_back({{"name", f.name}, {"sha256", sha256_hex(f.content)}, {"bytes", f.content.size()}});
    const json manifest = {{"tool", "fdxlab"},
                           {"version", FDXLAB_VERSION},
                           {"kind", spec.kind},
                           {"seed", spec.seed},
                           {"params", spec.params},
                           {"files", entries}};
    files.push_back({"manifest.json", dump(manifest)});
    return files;
}

std::vector<ManifestEntry> run_experiment(const ExperimentSpec &spec)
{
    const auto files = compute_outputs(spec);
    namespace fs = std::filesystem;
    const fs::path dir(spec.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<ManifestEntry> entries;
    for (const auto &f : files)
    {
        const fs::path path = dir / f.name;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
        os.close();
        if (!os)
            throw std::runtime_error("cannot write " + path.string());
        if (f.name != "manifest.json")
            entries.push_back({f.name, sha256_hex(f.content), f.content.size()});
    }
    return entries;
}

} // namespace fdx
