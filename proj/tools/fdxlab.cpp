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

#include "fdx/common.hpp"
#include "fdx/experiment.hpp"
#include "fdx/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_validation = 2;

std::string read_file(const std::string &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void apply_thread_env()
{
    const char *env = std::getenv("FDXLAB_THREADS");
    if (!env || !*env)
        return;
    char *end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0')
        throw fdx::ConfigError("FDXLAB_THREADS must be a non-negative integer");
    fdx::set_thread_limit(static_cast<std::size_t>(v));
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"fdxlab - full-duplex radio simulation and optimization toolkit"};
    app.set_version_flag("--version", std::string(FDXLAB_VERSION));
    app.require_subcommand(1);

    std::string run_config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    auto *run = app.add_subcommand("run", "Run an experiment and write its artifacts");
    run->add_option("config", run_config, "Experiment config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_dir, "Override the output directory");

    std::string validate_config;
    auto *validate = app.add_subcommand("validate", "Validate a config and print it with defaults filled");
    validate->add_option("config", validate_config, "Experiment config (JSON)")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try
    {
        apply_thread_env();
        if (*validate)
        {
            const auto spec = fdx::parse_config(read_file(validate_config));
            std::cout << fdx::to_json(spec).dump(2) << '\n';
            return exit_ok;
        }

        auto spec = fdx::parse_config(read_file(run_config));
        if (seed)
            spec.seed = *seed;
        if (out_dir)
            spec.output_dir = *out_dir;
        const auto entries = fdx::run_experiment(spec);
        for (const auto &e : entries)
            std::cout << e.sha256 << "  " << e.name << '\n';
        std::cout << "wrote " << entries.size() + 1 << " files to " << spec.output_dir << '\n';
        return exit_ok;
    }
    catch (const fdx::ConfigError &e)
    {
        std::cerr << "fdxlab: invalid config: " << e.what() << '\n';
        return exit_validation;
    }
    catch (const std::exception &e)
    {
        std::cerr << "fdxlab: error: " << e.what() << '\n';
        return exit_runtime;
    }
}
