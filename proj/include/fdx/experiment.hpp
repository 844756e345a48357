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

// Scenario-driven experiment runner.
//
// A config is a JSON object
//   { "kind": "...", "seed": 1, "output_dir": "out", "params": { ... } }
// where only "kind" is required. Every kind has a fixed parameter table with
// defaults; unknown keys and ill-typed values are rejected.

#ifndef FDX_EXPERIMENT_HPP
#define FDX_EXPERIMENT_HPP

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fdx
{

/// Malformed JSON or a config that fails validation.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentSpec
{
    std::string kind;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    nlohmann::json params = nlohmann::json::object(); ///< fully resolved, defaults filled
};

const std::vector<std::string> &experiment_kinds();

/// Default parameter object of a kind.
nlohmann::json default_params(const std::string &kind);

ExperimentSpec parse_config(std::string_view text);

/// The resolved spec as a JSON document (what `fdxlab validate` prints).
nlohmann::json to_json(const ExperimentSpec &spec);

struct OutputFile
{
    std::string name;
    std::string content;
};

/// Runs the experiment and returns its outputs in memory, manifest.json last.
std::vector<OutputFile> compute_outputs(const ExperimentSpec &spec);

struct ManifestEntry
{
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
};

/// compute_outputs, then writes every file into spec.output_dir (created if
/// needed). Returns the manifest entries of the data files.
std::vector<ManifestEntry> run_experiment(const ExperimentSpec &spec);

std::string sha256_hex(std::string_view data);

} // namespace fdx

#endif
