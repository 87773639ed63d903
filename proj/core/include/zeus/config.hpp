#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zeus/demos.hpp"
#include "zeus/eval.hpp"
#include "zeus/perturb.hpp"
#include "zeus/remote_backend.hpp"
#include "zeus/select.hpp"
#include "zeus/types.hpp"
#include "zeus/uncertainty.hpp"

namespace zeus {

struct DatasetConfig {
    std::filesystem::path path;
    TaskKind task = TaskKind::numeric();
    // When set, `path` is used unchanged as the unlabeled set and
    // `test_path` as the test set.
    bool presplit = false;
    std::filesystem::path test_path;
    double unlabeled_fraction = 0.7;
    std::optional<std::uint64_t> split_seed;  // defaults to RunConfig::seed
};

struct ProviderConfig {
    std::string backend = "mock";  // mock | remote
    std::filesystem::path mock_scenario;
    RemoteConfig remote;
    std::string embedding_backend = "fallback";  // fallback | remote
    std::string embedding_endpoint;
    std::string embedding_model;
    std::size_t embedding_dim = 256;
    std::string rephrase_model;  // empty = model under study
};

struct RunConfig {
    DatasetConfig dataset;
    std::string model_id;
    ProviderConfig provider;
    PerturbationPlan plan = default_plan();
    int k = 8;
    std::uint64_t seed = 0;
    std::vector<Strategy> strategies{kBandStrategies.begin(), kBandStrategies.end()};
    std::filesystem::path cache_dir = ".zeus-cache";
    std::filesystem::path out_dir = "zeus-out";
    DemoFilters filters;
    TempPerbConfig temp_perb;
    int runs = 3;
    std::vector<MethodSpec> methods;
    std::filesystem::path manual_demos;
};

// Replaces ${NAME} with the value of environment variable NAME. Unset
// variables are reported as errors.
std::string interpolate_env(const std::string& text, std::vector<std::string>* errors = nullptr);

// Parses a config document. Relative paths are resolved against `base_dir`.
// Every problem found is listed, one per line, in a single ValidationError.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Checks cross-field invariants (paths exist, k >= 1, backends known).
void validate_config(const RunConfig& config);

}  // namespace zeus
