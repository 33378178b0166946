#pragma once

#include "toruslab/serialize.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace toruslab {

inline constexpr const char* kToolVersion = "0.1.0";

// "golden", "sqrt2", "fig1", "fig2-left", "fig2-right", "w-construct", "rapid-growth",
// or a comma-separated quotient list.
Angle named_angle(const std::string& spec);

// Quotients 0, a_1..a_depth drawn uniformly from [1, max_quotient].
Angle random_angle(std::mt19937_64& rng, std::int64_t max_quotient, int depth);

// Parses "1e7", "100000" and similar into a count.
std::int64_t parse_count(const std::string& text);

std::vector<std::string> preset_names();
// Defaults of the named preset with the overrides merged on top, validated.
Json preset_config(const std::string& name, const Json& overrides = Json::object());

struct OutputFile {
    std::string name;
    std::string bytes;
};

struct PresetOutput {
    Json config;
    Json summary;
    std::vector<OutputFile> files;
};

PresetOutput compute_preset(const std::string& name, const Json& overrides = Json::object());

struct Artifact {
    std::string name;
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct RunManifest {
    std::string command;
    Json config = Json::object();
    std::string tool_version = kToolVersion;
    std::string started;
    std::string finished;
    std::vector<Artifact> outputs;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

std::string utc_timestamp();

// Writes the files and a manifest.json into out_dir (created if missing).
RunManifest write_outputs(const std::string& command, const Json& config,
                          const std::vector<OutputFile>& files, const std::string& out_dir,
                          const std::string& started);

RunManifest run_preset(const std::string& name, const Json& overrides, const std::string& out_dir);

struct ReplayResult {
    bool identical = false;
    std::vector<std::string> mismatches;
    RunManifest rerun;
};

// Re-executes a recorded preset or sweep run into out_dir and compares digests.
ReplayResult replay_manifest(const std::string& manifest_path, const std::string& out_dir);

struct VerifyConfig {
    std::optional<std::vector<Integer>> quotients;
    int samples = 100;
    std::uint64_t seed = 1;
    std::optional<Mode> mode;
    // Tag-specific instance fields; when the tag's instance keys are present a single
    // user instance is checked instead of sampling.
    Json params = Json::object();
};

struct VerifyReport {
    std::string tag;
    int samples = 0;
    int passed = 0;
    int failed = 0;
    int undecided = 0;
    int hypothesis_violated = 0;
    int condition_flags = 0;
    int exact_checks = 0;
    int double_checks = 0;
    double worst_slack = 0.0;
    bool user_instance = false;
    Json instances = Json::array();
    Json details = Json::object();

    // 2 when an admissible instance failed or was undecided, or a user instance broke a hypothesis.
    int exit_code() const;
};

Json to_json(const VerifyReport& r);

std::vector<std::string> verify_tags();
VerifyReport verify_suite(const std::string& tag, const VerifyConfig& config);

struct SweepRow {
    std::size_t cell = 0;
    std::string angle;
    std::string beta_recipe;
    std::string beta;
    double K = 0.0;
    int depth = 0;
    std::string status;  // ok, hypothesis-violated, error
    std::string regime;
    std::string predicted_pomega;
    std::int64_t m = 0;
    double theta = 0.0;
    bool dominance = false;
    std::string detail;
};

// Grid keys: angles, betas, K, depth (arrays), seed. Cells run on TORUSLAB_THREADS workers
// (or `threads` when positive); rows come back in cell order. Cells already present in
// `completed` with status ok are kept as they are.
std::vector<SweepRow> sweep(const Json& grid, int threads = 0,
                            const std::vector<SweepRow>& completed = {});
std::string sweep_csv(const std::vector<SweepRow>& rows);
// Rows parsed back from sweep_csv output, for resuming a partial run.
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

}  // namespace toruslab
