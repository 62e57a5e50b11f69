#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pmnet/data.hpp"
#include "pmnet/gradcheck.hpp"

namespace pmnet {

/// Flat key-value run configuration: config-file entries overridden by CLI
/// flags (flags win); the PMNET_OUT_DIR environment variable overrides the
/// config file's out_dir but not an explicit --out-dir flag.
class RunConfig {
public:
    RunConfig() = default;

    /// Parses `key = value` lines; '#' starts a comment.
    static RunConfig from_file(const std::string& path);
    static RunConfig from_text(const std::string& text, const std::string& origin = "config");

    void set(const std::string& key, const std::string& value);
    void set_flag(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    bool from_cli(const std::string& key) const { return flag_keys_.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::size_t> get_size_list(const std::string& key,
                                           const std::vector<std::size_t>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> flag_keys_;
};

PipelineConfig pipeline_from_config(const RunConfig& config);
SynthConfig synth_from_config(const RunConfig& config);
GradCheckConfig gradcheck_from_config(const RunConfig& config);

/// Output directory resolution (see RunConfig); created on demand.
std::string resolve_out_dir(const RunConfig& config);

int cmd_synth(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);
int cmd_ablate(const RunConfig& config);
int cmd_gradcheck(const RunConfig& config);

}  // namespace pmnet
