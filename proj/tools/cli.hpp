#pragma once

// Batch driver behind the biparam executable. `run` is separate from main so tests can call it.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace biparam::cli {

enum ExitCode : int { ok = 0, validation_error = 2, numeric_failure = 3 };

/// Flat key=value configuration; later sources override earlier ones.
struct ExperimentConfig {
    std::string subcommand;
    std::map<std::string, std::string> values;

    const std::string& get(const std::string& key) const;
    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;
    /// "16..512" doubles from 16 up to 512; "3,5,9" is taken literally.
    std::vector<int> get_sizes(const std::string& key) const;
};

/// Parses `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Default keys and values of a subcommand; throws on an unknown subcommand.
std::map<std::string, std::string> subcommand_defaults(const std::string& subcommand);
std::vector<std::string> subcommands();

/// argv-style entry point (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs one experiment from a fully merged config.
int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Merges CSV summaries; all inputs must share one known schema.
int run_report(const std::vector<std::string>& paths, const std::string& out_path, std::ostream& out, std::ostream& err);

} // namespace biparam::cli
