#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nf/grid.hpp"
#include "nf/nehari.hpp"
#include "nf/system_solver.hpp"

namespace nf {

/// Parsed flat-sectioned key-value file: [section] headers, `key = value`
/// lines, comma-list arrays, and matrices as one indented row per line after
/// a bare `key =`.
class ConfigFile {
public:
    struct Entry {
        std::string value;
        std::vector<std::string> matrix_rows;
        int line = 0;
    };

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& name = "<config>");

    bool has(const std::string& section, const std::string& key) const;
    const Entry& entry(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    std::vector<double> get_array(const std::string& section, const std::string& key) const;
    /// n x n row-major matrix from one indented row per line.
    std::vector<double> get_matrix(const std::string& section, const std::string& key, int n) const;

    const std::map<std::string, std::map<std::string, Entry>>& sections() const {
        return sections_;
    }
    const std::string& name() const { return name_; }

private:
    [[noreturn]] void fail(const std::string& msg, int line) const;

    std::string name_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// Block for the shared-profile growth experiment.
struct UnboundedConfig {
    double mu = 1.0;
    double q = 2.0;
    std::vector<double> a_list;
};

/// Fully validated run configuration.
struct RunConfig {
    Domain domain = Domain::interval(1.0, 3);
    SystemParams params;
    ContinuationConfig solver;
    std::uint64_t seed = 0;
    std::string output_prefix = "run";
    int workers = 1;
    std::vector<double> sweep_multipliers;
    UnboundedConfig unbounded;
    std::map<std::string, double> selftest_tolerances;
};

/// Loads and validates a run configuration; messages carry file:line context.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_string(const std::string& text, const std::string& name = "<config>");

} // namespace nf
