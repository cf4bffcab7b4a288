#include "nf/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace nf {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& s) {
    const std::size_t pos = s.find('#');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

double parse_number(const std::string& tok, const std::string& where, int line,
                    const std::string& name) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ConfigError(name + ":" + std::to_string(line) + ": '" + tok +
                          "' is not a number in " + where);
    }
    if (used != tok.size())
        throw ConfigError(name + ":" + std::to_string(line) + ": trailing characters after '" +
                          tok + "' in " + where);
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& where, int line,
                               const std::string& name) {
    std::vector<double> out;
    std::string normalized = text;
    for (char& c : normalized)
        if (c == ',') c = ' ';
    std::istringstream stream(normalized);
    std::string tok;
    while (stream >> tok) out.push_back(parse_number(tok, where, line, name));
    if (out.empty())
        throw ConfigError(name + ":" + std::to_string(line) + ": empty list in " + where);
    return out;
}

} // namespace

void ConfigFile::fail(const std::string& msg, int line) const {
    throw ConfigError(name_ + ":" + std::to_string(line) + ": " + msg);
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
    ConfigFile cfg;
    cfg.name_ = name;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    Entry* open_matrix = nullptr;
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string no_comment = strip_comment(raw);
        const std::string line = trim(no_comment);
        const bool indented =
            !no_comment.empty() && std::isspace(static_cast<unsigned char>(no_comment.front()));

        if (line.empty()) {
            open_matrix = nullptr;
            continue;
        }

        if (line.front() == '[') {
            open_matrix = nullptr;
            if (line.back() != ']') cfg.fail("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) cfg.fail("empty section name", line_no);
            cfg.sections_[section];
            continue;
        }

        if (indented && open_matrix != nullptr) {
            open_matrix->matrix_rows.push_back(line);
            continue;
        }
        open_matrix = nullptr;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            cfg.fail("expected 'key = value', a '[section]' header, or an indented matrix row",
                     line_no);
        if (section.empty()) cfg.fail("key appears before any [section] header", line_no);

        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) cfg.fail("empty key", line_no);

        auto [it, inserted] = cfg.sections_[section].emplace(key, Entry{value, {}, line_no});
        if (!inserted)
            cfg.fail("duplicate key '" + key + "' (first defined at line " +
                         std::to_string(it->second.line) + ")",
                     line_no);
        if (value.empty()) open_matrix = &it->second;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

const ConfigFile::Entry& ConfigFile::entry(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) throw ConfigError(name_ + ": missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw ConfigError(name_ + ": missing key '" + key + "' in section [" + section + "]");
    return k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    if (e.value.empty()) fail("key '" + key + "' needs a scalar value", e.line);
    return parse_number(e.value, "[" + section + "] " + key, e.line, name_);
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const double v = get_double(section, key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        fail("key '" + key + "' needs an integer", entry(section, key).line);
    return i;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const Entry& e = entry(section, key);
    try {
        return std::stoull(e.value);
    } catch (const std::exception&) {
        fail("key '" + key + "' needs a nonnegative integer", e.line);
    }
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    return has(section, key) ? entry(section, key).value : fallback;
}

std::vector<double> ConfigFile::get_array(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    if (e.value.empty()) fail("key '" + key + "' needs a comma list", e.line);
    return parse_list(e.value, "[" + section + "] " + key, e.line, name_);
}

std::vector<double> ConfigFile::get_matrix(const std::string& section, const std::string& key,
                                           int n) const {
    const Entry& e = entry(section, key);
    if (!e.value.empty())
        fail("key '" + key + "' must be a matrix: put each row on its own indented line after '" +
                 key + " ='",
             e.line);
    if (static_cast<int>(e.matrix_rows.size()) != n)
        fail("matrix '" + key + "' needs " + std::to_string(n) + " rows, got " +
                 std::to_string(e.matrix_rows.size()),
             e.line);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        const std::vector<double> row =
            parse_list(e.matrix_rows[r], "row " + std::to_string(r + 1) + " of matrix '" + key + "'",
                       e.line + r + 1, name_);
        if (static_cast<int>(row.size()) != n)
            fail("row " + std::to_string(r + 1) + " of matrix '" + key + "' needs " +
                     std::to_string(n) + " entries, got " + std::to_string(row.size()),
                 e.line);
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

namespace {

const std::map<std::string, std::vector<std::string>> known_keys = {
    {"domain", {"dimension", "lengths", "nodes"}},
    {"params", {"ell", "p", "mu", "lambda", "alpha", "beta"}},
    {"solver",
     {"newton_tol", "newton_max_iter", "dt_initial", "dt_min", "r_guard_factor", "r_guard",
      "seed"}},
    {"output", {"prefix"}},
    {"sweep", {"multipliers", "workers"}},
    {"unbounded", {"mu", "q", "a_list", "workers"}},
};

void check_known_keys(const ConfigFile& cfg) {
    for (const auto& [section, keys] : cfg.sections()) {
        if (section == "selftest") continue; // free-form tolerance overrides
        const auto it = known_keys.find(section);
        if (it == known_keys.end())
            throw ConfigError(cfg.name() + ": unknown section [" + section + "]");
        for (const auto& [key, e] : keys) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError(cfg.name() + ":" + std::to_string(e.line) + ": unknown key '" +
                                  key + "' in section [" + section + "]");
        }
    }
}

RunConfig build_run_config(const ConfigFile& cfg) {
    check_known_keys(cfg);
    RunConfig rc;

    const int dim = cfg.get_int("domain", "dimension", 2);
    const std::vector<double> lengths = cfg.get_array("domain", "lengths");
    const std::vector<double> nodes_raw = cfg.get_array("domain", "nodes");
    std::vector<int> nodes;
    for (double v : nodes_raw) {
        if (v != static_cast<int>(v))
            throw ConfigError(cfg.name() + ": node counts must be integers");
        nodes.push_back(static_cast<int>(v));
    }
    if (dim == 1) {
        if (lengths.size() != 1 || nodes.size() != 1)
            throw ConfigError(cfg.name() + ": 1D domains need one length and one node count");
        rc.domain = Domain::interval(lengths[0], nodes[0]);
    } else if (dim == 2) {
        if (lengths.size() != 2 || nodes.size() != 2)
            throw ConfigError(cfg.name() + ": 2D domains need two lengths and two node counts");
        rc.domain = Domain::box(lengths[0], lengths[1], nodes[0], nodes[1]);
    } else {
        throw ConfigError(cfg.name() + ": dimension must be 1 or 2");
    }

    rc.params.ell = cfg.get_int("params", "ell");
    rc.params.p = cfg.get_double("params", "p");
    rc.params.mu = cfg.get_array("params", "mu");
    if (static_cast<int>(rc.params.mu.size()) != rc.params.ell)
        throw ConfigError(cfg.name() + ": mu needs " + std::to_string(rc.params.ell) + " entries");
    rc.params.lambda = cfg.get_matrix("params", "lambda", rc.params.ell);
    rc.params.alpha = cfg.get_matrix("params", "alpha", rc.params.ell);
    rc.params.beta = cfg.get_matrix("params", "beta", rc.params.ell);
    // The diagonal is ignored; normalize it so validation sees legal values.
    for (int i = 0; i < rc.params.ell; ++i) {
        const auto k = static_cast<std::size_t>(i) * rc.params.ell + i;
        rc.params.lambda[k] = 0.0;
        rc.params.alpha[k] = 1.0;
        rc.params.beta[k] = 1.0;
    }
    try {
        rc.params.validate();
    } catch (const InvalidParamsError& e) {
        throw ConfigError(cfg.name() + ": invalid [params]: " + e.what());
    }

    rc.solver.newton_tol = cfg.get_double("solver", "newton_tol", 1e-8);
    rc.solver.newton_max_iter = cfg.get_int("solver", "newton_max_iter", 50);
    rc.solver.dt_initial = cfg.get_double("solver", "dt_initial", 0.1);
    rc.solver.dt_min = cfg.get_double("solver", "dt_min", 1e-4);
    rc.solver.r_guard_factor = cfg.get_double("solver", "r_guard_factor", 1e3);
    rc.solver.r_guard = cfg.get_double("solver", "r_guard", 0.0);
    try {
        rc.solver.validate();
    } catch (const InvalidParamsError& e) {
        throw ConfigError(cfg.name() + ": invalid [solver]: " + e.what());
    }

    rc.seed = cfg.get_u64("solver", "seed", 0);
    rc.output_prefix = cfg.get_string("output", "prefix", "run");

    if (cfg.has("sweep", "multipliers")) rc.sweep_multipliers = cfg.get_array("sweep", "multipliers");
    rc.workers = cfg.get_int("sweep", "workers", cfg.get_int("unbounded", "workers", 1));
    if (rc.workers < 1) throw ConfigError(cfg.name() + ": workers must be >= 1");

    rc.unbounded.mu = cfg.get_double("unbounded", "mu", rc.params.mu[0]);
    rc.unbounded.q = cfg.get_double("unbounded", "q", 2.0);
    if (cfg.has("unbounded", "a_list")) rc.unbounded.a_list = cfg.get_array("unbounded", "a_list");

    const auto st = cfg.sections().find("selftest");
    if (st != cfg.sections().end())
        for (const auto& [key, e] : st->second)
            rc.selftest_tolerances[key] =
                parse_number(e.value, "[selftest] " + key, e.line, cfg.name());

    return rc;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    return build_run_config(ConfigFile::parse_file(path));
}

RunConfig run_config_from_string(const std::string& text, const std::string& name) {
    return build_run_config(ConfigFile::parse_string(text, name));
}

} // namespace nf
