#include "chemobound/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace chemobound {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

using Handler = std::function<void(const IniEntry&)>;

void apply_section(const IniSection& section, const std::map<std::string, Handler>& handlers) {
    std::set<std::string> seen;
    for (const auto& e : section.entries) {
        const auto it = handlers.find(e.key);
        if (it == handlers.end()) {
            throw ConfigError("unknown key '" + e.key + "' in [" + section.name + "]", e.line);
        }
        if (!seen.insert(e.key).second) {
            throw ConfigError("duplicate key '" + e.key + "' in [" + section.name + "]", e.line);
        }
        it->second(e);
    }
}

const IniEntry* find_entry(const IniSection* section, const std::string& key) {
    if (!section) return nullptr;
    for (const auto& e : section->entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

}  // namespace

std::vector<IniSection> parse_ini(const std::string& text) {
    std::vector<IniSection> sections;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find_first_of("#;");
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", line_no);
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw ConfigError("empty section name", line_no);
            for (const auto& s : sections) {
                if (s.name == name) throw ConfigError("duplicate section [" + name + "]", line_no);
            }
            sections.push_back({name, line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        if (sections.empty()) throw ConfigError("key outside of any [section]", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
        sections.back().entries.push_back({key, value, line_no});
    }
    return sections;
}

double parse_real(const std::string& text, const std::string& field, int line) {
    const std::string s = trim(text);
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(x)) {
        throw ConfigError("'" + field + "' expects a finite number, got '" + s + "'", line);
    }
    return x;
}

long parse_integer(const std::string& text, const std::string& field, int line) {
    const std::string s = trim(text);
    char* end = nullptr;
    errno = 0;
    const long x = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw ConfigError("'" + field + "' expects an integer, got '" + s + "'", line);
    }
    return x;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& field, int line) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_real(item, field, line));
    if (out.empty()) throw ConfigError("'" + field + "' expects a nonempty list", line);
    return out;
}

void RunConfig::validate() const {
    params.validate();
    solver.validate();
    diag.validate();
    if (initial.generator != "uniform" && initial.generator != "gaussian-bump" &&
        initial.generator != "random-perturbation") {
        throw std::invalid_argument("initial: unknown generator '" + initial.generator + "'");
    }
}

RunConfig parse_run_config(const std::vector<IniSection>& sections) {
    const std::set<std::string> known{"grid", "model", "solver", "diagnostics", "initial", "run"};
    const IniSection* by_name[6] = {};
    const char* names[6] = {"grid", "model", "solver", "diagnostics", "initial", "run"};
    for (const auto& s : sections) {
        if (!known.count(s.name)) throw ConfigError("unknown section [" + s.name + "]", s.line);
        for (int i = 0; i < 6; ++i) {
            if (s.name == names[i]) by_name[i] = &s;
        }
    }
    const IniSection* grid = by_name[0];
    const IniSection* model = by_name[1];
    const IniSection* solver = by_name[2];
    const IniSection* diag = by_name[3];
    const IniSection* initial = by_name[4];
    const IniSection* runsec = by_name[5];

    RunConfig cfg;

    // [grid]
    if (!find_entry(grid, "cells")) throw ConfigError("missing required field 'cells' in [grid]");
    int dim = 0;
    std::vector<double> cells_raw, lengths_raw;
    int cells_line = 0;
    if (grid) {
        apply_section(*grid, {
            {"dim", [&](const IniEntry& e) { dim = static_cast<int>(parse_integer(e.value, "dim", e.line)); }},
            {"cells", [&](const IniEntry& e) { cells_raw = parse_real_list(e.value, "cells", e.line); cells_line = e.line; }},
            {"lengths", [&](const IniEntry& e) { lengths_raw = parse_real_list(e.value, "lengths", e.line); }},
        });
    }
    if (dim == 0) dim = static_cast<int>(cells_raw.size());
    if (dim < 1 || dim > 3) throw ConfigError("grid 'dim' must be 1, 2 or 3", cells_line);
    if (cells_raw.size() == 1) cells_raw.assign(static_cast<std::size_t>(dim), cells_raw[0]);
    if (lengths_raw.empty()) lengths_raw.assign(static_cast<std::size_t>(dim), 1.0);
    if (lengths_raw.size() == 1) lengths_raw.assign(static_cast<std::size_t>(dim), lengths_raw[0]);
    if (static_cast<int>(cells_raw.size()) != dim || static_cast<int>(lengths_raw.size()) != dim) {
        throw ConfigError("grid 'cells' and 'lengths' need one entry per axis", cells_line);
    }
    std::array<int, 3> cells{1, 1, 1};
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
        if (cells_raw[a] != std::floor(cells_raw[a])) throw ConfigError("grid 'cells' must be integers", cells_line);
        cells[a] = static_cast<int>(cells_raw[a]);
        lengths[a] = lengths_raw[a];
    }
    try {
        cfg.grid = GridSpec(dim, cells, lengths);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), cells_line);
    }

    // [model]
    for (const char* required : {"chi", "mu", "m"}) {
        if (!find_entry(model, required)) throw ConfigError(std::string("missing required field '") + required + "' in [model]");
    }
    auto real_into = [](double& target) {
        return [&target](const IniEntry& e) { target = parse_real(e.value, e.key, e.line); };
    };
    apply_section(*model, {
        {"chi", real_into(cfg.params.chi)},
        {"mu", real_into(cfg.params.mu)},
        {"m", real_into(cfg.params.m)},
        {"c_d", real_into(cfg.params.c_d)},
        {"lambda0", real_into(cfg.params.lambda0)},
    });

    // [solver]
    if (!find_entry(solver, "t_end")) throw ConfigError("missing required field 't_end' in [solver]");
    bool snapshot_set = false;
    bool dt_max_set = false;
    bool dt_init_set = false;
    apply_section(*solver, {
        {"t_end", real_into(cfg.solver.t_end)},
        {"dt_init", [&](const IniEntry& e) { cfg.solver.dt_init = parse_real(e.value, e.key, e.line); dt_init_set = true; }},
        {"dt_max", [&](const IniEntry& e) { cfg.solver.dt_max = parse_real(e.value, e.key, e.line); dt_max_set = true; }},
        {"cfl_safety", real_into(cfg.solver.cfl_safety)},
        {"snapshot_every", [&](const IniEntry& e) { cfg.solver.snapshot_every = parse_real(e.value, e.key, e.line); snapshot_set = true; }},
        {"max_linear_iters", [&](const IniEntry& e) { cfg.solver.max_linear_iters = static_cast<int>(parse_integer(e.value, e.key, e.line)); }},
        {"linear_tol", real_into(cfg.solver.linear_tol)},
        {"positivity_tol", real_into(cfg.solver.positivity_tol)},
        {"max_halvings", [&](const IniEntry& e) { cfg.solver.max_halvings = static_cast<int>(parse_integer(e.value, e.key, e.line)); }},
    });
    if (!snapshot_set) cfg.solver.snapshot_every = cfg.solver.t_end / 10.0;
    if (!dt_max_set) cfg.solver.dt_max = std::min(0.05, cfg.solver.t_end / 20.0);
    if (!dt_init_set) cfg.solver.dt_init = std::min(1e-3, cfg.solver.dt_max);

    // [diagnostics]
    cfg.diag.tau = DiagConfig::default_tau(cfg.solver.t_end);
    if (diag) {
        apply_section(*diag, {
            {"p_list", [&](const IniEntry& e) { cfg.diag.p_list = parse_real_list(e.value, e.key, e.line); }},
            {"beta_list", [&](const IniEntry& e) { cfg.diag.beta_list = parse_real_list(e.value, e.key, e.line); }},
            {"tau", real_into(cfg.diag.tau)},
            {"entropy_floor", real_into(cfg.diag.entropy_floor)},
            {"window_fraction", real_into(cfg.diag.window_fraction)},
            {"plateau_tol", real_into(cfg.diag.plateau_tol)},
            {"growth_factor", real_into(cfg.diag.growth_factor)},
            {"slope_tol", real_into(cfg.diag.slope_tol)},
        });
    }

    // [initial]
    if (initial) {
        if (const IniEntry* g = find_entry(initial, "generator")) cfg.initial.generator = g->value;
        std::map<std::string, Handler> handlers{{"generator", [](const IniEntry&) {}}};
        InitialCondition& ic = cfg.initial;
        if (ic.generator == "uniform") {
            handlers["u"] = real_into(ic.u);
            handlers["v"] = real_into(ic.v);
        } else if (ic.generator == "gaussian-bump") {
            handlers["amplitude"] = real_into(ic.amplitude);
            handlers["width"] = real_into(ic.width);
            handlers["background"] = real_into(ic.background);
            handlers["v"] = real_into(ic.v);
            handlers["center"] = [&](const IniEntry& e) {
                const auto c = parse_real_list(e.value, e.key, e.line);
                if (static_cast<int>(c.size()) != dim) throw ConfigError("'center' needs one entry per axis", e.line);
                for (int a = 0; a < dim; ++a) ic.center[a] = c[a];
            };
        } else if (ic.generator == "random-perturbation") {
            ic.amplitude = 0.1;
            handlers["u"] = real_into(ic.u);
            handlers["v"] = real_into(ic.v);
            handlers["amplitude"] = real_into(ic.amplitude);
            handlers["v_amplitude"] = real_into(ic.v_amplitude);
        } else {
            throw ConfigError("unknown initial generator '" + ic.generator + "'", find_entry(initial, "generator")->line);
        }
        apply_section(*initial, handlers);
    }

    // [run]
    if (runsec) {
        apply_section(*runsec, {
            {"output_dir", [&](const IniEntry& e) { cfg.output_dir = e.value; }},
            {"seed", [&](const IniEntry& e) {
                 const long s = parse_integer(e.value, e.key, e.line);
                 if (s < 0) throw ConfigError("'seed' must be nonnegative", e.line);
                 cfg.seed = static_cast<unsigned long long>(s);
             }},
            {"write_snapshots", [&](const IniEntry& e) {
                 if (e.value != "true" && e.value != "false") throw ConfigError("'write_snapshots' expects true or false", e.line);
                 cfg.write_snapshots = e.value == "true";
             }},
        });
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_run_config(parse_ini(read_text_file(path)));
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& dir) {
    const char* root = std::getenv(kOutputRootEnv);
    if (root && *root && dir.is_relative()) return std::filesystem::path(root) / dir;
    return dir;
}

}  // namespace chemobound
