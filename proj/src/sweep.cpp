#include "chemobound/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace chemobound {

namespace {

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<long> parse_integer_list(const IniEntry& e) {
    std::vector<long> out;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_integer(item, e.key, e.line));
    if (out.empty()) throw ConfigError("'" + e.key + "' expects a nonempty list", e.line);
    return out;
}

auto row_key(const SweepRow& r) {
    return std::make_tuple(r.m, r.mu, r.chi, r.seed, r.sup_v0, r.lambda0, r.resolution);
}

}  // namespace

void SweepSpec::validate() const {
    base.validate();
    for (int n : resolution) {
        if (n < 3) throw std::invalid_argument("sweep: resolution " + std::to_string(n) + " violates n_i >= 3");
    }
    for (double x : sup_v0) {
        if (!(x >= 0.0)) throw std::invalid_argument("sweep: sup_v0 must be nonnegative");
    }
}

std::size_t SweepSpec::size() const {
    auto n = [](std::size_t k) { return k == 0 ? std::size_t{1} : k; };
    return n(m.size()) * n(mu.size()) * n(chi.size()) * n(sup_v0.size()) * n(lambda0.size()) * n(resolution.size()) *
           n(seeds.size());
}

SweepSpec parse_sweep_spec(const std::vector<IniSection>& sections) {
    SweepSpec spec;
    std::vector<IniSection> rest;
    const IniSection* sweep = nullptr;
    for (const auto& s : sections) {
        if (s.name == "sweep") {
            sweep = &s;
        } else {
            rest.push_back(s);
        }
    }
    if (!sweep) throw ConfigError("missing [sweep] section");

    std::map<std::string, int> seen;
    for (const auto& e : sweep->entries) {
        if (seen.count(e.key)) throw ConfigError("duplicate key '" + e.key + "' in [sweep]", e.line);
        seen[e.key] = e.line;
        if (e.key == "m") {
            spec.m = parse_real_list(e.value, e.key, e.line);
        } else if (e.key == "mu") {
            spec.mu = parse_real_list(e.value, e.key, e.line);
        } else if (e.key == "chi") {
            spec.chi = parse_real_list(e.value, e.key, e.line);
        } else if (e.key == "sup_v0") {
            spec.sup_v0 = parse_real_list(e.value, e.key, e.line);
        } else if (e.key == "lambda0") {
            spec.lambda0 = parse_real_list(e.value, e.key, e.line);
        } else if (e.key == "resolution") {
            for (long n : parse_integer_list(e)) spec.resolution.push_back(static_cast<int>(n));
        } else if (e.key == "seeds") {
            for (long s : parse_integer_list(e)) {
                if (s < 0) throw ConfigError("'seeds' must be nonnegative", e.line);
                spec.seeds.push_back(static_cast<std::uint64_t>(s));
            }
        } else {
            throw ConfigError("unknown key '" + e.key + "' in [sweep]", e.line);
        }
    }

    // Model fields supplied by an axis need not repeat in [model].
    IniSection* model = nullptr;
    for (auto& s : rest) {
        if (s.name == "model") model = &s;
    }
    if (!model) {
        rest.push_back({"model", sweep->line, {}});
        model = &rest.back();
    }
    auto inject = [&](const std::string& key, const std::vector<double>& axis) {
        if (axis.empty()) return;
        for (const auto& e : model->entries) {
            if (e.key == key) return;
        }
        model->entries.push_back({key, fmt_real(axis.front()), seen[key]});
    };
    inject("m", spec.m);
    inject("mu", spec.mu);
    inject("chi", spec.chi);

    spec.base = parse_run_config(rest);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    return parse_sweep_spec(parse_ini(read_text_file(path)));
}

RunConfig sweep_point_config(const SweepSpec& spec, const SweepRow& row) {
    RunConfig cfg = spec.base;
    cfg.params.m = row.m;
    cfg.params.mu = row.mu;
    cfg.params.chi = row.chi;
    cfg.params.lambda0 = row.lambda0;
    cfg.initial.v = row.sup_v0;
    cfg.seed = row.seed;
    std::array<int, 3> cells = cfg.grid.cell_counts();
    for (int a = 0; a < cfg.grid.dim(); ++a) cells[a] = row.resolution;
    cfg.grid = GridSpec(cfg.grid.dim(), cells, cfg.grid.lengths());
    return cfg;
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{"m",           "mu",     "chi",    "sup_v0",     "lambda0",
                                               "resolution",  "seed",   "threshold_m", "margin", "verdict",
                                               "peak_sup_u",  "entropy_peak", "status"};
    return cols;
}

SweepResult run_sweep(const SweepSpec& spec, int parallelism, bool persist) {
    spec.validate();
    auto or_base = [](const std::vector<double>& axis, double base) {
        return axis.empty() ? std::vector<double>{base} : axis;
    };
    const auto ms = or_base(spec.m, spec.base.params.m);
    const auto mus = or_base(spec.mu, spec.base.params.mu);
    const auto chis = or_base(spec.chi, spec.base.params.chi);
    const auto vs = or_base(spec.sup_v0, spec.base.initial.v);
    const auto lambdas = or_base(spec.lambda0, spec.base.params.lambda0);
    const auto resolutions = spec.resolution.empty() ? std::vector<int>{spec.base.grid.cells(0)} : spec.resolution;
    const auto seeds = spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : spec.seeds;

    SweepResult result;
    for (double m : ms)
        for (double mu : mus)
            for (double chi : chis)
                for (auto seed : seeds)
                    for (double v : vs)
                        for (double lambda0 : lambdas)
                            for (int n : resolutions) {
                                SweepRow row;
                                row.m = m;
                                row.mu = mu;
                                row.chi = chi;
                                row.seed = seed;
                                row.sup_v0 = v;
                                row.lambda0 = lambda0;
                                row.resolution = n;
                                result.rows.push_back(row);
                            }
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return row_key(a) < row_key(b); });

    const std::filesystem::path root = spec.base.output_dir;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < result.rows.size(); k = next++) {
            SweepRow& row = result.rows[k];
            try {
                RunConfig cfg = sweep_point_config(spec, row);
                char name[32];
                std::snprintf(name, sizeof name, "point_%04zu", k);
                cfg.output_dir = root / name;
                const ExperimentResult r = run_experiment(cfg, persist);
                row.threshold_m = r.threshold_m;
                row.margin = r.margin;
                row.verdict = to_string(r.outcome.verdict);
                row.peak_sup_u = r.outcome.peak_sup_u;
                row.entropy_peak = r.outcome.entropy_peak;
                row.status = to_string(r.trajectory.status);
            } catch (const std::exception& e) {
                row.verdict = to_string(Verdict::Inconclusive);
                row.status = "error";
                row.error = e.what();
            }
        }
    };
    const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(result.rows.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    result.findings = monotonicity_audit(result.rows);
    if (persist) {
        const std::filesystem::path dir = resolve_output_dir(root);
        write_text_file(dir / "sweep.csv", sweep_csv(result));
        write_text_file(dir / "summary.txt", sweep_summary(spec, result));
    }
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out;
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    for (const auto& r : result.rows) {
        out += fmt_real(r.m) + ',' + fmt_real(r.mu) + ',' + fmt_real(r.chi) + ',' + fmt_real(r.sup_v0) + ',' +
               fmt_real(r.lambda0) + ',' + std::to_string(r.resolution) + ',' + std::to_string(r.seed) + ',' +
               fmt_real(r.threshold_m) + ',' + fmt_real(r.margin) + ',' + csv_field(r.verdict) + ',' +
               fmt_real(r.peak_sup_u) + ',' + fmt_real(r.entropy_peak) + ',' + csv_field(r.status) + '\n';
    }
    return out;
}

std::vector<std::string> monotonicity_audit(const std::vector<SweepRow>& rows) {
    using Key = std::tuple<double, double, double, double, int, std::uint64_t>;
    std::map<Key, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) groups[{r.mu, r.chi, r.sup_v0, r.lambda0, r.resolution, r.seed}].push_back(&r);
    std::vector<std::string> findings;
    for (auto& [key, group] : groups) {
        std::stable_sort(group.begin(), group.end(), [](const SweepRow* a, const SweepRow* b) { return a->m < b->m; });
        const SweepRow* bounded_below = nullptr;
        for (const SweepRow* r : group) {
            const bool bounded = r->verdict == to_string(Verdict::Bounded);
            if (bounded && !bounded_below) bounded_below = r;
            if (!bounded && bounded_below) {
                std::ostringstream msg;
                msg << "m=" << r->m << " is " << r->verdict << " but m=" << bounded_below->m << " is Bounded (mu=" << r->mu
                    << ", chi=" << r->chi << ", sup_v0=" << r->sup_v0 << ", lambda0=" << r->lambda0
                    << ", resolution=" << r->resolution << ", seed=" << r->seed << ")";
                findings.push_back(msg.str());
            }
        }
    }
    return findings;
}

std::string sweep_summary(const SweepSpec& spec, const SweepResult& result) {
    std::ostringstream out;
    std::map<std::string, int> verdicts, statuses;
    for (const auto& r : result.rows) {
        ++verdicts[r.verdict];
        ++statuses[r.status];
    }
    out << "runs: " << spec.size() << "\n";
    for (const auto& [v, n] : verdicts) out << "verdict " << v << ": " << n << "\n";
    for (const auto& [s, n] : statuses) out << "status " << s << ": " << n << "\n";
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
        if (!result.rows[k].error.empty()) out << "error in point " << k << ": " << result.rows[k].error << "\n";
    }
    out << "monotonicity findings: " << result.findings.size() << "\n";
    for (const auto& f : result.findings) out << "  " << f << "\n";
    return out.str();
}

}  // namespace chemobound
