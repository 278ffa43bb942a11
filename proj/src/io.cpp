#include "chemobound/harness.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace chemobound {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

namespace {

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_label(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

const std::vector<std::string>& series_base_columns() {
    static const std::vector<std::string> cols{"t",       "mass",      "sup_u",      "sup_v",      "min_u",
                                               "min_v",   "entropy",   "dirichlet",  "sup_grad_v", "dissipation"};
    return cols;
}

std::vector<std::string> series_columns(const std::vector<double>& p_list, const std::vector<double>& beta_list) {
    std::vector<std::string> cols = series_base_columns();
    for (double p : p_list) cols.push_back("u_p" + fmt_label(p));
    for (double b : beta_list) cols.push_back("gradv_b" + fmt_label(b));
    return cols;
}

std::string series_csv(const DiagSeries& series) {
    std::string out;
    const auto cols = series_columns(series.p_list(), series.beta_list());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    out += '\n';
    for (const auto& r : series.records()) {
        const double base[] = {r.t,     r.mass,    r.sup_u,     r.sup_v,      r.min_u,
                               r.min_v, r.entropy, r.dirichlet, r.sup_grad_v, r.dissipation};
        bool first = true;
        auto put = [&](double x) {
            if (!first) out += ',';
            first = false;
            out += fmt_real(x);
        };
        for (double x : base) put(x);
        for (double x : r.lp) put(x);
        for (double x : r.grad_v_powers) put(x);
        out += '\n';
    }
    return out;
}

std::string windows_csv(const DiagSeries& series) {
    std::string out = "t,window_u_sq,window_grad_v_sq,window_lap_v_sq\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& w = series.windows()[k];
        out += fmt_real(series.records()[k].t) + ',' + fmt_real(w.u_sq) + ',' + fmt_real(w.grad_v_sq) + ',' +
               fmt_real(w.lap_v_sq) + '\n';
    }
    return out;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw SchemaError("missing column '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };
    while (i < text.size()) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            end_record();
            ++i;
        } else if (ch == '\n') {
            end_record();
        } else {
            field += ch;
            field_started = true;
        }
        ++i;
    }
    if (quoted) throw SchemaError("unterminated quoted field");
    if (field_started || !record.empty()) end_record();

    CsvTable table;
    if (records.empty()) throw SchemaError("empty CSV: missing header");
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw SchemaError("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                              " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

template <class T>
void put_raw(std::string& buf, std::size_t offset, T value) {
    std::memcpy(buf.data() + offset, &value, sizeof value);
}

template <class T>
T get_raw(const std::string& buf, std::size_t offset) {
    T value;
    std::memcpy(&value, buf.data() + offset, sizeof value);
    return value;
}

constexpr std::size_t kHeaderBytes = 64;

}  // namespace

void write_snapshot(const std::filesystem::path& path, const State& state) {
    const GridSpec& g = state.u.spec();
    const std::size_t n = g.size();
    std::string buf(kHeaderBytes + 2 * n * sizeof(double), '\0');
    std::memcpy(buf.data(), kSnapshotMagic, 8);
    put_raw<std::uint32_t>(buf, 8, kSnapshotVersion);
    put_raw<std::uint32_t>(buf, 12, static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < 3; ++a) put_raw<std::uint32_t>(buf, 16 + 4 * a, static_cast<std::uint32_t>(g.cell_counts()[a]));
    put_raw<std::uint32_t>(buf, 28, 2);
    put_raw<double>(buf, 32, state.t);
    for (int a = 0; a < 3; ++a) put_raw<double>(buf, 40 + 8 * a, g.lengths()[a]);
    std::memcpy(buf.data() + kHeaderBytes, state.u.values().data(), n * sizeof(double));
    std::memcpy(buf.data() + kHeaderBytes + n * sizeof(double), state.v.values().data(), n * sizeof(double));
    write_text_file(path, buf);
}

State read_snapshot(const std::filesystem::path& path) {
    const std::string buf = read_text_file(path);
    if (buf.size() < kHeaderBytes || std::memcmp(buf.data(), kSnapshotMagic, 8) != 0) {
        throw IoError("'" + path.string() + "' is not a snapshot file");
    }
    if (get_raw<std::uint32_t>(buf, 8) != kSnapshotVersion) throw IoError("unsupported snapshot version");
    const int dim = static_cast<int>(get_raw<std::uint32_t>(buf, 12));
    std::array<int, 3> cells{};
    std::array<double, 3> lengths{};
    for (int a = 0; a < 3; ++a) {
        cells[a] = static_cast<int>(get_raw<std::uint32_t>(buf, 16 + 4 * a));
        lengths[a] = get_raw<double>(buf, 40 + 8 * a);
    }
    if (get_raw<std::uint32_t>(buf, 28) != 2) throw IoError("snapshot must hold two fields");
    GridSpec g(dim, cells, lengths);
    const std::size_t n = g.size();
    if (buf.size() != kHeaderBytes + 2 * n * sizeof(double)) throw IoError("snapshot size does not match header");
    std::vector<double> u(n), v(n);
    std::memcpy(u.data(), buf.data() + kHeaderBytes, n * sizeof(double));
    std::memcpy(v.data(), buf.data() + kHeaderBytes + n * sizeof(double), n * sizeof(double));
    return State{Field(g, std::move(u)), Field(g, std::move(v)), get_raw<double>(buf, 32)};
}

}  // namespace chemobound
