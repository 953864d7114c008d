#include "trotbo/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace trotbo::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    return os;
}

void check_written(std::ostream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_history_csv(std::ostream& os, const bo::OptimizationHistory& history) {
    os << kHistoryHeader << '\n';
    const auto best = history.best_so_far();
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& r = history.records()[i];
        os << r.iteration;
        for (double v : r.params.as_array()) os << ',' << format_number(v);
        os << ',' << format_number(r.support_height_m.value_or(std::nan(""))) << ',' << format_number(r.fitness) << ','
           << format_number(best[i]) << '\n';
    }
}

void write_trace_csv(std::ostream& os, const sim::TrialTrace& trace) {
    using control::Leg;
    os << kTraceHeader << '\n';
    for (const auto& s : trace.samples) {
        const Eigen::Vector3d rpy = s.body.rpy();
        os << format_number(s.t) << ',' << format_number(s.body.position.z()) << ',' << format_number(rpy.x()) << ','
           << format_number(rpy.y()) << ',' << format_number(s.sensors.rope_tension);
        for (Leg leg : {Leg::FL, Leg::FR, Leg::RL, Leg::RR})
            os << ',' << format_number(s.joints[leg].flexion) << ',' << format_number(s.joints[leg].knee);
        os << '\n';
    }
}

void export_history(const std::filesystem::path& path, const bo::OptimizationHistory& history) {
    auto os = open_out(path);
    write_history_csv(os, history);
    check_written(os, path);
}

void export_trace(const std::filesystem::path& path, const sim::TrialTrace& trace) {
    auto os = open_out(path);
    write_trace_csv(os, trace);
    check_written(os, path);
}

// ---------------------------------------------------------------------------

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("missing column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

CsvTable parse_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw ParseError("missing header row");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(trim(cell));
    }
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        row.reserve(t.header.size());
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const std::string c = trim(cell);
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size())
                throw ParseError("line " + std::to_string(lineno) + ": bad number '" + c + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " fields, got " + std::to_string(row.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
    try {
        return parse_csv(is);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

sim::TrialTrace trace_from_table(const CsvTable& table, double duration_s) {
    using control::Leg;
    sim::TrialTrace trace;
    trace.duration = duration_s;
    if (table.rows.empty()) throw ParseError("trace has no samples");

    const std::size_t ct = table.column("t");
    const std::size_t cz = table.column("z");
    const std::size_t croll = table.column("roll");
    const std::size_t cpitch = table.column("pitch");
    const std::size_t crope = table.column("rope_N");
    const std::array<const char*, 4> legs{"FL", "FR", "RL", "RR"};
    std::array<std::size_t, 4> chip{};
    std::array<std::size_t, 4> cknee{};
    for (std::size_t i = 0; i < 4; ++i) {
        chip[i] = table.column(std::string("hip") + legs[i]);
        cknee[i] = table.column(std::string("knee") + legs[i]);
    }

    if (table.rows.size() >= 2) trace.dt = table.rows[1][ct] - table.rows[0][ct];
    for (const auto& r : table.rows) {
        sim::TraceSample s;
        s.t = r[ct];
        s.body.position.z() = r[cz];
        s.body.orientation = Eigen::AngleAxisd(r[cpitch], Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(r[croll], Eigen::Vector3d::UnitX());
        s.sensors.rope_tension = r[crope];
        s.sensors.imu.pitch = r[cpitch];
        s.sensors.imu.roll = r[croll];
        for (std::size_t i = 0; i < 4; ++i) {
            s.joints.legs[i].flexion = r[chip[i]];
            s.joints.legs[i].knee = r[cknee[i]];
        }
        trace.samples.push_back(s);
    }
    const double last = trace.samples.back().t;
    trace.termination = last >= duration_s - 0.5 * trace.dt ? sim::Termination::completed : sim::Termination::fell;
    return trace;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> parse_key_values(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
        kv[std::move(key)] = std::move(value);
    }
    return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
    try {
        return parse_key_values(is);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

bo::ParamVector read_params(const std::filesystem::path& path) {
    const auto kv = read_key_values(path);
    std::array<double, bo::kNumParams> a{};
    for (int d = 0; d < bo::kNumParams; ++d) {
        const std::string key = "x" + std::to_string(d);
        const auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(path.string() + ": missing '" + key + "'");
        char* end = nullptr;
        a[static_cast<std::size_t>(d)] = std::strtod(it->second.c_str(), &end);
        if (it->second.empty() || *end != '\0')
            throw ParseError(path.string() + ": bad value for '" + key + "'");
    }
    for (const auto& [k, v] : kv) {
        if (k.size() != 2 || k[0] != 'x' || k[1] < '0' || k[1] > '4')
            throw ParseError(path.string() + ": unknown key '" + k + "'");
    }
    return bo::ParamVector::from_array(a);
}

void write_params(std::ostream& os, const bo::ParamVector& p) {
    const auto a = p.as_array();
    char buf[64];
    for (std::size_t d = 0; d < a.size(); ++d) {
        std::snprintf(buf, sizeof buf, "%.17g", a[d]);
        os << 'x' << d << " = " << buf << '\n';
    }
}

}  // namespace trotbo::io
