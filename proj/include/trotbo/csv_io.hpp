#pragma once

#include "trotbo/bo_engine.hpp"
#include "trotbo/quadruped_sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace trotbo::io {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kHistoryHeader = "iter,x0,x1,x2,x3,x4,support_height_m,fitness,best_so_far";
inline constexpr const char* kTraceHeader =
    "t,z,roll,pitch,rope_N,hipFL,kneeFL,hipFR,kneeFR,hipRL,kneeRL,hipRR,kneeRR";

/// 9 significant digits, printf %.9g style; NaN is written as "nan".
[[nodiscard]] std::string format_number(double v);

void write_history_csv(std::ostream& os, const bo::OptimizationHistory& history);
void write_trace_csv(std::ostream& os, const sim::TrialTrace& trace);

void export_history(const std::filesystem::path& path, const bo::OptimizationHistory& history);
void export_trace(const std::filesystem::path& path, const sim::TrialTrace& trace);

/// Numeric table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const;
    [[nodiscard]] std::vector<double> values(const std::string& name) const;
};

[[nodiscard]] CsvTable parse_csv(std::istream& is);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

/// Rebuilds a trace from the exported columns. Velocities, yaw and commands
/// are not part of the schema and come back as zero; the termination flag is
/// `completed` when the samples reach `duration_s`, otherwise `fell`.
[[nodiscard]] sim::TrialTrace trace_from_table(const CsvTable& table, double duration_s);

/// Flat `key = value` text; '#' starts a comment, blank lines are skipped.
[[nodiscard]] std::map<std::string, std::string> parse_key_values(std::istream& is);
[[nodiscard]] std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Reads x0..x4 from a key-value file.
[[nodiscard]] bo::ParamVector read_params(const std::filesystem::path& path);
void write_params(std::ostream& os, const bo::ParamVector& p);

}  // namespace trotbo::io
