#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "saddleflow/experiments.hpp"

namespace saddleflow {

inline constexpr const char* tool_version = "0.1.0";

struct OutputOptions {
    bool deterministic = false;  // drop the timestamp and wall-time lines
};

/// Column order of the sample table. phi is appended for problems that carry
/// an objective; absent optional values serialize as nan. Numbers use 17
/// significant digits so parsing an emitted file reproduces every double
/// exactly.
std::vector<std::string> csv_columns(const RunResult& result);

/// Header block of '#' comment lines (tool version, config echo, seed,
/// integrator tolerances, condition verdicts, regime), then the column row,
/// then one row per sample.
void write_csv(std::ostream& os, const RunResult& result, const OutputOptions& options);

/// JSON mirror with the same field names.
void write_json(std::ostream& os, const RunResult& result, const OutputOptions& options);

struct ParsedCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> header_lines;
};

ParsedCsv parse_csv(std::istream& is);

std::string format_double(double v);

}  // namespace saddleflow
