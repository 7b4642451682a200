#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tailest/sample.hpp"

namespace tailest {

// A claims column read from disk: positive finite values in file order, plus
// enough bookkeeping to report how much cleaning happened.
struct ClaimsDataset {
    std::string name;          // column header if present, else the file stem
    std::vector<double> values; // cleaned: every entry > 0 and finite
    std::string source_path;
    std::size_t raw_rows = 0;     // data rows seen (header excluded)
    std::size_t dropped_rows = 0; // non-numeric, non-positive or short rows
};

// Reads one numeric column from a delimited text file.
//
// column selects it: "" takes the first column; a string matching a cell of
// the first row selects by header name; otherwise a digits-only string is a
// 0-based index.  The first row is treated as a header when its selected cell
// does not parse as a number (it never counts as a dropped row).
//
// Throws IoError when the file cannot be opened, DataError when the column
// cannot be resolved or no usable rows remain.
ClaimsDataset read_claims(const std::string& path, const std::string& column = "",
                          char delimiter = ',');

enum class QqKind { Exponential, Pareto };

// Quantile-quantile coordinates with plotting positions p_i = i/(n+1):
//
//   Pareto:      ( -log(1 - p_i),  log X_{i,n} )
//   Exponential: ( -log(1 - p_i),  X_{i,n} )
//
// for i = 1..n, X_{i,n} ascending.  Output length n, x strictly increasing.
// Throws DomainError for n < 2 (or, defensively, a non-positive minimum with
// the Pareto kind, which SortedSample already rules out).
std::vector<std::pair<double, double>> qq_data(const SortedSample& sample, QqKind kind);

// Command-line entry point, callable in-process so tests can drive it without
// spawning.  argv follows main() conventions (argv[0] is the program name).
// Subcommands: estimate, simulate, qq, second-order.
//
// Returns the process exit code: 0 success, 1 usage error, 2 data error
// (unreadable/malformed input), 3 numeric failure (estimation preconditions
// or singular fits).  Numeric results go to --out or `out` as CSV;
// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tailest
