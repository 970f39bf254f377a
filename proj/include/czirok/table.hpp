#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace czirok {

struct Provenance {
    std::string version;
    std::string config_hash;  // 16 hex chars
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> annotations;
};

enum class TableFormat { csv, json };

// Rectangular numeric result table. Failed rows (flagged by the producing
// experiment) stay in the table; num_failed drives the CLI exit code.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    Provenance provenance;
    long num_failed = 0;

    void add_row(std::vector<double> row);
};

// CSV: '#'-prefixed provenance lines, one header row, comma-separated cells
// printed with 17 significant digits (exact double round-trip). JSON mirrors
// the columns as arrays plus the provenance object.
void emit(const ResultTable& table, TableFormat format, std::ostream& out);
void emit(const ResultTable& table, TableFormat format,
          const std::string& path);

std::string format_cell(double v);  // %.17g with stable nan/inf spelling

}
