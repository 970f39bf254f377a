#include "czirok/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace czirok {

std::string format_cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ResultTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("add_row: width does not match columns");
    rows.push_back(std::move(row));
}

namespace {

void emit_csv(const ResultTable& table, std::ostream& os) {
    os << "# version=" << table.provenance.version << '\n';
    os << "# config_hash=" << table.provenance.config_hash << '\n';
    os << "# seed=" << table.provenance.seed << '\n';
    for (const auto& [key, value] : table.provenance.annotations)
        os << "# " << key << '=' << value << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) os << ',';
        os << table.columns[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_cell(row[i]);
        }
        os << '\n';
    }
}

void emit_json(const ResultTable& table, std::ostream& os) {
    nlohmann::ordered_json j;
    j["version"] = table.provenance.version;
    j["config_hash"] = table.provenance.config_hash;
    j["seed"] = table.provenance.seed;
    nlohmann::ordered_json ann = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.provenance.annotations)
        ann[key] = value;
    j["annotations"] = ann;
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            const double v = row[i];
            if (std::isfinite(v))
                arr.push_back(v);
            else
                arr.push_back(nullptr);  // JSON has no nan/inf literals
        }
        cols[table.columns[i]] = std::move(arr);
    }
    j["columns"] = std::move(cols);
    os << j.dump(2) << '\n';
}

}  // namespace

void emit(const ResultTable& table, TableFormat format, std::ostream& os) {
    if (format == TableFormat::csv)
        emit_csv(table, os);
    else
        emit_json(table, os);
    if (!os) throw std::runtime_error("emit: stream write failed");
}

void emit(const ResultTable& table, TableFormat format,
          const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit: cannot open '" + path + "'");
    emit(table, format, os);
    os.flush();
    if (!os) throw std::runtime_error("emit: write to '" + path + "' failed");
}

}  // namespace czirok
