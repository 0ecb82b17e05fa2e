#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxstein/measures.hpp"  // format_full

namespace maxstein {

// CSV with a '# meta:' comment header echoing the full configuration.
// Rows are preformatted strings; identical configuration and seed produce
// byte-identical files by construction.
struct ExperimentReport {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_meta(const std::string& key, const std::string& value) {
        meta.emplace_back(key, value);
    }
    void add_meta(const std::string& key, double value) {
        meta.emplace_back(key, format_full(value));
    }
    void add_meta(const std::string& key, std::uint64_t value) {
        meta.emplace_back(key, std::to_string(value));
    }

    void add_row(std::vector<double> values) {
        std::vector<std::string> row;
        row.reserve(values.size());
        for (double v : values) row.push_back(format_full(v));
        rows.push_back(std::move(row));
    }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : meta) os << "# meta: " << k << "=" << v << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << columns[i] << (i + 1 < columns.size() ? "," : "");
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "");
            os << "\n";
        }
    }

    void write(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        write(os);
    }

    std::string to_string() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }
};

}  // namespace maxstein
