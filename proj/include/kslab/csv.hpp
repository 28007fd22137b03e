#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal CSV support: doubles are written with 17 significant digits so a
// read-back reproduces every value exactly.

namespace kslab::csv {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write(const std::string& path, const Table& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open " + path + " for writing");
    for (std::size_t c = 0; c < t.header.size(); ++c)
        out << (c ? "," : "") << t.header[c];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << "\n";
    }
}

inline Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.header.size())
            throw std::runtime_error("csv: ragged row in " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace kslab::csv
