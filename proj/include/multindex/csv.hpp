#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "multindex/errors.hpp"
#include "multindex/matrix.hpp"

namespace multindex {

/// A numeric matrix with the row/column labels read from its CSV file.
struct LabeledMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Matrix values;
};

namespace detail {

inline std::string trim(std::string_view sv) {
    std::size_t b = 0, e = sv.size();
    while (b < e && (sv[b] == ' ' || sv[b] == '\t' || sv[b] == '\r')) ++b;
    while (e > b && (sv[e - 1] == ' ' || sv[e - 1] == '\t' || sv[e - 1] == '\r')) --e;
    return std::string(sv.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
        if (k == line.size() || line[k] == ',') {
            cells.push_back(trim(std::string_view(line).substr(start, k - start)));
            start = k + 1;
        }
    }
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col_no) {
    if (cell.empty())
        throw ParseError(line_no, col_no,
                         "empty cell at line " + std::to_string(line_no) + ", column " +
                             std::to_string(col_no) + " (explicit zeros are required)");
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError(line_no, col_no,
                         "cannot parse '" + cell + "' as a number at line " +
                             std::to_string(line_no) + ", column " + std::to_string(col_no));
    return value;
}

} // namespace detail

/// Reads a matrix CSV: first row is country labels (corner cell ignored),
/// first column is commodity labels, remaining cells are numbers with a
/// decimal point and no thousands separators. Blank lines are skipped.
inline LabeledMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);

    LabeledMatrix out;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (!header_seen) {
            if (cells.size() < 2)
                throw ParseError(line_no, 1, "header row needs at least one country label");
            out.col_labels.assign(cells.begin() + 1, cells.end());
            header_seen = true;
            continue;
        }
        if (cells.size() != out.col_labels.size() + 1)
            throw ParseError(line_no, cells.size(),
                             "line " + std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(out.col_labels.size() + 1));
        out.row_labels.push_back(cells[0]);
        std::vector<double> row(cells.size() - 1);
        for (std::size_t k = 1; k < cells.size(); ++k)
            row[k - 1] = detail::parse_cell(cells[k], line_no, k + 1);
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError(1, 1, "file is empty: " + path);
    if (rows.empty()) throw ParseError(line_no, 1, "no data rows in " + path);

    out.values = Matrix(rows.size(), out.col_labels.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < out.col_labels.size(); ++j) out.values(i, j) = rows[i][j];
    return out;
}

/// Reads a plain vector file: numbers separated by commas, spaces or
/// newlines, in order.
inline std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (char& ch : line)
            if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
        std::size_t pos = 0, col = 0;
        while (pos < line.size()) {
            while (pos < line.size() && line[pos] == ' ') ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ') ++end;
            ++col;
            values.push_back(detail::parse_cell(line.substr(pos, end - pos), line_no, col));
            pos = end;
        }
    }
    return values;
}

} // namespace multindex
