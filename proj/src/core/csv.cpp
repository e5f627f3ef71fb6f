/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/csv.hpp"

#include "evidencer/errors.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace evidencer::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return value;
}

} // namespace

LabeledMatrix parse_matrix(std::string_view text, const std::string& source) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    LabeledMatrix out;
    std::vector<double> values;
    std::size_t cols = 0;
    Index rows = 0;
    long line_no = 0;
    bool first = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (first) {
            first = false;
            cols = cells.size();
            bool numeric = true;
            for (auto c : cells) numeric = numeric && parse_number(c).has_value();
            if (!numeric) {
                for (auto c : cells) out.column_labels.emplace_back(c);
                continue;
            }
        }
        if (cells.size() != cols) {
            throw ParseError(source + ": expected " + std::to_string(cols) + " columns, found " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const auto v = parse_number(cells[j]);
            if (!v) {
                throw ParseError(source + ": non-numeric cell '" + std::string(cells[j]) +
                                     "' in column " + std::to_string(j + 1),
                                 line_no);
            }
            values.push_back(*v);
        }
        ++rows;
    }
    if (rows == 0) throw ParseError(source + ": no numeric rows");
    out.values.resize(rows, static_cast<Index>(cols));
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < static_cast<Index>(cols); ++j) {
            out.values(i, j) = values[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
        }
    }
    return out;
}

LabeledMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_matrix(buffer.str(), path.string());
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
    if (ec != std::errc()) throw IoError("failed to format a double");
    return {buf, ptr};
}

std::string format_matrix(const Matrix& values, const std::vector<std::string>& column_labels) {
    if (!column_labels.empty() && static_cast<Index>(column_labels.size()) != values.cols()) {
        throw DomainError("column label count does not match the matrix");
    }
    std::string out;
    out.reserve(static_cast<std::size_t>(values.size()) * 25 + 64);
    for (std::size_t j = 0; j < column_labels.size(); ++j) {
        if (j) out += ',';
        out += column_labels[j];
    }
    if (!column_labels.empty()) out += '\n';
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) {
            if (j) out += ',';
            out += format_double(values(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_matrix(const std::filesystem::path& path, const Matrix& values,
                  const std::vector<std::string>& column_labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << format_matrix(values, column_labels);
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::string> default_labels(const std::string& prefix, Index count) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(count));
    for (Index i = 1; i <= count; ++i) labels.push_back(prefix + std::to_string(i));
    return labels;
}

} // namespace evidencer::io
