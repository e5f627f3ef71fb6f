/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_CSV_HPP
#define EVIDENCER_CSV_HPP

#include "evidencer/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace evidencer::io {

/// Numeric matrix with optional column labels from a CSV header row.
struct LabeledMatrix {
    Matrix values;
    std::vector<std::string> column_labels;
};

/// Parse comma-separated numbers. A first row containing any non-numeric
/// cell is taken as the header. Ragged rows, non-numeric cells and empty
/// input raise ParseError with the 1-based line number.
LabeledMatrix parse_matrix(std::string_view text, const std::string& source = "<memory>");

LabeledMatrix load_matrix(const std::filesystem::path& path);

/// Scientific notation with 17 significant digits; reading it back
/// reproduces every value exactly.
std::string format_double(double value);

std::string format_matrix(const Matrix& values, const std::vector<std::string>& column_labels = {});

void write_matrix(const std::filesystem::path& path, const Matrix& values,
                  const std::vector<std::string>& column_labels = {});

/// "v1", "v2", ... used when the input carries no voxel labels.
std::vector<std::string> default_labels(const std::string& prefix, Index count);

} // namespace evidencer::io

#endif
