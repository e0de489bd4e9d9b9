// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal RFC 4180 delimited text: quoted fields, doubled quotes, embedded
// delimiters and newlines.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpgacost::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by header name.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Parses the whole text. The first record is the header. Throws DataError
/// on unterminated quotes or rows whose width differs from the header.
Table parse(std::string_view text, char delimiter = ',');

Table read_file(const std::string& path, char delimiter = ',');

std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Strict full-field parse; nullopt on anything but a finite number.
std::optional<double> parse_double(std::string_view field);

}  // namespace fpgacost::csv
