/*
 * Copyright 2026 The Stratlift Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Minimal RFC 4180 reader/writer helpers shared by the loaders.
#ifndef STRATLIFT_SRC_CSV_H_
#define STRATLIFT_SRC_CSV_H_

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stratlift::csv {

// Reads one logical record. Returns false at end of input.
bool read_row(std::istream& in, std::vector<std::string>& fields);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

// Quotes the field when it contains a delimiter, quote or newline.
std::string escape(std::string_view field);

// Index of `name` in `header`, or npos.
std::size_t column_index(const std::vector<std::string>& header,
                         std::string_view name);

}  // namespace stratlift::csv

#endif  // STRATLIFT_SRC_CSV_H_
