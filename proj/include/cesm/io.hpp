// Copyright 2026 The cesm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef CESM_IO_HPP
#define CESM_IO_HPP

#include <filesystem>
#include <string>

#include "cesm/linalg.hpp"

namespace cesm::io {

/// Reads samples from CSV with header re_0,im_0,...,re_{m-1},im_{m-1}; one
/// sample per row. Returns an m x N matrix. Errors name the offending line.
ComplexMatrix read_samples_csv(const std::filesystem::path& path);

/// Writes samples in the same format, doubles with 17 significant digits.
void write_samples_csv(const std::filesystem::path& path, const ComplexMatrix& samples);

/// Reads an m x m complex matrix: one CSV row per matrix row laid out as
/// re,im pairs; an optional header line starting with "re_" is skipped.
ComplexMatrix read_matrix_csv(const std::filesystem::path& path);

/// Parses "re0,im0,re1,im1,..." into a complex vector.
ComplexVector parse_complex_list(const std::string& text);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// %.17g formatting.
std::string format_double(double x);

}  // namespace cesm::io

#endif  // CESM_IO_HPP
