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


#include "cesm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <openssl/evp.h>

#include "cesm/error.hpp"

namespace cesm::io {
namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line << ": " << what;
  throw Error(ErrorKind::kParse, msg.str());
}

double parse_double(const std::string& field, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    fail(line, "not a number: '" + field + "'");
  }
  if (!std::isfinite(value)) fail(line, "non-finite value: '" + field + "'");
  return value;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path.string());
  return in;
}

}  // namespace

ComplexMatrix read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in = open(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "line 1: missing header");
  ++line_no;
  const auto header = split(trim(line));
  if (header.empty() || header.size() % 2 != 0) fail(line_no, "header must list re_i,im_i pairs");
  const std::size_t m = header.size() / 2;
  for (std::size_t i = 0; i < m; ++i) {
    if (header[2 * i] != "re_" + std::to_string(i) || header[2 * i + 1] != "im_" + std::to_string(i)) {
      fail(line_no, "expected header re_0,im_0,...,re_" + std::to_string(m - 1) + ",im_" +
                        std::to_string(m - 1));
    }
  }
  std::vector<Complex> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto fields = split(row);
    if (fields.size() != 2 * m) {
      fail(line_no, "expected " + std::to_string(2 * m) + " fields, found " +
                        std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < m; ++i) {
      values.emplace_back(parse_double(fields[2 * i], line_no),
                          parse_double(fields[2 * i + 1], line_no));
    }
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(m);
  const Eigen::Index cols = static_cast<Eigen::Index>(values.size() / m);
  return Eigen::Map<const ComplexMatrix>(values.data(), rows, cols);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_samples_csv(const std::filesystem::path& path, const ComplexMatrix& samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kParse, "cannot write " + path.string());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    out << (i ? "," : "") << "re_" << i << ",im_" << i;
  }
  out << '\n';
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      out << (i ? "," : "") << format_double(samples(i, j).real()) << ','
          << format_double(samples(i, j).imag());
    }
    out << '\n';
  }
}

ComplexMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<Complex>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty() || (rows.empty() && row.rfind("re_", 0) == 0)) continue;
    const auto fields = split(row);
    if (fields.size() % 2 != 0) fail(line_no, "expected re,im pairs");
    std::vector<Complex> entries;
    for (std::size_t i = 0; i < fields.size(); i += 2) {
      entries.emplace_back(parse_double(fields[i], line_no), parse_double(fields[i + 1], line_no));
    }
    rows.push_back(std::move(entries));
  }
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  ComplexMatrix a(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != m) {
      throw Error(ErrorKind::kParse, "matrix file " + path.string() + " is not square");
    }
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return a;
}

ComplexVector parse_complex_list(const std::string& text) {
  const auto fields = split(trim(text));
  if (fields.empty() || fields.size() % 2 != 0) {
    throw Error(ErrorKind::kParse, "expected a comma-separated list of re,im pairs");
  }
  ComplexVector v(static_cast<Eigen::Index>(fields.size() / 2));
  for (std::size_t i = 0; i < fields.size(); i += 2) {
    v(static_cast<Eigen::Index>(i / 2)) = Complex(parse_double(fields[i], 1), parse_double(fields[i + 1], 1));
  }
  return v;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace cesm::io
