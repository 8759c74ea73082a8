// Copyright 2026 The pdguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pdguard/error.hpp"
#include "pdguard/numfmt.hpp"
#include "pdguard/regions.hpp"

namespace pdguard {
namespace {

constexpr std::string_view kMagic = "PDREGIONS";
constexpr std::string_view kVersion = "v1";

std::vector<std::string> fields_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string f; ss >> f;) out.push_back(f);
  return out;
}

double need_double(const std::string& s, std::size_t line) {
  const auto v = parse_double(s);
  if (!v) throw ParseError("bad number '" + s + "'", line);
  return *v;
}

template <class Int>
Int need_int(const std::string& s, std::size_t line) {
  const auto v = parse_int<Int>(s);
  if (!v) throw ParseError("bad integer '" + s + "'", line);
  return *v;
}

}  // namespace

void write_regions(std::ostream& out, const Grid& grid, const RegionMeta& meta) {
  const auto& s = grid.spec;
  out << kMagic << ' ' << kVersion << '\n';
  out << format_double(s.d_min) << ' ' << format_double(s.d_max) << ' ' << s.n_d << '\n';
  out << format_double(s.p_min) << ' ' << format_double(s.p_max) << ' ' << s.n_p << '\n';
  out << meta.seed << ' ' << format_double(meta.risk) << ' ' << meta.sweeps << '\n';
  std::string row(static_cast<std::size_t>(s.n_d), '0');
  for (int r = 0; r < s.n_p; ++r) {
    for (int k = 0; k < s.n_d; ++k) row[static_cast<std::size_t>(k)] = static_cast<char>('0' + grid.at(r, k));
    out << row << '\n';
  }
}

Grid read_regions(std::istream& in, RegionMeta* meta) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(std::string("missing ") + what, line_no + 1);
    ++line_no;
  };
  next("header");
  const auto head = fields_of(line);
  if (head.size() != 2 || head[0] != kMagic) throw ParseError("not a region file", line_no);
  if (head[1] != kVersion) throw VersionError("unsupported region file version " + head[1]);

  GridSpec spec;
  next("D axis");
  auto f = fields_of(line);
  if (f.size() != 3) throw ParseError("expected 'd_min d_max n_d'", line_no);
  spec.d_min = need_double(f[0], line_no);
  spec.d_max = need_double(f[1], line_no);
  spec.n_d = need_int<int>(f[2], line_no);
  next("P axis");
  f = fields_of(line);
  if (f.size() != 3) throw ParseError("expected 'p_min p_max n_p'", line_no);
  spec.p_min = need_double(f[0], line_no);
  spec.p_max = need_double(f[1], line_no);
  spec.n_p = need_int<int>(f[2], line_no);
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), line_no);
  }
  next("metadata");
  f = fields_of(line);
  if (f.size() != 3) throw ParseError("expected 'seed risk sweeps'", line_no);
  RegionMeta m{need_int<std::uint64_t>(f[0], line_no), need_double(f[1], line_no), need_int<int>(f[2], line_no)};

  Grid grid(spec, 0);
  for (int r = 0; r < spec.n_p; ++r) {
    next("label row");
    if (line.size() != static_cast<std::size_t>(spec.n_d)) throw ParseError("label row has wrong width", line_no);
    for (int k = 0; k < spec.n_d; ++k) {
      const char ch = line[static_cast<std::size_t>(k)];
      if (ch < '0' || ch > '3') throw ParseError("label must be a digit 0-3", line_no);
      grid.at(r, k) = static_cast<std::uint8_t>(ch - '0');
    }
  }
  // getline only hits eof when the last row lacks its newline
  if (in.eof()) throw ParseError("missing trailing newline", line_no);
  if (in.peek() != std::char_traits<char>::eof()) {
    if (std::getline(in, line) && !line.empty()) throw ParseError("trailing data after label rows", line_no + 1);
  }
  if (meta) *meta = m;
  return grid;
}

}  // namespace pdguard
