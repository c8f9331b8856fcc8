// Copyright 2026 The BMFD Authors. All Rights Reserved.
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

#include "bmfd/tables.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef BMFD_SOURCE_DATA_DIR
#define BMFD_SOURCE_DATA_DIR ""
#endif

namespace bmfd {

double Table::min_y() const {
  if (y.empty()) throw std::runtime_error("Table::min_y: empty table");
  return *std::min_element(y.begin(), y.end());
}

Table LoadTwoColumnTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table file: " + path);
  Table table;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x, y;
    if (!(row >> x >> y)) continue;
    if (!table.x.empty() && x <= table.x.back())
      throw std::runtime_error("table x not strictly increasing: " + path);
    table.x.push_back(x);
    table.y.push_back(y);
  }
  if (table.x.size() < 2)
    throw std::runtime_error("table needs at least two rows: " + path);
  return table;
}

double InterpLogX(const Table& table, double x) {
  if (x <= 0) throw std::invalid_argument("InterpLogX: x must be > 0");
  if (x <= table.x.front()) return table.y.front();
  if (x >= table.x.back()) return table.y.back();
  const auto it = std::upper_bound(table.x.begin(), table.x.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - table.x.begin());
  const std::size_t lo = hi - 1;
  const double t = (std::log(x) - std::log(table.x[lo])) /
                   (std::log(table.x[hi]) - std::log(table.x[lo]));
  return table.y[lo] + t * (table.y[hi] - table.y[lo]);
}

std::string DataDir() {
  if (const char* env = std::getenv("BMFD_DATA_DIR"); env != nullptr && *env)
    return env;
  return BMFD_SOURCE_DATA_DIR;
}

std::string DataFile(const std::string& relative_path) {
  return DataDir() + "/" + relative_path;
}

}  // namespace bmfd
