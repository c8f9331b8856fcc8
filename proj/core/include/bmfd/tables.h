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

#ifndef BMFD_TABLES_H_
#define BMFD_TABLES_H_

#include <string>
#include <vector>

namespace bmfd {

// Two-column numeric table with strictly increasing x.
struct Table {
  std::vector<double> x;
  std::vector<double> y;

  double min_y() const;
};

// Parses "x y" rows; '#' starts a comment, blank lines are skipped.
Table LoadTwoColumnTable(const std::string& path);

// Piecewise-linear interpolation in log(x); clamps to the edge values
// outside the tabulated range. Requires x > 0.
double InterpLogX(const Table& table, double x);

// Data directory resolution: BMFD_DATA_DIR environment variable if set,
// otherwise the source-tree data directory compiled into the library.
std::string DataDir();
std::string DataFile(const std::string& relative_path);

}  // namespace bmfd

#endif  // BMFD_TABLES_H_
