// Copyright 2026 The DMHE Authors
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

#ifndef DMHE_CSV_H_
#define DMHE_CSV_H_

#include <fstream>
#include <string>
#include <vector>

namespace dmhe {

// 17 significant digits: doubles round-trip exactly.
std::string FormatDouble(double x);

// Minimal CSV writer. Fields are written as given; callers only emit
// identifiers and numbers, so no quoting is done.
class CsvWriter {
 public:
  // Throws Error when the file cannot be opened.
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(const std::string& field);
  CsvWriter& operator<<(const char* field);
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  void EndRow();

 private:
  void Separator();
  std::ofstream out_;
  bool row_started_ = false;
};

// Writes `text` to `path`, creating parent directories.
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace dmhe

#endif  // DMHE_CSV_H_
