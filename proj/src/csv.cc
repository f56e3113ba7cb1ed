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

#include "dmhe/csv.h"

#include <cstdio>
#include <filesystem>

#include "dmhe/error.h"

namespace dmhe {

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  out_.open(path);
  if (!out_) throw Error("cannot write " + path);
  for (const std::string& h : header) *this << h;
  EndRow();
}

void CsvWriter::Separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(const std::string& field) {
  Separator();
  out_ << field;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const char* field) {
  return *this << std::string(field);
}

CsvWriter& CsvWriter::operator<<(double x) {
  Separator();
  out_ << FormatDouble(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  Separator();
  out_ << x;
  return *this;
}

void CsvWriter::EndRow() {
  out_ << '\n';
  row_started_ = false;
}

void WriteTextFile(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace dmhe
