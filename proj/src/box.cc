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

#include "dmhe/box.h"

#include <cmath>
#include <limits>
#include <string>

#include "dmhe/error.h"

namespace dmhe {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckInterval(const Vector& lo, const Vector& hi, Index dim,
                   const std::string& what) {
  if (lo.size() != dim || hi.size() != dim) {
    throw DimensionError(what + ": bounds must have " + std::to_string(dim) +
                         " entries");
  }
  for (Index j = 0; j < dim; ++j) {
    if (std::isnan(lo(j)) || std::isnan(hi(j))) {
      throw Error(what + ": NaN bound at component " + std::to_string(j));
    }
    if (lo(j) > hi(j)) {
      throw Error(what + ": empty box at component " + std::to_string(j));
    }
  }
}

}  // namespace

bool Box::Contains(const Vector& v) const {
  if (v.size() != size()) return false;
  for (Index j = 0; j < v.size(); ++j) {
    if (!(v(j) >= lower(j) && v(j) <= upper(j))) return false;
  }
  return true;
}

BoxConstraints::BoxConstraints(std::vector<SubsystemBox> subsystems)
    : boxes_(std::move(subsystems)) {}

BoxConstraints BoxConstraints::Unbounded(const CompositeModel& model) {
  std::vector<SubsystemBox> boxes;
  for (const SubsystemBlock& blk : model.partition()) {
    const Vector lo = Vector::Constant(blk.state_dim, -kInf);
    const Vector hi = Vector::Constant(blk.state_dim, kInf);
    boxes.push_back({lo, hi, lo, hi});
  }
  return BoxConstraints(std::move(boxes));
}

void BoxConstraints::Validate(const CompositeModel& model) const {
  if (num_subsystems() != model.num_subsystems()) {
    throw DimensionError("boxes given for " + std::to_string(num_subsystems()) +
                         " subsystems, model has " +
                         std::to_string(model.num_subsystems()));
  }
  for (int i = 0; i < num_subsystems(); ++i) {
    const Index dim = model.block(i).state_dim;
    const std::string name = "subsystem " + std::to_string(i);
    CheckInterval(boxes_[i].x_lower, boxes_[i].x_upper, dim,
                  name + " state box");
    CheckInterval(boxes_[i].w_lower, boxes_[i].w_upper, dim,
                  name + " disturbance box");
  }
}

const SubsystemBox& BoxConstraints::subsystem(int i) const {
  if (i < 0 || i >= num_subsystems()) throw UnknownSubsystemError(i);
  return boxes_[i];
}

Box BoxConstraints::Local(int i, int horizon) const {
  const SubsystemBox& b = subsystem(i);
  const Index nxi = b.x_lower.size();
  Box out{Vector(nxi * (horizon + 1)), Vector(nxi * (horizon + 1))};
  out.lower.head(nxi) = b.x_lower;
  out.upper.head(nxi) = b.x_upper;
  for (int s = 0; s < horizon; ++s) {
    out.lower.segment(nxi * (s + 1), nxi) = b.w_lower;
    out.upper.segment(nxi * (s + 1), nxi) = b.w_upper;
  }
  return out;
}

Box BoxConstraints::Global(const DecisionLayout& layout) const {
  if (layout.num_subsystems() != num_subsystems()) {
    throw DimensionError("BoxConstraints::Global: partition mismatch");
  }
  Box out{Vector(layout.size()), Vector(layout.size())};
  for (int i = 0; i < num_subsystems(); ++i) {
    const Box local = Local(i, layout.horizon());
    Scatter(local.lower, layout.z_indices(i), out.lower);
    Scatter(local.upper, layout.z_indices(i), out.upper);
  }
  return out;
}

Vector ProjectBox(const Vector& v, const Box& box) {
  if (v.size() != box.size()) throw DimensionError("ProjectBox: size mismatch");
  return v.cwiseMax(box.lower).cwiseMin(box.upper);
}

}  // namespace dmhe
