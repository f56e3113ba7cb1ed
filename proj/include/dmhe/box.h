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

#ifndef DMHE_BOX_H_
#define DMHE_BOX_H_

#include <vector>

#include "dmhe/linalg.h"
#include "dmhe/model.h"
#include "dmhe/weights.h"

namespace dmhe {

// Axis-aligned bounds for one subsystem. The state box applies to the
// window-start estimate; the disturbance box applies at every stage.
// Infinite entries mean unbounded.
struct SubsystemBox {
  Vector x_lower, x_upper;
  Vector w_lower, w_upper;
};

// A plain interval vector, used for both per-subsystem and global boxes.
struct Box {
  Vector lower, upper;
  Index size() const { return lower.size(); }
  bool Contains(const Vector& v) const;
};

class BoxConstraints {
 public:
  explicit BoxConstraints(std::vector<SubsystemBox> subsystems);

  // +-infinity everywhere.
  static BoxConstraints Unbounded(const CompositeModel& model);

  // Throws DimensionError on size mismatch and Error on lower > upper or NaN.
  void Validate(const CompositeModel& model) const;

  const SubsystemBox& subsystem(int i) const;
  int num_subsystems() const { return static_cast<int>(boxes_.size()); }

  // Box over z_i = (x^i, {w^i}) for a given horizon.
  Box Local(int i, int horizon) const;
  // Box over the global z ordering of `layout`.
  Box Global(const DecisionLayout& layout) const;

 private:
  std::vector<SubsystemBox> boxes_;
};

// Componentwise clamp, the Euclidean projection onto the box.
Vector ProjectBox(const Vector& v, const Box& box);

}  // namespace dmhe

#endif  // DMHE_BOX_H_
