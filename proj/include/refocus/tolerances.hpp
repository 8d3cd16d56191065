// Copyright 2026 The Refocus Authors
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

#pragma once

namespace refocus {

// Every numerical threshold used by the library lives here.
struct Tolerances {
  double absolute = 1e-12;
  // ‖M†M − 𝟙‖_max ≤ unitarity · d at construction.
  double unitarity = 1e-12;
  // Looser bound for values produced by long chains of products.
  double unitarity_product = 1e-11;
  double determinant = 1e-10;
  // Closed-region predicates accept values this far past the boundary.
  double region_slack = 1e-12;
  // Pulses whose product differs from the trace operator by more than this
  // indicate a bookkeeping bug.
  double reconstruction = 1e-9;
};

inline constexpr Tolerances kTolerances{};

}  // namespace refocus
