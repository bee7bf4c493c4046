/*
 * Copyright 2026 The solotrace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <compare>

#include "solotrace/formula_table.hpp"
#include "solotrace/types.hpp"

namespace solotrace::engine {

/// (φ, i): formula φ holds at position i.
struct Tuple {
  FormulaId formula;
  Position position = 0;
  friend auto operator<=>(const Tuple&, const Tuple&) = default;
};

/// (ψ, i). Sorting compares the superformula first and the position
/// second; grouping looks at the superformula only.
struct CompositeKey {
  FormulaId super;
  Position position = 0;
  friend auto operator<=>(const CompositeKey&, const CompositeKey&) = default;
};

/// ((ψ, i), (φ, i)) with φ a direct subformula of ψ.
struct IntermediateTuple {
  CompositeKey key;
  Tuple value;
};

}  // namespace solotrace::engine
