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

#include <sstream>
#include <string>

#include "solotrace/trace.hpp"

namespace solotrace::testing {

inline Trace trace_from(const std::string& text) {
  std::istringstream in(text);
  return load_trace(in);
}

// five entries over a, b, c
inline Trace t1() { return trace_from("1,1,a\n2,3,a;b\n3,6,b\n4,10,a;c\n5,12,c\n"); }

// alternating requests and responses
inline Trace t2() { return trace_from("1,2,req\n2,4,res\n3,7,req\n4,9,res\n5,11,req\n6,13,res\n"); }

// a with gaps, for the max-count buckets
inline Trace t3() { return trace_from("1,1,a\n2,2,z\n3,3,a\n4,5,a\n5,7,z\n"); }

}  // namespace solotrace::testing
