// Copyright 2026 The awekws Authors.
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

#include <doctest.h>

#include "awekws/gradcheck.hpp"

using namespace awekws;

TEST_CASE("every backward pass matches finite differences") {
  for (const auto& r : gradcheck_all()) {
    INFO(r.target << " max rel " << r.max_relative_error << " failures " << r.failures << "/" << r.entries);
    CHECK(r.passed());
    CHECK(r.trials == 20);
  }
}
