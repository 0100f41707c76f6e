// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHUFFLEDP_SHUFFLEDP_HPP_
#define SHUFFLEDP_SHUFFLEDP_HPP_

#include "shuffledp/adversary.hpp"
#include "shuffledp/base_protocol.hpp"
#include "shuffledp/dataset.hpp"
#include "shuffledp/defense.hpp"
#include "shuffledp/errors.hpp"
#include "shuffledp/harness.hpp"
#include "shuffledp/noise.hpp"
#include "shuffledp/query.hpp"
#include "shuffledp/random.hpp"
#include "shuffledp/shuffle.hpp"
#include "shuffledp/tree_plan.hpp"

#endif  // SHUFFLEDP_SHUFFLEDP_HPP_
