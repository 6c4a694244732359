// Copyright 2026 The pastq Authors
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

#include <map>
#include <span>
#include <vector>

#include "pastq/filter.hpp"

namespace pastq::detail {

/// Grid index -> projector sets, in the order the interruptions were given.
using InterruptionSchedule = std::map<std::size_t, std::vector<const std::vector<Operator>*>>;

InterruptionSchedule build_schedule(std::span<const Interruption> interruptions, double dt, std::size_t n_steps,
                                    Index dim);

std::vector<double> grid_times(double dt, std::size_t n_steps);

}  // namespace pastq::detail
