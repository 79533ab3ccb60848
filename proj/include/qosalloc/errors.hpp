/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The qosalloc Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>

namespace qosalloc {

// Argument outside the mathematical domain of an operation (negative power,
// probability outside (0,1), non-positive price, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Key not present in a fixed table (CQI index outside 1..15).
class LookupError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

// Caller violated a documented precondition that is not a pure domain issue
// (too few samples, too many UEs for an exhaustive search, ...).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qosalloc
