/******************************************************************************
 * Copyright 2026 The Platoon Tuner Authors. All Rights Reserved.
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
 *****************************************************************************/

#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical or tuning parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A pole-placement existence condition does not hold for the requested
/// performance specification (e.g. lambda_M too far left for tau_d).
class ConditionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (scenario files, certificates, CLI values).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace platoon
