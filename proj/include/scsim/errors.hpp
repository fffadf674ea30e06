/*
 * Copyright 2026 The scsim Authors
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
#include <string>

namespace scsim {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a contract (shape, range, encoding, file contents).
/// The CLI maps this family to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EncodingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Scale factors that cannot be reconciled (mismatch or non power-of-two ratio).
class ScaleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A stream that must be in thermometer (sorted) form is not.
class CanonicalError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MonotonicityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed file or literal. Carries the offending location in the message.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Invalid or missing hardware configuration (BSL, stage geometry, widths).
/// The CLI maps this family to exit code 3.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace scsim
