/*
 * Copyright 2026 The Stratlift Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef STRATLIFT_ERRORS_H_
#define STRATLIFT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace stratlift {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto exit codes: input problems exit with 2, identification
// problems with 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required column is missing or the header is unusable.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A field could not be parsed; the message carries the 1-based row number.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input that violates a data invariant (duplicate ids,
// negative outcomes, period gaps, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A function was called outside its domain (empty arm, too few draws, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The requested model is not identified on this data.
class IdentificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace stratlift

#endif  // STRATLIFT_ERRORS_H_
