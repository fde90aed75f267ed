// Copyright 2026 The photonsub Authors
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

#ifndef PHOTONSUB_ERRORS_HPP
#define PHOTONSUB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace photonsub {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Sizes or indices that do not line up.
class DimensionError : public Error {
   public:
    using Error::Error;
};

/// A state or transform that violates a physical constraint
/// (uncertainty relation, unitarity, loss outside (0,1], ...).
class UnphysicalError : public Error {
   public:
    using Error::Error;
};

/// Fock-space cutoff or sampling grid too small for the requested accuracy.
class TruncationError : public Error {
   public:
    using Error::Error;
};

/// The heralding probability of a subtraction channel vanishes.
class HeraldingError : public Error {
   public:
    using Error::Error;
};

/// Malformed scenario configuration. `field` is a dotted path into the
/// document; `line`/`column` are set for syntax errors.
class ConfigError : public Error {
   public:
    ConfigError(std::string field, const std::string &what, int line = 0, int column = 0)
        : Error(format(field, what, line, column)), field_(std::move(field)), line_(line), column_(column) {
    }

    const std::string &field() const noexcept {
        return field_;
    }
    int line() const noexcept {
        return line_;
    }
    int column() const noexcept {
        return column_;
    }

   private:
    static std::string format(const std::string &field, const std::string &what, int line, int column) {
        std::string out;
        if (line > 0) {
            out += "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
        }
        if (!field.empty()) {
            out += "field '" + field + "': ";
        }
        return out + what;
    }

    std::string field_;
    int line_;
    int column_;
};

}  // namespace photonsub

#endif
