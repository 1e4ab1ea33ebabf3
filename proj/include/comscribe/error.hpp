/*
 Copyright 2026 The ComScribe Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace comscribe {

// Base of every error raised by the library. Non-fatal conditions (unmatched
// events, incompatible collective arguments) are reported as Diagnostic
// values instead, see grouping.hpp.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Trace line that is not valid JSON.
class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": malformed JSON: " + what),
          line_no_(line_no) {}
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::size_t line_no_;
};

// Required field missing or of the wrong type.
class SchemaViolation : public Error {
public:
    SchemaViolation(std::size_t line_no, std::string field, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": field \"" + field + "\": " + what),
          line_no_(line_no), field_(std::move(field)) {}
    std::size_t line_no() const noexcept { return line_no_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_no_;
    std::string field_;
};

// Well-typed data that breaks a domain invariant (rank >= nranks, bad root...).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

class WrongAlgorithm : public Error {
public:
    using Error::Error;
};

class MissingRoot : public Error {
public:
    using Error::Error;
};

class DegenerateTree : public Error {
public:
    using Error::Error;
};

class EndpointOutOfRange : public Error {
public:
    using Error::Error;
};

class CounterOverflow : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace comscribe
