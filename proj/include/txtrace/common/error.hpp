// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace txtrace {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Network or HTTP-level failure; callers may retry.
class TransportError : public Error {
  public:
    using Error::Error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

class SchemaError : public Error {
  public:
    SchemaError(std::string field, const std::string& detail)
        : Error("schema error at '" + field + "': " + detail), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

class MalformedTraceError : public Error {
  public:
    MalformedTraceError(std::size_t index, const std::string& detail)
        : Error("malformed trace at entry " + std::to_string(index) + ": " + detail), index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

//! Shadow state drifted from the concrete trace. Indicates a bug, not bad input.
class ConsistencyError : public Error {
  public:
    ConsistencyError(std::size_t index, const std::string& detail)
        : Error("internal consistency error at entry " + std::to_string(index) + ": " + detail), index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

class UsageError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace txtrace
