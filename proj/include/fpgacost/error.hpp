// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy. Each family maps onto one CLI exit code.

#pragma once

#include <stdexcept>
#include <string>

namespace fpgacost {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent network document.
class NetworkError : public Error {
 public:
  using Error::Error;
};

/// Unknown board/strategy, invalid registry, bad synthesis or generator config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Model file missing, corrupt, or incompatible.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Dataset ingestion and split failures.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or otherwise unrecoverable training state.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpgacost
