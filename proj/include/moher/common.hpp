// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace moher {

/// Dense site identifier. Dataset sites use their index; hypothetical sites
/// (targets that were never materialized) use negative values.
using SiteUid = std::int64_t;

/// Index into the dataset's mode list.
using ModeId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument values (non-finite coordinates, negative counts, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Slot or window requests outside the available data.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Schema violations and dangling references in ingested data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite losses, degenerate statistics, failed gradient checks.
class NumericError : public Error {
 public:
  using Error::Error;
};

class MissingRelation : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Half-open slot interval [begin, end).
struct SlotRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool contains(std::size_t slot) const { return slot >= begin && slot < end; }
  friend bool operator==(const SlotRange&, const SlotRange&) = default;
};

}  // namespace moher
