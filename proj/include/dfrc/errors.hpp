// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace dfrc {

/// Dimension mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition on the numerical content of an argument does not hold
/// (non-Hermitian input, failed PSD check, invalid parameter range, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or invalid configuration / scenario document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The brute-force oracle refused a problem that is too large to enumerate.
class OracleGuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dfrc
