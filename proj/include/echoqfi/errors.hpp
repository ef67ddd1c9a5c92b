#pragma once

#include <stdexcept>
#include <string>

namespace echoqfi {

/// Violation of a numerical contract (e.g. an operator that should be
/// unitary or Hermitian exceeds the stated tolerance).
struct contract_error : std::runtime_error {
    explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested problem size exceeds a hard capacity limit.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// A block-structured representation cannot express the requested operation.
struct representation_error : std::runtime_error {
    explicit representation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace echoqfi
