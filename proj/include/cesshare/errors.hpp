// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_ERRORS_HPP
#define CESSHARE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cesshare {

/// Malformed caller input: bad indices, NaN coefficients, inconsistent shapes.
/// Distinct from infeasibility, which is a regular solver status.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Data file failed validation; the message names the offending field.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver hit a configured resource limit (iterations, nodes).
/// Never used to paper over suboptimality.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Invariant broken inside the library itself (tolerance bug, singular basis).
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

} // namespace cesshare

#endif
