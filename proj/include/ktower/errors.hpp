#pragma once

#include <stdexcept>
#include <string>

namespace ktower {

/// Thrown when an operation is called outside its documented domain.
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A search or iteration ran out of its configured budget (height, retries, size cap).
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

/// Construction constants cannot be realised at this depth within the size caps.
class infeasible_schedule : public std::runtime_error {
public:
    explicit infeasible_schedule(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw precondition_error(msg);
}

} // namespace ktower
