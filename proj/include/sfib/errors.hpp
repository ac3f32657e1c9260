#pragma once

#include <stdexcept>
#include <string>

namespace sfib {

/// A requested computation would exceed a hard resource bound (memory, word length).
class ResourceLimit : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Floating-point range exceeded while forming explicit matrix products.
class NumericalOverflow : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A band edge could not be certified; carries the last bracketing interval.
class UnresolvedEdge : public std::runtime_error {
  public:
    UnresolvedEdge(double lo, double hi, const std::string& what)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

  private:
    double lo_;
    double hi_;
};

}  // namespace sfib
