#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace biqrm {

// Raised when panel refinement cannot reach the requested tolerance; carries
// the best value together with the achieved error estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what), value_(value), error_estimate_(error_estimate) {}
  double value() const { return value_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

struct QuadratureResult {
  double value;
  double error_estimate;
  int panels;
};

// Adaptive Gauss-Kronrod (G7,K15) over [a, b]. Initial panel edges can be
// supplied through `breakpoints` (values outside (a, b) are dropped); panels
// whose error dominates are bisected until
//   total_error <= rel_tol * |value| + abs_floor
// or the panel budget is exhausted, which raises QuadratureError.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    std::span<const double> breakpoints,
                                    double rel_tol, double abs_floor = 0.0,
                                    int max_panels = 4000);

}  // namespace biqrm
