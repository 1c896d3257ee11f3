#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace biqrm {

// Modulus of continuity over the source set
//   M_{r,p} = { g = |T|^(p/2) g~ : ||g~|| <= r }
// of a diagonal operator with multipliers mu.
//
// Normalization: all values here follow the single-element convention
//   omega(delta) = sup{ ||g|| : g in M_{r,p}, ||T g|| <= delta },
// for which the closed form r^(2/(p+2)) delta^(p/(p+2)) is exact on the
// spectrum. The paired-difference modulus
//   sup{ ||f1 - f2|| : f1, f2 in M_{r,p}, ||T f1 - T f2|| <= delta }
// equals 2 * omega(delta/2) by the central symmetry and convexity of
// M_{r,p}; modulus_oracle computes that paired form directly.
struct ModulusQuery {
  std::vector<double> mu;  // nonzero multipliers, mode order
  double p;                // > 0
  double r;                // > 0
  double delta;            // > 0

  // delta^2 / r^2 in { |mu_n|^(p+2) } to 1e-12 relative.
  bool spectrum_member(double rel_tol = 1e-12) const;
  // r * max|mu_n|^((p+2)/2), the largest delta the two-sided bounds cover.
  double delta0() const;
};

// r^(2/(p+2)) delta^(p/(p+2)); requires spectrum membership, otherwise
// throws std::domain_error directing the caller to modulus_bounds.
double modulus_closed_form(const ModulusQuery& q);

struct ModulusBounds {
  double lower;
  double upper;
  std::size_t bracket_index;  // n with delta^2/r^2 between modes n, n+1 (1-based)
  bool descending_pair;       // |mu_{n+1}|^(p+2) <= delta^2/r^2 <= |mu_n|^(p+2)
};

// Two-sided bracket scaled by the extreme consecutive-multiplier ratios.
// Requires delta <= delta0 and delta^2/r^2 off the spectrum but above the
// smallest truncated eigenvalue of |T|^(p+2); throws std::out_of_range
// otherwise.
ModulusBounds modulus_bounds(const ModulusQuery& q);

// One vertex of the two-constraint program
//   max sum x_n  s.t.  sum x_n |mu_n|^(-p) <= r^2, sum mu_n^2 x_n <= eps^2,
// where x_n are squared coefficients. The optimum is supported on at most
// two modes; enumeration is exact. support values are 0-based, -1 = unused.
struct ModulusVertex {
  std::array<int, 2> support{-1, -1};
  std::array<double, 2> squared_coeff{0.0, 0.0};
  double value = 0.0;  // optimal sum of squares
};

ModulusVertex modulus_extremal_vertex(const ModulusQuery& q, double eps);

// Single-element modulus by brute force: sqrt of the program optimum at
// eps = delta. Refuses instances with more than 16 modes (verification
// only).
double modulus_oracle_single(const ModulusQuery& q);

// Paired-difference modulus via the reduction 2 * sup{ ||g|| : g in M_{r,p},
// ||T g|| <= delta/2 }; equals 2 * modulus_oracle_single at delta/2.
double modulus_oracle(const ModulusQuery& q);

}  // namespace biqrm
