#include "biqrm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace biqrm {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double result_gauss = 0.0;
  double result_kronrod = kWgk[7] * f(center);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    result_kronrod += kWgk[j] * (fv1[j] + fv2[j]);
  }
  // Gauss points sit at the odd Kronrod indices
  for (int j = 0; j < 3; ++j) {
    result_gauss += kWg[j] * (fv1[2 * j + 1] + fv2[2 * j + 1]);
  }
  result_gauss += kWg[3] * f(center);
  Panel p;
  p.a = a;
  p.b = b;
  p.value = result_kronrod * half;
  p.error = std::abs((result_kronrod - result_gauss) * half);
  return p;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, std::span<const double> breakpoints,
                                    double rel_tol, double abs_floor, int max_panels) {
  if (a == b) return {0.0, 0.0, 0};
  if (!(b > a)) throw std::invalid_argument("integration bounds out of order");

  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<Panel> queue;
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Panel p = evaluate_panel(f, edges[i], edges[i + 1]);
    value += p.value;
    error += p.error;
    queue.push(p);
    ++panels;
  }

  auto converged = [&] { return error <= rel_tol * std::abs(value) + abs_floor; };
  while (!converged() && panels < max_panels) {
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval collapsed to machine width; put it back and stop refining
      queue.push(worst);
      break;
    }
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }

  if (!converged()) {
    throw QuadratureError("quadrature tolerance not reached", value, error);
  }
  return {value, error, panels};
}

}  // namespace biqrm
