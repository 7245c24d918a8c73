#include "comic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace comic {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b, int depth) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), depth};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, int max_depth) {
  if (a == b) return {};
  constexpr int kMaxSegments = 4000;
  std::priority_queue<Segment> heap;
  heap.push(gauss_kronrod(f, a, b, 0));
  double value = heap.top().value;
  double error = heap.top().error;
  int evaluations = 15;
  std::vector<Segment> done;
  while (!heap.empty() && error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         static_cast<int>(heap.size() + done.size()) < kMaxSegments) {
    Segment worst = heap.top();
    heap.pop();
    if (worst.depth >= max_depth) {
      done.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gauss_kronrod(f, worst.a, mid, worst.depth + 1);
    Segment right = gauss_kronrod(f, mid, worst.b, worst.depth + 1);
    evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to avoid drift from the incremental updates.
  value = 0.0;
  error = 0.0;
  for (const auto& s : done) {
    value += s.value;
    error += s.error;
  }
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, evaluations};
}

QuadratureResult integrate_2d(const std::function<double(double, double)>& f, double a1, double b1, double a2,
                              double b2, double abs_tol, double rel_tol) {
  int evaluations = 0;
  double inner_error = 0.0;
  auto outer = [&](double x) {
    auto r = integrate([&](double y) { return f(x, y); }, a2, b2, abs_tol * 0.1, rel_tol * 0.1);
    evaluations += r.evaluations;
    inner_error = std::max(inner_error, r.error);
    return r.value;
  };
  auto r = integrate(outer, a1, b1, abs_tol, rel_tol);
  return {r.value, r.error + inner_error * std::abs(b1 - a1), evaluations};
}

}  // namespace comic
