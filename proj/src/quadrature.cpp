#include "openqx/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace openqx {

namespace {

// Kronrod 15-point nodes/weights on [-1, 1] and the embedded Gauss-7 weights.
constexpr double kKronrodNode[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

constexpr double kKronrodWeight[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

// Gauss-7 weights aligned with the odd Kronrod nodes (indices 1,3,...,13).
constexpr double kGaussWeight[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Segment {
  double a, b;
  double error;
  ComplexMatrix value;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment evaluate_segment(const std::function<ComplexMatrix(double)>& f,
                         double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  ComplexMatrix kronrod, gauss;
  for (int i = 0; i < 15; ++i) {
    ComplexMatrix fx = f(mid + half * kKronrodNode[i]);
    if (kronrod.size() == 0) {
      kronrod = ComplexMatrix::Zero(fx.rows(), fx.cols());
      gauss = kronrod;
    }
    kronrod += kKronrodWeight[i] * fx;
    if (i % 2 == 1) gauss += kGaussWeight[i / 2] * fx;
  }
  kronrod *= half;
  gauss *= half;
  return Segment{a, b, max_abs(kronrod - gauss), std::move(kronrod)};
}

}  // namespace

ComplexMatrix integrate_matrix(const std::function<ComplexMatrix(double)>& f,
                               double a, double b,
                               const QuadratureOptions& opts) {
  if (a == b) {
    ComplexMatrix probe = f(a);
    return ComplexMatrix::Zero(probe.rows(), probe.cols());
  }
  std::priority_queue<Segment> queue;
  Segment whole = evaluate_segment(f, a, b);
  ComplexMatrix total = whole.value;
  double total_error = whole.error;
  queue.push(std::move(whole));

  int splits = 0;
  while (total_error > opts.abs_tol &&
         total_error > opts.rel_tol * max_abs(total)) {
    if (++splits > opts.max_subdivisions) {
      throw QuadratureError("adaptive quadrature failed to converge: error " +
                            std::to_string(total_error));
    }
    Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval collapsed to machine resolution; accept its estimate.
      total_error -= worst.error;
      continue;
    }
    Segment left = evaluate_segment(f, worst.a, mid);
    Segment right = evaluate_segment(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }
  return total;
}

Complex integrate_scalar(const std::function<Complex(double)>& f, double a,
                         double b, const QuadratureOptions& opts) {
  auto wrapped = [&f](double x) {
    ComplexMatrix m(1, 1);
    m(0, 0) = f(x);
    return m;
  };
  return integrate_matrix(wrapped, a, b, opts)(0, 0);
}

ComplexMatrix integrate_sampled(const std::vector<ComplexMatrix>& values,
                                double step) {
  if (values.empty()) throw ValidationError("integrate_sampled: empty table");
  const int n = static_cast<int>(values.size()) - 1;
  ComplexMatrix acc = ComplexMatrix::Zero(values[0].rows(), values[0].cols());
  if (n == 0) return acc;
  int last_even = (n % 2 == 0) ? n : n - 1;
  for (int k = 0; k + 2 <= last_even; k += 2) {
    acc += (step / 3.0) * (values[k] + 4.0 * values[k + 1] + values[k + 2]);
  }
  if (n % 2 != 0) {
    acc += 0.5 * step * (values[n - 1] + values[n]);
  }
  return acc;
}

}  // namespace openqx
