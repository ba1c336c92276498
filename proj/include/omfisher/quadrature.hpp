#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration over a list of
// breakpoints. The integrand may return a double or a fixed-size Eigen
// matrix; the error is measured in the max-abs norm.

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "omfisher/errors.hpp"

namespace omfisher::quad {

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  int max_panels = 4000;
};

template <class T>
struct Result {
  T value;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline double norm_inf(double x) { return std::abs(x); }
template <class D>
double norm_inf(const Eigen::MatrixBase<D>& m) {
  return m.cwiseAbs().maxCoeff();
}

inline double abs_of(double x) { return std::abs(x); }
template <class D>
auto abs_of(const Eigen::MatrixBase<D>& m) {
  return m.cwiseAbs().eval();
}

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

template <class T, class F>
Panel<T> gauss_kronrod(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T resk = fc * kWgk[7];
  T resg = fc * kWg[3];
  T f1[7], f2[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    f1[j] = f(c - x);
    f2[j] = f(c + x);
    resk = T(resk + (f1[j] + f2[j]) * kWgk[j]);
    if (j % 2 == 1) resg = T(resg + (f1[j] + f2[j]) * kWg[j / 2]);
  }
  const T mean = resk * 0.5;
  using Abs = decltype(abs_of(fc));
  Abs asc = abs_of(T(fc - mean)) * kWgk[7];
  for (int j = 0; j < 7; ++j)
    asc = Abs(asc + (abs_of(T(f1[j] - mean)) + abs_of(T(f2[j] - mean))) * kWgk[j]);

  double err = norm_inf(T((resk - resg) * h));
  const double resasc = norm_inf(Abs(asc * std::abs(h)));
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return Panel<T>{a, b, T(resk * h), err};
}

}  // namespace detail

template <class F>
auto integrate(F&& f, std::vector<double> points, const Options& opt = {})
    -> Result<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  using P = detail::Panel<T>;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 2) throw DomainError("integrate: need a non-empty interval");

  auto worse = [](const P& x, const P& y) { return x.error < y.error; };
  std::vector<P> heap;
  std::vector<P> frozen;  // panels too narrow to split further
  int evals = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    heap.push_back(detail::gauss_kronrod<T>(f, points[i], points[i + 1]));
    evals += 15;
  }
  std::make_heap(heap.begin(), heap.end(), worse);

  auto totals = [&](T& value, double& err) {
    bool first = true;
    err = 0.0;
    for (const auto* list : {&heap, &frozen}) {
      for (const auto& p : *list) {
        value = first ? p.value : T(value + p.value);
        first = false;
        err += p.error;
      }
    }
  };

  T value = heap.front().value;
  double err = 0.0;
  totals(value, err);
  bool converged = false;
  int panels = static_cast<int>(heap.size());
  while (true) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * detail::norm_inf(value));
    if (err <= tol) {
      converged = true;
      break;
    }
    if (heap.empty() || panels >= opt.max_panels) break;
    std::pop_heap(heap.begin(), heap.end(), worse);
    P worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 1e-13 * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    heap.push_back(detail::gauss_kronrod<T>(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(detail::gauss_kronrod<T>(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), worse);
    evals += 30;
    ++panels;
    totals(value, err);
  }
  return Result<T>{value, err, evals, converged};
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Like integrate(), but non-convergence raises QuadratureError carrying
// the partial estimate.
template <class F>
auto integrate_or_throw(F&& f, std::vector<double> points, const Options& opt,
                        const std::string& what) {
  auto r = integrate(std::forward<F>(f), std::move(points), opt);
  if (!r.converged)
    throw QuadratureError(what + ": quadrature did not converge",
                          detail::norm_inf(r.value), r.abs_error);
  return r;
}

}  // namespace omfisher::quad
