#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <vector>

namespace usc {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  long max_evals = 2000000;
  double eta = 1e-6;  // contour offset omega + i eta for the Green's functions
};

template <int M>
using CArray = Eigen::Array<std::complex<double>, M, 1>;

template <int M>
struct QuadResult {
  CArray<M> value = CArray<M>::Zero();
  double error = 0.0;
  long evals = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 on [-1, 1]
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class Map { Finite, Right, Left };

struct Piece {
  double a, b;
  Map map;
  double anchor;
  double err;
  int id;
  bool operator<(const Piece& o) const { return err < o.err; }
};

}  // namespace detail

// Adaptive vector-valued integral over the whole real line. Breakpoints split the
// finite part; tails beyond the outermost breakpoints use x = anchor +- (1 - t)/t.
template <int M, class F>
QuadResult<M> integrate_line(F&& f, std::vector<double> breaks, const QuadratureSpec& spec) {
  using namespace detail;
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.empty()) breaks.push_back(0.0);
  if (breaks.size() == 1) breaks.push_back(breaks[0] + 1.0);

  QuadResult<M> res;
  std::vector<CArray<M>> vals;
  std::priority_queue<Piece> heap;

  auto eval = [&](double a, double b, Map map, double anchor, double& err) {
    double c = 0.5 * (a + b), hl = 0.5 * (b - a);
    auto at = [&](double t) -> CArray<M> {
      switch (map) {
        case Map::Finite:
          return f(t);
        case Map::Right:
          return f(anchor + (1.0 - t) / t) / (t * t);
        case Map::Left:
          return f(anchor - (1.0 - t) / t) / (t * t);
      }
      return CArray<M>::Zero();
    };
    CArray<M> fc = at(c);
    CArray<M> rk = fc * kWgk[7];
    CArray<M> rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
      CArray<M> f1 = at(c - hl * kXgk[j]);
      CArray<M> f2 = at(c + hl * kXgk[j]);
      rk += (f1 + f2) * kWgk[j];
      if (j % 2 == 1) rg += (f1 + f2) * kWg[j / 2];
    }
    res.evals += 15;
    rk *= hl;
    rg *= hl;
    err = (rk - rg).abs().maxCoeff();
    if (!std::isfinite(err)) err = std::numeric_limits<double>::max();
    return rk;
  };

  CArray<M> sum = CArray<M>::Zero();
  double err = 0.0;
  auto push = [&](double a, double b, Map map, double anchor) {
    double e;
    vals.push_back(eval(a, b, map, anchor, e));
    sum += vals.back();
    err += e;
    heap.push({a, b, map, anchor, e, static_cast<int>(vals.size()) - 1});
  };

  push(0.0, 1.0, Map::Left, breaks.front());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) push(breaks[i], breaks[i + 1], Map::Finite, 0.0);
  push(0.0, 1.0, Map::Right, breaks.back());

  double stuck = 0.0;  // error of pieces too small to split
  std::vector<int> frozen;
  while (!heap.empty()) {
    double tol = std::max(spec.abs_tol, spec.rel_tol * sum.abs().maxCoeff());
    if (err + stuck <= tol) {
      res.converged = true;
      break;
    }
    if (res.evals + 30 > spec.max_evals) break;
    Piece worst = heap.top();
    heap.pop();
    err -= worst.err;
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      stuck += worst.err;
      frozen.push_back(worst.id);
      continue;
    }
    sum -= vals[worst.id];
    push(worst.a, mid, worst.map, worst.anchor);
    push(mid, worst.b, worst.map, worst.anchor);
  }
  // resum to shed the drift of the running totals
  CArray<M> fin = CArray<M>::Zero();
  double ferr = stuck;
  for (int id : frozen) fin += vals[id];
  while (!heap.empty()) {
    fin += vals[heap.top().id];
    ferr += heap.top().err;
    heap.pop();
  }
  res.value = fin;
  res.error += ferr;
  return res;
}

}  // namespace usc
