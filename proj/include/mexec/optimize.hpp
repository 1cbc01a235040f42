// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "mexec/distance.hpp"
#include "mexec/error.hpp"

namespace mexec {

using Vec = std::vector<double>;

// Objective with an evaluation counter. Non-finite values are reported as
// kSentinel so the optimizers never see NaN.
class Objective {
 public:
  Objective(int arity, std::function<double(const Vec&)> fn)
      : arity_(arity), fn_(std::move(fn)), count_(std::make_shared<long long>(0)) {}

  double operator()(const Vec& x) const {
    ++*count_;
    for (double xi : x) {
      if (!std::isfinite(xi)) return kSentinel;
    }
    double v = fn_(x);
    return std::isfinite(v) ? v : kSentinel;
  }
  int arity() const { return arity_; }
  long long evals() const { return *count_; }
  void reset_count() const { *count_ = 0; }

 private:
  int arity_;
  std::function<double(const Vec&)> fn_;
  std::shared_ptr<long long> count_;
};

// Axis-aligned search box; per-dimension bounds override the scalar ones.
struct Box {
  double lo = -1e3;
  double hi = 1e3;
  std::vector<std::pair<double, double>> dims;

  double lower(std::size_t i) const { return i < dims.size() ? dims[i].first : lo; }
  double upper(std::size_t i) const { return i < dims.size() ? dims[i].second : hi; }
  Vec clamp(Vec x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::isnan(x[i])) x[i] = lower(i);
      x[i] = std::clamp(x[i], lower(i), upper(i));
    }
    return x;
  }
  void validate() const {
    if (!(lo < hi)) throw Error(ErrorKind::InvalidConfig, "box needs lo < hi");
    for (const auto& [l, h] : dims) {
      if (!(l < h)) throw Error(ErrorKind::InvalidConfig, "box needs lo < hi");
    }
  }
};

struct LocalMinConfig {
  double xtol = 1e-8;
  double ftol = 1e-8;
  int max_powell_rounds = 50;
  double bracket_growth = 2.0;
  int max_bracket_steps = 80;
  int brent_max_iter = 100;
  long long max_evals = 20000;
  // Stop as soon as f reaches this value (the driver uses 0).
  std::optional<double> stop_at;
  // Coordinate-wise refinement to land exactly on roots of squared gaps.
  bool polish = true;
  double polish_below = 1e-6;
};

struct MCMCConfig {
  int n_iter = 5;
  double step_scale = 50.0;
  double temperature = 1.0;
  LocalMinConfig local;
  std::uint64_t seed = 0;
  // Proposals are clamped into the box when set.
  std::optional<Box> box;
};

struct Bracket {
  double lo, mid, hi;
};

struct LineMin {
  double t;
  double value;
};

struct LocalMin {
  Vec x;
  double value;
  int rounds = 0;
};

// `candidate` beats `incumbent` by more than the relative noise floor, or
// reaches zero from above.
inline bool significantly_better(double candidate, double incumbent, double ftol) {
  if (candidate == 0.0 && incumbent > 0.0) return true;
  return candidate < incumbent - ftol * std::fabs(incumbent);
}

namespace detail {

inline double sign_of(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// Brent's parabolic / golden-section minimizer on a bracket whose middle
// value `fb` is already known.
template <class G>
LineMin brent(const G& g, double ax, double bx, double cx, double fb, double tol, int max_iter,
              std::optional<double> stop_at) {
  constexpr double kGold = 0.3819660112501051;
  constexpr double kZeps = 1e-25;
  double a = std::min(ax, cx), b = std::max(ax, cx);
  double x = bx, w = bx, v = bx;
  double fx = fb, fw = fb, fv = fb;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    if (stop_at && fx <= *stop_at) break;
    double xm = 0.5 * (a + b);
    double tol1 = tol * std::fabs(x) + kZeps;
    double tol2 = 2.0 * tol1;
    if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    if (std::fabs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      double etemp = e;
      e = d;
      if (std::fabs(p) >= std::fabs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x)) {
        e = x >= xm ? a - x : b - x;
        d = kGold * e;
      } else {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = sign_of(tol1, xm - x);
      }
    } else {
      e = x >= xm ? a - x : b - x;
      d = kGold * e;
    }
    double u = std::fabs(d) >= tol1 ? x + d : x + sign_of(tol1, d);
    double fu = g(u);
    if (fu <= fx) {
      if (u >= x) a = x;
      else b = x;
      v = w; w = x; x = u;
      fv = fw; fw = fx; fx = fu;
    } else {
      if (u < x) a = u;
      else b = u;
      if (fu <= fw || w == x) {
        v = w; w = u;
        fv = fw; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx};
}

// Minimizes g along t starting from t = 0 with g(0) = g0. Brackets by
// doubling outward in the descending direction, then refines with Brent.
template <class G>
LineMin line_search(const G& g, double g0, double h, const LocalMinConfig& cfg) {
  double gh = g(h);
  double a = 0.0, b, c, fb;
  if (gh < g0) {
    b = h;
    fb = gh;
  } else {
    double gm = g(-h);
    if (gm < g0) {
      b = -h;
      fb = gm;
      h = -h;
    } else {
      if (cfg.stop_at && g0 <= *cfg.stop_at) return {0.0, g0};
      return brent(g, -h, 0.0, h, g0, cfg.xtol, cfg.brent_max_iter, cfg.stop_at);
    }
  }
  // b is downhill of a; grow until the function stops decreasing.
  c = b + cfg.bracket_growth * (b - a);
  double fc = g(c);
  int steps = 0;
  while (fc < fb) {
    if (cfg.stop_at && fc <= *cfg.stop_at) return {c, fc};
    if (++steps >= cfg.max_bracket_steps || !std::isfinite(c)) return {c, fc};
    a = b;
    b = c;
    fb = fc;
    c = b + cfg.bracket_growth * (b - a);
    fc = g(c);
  }
  if (cfg.stop_at && fb <= *cfg.stop_at) return {b, fb};
  return brent(g, a, b, c, fb, cfg.xtol, cfg.brent_max_iter, cfg.stop_at);
}

// Determinant of the matrix whose rows are the given unit vectors.
inline double unit_det(std::vector<Vec> m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double k = m[r][col] / m[col][col];
      for (std::size_t j = col; j < n; ++j) m[r][j] -= k * m[col][j];
    }
  }
  return det;
}

inline double inf_norm(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

inline bool normalize(Vec& d) {
  double s = 0.0;
  for (double v : d) s += v * v;
  s = std::sqrt(s);
  if (!(s > 0.0) || !std::isfinite(s)) return false;
  for (double& v : d) v /= s;
  return true;
}

}  // namespace detail

// One-dimensional minimization on a valid bracket lo < mid < hi (either
// orientation) with g(mid) no larger than both ends.
template <class G>
LineMin brent_line_min(const G& g, Bracket br, double tol = 1e-8, int max_iter = 100) {
  if (br.lo > br.hi) std::swap(br.lo, br.hi);
  if (!(br.lo < br.mid && br.mid < br.hi)) {
    throw Error(ErrorKind::InvalidBracket, "bracket must satisfy lo < mid < hi");
  }
  double flo = g(br.lo), fmid = g(br.mid), fhi = g(br.hi);
  if (!(fmid <= flo && fmid <= fhi)) {
    throw Error(ErrorKind::InvalidBracket, "middle point is not lower than both ends");
  }
  return detail::brent(g, br.lo, br.mid, br.hi, fmid, tol, max_iter, std::nullopt);
}

// Walks each coordinate to the lowest nearby value: a tight Brent pass and
// then a scan of the neighbouring doubles, which lands on exact roots that
// Brent's tolerance cannot resolve.
inline void polish(const Objective& f, Vec& x, double& fx, const LocalMinConfig& cfg) {
  constexpr int kUlps = 8;
  for (std::size_t i = 0; i < x.size() && fx > 0.0; ++i) {
    const double xi = x[i];
    auto g = [&](double t) {
      Vec y = x;
      y[i] = xi + t;
      return f(y);
    };
    double h = std::max(std::fabs(xi) * 1e-6, 1e-300);
    double fl = g(-h), fh = g(h);
    if (fx <= fl && fx <= fh) {
      LineMin m = detail::brent(g, -h, 0.0, h, fx, 1e-15, cfg.brent_max_iter, 0.0);
      if (significantly_better(m.value, fx, cfg.ftol)) {
        x[i] = xi + m.t;
        fx = m.value;
      }
    } else if (significantly_better(std::min(fl, fh), fx, cfg.ftol)) {
      x[i] = fl < fh ? xi - h : xi + h;
      fx = std::min(fl, fh);
    }
    for (double dir : {-1.0, 1.0}) {
      Vec y = x;
      for (int k = 0; k < kUlps && fx > 0.0; ++k) {
        y[i] = std::nextafter(y[i], dir * std::numeric_limits<double>::infinity());
        double fy = f(y);
        if (significantly_better(fy, fx, cfg.ftol)) {
          x[i] = y[i];
          fx = fy;
        }
      }
    }
  }
}

// Powell's conjugate-direction method with Brent line searches. Returns the
// start point unchanged unless the improvement clears the ftol noise floor.
inline LocalMin powell_minimize(const Objective& f, const Vec& x0, const LocalMinConfig& cfg = {}) {
  const std::size_t n = x0.size();
  const double f0 = f(x0);
  if (n == 0) return {x0, f0, 0};
  const long long budget_start = f.evals();
  auto out_of_budget = [&] { return f.evals() - budget_start >= cfg.max_evals; };
  auto reached = [&](double v) { return cfg.stop_at && v <= *cfg.stop_at; };

  std::vector<Vec> dirs(n, Vec(n, 0.0));
  auto reset_dirs = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(dirs[i].begin(), dirs[i].end(), 0.0);
      dirs[i][i] = 1.0;
    }
  };
  reset_dirs();

  Vec x = x0;
  double fx = f0;
  Vec xt(n);
  auto line_min = [&](const Vec& d) {
    const double h = 0.05 * std::max(detail::inf_norm(x), 1e-3);
    auto g = [&](double t) {
      for (std::size_t k = 0; k < n; ++k) xt[k] = x[k] + t * d[k];
      return f(xt);
    };
    LineMin m = detail::line_search(g, fx, h, cfg);
    if (m.value < fx) {
      for (std::size_t k = 0; k < n; ++k) x[k] += m.t * d[k];
      fx = m.value;
    }
  };

  int rounds = 0;
  if (!reached(fx)) {
    for (; rounds < cfg.max_powell_rounds; ++rounds) {
      const Vec start = x;
      const double fstart = fx;
      for (std::size_t i = 0; i < n; ++i) {
        line_min(dirs[i]);
        if (reached(fx) || out_of_budget()) break;
      }
      if (reached(fx) || out_of_budget()) {
        ++rounds;
        break;
      }
      if (2.0 * (fstart - fx) <= cfg.ftol * (std::fabs(fstart) + std::fabs(fx)) + 1e-300) {
        ++rounds;
        break;
      }
      Vec newdir(n);
      for (std::size_t k = 0; k < n; ++k) newdir[k] = x[k] - start[k];
      if (detail::normalize(newdir)) {
        line_min(newdir);
        // Drop the oldest direction unless that leaves the set nearly
        // dependent; then drop whichever one keeps the volume largest.
        auto without = [&](std::size_t drop) {
          std::vector<Vec> next;
          for (std::size_t i = 0; i < n; ++i)
            if (i != drop) next.push_back(dirs[i]);
          next.push_back(newdir);
          return next;
        };
        std::vector<Vec> next = without(0);
        double vol = std::fabs(detail::unit_det(next));
        if (vol < 1e-2) {
          for (std::size_t i = 1; i < n; ++i) {
            auto cand = without(i);
            double v = std::fabs(detail::unit_det(cand));
            if (v > vol) {
              vol = v;
              next = std::move(cand);
            }
          }
        }
        if (vol > 1e-12) dirs = std::move(next);
      }
      if (reached(fx) || out_of_budget()) {
        ++rounds;
        break;
      }
    }
  }
  if (cfg.polish && fx > 0.0 && fx < cfg.polish_below && !reached(fx)) polish(f, x, fx, cfg);
  if (!significantly_better(fx, f0, cfg.ftol)) return {x0, f0, rounds};
  return {x, fx, rounds};
}

// Metropolis rule of the basinhopping loop: downhill moves always pass,
// uphill ones with probability exp((f_cur - f_prop) / T).
template <class Rng>
bool metropolis_accept(double f_cur, double f_prop, double temperature, Rng& rng) {
  if (f_prop < f_cur) return true;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < std::exp((f_cur - f_prop) / temperature);
}

struct BasinStep {
  int iteration = 0;  // 0 is the initial local minimization
  const Vec* current = nullptr;
  double f_current = 0.0;
  const Vec* best = nullptr;
  double f_best = 0.0;
  bool accepted = false;
};

// Returning true stops the chain.
using BasinCallback = std::function<bool(const BasinStep&)>;

struct BasinResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  int accepted = 0;
  long long evals = 0;
  bool stopped_early = false;
};

// Basinhopping: local minimization, then n_iter rounds of uniform
// perturbation, local minimization and Metropolis acceptance. Returns the
// best accepted point.
inline BasinResult basinhopping(const Objective& f, const Vec& x0, const MCMCConfig& cfg,
                                const BasinCallback& callback = {}) {
  if (!(cfg.temperature > 0.0)) throw Error(ErrorKind::InvalidConfig, "temperature must be positive");
  if (cfg.n_iter < 0) throw Error(ErrorKind::InvalidConfig, "n_iter must be non-negative");
  const long long evals0 = f.evals();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> step(-cfg.step_scale, cfg.step_scale);

  LocalMin cur = powell_minimize(f, x0, cfg.local);
  BasinResult res;
  res.x = cur.x;
  res.value = cur.value;
  auto report = [&](int iter, bool accepted) {
    if (!callback) return false;
    BasinStep s{iter, &cur.x, cur.value, &res.x, res.value, accepted};
    return callback(s);
  };
  if (report(0, true)) {
    res.stopped_early = true;
    res.evals = f.evals() - evals0;
    return res;
  }
  for (int it = 1; it <= cfg.n_iter; ++it) {
    Vec proposal = cur.x;
    for (double& v : proposal) v += step(rng);
    if (cfg.box) proposal = cfg.box->clamp(std::move(proposal));
    LocalMin cand = powell_minimize(f, proposal, cfg.local);
    bool accepted = metropolis_accept(cur.value, cand.value, cfg.temperature, rng);
    if (accepted) {
      cur = std::move(cand);
      ++res.accepted;
      if (cur.value < res.value) {
        res.x = cur.x;
        res.value = cur.value;
      }
    }
    res.iterations = it;
    if (report(it, accepted)) {
      res.stopped_early = true;
      break;
    }
  }
  res.evals = f.evals() - evals0;
  return res;
}

}  // namespace mexec
