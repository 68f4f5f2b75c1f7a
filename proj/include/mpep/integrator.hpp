#pragma once

// Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output and
// event location. Events are located by bisection on the dense interpolant to
// a fixed time tolerance. Supports forward and backward integration, an
// optional post-step hook (used for Pluecker renormalization), and quadrature
// components carried as extra state entries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mpep/algebra.hpp"

namespace mpep {

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double first_step = 0.0;  // 0 = automatic
  double event_time_tol = 1e-10;
  std::size_t max_steps = 2'000'000;
  bool store_dense = true;
};

enum class EventDirection { any, rising, falling };

template <std::size_t N>
struct EventSpec {
  std::function<double(double, const Vec<N>&)> value;
  EventDirection direction = EventDirection::any;
  bool terminal = false;
};

template <std::size_t N>
struct EventHit {
  std::size_t event = 0;
  double t = 0.0;
  Vec<N> y{};
};

enum class IntegrationStatus {
  ok,             // reached requested end time
  terminated,     // stopped at a terminal event
  step_underflow, // step size shrank below machine resolution
  max_steps,      // step budget exhausted
};

// Quartic interpolant over one accepted step, Hermite-style form used by
// classic DOPRI5 implementations. `h` is the step the polynomial was built
// over; `span` is the portion actually covered (shorter when a terminal
// event cut the step).
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  double span = 0.0;
  Vec<N> c1{}, c2{}, c3{}, c4{}, c5{};

  Vec<N> eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i)
      r[i] = c1[i] +
             th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
    return r;
  }
};

template <std::size_t N>
class Trajectory {
 public:
  std::vector<double> node_t;
  std::vector<Vec<N>> node_y;
  std::vector<DenseSegment<N>> segments;  // empty when dense storage is off
  std::vector<EventHit<N>> hits;
  IntegrationStatus status = IntegrationStatus::ok;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;

  double t_start() const { return node_t.front(); }
  double t_final() const { return node_t.back(); }
  bool forward() const { return node_t.back() >= node_t.front(); }
  const Vec<N>& initial_state() const { return node_y.front(); }
  const Vec<N>& final_state() const { return node_y.back(); }

  bool reached_end() const { return status == IntegrationStatus::ok; }

  // Dense evaluation; requires store_dense and t inside the covered span.
  Vec<N> state_at(double t) const {
    if (segments.empty())
      throw std::logic_error("state_at: trajectory has no dense segments");
    const double dir = forward() ? 1.0 : -1.0;
    if (dir * (t - t_start()) < 0.0 || dir * (t - t_final()) > 0.0) {
      if (std::abs(t - t_start()) < 1e-12) return node_y.front();
      if (std::abs(t - t_final()) < 1e-12) return node_y.back();
      throw std::out_of_range("state_at: time outside trajectory span");
    }
    std::size_t lo = 0, hi = segments.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const DenseSegment<N>& s = segments[mid];
      if (dir * (t - (s.t0 + s.span)) > 0.0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return segments[lo].eval(t);
  }

  // First hit of a given event index, if any.
  const EventHit<N>* first_hit(std::size_t event_index) const {
    for (const auto& h : hits)
      if (h.event == event_index) return &h;
    return nullptr;
  }
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
inline constexpr double dp_c2 = 1.0 / 5.0, dp_c3 = 3.0 / 10.0,
                        dp_c4 = 4.0 / 5.0, dp_c5 = 8.0 / 9.0;
inline constexpr double dp_a21 = 1.0 / 5.0;
inline constexpr double dp_a31 = 3.0 / 40.0, dp_a32 = 9.0 / 40.0;
inline constexpr double dp_a41 = 44.0 / 45.0, dp_a42 = -56.0 / 15.0,
                        dp_a43 = 32.0 / 9.0;
inline constexpr double dp_a51 = 19372.0 / 6561.0, dp_a52 = -25360.0 / 2187.0,
                        dp_a53 = 64448.0 / 6561.0, dp_a54 = -212.0 / 729.0;
inline constexpr double dp_a61 = 9017.0 / 3168.0, dp_a62 = -355.0 / 33.0,
                        dp_a63 = 46732.0 / 5247.0, dp_a64 = 49.0 / 176.0,
                        dp_a65 = -5103.0 / 18656.0;
inline constexpr double dp_a71 = 35.0 / 384.0, dp_a73 = 500.0 / 1113.0,
                        dp_a74 = 125.0 / 192.0, dp_a75 = -2187.0 / 6784.0,
                        dp_a76 = 11.0 / 84.0;
inline constexpr double dp_e1 = 71.0 / 57600.0, dp_e3 = -71.0 / 16695.0,
                        dp_e4 = 71.0 / 1920.0, dp_e5 = -17253.0 / 339200.0,
                        dp_e6 = 22.0 / 525.0, dp_e7 = -1.0 / 40.0;
inline constexpr double dp_d1 = -12715105075.0 / 11282082432.0,
                        dp_d3 = 87487479700.0 / 32700410799.0,
                        dp_d4 = -10690763975.0 / 1880347072.0,
                        dp_d5 = 701980252875.0 / 199316789632.0,
                        dp_d6 = -1453857185.0 / 822651844.0,
                        dp_d7 = 69997945.0 / 29380423.0;

}  // namespace detail

template <std::size_t N, class Rhs>
Trajectory<N> integrate(
    Rhs&& rhs, Vec<N> y0, double t0, double t1,
    const IntegratorConfig& cfg = {},
    const std::vector<EventSpec<N>>& events = {},
    const std::function<void(double, Vec<N>&)>& post_step = {}) {
  using namespace detail;

  Trajectory<N> traj;
  traj.node_t.push_back(t0);
  traj.node_y.push_back(y0);
  if (t1 == t0) return traj;

  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const std::size_t n_events = events.size();

  Vec<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
  rhs(t0, y0, k1);
  if (!all_finite(k1))
    throw std::domain_error("integrate: non-finite derivative at start");

  auto scaled_rms = [&](const Vec<N>& v, const Vec<N>& ya,
                        const Vec<N>& yb) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk =
          cfg.atol + cfg.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      const double q = v[i] / sk;
      s += q * q;
    }
    return std::sqrt(s / static_cast<double>(N));
  };

  // Initial step size heuristic.
  double h;
  if (cfg.first_step > 0.0) {
    h = dir * std::min(cfg.first_step, std::abs(t1 - t0));
  } else {
    const double d0 = scaled_rms(y0, y0, y0);
    const double d1 = scaled_rms(k1, y0, y0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(t1 - t0));
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y0[i] + dir * h0 * k1[i];
    rhs(t0 + dir * h0, ytmp, k2);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = cfg.atol + cfg.rtol * std::abs(y0[i]);
      const double q = (k2[i] - k1[i]) / sk;
      d2 += q * q;
    }
    d2 = std::sqrt(d2 / static_cast<double>(N)) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dm, 0.2);
    h = dir * std::min({100.0 * h0, h1, std::abs(t1 - t0), cfg.max_step});
  }

  std::vector<double> ev_prev(n_events, 0.0);
  for (std::size_t e = 0; e < n_events; ++e) ev_prev[e] = events[e].value(t0, y0);

  double t = t0;
  bool last_rejected = false;

  while (traj.steps_accepted + traj.steps_rejected < cfg.max_steps) {
    if (std::abs(h) < 16.0 * std::numeric_limits<double>::epsilon() *
                          std::max(std::abs(t), 1.0)) {
      traj.status = IntegrationStatus::step_underflow;
      return traj;
    }
    if (std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
    bool final_step = false;
    if (dir * (t + h - t1) >= 0.0) {
      h = t1 - t;
      final_step = true;
    }

    // Stage evaluations.
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y0[i] + h * dp_a21 * k1[i];
    rhs(t + dp_c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + h * (dp_a31 * k1[i] + dp_a32 * k2[i]);
    rhs(t + dp_c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + h * (dp_a41 * k1[i] + dp_a42 * k2[i] + dp_a43 * k3[i]);
    rhs(t + dp_c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + h * (dp_a51 * k1[i] + dp_a52 * k2[i] +
                             dp_a53 * k3[i] + dp_a54 * k4[i]);
    rhs(t + dp_c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y0[i] + h * (dp_a61 * k1[i] + dp_a62 * k2[i] +
                             dp_a63 * k3[i] + dp_a64 * k4[i] + dp_a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y0[i] + h * (dp_a71 * k1[i] + dp_a73 * k3[i] +
                             dp_a74 * k4[i] + dp_a75 * k5[i] + dp_a76 * k6[i]);
    rhs(t + h, ynew, k7);

    double err;
    if (!all_finite(ynew) || !all_finite(k7)) {
      err = 2.0;  // force rejection
    } else {
      for (std::size_t i = 0; i < N; ++i)
        yerr[i] = h * (dp_e1 * k1[i] + dp_e3 * k3[i] + dp_e4 * k4[i] +
                       dp_e5 * k5[i] + dp_e6 * k6[i] + dp_e7 * k7[i]);
      err = scaled_rms(yerr, y0, ynew);
    }

    if (!(err <= 1.0)) {
      ++traj.steps_rejected;
      const double fac =
          std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      last_rejected = true;
      continue;
    }

    // Accepted: build the dense segment.
    DenseSegment<N> seg;
    seg.t0 = t;
    seg.h = h;
    seg.span = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = ynew[i] - y0[i];
      const double bspl = h * k1[i] - ydiff;
      seg.c1[i] = y0[i];
      seg.c2[i] = ydiff;
      seg.c3[i] = bspl;
      seg.c4[i] = ydiff - h * k7[i] - bspl;
      seg.c5[i] = h * (dp_d1 * k1[i] + dp_d3 * k3[i] + dp_d4 * k4[i] +
                       dp_d5 * k5[i] + dp_d6 * k6[i] + dp_d7 * k7[i]);
    }
    const double t_new = final_step ? t1 : t + h;

    // Event detection over [t, t_new] on the dense interpolant.
    struct PendingHit {
      double t;
      std::size_t event;
      bool terminal;
    };
    std::vector<PendingHit> pending;
    for (std::size_t e = 0; e < n_events; ++e) {
      const double ea = ev_prev[e];
      const double eb = events[e].value(t_new, ynew);
      const EventDirection d = events[e].direction;
      const bool rising = ea < 0.0 && eb >= 0.0 &&
                          (d == EventDirection::any || d == EventDirection::rising);
      const bool falling = ea > 0.0 && eb <= 0.0 &&
                           (d == EventDirection::any || d == EventDirection::falling);
      ev_prev[e] = eb;
      if (!rising && !falling) continue;
      double ta = t, tb = t_new;
      while (std::abs(tb - ta) > cfg.event_time_tol) {
        const double tm = 0.5 * (ta + tb);
        const double em = events[e].value(tm, seg.eval(tm));
        const bool crossed = rising ? (em >= 0.0) : (em <= 0.0);
        if (crossed)
          tb = tm;
        else
          ta = tm;
      }
      pending.push_back({tb, e, events[e].terminal});
    }
    if (!pending.empty()) {
      std::sort(pending.begin(), pending.end(),
                [&](const PendingHit& a, const PendingHit& b) {
                  return dir * (a.t - b.t) < 0.0;
                });
      double t_cut = t_new;
      bool cut = false;
      for (const PendingHit& ph : pending) {
        if (cut && dir * (ph.t - t_cut) > 0.0) break;
        EventHit<N> hit;
        hit.event = ph.event;
        hit.t = ph.t;
        hit.y = seg.eval(ph.t);
        traj.hits.push_back(hit);
        if (ph.terminal && !cut) {
          cut = true;
          t_cut = ph.t;
        }
      }
      if (cut) {
        Vec<N> ycut = seg.eval(t_cut);
        seg.span = t_cut - t;
        if (cfg.store_dense) traj.segments.push_back(seg);
        traj.node_t.push_back(t_cut);
        traj.node_y.push_back(ycut);
        ++traj.steps_accepted;
        traj.status = IntegrationStatus::terminated;
        return traj;
      }
    }

    if (cfg.store_dense) traj.segments.push_back(seg);
    ++traj.steps_accepted;
    t = t_new;
    y0 = ynew;
    k1 = k7;

    if (post_step) {
      post_step(t, y0);
      if (y0 != ynew) {
        rhs(t, y0, k1);
        for (std::size_t e = 0; e < n_events; ++e)
          ev_prev[e] = events[e].value(t, y0);
      }
    }
    traj.node_t.push_back(t);
    traj.node_y.push_back(y0);

    if (final_step) {
      traj.status = IntegrationStatus::ok;
      return traj;
    }

    double fac = 0.9 * std::pow(err, -0.2);
    fac = std::min(last_rejected ? 1.0 : 5.0, std::max(0.2, fac));
    h *= fac;
    last_rejected = false;
  }

  traj.status = IntegrationStatus::max_steps;
  return traj;
}

}  // namespace mpep
