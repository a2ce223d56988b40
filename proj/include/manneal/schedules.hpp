#pragma once

#include <string>
#include <vector>

#include "manneal/rng.hpp"

namespace manneal {

enum class ScheduleKind { Canonical, UserTable };

// Piecewise-linear (t, value) samples sharing one strictly increasing time
// axis that starts at t = 0. alpha and delta must stay positive.
struct ScheduleTable {
  std::vector<double> t, alpha, beta, delta;
};

// Annealing triple. Canonical: alpha = (1+t)^-1, beta = ln(1+t)/c,
// delta = 1/ln(2+t); the jump clock speed is 1/alpha.
struct ScheduleTriple {
  ScheduleKind kind = ScheduleKind::Canonical;
  double c = 1.0;  // Canonical inverse-temperature slope; must exceed the
                   // landscape's critical depth for convergence
  ScheduleTable table;
};

struct ScheduleValues {
  double alpha, beta, delta;
};

ScheduleTriple canonical_schedule(double c);
ScheduleTriple table_schedule(ScheduleTable table);

// CSV with columns t,alpha,beta,delta; optional header row, '#' comments.
ScheduleTable load_schedule_table(const std::string& path);

ScheduleValues eval(const ScheduleTriple& s, double t);

// Lambda(t) = integral of 1/alpha over [0, t]: closed form t + t^2/2 for
// Canonical, exact per-segment integrals for UserTable.
double integrated_rate(const ScheduleTriple& s, double t);

// First jump after t_now: Lambda(T) - Lambda(t_now) = exp_draw, inverted in
// closed form (Canonical) or per segment (UserTable). The RandomStream
// overload draws exp_draw ~ Exponential(1).
double next_jump_time(const ScheduleTriple& s, double t_now, double exp_draw);
double next_jump_time(const ScheduleTriple& s, double t_now, RandomStream& rng);

struct RatioSample {
  double t, ratio;
};

// Advisory admissibility report: the drift/jump error terms
// max{alpha beta^4 delta^-4, |beta'|, beta delta^-2 |delta'|} must eventually
// fall below the spectral-gap scale (beta/delta)^(2-5m) exp(-b beta).
struct ValidationReport {
  bool c_check = true;  // Canonical only: c > b_estimate
  ScheduleValues at_horizon{};
  std::vector<RatioSample> ratio;  // 41 log-spaced samples on [1, horizon]
  bool monotone_decay = false;     // ratio peaked before the horizon and
                                   // non-increasing afterwards
  std::vector<std::string> warnings;
};

// m is the manifold dimension entering the (beta/delta)^(2-5m) scale.
ValidationReport validate(const ScheduleTriple& s, double b_estimate,
                          double horizon, int m = 1);

}  // namespace manneal
