#include "manneal/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "manneal/errors.hpp"

namespace manneal {
namespace {

void check_table(const ScheduleTable& tb) {
  size_t n = tb.t.size();
  if (n < 2) throw ValidationError("schedule table needs at least two rows");
  if (tb.alpha.size() != n || tb.beta.size() != n || tb.delta.size() != n)
    throw ValidationError("schedule table columns have unequal lengths");
  if (tb.t.front() != 0.0) throw ValidationError("schedule table must start at t = 0");
  for (size_t i = 0; i < n; ++i) {
    if (i > 0 && !(tb.t[i] > tb.t[i - 1]))
      throw ValidationError("schedule table times must be strictly increasing");
    if (!(tb.alpha[i] > 0.0)) throw ValidationError("schedule alpha must be positive");
    if (!(tb.delta[i] > 0.0)) throw ValidationError("schedule delta must be positive");
    if (tb.beta[i] < 0.0) throw ValidationError("schedule beta must be nonnegative");
  }
}

// Index of the segment [t_i, t_{i+1}] containing t (right-open except last).
size_t segment_of(const std::vector<double>& knots, double t) {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  size_t i = static_cast<size_t>(it - knots.begin());
  if (i > 0) --i;
  return std::min(i, knots.size() - 2);
}

double lerp_at(const ScheduleTable& tb, const std::vector<double>& col, double t) {
  size_t i = segment_of(tb.t, t);
  double w = (t - tb.t[i]) / (tb.t[i + 1] - tb.t[i]);
  return col[i] + w * (col[i + 1] - col[i]);
}

// Exact integral of 1/alpha over [t0, t1] with alpha linear between (t0, a0)
// and (t1, a1).
double inv_alpha_segment(double t0, double a0, double t1, double a1) {
  if (t1 <= t0) return 0.0;
  if (std::abs(a1 - a0) < 1e-14 * std::max(a0, a1)) return (t1 - t0) / a0;
  return (t1 - t0) * std::log(a1 / a0) / (a1 - a0);
}

double table_integrated_rate(const ScheduleTable& tb, double t) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < tb.t.size() && tb.t[i] < t; ++i) {
    double hi = std::min(t, tb.t[i + 1]);
    double ahi = lerp_at(tb, tb.alpha, hi);
    acc += inv_alpha_segment(tb.t[i], tb.alpha[i], hi, ahi);
  }
  return acc;
}

double canonical_ratio_term(double c, double b, int m, double t) {
  double alpha = 1.0 / (1.0 + t);
  double beta = std::log1p(t) / c;
  double delta = 1.0 / std::log(2.0 + t);
  double dbeta = 1.0 / (c * (1.0 + t));
  double ddelta = -1.0 / ((2.0 + t) * std::log(2.0 + t) * std::log(2.0 + t));
  double num = std::max({alpha * std::pow(beta, 4) / std::pow(delta, 4),
                         std::abs(dbeta),
                         beta / (delta * delta) * std::abs(ddelta)});
  double den = std::pow(beta / delta, 2.0 - 5.0 * m) * std::exp(-b * beta);
  return num / den;
}

}  // namespace

ScheduleTriple canonical_schedule(double c) {
  if (!(c > 0.0)) throw ValidationError("canonical schedule needs c > 0");
  ScheduleTriple s;
  s.kind = ScheduleKind::Canonical;
  s.c = c;
  return s;
}

ScheduleTriple table_schedule(ScheduleTable table) {
  check_table(table);
  ScheduleTriple s;
  s.kind = ScheduleKind::UserTable;
  s.table = std::move(table);
  return s;
}

ScheduleTable load_schedule_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open schedule table: " + path);
  ScheduleTable tb;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream cells(line);
    std::string cell;
    double vals[4];
    int k = 0;
    bool numeric = true;
    while (k < 4 && std::getline(cells, cell, ',')) {
      try {
        size_t used = 0;
        vals[k] = std::stod(cell, &used);
        if (used == 0) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      ++k;
    }
    if (!numeric) {
      if (tb.t.empty() && row == 1) continue;  // header row
      throw ParseError("schedule table row " + std::to_string(row) + ": bad number");
    }
    if (k != 4)
      throw ParseError("schedule table row " + std::to_string(row) +
                       ": expected t,alpha,beta,delta");
    tb.t.push_back(vals[0]);
    tb.alpha.push_back(vals[1]);
    tb.beta.push_back(vals[2]);
    tb.delta.push_back(vals[3]);
  }
  if (tb.t.empty()) throw IngestionError("schedule table is empty: " + path);
  check_table(tb);
  return tb;
}

ScheduleValues eval(const ScheduleTriple& s, double t) {
  if (s.kind == ScheduleKind::Canonical) {
    if (t < 0.0) throw std::out_of_range("schedule evaluated at negative time");
    return {1.0 / (1.0 + t), std::log1p(t) / s.c, 1.0 / std::log(2.0 + t)};
  }
  if (t < s.table.t.front() || t > s.table.t.back())
    throw std::out_of_range("schedule table evaluated outside its domain");
  return {lerp_at(s.table, s.table.alpha, t), lerp_at(s.table, s.table.beta, t),
          lerp_at(s.table, s.table.delta, t)};
}

double integrated_rate(const ScheduleTriple& s, double t) {
  if (s.kind == ScheduleKind::Canonical) return t + 0.5 * t * t;
  return table_integrated_rate(s.table, std::min(t, s.table.t.back()));
}

double next_jump_time(const ScheduleTriple& s, double t_now, double exp_draw) {
  if (exp_draw == 0.0) return t_now;
  if (s.kind == ScheduleKind::Canonical) {
    // Lambda(T) - Lambda(t) = E with Lambda(t) = t + t^2/2; the increment
    // form avoids cancellation for small E at large t.
    double u = 1.0 + t_now;
    return t_now + 2.0 * exp_draw / (u + std::sqrt(u * u + 2.0 * exp_draw));
  }
  const ScheduleTable& tb = s.table;
  if (t_now >= tb.t.back())
    throw NumericError("jump-time inversion beyond schedule table domain");
  double remaining = exp_draw;
  double pos = t_now, apos = lerp_at(tb, tb.alpha, pos);
  for (size_t i = segment_of(tb.t, t_now); i + 1 < tb.t.size(); ++i) {
    double t1 = tb.t[i + 1], a1 = tb.alpha[i + 1];
    double cap = inv_alpha_segment(pos, apos, t1, a1);
    if (cap >= remaining) {
      double slope = (a1 - apos) / (t1 - pos);
      if (std::abs(slope) < 1e-14 * apos / (t1 - pos)) return pos + apos * remaining;
      return pos + apos * std::expm1(slope * remaining) / slope;
    }
    remaining -= cap;
    pos = t1;
    apos = a1;
  }
  throw NumericError("jump-time inversion beyond schedule table domain");
}

double next_jump_time(const ScheduleTriple& s, double t_now, RandomStream& rng) {
  return next_jump_time(s, t_now, rng.exponential());
}

ValidationReport validate(const ScheduleTriple& s, double b_estimate,
                          double horizon, int m) {
  ValidationReport rep;
  double hi = horizon;
  if (s.kind == ScheduleKind::Canonical) {
    rep.c_check = s.c > b_estimate;
    if (!rep.c_check)
      rep.warnings.push_back("c does not exceed the critical depth estimate");
  } else if (horizon > s.table.t.back()) {
    hi = s.table.t.back();
    rep.warnings.push_back("horizon clamped to schedule table domain");
  }
  rep.at_horizon = eval(s, hi);

  // 41 log-spaced samples of the admissibility ratio on [1, horizon].
  int samples = hi > 1.0 ? 41 : 1;
  for (int i = 0; i < samples; ++i) {
    double t = samples == 1 ? hi : std::pow(hi, i / 40.0);
    double r;
    if (s.kind == ScheduleKind::Canonical) {
      r = canonical_ratio_term(s.c, b_estimate, m, t);
    } else {
      double h = std::max(1e-4 * t, 1e-6);
      double lo2 = std::max(t - h, s.table.t.front());
      double hi2 = std::min(t + h, s.table.t.back());
      ScheduleValues va = eval(s, lo2), vb = eval(s, hi2), v = eval(s, t);
      double dbeta = (vb.beta - va.beta) / (hi2 - lo2);
      double ddelta = (vb.delta - va.delta) / (hi2 - lo2);
      double beta = std::max(v.beta, 1e-300);
      double num = std::max({v.alpha * std::pow(beta, 4) / std::pow(v.delta, 4),
                             std::abs(dbeta),
                             beta / (v.delta * v.delta) * std::abs(ddelta)});
      double den = std::pow(beta / v.delta, 2.0 - 5.0 * m) *
                   std::exp(-b_estimate * beta);
      r = num / den;
    }
    rep.ratio.push_back({samples == 1 ? hi : std::pow(hi, i / 40.0), r});
  }

  size_t peak = 0;
  for (size_t i = 1; i < rep.ratio.size(); ++i)
    if (rep.ratio[i].ratio > rep.ratio[peak].ratio) peak = i;
  rep.monotone_decay = peak + 1 < rep.ratio.size();
  for (size_t i = peak; i + 1 < rep.ratio.size(); ++i)
    if (rep.ratio[i + 1].ratio > rep.ratio[i].ratio * (1.0 + 1e-9))
      rep.monotone_decay = false;
  if (!rep.monotone_decay)
    rep.warnings.push_back("admissibility ratio not yet decaying at the horizon");
  return rep;
}

}  // namespace manneal
