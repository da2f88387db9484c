#include "qite/mpemba.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qite {
namespace {

constexpr Real kCrossingTauTolerance = 1e-10;
constexpr Real kInfinity = std::numeric_limits<Real>::infinity();

bool ratios_equal(Real a, Real b) {
  return std::abs(a - b) <= kRatioTolerance * std::max({std::abs(a), std::abs(b), Real{1}});
}

// True when a < b beyond rounding noise; ties within tolerance are the
// marginal case and never count as a violation.
bool definitely_less(Real a, Real b) {
  return b - a > kRatioTolerance * std::max({std::abs(a), std::abs(b), Real{1}});
}

void require_pair_shape(const PopulationVector& hot, const PopulationVector& cold,
                        const EnergySpectrum& spectrum, const char* what) {
  if (hot.size() != spectrum.level_count() || cold.size() != spectrum.level_count()) {
    throw std::invalid_argument(std::string(what) + ": states and spectrum differ in level count");
  }
}

void require_grounds_occupied(const PopulationVector& hot, const PopulationVector& cold,
                              const char* what) {
  if (!(hot.ground() > 0.0) || !(cold.ground() > 0.0)) {
    throw std::invalid_argument(std::string(what) +
                                ": both states need an occupied ground level for ratios");
  }
}

// Distance along the exact trajectory without materializing the evolved
// state. Exponents are shifted exactly as in evolve(); this is the hot loop
// behind crossing scans.
Real distance_at(const PopulationVector& initial, const EnergySpectrum& spectrum,
                 const DistanceFunction& df, Real tau) {
  const Real shift = spectrum.energy(initial.lowest_occupied());
  Real mass = 0.0;
  Real weighted = 0.0;
  for (Index i = 0; i < initial.size(); ++i) {
    const Real p = initial[i];
    if (p <= 0.0) continue;
    const Real w = p * std::exp(-2.0 * (spectrum.energy(i) - shift) * tau);
    mass += w;
    weighted += w * df.weight(i);
  }
  const Real value = weighted / mass;
  return value < kDistanceFloor ? 0.0 : value;
}

// Smallest level where the hot/cold ratios to ground differ, with the two
// ratios there; level_count when every level agrees.
struct RatioComparison {
  Index level;
  Real ratio_hot = 0.0;
  Real ratio_cold = 0.0;
};

RatioComparison compare_ratios(const PopulationVector& hot, const PopulationVector& cold) {
  for (Index i = 1; i < hot.size(); ++i) {
    const Real rh = hot[i] / hot.ground();
    const Real rc = cold[i] / cold.ground();
    if (!ratios_equal(rh, rc)) {
      return {i, rh, rc};
    }
  }
  return {hot.size(), 0.0, 0.0};
}

}  // namespace

MpembaVerdict check_mpemba(const PopulationVector& hot, const PopulationVector& cold,
                           const EnergySpectrum& spectrum, const DistanceFunction& df) {
  require_pair_shape(hot, cold, spectrum, "check_mpemba");
  if (df.size() != spectrum.level_count()) {
    throw std::invalid_argument("check_mpemba: distance function and spectrum differ in level count");
  }
  require_grounds_occupied(hot, cold, "check_mpemba");
  const Real dh = distance(hot, df);
  const Real dc = distance(cold, df);
  if (definitely_less(dh, dc)) {
    std::ostringstream msg;
    msg << "check_mpemba: designated hot state is the colder one (D_hot = " << dh
        << " < D_cold = " << dc << "); swap the arguments";
    throw NotHotterError(msg.str());
  }

  const RatioComparison cmp = compare_ratios(hot, cold);
  MpembaVerdict verdict;
  verdict.deciding_level = cmp.level;
  verdict.ratio_hot = cmp.ratio_hot;
  verdict.ratio_cold = cmp.ratio_cold;
  verdict.occurs = cmp.level < hot.size() && cmp.ratio_hot < cmp.ratio_cold;
  return verdict;
}

FiniteTimeCertificate theorem2_certificate(const PopulationVector& hot,
                                           const PopulationVector& cold,
                                           const EnergySpectrum& spectrum) {
  require_pair_shape(hot, cold, spectrum, "theorem2_certificate");
  if (spectrum.level_count() < 3) {
    throw std::invalid_argument("theorem2_certificate: needs at least three levels");
  }
  require_grounds_occupied(hot, cold, "theorem2_certificate");
  if (definitely_less(cold.ground(), hot.ground())) {
    std::ostringstream msg;
    msg << "theorem2_certificate: designated hot state has the lower infidelity ("
        << 1.0 - hot.ground() << " vs " << 1.0 - cold.ground() << "); swap the arguments";
    throw NotHotterError(msg.str());
  }

  FiniteTimeCertificate cert;
  cert.s_hot = hot.excited_mass() / hot.ground();

  const RatioComparison cmp = compare_ratios(hot, cold);
  if (cmp.level >= hot.size()) {
    cert.level = cmp.level;
    cert.reason = "the states share every population ratio (same trajectory)";
    return cert;
  }
  const Index j = cmp.level;
  cert.level = j;
  // Cumulative ratios up to the deciding level; for j = 1 these reduce to
  // the plain level-1 ratios.
  Real r_hot = 0.0, r_cold = 0.0;
  for (Index i = 1; i <= j; ++i) {
    r_hot += hot[i] / hot.ground();
    r_cold += cold[i] / cold.ground();
  }
  cert.r_hot = r_hot;
  cert.r_cold = r_cold;
  if (r_hot > r_cold) {
    cert.reason = "hot-to-ground ratio exceeds cold at the deciding level; the hot state stays behind";
    return cert;
  }
  if (j + 1 >= spectrum.level_count()) {
    cert.reason = "deciding level is the top level, no faster tail to certify against";
    return cert;
  }
  const Real numerator = cert.s_hot - r_hot;    // hot mass above the deciding level, over ground
  const Real denominator = r_cold - r_hot;
  if (!(numerator > 0.0)) {
    cert.reason = "hot state carries no population above the deciding level";
    return cert;
  }

  const Real e_j = spectrum.energy(j);
  const Real e_j1 = spectrum.energy(j + 1);
  const Real ratio_arg = numerator / denominator;
  cert.tau_tilde_star = std::log(ratio_arg) / (2.0 * (e_j1 - e_j));
  cert.epsilon_bound = 1.0 / (1.0 + std::pow(ratio_arg, e_j / (e_j1 - e_j)) / r_cold);
  cert.applicable = true;
  return cert;
}

FiniteTimeCertificate general_f_certificate(const PopulationVector& hot,
                                            const PopulationVector& cold,
                                            const EnergySpectrum& spectrum,
                                            const DistanceFunction& df, std::optional<Real> a) {
  require_pair_shape(hot, cold, spectrum, "general_f_certificate");
  if (df.size() != spectrum.level_count()) {
    throw std::invalid_argument("general_f_certificate: distance function and spectrum differ in level count");
  }
  if (spectrum.level_count() < 3) {
    throw std::invalid_argument("general_f_certificate: needs at least three levels");
  }
  require_grounds_occupied(hot, cold, "general_f_certificate");
  if (definitely_less(distance(hot, df), distance(cold, df))) {
    throw NotHotterError("general_f_certificate: designated hot state is the closer one; swap the arguments");
  }

  FiniteTimeCertificate cert;
  cert.r_hot = hot[1] / hot.ground();
  cert.r_cold = cold[1] / cold.ground();
  cert.s_hot = hot.excited_mass() / hot.ground();
  cert.level = 1;

  if (ratios_equal(cert.r_hot, cert.r_cold)) {
    cert.reason = "level-1 ratios tie; no decisive slow tail to certify with";
    return cert;
  }
  if (cert.r_hot > cert.r_cold) {
    cert.reason = "hot-to-ground ratio exceeds cold at level 1; the hot state stays behind";
    return cert;
  }

  const Real f_1 = df.weight(1);
  const Real f_top = df.weight(df.size() - 1);
  if (!(f_top > f_1)) {
    cert.reason = "top and first excited weights coincide; the weight spread the bound trades on vanishes";
    return cert;
  }
  // Admissible slack: 0 < a < f1 rc / (ftop rh) - 1, unbounded when the hot
  // level-1 ratio is zero.
  const Real a_max = cert.r_hot > 0.0
                         ? f_1 * cert.r_cold / (f_top * cert.r_hot) - 1.0
                         : kInfinity;
  if (!(a_max > 0.0)) {
    cert.reason = "cold-to-hot ratio gap too small for the weight spread (f1*rc/ftop*rh <= 1)";
    return cert;
  }

  const Real e_1 = spectrum.energy(1);
  const Real e_2 = spectrum.energy(2);
  const Real num2 = cert.s_hot - cert.r_hot;  // hot mass above level 1, over ground

  // tau_1 certifies that the cold distance still exceeds the bound; it falls
  // as a grows. tau_2 certifies that the hot distance has fallen under it; it
  // rises with a. The crossing is certified after both, so the best a makes
  // them meet.
  const auto tau_1 = [&](Real aa) {
    return (std::log(cert.r_cold / aa) + std::log1p(-f_1 / f_top)) / (2.0 * e_1);
  };
  const auto tau_2 = [&](Real aa) -> Real {
    const Real den = f_1 * cert.r_cold / ((1.0 + aa) * f_top) - cert.r_hot;
    if (!(den > 0.0)) return kInfinity;       // slack exhausted, bound unreachable
    if (!(num2 > 0.0)) return -kInfinity;     // nothing above level 1, constraint vacuous
    return std::log(num2 / den) / (2.0 * (e_2 - e_1));
  };

  Real slack;
  if (a) {
    if (!std::isfinite(*a) || !(*a > 0.0) || !(*a < a_max)) {
      std::ostringstream msg;
      msg << "general_f_certificate: a = " << (a ? *a : 0.0)
          << " outside the admissible interval (0, " << a_max << ")";
      throw std::invalid_argument(msg.str());
    }
    slack = *a;
  } else if (!(num2 > 0.0)) {
    // tau_2 never binds; push the slack to the edge of admissibility.
    slack = std::isfinite(a_max) ? a_max * (1.0 - 1e-9) : Real{1e9};
  } else {
    // g(a) = tau_1 - tau_2 falls monotonically from +inf; bisect its root.
    Real lo = std::isfinite(a_max) ? a_max * 1e-12 : Real{1e-12};
    Real hi = std::isfinite(a_max) ? a_max * (1.0 - 1e-12) : Real{1};
    if (!std::isfinite(a_max)) {
      while (tau_1(hi) - tau_2(hi) > 0.0) hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(Real{1}, hi); ++it) {
      const Real mid = 0.5 * (lo + hi);
      (tau_1(mid) - tau_2(mid) > 0.0 ? lo : hi) = mid;
    }
    slack = 0.5 * (lo + hi);
  }

  cert.epsilon_bound = f_1 * slack / ((1.0 - f_1 / f_top) * (1.0 + slack));
  cert.tau_tilde_star = std::max({tau_1(slack), tau_2(slack), Real{0}});
  cert.a_star = slack;
  cert.applicable = true;
  return cert;
}

CrossingReport find_crossings(const PopulationVector& hot, const PopulationVector& cold,
                              const EnergySpectrum& spectrum, const DistanceFunction& df,
                              Real tau_max, std::optional<Real> epsilon, const GridSpec& grid) {
  require_pair_shape(hot, cold, spectrum, "find_crossings");
  if (df.size() != spectrum.level_count()) {
    throw std::invalid_argument("find_crossings: distance function and spectrum differ in level count");
  }
  if (epsilon && !(*epsilon > 0.0)) {
    throw std::invalid_argument("find_crossings: epsilon must be positive");
  }

  const auto gap = [&](Real tau) {
    return distance_at(hot, spectrum, df, tau) - distance_at(cold, spectrum, df, tau);
  };

  CrossingReport report;

  // Threshold-stop time: evolution ends once either curve reaches epsilon.
  Real scan_end = tau_max;
  if (epsilon) {
    const auto lead = [&](Real tau) {
      return std::min(distance_at(hot, spectrum, df, tau), distance_at(cold, spectrum, df, tau));
    };
    if (lead(0.0) <= *epsilon) {
      report.truncated_at = 0.0;
      return report;
    }
    if (lead(tau_max) <= *epsilon) {
      Real lo = 0.0, hi = tau_max;
      while (hi - lo > 1e-12 * std::max(Real{1}, hi)) {
        const Real mid = 0.5 * (lo + hi);
        (lead(mid) > *epsilon ? lo : hi) = mid;
      }
      report.truncated_at = 0.5 * (lo + hi);
      scan_end = *report.truncated_at;
    }
  }

  const auto refine = [&](Real lo, Real hi) {
    Real g_lo = gap(lo);
    while (hi - lo > kCrossingTauTolerance) {
      const Real mid = 0.5 * (lo + hi);
      const Real g_mid = gap(mid);
      if (g_mid == 0.0) return mid;
      if ((g_lo < 0.0) == (g_mid < 0.0)) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  const auto value_at = [&](Real tau) {
    return 0.5 * (distance_at(hot, spectrum, df, tau) + distance_at(cold, spectrum, df, tau));
  };

  // Walk the grid with each cell subdivided, so two roots inside one cell
  // still show up as separate sign changes. The anchor sign skips samples in
  // the distance-floor noise band; in particular a marginal tie at tau = 0
  // does not spawn a crossing there.
  constexpr int kSubdivision = 8;
  const std::vector<Real> coarse = grid_points(grid, tau_max);
  Real prev_t = 0.0;
  Real prev_g = gap(0.0);
  bool have_anchor = std::abs(prev_g) > kDistanceFloor;
  for (std::size_t c = 0; c + 1 < coarse.size(); ++c) {
    if (coarse[c] >= scan_end) break;
    const Real cell_lo = coarse[c];
    const Real cell_hi = std::min(coarse[c + 1], scan_end);
    for (int s = 1; s <= kSubdivision; ++s) {
      const Real t = cell_lo + (cell_hi - cell_lo) * static_cast<Real>(s) / kSubdivision;
      const Real dh = distance_at(hot, spectrum, df, t);
      const Real dc = distance_at(cold, spectrum, df, t);
      const Real g = dh - dc;
      if (dh == 0.0 && dc == 0.0) {
        // Both curves sit at the floor from here on; nothing left to cross.
        c = coarse.size();
        break;
      }
      if (!have_anchor) {
        prev_t = t;
        prev_g = g;
        have_anchor = std::abs(g) > kDistanceFloor;
        continue;
      }
      if (g == 0.0) {
        report.crossings.push_back({t, value_at(t)});
        have_anchor = false;  // re-anchor on the next clear sign
        continue;
      }
      if ((g < 0.0) != (prev_g < 0.0)) {
        const Real root = refine(prev_t, t);
        report.crossings.push_back({root, value_at(root)});
      }
      prev_t = t;
      prev_g = g;
    }
  }

  // Merge refinements that collapsed onto one root and enforce the stop time.
  std::vector<Crossing> kept;
  for (const Crossing& c : report.crossings) {
    if (c.tau > scan_end) continue;
    if (!kept.empty() && c.tau - kept.back().tau <= 2.0 * kCrossingTauTolerance) continue;
    kept.push_back(c);
  }
  report.crossings = std::move(kept);
  return report;
}

CrossingEstimate estimate_crossing_detailed(const PopulationVector& hot,
                                            const PopulationVector& cold,
                                            const EnergySpectrum& spectrum) {
  require_pair_shape(hot, cold, spectrum, "estimate_crossing");
  require_grounds_occupied(hot, cold, "estimate_crossing");

  const auto k_hot = hot.lowest_occupied_excited();
  const auto k_cold = cold.lowest_occupied_excited();
  if (!k_hot || !k_cold) {
    throw InapplicableError("estimate_crossing: a state with no excited population never crosses");
  }
  const RatioComparison cmp = compare_ratios(hot, cold);
  if (cmp.level >= hot.size() || !(cmp.ratio_hot < cmp.ratio_cold)) {
    throw InapplicableError("estimate_crossing: no crossing expected (hot tail is not the faster one)");
  }

  CrossingEstimate estimate;
  if (*k_hot == *k_cold) {
    // Shared slowest tail: the crossing happens where the hot state's next
    // occupied tail still props its distance above the cold one's deficit at
    // the shared level.
    estimate.dispatch_case = 1;
    const Index k1 = *k_hot;
    const Real r_hot = hot[k1] / hot.ground();
    const Real r_cold = cold[k1] / cold.ground();
    if (!(r_cold > r_hot)) {
      throw InapplicableError("estimate_crossing: shared-level ratios give no late-time deficit");
    }
    std::optional<Index> k2;
    for (Index i = k1 + 1; i < hot.size(); ++i) {
      if (hot[i] > 0.0) {
        k2 = i;
        break;
      }
    }
    if (!k2) {
      throw InapplicableError("estimate_crossing: hot state needs a second occupied excited level");
    }
    estimate.log_argument = (hot[*k2] / hot.ground() * spectrum.energy(*k2)) /
                            ((r_cold - r_hot) * spectrum.energy(k1));
    estimate.tau = std::log(estimate.log_argument) /
                   (2.0 * (spectrum.energy(*k2) - spectrum.energy(k1)));
  } else {
    // Distinct slowest tails: the cold state keeps a slower level occupied,
    // so the two leading exponentials cross directly.
    estimate.dispatch_case = 2;
    estimate.log_argument = (hot[*k_hot] * cold.ground() * spectrum.energy(*k_hot)) /
                            (cold[*k_cold] * hot.ground() * spectrum.energy(*k_cold));
    estimate.tau = std::log(estimate.log_argument) /
                   (2.0 * (spectrum.energy(*k_hot) - spectrum.energy(*k_cold)));
  }
  if (!(estimate.log_argument > 1.0)) {
    throw InapplicableError("estimate_crossing: estimate inapplicable, crossing is early-time");
  }
  estimate.reliable = estimate.log_argument >= 2.0;
  return estimate;
}

Real estimate_crossing(const PopulationVector& hot, const PopulationVector& cold,
                       const EnergySpectrum& spectrum) {
  return estimate_crossing_detailed(hot, cold, spectrum).tau;
}

Real max_acceleration_time(const PopulationVector& cold, const PopulationVector& hot,
                           const EnergySpectrum& spectrum, const DistanceFunction& df,
                           Real epsilon) {
  require_pair_shape(hot, cold, spectrum, "max_acceleration_time");
  if (df.size() != spectrum.level_count()) {
    throw std::invalid_argument("max_acceleration_time: distance function and spectrum differ in level count");
  }
  require_grounds_occupied(hot, cold, "max_acceleration_time");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("max_acceleration_time: epsilon must lie in (0, 1)");
  }
  const Index top = spectrum.level_count() - 1;
  for (Index i = 1; i < top; ++i) {
    if (hot[i] != 0.0) {
      throw InapplicableError(
          "max_acceleration_time: hot state must occupy only the ground and top levels");
    }
  }
  if (!(hot[top] > 0.0)) {
    throw InapplicableError("max_acceleration_time: hot state has no population on the top level");
  }
  const auto k_cold = cold.lowest_occupied_excited();
  if (!k_cold) {
    throw InapplicableError("max_acceleration_time: cold state has no excited population");
  }
  if (definitely_less(distance(hot, df), distance(cold, df))) {
    throw NotHotterError("max_acceleration_time: designated hot state is the closer one; swap the arguments");
  }

  // Asymptotically each distance rides its slowest occupied tail; solving
  // p_k(0)/p_0(0) f(E_k) exp(-2 E_k tau) = epsilon for each state gives the
  // threshold times in closed form.
  const Index k = *k_cold;
  const Real tau_cold =
      -std::log(cold.ground() * epsilon / (cold[k] * df.weight(k))) / (2.0 * spectrum.energy(k));
  const Real tau_hot =
      -std::log(hot.ground() * epsilon / (hot[top] * df.weight(top))) / (2.0 * spectrum.energy(top));
  if (!(tau_cold > 0.0) || !(tau_hot > 0.0)) {
    throw InapplicableError("max_acceleration_time: epsilon is outside the asymptotic regime");
  }
  return tau_cold - tau_hot;
}

}  // namespace qite
