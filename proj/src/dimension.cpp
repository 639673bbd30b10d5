#include "fractal_calc/dimension.hpp"

#include "fractal_calc/errors.hpp"

#include <cmath>
#include <string>

namespace fcalc {

double ratio_R(const Curve& curve, double alpha, double delta1, double delta2,
               const OptimizerConfig& cfg, int repeats) {
  if (!(delta1 > 0.0 && delta1 < delta2)) {
    throw ArgumentError("ratio_R requires 0 < delta1 < delta2");
  }
  if (repeats < 1) throw ArgumentError("ratio_R requires repeats >= 1");
  const Interval dom = curve.domain();
  double fine = 0.0;
  double coarse = 0.0;
  for (int r = 0; r < repeats; ++r) {
    OptimizerConfig c = cfg;
    c.alpha = alpha;
    c.delta = delta1;
    c.seed = derive_seed(cfg.seed, 0xD100ULL + 2 * static_cast<std::uint64_t>(r));
    fine += optimize_subdivision(curve, dom.lo, dom.hi, c).value;
    c.delta = delta2;
    c.seed = derive_seed(cfg.seed, 0xD101ULL + 2 * static_cast<std::uint64_t>(r));
    coarse += optimize_subdivision(curve, dom.lo, dom.hi, c).value;
  }
  if (coarse == 0.0) throw NumericError("ratio_R: zero coarse-scale sum");
  return fine / coarse;
}

DimensionEstimate estimate_dimension(const Curve& curve, double tol,
                                     const OptimizerConfig& cfg,
                                     const DimensionOptions& options) {
  if (!(tol > 0.0)) throw ArgumentError("dimension tolerance must be positive");
  DimensionEstimate est;
  est.delta_fine = options.delta_fine;
  est.delta_coarse = options.delta_coarse;

  auto sample = [&](double alpha) {
    const double r = ratio_R(curve, alpha, options.delta_fine, options.delta_coarse, cfg,
                             options.repeats);
    est.ratios.push_back({alpha, r});
    return r;
  };

  double lo = 1.0;
  double hi = static_cast<double>(curve.embedding_dim());
  est.bracket_history.emplace_back(lo, hi);

  const double r_lo = sample(lo);
  if (std::abs(r_lo - 1.0) <= options.unity_tolerance || hi <= lo) {
    est.alpha0 = lo;
    est.lower_end_hit = true;
    return est;
  }
  const double r_hi = sample(hi);
  if (!(r_lo > 1.0 && r_hi < 1.0)) {
    throw BracketError("R(alpha) - 1 does not change sign on [1, " + std::to_string(hi) +
                           "]: R(1) = " + std::to_string(r_lo) +
                           ", R(m) = " + std::to_string(r_hi),
                       r_lo, r_hi);
  }

  for (int it = 0; it < options.max_iterations && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sample(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    est.bracket_history.emplace_back(lo, hi);
  }
  est.alpha0 = 0.5 * (lo + hi);
  return est;
}

double self_similar_dimension(int m_copies, int n_scale) {
  if (m_copies < 2 || n_scale < 2) {
    throw ArgumentError("self_similar_dimension needs m_copies >= 2 and n_scale >= 2");
  }
  return std::log(static_cast<double>(m_copies)) / std::log(static_cast<double>(n_scale));
}

}  // namespace fcalc
