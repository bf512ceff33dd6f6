#include "gutmanlab/divergences.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gutmanlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_alphabet(std::size_t a, std::size_t b) {
  if (a != b) throw std::domain_error("divergence: alphabet mismatch");
}

double info_density_raw(double pi_x, double p1_x, double p2_x, double alpha) {
  return std::log((1.0 + alpha) * pi_x / (alpha * p1_x + p2_x));
}

// Mean, variance and third absolute central moment of f under p, restricted
// to supp(p).
struct Moments {
  double mean = 0.0, var = 0.0, third = 0.0;
};

template <typename F>
Moments central_moments(const Distribution& p, F&& f) {
  Moments m;
  for (std::size_t x = 0; x < p.alphabet_size(); ++x) {
    if (p[x] > 0.0) m.mean += p[x] * f(x);
  }
  for (std::size_t x = 0; x < p.alphabet_size(); ++x) {
    if (p[x] > 0.0) {
      double d = f(x) - m.mean;
      m.var += p[x] * d * d;
      m.third += p[x] * std::fabs(d) * d * d;
    }
  }
  return m;
}

}  // namespace

double kl_divergence(std::span<const double> q, std::span<const double> p) {
  require_same_alphabet(q.size(), p.size());
  double sum = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] > 0.0) {
      if (p[x] <= 0.0) return kInf;
      sum += q[x] * std::log(q[x] / p[x]);
    }
  }
  return sum < 0.0 ? 0.0 : sum;
}

double kl_divergence(const Distribution& q, const Distribution& p) {
  return kl_divergence(std::span<const double>(q.probs()),
                       std::span<const double>(p.probs()));
}

double gjs_divergence(std::span<const double> p1, std::span<const double> p2,
                      double alpha) {
  require_same_alphabet(p1.size(), p2.size());
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("gjs_divergence: alpha must be finite and nonnegative");
  }
  if (alpha == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t x = 0; x < p1.size(); ++x) {
    double denom = alpha * p1[x] + p2[x];
    if (p1[x] > 0.0) sum += alpha * p1[x] * std::log((1.0 + alpha) * p1[x] / denom);
    if (p2[x] > 0.0) sum += p2[x] * std::log((1.0 + alpha) * p2[x] / denom);
  }
  return sum < 0.0 ? 0.0 : sum;
}

double gjs_divergence(const Distribution& p1, const Distribution& p2, double alpha) {
  return gjs_divergence(std::span<const double>(p1.probs()),
                        std::span<const double>(p2.probs()), alpha);
}

double gjs_from_counts(std::span<const std::uint64_t> counts1, std::uint64_t n1,
                       std::span<const std::uint64_t> counts2, std::uint64_t n2,
                       double alpha) {
  require_same_alphabet(counts1.size(), counts2.size());
  if (alpha == 0.0) return 0.0;
  double inv1 = 1.0 / static_cast<double>(n1);
  double inv2 = 1.0 / static_cast<double>(n2);
  double sum = 0.0;
  for (std::size_t x = 0; x < counts1.size(); ++x) {
    double q1 = static_cast<double>(counts1[x]) * inv1;
    double q2 = static_cast<double>(counts2[x]) * inv2;
    double denom = alpha * q1 + q2;
    if (q1 > 0.0) sum += alpha * q1 * std::log((1.0 + alpha) * q1 / denom);
    if (q2 > 0.0) sum += q2 * std::log((1.0 + alpha) * q2 / denom);
  }
  return sum < 0.0 ? 0.0 : sum;
}

double gjs_max(double alpha) {
  if (!(alpha > 0.0)) return 0.0;
  return std::log(1.0 + alpha) + alpha * std::log((1.0 + alpha) / alpha);
}

double information_density(int which, std::size_t x, const Distribution& p1,
                           const Distribution& p2, double alpha) {
  require_same_alphabet(p1.alphabet_size(), p2.alphabet_size());
  if (which != 1 && which != 2) {
    throw std::domain_error("information_density: index must be 1 or 2");
  }
  if (x >= p1.alphabet_size()) {
    throw std::domain_error("information_density: symbol out of range");
  }
  double pi_x = which == 1 ? p1[x] : p2[x];
  if (pi_x <= 0.0) {
    throw std::domain_error("information_density: evaluated off the support");
  }
  return info_density_raw(pi_x, p1[x], p2[x], alpha);
}

double dispersion(const Distribution& p1, const Distribution& p2, double alpha) {
  require_same_alphabet(p1.alphabet_size(), p2.alphabet_size());
  Moments m1 = central_moments(p1, [&](std::size_t x) {
    return info_density_raw(p1[x], p1[x], p2[x], alpha);
  });
  Moments m2 = central_moments(p2, [&](std::size_t x) {
    return info_density_raw(p2[x], p1[x], p2[x], alpha);
  });
  return alpha * m1.var + m2.var;
}

double third_absolute_moment(const Distribution& p1, const Distribution& p2,
                             double alpha) {
  require_same_alphabet(p1.alphabet_size(), p2.alphabet_size());
  Moments m1 = central_moments(p1, [&](std::size_t x) {
    return info_density_raw(p1[x], p1[x], p2[x], alpha);
  });
  Moments m2 = central_moments(p2, [&](std::size_t x) {
    return info_density_raw(p2[x], p1[x], p2[x], alpha);
  });
  return alpha * m1.third + m2.third;
}

double renyi_divergence(double gamma, const Distribution& p1, const Distribution& p2) {
  require_same_alphabet(p1.alphabet_size(), p2.alphabet_size());
  if (!(gamma > 0.0) || gamma == 1.0 || !std::isfinite(gamma)) {
    throw std::domain_error("renyi_divergence: order must be positive and != 1");
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < p1.alphabet_size(); ++x) {
    if (p1[x] > 0.0 && p2[x] > 0.0) {
      sum += std::exp(gamma * std::log(p1[x]) + (1.0 - gamma) * std::log(p2[x]));
    } else if (p1[x] > 0.0 && gamma > 1.0) {
      return kInf;  // p2(x) = 0 with positive p1 mass and gamma > 1
    }
  }
  if (sum <= 0.0) return kInf;
  double value = std::log(sum) / (gamma - 1.0);
  return value < 0.0 ? 0.0 : value;
}

Distribution tilted_distribution(const Distribution& p1, const Distribution& p2,
                                 double gamma) {
  require_same_alphabet(p1.alphabet_size(), p2.alphabet_size());
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::domain_error("tilted_distribution: gamma must lie in [0, 1]");
  }
  if (gamma == 0.0) return p2;
  if (gamma == 1.0) return p1;
  std::vector<double> weights(p1.alphabet_size(), 0.0);
  double z = 0.0;
  for (std::size_t x = 0; x < weights.size(); ++x) {
    if (p1[x] > 0.0 && p2[x] > 0.0) {
      weights[x] = std::exp(gamma * std::log(p1[x]) + (1.0 - gamma) * std::log(p2[x]));
      z += weights[x];
    }
  }
  if (z <= 0.0) {
    throw std::domain_error("tilted_distribution: supports do not overlap");
  }
  for (double& w : weights) w /= z;
  // Absorb rounding so the result passes Distribution validation.
  double sum = 0.0;
  for (double w : weights) sum += w;
  weights.back() += 1.0 - sum;
  return Distribution(std::move(weights));
}

double triple_divergence(double gamma, const Distribution& pj, const Distribution& pi,
                         const Distribution& pk) {
  require_same_alphabet(pj.alphabet_size(), pi.alphabet_size());
  require_same_alphabet(pj.alphabet_size(), pk.alphabet_size());
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::domain_error("triple_divergence: gamma must lie in (0, 1)");
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < pj.alphabet_size(); ++x) {
    if (pj[x] > 0.0 && pi[x] > 0.0 && pk[x] > 0.0) {
      sum += std::exp((1.0 - gamma) * std::log(pj[x]) +
                      0.5 * gamma * (std::log(pi[x]) + std::log(pk[x])));
    }
  }
  if (sum <= 0.0) return kInf;
  double value = std::log(sum) / (gamma - 1.0);
  return value < 0.0 ? 0.0 : value;
}

GjsGradient gjs_gradient(const Distribution& p1, const Distribution& p2, double alpha) {
  require_same_alphabet(p1.alphabet_size(), p2.alphabet_size());
  std::size_t k = p1.alphabet_size();
  GjsGradient g{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0),
                std::vector<bool>(k, false), std::vector<bool>(k, false)};
  for (std::size_t x = 0; x < k; ++x) {
    if (p1[x] > 0.0) {
      g.wrt_p1[x] = alpha * info_density_raw(p1[x], p1[x], p2[x], alpha);
      g.p1_support[x] = true;
    }
    if (p2[x] > 0.0) {
      g.wrt_p2[x] = info_density_raw(p2[x], p1[x], p2[x], alpha);
      g.p2_support[x] = true;
    }
  }
  return g;
}

GjsHessian gjs_hessian(const Distribution& p1, const Distribution& p2, double alpha) {
  require_same_alphabet(p1.alphabet_size(), p2.alphabet_size());
  std::size_t k = p1.alphabet_size();
  GjsHessian h{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0),
               std::vector<double>(k, 0.0), std::vector<bool>(k, false),
               std::vector<bool>(k, false)};
  for (std::size_t x = 0; x < k; ++x) {
    double denom = alpha * p1[x] + p2[x];
    if (p1[x] > 0.0) {
      h.wrt_p1_p1[x] = alpha * p2[x] / (p1[x] * denom);
      h.p1_support[x] = true;
    }
    if (p2[x] > 0.0) {
      h.wrt_p2_p2[x] = alpha * p1[x] / (p2[x] * denom);
      h.p2_support[x] = true;
    }
    if (p1[x] > 0.0 && p2[x] > 0.0) {
      h.wrt_p1_p2[x] = -alpha / denom;
    }
  }
  return h;
}

MomentPair pairwise_moments(const Distribution& p1, const Distribution& p2,
                            const Distribution& p3, double alpha) {
  require_same_alphabet(p1.alphabet_size(), p3.alphabet_size());
  require_same_alphabet(p2.alphabet_size(), p3.alphabet_size());
  Moments m1 = central_moments(p1, [&](std::size_t x) {
    return info_density_raw(p1[x], p1[x], p3[x], alpha);
  });
  Moments m2 = central_moments(p2, [&](std::size_t x) {
    return info_density_raw(p2[x], p2[x], p3[x], alpha);
  });
  Moments m3 = central_moments(p3, [&](std::size_t x) {
    // i2(x | p1, p3) - i2(x | p2, p3), defined on supp(p3)
    return info_density_raw(p3[x], p1[x], p3[x], alpha) -
           info_density_raw(p3[x], p2[x], p3[x], alpha);
  });
  return MomentPair{alpha * m1.var + alpha * m2.var + m3.var,
                    alpha * m1.third + alpha * m2.third + m3.third};
}

}  // namespace gutmanlab
