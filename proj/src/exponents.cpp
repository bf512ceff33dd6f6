#include "gutmanlab/exponents.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "gutmanlab/divergences.hpp"

namespace gutmanlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInnerTol = 1e-12;   // fixed-point tolerance on the iterates
constexpr double kOuterTol = 1e-9;    // target |gjs - lambda| at the solution
constexpr int kInnerMaxIters = 200000;
constexpr int kOuterMaxIters = 200;

using Vec = std::vector<double>;

void normalize(Vec& v) {
  double z = 0.0;
  for (double x : v) z += x;
  for (double& x : v) x /= z;
}

// q <- normalized base^(1/(1+mu)) * ref^(mu/(1+mu)); zero stays zero.
void geometric_update(const Vec& base, const Vec& ref, double mu, Vec& q) {
  double w1 = 1.0 / (1.0 + mu);
  double w2 = mu / (1.0 + mu);
  for (std::size_t x = 0; x < q.size(); ++x) {
    q[x] = (base[x] > 0.0 && ref[x] > 0.0)
               ? std::exp(w1 * std::log(base[x]) + w2 * std::log(ref[x]))
               : 0.0;
  }
  normalize(q);
}

double max_abs_diff(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) d = std::max(d, std::fabs(a[x] - b[x]));
  return d;
}

Distribution to_distribution(Vec v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  double resum = 0.0;
  for (double x : v) resum += x;
  v.back() += 1.0 - resum;
  return Distribution(std::move(v));
}

bool supports_overlap(const Distribution& a, const Distribution& b) {
  for (std::size_t x = 0; x < a.alphabet_size(); ++x) {
    if (a[x] > 0.0 && b[x] > 0.0) return true;
  }
  return false;
}

// Inner minimization of the penalized objective
//   alpha D(q1||p1) + D(q2||p2) + mu * gjs(q1, q2, alpha)
// by exact alternating updates. gjs(q1,q2,alpha) equals the minimum over r of
// alpha D(q1||r) + D(q2||r), attained at the mixture, so each block update is
// a normalized geometric mean and the penalized objective never increases.
struct InnerResult {
  Vec q1, q2;
  double delta = 0.0;
  bool converged = false;
};

InnerResult minimize_penalized_pair(const Distribution& p1, const Distribution& p2,
                                    double alpha, double mu) {
  std::size_t k = p1.alphabet_size();
  Vec q1(p1.probs()), q2(p2.probs()), r(k), prev1(k), prev2(k);
  InnerResult res;
  for (int it = 0; it < kInnerMaxIters; ++it) {
    prev1 = q1;
    prev2 = q2;
    for (std::size_t x = 0; x < k; ++x) r[x] = (alpha * q1[x] + q2[x]) / (1.0 + alpha);
    geometric_update(p1.probs(), r, mu, q1);
    geometric_update(p2.probs(), r, mu, q2);
    res.delta = std::max(max_abs_diff(q1, prev1), max_abs_diff(q2, prev2));
    if (res.delta <= kInnerTol) {
      res.converged = true;
      break;
    }
  }
  res.q1 = std::move(q1);
  res.q2 = std::move(q2);
  return res;
}

}  // namespace

ExponentSolution error_exponent(const Distribution& p1, const Distribution& p2,
                                double alpha, double lambda) {
  if (p1.alphabet_size() != p2.alphabet_size()) {
    throw std::domain_error("error_exponent: alphabet mismatch");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("error_exponent: alpha must be finite and positive");
  }
  if (!(lambda >= 0.0)) {
    throw std::domain_error("error_exponent: lambda must be nonnegative");
  }

  double slack_value = gjs_divergence(p1, p2, alpha);
  if (lambda >= slack_value) {
    return ExponentSolution{0.0, {p1, p2}, 0.0, true, 0.0};
  }

  if (!supports_overlap(p1, p2)) {
    // Every finite-objective pair keeps the full divergence gjs_max(alpha),
    // so the constraint set carries infinite cost below that level.
    return ExponentSolution{kInf, {p1, p2}, kInf, true, 0.0};
  }

  if (lambda == 0.0) {
    // Constraint forces q1 = q2; the single-block program has the tilted
    // distribution as its exact stationary point.
    Distribution q = tilted_distribution(p1, p2, alpha / (1.0 + alpha));
    double value = alpha * kl_divergence(q, p1) + kl_divergence(q, p2);
    return ExponentSolution{value, {q, q}, kInf, true, 0.0};
  }

  // Dual bisection on the penalty weight mu: the constraint value of the
  // penalized minimizer decreases from gjs(p1,p2,alpha) at mu=0 toward 0.
  double mu_lo = 0.0;
  double mu_hi = 1.0;
  InnerResult at_hi = minimize_penalized_pair(p1, p2, alpha, mu_hi);
  int expansions = 0;
  while (gjs_divergence(at_hi.q1, at_hi.q2, alpha) > lambda && expansions < 60) {
    mu_lo = mu_hi;
    mu_hi *= 2.0;
    at_hi = minimize_penalized_pair(p1, p2, alpha, mu_hi);
    ++expansions;
  }

  InnerResult best = at_hi;
  double mu = mu_hi;
  double constraint = gjs_divergence(best.q1, best.q2, alpha);
  for (int it = 0; it < kOuterMaxIters && std::fabs(constraint - lambda) > kOuterTol;
       ++it) {
    mu = 0.5 * (mu_lo + mu_hi);
    InnerResult inner = minimize_penalized_pair(p1, p2, alpha, mu);
    constraint = gjs_divergence(inner.q1, inner.q2, alpha);
    best = std::move(inner);
    if (constraint > lambda) {
      mu_lo = mu;
    } else {
      mu_hi = mu;
    }
  }

  ExponentSolution sol;
  sol.value = alpha * kl_divergence(std::span<const double>(best.q1),
                                    std::span<const double>(p1.probs())) +
              kl_divergence(std::span<const double>(best.q2),
                            std::span<const double>(p2.probs()));
  sol.minimizers = {to_distribution(best.q1), to_distribution(best.q2)};
  sol.multiplier = mu;
  sol.residual = std::max(std::fabs(constraint - lambda), best.delta);
  sol.converged = best.converged && std::fabs(constraint - lambda) <= kOuterTol;
  return sol;
}

namespace {

struct InnerTripleResult {
  Vec q1, q2, q3;
  double delta = 0.0;
  bool converged = false;
};

// Penalized objective for the triple program:
//   D(q1||pj) + alpha D(q2||pi) + alpha D(q3||pk)
//     + mu2 * gjs(q2, q1, alpha) + mu3 * gjs(q3, q1, alpha).
InnerTripleResult minimize_penalized_triple(const Distribution& pj,
                                            const Distribution& pi,
                                            const Distribution& pk, double alpha,
                                            double mu2, double mu3) {
  std::size_t k = pj.alphabet_size();
  Vec q1(pj.probs()), q2(pi.probs()), q3(pk.probs());
  Vec r2(k), r3(k), prev1(k), prev2(k), prev3(k), base(k);
  InnerTripleResult res;
  for (int it = 0; it < kInnerMaxIters; ++it) {
    prev1 = q1;
    prev2 = q2;
    prev3 = q3;
    for (std::size_t x = 0; x < k; ++x) {
      r2[x] = (alpha * q2[x] + q1[x]) / (1.0 + alpha);
      r3[x] = (alpha * q3[x] + q1[x]) / (1.0 + alpha);
    }
    // q1 block: D(q1||pj) + mu2 D(q1||r2) + mu3 D(q1||r3)
    double total = 1.0 + mu2 + mu3;
    for (std::size_t x = 0; x < k; ++x) {
      if (pj[x] > 0.0 && r2[x] > 0.0 && r3[x] > 0.0) {
        base[x] = std::exp((std::log(pj[x]) + mu2 * std::log(r2[x]) +
                            mu3 * std::log(r3[x])) /
                           total);
      } else {
        base[x] = 0.0;
      }
    }
    q1 = base;
    normalize(q1);
    for (std::size_t x = 0; x < k; ++x) {
      r2[x] = (alpha * q2[x] + q1[x]) / (1.0 + alpha);
      r3[x] = (alpha * q3[x] + q1[x]) / (1.0 + alpha);
    }
    geometric_update(pi.probs(), r2, mu2, q2);
    geometric_update(pk.probs(), r3, mu3, q3);
    res.delta = std::max({max_abs_diff(q1, prev1), max_abs_diff(q2, prev2),
                          max_abs_diff(q3, prev3)});
    if (res.delta <= kInnerTol) {
      res.converged = true;
      break;
    }
  }
  res.q1 = std::move(q1);
  res.q2 = std::move(q2);
  res.q3 = std::move(q3);
  return res;
}

}  // namespace

ExponentSolution rejection_exponent(const Distribution& pj, const Distribution& pi,
                                    const Distribution& pk, double alpha,
                                    double lambda) {
  if (pj.alphabet_size() != pi.alphabet_size() ||
      pj.alphabet_size() != pk.alphabet_size()) {
    throw std::domain_error("rejection_exponent: alphabet mismatch");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("rejection_exponent: alpha must be finite and positive");
  }
  if (!(lambda >= 0.0)) {
    throw std::domain_error("rejection_exponent: lambda must be nonnegative");
  }

  double g2 = gjs_divergence(pi, pj, alpha);
  double g3 = gjs_divergence(pk, pj, alpha);
  if (lambda >= g2 && lambda >= g3) {
    return ExponentSolution{0.0, {pj, pi, pk}, 0.0, true, 0.0};
  }

  if (lambda == 0.0) {
    // Both constraints force q2 = q3 = q1; the single-block stationary point
    // is the normalized geometric mean with exponents 1 : alpha : alpha.
    std::size_t k = pj.alphabet_size();
    Vec w(k, 0.0);
    double total = 1.0 + 2.0 * alpha;
    bool any = false;
    for (std::size_t x = 0; x < k; ++x) {
      if (pj[x] > 0.0 && pi[x] > 0.0 && pk[x] > 0.0) {
        w[x] = std::exp((std::log(pj[x]) +
                         alpha * (std::log(pi[x]) + std::log(pk[x]))) /
                        total);
        any = true;
      }
    }
    if (!any) return ExponentSolution{kInf, {pj, pi, pk}, kInf, true, 0.0};
    Distribution q = to_distribution(std::move(w));
    double value = kl_divergence(q, pj) + alpha * kl_divergence(q, pi) +
                   alpha * kl_divergence(q, pk);
    return ExponentSolution{value, {q, q, q}, kInf, true, 0.0};
  }

  if (!supports_overlap(pj, pi) && !supports_overlap(pj, pk)) {
    return ExponentSolution{kInf, {pj, pi, pk}, kInf, true, 0.0};
  }

  // Coordinate-wise dual: bisect each multiplier holding the other fixed,
  // alternating rounds until both constraints sit at lambda (or are slack
  // with a zero multiplier).
  double mu2 = 0.0, mu3 = 0.0;
  InnerTripleResult best = minimize_penalized_triple(pj, pi, pk, alpha, mu2, mu3);
  double c2 = gjs_divergence(best.q2, best.q1, alpha);
  double c3 = gjs_divergence(best.q3, best.q1, alpha);

  auto bisect_mu = [&](int which) {
    double lo = 0.0, hi = 1.0;
    auto constraint_at = [&](double mu) {
      InnerTripleResult r = which == 2
                                ? minimize_penalized_triple(pj, pi, pk, alpha, mu, mu3)
                                : minimize_penalized_triple(pj, pi, pk, alpha, mu2, mu);
      double c = which == 2 ? gjs_divergence(r.q2, r.q1, alpha)
                            : gjs_divergence(r.q3, r.q1, alpha);
      best = std::move(r);
      return c;
    };
    if (constraint_at(0.0) <= lambda) {
      if (which == 2) mu2 = 0.0; else mu3 = 0.0;
      return;
    }
    int expansions = 0;
    while (constraint_at(hi) > lambda && expansions < 60) {
      lo = hi;
      hi *= 2.0;
      ++expansions;
    }
    for (int it = 0; it < 90; ++it) {
      double mid = 0.5 * (lo + hi);
      if (constraint_at(mid) > lambda) lo = mid; else hi = mid;
      if (hi - lo <= 1e-12 * (1.0 + hi)) break;
    }
    double mu = hi;
    constraint_at(mu);
    if (which == 2) mu2 = mu; else mu3 = mu;
  };

  for (int round = 0; round < 40; ++round) {
    bisect_mu(2);
    bisect_mu(3);
    c2 = gjs_divergence(best.q2, best.q1, alpha);
    c3 = gjs_divergence(best.q3, best.q1, alpha);
    bool ok2 = (mu2 == 0.0 && c2 <= lambda + kOuterTol) || std::fabs(c2 - lambda) <= kOuterTol;
    bool ok3 = (mu3 == 0.0 && c3 <= lambda + kOuterTol) || std::fabs(c3 - lambda) <= kOuterTol;
    if (ok2 && ok3) break;
  }

  ExponentSolution sol;
  sol.value = kl_divergence(std::span<const double>(best.q1),
                            std::span<const double>(pj.probs())) +
              alpha * kl_divergence(std::span<const double>(best.q2),
                                    std::span<const double>(pi.probs())) +
              alpha * kl_divergence(std::span<const double>(best.q3),
                                    std::span<const double>(pk.probs()));
  sol.minimizers = {to_distribution(best.q1), to_distribution(best.q2),
                    to_distribution(best.q3)};
  sol.multiplier = std::max(mu2, mu3);
  double r2res = (mu2 == 0.0 && c2 <= lambda) ? 0.0 : std::fabs(c2 - lambda);
  double r3res = (mu3 == 0.0 && c3 <= lambda) ? 0.0 : std::fabs(c3 - lambda);
  sol.residual = std::max({r2res, r3res, best.delta});
  sol.converged = best.converged && sol.residual <= 1e-6;
  return sol;
}

namespace {

// Enumerates all count vectors of total n over k symbols.
void for_each_composition(std::uint64_t n, std::size_t k,
                          std::vector<std::uint64_t>& counts, std::size_t pos,
                          const std::function<void(const std::vector<std::uint64_t>&)>& fn) {
  if (pos + 1 == k) {
    counts[pos] = n;
    fn(counts);
    return;
  }
  for (std::uint64_t c = 0; c <= n; ++c) {
    counts[pos] = c;
    for_each_composition(n - c, k, counts, pos + 1, fn);
  }
}

}  // namespace

ExponentSolution error_exponent_on_types(const Distribution& p1, const Distribution& p2,
                                         double alpha, double lambda, std::uint64_t n) {
  if (p1.alphabet_size() != p2.alphabet_size()) {
    throw std::domain_error("error_exponent_on_types: alphabet mismatch");
  }
  if (n == 0) throw std::domain_error("error_exponent_on_types: n must be positive");
  std::uint64_t train_n = training_length(n, alpha);
  std::size_t k = p1.alphabet_size();
  double budget = std::pow(static_cast<double>(train_n + 1), static_cast<double>(k - 1)) *
                  std::pow(static_cast<double>(n + 1), static_cast<double>(k - 1));
  if (budget > 1e8) {
    throw std::domain_error("error_exponent_on_types: enumeration budget exceeded ("
                            + std::to_string(budget) + " > 1e8 type pairs)");
  }

  double best_value = kInf;
  std::vector<double> best_q1, best_q2;
  std::vector<std::uint64_t> c1(k), c2(k);
  std::vector<double> q1(k), q2(k);
  for_each_composition(train_n, k, c1, 0, [&](const std::vector<std::uint64_t>& cc1) {
    for (std::size_t x = 0; x < k; ++x) {
      q1[x] = static_cast<double>(cc1[x]) / static_cast<double>(train_n);
    }
    double d1 = kl_divergence(std::span<const double>(q1),
                              std::span<const double>(p1.probs()));
    if (alpha * d1 >= best_value) return;
    for_each_composition(n, k, c2, 0, [&](const std::vector<std::uint64_t>& cc2) {
      for (std::size_t x = 0; x < k; ++x) {
        q2[x] = static_cast<double>(cc2[x]) / static_cast<double>(n);
      }
      if (gjs_divergence(std::span<const double>(q1), std::span<const double>(q2),
                         alpha) > lambda) {
        return;
      }
      double value = alpha * d1 + kl_divergence(std::span<const double>(q2),
                                                std::span<const double>(p2.probs()));
      if (value < best_value) {
        best_value = value;
        best_q1 = q1;
        best_q2 = q2;
      }
    });
  });

  ExponentSolution sol;
  sol.value = best_value;
  if (!best_q1.empty()) {
    sol.minimizers = {to_distribution(best_q1), to_distribution(best_q2)};
  }
  sol.multiplier = 0.0;
  sol.converged = true;
  sol.residual = 0.0;
  return sol;
}

double error_exponent_bernoulli_grid(const Distribution& p1, const Distribution& p2,
                                     double alpha, double lambda, double step) {
  if (p1.alphabet_size() != 2 || p2.alphabet_size() != 2) {
    throw std::domain_error("error_exponent_bernoulli_grid: binary alphabets only");
  }
  if (!(step > 0.0 && step < 1.0)) {
    throw std::domain_error("error_exponent_bernoulli_grid: bad step");
  }
  auto points = static_cast<std::size_t>(std::floor(1.0 / step)) + 1;
  double best = kInf;
  std::vector<double> q1(2), q2(2);
  for (std::size_t i = 0; i < points; ++i) {
    q1[1] = std::min(1.0, i * step);
    q1[0] = 1.0 - q1[1];
    double d1 = kl_divergence(std::span<const double>(q1),
                              std::span<const double>(p1.probs()));
    if (alpha * d1 >= best) continue;
    for (std::size_t j = 0; j < points; ++j) {
      q2[1] = std::min(1.0, j * step);
      q2[0] = 1.0 - q2[1];
      if (gjs_divergence(std::span<const double>(q1), std::span<const double>(q2),
                         alpha) > lambda) {
        continue;
      }
      double value = alpha * d1 + kl_divergence(std::span<const double>(q2),
                                                std::span<const double>(p2.probs()));
      best = std::min(best, value);
    }
  }
  return best;
}

double rejection_exponent_bernoulli_grid(const Distribution& pj, const Distribution& pi,
                                         const Distribution& pk, double alpha,
                                         double lambda, double step) {
  if (pj.alphabet_size() != 2 || pi.alphabet_size() != 2 || pk.alphabet_size() != 2) {
    throw std::domain_error("rejection_exponent_bernoulli_grid: binary alphabets only");
  }
  if (!(step > 0.0 && step < 1.0)) {
    throw std::domain_error("rejection_exponent_bernoulli_grid: bad step");
  }
  auto points = static_cast<std::size_t>(std::floor(1.0 / step)) + 1;
  double best = kInf;
  std::vector<double> q1(2), q2(2), q3(2);
  for (std::size_t i = 0; i < points; ++i) {
    q1[1] = std::min(1.0, i * step);
    q1[0] = 1.0 - q1[1];
    double d1 = kl_divergence(std::span<const double>(q1),
                              std::span<const double>(pj.probs()));
    if (d1 >= best) continue;
    for (std::size_t j = 0; j < points; ++j) {
      q2[1] = std::min(1.0, j * step);
      q2[0] = 1.0 - q2[1];
      if (gjs_divergence(std::span<const double>(q2), std::span<const double>(q1),
                         alpha) > lambda) {
        continue;
      }
      double d12 = d1 + alpha * kl_divergence(std::span<const double>(q2),
                                              std::span<const double>(pi.probs()));
      if (d12 >= best) continue;
      for (std::size_t l = 0; l < points; ++l) {
        q3[1] = std::min(1.0, l * step);
        q3[0] = 1.0 - q3[1];
        if (gjs_divergence(std::span<const double>(q3), std::span<const double>(q1),
                           alpha) > lambda) {
          continue;
        }
        double value = d12 + alpha * kl_divergence(std::span<const double>(q3),
                                                   std::span<const double>(pk.probs()));
        best = std::min(best, value);
      }
    }
  }
  return best;
}

SlackTerms slack_terms(std::uint64_t n, double alpha, std::size_t alphabet_size,
                       std::size_t num_hypotheses, const Distribution& p1,
                       const Distribution& p2) {
  if (n < 2) throw std::domain_error("slack_terms: n must be >= 2");
  if (!(alpha > 0.0)) throw std::domain_error("slack_terms: alpha must be positive");
  double nn = static_cast<double>(n);
  double k = static_cast<double>(alphabet_size);
  double m = static_cast<double>(num_hypotheses);

  SlackTerms terms;
  terms.typicality = 2.0 * (1.0 + alpha * alpha) * k / (2.0 * alpha * alpha * nn * nn);
  double v = dispersion(p1, p2, alpha);
  if (v <= 0.0) {
    throw std::domain_error("slack_terms: zero dispersion (distributions must differ)");
  }
  double t = third_absolute_moment(p1, p2, alpha);
  terms.berry_esseen = 6.0 * t / std::sqrt(nn * v * v * v) + terms.typicality;
  terms.converse_binary =
      k * std::log(nn + 1.0) / nn + 2.0 * k * std::log(1.0 + alpha * nn) / (alpha * nn);
  terms.converse_multi =
      m * k * std::log(nn * alpha + 1.0) / (nn * alpha) + k * std::log(nn + 1.0) / nn;
  terms.threshold_correction = k * std::log((1.0 + alpha) * nn + 1.0) / nn;
  return terms;
}

}  // namespace gutmanlab
