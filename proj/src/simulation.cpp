#include "gutmanlab/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "gutmanlab/classifiers.hpp"
#include "gutmanlab/divergences.hpp"
#include "gutmanlab/random.hpp"
#include "gutmanlab/special_functions.hpp"

namespace gutmanlab {
namespace {

// Stream-id layout: a 16-bit context (phase of the experiment), a trial
// index below 2^40, and an 8-bit part for the sequences inside one trial.
constexpr std::uint64_t kContextBinaryH1 = 1;
constexpr std::uint64_t kContextBinaryH2 = 2;
constexpr std::uint64_t kContextWeak = 3;
constexpr std::uint64_t kContextMultiBase = 0x100;
constexpr std::uint64_t kContextMaxType1Base = 0x1000;

std::uint64_t trial_stream(std::uint64_t context, std::uint64_t trial,
                           std::uint64_t part) {
  return (context << 48) | (trial << 8) | part;
}

unsigned effective_threads(unsigned requested, std::uint64_t trials) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned t = requested == 0 ? hw : requested;
  if (trials < t) t = static_cast<unsigned>(std::max<std::uint64_t>(1, trials));
  return t;
}

// Runs fn(trial) for every trial index, partitioned across threads; fn must
// only touch per-thread state captured by the maker.
void parallel_trials(std::uint64_t trials, unsigned threads,
                     const std::function<void(std::uint64_t first, std::uint64_t last,
                                              unsigned thread_index)>& run_range) {
  if (threads <= 1) {
    run_range(0, trials, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::uint64_t chunk = (trials + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::uint64_t first = t * chunk;
    std::uint64_t last = std::min(trials, first + chunk);
    if (first >= last) break;
    pool.emplace_back([&, first, last, t] { run_range(first, last, t); });
  }
  for (std::thread& th : pool) th.join();
}

// log of the probability that n i.i.d. draws from p produce these counts.
double log_type_probability(const std::vector<std::uint64_t>& counts, std::uint64_t n,
                            const Distribution& p) {
  double lp = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t x = 0; x < counts.size(); ++x) {
    lp -= std::lgamma(static_cast<double>(counts[x]) + 1.0);
    if (counts[x] > 0) {
      if (p[x] <= 0.0) return -std::numeric_limits<double>::infinity();
      lp += static_cast<double>(counts[x]) * std::log(p[x]);
    }
  }
  return lp;
}

void for_each_composition(std::uint64_t n, std::size_t k,
                          std::vector<std::uint64_t>& counts, std::size_t pos,
                          const std::function<void()>& fn) {
  if (pos + 1 == k) {
    counts[pos] = n;
    fn();
    return;
  }
  for (std::uint64_t c = 0; c <= n; ++c) {
    counts[pos] = c;
    for_each_composition(n - c, k, counts, pos + 1, fn);
  }
}

}  // namespace

Estimate make_estimate(std::uint64_t hits, std::uint64_t trials) {
  double p = static_cast<double>(hits) / static_cast<double>(trials);
  return Estimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

BinaryMcReport mc_binary(const Distribution& p1, const Distribution& p2, double alpha,
                         std::uint64_t n, double lambda, std::uint64_t trials,
                         std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw std::domain_error("mc_binary: trials must be positive");
  if (p1.alphabet_size() != p2.alphabet_size()) {
    throw std::domain_error("mc_binary: alphabet mismatch");
  }
  std::uint64_t train_n = training_length(n, alpha);
  unsigned t = effective_threads(threads, trials);

  std::vector<std::uint64_t> h1_errors(t, 0), h2_errors(t, 0);
  parallel_trials(trials, t, [&](std::uint64_t first, std::uint64_t last, unsigned ti) {
    std::vector<std::uint64_t> cx(p1.alphabet_size()), cy(p1.alphabet_size());
    for (std::uint64_t trial = first; trial < last; ++trial) {
      // H1: training and test both from p1
      RandomStream sx(seed, trial_stream(kContextBinaryH1, trial, 0));
      RandomStream sy(seed, trial_stream(kContextBinaryH1, trial, 1));
      sample_counts_into(p1, train_n, sx, cx);
      sample_counts_into(p1, n, sy, cy);
      if (gjs_from_counts(cx, train_n, cy, n, alpha) > lambda) ++h1_errors[ti];
      // H2: training from p1, test from p2
      RandomStream sx2(seed, trial_stream(kContextBinaryH2, trial, 0));
      RandomStream sy2(seed, trial_stream(kContextBinaryH2, trial, 1));
      sample_counts_into(p1, train_n, sx2, cx);
      sample_counts_into(p2, n, sy2, cy);
      if (gjs_from_counts(cx, train_n, cy, n, alpha) <= lambda) ++h2_errors[ti];
    }
  });

  std::uint64_t e1 = 0, e2 = 0;
  for (unsigned i = 0; i < t; ++i) {
    e1 += h1_errors[i];
    e2 += h2_errors[i];
  }
  return BinaryMcReport{make_estimate(e1, trials), make_estimate(e2, trials), trials,
                        seed};
}

ExactBinaryReport exact_binary(const Distribution& p1, const Distribution& p2,
                               double alpha, std::uint64_t n, double lambda) {
  if (p1.alphabet_size() != p2.alphabet_size()) {
    throw std::domain_error("exact_binary: alphabet mismatch");
  }
  std::uint64_t train_n = training_length(n, alpha);
  std::size_t k = p1.alphabet_size();
  double budget =
      std::pow(static_cast<double>(train_n + 1), static_cast<double>(k - 1)) *
      std::pow(static_cast<double>(n + 1), static_cast<double>(k - 1));
  if (budget > 1e8) {
    throw std::domain_error("exact_binary: enumeration budget exceeded (" +
                            std::to_string(budget) + " > 1e8 type pairs)");
  }

  // Test-type weights under each hypothesis, indexed by enumeration order.
  std::vector<std::uint64_t> cy(k);
  std::vector<double> wy_h1, wy_h2;
  std::vector<std::vector<double>> test_types;
  for_each_composition(n, k, cy, 0, [&]() {
    wy_h1.push_back(std::exp(log_type_probability(cy, n, p1)));
    wy_h2.push_back(std::exp(log_type_probability(cy, n, p2)));
    std::vector<double> q(k);
    for (std::size_t x = 0; x < k; ++x) {
      q[x] = static_cast<double>(cy[x]) / static_cast<double>(n);
    }
    test_types.push_back(std::move(q));
  });

  ExactBinaryReport report;
  std::vector<std::uint64_t> cx(k);
  std::vector<double> q1(k);
  for_each_composition(train_n, k, cx, 0, [&]() {
    double wx = std::exp(log_type_probability(cx, train_n, p1));
    for (std::size_t x = 0; x < k; ++x) {
      q1[x] = static_cast<double>(cx[x]) / static_cast<double>(train_n);
    }
    for (std::size_t i = 0; i < test_types.size(); ++i) {
      double g = gjs_divergence(std::span<const double>(q1),
                                std::span<const double>(test_types[i]), alpha);
      if (g > lambda) {
        report.beta1 += wx * wy_h1[i];
      } else {
        report.beta2 += wx * wy_h2[i];
      }
      ++report.enumerated_cells;
    }
  });
  return report;
}

MultiMcReport mc_multi(const std::vector<Distribution>& p, double alpha,
                       std::uint64_t n, double lambda_tilde, MultiRule rule,
                       std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  std::size_t m = p.size();
  if (m < 2) throw std::domain_error("mc_multi: need at least two hypotheses");
  if (trials == 0) throw std::domain_error("mc_multi: trials must be positive");
  for (const Distribution& d : p) {
    if (d.alphabet_size() != p[0].alphabet_size()) {
      throw std::domain_error("mc_multi: alphabet mismatch");
    }
  }
  std::uint64_t train_n = training_length(n, alpha);
  unsigned t = effective_threads(threads, trials);

  MultiMcReport report;
  report.trials = trials;
  report.seed = seed;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::uint64_t> errors(t, 0), rejects(t, 0);
    std::uint64_t context = kContextMultiBase + j;
    parallel_trials(trials, t,
                    [&](std::uint64_t first, std::uint64_t last, unsigned ti) {
      std::vector<std::vector<std::uint64_t>> cx(m);
      std::vector<std::uint64_t> cy;
      std::vector<double> g(m);
      for (std::uint64_t trial = first; trial < last; ++trial) {
        for (std::size_t i = 0; i < m; ++i) {
          RandomStream s(seed, trial_stream(context, trial, i));
          sample_counts_into(p[i], train_n, s, cx[i]);
        }
        RandomStream sy(seed, trial_stream(context, trial, m));
        sample_counts_into(p[j], n, sy, cy);
        for (std::size_t i = 0; i < m; ++i) {
          g[i] = gjs_from_counts(cx[i], train_n, cy, n, alpha);
        }
        Verdict v = rule == MultiRule::unnikrishnan
                        ? unnikrishnan_from_stats(g, lambda_tilde)
                        : gutman_multi_from_stats(g, lambda_tilde);
        if (v.rejected()) {
          ++rejects[ti];
        } else if (v.decision != static_cast<int>(j) + 1) {
          ++errors[ti];
        }
      }
    });
    std::uint64_t e = 0, r = 0;
    for (unsigned i = 0; i < t; ++i) {
      e += errors[i];
      r += rejects[i];
    }
    report.error.push_back(make_estimate(e, trials));
    report.rejection.push_back(make_estimate(r, trials));
  }
  return report;
}

MaxType1Report max_type1_search(double alpha, std::uint64_t n, double lambda,
                                double grid_step, std::uint64_t trials_per_point,
                                std::uint64_t seed, unsigned threads) {
  if (!(grid_step > 0.0 && grid_step < 0.5)) {
    throw std::domain_error("max_type1_search: grid_step must lie in (0, 0.5)");
  }
  if (trials_per_point == 0) {
    throw std::domain_error("max_type1_search: trials must be positive");
  }
  std::uint64_t train_n = training_length(n, alpha);
  unsigned t = effective_threads(threads, trials_per_point);

  MaxType1Report report;
  report.trials_per_point = trials_per_point;
  report.seed = seed;
  std::size_t point_index = 0;
  for (double pv = grid_step; pv < 1.0 - 0.5 * grid_step; pv += grid_step, ++point_index) {
    Distribution source = Distribution::bernoulli(pv);
    std::vector<std::uint64_t> errors(t, 0);
    std::uint64_t context = kContextMaxType1Base + point_index;
    parallel_trials(trials_per_point, t,
                    [&](std::uint64_t first, std::uint64_t last, unsigned ti) {
      std::vector<std::uint64_t> cx(2), cy(2);
      for (std::uint64_t trial = first; trial < last; ++trial) {
        RandomStream sx(seed, trial_stream(context, trial, 0));
        RandomStream sy(seed, trial_stream(context, trial, 1));
        sample_counts_into(source, train_n, sx, cx);
        sample_counts_into(source, n, sy, cy);
        if (gjs_from_counts(cx, train_n, cy, n, alpha) > lambda) ++errors[ti];
      }
    });
    std::uint64_t e = 0;
    for (unsigned i = 0; i < t; ++i) e += errors[i];
    report.points.push_back({pv, make_estimate(e, trials_per_point)});
  }

  const auto best = std::max_element(
      report.points.begin(), report.points.end(),
      [](const auto& a, const auto& b) { return a.beta1.value < b.beta1.value; });
  report.max_beta1 = best->beta1;
  report.argmax_p = best->p;
  return report;
}

WeakConvergenceReport weak_convergence_check(const Distribution& p, double alpha,
                                             std::uint64_t n, std::uint64_t trials,
                                             std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw std::domain_error("weak_convergence_check: trials must be positive");
  std::uint64_t train_n = training_length(n, alpha);
  unsigned t = effective_threads(threads, trials);

  WeakConvergenceReport report;
  report.samples.assign(trials, 0.0);
  parallel_trials(trials, t, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    std::vector<std::uint64_t> cx(p.alphabet_size()), cy(p.alphabet_size());
    for (std::uint64_t trial = first; trial < last; ++trial) {
      RandomStream sx(seed, trial_stream(kContextWeak, trial, 0));
      RandomStream sy(seed, trial_stream(kContextWeak, trial, 1));
      sample_counts_into(p, train_n, sx, cx);
      sample_counts_into(p, n, sy, cy);
      report.samples[trial] =
          2.0 * static_cast<double>(n) * gjs_from_counts(cx, train_n, cy, n, alpha);
    }
  });

  std::vector<double> sorted = report.samples;
  std::sort(sorted.begin(), sorted.end());
  report.degenerate = sorted.back() == 0.0;

  unsigned dof = static_cast<unsigned>(p.alphabet_size() - 1);
  double ks = 0.0;
  double m = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double cdf = 1.0 - chi2_sf(dof, sorted[i]).value();
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / m - cdf));
    ks = std::max(ks, std::fabs(static_cast<double>(i) / m - cdf));
  }
  report.ks_distance = ks;
  return report;
}

}  // namespace gutmanlab
