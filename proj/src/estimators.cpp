#include "dynkin/estimators.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "dynkin/field.hpp"

namespace dynkin {

namespace detail {

std::vector<double> accumulate_items(std::size_t n_items, std::size_t stat_len, unsigned n_workers,
                                     const std::function<void(std::size_t, std::vector<double>&)>& body) {
  const std::size_t n_blocks = (n_items + kAccumulatorBlock - 1) / kAccumulatorBlock;
  std::vector<std::vector<double>> partials(n_blocks);
  std::vector<std::exception_ptr> failures(n_blocks);

  auto run_block = [&](std::size_t block) {
    std::vector<double> acc(stat_len, 0.0);
    const std::size_t begin = block * kAccumulatorBlock;
    const std::size_t end = std::min(begin + kAccumulatorBlock, n_items);
    try {
      for (std::size_t item = begin; item < end; ++item) body(item, acc);
    } catch (...) {
      failures[block] = std::current_exception();
    }
    partials[block] = std::move(acc);
  };

  if (n_workers <= 1 || n_blocks <= 1) {
    for (std::size_t block = 0; block < n_blocks; ++block) run_block(block);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t block = next.fetch_add(1); block < n_blocks; block = next.fetch_add(1)) {
        run_block(block);
      }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::min<std::size_t>(n_workers, n_blocks);
    pool.reserve(count);
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t block = 0; block < n_blocks; ++block) {
    if (failures[block]) std::rethrow_exception(failures[block]);
  }
  std::vector<double> totals(stat_len, 0.0);
  for (std::size_t block = 0; block < n_blocks; ++block) {
    for (std::size_t k = 0; k < stat_len; ++k) totals[k] += partials[block][k];
  }
  return totals;
}

McEstimate finalize(std::size_t n, double sum, double sum_sq) {
  McEstimate est;
  est.n = n;
  if (n == 0) return est;
  est.mean = sum / static_cast<double>(n);
  if (n > 1) {
    const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * est.mean * est.mean) /
                                         static_cast<double>(n - 1));
    est.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return est;
}

void require_config(const McConfig& cfg) {
  if (cfg.n_paths < 1) throw StructuralError("McConfig: n_paths must be at least 1");
  if (cfg.max_jumps < 1) throw StructuralError("McConfig: max_jumps must be at least 1");
}

}  // namespace detail

std::pair<std::vector<McEstimate>, std::vector<McEstimate>> mc_occupation_from(const GeneratorMatrix& q,
                                                                               const SignMatrix& s,
                                                                               Index start,
                                                                               const McConfig& cfg) {
  detail::require_config(cfg);
  const EmbeddedChain chain = embedded_chain(q);
  require_sign_matrix(s, q.size());
  const Index n = q.size();
  if (start < 0 || start >= n) throw StructuralError("mc_occupation_from: start state out of range");
  const std::size_t stat_len = 4 * static_cast<std::size_t>(n);

  const std::uint64_t offset = static_cast<std::uint64_t>(start) * cfg.n_paths;
  auto body = [&](std::size_t item, std::vector<double>& acc) {
    RngStream rng = RngStream::make(cfg.seed, detail::kPathDomain, offset + item);
    const PathRecord path = sample_path(chain, s, start, rng, cfg.max_jumps);
    std::vector<double> occ_here(static_cast<std::size_t>(n), 0.0);
    std::vector<double> net_here(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < path.length(); ++i) {
      const auto y = static_cast<std::size_t>(path.states[i]);
      const double hold = path.holding(i);
      occ_here[y] += hold;
      net_here[y] += hold * path.signs[i];
    }
    for (std::size_t y = 0; y < static_cast<std::size_t>(n); ++y) {
      acc[4 * y + 0] += occ_here[y];
      acc[4 * y + 1] += occ_here[y] * occ_here[y];
      acc[4 * y + 2] += net_here[y];
      acc[4 * y + 3] += net_here[y] * net_here[y];
    }
  };
  const std::vector<double> totals = detail::accumulate_items(cfg.n_paths, stat_len, cfg.n_workers, body);

  std::vector<McEstimate> occ(static_cast<std::size_t>(n));
  std::vector<McEstimate> net(static_cast<std::size_t>(n));
  for (std::size_t y = 0; y < static_cast<std::size_t>(n); ++y) {
    occ[y] = detail::finalize(cfg.n_paths, totals[4 * y], totals[4 * y + 1]);
    net[y] = detail::finalize(cfg.n_paths, totals[4 * y + 2], totals[4 * y + 3]);
  }
  return {occ, net};
}

std::pair<EstimateMatrix, EstimateMatrix> mc_occupation_matrix(const GeneratorMatrix& q,
                                                               const SignMatrix& s, const McConfig& cfg) {
  const Index n = q.size();
  EstimateMatrix occ(static_cast<std::size_t>(n));
  EstimateMatrix net(static_cast<std::size_t>(n));
  for (Index start = 0; start < n; ++start) {
    auto [row_occ, row_net] = mc_occupation_from(q, s, start, cfg);
    occ[static_cast<std::size_t>(start)] = std::move(row_occ);
    net[static_cast<std::size_t>(start)] = std::move(row_net);
  }
  return {occ, net};
}

std::vector<McEstimate> mc_hitting_coefficients(const GeneratorMatrix& q, const SignMatrix& s, Index b,
                                                const IndexSet& a_set, const McConfig& cfg) {
  detail::require_config(cfg);
  if (a_set.empty()) throw StructuralError("mc_hitting_coefficients: a_set must be non-empty");
  checked_index_set(a_set, q.size(), "mc_hitting_coefficients");
  for (Index a : a_set) {
    if (a == b) throw StructuralError("mc_hitting_coefficients: start state b must not be in a_set");
  }
  const EmbeddedChain chain = embedded_chain(q);
  require_sign_matrix(s, q.size());

  const std::size_t k = a_set.size();
  auto body = [&](std::size_t item, std::vector<double>& acc) {
    RngStream rng = RngStream::make(cfg.seed, detail::kPathDomain, item);
    const PathRecord path = sample_path(chain, s, b, rng, cfg.max_jumps);
    const auto hit = first_hit(path, a_set);
    if (!hit) return;
    for (std::size_t j = 0; j < k; ++j) {
      if (a_set[j] == hit->state) {
        const double v = hit->sign;
        acc[2 * j] += v;
        acc[2 * j + 1] += v * v;
        break;
      }
    }
  };
  const std::vector<double> totals = detail::accumulate_items(cfg.n_paths, 2 * k, cfg.n_workers, body);

  std::vector<McEstimate> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = detail::finalize(cfg.n_paths, totals[2 * j], totals[2 * j + 1]);
  }
  return out;
}

McEstimate mc_conditional_cov(const GeneratorMatrix& q, const SignMatrix& s, Index b, Index b2,
                              const IndexSet& a_set, const McConfig& cfg) {
  detail::require_config(cfg);
  if (a_set.empty()) throw StructuralError("mc_conditional_cov: a_set must be non-empty");
  checked_index_set(a_set, q.size(), "mc_conditional_cov");
  for (Index a : a_set) {
    if (a == b || a == b2) throw StructuralError("mc_conditional_cov: b and b2 must not be in a_set");
  }
  const EmbeddedChain chain = embedded_chain(q);
  require_sign_matrix(s, q.size());

  auto body = [&](std::size_t item, std::vector<double>& acc) {
    RngStream rng = RngStream::make(cfg.seed, detail::kPathDomain, item);
    const PathRecord path = sample_path(chain, s, b, rng, cfg.max_jumps);
    const auto hit = first_hit(path, a_set);
    const std::size_t stop = hit ? hit->jump_index : path.length();
    double v = 0.0;
    for (std::size_t i = 0; i < stop; ++i) {
      if (path.states[i] == b2) v += path.holding(i) * path.signs[i];
    }
    acc[0] += v;
    acc[1] += v * v;
  };
  const std::vector<double> totals = detail::accumulate_items(cfg.n_paths, 2, cfg.n_workers, body);
  return detail::finalize(cfg.n_paths, totals[0], totals[1]);
}

McEstimate mc_mu_integral(const GeneratorMatrix& q, const SignMatrix& s, Index x, Index y,
                          const PathFunctional& f, const McConfig& cfg) {
  detail::require_config(cfg);
  const EmbeddedChain chain = embedded_chain(q);
  require_sign_matrix(s, q.size());
  const Index n = q.size();
  if (y < 0 || y >= n) throw StructuralError("mc_mu_integral: y out of range");
  const double mass = expected_occupation(q)(x, y);

  auto body = [&](std::size_t item, std::vector<double>& acc) {
    RngStream rng = RngStream::make(cfg.seed, detail::kPathDomain, item);
    const PathRecord path = sample_path(chain, s, x, rng, cfg.max_jumps);
    if (path.states.back() != y) return;
    std::vector<double> occ_here(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < path.length(); ++i) {
      occ_here[static_cast<std::size_t>(path.states[i])] += path.holding(i);
    }
    const double v = f(occ_here, path.signs.back());
    acc[0] += 1.0;
    acc[1] += v;
    acc[2] += v * v;
  };
  const std::vector<double> totals = detail::accumulate_items(cfg.n_paths, 3, cfg.n_workers, body);

  const auto accepted = static_cast<std::size_t>(totals[0]);
  if (accepted == 0) {
    throw InsufficientSamplesError("mc_mu_integral: no path from " + std::to_string(x) + " died out of " +
                                   std::to_string(y) + " in " + std::to_string(cfg.n_paths) +
                                   " paths; raise n_paths");
  }
  McEstimate est = detail::finalize(accepted, totals[1], totals[2]);
  est.mean *= mass;
  est.std_error *= std::abs(mass);
  return est;
}

IsomorphismCheck mc_isomorphism_check(const GeneratorMatrix& q, const SignMatrix& s, Index x, Index y,
                                      const Vector& d, const McConfig& cfg) {
  detail::require_config(cfg);
  const Index n = q.size();
  if (d.size() != n) throw StructuralError("mc_isomorphism_check: weight vector length mismatch");
  if ((d.array() < 0.0).any()) throw StructuralError("mc_isomorphism_check: weights must be nonnegative");

  IsomorphismCheck out;
  out.analytic = gaussian_lhs_analytic(q, s, d, x, y);

  const FieldFactor fac = factor(covariance_direct(q, s));
  const Matrix& lower = fac.lower;

  // Field-only side: mean of Z_x Z_y exp(-sum d_u Z_u^2 / 2).
  {
    auto body = [&](std::size_t item, std::vector<double>& acc) {
      RngStream rng = RngStream::make(cfg.seed, detail::kFieldDomain, item);
      Vector eps(n);
      for (Index u = 0; u < n; ++u) eps(u) = rng.normal();
      const Vector z = lower.template triangularView<Eigen::Lower>() * eps;
      const double v = z(x) * z(y) * std::exp(-0.5 * z.array().square().matrix().dot(d));
      acc[0] += v;
      acc[1] += v * v;
    };
    const std::vector<double> totals = detail::accumulate_items(cfg.n_paths, 2, cfg.n_workers, body);
    out.lhs = detail::finalize(cfg.n_paths, totals[0], totals[1]);
  }

  // Mixed side: path i is paired with its own independent field draw; only
  // paths dying out of y contribute, scaled by the measure mass -Q^{-1}(x,y).
  {
    const EmbeddedChain chain = embedded_chain(q);
    require_sign_matrix(s, n);
    const double mass = expected_occupation(q)(x, y);
    auto body = [&](std::size_t item, std::vector<double>& acc) {
      RngStream rng = RngStream::make(cfg.seed, detail::kPathDomain, item);
      const PathRecord path = sample_path(chain, s, x, rng, cfg.max_jumps);
      if (path.states.back() != y) return;
      double weighted = 0.0;
      for (std::size_t i = 0; i < path.length(); ++i) {
        weighted += d(path.states[i]) * path.holding(i);
      }
      RngStream field_rng = RngStream::make(cfg.seed, detail::kPairedFieldDomain, item);
      Vector eps(n);
      for (Index u = 0; u < n; ++u) eps(u) = field_rng.normal();
      const Vector z = lower.template triangularView<Eigen::Lower>() * eps;
      weighted += 0.5 * z.array().square().matrix().dot(d);
      const double v = std::exp(-weighted) * path.signs.back();
      acc[0] += 1.0;
      acc[1] += v;
      acc[2] += v * v;
    };
    const std::vector<double> totals = detail::accumulate_items(cfg.n_paths, 3, cfg.n_workers, body);
    const auto accepted = static_cast<std::size_t>(totals[0]);
    if (accepted == 0) {
      throw InsufficientSamplesError("mc_isomorphism_check: no path from " + std::to_string(x) +
                                     " died out of " + std::to_string(y) + "; raise n_paths");
    }
    out.rhs = detail::finalize(accepted, totals[1], totals[2]);
    out.rhs.mean *= mass;
    out.rhs.std_error *= std::abs(mass);
  }
  return out;
}

}  // namespace dynkin
