#include "dynkin/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynkin/chain_io.hpp"
#include "dynkin/elimination.hpp"
#include "dynkin/estimators.hpp"
#include "dynkin/field.hpp"
#include "dynkin/ou.hpp"
#include "dynkin/report.hpp"
#include "dynkin/verify.hpp"
#include "dynkin/version.hpp"

namespace dynkin {

namespace {

unsigned default_workers() {
  if (const char* env = std::getenv("DYNKIN_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, delim)) parts.push_back(item);
  return parts;
}

IndexSet parse_state_list(const GeneratorMatrix& gen, const std::string& text) {
  IndexSet out;
  for (const auto& label : split(text, ',')) {
    if (!label.empty()) out.push_back(gen.index_of(label));
  }
  return out;
}

/// "state:value,state:value" with unlisted states defaulting to 0.
Vector parse_weights(const GeneratorMatrix& gen, const std::string& text) {
  Vector d = Vector::Zero(gen.size());
  if (text.empty()) return d;
  for (const auto& part : split(text, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw StructuralError("weight list entries must look like state:value, got '" + part + "'");
    }
    const Index idx = gen.index_of(part.substr(0, colon));
    try {
      d(idx) = std::stod(part.substr(colon + 1));
    } catch (const std::exception&) {
      throw StructuralError("bad weight value in '" + part + "'");
    }
  }
  return d;
}

void emit(const std::string& text, const std::string& output_path, std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(output_path, std::ios::binary | std::ios::trunc);
  if (!file) throw StructuralError("cannot open output file '" + output_path + "'");
  file << text;
}

struct CommonArgs {
  std::string chain_path;
  std::string output_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::size_t n_paths = 100000;
  std::size_t max_jumps = 1000000;
  unsigned workers = default_workers();

  McConfig mc() const { return McConfig{n_paths, seed, max_jumps, workers}; }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_chain) {
  if (needs_chain) {
    cmd->add_option("chain", args.chain_path, "chain definition file (JSON)")->required();
  }
  cmd->add_option("--output", args.output_path, "write the report here instead of stdout");
  cmd->add_option("--format", args.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--paths", args.n_paths, "Monte Carlo paths / samples");
  cmd->add_option("--max-jumps", args.max_jumps, "per-path jump cap");
  cmd->add_option("--workers", args.workers, "worker threads (never affects results)");
}

RunMetadata make_metadata(const CommonArgs& args, const std::string& command) {
  RunMetadata meta;
  meta.tool_version = kVersion;
  meta.command = command;
  meta.chain_digest = args.chain_path.empty() ? "-" : file_digest(args.chain_path);
  meta.seed = args.seed;
  meta.n_paths = args.n_paths;
  return meta;
}

int emit_rows(const CommonArgs& args, const RunMetadata& meta, const std::vector<CheckRow>& rows,
              std::ostream& out) {
  emit(args.format == "csv" ? to_csv(meta, rows) : to_json(meta, rows), args.output_path, out);
  return all_pass(rows) ? 0 : 1;
}

int cmd_validate(const CommonArgs& args, std::ostream& out) {
  const ChainFile chain = load_chain_file(args.chain_path);
  const ValidationReport report = validate_generator(chain.generator);

  nlohmann::json doc;
  doc["metadata"] = {{"tool_version", kVersion},
                     {"command", "validate"},
                     {"chain_digest", file_digest(args.chain_path)},
                     {"seed", args.seed},
                     {"n_paths", args.n_paths}};
  doc["report"] = {{"symmetric_ok", report.symmetric_ok},
                   {"sign_pattern_ok", report.sign_pattern_ok},
                   {"row_sums_ok", report.row_sums_ok},
                   {"irreducible", report.irreducible},
                   {"transience_mode", to_string(report.transience_mode)},
                   {"valid", report.valid()}};
  emit(doc.dump(2) + "\n", args.output_path, out);
  return report.valid() ? 0 : 1;
}

int cmd_covariance(const CommonArgs& args, const std::string& method, double tol, int max_terms,
                   std::ostream& out) {
  const ChainFile chain = load_chain_file(args.chain_path);
  const CovarianceMatrix cov = method == "neumann"
                                   ? covariance_neumann(chain.generator, chain.sign, tol, max_terms)
                                   : covariance_direct(chain.generator, chain.sign);

  const Index n = chain.generator.size();
  if (args.format == "csv") {
    std::ostringstream text;
    text << "# tool_version=" << kVersion << "\n# command=covariance\n# chain_digest="
         << file_digest(args.chain_path) << "\n# seed=" << args.seed << "\n# n_paths="
         << args.n_paths << "\n# method=" << method << "\n";
    text << "state";
    for (Index j = 0; j < n; ++j) text << ',' << chain.generator.label(j);
    text << "\n";
    for (Index i = 0; i < n; ++i) {
      text << chain.generator.label(i);
      for (Index j = 0; j < n; ++j) text << ',' << format_double(cov.sigma(i, j));
      text << "\n";
    }
    emit(text.str(), args.output_path, out);
  } else {
    nlohmann::json doc;
    doc["metadata"] = {{"tool_version", kVersion},
                       {"command", "covariance"},
                       {"chain_digest", file_digest(args.chain_path)},
                       {"seed", args.seed},
                       {"n_paths", args.n_paths},
                       {"method", method}};
    doc["states"] = chain.generator.states;
    doc["sigma"] = nlohmann::json::array();
    for (Index i = 0; i < n; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Index j = 0; j < n; ++j) row.push_back(cov.sigma(i, j));
      doc["sigma"].push_back(std::move(row));
    }
    emit(doc.dump(2) + "\n", args.output_path, out);
  }
  return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& start_label, std::ostream& out) {
  const ChainFile chain = load_chain_file(args.chain_path);
  const Index start = chain.generator.index_of(start_label);

  const Matrix unsigned_ref = expected_occupation(chain.generator);
  const Matrix signed_ref = covariance_direct(chain.generator, chain.sign).sigma;
  const auto [occ, net] = mc_occupation_from(chain.generator, chain.sign, start, args.mc());

  std::vector<CheckRow> rows;
  for (Index y = 0; y < chain.generator.size(); ++y) {
    const auto& o = occ[static_cast<std::size_t>(y)];
    rows.push_back(mc_row("occupation", start_label, chain.generator.label(y), o.mean, o.std_error, o.n,
                          unsigned_ref(start, y)));
  }
  for (Index y = 0; y < chain.generator.size(); ++y) {
    const auto& o = net[static_cast<std::size_t>(y)];
    rows.push_back(mc_row("net_occupation", start_label, chain.generator.label(y), o.mean, o.std_error,
                          o.n, signed_ref(start, y)));
  }

  RunMetadata meta = make_metadata(args, "simulate");
  meta.extra["start"] = start_label;
  return emit_rows(args, meta, rows, out);
}

int cmd_predict(const CommonArgs& args, const std::string& target, const std::string& given,
                const std::string& method, bool trace, std::ostream& out, std::ostream& err) {
  const ChainFile chain = load_chain_file(args.chain_path);
  const Index b = chain.generator.index_of(target);
  const IndexSet a_set = parse_state_list(chain.generator, given);
  const PredictionResult reference = predict_direct(chain.generator, chain.sign, a_set, b);

  // Covariance-domain cross-check for the direct route.
  const Matrix sigma = covariance_direct(chain.generator, chain.sign).sigma;
  const Matrix sigma_aa = submatrix(sigma, a_set, a_set);
  Vector sigma_ba(static_cast<Index>(a_set.size()));
  for (std::size_t j = 0; j < a_set.size(); ++j) sigma_ba(static_cast<Index>(j)) = sigma(b, a_set[j]);
  const Vector textbook = CholeskyFactor(sigma_aa).solve(Matrix(sigma_ba)).col(0);

  std::vector<CheckRow> rows;
  RunMetadata meta = make_metadata(args, "predict");
  meta.extra["target"] = target;
  meta.extra["given"] = given;
  meta.extra["method"] = method;

  if (method == "direct") {
    for (std::size_t j = 0; j < a_set.size(); ++j) {
      rows.push_back(deterministic_row("coefficient", target, chain.generator.label(a_set[j]),
                                       reference.coefficients(static_cast<Index>(j)),
                                       textbook(static_cast<Index>(j)), 1e-10));
    }
  } else if (method == "eliminate") {
    const Matrix m = signed_precision(chain.generator, chain.sign);
    IndexSet keep = a_set;
    keep.push_back(b);
    const IndexSet order = min_degree_order(m, keep);
    if (trace) {
      EliminationState state(m);
      for (Index z : order) {
        state.eliminate(z);
        const auto& step = state.log().back();
        nlohmann::json line{{"removed", chain.generator.label(step.removed)},
                            {"dominance_margin", step.min_dominance_margin}};
        line["fill_in"] = nlohmann::json::array();
        for (const auto& [fx, fy] : step.fill_in) {
          line["fill_in"].push_back({chain.generator.label(fx), chain.generator.label(fy)});
        }
        err << line.dump() << "\n";
      }
    }
    const Vector coefs = predict_by_elimination(m, a_set, b, order);
    for (std::size_t j = 0; j < a_set.size(); ++j) {
      rows.push_back(deterministic_row("coefficient", target, chain.generator.label(a_set[j]),
                                       coefs(static_cast<Index>(j)),
                                       reference.coefficients(static_cast<Index>(j)), 1e-10));
    }
  } else {  // mc
    const auto coefs = mc_hitting_coefficients(chain.generator, chain.sign, b, a_set, args.mc());
    for (std::size_t j = 0; j < a_set.size(); ++j) {
      rows.push_back(mc_row("coefficient", target, chain.generator.label(a_set[j]), coefs[j].mean,
                            coefs[j].std_error, coefs[j].n,
                            reference.coefficients(static_cast<Index>(j))));
    }
  }

  if (args.format == "json") {
    nlohmann::json doc;
    doc["metadata"] = {{"tool_version", kVersion}, {"command", "predict"},
                       {"chain_digest", meta.chain_digest}, {"seed", meta.seed},
                       {"n_paths", meta.n_paths},           {"method", method}};
    doc["target"] = target;
    doc["given"] = nlohmann::json::array();
    for (Index a : a_set) doc["given"].push_back(chain.generator.label(a));
    doc["coefficients"] = nlohmann::json::object();
    for (std::size_t j = 0; j < a_set.size(); ++j) {
      doc["coefficients"][chain.generator.label(a_set[j])] = rows[j].mean;
    }
    if (method == "direct") {
      doc["cond_cov"] = nlohmann::json::array();
      for (Index i = 0; i < reference.cond_cov.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < reference.cond_cov.cols(); ++j) row.push_back(reference.cond_cov(i, j));
        doc["cond_cov"].push_back(std::move(row));
      }
      doc["cond_cov_states"] = nlohmann::json::array();
      for (Index v : reference.others) doc["cond_cov_states"].push_back(chain.generator.label(v));
    }
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
      doc["rows"].push_back({{"name", row.name},
                             {"x", row.x},
                             {"y", row.y},
                             {"mean", row.mean},
                             {"std_error", row.std_error},
                             {"n", row.n},
                             {"analytic", row.analytic},
                             {"z", row.z},
                             {"pass", row.pass}});
    }
    doc["all_pass"] = all_pass(rows);
    emit(doc.dump(2) + "\n", args.output_path, out);
    return all_pass(rows) ? 0 : 1;
  }
  return emit_rows(args, meta, rows, out);
}

int cmd_verify(const CommonArgs& args, const std::string& suite_name, const std::string& target,
               const std::string& given, const std::string& set_a, const std::string& set_b,
               const std::string& set_c, const std::string& x_label, const std::string& y_label,
               const std::string& weights, std::ostream& out) {
  const ChainFile chain = load_chain_file(args.chain_path);
  const Suite suite = parse_suite(suite_name);

  SuiteOptions opts;
  if (!target.empty()) opts.target = chain.generator.index_of(target);
  if (!given.empty()) opts.given = parse_state_list(chain.generator, given);
  if (!set_a.empty()) opts.set_a = parse_state_list(chain.generator, set_a);
  if (!set_b.empty()) opts.set_b = parse_state_list(chain.generator, set_b);
  if (!set_c.empty()) opts.set_c = parse_state_list(chain.generator, set_c);
  if (!x_label.empty()) opts.x = chain.generator.index_of(x_label);
  if (!y_label.empty()) opts.y = chain.generator.index_of(y_label);
  if (!weights.empty()) opts.d = parse_weights(chain.generator, weights);

  const std::vector<CheckRow> rows = run_suite(suite, chain.generator, chain.sign, args.mc(), opts);

  RunMetadata meta = make_metadata(args, "verify");
  meta.extra["suite"] = suite_name;
  if (!target.empty()) meta.extra["target"] = target;
  if (!given.empty()) meta.extra["given"] = given;
  if (!weights.empty()) meta.extra["d"] = weights;
  return emit_rows(args, meta, rows, out);
}

int cmd_ou(const CommonArgs& args, double a, Index n, const std::string& signs_text,
           const std::string& boundary_name, const std::string& noisy_text, Index query,
           std::ostream& out) {
  std::vector<CheckRow> rows;
  RunMetadata meta = make_metadata(args, "ou");
  meta.extra["a"] = format_double(a);
  meta.extra["n"] = std::to_string(n);

  const OuSpec spec{a, n};
  const OuBoundary boundary = boundary_name == "raw" ? OuBoundary::Raw : OuBoundary::Corrected;

  SignMatrix sign = SignMatrix::all_positive(n);
  if (!signs_text.empty()) {
    const auto parts = split(signs_text, ',');
    if (static_cast<Index>(parts.size()) != n - 1) {
      throw StructuralError("--signed needs " + std::to_string(n - 1) + " consecutive signs");
    }
    for (Index i = 0; i + 1 < n; ++i) {
      const auto& tok = parts[static_cast<std::size_t>(i)];
      if (tok != "+" && tok != "-") throw StructuralError("signs must be '+' or '-', got '" + tok + "'");
      sign.s(i, i + 1) = sign.s(i + 1, i) = (tok == "+") ? 1.0 : -1.0;
    }
    meta.extra["signed"] = signs_text;
  }

  // Covariance two ways: recursion propagation vs inverse of the signed
  // precision for the corrected truncation.
  const CovarianceMatrix recursion = signed_ou_covariance(spec, sign);
  const GeneratorMatrix gen = ou_generator(spec, boundary);
  const Matrix inverse_route = spd_inverse(signed_precision(gen, sign));
  rows.push_back(deterministic_row("covariance_route_gap", "", "",
                                   max_abs_diff(recursion.sigma, inverse_route), 0.0,
                                   boundary == OuBoundary::Corrected ? 1e-10 : 1e300));
  meta.extra["boundary"] = boundary_name;

  if (!noisy_text.empty()) {
    const auto colon = noisy_text.find(':');
    if (colon == std::string::npos) {
      throw StructuralError("--noisy must look like \"n1,n2,...:sigma2\"");
    }
    NoisyObsSpec noisy;
    for (const auto& tok : split(noisy_text.substr(0, colon), ',')) {
      try {
        noisy.obs_points.push_back(static_cast<Index>(std::stol(tok)));
      } catch (const std::exception&) {
        throw StructuralError("bad observation point '" + tok + "'");
      }
    }
    try {
      noisy.sigma2 = std::stod(noisy_text.substr(colon + 1));
    } catch (const std::exception&) {
      throw StructuralError("bad sigma2 in --noisy");
    }
    const NoisyPrediction pred = noisy_prediction(noisy, query);
    meta.extra["noisy"] = noisy_text;
    meta.extra["query"] = std::to_string(query);

    for (std::size_t i = 0; i < noisy.obs_points.size(); ++i) {
      const std::string obs = std::to_string(noisy.obs_points[i]);
      rows.push_back(deterministic_row("weight_recurrence", std::to_string(query), obs,
                                       pred.weights_recurrence(static_cast<Index>(i)),
                                       pred.weights_direct(static_cast<Index>(i)), 1e-10));
      rows.push_back(reported_row("weight_single_sequence", std::to_string(query), obs,
                                  pred.weights_single_seq(static_cast<Index>(i)),
                                  pred.weights_direct(static_cast<Index>(i))));
    }
    rows.push_back(reported_row("det_core", "", "", pred.det_lambda, pred.r.back()));
  }

  return emit_rows(args, meta, rows, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"signed-chain / Gaussian-field correspondence toolkit"};
  app.require_subcommand(1);

  CommonArgs common;

  auto* validate = app.add_subcommand("validate", "check a chain definition");
  add_common(validate, common, true);

  auto* covariance = app.add_subcommand("covariance", "field covariance of a chain");
  add_common(covariance, common, true);
  std::string cov_method = "direct";
  double cov_tol = 1e-12;
  int cov_max_terms = 100000;
  covariance->add_option("--method", cov_method)->check(CLI::IsMember({"direct", "neumann"}));
  covariance->add_option("--tol", cov_tol, "series tolerance (neumann)");
  covariance->add_option("--max-terms", cov_max_terms, "series budget (neumann)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo occupation estimates from one state");
  add_common(simulate, common, true);
  std::string start_label;
  simulate->add_option("--start", start_label, "start state label")->required();

  auto* predict = app.add_subcommand("predict", "conditional prediction weights");
  add_common(predict, common, true);
  std::string target, given, predict_method = "direct";
  bool trace = false;
  predict->add_option("--target", target)->required();
  predict->add_option("--given", given, "comma list of observed state labels")->required();
  predict->add_option("--method", predict_method)->check(CLI::IsMember({"direct", "eliminate", "mc"}));
  predict->add_flag("--trace", trace, "emit one elimination-step record per line on stderr");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, common, true);
  std::string suite_name, v_target, v_given, v_set_a, v_set_b, v_set_c, v_x, v_y, v_weights;
  verify->add_option("--suite", suite_name)->required();
  verify->add_option("--target", v_target);
  verify->add_option("--given", v_given);
  verify->add_option("--set-a", v_set_a);
  verify->add_option("--set-b", v_set_b);
  verify->add_option("--set-c", v_set_c);
  verify->add_option("--x", v_x);
  verify->add_option("--y", v_y);
  verify->add_option("--d", v_weights, "per-state weights, \"state:value,...\" (unlisted = 0)");

  auto* ou = app.add_subcommand("ou", "autoregression worked examples");
  add_common(ou, common, false);
  double ou_a = 0.5;
  Index ou_n = 5;
  std::string ou_signs, ou_boundary = "corrected", ou_noisy;
  Index ou_query = 1;
  ou->add_option("--a", ou_a, "autoregression coefficient");
  ou->add_option("--n", ou_n, "truncation length");
  ou->add_option("--signed", ou_signs, "consecutive signs, e.g. \"-,+,-\"");
  ou->add_option("--boundary", ou_boundary)->check(CLI::IsMember({"raw", "corrected"}));
  ou->add_option("--noisy", ou_noisy, "noisy observations \"n1,n2,...:sigma2\"");
  ou->add_option("--query", ou_query, "prediction point for --noisy");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(common, out);
    if (covariance->parsed()) return cmd_covariance(common, cov_method, cov_tol, cov_max_terms, out);
    if (simulate->parsed()) return cmd_simulate(common, start_label, out);
    if (predict->parsed()) return cmd_predict(common, target, given, predict_method, trace, out, err);
    if (verify->parsed()) {
      return cmd_verify(common, suite_name, v_target, v_given, v_set_a, v_set_b, v_set_c, v_x, v_y,
                        v_weights, out);
    }
    if (ou->parsed()) return cmd_ou(common, ou_a, ou_n, ou_signs, ou_boundary, ou_noisy, ou_query, out);
    err << "no subcommand\n";
    return 2;
  } catch (const StructuralError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientSamplesError& e) {
    err << "insufficient samples: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "invalid chain: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dynkin
