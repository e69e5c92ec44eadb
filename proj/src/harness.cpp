#include "fixenrich/harness.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fixenrich/acceptance.hpp"

namespace fixenrich {

namespace fs = std::filesystem;

double resolve_check_tol() {
  if (const char* env = std::getenv("FIXENRICH_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0') return v;
    std::cerr << "warning: ignoring unparsable FIXENRICH_TOL='" << env
              << "'\n";
  }
  return kDefaultCheckTol;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open '" + tmp.string() +
                               "' for writing");
    out << content;
    if (!out)
      throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Experiment parsing

namespace {

std::uint64_t require_uint(const Json& j, const std::string& field) {
  const Json& v = require_field(j, field);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("field '" + field + "' must be a nonnegative integer");
}

bool safe_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

void parse_enrichment(const Json& j, ExperimentConfig& config) {
  const Json& e = require_field(j, "enrichment");
  if (e.is_string()) {
    const std::string mode = e.get<std::string>();
    if (mode == "oracle")
      config.mode = EnrichmentMode::Oracle;
    else if (mode == "estimate")
      config.mode = EnrichmentMode::Estimate;
    else
      throw ConfigError("field 'enrichment': unknown mode '" + mode + "'");
    config.b = 0.0;
    return;
  }
  if (!e.is_object())
    throw ConfigError("field 'enrichment' must be a string or an object");
  std::string mode = "manual";
  if (e.contains("mode")) mode = require_string(e, "mode");
  if (mode == "manual") {
    config.mode = EnrichmentMode::Manual;
    config.b = require_number(e, "b");
    config.k = require_number(e, "k");
  } else if (mode == "oracle") {
    config.mode = EnrichmentMode::Oracle;
    config.b = e.contains("b") ? require_number(e, "b") : 0.0;
  } else if (mode == "estimate") {
    config.mode = EnrichmentMode::Estimate;
    config.b = e.contains("b") ? require_number(e, "b") : 0.0;
  } else {
    throw ConfigError("field 'enrichment.mode': unknown mode '" + mode + "'");
  }
}

void parse_scheme(const Json& j, ExperimentConfig& config) {
  const Json& s = require_field(j, "scheme");
  const std::string type = require_string(s, "type");
  if (type == "krasnoselskij") {
    config.scheme = KrasnoselskijScheme{require_number(s, "gamma")};
  } else if (type == "mann") {
    MannScheme scheme;
    scheme.schedule = schedule_from_json(require_field(s, "schedule"));
    if (s.contains("statement_form"))
      scheme.statement_form = s.at("statement_form").get<bool>();
    config.scheme = std::move(scheme);
  } else {
    throw ConfigError("field 'scheme.type': unknown scheme '" + type + "'");
  }
}

}  // namespace

ExperimentConfig parse_experiment(const Json& j) {
  ExperimentConfig config;
  config.name = require_string(j, "name");
  if (!safe_name(config.name))
    throw ConfigError(
        "field 'name' must be nonempty and use only [A-Za-z0-9._-]");
  try {
    config.op = operator_from_json(require_field(j, "operator"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'operator': ") + e.what());
  }
  parse_enrichment(j, config);
  parse_scheme(j, config);
  config.x0 = vec_from_json(require_field(j, "x0"), "x0");

  if (j.contains("max_iter"))
    config.max_iter = static_cast<std::size_t>(require_uint(j, "max_iter"));
  if (j.contains("tol_residual"))
    config.tol_residual = require_number(j, "tol_residual");
  if (j.contains("divergence_bound"))
    config.divergence_bound = require_number(j, "divergence_bound");
  config.seed = require_uint(j, "seed");
  if (j.contains("sample_count"))
    config.sample_count =
        static_cast<std::size_t>(require_uint(j, "sample_count"));
  if (j.contains("record_iterates"))
    config.record_iterates = j.at("record_iterates").get<bool>();
  if (j.contains("csv_coordinates"))
    config.csv_coordinates = j.at("csv_coordinates").get<bool>();
  return config;
}

ExperimentConfig load_experiment(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path.string() +
                      "' is not valid JSON: " + e.what());
  }
  return parse_experiment(j);
}

// ---------------------------------------------------------------------------
// Certificate resolution

Certificate resolve_certificate(const ExperimentConfig& config) {
  Certificate cert;
  switch (config.mode) {
    case EnrichmentMode::Manual:
      try {
        cert = make_certificate(config.b, config.k, Provenance::Manual);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field 'enrichment': ") + e.what());
      }
      break;
    case EnrichmentMode::Oracle: {
      if (config.b < 0.0)
        throw ConfigError("field 'enrichment.b' must be >= 0");
      const auto k = oracle_min_k(config.op, config.b);
      if (k) {
        cert = make_certificate(config.b, *k, Provenance::Analytic);
      } else if (analytic_nonexpansive(config.op)) {
        // No closed-form minimal k; nonexpansiveness gives k = 0.
        cert = make_certificate(config.b, 0.0, Provenance::Analytic);
      } else {
        throw ConfigError("field 'enrichment': operator '" +
                          config.op.label() +
                          "' admits no analytic certificate at b = " +
                          format_double(config.b));
      }
      break;
    }
    case EnrichmentMode::Estimate: {
      if (config.b < 0.0)
        throw ConfigError("field 'enrichment.b' must be >= 0");
      const PairList pairs =
          sample_pairs_for(config.op, config.sample_count, config.seed);
      double khat = 0.0;
      try {
        khat = estimate_min_k(config.op, config.b, pairs);
      } catch (const NotEnrichedSpcError& e) {
        throw ConfigError(std::string("field 'enrichment': ") + e.what());
      }
      if (khat >= 1.0)
        throw ConfigError("field 'enrichment': estimated k = " +
                          format_double(khat) + " is not < 1");
      cert = make_certificate(config.b, khat, Provenance::Empirical);
      cert.sample_count = config.sample_count;
      cert.seed = config.seed;
      break;
    }
  }
  cert.fixed_point = known_fixed_points(config.op);
  return cert;
}

// ---------------------------------------------------------------------------
// Experiment run with audits

namespace {

struct CheckRow {
  std::string name;
  CheckReport report;
};

std::vector<CheckRow> standard_checks(const OperatorSpec& op,
                                      const Certificate& cert,
                                      const PairList& pairs,
                                      double check_tol) {
  std::vector<CheckRow> rows;
  rows.push_back({"enriched_spc",
                  check_enriched_spc(op, cert.b, cert.k, pairs, check_tol)});
  rows.push_back(
      {"spc_averaged",
       check_spc(averaged(op, cert.lambda), cert.k, pairs, check_tol)});
  rows.push_back(
      {"cocoercive_residual",
       check_cocoercive(residual(op, cert.lambda), cert.k, pairs, check_tol)});
  const double t = 0.5 * (1.0 - cert.k);
  rows.push_back(
      {"relaxed_nonexpansive",
       check_nonexpansive(relaxed(op, cert.lambda, t), pairs, check_tol)});
  return rows;
}

bool steps_settled(const std::vector<double>& steps) {
  if (steps.size() < 2) return true;
  if (steps.back() > steps.front() + 1e-9) return false;
  if (steps.size() >= 10) {
    const std::size_t decile = steps.size() / 10;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < decile; ++i) {
      first += steps[i];
      last += steps[steps.size() - decile + i];
    }
    if (last > first + 1e-9 * static_cast<double>(decile)) return false;
  }
  return true;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, double check_tol) {
  const auto t_start = std::chrono::steady_clock::now();

  RunOutcome out;
  out.certificate = resolve_certificate(config);

  IterationConfig ic;
  ic.op = config.op;
  ic.certificate = out.certificate;
  ic.scheme = config.scheme;
  ic.x0 = config.x0;
  ic.max_iter = config.max_iter;
  ic.tol_residual = config.tol_residual;
  ic.divergence_bound = config.divergence_bound;
  ic.record_iterates = config.record_iterates || config.csv_coordinates;

  const bool is_mann = std::holds_alternative<MannScheme>(config.scheme);
  try {
    out.trace = is_mann ? mann(ic) : krasnoselskij(ic);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
  const Trace& trace = out.trace;

  Json audits;
  bool all_passed = true;

  if (is_mann && trace.reference_p) {
    const Vec& p = *trace.reference_p;
    const double d0 = dist(config.x0, p);
    const double fejer = fejer_audit(trace, p, out.certificate.k);
    const double fejer_bound = 1e-9 * (1.0 + d0 * d0);
    audits["fejer_max_deficit"] = fejer;
    audits["fejer_bound"] = fejer_bound;
    all_passed &= fejer <= fejer_bound;

    const double sum = summability_lhs(trace, out.certificate.k);
    const double sum_bound = d0 * d0 + 1e-6;
    audits["summability_lhs"] = sum;
    audits["summability_bound"] = sum_bound;
    all_passed &= sum <= sum_bound;

    const auto ratio = residual_monotonicity_audit(trace);
    audits["residual_max_ratio"] = ratio ? Json(*ratio) : Json(nullptr);
    if (ratio) all_passed &= *ratio <= 1.0 + 1e-9;
  } else {
    const std::string reason =
        is_mann ? "skipped(no unique reference fixed point)"
                : "skipped(krasnoselskij scheme)";
    audits["fejer_max_deficit"] = reason;
    audits["summability_lhs"] = reason;
    audits["residual_max_ratio"] = reason;
  }

  if (trace.status == TraceStatus::Converged) {
    const bool settled = steps_settled(asymptotic_regularity_audit(trace));
    audits["asymptotic_regularity"] = settled ? "pass" : "fail";
    all_passed &= settled;

    const auto cluster = cluster_fixed_point_check(
        trace, config.op, out.certificate.lambda, config.tol_residual);
    audits["cluster_fixed_point"] = cluster.passed ? "pass" : "fail";
    audits["cluster_residual"] = cluster.residual_at_final;
    all_passed &= cluster.passed;
  } else {
    audits["asymptotic_regularity"] = "skipped(trace did not converge)";
    audits["cluster_fixed_point"] = "skipped(trace did not converge)";
  }

  const PairList pairs =
      sample_pairs_for(config.op, config.sample_count, config.seed);
  Json check_rows = Json::array();
  for (const auto& row :
       standard_checks(config.op, out.certificate, pairs, check_tol)) {
    check_rows.push_back(Json{{"name", row.name},
                              {"passed", row.report.passed},
                              {"max_violation", row.report.max_violation}});
    all_passed &= row.report.passed;
  }
  audits["checks"] = std::move(check_rows);
  audits["all_passed"] = all_passed;

  if (trace.status == TraceStatus::Diverged)
    out.exit_code = kExitDiverged;
  else if (trace.status == TraceStatus::MaxIterReached || !all_passed)
    out.exit_code = kExitAudit;
  else
    out.exit_code = kExitOk;

  const double wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t_start)
          .count();

  out.summary = Json{
      {"name", config.name},
      {"operator", to_json(config.op)},
      {"operator_label", config.op.label()},
      {"scheme", is_mann ? "mann" : "krasnoselskij"},
      {"certificate", to_json(out.certificate)},
      {"status", to_string(trace.status)},
      {"iterations", trace.stop_index},
      {"final_residual", trace.records.back().beta},
      {"gamma_warning", trace.gamma_warning},
      {"boundedness_hypothesis_met", config.op.domain.bounded()},
      {"audits", std::move(audits)},
      {"exit_code", out.exit_code},
      {"wall_time_ms", wall_ms},
  };
  return out;
}

// ---------------------------------------------------------------------------
// Trace CSV

namespace {

std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string bracketed(const Vec& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  s += ']';
  return s;
}

}  // namespace

std::string render_trace_csv(const Trace& trace, bool coordinates) {
  std::string out = "n,beta,step,dist_to_p,alpha,fejer_gap,delta";
  if (coordinates) out += ",x";
  out += '\n';
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& rec = trace.records[i];
    out += std::to_string(rec.n);
    out += ',';
    out += format_double(rec.beta);
    out += ',';
    out += format_double(rec.step);
    out += ',';
    out += cell(rec.dist_to_p);
    out += ',';
    out += cell(rec.alpha);
    out += ',';
    out += cell(rec.fejer_gap);
    out += ',';
    out += cell(rec.delta);
    if (coordinates) {
      out += ',';
      if (i < trace.iterates.size()) out += bracketed(trace.iterates[i]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_run(const fs::path& config_path, const fs::path& out_dir,
            double check_tol) {
  try {
    const ExperimentConfig config = load_experiment(config_path);
    const RunOutcome outcome = run_experiment(config, check_tol);
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / (config.name + ".trace.csv"),
                      render_trace_csv(outcome.trace, config.csv_coordinates));
    write_file_atomic(out_dir / (config.name + ".summary.json"),
                      outcome.summary.dump(2) + "\n");
    std::cout << config.name << ": "
              << outcome.summary.at("status").get<std::string>()
              << " after " << outcome.trace.stop_index
              << " iterations, final residual "
              << format_double(outcome.trace.records.back().beta)
              << " (exit " << outcome.exit_code << ")\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_check(const CheckOptions& options, double check_tol) {
  Json out;
  out["operator"] = to_json(options.op);
  out["b"] = options.b;
  out["samples"] = options.samples;
  out["seed"] = options.seed;
  out["check_tol"] = check_tol;
  try {
    const PairList pairs =
        sample_pairs_for(options.op, options.samples, options.seed);
    double k;
    if (options.k) {
      k = *options.k;
      out["k_source"] = "given";
    } else {
      k = estimate_min_k(options.op, options.b, pairs, check_tol);
      out["k_source"] = "estimated";
    }
    out["k"] = k;
    const double lambda = lambda_of_b(options.b);
    out["lambda"] = lambda;

    Certificate cert = make_certificate(options.b, k, Provenance::Manual);
    bool all_passed = true;
    Json checks;
    for (const auto& row :
         standard_checks(options.op, cert, pairs, check_tol)) {
      checks[row.name] = to_json(row.report);
      all_passed &= row.report.passed;
    }
    checks["relaxed_nonexpansive"]["t"] = 0.5 * (1.0 - k);
    out["checks"] = std::move(checks);
    out["all_passed"] = all_passed;
    std::cout << out.dump(2) << '\n';
    return all_passed ? kExitOk : kExitAudit;
  } catch (const NotEnrichedSpcError& e) {
    out["error"] = e.what();
    out["witness"] = Json{{"x", to_json(e.witness_x)},
                          {"y", to_json(e.witness_y)}};
    std::cout << out.dump(2) << '\n';
    return kExitAudit;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_suite(const fs::path& suite_dir, const fs::path& out_dir,
              double check_tol) {
  AcceptanceOptions options;
  options.suite_dir = suite_dir;
  options.out_dir = out_dir;
  options.check_tol = check_tol;
  const auto results = run_acceptance(options);
  bool all_passed = true;
  for (const auto& r : results) {
    std::printf("C%02d %-4s %s%s%s\n", r.id, r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.empty() ? "" : " -- ",
                r.detail.c_str());
    all_passed &= r.passed;
  }
  std::printf("%s (%zu criteria)\n", all_passed ? "ALL PASS" : "FAILURES",
              results.size());
  return all_passed ? kExitOk : kExitAudit;
}

// ---------------------------------------------------------------------------
// Operator flag mini-grammar

namespace {

double parse_double_token(const std::string& token, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ConfigError("flag '" + what + "': cannot parse number '" + token +
                      "'");
  }
  if (used != token.size())
    throw ConfigError("flag '" + what + "': trailing characters in '" + token +
                      "'");
  return v;
}

Vec parse_vec_token(const std::string& token, const std::string& what) {
  Vec v;
  std::stringstream ss(token);
  std::string part;
  while (std::getline(ss, part, ','))
    v.push_back(parse_double_token(part, what));
  if (v.empty()) throw ConfigError("flag '" + what + "': empty vector");
  return v;
}

}  // namespace

OperatorSpec parse_operator_flag(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);

  if (head == "identity") return make_scalar_linear(1.0);
  if (head == "scalar") return make_scalar_linear(parse_double_token(tail, "scalar"));
  if (head == "rotation") return make_rotation2d(parse_double_token(tail, "rotation"));
  if (head == "reflection")
    return make_reflection(parse_vec_token(tail, "reflection"));
  if (head == "saturation") {
    std::size_t dim = 1;
    if (!tail.empty())
      dim = static_cast<std::size_t>(parse_double_token(tail, "saturation"));
    return make_saturation(dim);
  }
  if (head == "matrix") {
    std::ifstream in(tail);
    if (!in) throw ConfigError("flag 'matrix': cannot read '" + tail + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("flag 'matrix': '" + tail +
                        "' is not valid JSON: " + e.what());
    }
    if (!j.contains("variant")) j["variant"] = "affine_symmetric";
    return operator_from_json(j);
  }
  throw ConfigError("unknown operator spec '" + text + "'");
}

}  // namespace fixenrich
