#include "fixenrich/json_io.hpp"

namespace fixenrich {

const Json& require_field(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains(field))
    throw ConfigError("missing required field '" + field + "'");
  return j.at(field);
}

double require_number(const Json& j, const std::string& field) {
  const Json& v = require_field(j, field);
  if (!v.is_number())
    throw ConfigError("field '" + field + "' must be a number");
  return v.get<double>();
}

std::string require_string(const Json& j, const std::string& field) {
  const Json& v = require_field(j, field);
  if (!v.is_string())
    throw ConfigError("field '" + field + "' must be a string");
  return v.get<std::string>();
}

Json to_json(const Vec& v) { return Json(v); }

Vec vec_from_json(const Json& j, const std::string& field) {
  if (!j.is_array())
    throw ConfigError("field '" + field + "' must be an array of numbers");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number())
      throw ConfigError("field '" + field + "' must contain only numbers");
    v.push_back(e.get<double>());
  }
  if (!all_finite(v))
    throw ConfigError("field '" + field + "' must contain finite numbers");
  return v;
}

Json to_json(const DomainC& domain) {
  if (const auto* b = std::get_if<Ball>(&domain.shape))
    return Json{{"variant", "ball"},
                {"center", to_json(b->center)},
                {"radius", b->radius}};
  if (const auto* b = std::get_if<Box>(&domain.shape))
    return Json{
        {"variant", "box"}, {"lo", to_json(b->lo)}, {"hi", to_json(b->hi)}};
  return Json{{"variant", "whole_space"}};
}

DomainC domain_from_json(const Json& j) {
  const std::string variant = require_string(j, "variant");
  if (variant == "whole_space") return whole_space();
  if (variant == "ball")
    return ball(vec_from_json(require_field(j, "center"), "center"),
                require_number(j, "radius"));
  if (variant == "box")
    return box(vec_from_json(require_field(j, "lo"), "lo"),
               vec_from_json(require_field(j, "hi"), "hi"));
  throw ConfigError("field 'variant': unknown domain variant '" + variant +
                    "'");
}

Json to_json(const OperatorSpec& spec) {
  Json j;
  if (const auto* s = std::get_if<ScalarLinear>(&spec.op)) {
    j["variant"] = "scalar_linear";
    j["a"] = s->a;
    j["dim"] = s->dim;
  } else if (const auto* s = std::get_if<AffineSymmetric>(&spec.op)) {
    j["variant"] = "affine_symmetric";
    const std::size_t n = s->q.size();
    Json rows = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
      Json row = Json::array();
      for (std::size_t jj = 0; jj < n; ++jj) row.push_back(s->q(i, jj));
      rows.push_back(std::move(row));
    }
    j["q"] = std::move(rows);
    j["c"] = to_json(s->c);
  } else if (const auto* s = std::get_if<Rotation2D>(&spec.op)) {
    j["variant"] = "rotation_2d";
    j["theta"] = s->theta;
  } else if (const auto* s = std::get_if<Reflection>(&spec.op)) {
    j["variant"] = "reflection";
    j["c"] = to_json(s->c);
  } else {
    j["variant"] = "saturation";
    j["dim"] = std::get<Saturation>(spec.op).dim;
  }
  j["domain"] = to_json(spec.domain);
  return j;
}

OperatorSpec operator_from_json(const Json& j) {
  const std::string variant = require_string(j, "variant");
  DomainC domain = whole_space();
  if (j.contains("domain")) domain = domain_from_json(j.at("domain"));

  if (variant == "scalar_linear") {
    std::size_t dim = 1;
    if (j.contains("dim")) dim = j.at("dim").get<std::size_t>();
    return make_scalar_linear(require_number(j, "a"), dim, std::move(domain));
  }
  if (variant == "affine_symmetric") {
    const Json& rows = require_field(j, "q");
    if (!rows.is_array() || rows.empty())
      throw ConfigError("field 'q' must be a nonempty nested array");
    const std::size_t n = rows.size();
    std::vector<double> entries;
    entries.reserve(n * n);
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != n)
        throw ConfigError("field 'q' must be a square row-major matrix");
      for (const auto& e : row) {
        if (!e.is_number())
          throw ConfigError("field 'q' must contain only numbers");
        entries.push_back(e.get<double>());
      }
    }
    SymMatrix q;
    try {
      q = SymMatrix(n, std::move(entries));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("field 'q': ") + e.what());
    }
    return make_affine_symmetric(
        std::move(q), vec_from_json(require_field(j, "c"), "c"),
        std::move(domain));
  }
  if (variant == "rotation_2d")
    return make_rotation2d(require_number(j, "theta"), std::move(domain));
  if (variant == "reflection")
    return make_reflection(vec_from_json(require_field(j, "c"), "c"),
                           std::move(domain));
  if (variant == "saturation") {
    std::size_t dim = 1;
    if (j.contains("dim")) dim = j.at("dim").get<std::size_t>();
    return make_saturation(dim, std::move(domain));
  }
  throw ConfigError("field 'variant': unknown operator variant '" + variant +
                    "'");
}

Json to_json(const Schedule& schedule) {
  if (const auto* s = std::get_if<ConstantSchedule>(&schedule.rule))
    return Json{{"variant", "constant"}, {"alpha", s->alpha}};
  if (const auto* s = std::get_if<PowerDecaySchedule>(&schedule.rule))
    return Json{{"variant", "power_decay"},
                {"k", s->k},
                {"c", s->c},
                {"p", s->p}};
  const auto& s = std::get<ExplicitSchedule>(schedule.rule);
  return Json{{"variant", "explicit"}, {"alphas", Json(s.alphas)}};
}

Schedule schedule_from_json(const Json& j) {
  const std::string variant = require_string(j, "variant");
  try {
    if (variant == "constant")
      return constant_schedule(require_number(j, "alpha"));
    if (variant == "power_decay")
      return power_decay_schedule(require_number(j, "k"),
                                  require_number(j, "c"),
                                  require_number(j, "p"));
    if (variant == "explicit") {
      const Vec alphas =
          vec_from_json(require_field(j, "alphas"), "alphas");
      return explicit_schedule(alphas);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'schedule': ") + e.what());
  }
  throw ConfigError("field 'variant': unknown schedule variant '" + variant +
                    "'");
}

Json to_json(const CheckReport& report) {
  Json j{{"samples", report.samples},
         {"max_violation", report.max_violation},
         {"passed", report.passed}};
  if (report.witness)
    j["witness"] = Json{{"x", to_json(report.witness->first)},
                        {"y", to_json(report.witness->second)}};
  else
    j["witness"] = nullptr;
  return j;
}

Json to_json(const Certificate& cert) {
  Json j{{"b", cert.b}, {"k", cert.k}, {"lambda", cert.lambda}};
  switch (cert.provenance) {
    case Provenance::Analytic:
      j["provenance"] = "analytic";
      break;
    case Provenance::Empirical:
      j["provenance"] = "empirical";
      break;
    case Provenance::Manual:
      j["provenance"] = "manual";
      break;
  }
  if (cert.sample_count) j["sample_count"] = *cert.sample_count;
  if (cert.seed) j["seed"] = *cert.seed;
  if (cert.fixed_point) j["fixed_point"] = to_json(*cert.fixed_point);
  return j;
}

}  // namespace fixenrich
