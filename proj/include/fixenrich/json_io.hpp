#ifndef FIXENRICH_JSON_IO_HPP
#define FIXENRICH_JSON_IO_HPP

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fixenrich/enrichment.hpp"
#include "fixenrich/iteration.hpp"
#include "fixenrich/operators.hpp"
#include "fixenrich/space.hpp"

namespace fixenrich {

using Json = nlohmann::json;

/// Raised by the parsers below; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Field accessors that throw ConfigError with the field name on failure.
const Json& require_field(const Json& j, const std::string& field);
double require_number(const Json& j, const std::string& field);
std::string require_string(const Json& j, const std::string& field);

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j, const std::string& field);

Json to_json(const DomainC& domain);
DomainC domain_from_json(const Json& j);

Json to_json(const OperatorSpec& spec);
OperatorSpec operator_from_json(const Json& j);

Json to_json(const Schedule& schedule);
Schedule schedule_from_json(const Json& j);

Json to_json(const CheckReport& report);

Json to_json(const Certificate& cert);

}  // namespace fixenrich

#endif  // FIXENRICH_JSON_IO_HPP
