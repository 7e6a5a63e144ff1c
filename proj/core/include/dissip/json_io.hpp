#ifndef DISSIP_JSON_IO_HPP
#define DISSIP_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "dissip/grid_function.hpp"
#include "dissip/operator_spec.hpp"
#include "dissip/verdict.hpp"

namespace dissip {

using Json = nlohmann::json;

// Wire conventions: a complex number is [re, im]; a vector is a list of
// complex numbers; a matrix is a list of rows (row-major); a field is a list
// of samples.  Grid functions are flat component-major arrays plus shape
// metadata.

Json complex_to_json(const std::complex<double>& z);
std::complex<double> complex_from_json(const Json& j, const std::string& where);

Json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const Json& j, const std::string& where);

Json vector_to_json(const Eigen::VectorXcd& v);
Eigen::VectorXcd vector_from_json(const Json& j, const std::string& where);

Json grid_function_to_json(const GridFunction& g);
GridFunction grid_function_from_json(const Json& j, const std::string& where = "");

Json spec_to_json(const OperatorSpec& spec);
OperatorSpec spec_from_json(const Json& j);

Json verdict_to_json(const Verdict& v);

/// Loads and validates a spec document; throws ParseError with a JSON-pointer
/// location on malformed input.
OperatorSpec load_spec(const std::string& path);
void save_spec(const OperatorSpec& spec, const std::string& path);

}  // namespace dissip

#endif
