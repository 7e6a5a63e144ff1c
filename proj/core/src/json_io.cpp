#include "dissip/json_io.hpp"

#include <fstream>

#include "dissip/errors.hpp"

namespace dissip {

namespace {

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("expected a number", where);
  return j.get<double>();
}

}  // namespace

Json complex_to_json(const std::complex<double>& z) { return Json::array({z.real(), z.imag()}); }

std::complex<double> complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ParseError("expected [re, im]", where);
  return {number_at(j[0], where + "/0"), number_at(j[1], where + "/1")};
}

Json matrix_to_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a matrix (list of rows)", where);
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ParseError("expected a matrix row", where + "/0");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string wi = where + "/" + std::to_string(i);
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw ParseError("ragged matrix rows", wi);
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = complex_from_json(j[i][k], wi + "/" + std::to_string(k));
    }
  }
  return m;
}

Json vector_to_json(const Eigen::VectorXcd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v[i]));
  return arr;
}

Eigen::VectorXcd vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("expected a vector", where);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i], where + "/" + std::to_string(i));
  }
  return v;
}

Json grid_function_to_json(const GridFunction& g) {
  Json j;
  j["dim_domain"] = g.dim_domain();
  j["dim_range"] = g.dim_range();
  Json origin = Json::array();
  for (int d = 0; d < g.dim_domain(); ++d) origin.push_back(g.origin()[d]);
  j["origin"] = origin;
  j["spacing"] = g.spacing();
  j["extents"] = g.extents();
  j["support_margin"] = g.support_margin();
  Json vals = Json::array();
  for (const Complex& z : g.values()) vals.push_back(complex_to_json(z));
  j["values"] = std::move(vals);
  return j;
}

GridFunction grid_function_from_json(const Json& j, const std::string& where) {
  auto need = [&](const char* key) -> const Json& {
    if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'", where);
    return j.at(key);
  };
  const int dim_domain = need("dim_domain").get<int>();
  const int dim_range = j.value("dim_range", 1);
  const Json& jo = need("origin");
  Eigen::VectorXd origin(static_cast<Eigen::Index>(jo.size()));
  for (std::size_t d = 0; d < jo.size(); ++d) {
    origin[static_cast<Eigen::Index>(d)] = number_at(jo[d], where + "/origin");
  }
  const double spacing = number_at(need("spacing"), where + "/spacing");
  std::vector<int> extents = need("extents").get<std::vector<int>>();
  const int margin = j.value("support_margin", 1);
  const Json& jv = need("values");
  std::vector<Complex> values;
  values.reserve(jv.size());
  for (std::size_t i = 0; i < jv.size(); ++i) {
    values.push_back(complex_from_json(jv[i], where + "/values/" + std::to_string(i)));
  }
  try {
    return GridFunction(dim_domain, dim_range, std::move(origin), spacing, std::move(extents),
                        margin, std::move(values));
  } catch (const DomainError& e) {
    throw ParseError(e.what(), where);
  }
}

namespace {

Json kernel_to_json(const KernelSpec& k) {
  Json j;
  j["dimension"] = k.dimension;
  if (k.kind == KernelSpec::Kind::Fractional) {
    j["kind"] = "fractional";
    j["s"] = k.s;
  } else {
    j["kind"] = "tabulated-radial";
    j["radii"] = k.radii;
    j["density"] = k.density;
  }
  return j;
}

KernelSpec kernel_from_json(const Json& j, const std::string& where) {
  KernelSpec k;
  const std::string kind = j.value("kind", "fractional");
  k.dimension = j.value("dimension", 1);
  if (kind == "fractional") {
    k.kind = KernelSpec::Kind::Fractional;
    if (!j.contains("s")) throw ParseError("fractional kernel requires 's'", where);
    k.s = number_at(j.at("s"), where + "/s");
  } else if (kind == "tabulated-radial") {
    k.kind = KernelSpec::Kind::TabulatedRadial;
    k.radii = j.value("radii", std::vector<double>{});
    k.density = j.value("density", std::vector<double>{});
  } else {
    throw ParseError("unknown kernel kind '" + kind + "'", where + "/kind");
  }
  return k;
}

template <typename T, typename F>
Json field_to_json(const std::vector<T>& field, F&& enc) {
  Json arr = Json::array();
  for (const T& s : field) arr.push_back(enc(s));
  return arr;
}

}  // namespace

Json spec_to_json(const OperatorSpec& spec) {
  Json j;
  if (!spec.id.empty()) j["id"] = spec.id;
  j["kind"] = to_string(spec.kind);
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["coefficient_class"] = to_string(spec.coefficient_class);
  auto put_matrix_field = [&](const char* key, const std::vector<Eigen::MatrixXcd>& f) {
    if (!f.empty()) j[key] = field_to_json(f, matrix_to_json);
  };
  auto put_h_fields = [&](const char* key, const std::vector<std::vector<Eigen::MatrixXcd>>& f) {
    if (f.empty()) return;
    Json arr = Json::array();
    for (const auto& field : f) arr.push_back(field_to_json(field, matrix_to_json));
    j[key] = std::move(arr);
  };
  put_matrix_field("A", spec.A);
  if (!spec.b.empty()) j["b"] = field_to_json(spec.b, vector_to_json);
  if (!spec.c.empty()) j["c"] = field_to_json(spec.c, vector_to_json);
  if (!spec.a.empty()) j["a"] = field_to_json(spec.a, complex_to_json);
  if (!spec.div_b.empty()) j["div_b"] = field_to_json(spec.div_b, complex_to_json);
  if (!spec.div_c.empty()) j["div_c"] = field_to_json(spec.div_c, complex_to_json);
  put_h_fields("B", spec.Bh);
  put_h_fields("C", spec.Ch);
  put_matrix_field("D", spec.D);
  put_matrix_field("dB", spec.dB);
  put_matrix_field("dC", spec.dC);
  put_h_fields("Ah", spec.Ah);
  if (!spec.nu.empty()) j["nu"] = spec.nu;
  if (spec.kernel) j["kernel"] = kernel_to_json(*spec.kernel);
  if (!spec.a_oblique.empty()) j["a_oblique"] = field_to_json(spec.a_oblique, vector_to_json);
  if (!spec.div_a_oblique.empty()) j["div_a_oblique"] = field_to_json(spec.div_a_oblique, complex_to_json);
  if (spec.grid) {
    Json g;
    Json origin = Json::array();
    for (Eigen::Index d = 0; d < spec.grid->origin.size(); ++d) origin.push_back(spec.grid->origin[d]);
    g["origin"] = origin;
    g["spacing"] = spec.grid->spacing;
    g["extents"] = spec.grid->extents;
    j["grid"] = std::move(g);
  }
  return j;
}

OperatorSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("spec document must be a JSON object", "/");
  OperatorSpec spec;
  spec.id = j.value("id", "");
  if (!j.contains("kind")) throw ParseError("missing key 'kind'", "/kind");
  spec.kind = operator_kind_from_string(j.at("kind").get<std::string>());
  if (!j.contains("n")) throw ParseError("missing key 'n'", "/n");
  spec.n = j.at("n").get<int>();
  spec.m = j.value("m", 1);
  spec.coefficient_class =
      coefficient_class_from_string(j.value("coefficient_class", std::string("constant")));

  auto get_matrix_field = [&](const char* key, std::vector<Eigen::MatrixXcd>& out) {
    if (!j.contains(key)) return;
    const Json& f = j.at(key);
    const std::string where = std::string("/") + key;
    if (!f.is_array()) throw ParseError("expected a field (list of samples)", where);
    for (std::size_t i = 0; i < f.size(); ++i) {
      out.push_back(matrix_from_json(f[i], where + "/" + std::to_string(i)));
    }
  };
  auto get_vector_field = [&](const char* key, std::vector<Eigen::VectorXcd>& out) {
    if (!j.contains(key)) return;
    const Json& f = j.at(key);
    const std::string where = std::string("/") + key;
    if (!f.is_array()) throw ParseError("expected a field (list of samples)", where);
    for (std::size_t i = 0; i < f.size(); ++i) {
      out.push_back(vector_from_json(f[i], where + "/" + std::to_string(i)));
    }
  };
  auto get_scalar_field = [&](const char* key, std::vector<std::complex<double>>& out) {
    if (!j.contains(key)) return;
    const Json& f = j.at(key);
    const std::string where = std::string("/") + key;
    if (!f.is_array()) throw ParseError("expected a field (list of samples)", where);
    for (std::size_t i = 0; i < f.size(); ++i) {
      out.push_back(complex_from_json(f[i], where + "/" + std::to_string(i)));
    }
  };
  auto get_h_fields = [&](const char* key, std::vector<std::vector<Eigen::MatrixXcd>>& out) {
    if (!j.contains(key)) return;
    const Json& f = j.at(key);
    const std::string where = std::string("/") + key;
    if (!f.is_array()) throw ParseError("expected per-direction fields", where);
    for (std::size_t h = 0; h < f.size(); ++h) {
      const std::string wh = where + "/" + std::to_string(h);
      if (!f[h].is_array()) throw ParseError("expected a field (list of samples)", wh);
      std::vector<Eigen::MatrixXcd> field;
      for (std::size_t i = 0; i < f[h].size(); ++i) {
        field.push_back(matrix_from_json(f[h][i], wh + "/" + std::to_string(i)));
      }
      out.push_back(std::move(field));
    }
  };

  get_matrix_field("A", spec.A);
  get_vector_field("b", spec.b);
  get_vector_field("c", spec.c);
  get_scalar_field("a", spec.a);
  get_scalar_field("div_b", spec.div_b);
  get_scalar_field("div_c", spec.div_c);
  get_h_fields("B", spec.Bh);
  get_h_fields("C", spec.Ch);
  get_matrix_field("D", spec.D);
  get_matrix_field("dB", spec.dB);
  get_matrix_field("dC", spec.dC);
  get_h_fields("Ah", spec.Ah);
  if (j.contains("nu")) spec.nu = j.at("nu").get<std::vector<double>>();
  if (j.contains("kernel")) spec.kernel = kernel_from_json(j.at("kernel"), "/kernel");
  get_vector_field("a_oblique", spec.a_oblique);
  get_scalar_field("div_a_oblique", spec.div_a_oblique);
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    FieldGrid fg;
    const Json& jo = g.at("origin");
    fg.origin.resize(static_cast<Eigen::Index>(jo.size()));
    for (std::size_t d = 0; d < jo.size(); ++d) {
      fg.origin[static_cast<Eigen::Index>(d)] = number_at(jo[d], "/grid/origin");
    }
    fg.spacing = number_at(g.at("spacing"), "/grid/spacing");
    fg.extents = g.at("extents").get<std::vector<int>>();
    spec.grid = std::move(fg);
  }

  try {
    spec.validate();
  } catch (const Error& e) {
    throw ParseError(e.what(), "/");
  }
  return spec;
}

Json verdict_to_json(const Verdict& v) {
  Json j;
  j["status"] = to_string(v.status);
  j["criterion_id"] = v.criterion_id;
  j["margin"] = v.margin;
  if (v.certificate) {
    Json c;
    c["kind"] = v.certificate->kind;
    c["xi"] = v.certificate->xi;
    if (!v.certificate->eta.empty()) c["eta"] = v.certificate->eta;
    if (v.certificate->sample_index >= 0) c["sample_index"] = v.certificate->sample_index;
    if (v.certificate->direction >= 0) c["direction"] = v.certificate->direction;
    c["value"] = v.certificate->value;
    j["certificate"] = std::move(c);
  } else {
    j["certificate"] = nullptr;
  }
  if (!v.details.empty()) j["details"] = v.details;
  return j;
}

OperatorSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), "/");
  }
  return spec_from_json(j);
}

void save_spec(const OperatorSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write spec file '" + path + "'");
  out << spec_to_json(spec).dump(2) << "\n";
}

}  // namespace dissip
