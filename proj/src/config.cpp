#include "insulation/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "insulation/error.hpp"
#include "json.hpp"

namespace insulation {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::SchemaError, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "must be finite");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema_error(path, "expected true or false");
  return j.get<bool>();
}

/// Object view that remembers which keys were read and rejects the rest.
class Object {
 public:
  Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) schema_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) schema_error(join(path_, key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T, typename F>
void read(Object& o, const std::string& key, T& out, F convert) {
  if (const json* j = o.get(key)) out = convert(*j, o.path(key));
}

void parse_domain(const json& j, RunConfig& c) {
  Object o(j, "domain");
  const json* vertices = o.get("vertices");
  if (!vertices) schema_error("domain.vertices", "required");
  if (!vertices->is_array()) schema_error("domain.vertices", "expected an array of [x, y] pairs");
  for (std::size_t i = 0; i < vertices->size(); ++i) {
    const std::string p = "domain.vertices[" + std::to_string(i) + "]";
    const json& v = (*vertices)[i];
    if (!v.is_array() || v.size() != 2) schema_error(p, "expected [x, y]");
    c.vertices.push_back({as_number(v[0], p + "[0]"), as_number(v[1], p + "[1]")});
  }
  const json* facets = o.get("facets");
  if (!facets) schema_error("domain.facets", "required");
  if (!facets->is_array()) schema_error("domain.facets", "expected an array");
  for (std::size_t i = 0; i < facets->size(); ++i) {
    const std::string p = "domain.facets[" + std::to_string(i) + "]";
    Object fo((*facets)[i], p);
    FacetSpec spec;
    const json* fv = fo.get("vertices");
    if (!fv || !fv->is_array() || fv->size() != 2) schema_error(p + ".vertices", "expected [i, j]");
    spec.vertices = {as_int((*fv)[0], p + ".vertices[0]"), as_int((*fv)[1], p + ".vertices[1]")};
    const json* label = fo.get("label");
    if (!label) schema_error(p + ".label", "required");
    try {
      spec.label = facet_label_from_string(as_string(*label, p + ".label"));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnknownLabel) throw;
      throw Error(ErrorKind::UnknownLabel, p + ".label: '" + label->get<std::string>() + "'");
    }
    read(fo, "value", spec.value, as_number);
    fo.finish();
    c.facets.push_back(spec);
  }
  o.finish();
}

void parse_solver(const json& j, RunConfig& c) {
  Object o(j, "solver");
  SolverConfig& s = c.solver;
  read(o, "h", s.h, as_number);
  if (!(s.h > 0.0)) schema_error("solver.h", "must be positive");
  read(o, "n_t", s.n_t, as_int);
  if (s.n_t < 1) schema_error("solver.n_t", "must be at least 1");
  if (const json* e = o.get("epsilon")) {
    s.epsilon = as_number(*e, "solver.epsilon");
    if (!(*s.epsilon > 0.0)) schema_error("solver.epsilon", "must be positive");
  }
  if (const json* list = o.get("epsilon_list")) {
    if (!list->is_array()) schema_error("solver.epsilon_list", "expected an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      const double v = as_number((*list)[i], "solver.epsilon_list[" + std::to_string(i) + "]");
      if (!(v > 0.0)) schema_error("solver.epsilon_list", "entries must be positive");
      if (!s.epsilon_list.empty() && !(v < s.epsilon_list.back())) {
        schema_error("solver.epsilon_list", "must be strictly decreasing");
      }
      s.epsilon_list.push_back(v);
    }
  }
  read(o, "tol", s.tol, as_number);
  if (!(s.tol > 0.0)) schema_error("solver.tol", "must be positive");
  read(o, "max_iter", s.max_iter, as_int);
  if (s.max_iter < 0) schema_error("solver.max_iter", "must be >= 0");
  if (const json* m = o.get("method")) {
    try {
      s.method = reduced_method_from_string(as_string(*m, "solver.method"));
    } catch (const Error&) {
      schema_error("solver.method", "expected prox_grad or alternating");
    }
  }
  if (const json* q = o.get("robin_quadrature")) {
    try {
      s.robin_quadrature = robin_quadrature_from_string(as_string(*q, "solver.robin_quadrature"));
    } catch (const Error&) {
      schema_error("solver.robin_quadrature", "expected consistent or lumped");
    }
  }
  read(o, "refine_check", s.refine_check, as_bool);
  o.finish();
}

RunConfig parse_document(const json& doc, std::string_view command) {
  RunConfig c;
  Object root(doc, "");
  const json* domain = root.get("domain");
  if (!domain) schema_error("domain", "required");
  parse_domain(*domain, c);

  if (const json* mode = root.get("field_mode")) {
    try {
      c.field_mode = field_mode_from_string(as_string(*mode, "field_mode"));
    } catch (const Error&) {
      schema_error("field_mode", "expected bisector or facet_normal");
    }
  }
  if (const json* dist = root.get("distribution")) {
    Object o(*dist, "distribution");
    read(o, "kind", c.distribution.kind, as_string);
    read(o, "value", c.distribution.value, as_number);
    read(o, "path", c.distribution.path, as_string);
    o.finish();
    const auto& kind = c.distribution.kind;
    if (kind != "constant" && kind != "nodal_csv" && kind != "reconstruct") {
      schema_error("distribution.kind", "expected constant, nodal_csv or reconstruct");
    }
    if (kind == "constant" && !(c.distribution.value >= 0.0)) schema_error("distribution.value", "must be >= 0");
    if (kind == "nodal_csv" && c.distribution.path.empty()) schema_error("distribution.path", "required for nodal_csv");
  }
  if (const json* m = root.get("mass")) {
    c.mass = as_number(*m, "mass");
    if (!(*c.mass > 0.0)) schema_error("mass", "must be positive");
  }
  read(root, "d_min", c.d_min, as_number);
  if (!(c.d_min >= 0.0)) schema_error("d_min", "must be >= 0");
  if (const json* data = root.get("data")) {
    Object o(*data, "data");
    read(o, "f", c.f, as_number);
    read(o, "f_csv", c.f_csv, as_string);
    o.finish();
  }
  read(root, "input_field", c.input_field, as_string);
  if (const json* solver = root.get("solver")) parse_solver(*solver, c);
  if (const json* leb = root.get("lebesgue")) {
    Object o(*leb, "lebesgue");
    read(o, "p", c.lebesgue.p, as_int);
    if (c.lebesgue.p != 1 && c.lebesgue.p != 2) schema_error("lebesgue.p", "must be 1 or 2");
    read(o, "a", c.lebesgue.a, as_number);
    if (!(c.lebesgue.a > 0.0)) schema_error("lebesgue.a", "must be positive");
    read(o, "field", c.lebesgue.field, as_string);
    const auto& f = c.lebesgue.field;
    if (f != "ones" && f != "limit_extension" && f != "eps_solution") {
      schema_error("lebesgue.field", "expected ones, limit_extension or eps_solution");
    }
    o.finish();
  }
  if (const json* out = root.get("output")) {
    Object o(*out, "output");
    read(o, "vtk", c.output.vtk, as_string);
    read(o, "boundary_vtk", c.output.boundary_vtk, as_string);
    read(o, "csv", c.output.csv, as_string);
    read(o, "report", c.output.report, as_string);
    o.finish();
  }
  root.finish();

  const bool needs_mass = command == "solve-reduced" || command == "reconstruct" ||
                          (c.distribution.kind == "reconstruct" && !command.empty() && command != "solve-reduced");
  if (needs_mass && !c.mass) schema_error("mass", "required by " + std::string(command));
  if (command == "solve-eps" && !c.solver.epsilon) schema_error("solver.epsilon", "required by solve-eps");
  if ((command == "gamma-sweep" || command == "check-lebesgue") && c.solver.epsilon_list.empty()) {
    schema_error("solver.epsilon_list", "required by " + std::string(command));
  }
  return c;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, std::string("<root>: invalid JSON: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view command) {
  return parse_document(parse_json(text), command);
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides, std::string_view command) {
  json doc = parse_json(text);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::SchemaError, "--set " + item + ": expected key=value");
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw Error(ErrorKind::SchemaError, key + ": empty key segment");
      if (node->is_array()) {
        std::size_t index = 0;
        const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
        if (ec != std::errc() || end != part.data() + part.size() || index >= node->size()) {
          throw Error(ErrorKind::SchemaError, key + ": no element '" + part + "'");
        }
        node = &(*node)[index];
      } else if (node->is_object() || node->is_null()) {
        node = &(*node)[part];
      } else {
        throw Error(ErrorKind::SchemaError, key + ": parent is not an object");
      }
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    json value = json::parse(raw, nullptr, false);
    *node = value.is_discarded() ? json(raw) : value;
  }
  return parse_document(doc, command);
}

std::string serialize_config(const RunConfig& c) {
  json doc;
  json vertices = json::array();
  for (const auto& v : c.vertices) vertices.push_back({v.x, v.y});
  json facets = json::array();
  for (const auto& f : c.facets) {
    facets.push_back({{"vertices", {f.vertices[0], f.vertices[1]}},
                      {"label", std::string(to_string(f.label))},
                      {"value", f.value}});
  }
  doc["domain"] = {{"vertices", vertices}, {"facets", facets}};
  doc["field_mode"] = std::string(to_string(c.field_mode));
  doc["distribution"] = {{"kind", c.distribution.kind}, {"value", c.distribution.value}, {"path", c.distribution.path}};
  if (c.mass) doc["mass"] = *c.mass;
  doc["d_min"] = c.d_min;
  doc["data"] = {{"f", c.f}, {"f_csv", c.f_csv}};
  doc["input_field"] = c.input_field;
  json solver = {{"h", c.solver.h},
                 {"n_t", c.solver.n_t},
                 {"epsilon_list", c.solver.epsilon_list},
                 {"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"method", std::string(to_string(c.solver.method))},
                 {"robin_quadrature", std::string(to_string(c.solver.robin_quadrature))},
                 {"refine_check", c.solver.refine_check}};
  if (c.solver.epsilon) solver["epsilon"] = *c.solver.epsilon;
  doc["solver"] = solver;
  doc["lebesgue"] = {{"p", c.lebesgue.p}, {"a", c.lebesgue.a}, {"field", c.lebesgue.field}};
  doc["output"] = {{"vtk", c.output.vtk},
                   {"boundary_vtk", c.output.boundary_vtk},
                   {"csv", c.output.csv},
                   {"report", c.output.report}};
  return doc.dump(2);
}

PolygonalDomain make_domain(const RunConfig& config) { return {config.vertices, config.facets}; }

}  // namespace insulation
