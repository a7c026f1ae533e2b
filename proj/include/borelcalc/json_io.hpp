#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "borelcalc/calculus.hpp"
#include "borelcalc/complex_matrix.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/multmodel.hpp"
#include "borelcalc/pvm.hpp"
#include "borelcalc/report.hpp"

namespace borelcalc {

using json = nlohmann::json;

// matrix object: { "re": [[...]], "im": [[...]] }, "im" optional (zero)
inline json matrix_to_json(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json rrow = json::array(), irow = json::array();
    for (std::size_t j = 0; j < n; ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re") || !j["re"].is_array())
    throw IOError("matrix json: expected an object with an \"re\" array");
  const json& re = j["re"];
  const std::size_t n = re.size();
  if (n == 0) throw IOError("matrix json: empty matrix");
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!re[i].is_array() || re[i].size() != n)
      throw IOError("matrix json: \"re\" is not square");
    for (std::size_t j2 = 0; j2 < n; ++j2)
      m(i, j2) = cplx(re[i][j2].get<double>(), 0.0);
  }
  if (j.contains("im")) {
    const json& im = j["im"];
    if (!im.is_array() || im.size() != n)
      throw IOError("matrix json: \"im\" does not match \"re\"");
    for (std::size_t i = 0; i < n; ++i) {
      if (!im[i].is_array() || im[i].size() != n)
        throw IOError("matrix json: \"im\" is not square");
      for (std::size_t j2 = 0; j2 < n; ++j2)
        m(i, j2) = cplx(m(i, j2).real(), im[i][j2].get<double>());
    }
  }
  if (!m.all_finite()) throw IOError("matrix json: non-finite entries");
  return m;
}

inline json point_to_json(const Point& p) {
  json out = json::array();
  for (const cplx& z : p) out.push_back(json::array({z.real(), z.imag()}));
  return out;
}

inline Point point_from_json(const json& j) {
  Point p;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2)
      throw IOError("point json: expected [re, im] pairs");
    p.emplace_back(entry[0].get<double>(), entry[1].get<double>());
  }
  return p;
}

// PVM object: { "d": int, "dim": int, "atoms": [ { "point": ..., "proj": ... } ] }
inline json pvm_to_json(const PVM& e) {
  json atoms = json::array();
  for (const auto& a : e.atoms)
    atoms.push_back(
        json{{"point", point_to_json(a.point)}, {"proj", matrix_to_json(a.proj)}});
  return json{{"d", e.d}, {"dim", e.dim}, {"atoms", std::move(atoms)}};
}

inline PVM pvm_from_json(const json& j) {
  PVM e;
  e.d = j.at("d").get<int>();
  e.dim = j.at("dim").get<std::size_t>();
  for (const auto& atom : j.at("atoms")) {
    PvmAtom a;
    a.point = point_from_json(atom.at("point"));
    if (static_cast<int>(a.point.size()) != e.d)
      throw IOError("pvm json: atom point arity mismatch");
    a.proj = matrix_from_json(atom.at("proj"));
    if (a.proj.dim() != e.dim) throw IOError("pvm json: projection dimension");
    e.atoms.push_back(std::move(a));
  }
  return e;
}

// calculus object: the PVM object plus a "kind" tag
inline json calculus_to_json(const BorelCalculus& c,
                             const std::string& kind = "borel") {
  json j = pvm_to_json(c.measure);
  j["kind"] = kind;
  return j;
}

inline BorelCalculus calculus_from_json(const json& j) {
  return {pvm_from_json(j)};
}

// space object: { "N": int, "weights": [...], "labels": [[re,im],...] }
inline json space_to_json(const DiscreteMeasureSpace& s) {
  json labels = json::array();
  for (const cplx& l : s.labels)
    labels.push_back(json::array({l.real(), l.imag()}));
  return json{{"N", s.atom_count}, {"weights", s.weights},
              {"labels", std::move(labels)}};
}

inline DiscreteMeasureSpace space_from_json(const json& j) {
  DiscreteMeasureSpace s;
  s.atom_count = j.at("N").get<std::size_t>();
  s.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& l : j.at("labels")) {
    if (!l.is_array() || l.size() != 2)
      throw IOError("space json: labels must be [re, im] pairs");
    s.labels.emplace_back(l[0].get<double>(), l[1].get<double>());
  }
  s.validate();
  return s;
}

inline json report_to_json(const CheckReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row{{"name", r.name},
             {"residual", r.residual},
             {"tolerance", r.tolerance},
             {"pass", r.pass}};
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open matrix file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IOError("cannot parse " + path + ": " + e.what());
  }
  return matrix_from_json(j);
}

}  // namespace borelcalc
