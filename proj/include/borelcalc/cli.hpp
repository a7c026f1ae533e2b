#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "borelcalc/calculus.hpp"
#include "borelcalc/chebyshev.hpp"
#include "borelcalc/commute.hpp"
#include "borelcalc/errors.hpp"
#include "borelcalc/expr_sampler.hpp"
#include "borelcalc/json_io.hpp"
#include "borelcalc/parser.hpp"
#include "borelcalc/spectral.hpp"
#include "borelcalc/version.hpp"

namespace borelcalc {

enum class Command { Apply, Spectrum, Joint, Commute, Transform, Verify, Represent };

struct JobConfig {
  Command command = Command::Verify;
  std::vector<std::string> matrix_paths;
  std::string expr;
  double tol = -1.0;  // < 0: library defaults
  std::uint64_t seed = 0;
  std::string format = "text";  // "text" or "json"
  std::string out;              // empty: stdout
  unsigned cheb_degree = 0;     // apply only: > 0 selects the Chebyshev route
};

namespace cli_detail {

inline const char* command_name(Command c) {
  switch (c) {
    case Command::Apply: return "apply";
    case Command::Spectrum: return "spectrum";
    case Command::Joint: return "joint";
    case Command::Commute: return "commute";
    case Command::Transform: return "transform";
    case Command::Verify: return "verify";
    case Command::Represent: return "represent";
  }
  return "?";
}

inline void render_value(std::ostream& os, const json& v, int indent);

inline void render_matrix(std::ostream& os, const json& m, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const auto& re = m.at("re");
  const auto& im = m.at("im");
  for (std::size_t i = 0; i < re.size(); ++i) {
    os << pad << "[ ";
    for (std::size_t j = 0; j < re[i].size(); ++j) {
      if (j) os << ", ";
      os << detail::format_complex_bare(
          cplx(re[i][j].get<double>(), im[i][j].get<double>()));
    }
    os << " ]\n";
  }
}

inline bool looks_like_matrix(const json& v) {
  return v.is_object() && v.contains("re") && v.contains("im") &&
         v["re"].is_array();
}

inline void render_value(std::ostream& os, const json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (looks_like_matrix(v)) {
    os << "\n";
    render_matrix(os, v, indent + 2);
    return;
  }
  if (v.is_object()) {
    os << "\n";
    for (auto it = v.begin(); it != v.end(); ++it) {
      os << pad << "  " << it.key() << ":";
      render_value(os, it.value(), indent + 2);
    }
    return;
  }
  if (v.is_array()) {
    bool scalars = true;
    for (const auto& e : v)
      if (!e.is_number() && !e.is_string() && !e.is_boolean()) scalars = false;
    if (scalars) {
      os << " [";
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) os << ", ";
        if (v[k].is_number_float())
          os << detail::format_double(v[k].get<double>());
        else
          os << v[k].dump();
      }
      os << "]\n";
      return;
    }
    os << "\n";
    for (std::size_t k = 0; k < v.size(); ++k) {
      os << pad << "  - ";
      render_value(os, v[k], indent + 4);
    }
    return;
  }
  if (v.is_number_float())
    os << " " << detail::format_double(v.get<double>()) << "\n";
  else
    os << " " << v.dump() << "\n";
}

inline void render_text(std::ostream& os, const json& report) {
  os << "calc " << report.at("version").get<std::string>() << "\n";
  os << "command: " << report.at("command").get<std::string>() << "\n";
  os << "seed: " << report.at("seed").get<std::uint64_t>() << "\n";
  for (auto it = report.at("tolerances").begin();
       it != report.at("tolerances").end(); ++it)
    os << "tolerance " << it.key() << ": "
       << detail::format_double(it.value().get<double>()) << "\n";
  for (const auto& row : report.at("checks")) {
    os << "check " << row.at("name").get<std::string>()
       << ": residual=" << detail::format_double(row.at("residual").get<double>())
       << " tolerance=" << detail::format_double(row.at("tolerance").get<double>())
       << (row.at("pass").get<bool>() ? " PASS" : " FAIL");
    if (row.contains("note")) os << "  # " << row.at("note").get<std::string>();
    os << "\n";
  }
  if (report.contains("result")) {
    os << "result:";
    render_value(os, report.at("result"), 0);
  }
  os << "overall: " << (report.at("pass").get<bool>() ? "PASS" : "FAIL") << "\n";
}

inline std::vector<FuncExpr> verify_function_pool(std::uint64_t seed) {
  std::vector<FuncExpr> fs = {
      parse_expr("z1", 1),       parse_expr("z1^2", 1),
      parse_expr("conj(z1)", 1), parse_expr("abs(z1)", 1),
      parse_expr("ind(closedball(0,1))", 1)};
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 5; ++k) fs.push_back(sample_smooth_expr(rng, 1, 3));
  return fs;
}

}  // namespace cli_detail

/// Dispatch one job and write its report to `os`; returns the process exit
/// code (0 success, 1 verification failure, 2 input error).
inline int run(const JobConfig& job, std::ostream& os) {
  using cli_detail::command_name;
  json report;
  report["version"] = kVersionString;
  report["command"] = command_name(job.command);
  report["seed"] = job.seed;
  const double tol = job.tol > 0.0 ? job.tol : kMfcTol;
  json tolerances;
  tolerances["check"] = tol;
  tolerances["eigensolver"] = kDefaultTol;
  tolerances["reconstruction"] = kReconTolRel;

  CheckReport checks;
  json result;
  bool pass = true;

  try {
    switch (job.command) {
      case Command::Apply: {
        if (job.matrix_paths.size() != 1)
          throw IOError("apply: exactly one --matrix required");
        if (job.expr.empty()) throw IOError("apply: --expr required");
        const ComplexMatrix a = load_matrix(job.matrix_paths[0]);
        const FuncExpr f = parse_expr(job.expr, 1);
        BorelCalculus c = calculus_from_normal(a);
        ComplexMatrix rebuilt = ComplexMatrix::zero(a.dim());
        for (const auto& atom : c.measure.atoms)
          rebuilt += atom.point[0] * atom.proj;
        checks.add("spectral reconstruction",
                   (rebuilt - a).frobenius_norm() /
                       std::max(1.0, a.frobenius_norm()),
                   std::max(tol, kReconTolRel));
        const ComplexMatrix spectral_route = apply_fn(c, f);
        if (job.cheb_degree > 0) {
          ChebResult cheb = cheb_apply(a, f, job.cheb_degree);
          checks.add("chebyshev grid error", cheb.grid_error, 1e300,
                     "degree " + std::to_string(job.cheb_degree));
          checks.add("chebyshev vs spectral route",
                     operator_norm(cheb.value - spectral_route),
                     cheb.grid_error + 1e-8);
          result["matrix"] = matrix_to_json(cheb.value);
          result["interval"] = json::array({cheb.a, cheb.b});
        } else {
          result["matrix"] = matrix_to_json(spectral_route);
        }
        result["expr"] = print_expr(f);
        break;
      }
      case Command::Spectrum: {
        if (job.matrix_paths.size() != 1)
          throw IOError("spectrum: exactly one --matrix required");
        const ComplexMatrix a = load_matrix(job.matrix_paths[0]);
        const FuncExpr f = parse_expr(job.expr.empty() ? "z1" : job.expr, 1);
        BorelCalculus c = calculus_from_normal(a);
        SpectralReport rep = spectral_report(c, f);
        json spec = json::array();
        for (const cplx& v : rep.spectrum)
          spec.push_back(json::array({v.real(), v.imag()}));
        result["spectrum"] = spec;
        result["point_spectrum"] = spec;
        json projs = json::array();
        ComplexMatrix sum = ComplexMatrix::zero(c.dim());
        for (const auto& [v, p] : rep.eigenprojections) {
          projs.push_back(json{{"value", json::array({v.real(), v.imag()})},
                               {"proj", matrix_to_json(p)}});
          sum += p;
        }
        result["eigenprojections"] = std::move(projs);
        checks.add("eigenprojections resolve identity",
                   (sum - ComplexMatrix::identity(c.dim())).frobenius_norm(),
                   std::max(tol, kPvmTol));
        checks.add("norm route agreement",
                   std::abs(operator_norm_via_calculus(c, f) -
                            operator_norm(apply_fn(c, f))),
                   std::max(tol, 1e-8));
        break;
      }
      case Command::Joint: {
        if (job.matrix_paths.size() < 2)
          throw IOError("joint: at least two --matrix inputs required");
        std::vector<ComplexMatrix> as;
        for (const auto& p : job.matrix_paths) as.push_back(load_matrix(p));
        BorelCalculus c = joint_calculus(as);
        for (std::size_t j = 0; j < as.size(); ++j) {
          const ComplexMatrix img =
              apply_fn(c, FuncExpr::coord(static_cast<int>(j) + 1, c.arity()));
          checks.add("reproduces input " + std::to_string(j),
                     (img - as[j]).frobenius_norm() /
                         std::max(1.0, as[j].frobenius_norm()),
                     std::max(tol, 1e-7));
        }
        result = calculus_to_json(c, "joint");
        break;
      }
      case Command::Commute: {
        if (job.matrix_paths.size() != 2)
          throw IOError("commute: exactly two --matrix inputs required");
        const ComplexMatrix a = load_matrix(job.matrix_paths[0]);
        const ComplexMatrix b = load_matrix(job.matrix_paths[1]);
        BatteryReport rep = strong_commute_battery(
            a, b, job.tol > 0.0 ? job.tol : kBatteryRel,
            job.seed == 0 ? kBatterySeed : job.seed);
        result["direct"] = json{{"holds", rep.direct}, {"residual", rep.res_direct}};
        result["calculus"] =
            json{{"holds", rep.calculus}, {"residual", rep.res_calculus}};
        result["transform"] =
            json{{"holds", rep.transform}, {"residual", rep.res_transform}};
        result["ts_pair"] =
            json{{"holds", rep.ts_pair}, {"residual", rep.res_ts_pair}};
        result["strong"] = json{{"holds", rep.strong}, {"residual", rep.res_strong}};
        result["z_pair"] = json{{"holds", rep.z_pair}, {"residual", rep.res_z_pair}};
        result["strongly_commuting"] = rep.verdict();
        checks.add("battery coherence", rep.all_agree() ? 0.0 : 1.0, 0.5,
                   "the six formulations must agree");
        break;
      }
      case Command::Transform: {
        if (job.matrix_paths.size() != 1)
          throw IOError("transform: exactly one --matrix required");
        const ComplexMatrix a = load_matrix(job.matrix_paths[0]);
        TransformTriple tr = bounded_transform(a);
        result["T"] = matrix_to_json(tr.t);
        result["S"] = matrix_to_json(tr.s);
        result["Z"] = matrix_to_json(tr.z);
        checks = tr.diagnostics;
        break;
      }
      case Command::Verify: {
        if (job.matrix_paths.size() != 1)
          throw IOError("verify: exactly one --matrix required");
        const ComplexMatrix a = load_matrix(job.matrix_paths[0]);
        BorelCalculus c = calculus_from_normal(a);
        checks = verify_pvm_axioms(c.measure, std::max(tol, kPvmTol));

        double rho = 0.0;
        for (const auto& atom : c.measure.atoms)
          rho = std::max(rho, std::abs(atom.point[0]));
        BpSequence seq;
        for (double r : {0.25, 0.5, 1.0, 2.0})
          seq.terms.push_back(
              FuncExpr::clamp(parse_expr("z1", 1), r * std::max(1.0, rho)));
        seq.limit = parse_expr("z1", 1);
        seq.bound = 2.0 * std::max(1.0, rho);
        CheckReport mfc = verify_mfc_axioms(
            c, cli_detail::verify_function_pool(job.seed), {seq}, tol);
        for (auto& row : mfc.rows) checks.rows.push_back(std::move(row));

        json pts = json::array();
        for (const auto& atom : c.measure.atoms)
          pts.push_back(
              json::array({atom.point[0].real(), atom.point[0].imag()}));
        result["support"] = std::move(pts);
        break;
      }
      case Command::Represent: {
        if (job.matrix_paths.size() != 1)
          throw IOError("represent: exactly one --matrix required");
        const ComplexMatrix a = load_matrix(job.matrix_paths[0]);
        BorelCalculus c = calculus_from_normal(a);
        CyclicDecomposition dec = multiplication_representation(c);
        checks.add("U unitary",
                   (dec.unitary.adjoint() * dec.unitary -
                    ComplexMatrix::identity(c.dim()))
                       .frobenius_norm(),
                   std::max(tol, kPvmTol));
        std::mt19937_64 rng(job.seed == 0 ? kBatterySeed : job.seed);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
          FuncExpr f = k % 5 == 0
                           ? FuncExpr::indicator(sample_borel_set(rng, 1, 2))
                           : sample_smooth_expr(rng, 1, 3);
          worst = std::max(worst, representation_defect(dec, c, f));
        }
        checks.add("multiplier conjugation defect", worst, std::max(tol, 1e-8),
                   "20 sampled functions");
        json blocks = json::array();
        for (const auto& b : dec.blocks) {
          json jb;
          jb["weights"] = b.weights;
          json pts = json::array();
          for (std::size_t idx : b.atom_index)
            pts.push_back(point_to_json(c.measure.atoms[idx].point));
          jb["points"] = std::move(pts);
          blocks.push_back(std::move(jb));
        }
        result["blocks"] = std::move(blocks);
        result["U"] = matrix_to_json(dec.unitary);
        break;
      }
    }
  } catch (const ParseError& e) {
    os << "error: " << e.what() << "\n";
    return 2;
  } catch (const IOError& e) {
    os << "error: " << e.what() << "\n";
    return 2;
  } catch (const ArityError& e) {
    os << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    // domain failure (NotNormal, NotCommuting, ...): a verification failure
    os << "verification failure: " << e.what() << "\n";
    return 1;
  }

  pass = checks.all_pass();
  report["tolerances"] = std::move(tolerances);
  report["checks"] = report_to_json(checks);
  report["result"] = std::move(result);
  report["pass"] = pass;

  if (job.format == "json")
    os << report.dump(2) << "\n";
  else
    cli_detail::render_text(os, report);
  return pass ? 0 : 1;
}

inline int run(const JobConfig& job) {
  if (job.out.empty()) return run(job, std::cout);
  std::ofstream out(job.out, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot open output file " << job.out << "\n";
    return 2;
  }
  return run(job, out);
}

}  // namespace borelcalc
