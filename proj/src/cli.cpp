#include "floer/cli.hpp"

#include "CLI11.hpp"
#include "floer/continuation.hpp"
#include "floer/equivariant.hpp"
#include "floer/errors.hpp"
#include "floer/floer_complex.hpp"
#include "floer/json_util.hpp"
#include "floer/morse_lab.hpp"
#include "floer/spectral_flow.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace floer::cli {

namespace {

using json_util::json;

// One report per command. Text and JSON are both rendered from `data`, so
// they cannot disagree.
struct RunReport {
  std::string command;
  std::vector<std::string> inputs;
  json checks = json::array();
  json data = json::object();
  int exit_code = Exit::ok;
  std::string error;

  void check(const std::string& name, bool passed, const std::string& detail = "") {
    checks.push_back({{"name", name}, {"ok", passed}, {"detail", detail}});
  }
};

json homology_json(const HomologyResult& h) {
  json out = json::array();
  for (const auto& [k, g] : h.groups) {
    json torsion = json::array();
    for (const auto& t : g.torsion) torsion.push_back(t.str());
    out.push_back({{"degree", k}, {"betti", g.betti}, {"torsion", torsion}});
  }
  return out;
}

std::string group_text(const json& g) {
  std::string s;
  const std::size_t betti = g["betti"].get<std::size_t>();
  if (betti > 0) s = betti == 1 ? "Z" : "Z^" + std::to_string(betti);
  for (const auto& t : g["torsion"]) s += (s.empty() ? "" : " + ") + ("Z/" + t.get<std::string>());
  return s.empty() ? "0" : s;
}

void render_text(const RunReport& r, std::ostream& out) {
  out << r.command;
  for (const auto& in : r.inputs) out << " " << in;
  out << "\n";
  for (const auto& c : r.checks) {
    const std::string detail = c["detail"].get<std::string>();
    out << "  " << c["name"].get<std::string>() << ": ";
    if (c["ok"].get<bool>())
      out << "ok";
    else if (detail == "skipped")
      out << "skipped";
    else
      out << "FAILED (" << detail << ")";
    out << "\n";
  }
  for (const auto& [key, value] : r.data.items()) {
    if (value.is_array() && !value.empty() && value[0].is_object() && value[0].contains("betti")) {
      out << key << ":\n";
      for (const auto& g : value)
        out << "  " << (key.rfind("cohomology", 0) == 0 || key.rfind("equivariant", 0) == 0 ? "H^" : "H_")
            << g["degree"].get<int>() << " = " << group_text(g) << "\n";
    } else if (value.is_array() && !value.empty() && value[0].is_object()) {
      out << key << ":\n";
      for (const auto& row : value) {
        out << " ";
        for (const auto& [f, v] : row.items()) out << " " << f << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
        out << "\n";
      }
    } else if (value.is_object()) {
      out << key << ":\n";
      for (const auto& [f, v] : value.items())
        out << "  " << f << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    } else {
      out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    }
  }
  if (!r.error.empty()) out << "error: " << r.error << "\n";
  out << "exit " << r.exit_code << "\n";
}

json render_json(const RunReport& r) {
  json j;
  j["command"] = r.command;
  j["inputs"] = r.inputs;
  j["checks"] = r.checks;
  j["data"] = r.data;
  j["exit_code"] = r.exit_code;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

void record_validation(RunReport& r, const ValidationReport& v) {
  for (const auto& c : v.checks) r.check(c.name, c.ok, c.detail);
}

// ---- commands ----------------------------------------------------------------

void cmd_validate(RunReport& r, const std::string& path) {
  const FlowCategory fc = load_fcd(path);
  const ValidationReport v = validate(fc);
  record_validation(r, v);
  r.data["category"] = fc.name;
  r.data["valid"] = v.ok;
  if (!v) {
    r.exit_code = Exit::failure;
    r.error = "validation failed: " + v.first_failure();
  }
}

struct HomologyFlags {
  bool cohomology = false;
  bool morse = false;
  int stable = 0;
  int equivariant = 0;
};

void cmd_homology(RunReport& r, const std::string& path, const HomologyFlags& flags) {
  FlowCategory fc = load_fcd(path);
  const ValidationReport v = validate(fc);
  record_validation(r, v);
  if (!v) {
    r.exit_code = Exit::failure;
    r.error = "validation failed: " + v.first_failure();
    return;
  }
  r.data["category"] = fc.name;
  if (flags.morse && (flags.stable || flags.equivariant))
    throw CLI::ValidationError("--morse", "cannot be combined with --stable or --equivariant");
  FloerComplexBundle b;
  if (flags.equivariant) {
    const int n = flags.equivariant;
    const FlowCategory base = fc;
    b = assemble(stabilize(base, n));
    const CyclicAction g = circle_rotation(base, n, 1);
    check_action(b, g);
    r.data["variant"] = "equivariant";
    r.data["circle"] = n;
    r.data["assembly"] = b.path;
    r.data["equivariant_cohomology"] = homology_json(equivariant_cohomology(b, g));
    return;
  }
  if (flags.stable) {
    fc = stabilize(fc, flags.stable);
    r.data["circle"] = flags.stable;
  }
  b = flags.morse ? morse_assemble(fc) : assemble(fc);
  r.data["variant"] = flags.morse ? "morse" : (flags.stable ? "stable" : "bott");
  r.data["assembly"] = b.path;
  json ranks = json::object();
  for (const auto& [k, n] : b.complex->ranks()) ranks[std::to_string(k)] = n;
  r.data["ranks"] = ranks;
  const CheckResult d2 = verify_d_squared(*b.complex);
  r.check("d-squared", d2.ok, d2.ok ? "" : "degree " + std::to_string(*d2.failing_degree));
  if (flags.cohomology)
    r.data["cohomology"] = homology_json(floer_cohomology(b));
  else
    r.data["homology"] = homology_json(floer_homology(b));
}

void cmd_compare(RunReport& r, const std::string& path_a, const std::string& path_b,
                 const std::vector<std::string>& data_paths) {
  auto a = std::make_shared<const FlowCategory>(load_fcd(path_a));
  auto b = std::make_shared<const FlowCategory>(load_fcd(path_b));
  for (const auto* fc : {a.get(), b.get()}) {
    const ValidationReport v = validate(*fc);
    r.check("validate " + fc->name, v.ok, v.ok ? "" : v.first_failure());
    if (!v) {
      r.exit_code = Exit::failure;
      r.error = "validation failed for " + fc->name + ": " + v.first_failure();
      return;
    }
  }
  TransitionFile merged;
  for (const auto& p : data_paths) {
    TransitionFile f = load_transitions(p, a, b);
    merged.transitions.insert(merged.transitions.end(), f.transitions.begin(), f.transitions.end());
    merged.homotopies.insert(merged.homotopies.end(), f.homotopies.begin(), f.homotopies.end());
    for (const auto& [role, name] : f.protocol) merged.protocol[role] = name;
  }
  const Comparison c = resolve_protocol(merged);
  const ProtocolVerdict verdict =
      verify_invariance_protocol(c.forward, c.backward, c.glue_fwd_bwd, c.glue_to_identity,
                                 c.glue_bwd_fwd ? &*c.glue_bwd_fwd : nullptr,
                                 c.glue_to_identity_b ? &*c.glue_to_identity_b : nullptr);
  for (const auto& s : verdict.steps) r.check(s.name, s.ok, s.detail);
  r.data["verified"] = verdict.verified;
  r.data["shift"] = c.forward.shift;
  r.data["homology_a"] = homology_json(floer_homology(assemble(*a)));
  r.data["homology_b"] = homology_json(floer_homology(assemble(*b)));
  if (verdict.forward) {
    json degrees = json::array();
    for (const auto& [k, d] : verdict.forward->degrees)
      degrees.push_back({{"source_degree", d.source_degree},
                         {"target_degree", d.target_degree},
                         {"isomorphism", d.isomorphism}});
    r.data["forward_map"] = degrees;
  }
  r.data["composite_identity_a"] = verdict.forward_backward_identity;
  r.data["composite_identity_b"] = verdict.backward_forward_identity;
  if (!verdict.verified) {
    r.exit_code = Exit::failure;
    for (const auto& s : verdict.steps)
      if (!s.ok && s.detail != "skipped") {
        r.error = "protocol step " + s.name + " failed: " + s.detail;
        break;
      }
  }
}

lab::MorseExample load_example(const std::string& name_or_path) {
  for (const auto& n : lab::example_names())
    if (n == name_or_path) return lab::example(n);
  std::ifstream in(name_or_path);
  if (!in) throw IoError("unknown example or unreadable file '" + name_or_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = name_or_path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.find('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return lab::parse_example(ss.str(), stem);
}

struct MorseFlags {
  std::string emit;
  std::string transition;
  std::string emit_other;
  std::string emit_transitions;
};

void summarize_lab(RunReport& r, const std::string& key, const lab::LabResult& res) {
  json crit = json::array();
  for (const auto& c : res.criticals) {
    std::ostringstream v;
    v.precision(10);
    v << c.value;
    crit.push_back({{"id", c.id}, {"dim", c.dim}, {"mu", c.index}, {"value", v.str()}});
  }
  double worst = 0;
  bool monotone = true;
  for (const auto& t : res.trajectories) {
    worst = std::max(worst, std::abs(t.energy - (t.values.front() - t.values.back())));
    for (std::size_t i = 1; i < t.values.size(); ++i) monotone = monotone && t.values[i] < t.values[i - 1];
  }
  r.data[key + "_criticals"] = crit;
  json summary;
  summary["category"] = res.category.name;
  summary["moduli_spaces"] = res.category.moduli.size();
  summary["trajectories"] = res.trajectories.size();
  summary["monotone"] = monotone;
  std::ostringstream e;
  e.precision(3);
  e << std::scientific << worst;
  summary["max_energy_defect"] = e.str();
  r.data[key] = summary;
  const ValidationReport v = validate(res.category);
  r.check("validate " + res.category.name, v.ok, v.ok ? "" : v.first_failure());
  r.data[key + "_homology"] = homology_json(floer_homology(assemble(res.category)));
}

void cmd_morse(RunReport& r, const std::string& name, const MorseFlags& flags) {
  const lab::MorseExample ex = load_example(name);
  const lab::LabResult res = lab::run_example(ex);
  summarize_lab(r, "lab", res);
  if (!flags.emit.empty()) {
    store_fcd(res.category, flags.emit);
    r.data["emitted"] = flags.emit;
  }
  if (flags.transition.empty()) return;
  const lab::MorseExample other = load_example(flags.transition);
  if (other.manifold.name != ex.manifold.name || ex.product_circle || other.product_circle)
    throw lab::LabError("transitions need two functions on the same manifold");
  const lab::LabResult res_b = lab::run_example(other);
  summarize_lab(r, "other", res_b);
  const lab::ComparisonData cmp = lab::build_comparison(ex.manifold, ex.function, other.function, res, res_b, ex.options);
  const Comparison c = resolve_protocol(cmp.file);
  const ProtocolVerdict verdict = verify_invariance_protocol(c.forward, c.backward, c.glue_fwd_bwd, c.glue_to_identity);
  for (const auto& s : verdict.steps) r.check(s.name, s.ok, s.detail);
  r.data["protocol_verified"] = verdict.verified;
  json ts = json::array();
  for (const auto& t : cmp.file.transitions) ts.push_back({{"name", t.name}, {"spaces", t.moduli.size()}});
  r.data["transitions"] = ts;
  if (!flags.emit_other.empty()) {
    store_fcd(res_b.category, flags.emit_other);
    r.data["emitted_other"] = flags.emit_other;
  }
  if (!flags.emit_transitions.empty()) {
    store_transitions(cmp.file, res.category, res_b.category, flags.emit_transitions);
    r.data["emitted_transitions"] = flags.emit_transitions;
  }
  if (!verdict.verified) {
    r.exit_code = Exit::failure;
    r.error = "generated data does not pass the invariance protocol";
  }
}

struct SfFlags {
  double tolerance = 1e-3;
  std::string grading;
  std::vector<std::string> corrections;
};

std::pair<std::string, std::string> split_pair(const std::string& s, const std::string& what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw CLI::ValidationError(what, "expected ID=VALUE, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

void cmd_sf(RunReport& r, const std::vector<std::string>& files, const SfFlags& flags) {
  if (flags.grading.empty()) {
    json rows = json::array();
    for (const auto& f : files) {
      const OperatorPath p = load_operator_path(f);
      SpectralFlowOptions o;
      o.tolerance = flags.tolerance;
      const SpectralFlowResult sf = spectral_flow_detail(p, o);
      rows.push_back({{"path", f}, {"size", p.size()}, {"spectral_flow", sf.value}, {"crossings", sf.crossings.size()}});
    }
    r.data["spectral_flow"] = rows;
    return;
  }
  std::map<std::string, OperatorPath> paths;
  for (const auto& f : files) {
    auto [id, file] = split_pair(f, "path");
    paths.emplace(id, load_operator_path(file));
  }
  std::map<std::string, int> corrections;
  for (const auto& c : flags.corrections) {
    auto [id, value] = split_pair(c, "--correction");
    try {
      corrections[id] = std::stoi(value);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--correction", "not an integer: " + value);
    }
  }
  const auto mu = assign_grading(flags.grading, paths, corrections, flags.tolerance);
  json g = json::object();
  for (const auto& [id, m] : mu) g[id] = m;
  r.data["reference"] = flags.grading;
  r.data["grading"] = g;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Morse-Bott flow category homology"};
  app.name("floer");
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false, timing = false;
  app.add_flag("--json", as_json, "machine-readable report");
  app.add_flag("--timing", timing, "print elapsed time to stderr");

  std::string fcd, fcd_a, fcd_b, example_name;
  std::vector<std::string> data_paths, sf_files;
  HomologyFlags hflags;
  MorseFlags mflags;
  SfFlags sflags;

  auto* validate_cmd = app.add_subcommand("validate", "check a flow category file");
  validate_cmd->add_option("fcd", fcd, "FCD file")->required();

  auto* homology_cmd = app.add_subcommand("homology", "Floer homology of a flow category");
  homology_cmd->add_option("fcd", fcd, "FCD file")->required();
  homology_cmd->add_flag("--cohomology", hflags.cohomology, "cohomology instead of homology");
  homology_cmd->add_flag("--morse", hflags.morse, "Morse-case complex counting 0-dimensional moduli");
  homology_cmd->add_option("--stable", hflags.stable, "cross with an n-gon circle")
      ->expected(0, 1)->default_str("4")->check(CLI::Range(3, 1000));
  homology_cmd->add_option("--equivariant", hflags.equivariant, "invariant cochains under Z/n rotation")
      ->expected(0, 1)->default_str("4")->check(CLI::Range(3, 1000));

  auto* compare_cmd = app.add_subcommand("compare", "run the invariance protocol");
  compare_cmd->add_option("fcd_a", fcd_a, "source FCD")->required();
  compare_cmd->add_option("fcd_b", fcd_b, "target FCD")->required();
  compare_cmd->add_option("data", data_paths, "transition file, then optional homotopy files")->required();

  auto* morse_cmd = app.add_subcommand("morse", "generate flow category data from a bundled example");
  morse_cmd->add_option("example", example_name, "example name or JSON description")->required();
  morse_cmd->add_option("--emit", mflags.emit, "write the FCD here");
  morse_cmd->add_option("--transition", mflags.transition, "second example for transition data");
  morse_cmd->add_option("--emit-other", mflags.emit_other, "write the second FCD here");
  morse_cmd->add_option("--emit-transitions", mflags.emit_transitions, "write the transition data here");

  auto* sf_cmd = app.add_subcommand("sf", "spectral flow of operator paths");
  sf_cmd->add_option("paths", sf_files, "path files, or ID=FILE with --grading")->required();
  sf_cmd->add_option("--tolerance", sflags.tolerance, "endpoint gap")->check(CLI::PositiveNumber);
  sf_cmd->add_option("--grading", sflags.grading, "reference id; prints mu = SF - 1 + correction");
  sf_cmd->add_option("--correction", sflags.corrections, "ID=K integer corrections");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return Exit::usage;
  }

  const auto started = std::chrono::steady_clock::now();
  RunReport r;
  try {
    if (validate_cmd->parsed()) {
      r.command = "validate";
      r.inputs = {fcd};
      cmd_validate(r, fcd);
    } else if (homology_cmd->parsed()) {
      r.command = "homology";
      r.inputs = {fcd};
      if (homology_cmd->count("--stable") == 0) hflags.stable = 0;
      if (homology_cmd->count("--equivariant") == 0) hflags.equivariant = 0;
      cmd_homology(r, fcd, hflags);
    } else if (compare_cmd->parsed()) {
      r.command = "compare";
      r.inputs = {fcd_a, fcd_b};
      r.inputs.insert(r.inputs.end(), data_paths.begin(), data_paths.end());
      cmd_compare(r, fcd_a, fcd_b, data_paths);
    } else if (morse_cmd->parsed()) {
      r.command = "morse";
      r.inputs = {example_name};
      if (!mflags.transition.empty()) r.inputs.push_back(mflags.transition);
      cmd_morse(r, example_name, mflags);
    } else if (sf_cmd->parsed()) {
      r.command = "sf";
      r.inputs = sf_files;
      cmd_sf(r, sf_files, sflags);
    }
  } catch (const CLI::ValidationError& e) {
    r.exit_code = Exit::usage;
    r.error = e.what();
  } catch (const ParseError& e) {
    r.exit_code = Exit::usage;
    r.error = e.what();
  } catch (const VersionMismatch& e) {
    r.exit_code = Exit::usage;
    r.error = e.what();
  } catch (const IoError& e) {
    r.exit_code = Exit::usage;
    r.error = e.what();
  } catch (const Error& e) {
    r.exit_code = Exit::failure;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.exit_code = Exit::usage;
    r.error = e.what();
  }
  if (as_json)
    out << json_util::pretty(render_json(r)) << "\n";
  else
    render_text(r, out);
  if (!r.error.empty()) err << "floer " << r.command << ": " << r.error << "\n";
  if (timing) {
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    err << "elapsed " << ms << " ms\n";
  }
  return r.exit_code;
}

}  // namespace floer::cli
