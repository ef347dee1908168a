// endwalk: self-avoiding walk analysis on quasi-transitive graphs presented
// by tree-decomposition templates.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "endwalk/arrangement.hpp"
#include "endwalk/oracle.hpp"
#include "endwalk/rootstar.hpp"
#include "endwalk/solver.hpp"

using namespace endwalk;
using ordered_json = nlohmann::ordered_json;

namespace {

// Fixed 12-significant-digit rounding keeps JSON output byte-identical
// across runs.
double sig12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

struct Options {
  std::string template_path;
  int n = 12;
  double tol = 1e-9;
  int tree_radius = -1;
  std::string format = "json";
  std::string out_path;
  int jobs = 1;
  int max_k = 4;
  long long max_instances = 4'000'000;
  long long max_shapes = 200'000'000;
  bool returns = false;
  double ballistic_c = 0.2;
  std::string walk_arg;
  bool dump_graph = false;
};

void emit(const Options& opt, const ordered_json& j, const std::string& csv) {
  std::string payload = opt.format == "csv" ? csv : j.dump(2) + "\n";
  if (opt.out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(opt.out_path);
    out << payload;
  }
}

ordered_json big_strings(const std::vector<BigInt>& xs) {
  ordered_json out = ordered_json::array();
  for (const BigInt& x : xs) out.push_back(x.str());
  return out;
}

ordered_json class_json(const GraphTemplate& t, const PolynomialSystem& sys,
                        const DependencyDigraph* dep) {
  ordered_json arr = ordered_json::array();
  for (size_t i = 0; i < sys.classes.size(); ++i) {
    const ConfigKey& c = sys.classes[i];
    ordered_json cj;
    cj["index"] = i;
    cj["pair"] = c.pair;
    cj["label"] = c.to_string(t);
    cj["entry"] = role_name(c.x);
    cj["exit"] = role_name(c.y);
    cj["walk_positions"] = c.q.verts;
    ordered_json sides = ordered_json::array();
    for (Role s : c.q.sides) sides.push_back(role_name(s));
    cj["walk_sides"] = sides;
    cj["type"] = c.is_I() ? "I" : "U";
    cj["simple"] = c.is_simple();
    if (dep) {
      int comp = dep->component_of[i];
      cj["component"] = comp;
      switch (dep->components[comp].cls) {
        case ComponentClass::U:
          cj["class"] = "U";
          break;
        case ComponentClass::IPersistent:
          cj["class"] = "I_persistent";
          break;
        case ComponentClass::ITransient:
          cj["class"] = "I_transient";
          break;
      }
    }
    arr.push_back(cj);
  }
  return arr;
}

struct Analysis {
  GraphTemplate t;
  PolynomialSystem sys;
  DependencyDigraph dep;
};

Analysis analyze(const Options& opt) {
  Analysis a;
  a.t = GraphTemplate::from_file(opt.template_path);
  auto rep = validate_template(a.t);
  if (!rep.ok()) {
    std::string msg = "invalid template:";
    for (const auto& issue : rep.issues)
      msg += "\n  " + issue.where + ": " + issue.message;
    throw std::runtime_error(msg);
  }
  BuildLimits lim;
  lim.max_k = opt.max_k;
  lim.max_shapes = opt.max_shapes;
  a.sys = prune_unproductive(build_system(a.t, lim));
  a.dep = build_dependency_digraph(a.sys);
  return a;
}

int cmd_validate(const Options& opt) {
  auto t = GraphTemplate::from_file(opt.template_path);
  auto rep = validate_template(t);
  ordered_json j;
  j["template"] = t.name;
  j["valid"] = rep.ok();
  j["issues"] = ordered_json::array();
  for (const auto& issue : rep.issues)
    j["issues"].push_back({{"where", issue.where}, {"message", issue.message}});
  std::string csv = "where,message\n";
  for (const auto& issue : rep.issues)
    csv += issue.where + "," + issue.message + "\n";
  emit(opt, j, csv);
  return rep.ok() ? 0 : 1;
}

int cmd_configs(const Options& opt) {
  Analysis a = analyze(opt);
  ordered_json j;
  j["template"] = a.t.name;
  j["adhesion_size"] = a.t.adhesion_size();
  j["classes"] = class_json(a.t, a.sys, &a.dep);
  std::string csv = "index,label,type,simple,class\n";
  for (const auto& c : j["classes"])
    csv += c["index"].dump() + "," + c["label"].get<std::string>() + "," +
           c["type"].get<std::string>() + "," + c["simple"].dump() + "," +
           c["class"].get<std::string>() + "\n";
  emit(opt, j, csv);
  return 0;
}

int cmd_system(const Options& opt) {
  Analysis a = analyze(opt);
  ordered_json j;
  j["template"] = a.t.name;
  j["classes"] = class_json(a.t, a.sys, &a.dep);
  ordered_json rows = ordered_json::array();
  for (size_t c = 0; c < a.sys.rows.size(); ++c) {
    ordered_json row;
    row["class"] = c;
    row["monomials"] = ordered_json::array();
    for (const Monomial& m : a.sys.rows[c].monomials) {
      ordered_json mj;
      mj["z"] = m.zdeg;
      mj["y"] = m.yfactors;
      mj["coeff"] = m.coeff.str();
      row["monomials"].push_back(mj);
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  emit(opt, j, j.dump(2) + "\n");
  return 0;
}

ordered_json spectral_json(const SpectralReport& rep) {
  ordered_json j;
  j["R"] = sig12(rep.R);
  j["mu_w"] = sig12(rep.mu_w);
  j["lambda_persistent"] = sig12(rep.lambda_persistent);
  j["bracket"] = {sig12(rep.bracket_lo), sig12(rep.bracket_hi)};
  j["tol"] = sig12(rep.tol);
  j["components"] = ordered_json::array();
  for (const auto& comp : rep.components) {
    ordered_json cj;
    switch (comp.cls) {
      case ComponentClass::U:
        cj["class"] = "U";
        break;
      case ComponentClass::IPersistent:
        cj["class"] = "I_persistent";
        break;
      case ComponentClass::ITransient:
        cj["class"] = "I_transient";
        break;
    }
    cj["size"] = comp.size;
    cj["lambda_at_R"] = sig12(comp.lambda_at_R);
    j["components"].push_back(cj);
  }
  return j;
}

int cmd_solve(const Options& opt) {
  Analysis a = analyze(opt);
  SolverOptions sopt;
  sopt.outer_tol = opt.tol;
  auto rep = find_critical_point(a.sys, a.dep, sopt);
  ordered_json j;
  j["template"] = a.t.name;
  ordered_json sj = spectral_json(rep);
  for (auto it = sj.begin(); it != sj.end(); ++it) j[it.key()] = it.value();
  std::string csv = "R,mu_w\n" + std::to_string(rep.R) + "," +
                    std::to_string(rep.mu_w) + "\n";
  emit(opt, j, csv);
  return 0;
}

int cmd_series(const Options& opt) {
  Analysis a = analyze(opt);
  RootLimits rlim;
  rlim.max_instances = opt.max_instances;
  rlim.max_shapes = opt.max_shapes;
  auto root = root_contract(a.t, rlim);
  auto coeffs = series_coefficients(a.sys, root, opt.n, opt.max_shapes);
  ordered_json j;
  j["template"] = a.t.name;
  j["n"] = opt.n;
  j["coefficients"] = big_strings(coeffs);
  std::string csv = "n,c_n\n";
  for (int n = 1; n <= opt.n; ++n)
    csv += std::to_string(n) + "," + coeffs[n - 1].str() + "\n";
  if (opt.returns) {
    auto rets = series_returns(a.sys, root, opt.n, opt.max_shapes);
    j["sar"] = big_strings(rets);
    csv += "n,sar_n\n";
    for (int n = 1; n <= opt.n; ++n)
      csv += std::to_string(n) + "," + rets[n - 1].str() + "\n";
  }
  emit(opt, j, csv);
  return 0;
}

Patch oracle_patch(const GraphTemplate& t, const Options& opt) {
  if (opt.tree_radius >= 0)
    return build_patch(t, opt.tree_radius, opt.max_instances);
  return build_patch_for_distance(t, opt.n + 1, opt.max_instances);
}

int cmd_oracle(const Options& opt) {
  auto t = GraphTemplate::from_file(opt.template_path);
  auto patch = oracle_patch(t, opt);
  auto rep = brute_counts(patch, patch.root_vertex, opt.n, opt.jobs);
  ordered_json j;
  j["template"] = t.name;
  j["n"] = opt.n;
  if (rep.horizon)
    j["horizon"] = *rep.horizon;
  else
    j["horizon"] = nullptr;
  j["coefficients"] =
      big_strings(std::vector<BigInt>(rep.saw.begin() + 1, rep.saw.end()));
  j["sar"] =
      big_strings(std::vector<BigInt>(rep.sar.begin() + 1, rep.sar.end()));
  j["sap"] =
      big_strings(std::vector<BigInt>(rep.sap.begin() + 1, rep.sap.end()));
  auto growth = growth_report(rep);
  ordered_json gj = ordered_json::array();
  for (int n = 1; n <= opt.n; ++n) gj.push_back(sig12(rep.growth_saw[n]));
  j["growth_saw"] = gj;
  j["max_sar_growth"] = sig12(growth.max_sar_growth);
  if (opt.dump_graph) {
    ordered_json edges = ordered_json::array();
    for (int e = 0; e < patch.graph.arc_count(); e += 2) {
      const Arc& arc = patch.graph.arc(e);
      edges.push_back({arc.tail, arc.head});
    }
    j["edges"] = edges;
  }
  std::string csv = "n,c_n\n";
  for (int n = 1; n <= opt.n; ++n)
    csv += std::to_string(n) + "," + rep.saw[n].str() + "\n";
  emit(opt, j, csv);
  return 0;
}

int cmd_compare(const Options& opt) {
  Analysis a = analyze(opt);
  RootLimits rlim;
  rlim.max_instances = opt.max_instances;
  rlim.max_shapes = opt.max_shapes;
  auto root = root_contract(a.t, rlim);
  auto coeffs = series_coefficients(a.sys, root, opt.n, opt.max_shapes);
  auto rets = series_returns(a.sys, root, opt.n, opt.max_shapes);
  auto patch = oracle_patch(a.t, opt);
  auto rep = brute_counts(patch, patch.root_vertex, opt.n, opt.jobs);

  int match = 0, match_sar = 0;
  ordered_json diffs = ordered_json::array();
  for (int n = 1; n <= opt.n; ++n) {
    if (coeffs[n - 1] == rep.saw[n]) {
      ++match;
    } else {
      diffs.push_back({{"n", n},
                       {"series", coeffs[n - 1].str()},
                       {"oracle", rep.saw[n].str()}});
    }
    if (rets[n - 1] == rep.sar[n]) {
      ++match_sar;
    } else {
      diffs.push_back({{"n", n},
                       {"series_sar", rets[n - 1].str()},
                       {"oracle_sar", rep.sar[n].str()}});
    }
  }
  bool ok = match == opt.n && match_sar == opt.n;
  ordered_json j;
  j["template"] = a.t.name;
  j["n"] = opt.n;
  j["saw_matches"] = match;
  j["sar_matches"] = match_sar;
  j["ok"] = ok;
  j["diffs"] = diffs;
  emit(opt, j, j.dump(2) + "\n");
  std::cerr << match << "/" << opt.n << " coefficients match, " << match_sar
            << "/" << opt.n << " return counts match\n";
  return ok ? 0 : 1;
}

int cmd_ballistic(const Options& opt) {
  auto t = GraphTemplate::from_file(opt.template_path);
  auto patch = oracle_patch(t, opt);
  auto rep = brute_counts(patch, patch.root_vertex, opt.n, opt.jobs);
  ordered_json j;
  j["template"] = t.name;
  j["c"] = sig12(opt.ballistic_c);
  j["stats"] = ordered_json::array();
  std::string csv = "n,mean_over_n,below_fraction\n";
  for (int n = 1; n <= opt.n; ++n) {
    auto st = displacement_stats(rep, n, opt.ballistic_c);
    ordered_json sj;
    sj["n"] = n;
    sj["mean_over_n"] = sig12(st.mean_over_n);
    sj["below_fraction"] = sig12(st.below_fraction);
    sj["histogram"] = big_strings(st.histogram);
    j["stats"].push_back(sj);
    csv += std::to_string(n) + "," + std::to_string(st.mean_over_n) + "," +
           std::to_string(st.below_fraction) + "\n";
  }
  emit(opt, j, csv);
  return 0;
}

int cmd_explain(const Options& opt) {
  auto t = GraphTemplate::from_file(opt.template_path);
  int radius = opt.tree_radius >= 0 ? opt.tree_radius : 12;
  auto patch = build_patch(t, radius, opt.max_instances);
  Walk w;
  std::string token;
  std::stringstream ss(opt.walk_arg);
  while (std::getline(ss, token, ',')) w.verts.push_back(std::stoi(token));
  for (size_t i = 0; i + 1 < w.verts.size(); ++i) {
    int arc = -1;
    for (int e : patch.graph.out_arcs(w.verts[i]))
      if (patch.graph.arc(e).head == w.verts[i + 1]) arc = e;
    if (arc < 0) throw std::runtime_error("walk steps outside the patch graph");
    w.arcs.push_back(arc);
  }
  auto a = saw_to_complete_arrangement(patch, w);
  ordered_json j;
  j["template"] = t.name;
  j["walk"] = w.verts;
  j["weight"] = a.weight(patch);
  j["source_instance"] = a.source(patch);
  j["target_instance"] = a.target(patch);
  j["support"] = a.instances;
  j["shapes"] = ordered_json::array();
  for (int inst : a.instances) {
    const Walk& shape = a.shapes.at(inst);
    ordered_json sj;
    sj["instance"] = inst;
    sj["part"] = t.parts[patch.instances[inst].part_type].id;
    sj["vertices"] = shape.verts;
    ordered_json arcs = ordered_json::array();
    PartContext ctx = context_for_instance(patch, inst);
    for (int e : shape.arcs) {
      ordered_json aj;
      aj["virtual"] = ctx.arc_info[e].is_virtual;
      if (ctx.arc_info[e].is_virtual) aj["port"] = ctx.arc_info[e].port;
      arcs.push_back(aj);
    }
    sj["arcs"] = arcs;
    j["shapes"].push_back(sj);
  }
  j["configurations"] = ordered_json::array();
  for (const auto& [key, cfg] : a.configs) {
    ordered_json cj;
    cj["instance"] = key.first;
    cj["port"] = key.second;
    cj["label"] = cfg.to_string(t);
    cj["boring"] = cfg.is_boring();
    j["configurations"].push_back(cj);
  }
  emit(opt, j, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-avoiding walks on tree-decomposition templates"};
  app.require_subcommand(1);

  Options opt;
  if (const char* env = std::getenv("ENDWALK_JOBS")) opt.jobs = std::atoi(env);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("template", opt.template_path, "template JSON file")
        ->required();
    cmd->add_option("--format", opt.format, "output format (json|csv)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", opt.out_path, "write output to a file");
    cmd->add_option("--jobs", opt.jobs, "worker threads for enumeration");
    cmd->add_option("--max-k", opt.max_k, "adhesion size cap");
    cmd->add_option("--max-instances", opt.max_instances, "patch instance cap");
    cmd->add_option("--max-shapes", opt.max_shapes, "shape enumeration cap");
  };

  auto* c_validate = app.add_subcommand("validate", "check a template");
  add_common(c_validate);
  auto* c_configs = app.add_subcommand("configs", "list configuration classes");
  add_common(c_configs);
  auto* c_system = app.add_subcommand("system", "dump the polynomial system");
  add_common(c_system);
  auto* c_solve = app.add_subcommand("solve", "critical point and mu_w");
  add_common(c_solve);
  c_solve->add_option("--tol", opt.tol, "bisection tolerance on z");
  auto* c_series = app.add_subcommand("series", "exact SAW counts c_1..c_N");
  add_common(c_series);
  c_series->add_option("--n", opt.n, "number of coefficients");
  c_series->add_flag("--returns", opt.returns, "also print SAR counts");
  auto* c_oracle = app.add_subcommand("oracle", "brute-force patch counts");
  add_common(c_oracle);
  c_oracle->add_option("--n", opt.n, "maximum walk length");
  c_oracle->add_option("--tree-radius", opt.tree_radius, "fixed patch radius");
  c_oracle->add_flag("--dump-graph", opt.dump_graph, "include the edge list");
  auto* c_compare = app.add_subcommand("compare", "diff series against oracle");
  add_common(c_compare);
  c_compare->add_option("--n", opt.n, "coefficients to compare");
  c_compare->add_option("--tree-radius", opt.tree_radius, "fixed patch radius");
  auto* c_ballistic = app.add_subcommand("ballistic", "displacement statistics");
  add_common(c_ballistic);
  c_ballistic->add_option("--n", opt.n, "maximum walk length");
  c_ballistic->add_option("--c", opt.ballistic_c, "linear speed threshold");
  c_ballistic->add_option("--tree-radius", opt.tree_radius,
                          "fixed patch radius");
  auto* c_explain = app.add_subcommand("explain", "arrangement of a given SAW");
  add_common(c_explain);
  c_explain->add_option("--walk", opt.walk_arg, "comma-separated vertex ids")
      ->required();
  c_explain->add_option("--tree-radius", opt.tree_radius, "fixed patch radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (c_validate->parsed()) return cmd_validate(opt);
    if (c_configs->parsed()) return cmd_configs(opt);
    if (c_system->parsed()) return cmd_system(opt);
    if (c_solve->parsed()) return cmd_solve(opt);
    if (c_series->parsed()) return cmd_series(opt);
    if (c_oracle->parsed()) return cmd_oracle(opt);
    if (c_compare->parsed()) return cmd_compare(opt);
    if (c_ballistic->parsed()) return cmd_ballistic(opt);
    if (c_explain->parsed()) return cmd_explain(opt);
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 2;
  } catch (const HorizonExceeded& e) {
    std::cerr << "horizon: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
