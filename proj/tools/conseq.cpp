// Command-line front end: derivability queries, natural-extension
// construction and comparison, filter lattices, invariant suites,
// counterexample search and witness replay.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "conseq/filters.hpp"
#include "conseq/natext.hpp"
#include "conseq/report.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using nlohmann::json;
using namespace conseq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitBoundsHit = 3;

struct GlobalOpts {
  bool strict = false;
  bool timing = false;
  bool serial = false;
  int threads = 0;
  std::string out;
};

Exec exec_of(const GlobalOpts& g) { return g.serial ? Exec::serial : Exec::parallel; }

std::vector<Formula> parse_list(const std::string& s, const LogicPresentation& l) {
  std::vector<Formula> out;
  std::string cur;
  int depth = 0;
  auto flush = [&]() {
    auto b = cur.find_first_not_of(" \t");
    if (b == std::string::npos) {
      cur.clear();
      return;
    }
    auto e = cur.find_last_not_of(" \t");
    out.push_back(parse_formula(cur.substr(b, e - b + 1), l.sig, l.vars));
    cur.clear();
  };
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush();
      continue;
    }
    cur += c;
  }
  flush();
  return out;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

ArityBound parse_arity(const std::string& s) {
  if (s.empty() || s == "omega") return ArityBound::omega();
  return ArityBound::finite(std::stoi(s));
}

int emit(const json& j, const GlobalOpts& g, int code,
         std::chrono::steady_clock::time_point started) {
  json doc = j;
  if (g.timing) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - started)
                  .count();
    doc["timing_ms"] = ms;
  }
  std::string text = doc.dump(2) + "\n";
  if (!g.out.empty()) {
    std::ofstream f(g.out);
    f << text;
  } else {
    std::cout << text;
  }
  return code;
}

int verdict_exit(const Verdict& v, const GlobalOpts& g) {
  if (v.truth == Truth::unknown && g.strict) return kExitBoundsHit;
  return kExitOk;
}

json lattice_to_json(const NatExtLattice& lat) {
  json j;
  j["mode"] = lat.mode;
  j["arity"] = lat.arity;
  j["count"] = lat.extensions.size();
  j["bottom"] = lat.bottom;
  j["top"] = lat.top;
  json exts = json::array();
  for (const auto& e : lat.extensions) {
    json t = json::array();
    for (Mask m : e.derivable) t.push_back(static_cast<std::uint64_t>(m));
    exts.push_back(t);
  }
  j["extensions"] = exts;
  json sup = json::array(), glb = json::array();
  for (const auto& row : lat.sup_of) sup.push_back(row);
  for (const auto& row : lat.glb_of) glb.push_back(row);
  j["sup_table"] = sup;
  j["glb_table"] = glb;
  json labels = json::array();
  for (const auto& f : lat.uy->formulas)
    labels.push_back(format_formula(f, lat.uy->sig, lat.uy->vars));
  j["universe"] = labels;
  return j;
}

std::string lattice_to_dot(const NatExtLattice& lat) {
  std::ostringstream out;
  out << "digraph natext {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < lat.extensions.size(); ++i) {
    std::string label = "ext" + std::to_string(i);
    if (static_cast<int>(i) == lat.bottom) label += " (minus, bottom)";
    if (static_cast<int>(i) == lat.top) label += " (plus, top)";
    out << "  n" << i << " [label=\"" << label << "\"];\n";
  }
  std::size_t k = lat.extensions.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j || !lat.leq[i][j]) continue;
      bool covering = true;
      for (std::size_t m = 0; m < k && covering; ++m)
        if (m != i && m != j && lat.leq[i][m] && lat.leq[m][j]) covering = false;
      if (covering) out << "  n" << i << " -> n" << j << ";\n";
    }
  out << "}\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  auto started = std::chrono::steady_clock::now();
  CLI::App app{"consequence relations, closure operators and natural extensions at desk scale"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_flag("--strict", g.strict, "exit 3 when a verdict stays unknown");
  app.add_flag("--timing", g.timing, "attach wall-clock timing to reports");
  app.add_flag("--serial", g.serial, "disable the parallel kernels");
  app.add_option("--threads", g.threads, "worker thread count (0 = library default)");
  app.add_option("--out", g.out, "write the report to a file instead of stdout");

  std::string logic_file, premises_str, goal_str, arity_str, to_vars, method = "minus";
  std::string suite = "all", emit_kind = "json", property, witness_file, struct_file;
  std::string structure_name, generate_set;
  std::uint64_t seed = 0;
  long budget = 200000;
  int depth_override = -1, iters_override = -1;

  auto add_bounds = [&](CLI::App* c) {
    c->add_option("--depth", depth_override, "override universe depth bound");
    c->add_option("--iters", iters_override, "override saturation round bound");
  };

  CLI::App* cmd_derive = app.add_subcommand("derive", "run a derivability query");
  cmd_derive->add_option("logic", logic_file)->required();
  cmd_derive->add_option("--premises", premises_str);
  cmd_derive->add_option("--goal", goal_str)->required();
  cmd_derive->add_option("--arity", arity_str, "query the n-ary part instead (omega = full)");
  add_bounds(cmd_derive);

  CLI::App* cmd_extend = app.add_subcommand("extend", "query a natural-extension construction");
  cmd_extend->add_option("logic", logic_file)->required();
  cmd_extend->add_option("--to-vars", to_vars)->required();
  cmd_extend->add_option("--method", method)->check(CLI::IsMember({"ls", "ss", "minus", "plus"}));
  cmd_extend->add_option("--arity", arity_str, "arity bound for plus (omega = unbounded)");
  cmd_extend->add_option("--premises", premises_str);
  cmd_extend->add_option("--goal", goal_str)->required();

  CLI::App* cmd_compare = app.add_subcommand("compare", "run all four constructions on one query");
  cmd_compare->add_option("logic", logic_file)->required();
  cmd_compare->add_option("--to-vars", to_vars)->required();
  cmd_compare->add_option("--premises", premises_str);
  cmd_compare->add_option("--goal", goal_str)->required();

  CLI::App* cmd_filters = app.add_subcommand("filters", "enumerate filters on finite structures");
  cmd_filters->add_option("structures", struct_file)->required();
  cmd_filters->add_option("--logic", logic_file)->required();
  cmd_filters->add_option("--structure", structure_name, "restrict to one structure");
  cmd_filters->add_option("--generate", generate_set, "also report the filter generated by a set");

  CLI::App* cmd_lattice = app.add_subcommand("natext-lattice", "enumerate natural extensions");
  cmd_lattice->add_option("logic", logic_file)->required();
  cmd_lattice->add_option("--to-vars", to_vars)->required();
  cmd_lattice->add_option("--emit", emit_kind)->check(CLI::IsMember({"json", "dot"}));

  CLI::App* cmd_search = app.add_subcommand("search", "look for classical failure witnesses");
  cmd_search->add_option("--property", property)
      ->required()
      ->check(CLI::IsMember({"ss-cut-failure", "ls-structurality-failure", "multiple-natexts"}));
  cmd_search->add_option("--seed", seed);
  cmd_search->add_option("--budget", budget);
  cmd_search->add_option("--witness", witness_file, "write the found witness to this file");

  CLI::App* cmd_check = app.add_subcommand("check", "run the invariant suites");
  cmd_check->add_option("logic", logic_file)->required();
  cmd_check->add_option("--suite", suite)
      ->check(CLI::IsMember({"chain", "closure", "filters", "roundtrip", "all"}));
  cmd_check->add_option("--to-vars", to_vars, "extension variables for chain/roundtrip");

  CLI::App* cmd_replay = app.add_subcommand("replay", "re-verify a witness file");
  cmd_replay->add_option("witness", witness_file)->required();

  // global flags remain usable after the subcommand name
  for (CLI::App* sub : {cmd_derive, cmd_extend, cmd_compare, cmd_filters, cmd_lattice, cmd_search,
                        cmd_check, cmd_replay})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitInputError : kExitOk;
  }

#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (*cmd_derive) {
      LogicPresentation l = load_presentation(logic_file);
      if (depth_override >= 0) l.bounds.max_depth = depth_override;
      if (iters_override >= 0) l.bounds.max_iterations = iters_override;
      auto gamma = parse_list(premises_str, l);
      Formula goal = parse_formula(goal_str, l.sig, l.vars);
      ArityBound bound = parse_arity(arity_str);
      Verdict v = bound.is_omega() ? derive(l, gamma, goal)
                                   : kary_part_of_logic(l, bound).query(gamma, goal);
      json j = report_header("derive");
      j["logic"] = logic_file;
      j["premises"] = premises_str;
      j["goal"] = goal_str;
      if (!bound.is_omega()) j["arity"] = bound.n;
      j["result"] = verdict_to_json(v, l);
      return emit(j, g, verdict_exit(v, g), started);
    }

    if (*cmd_extend || *cmd_compare) {
      LogicPresentation base = load_presentation(logic_file);
      ExtensionProblem p(base, split_names(to_vars));
      const auto& ly = p.over_y();
      auto gamma = parse_list(premises_str, ly);
      Formula goal = parse_formula(goal_str, ly.sig, ly.vars);
      if (*cmd_extend) {
        ArityBound bound = parse_arity(arity_str);
        Verdict v;
        ExtKind kind = ext_kind_from_string(method);
        switch (kind) {
          case ExtKind::ls: v = los_suszko(p, gamma, goal); break;
          case ExtKind::ss: v = shoesmith_smiley(p, gamma, goal); break;
          case ExtKind::minus: v = minus_query(p, gamma, goal); break;
          case ExtKind::plus: v = plus_kary_query(p, bound, gamma, goal); break;
        }
        json j = report_header("extend");
        j["logic"] = logic_file;
        j["to_vars"] = to_vars;
        j["method"] = method;
        if (!bound.is_omega()) j["arity"] = bound.n;
        j["premises"] = premises_str;
        j["goal"] = goal_str;
        j["result"] = verdict_to_json(v, ly);
        return emit(j, g, verdict_exit(v, g), started);
      }
      json j = report_header("compare");
      j["logic"] = logic_file;
      j["to_vars"] = to_vars;
      j["premises"] = premises_str;
      j["goal"] = goal_str;
      json results;
      Verdict vls = los_suszko(p, gamma, goal);
      Verdict vss = shoesmith_smiley(p, gamma, goal);
      Verdict vminus = minus_query(p, gamma, goal);
      Verdict vplus = plus_kary_query(p, ArityBound::omega(), gamma, goal);
      results["ls"] = verdict_to_json(vls, ly);
      results["ss"] = verdict_to_json(vss, ly);
      results["minus"] = verdict_to_json(vminus, ly);
      results["plus"] = verdict_to_json(vplus, ly);
      j["results"] = results;
      bool unknown = vls.truth == Truth::unknown || vss.truth == Truth::unknown ||
                     vminus.truth == Truth::unknown || vplus.truth == Truth::unknown;
      return emit(j, g, unknown && g.strict ? kExitBoundsHit : kExitOk, started);
    }

    if (*cmd_filters) {
      LogicPresentation l = load_presentation(logic_file);
      StructureFile sf = load_structures(struct_file, l.sig);
      json j = report_header("filters");
      j["logic"] = logic_file;
      json structures = json::array();
      for (const auto& a : sf.structures) {
        if (!structure_name.empty() && a.name() != structure_name) continue;
        auto lat = all_filters(l, a, exec_of(g));
        json js;
        js["name"] = a.name();
        js["carrier"] = a.carrier();
        json fl = json::array();
        for (Mask f : lat.filters) {
          json elems = json::array();
          for (int e = 0; e < a.size(); ++e)
            if (bit(f, e)) elems.push_back(a.carrier()[e]);
          fl.push_back(elems);
        }
        js["filters"] = fl;
        js["count"] = lat.filters.size();
        if (!generate_set.empty()) {
          Mask s = 0;
          bool resolvable = true;
          for (const auto& name : split_names(generate_set)) {
            int e = a.element_index(name);
            if (e < 0) {
              resolvable = false;  // elements belong to a different structure
              break;
            }
            s |= Mask{1} << e;
          }
          if (resolvable) {
            Mask gen = generated_filter(l, a, s, exec_of(g));
            json elems = json::array();
            for (int e = 0; e < a.size(); ++e)
              if (bit(gen, e)) elems.push_back(a.carrier()[e]);
            js["generated"] = elems;
          }
        }
        structures.push_back(js);
      }
      j["structures"] = structures;
      json homs = json::array();
      for (const auto& h : sf.homs) {
        const auto* a = sf.find(h.from);
        const auto* b = sf.find(h.to);
        if (!a || !b) throw std::invalid_argument("hom endpoints missing");
        std::vector<int> map(a->size(), -1);
        for (const auto& [from, to] : h.pairs) {
          int e = a->element_index(from), v = b->element_index(to);
          if (e < 0 || v < 0) throw std::invalid_argument("hom uses unknown elements");
          map[e] = v;
        }
        for (int v : map)
          if (v < 0) throw std::invalid_argument("hom leaves elements unmapped");
        auto rep = check_naturality(l, *a, *b, map, exec_of(g));
        json jh;
        jh["from"] = h.from;
        jh["to"] = h.to;
        jh["preimages_are_filters"] = rep.ok;
        // explicit preimage table: each filter on the target and its pullback
        json table = json::array();
        for (Mask f : all_filters(l, *b, exec_of(g)).filters) {
          Mask pre = 0;
          for (int e = 0; e < a->size(); ++e)
            if (bit(f, map[e])) pre |= Mask{1} << e;
          json row;
          json felems = json::array(), pelems = json::array();
          for (int e = 0; e < b->size(); ++e)
            if (bit(f, e)) felems.push_back(b->carrier()[e]);
          for (int e = 0; e < a->size(); ++e)
            if (bit(pre, e)) pelems.push_back(a->carrier()[e]);
          row["filter"] = felems;
          row["preimage"] = pelems;
          table.push_back(row);
        }
        jh["preimage_table"] = table;
        homs.push_back(jh);
      }
      j["homs"] = homs;
      bool all_ok = true;
      for (const auto& jh : homs)
        if (!jh["preimages_are_filters"].get<bool>()) all_ok = false;
      return emit(j, g, all_ok ? kExitOk : kExitPropertyFail, started);
    }

    if (*cmd_lattice) {
      LogicPresentation base = load_presentation(logic_file);
      ExtensionProblem p(base, split_names(to_vars));
      auto lat = enumerate_natural_extensions(p, exec_of(g));
      if (emit_kind == "dot") {
        std::string text = lattice_to_dot(lat);
        if (!g.out.empty()) {
          std::ofstream f(g.out);
          f << text;
        } else {
          std::cout << text;
        }
        return kExitOk;
      }
      json j = report_header("natext-lattice");
      j["logic"] = logic_file;
      j["to_vars"] = to_vars;
      j["lattice"] = lattice_to_json(lat);
      j["closed_under_sup_and_glb"] = lat.closed_under_sup_and_glb();
      j["bottom_is_minus"] = lat.bottom >= 0;
      j["top_is_plus"] = lat.top >= 0;
      bool ok = lat.closed_under_sup_and_glb() && lat.bottom >= 0 && lat.top >= 0;
      return emit(j, g, ok ? kExitOk : kExitPropertyFail, started);
    }

    if (*cmd_search) {
      SearchConfig cfg;
      cfg.seed = seed;
      cfg.budget = budget;
      auto outcome = search_counterexample(property, cfg, exec_of(g));
      json j = report_header("search");
      j["property"] = property;
      j["seed"] = seed;
      j["budget"] = budget;
      j["probes_used"] = outcome.probes_used;
      j["candidates"] = outcome.candidates_seen;
      if (outcome.witness) {
        std::string why;
        bool verified = verify_witness(*outcome.witness, &why);
        j["found"] = true;
        j["verified"] = verified;
        if (!verified) j["verify_error"] = why;
        j["witness"] = format_witness(*outcome.witness);
        if (!witness_file.empty()) save_witness(*outcome.witness, witness_file);
        return emit(j, g, verified ? kExitOk : kExitPropertyFail, started);
      }
      j["found"] = false;
      j["note"] = "inconclusive: no witness within budget";
      return emit(j, g, kExitPropertyFail, started);
    }

    if (*cmd_check) {
      LogicPresentation l = load_presentation(logic_file);
      json j = report_header("check");
      j["logic"] = logic_file;
      j["suite"] = suite;
      bool all_ok = true;
      json results;

      bool want_chain = suite == "chain" || suite == "all";
      bool want_closure = suite == "closure" || suite == "all";
      bool want_filters = suite == "filters" || suite == "all";
      bool want_roundtrip = suite == "roundtrip" || suite == "all";
      if ((want_chain || want_roundtrip) && to_vars.empty())
        throw std::invalid_argument("this suite needs --to-vars");

      if (want_closure) {
        auto u = make_universe(l);
        if (!u->exact) throw std::invalid_argument("closure suite needs an exact instance");
        auto op = as_closure_operator(l, u);
        auto check = is_closure_operator(op, exec_of(g));
        auto ct = closure_table(l, u, exec_of(g));
        auto st = structurality_check(ct);
        json jr;
        jr["closure_operator"] = check.ok();
        jr["structural"] = st.structural;
        jr["arity_profile"] = arity_profile(ct);
        jr["arity_note"] = "finite-arity analog of the cardinality of the relation";
        results["closure"] = jr;
        all_ok = all_ok && check.ok() && st.structural;
      }
      if (want_filters) {
        auto ftr = filters_equal_theories(l, exec_of(g));
        auto u = make_universe(l);
        auto a = formula_algebra_structure(l, *u);
        auto adj = check_adjunction(l, a, exec_of(g));
        json jr;
        jr["filters_equal_theories"] = ftr.equal;
        if (!ftr.equal) jr["witness_side"] = ftr.side;
        jr["adjunction"] = adj.ok;
        if (!adj.ok) jr["adjunction_error"] = adj.why;
        results["filters"] = jr;
        all_ok = all_ok && ftr.equal && adj.ok;
      }
      if (want_chain) {
        ExtensionProblem p(l, split_names(to_vars));
        auto rep = check_chain(p, exec_of(g));
        json jr;
        jr["ls_in_ss"] = rep.ls_in_ss;
        jr["ss_in_minus"] = rep.ss_in_minus;
        jr["minus_in_plus"] = rep.minus_in_plus;
        jr["ss_is_structural_closure_of_ls"] = rep.ss_is_structural_closure_of_ls;
        jr["minus_is_hull_of_ss"] = rep.minus_is_hull_of_ss;
        jr["plus_arity"] = rep.plus_arity;
        if (!rep.failures.empty()) jr["failures"] = rep.failures;
        results["chain"] = jr;
        all_ok = all_ok && rep.ok();
      }
      if (want_roundtrip) {
        ExtensionProblem p(l, split_names(to_vars));
        auto minus = minus_table(p, exec_of(g));
        int n = base_arity_profile(p);
        auto plus_n = kary_table(plus_table(p, exec_of(g)), ArityBound::finite(n));
        auto r1 = theoryfamily_roundtrip(minus, exec_of(g));
        auto r2 = theoryfamily_roundtrip(plus_n, exec_of(g));
        json jr;
        jr["minus_roundtrip"] = r1.identity;
        jr["plus_roundtrip"] = r2.identity;
        if (!r1.identity) jr["minus_error"] = r1.why;
        if (!r2.identity) jr["plus_error"] = r2.why;
        results["roundtrip"] = jr;
        all_ok = all_ok && r1.identity && r2.identity;
      }
      j["results"] = results;
      j["pass"] = all_ok;
      return emit(j, g, all_ok ? kExitOk : kExitPropertyFail, started);
    }

    if (*cmd_replay) {
      WitnessRecord w = load_witness(witness_file);
      std::string why;
      bool ok = verify_witness(w, &why);
      json j = report_header("replay");
      j["witness"] = witness_file;
      j["property"] = w.property;
      j["verified"] = ok;
      if (!ok) j["error"] = why;
      return emit(j, g, ok ? kExitOk : kExitPropertyFail, started);
    }
  } catch (const std::exception& e) {
    json j = report_header("error");
    j["error"] = e.what();
    emit(j, g, kExitInputError, started);
    return kExitInputError;
  }
  return kExitInputError;
}
