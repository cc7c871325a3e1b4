#include "conseq/report.hpp"

#include <fstream>
#include <sstream>

namespace conseq {

using nlohmann::json;

json report_header(const std::string& command) {
  json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  return j;
}

json derivation_to_json(const Derivation& d, const LogicPresentation& l) {
  json steps = json::array();
  for (const auto& s : d.steps) {
    json js;
    js["derived"] = format_formula(s.derived, l.sig, l.vars);
    js["rule"] = s.rule;
    if (s.rule >= 0) {
      json sub = json::object();
      for (const auto& [v, img] : s.subst.mapping())
        sub[l.vars.at(v)] = format_formula(img, l.sig, l.vars);
      js["subst"] = sub;
      json used = json::array();
      for (const auto& u : s.used) used.push_back(format_formula(u, l.sig, l.vars));
      js["premises"] = used;
    }
    steps.push_back(js);
  }
  return steps;
}

json verdict_to_json(const Verdict& v, const LogicPresentation& l) {
  json j;
  j["verdict"] = v.truth == Truth::yes ? "yes" : v.truth == Truth::no ? "no" : "unknown";
  j["exhaustive"] = v.exhaustive;
  if (!v.note.empty()) j["note"] = v.note;
  if (v.derivation) j["derivation"] = derivation_to_json(*v.derivation, l);
  return j;
}

// --- witness files ----------------------------------------------------------

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

std::string format_witness(const WitnessRecord& w) {
  std::ostringstream out;
  out << format_presentation(w.base);
  if (!w.extend_vars.empty()) out << "extend-to " << join(w.extend_vars, " ") << '\n';
  if (!w.property.empty()) out << "property " << w.property << '\n';
  for (const auto& c : w.claims) {
    out << "claim " << c.kind;
    if (c.arity) out << ':' << c.arity;
    out << " ; " << join(c.premises, ", ") << " ; " << c.goal << " ; ";
    if (c.kind == "cut-failure-ss")
      out << join(c.delta, ", ");
    else if (c.kind == "structurality-failure-ls")
      out << c.subst;
    else
      out << (c.expect_yes ? "yes" : "no");
    out << '\n';
  }
  return out.str();
}

WitnessRecord parse_witness(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string presentation_text;
  WitnessRecord w;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.rfind("extend-to", 0) == 0) {
      std::istringstream ws(t.substr(9));
      std::string v;
      while (ws >> v) w.extend_vars.push_back(v);
    } else if (t.rfind("property", 0) == 0) {
      w.property = trim(t.substr(8));
    } else if (t.rfind("claim", 0) == 0) {
      std::string body = t.substr(5);
      // kind[:arity] ; premises ; goal ; tail
      std::vector<std::string> fields;
      std::string cur;
      for (char ch : body) {
        if (ch == ';') {
          fields.push_back(trim(cur));
          cur.clear();
        } else {
          cur += ch;
        }
      }
      fields.push_back(trim(cur));
      if (fields.size() != 4) throw std::invalid_argument("claim needs four ';'-separated fields");
      Claim c;
      auto colon = fields[0].find(':');
      c.kind = colon == std::string::npos ? fields[0] : fields[0].substr(0, colon);
      if (colon != std::string::npos) c.arity = std::stoi(fields[0].substr(colon + 1));
      {
        std::string curp;
        int depth = 0;
        for (char ch : fields[1]) {
          if (ch == '(') ++depth;
          if (ch == ')') --depth;
          if (ch == ',' && depth == 0) {
            if (!trim(curp).empty()) c.premises.push_back(trim(curp));
            curp.clear();
            continue;
          }
          curp += ch;
        }
        if (!trim(curp).empty()) c.premises.push_back(trim(curp));
      }
      c.goal = fields[2];
      if (c.kind == "cut-failure-ss") {
        std::string curd;
        int depth = 0;
        for (char ch : fields[3]) {
          if (ch == '(') ++depth;
          if (ch == ')') --depth;
          if (ch == ',' && depth == 0) {
            if (!trim(curd).empty()) c.delta.push_back(trim(curd));
            curd.clear();
            continue;
          }
          curd += ch;
        }
        if (!trim(curd).empty()) c.delta.push_back(trim(curd));
      } else if (c.kind == "structurality-failure-ls") {
        c.subst = fields[3];
      } else {
        c.expect_yes = fields[3] == "yes";
      }
      w.claims.push_back(std::move(c));
    } else {
      presentation_text += line + "\n";
    }
  }
  w.base = parse_presentation(presentation_text);
  return w;
}

WitnessRecord load_witness(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_witness(ss.str());
}

void save_witness(const WitnessRecord& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << format_witness(w);
}

}  // namespace conseq
