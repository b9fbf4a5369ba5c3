#include "evfleet/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace evfleet {

namespace {

constexpr const char* kObjRow = "obj";

char sense_code(RowSense s) {
  switch (s) {
    case RowSense::LessEqual: return 'L';
    case RowSense::GreaterEqual: return 'G';
    case RowSense::Equal: return 'E';
  }
  return 'E';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "milp_core.model_io", "cannot write " + path.string());
  out << text;
}

std::string header_comment(const MilpModel& model, char lead) {
  const auto& meta = model.metadata();
  std::string out;
  out += lead;
  out += " evfleet model ";
  out += to_string(meta.problem);
  out += " variant=";
  out += to_string(meta.variant);
  out += " instance=" + (meta.instance_hash.empty() ? std::string("-") : meta.instance_hash);
  if (!meta.label.empty()) out += " label=" + meta.label;
  out += '\n';
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_mps(const MilpModel& model) {
  const auto& vars = model.variables();
  const auto& rows = model.constraints();

  // Column-major view of the matrix.
  std::vector<std::vector<std::pair<std::size_t, double>>> by_col(vars.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& term : rows[r].terms) by_col[term.col].emplace_back(r, term.coef);
  }

  std::ostringstream out;
  out << header_comment(model, '*');
  std::string name(to_string(model.metadata().problem));
  if (!model.metadata().label.empty()) name += "_" + model.metadata().label;
  out << "NAME " << name << "\nROWS\n N  " << kObjRow << "\n";
  for (const auto& row : rows) out << " " << sense_code(row.sense) << "  " << row.name << "\n";

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (std::size_t c = 0; c < vars.size(); ++c) {
    const bool integral = vars[c].is_integral();
    if (integral != in_int) {
      out << "    MARKER" << marker++ << "  'MARKER'  " << (integral ? "'INTORG'" : "'INTEND'")
          << "\n";
      in_int = integral;
    }
    const double obj = model.objective()[c];
    if (obj != 0.0 || by_col[c].empty()) {
      out << "    " << vars[c].name << "  " << kObjRow << "  " << format_number(obj) << "\n";
    }
    for (const auto& [r, coef] : by_col[c]) {
      out << "    " << vars[c].name << "  " << rows[r].name << "  " << format_number(coef) << "\n";
    }
  }
  if (in_int) out << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";

  out << "RHS\n";
  for (const auto& row : rows) {
    if (row.rhs != 0.0) out << "    RHS  " << row.name << "  " << format_number(row.rhs) << "\n";
  }

  out << "BOUNDS\n";
  for (const auto& v : vars) {
    if (v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0) {
      out << " BV BND  " << v.name << "\n";
      continue;
    }
    if (v.lower == v.upper) {
      out << " FX BND  " << v.name << "  " << format_number(v.lower) << "\n";
      continue;
    }
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << " FR BND  " << v.name << "\n";
      continue;
    }
    if (std::isinf(v.lower)) {
      out << " MI BND  " << v.name << "\n";
    } else if (v.lower != 0.0) {
      out << " LO BND  " << v.name << "  " << format_number(v.lower) << "\n";
    }
    if (!std::isinf(v.upper)) {
      out << " UP BND  " << v.name << "  " << format_number(v.upper) << "\n";
    } else if (v.is_integral()) {
      out << " PL BND  " << v.name << "\n";
    }
  }
  out << "ENDATA\n";
  return out.str();
}

std::string lp_name(const std::string& name) {
  std::string out = name;
  for (char& ch : out) {
    if (ch == '[') ch = '(';
    else if (ch == ']') ch = ')';
    else if (ch == '=') ch = '_';
  }
  return out;
}

namespace {

void emit_expr(std::ostringstream& out, const std::vector<std::pair<std::size_t, double>>& terms,
               const std::vector<VarRef>& vars) {
  int on_line = 0;
  for (const auto& [col, coef] : terms) {
    out << (coef < 0 ? " - " : " + ") << format_number(std::fabs(coef)) << " "
        << lp_name(vars[col].name);
    if (++on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
  }
}

}  // namespace

std::string to_lp(const MilpModel& model) {
  const auto& vars = model.variables();
  std::ostringstream out;
  out << header_comment(model, '\\');
  out << "Minimize\n obj:";
  std::vector<std::pair<std::size_t, double>> obj_terms;
  for (std::size_t c = 0; c < vars.size(); ++c) {
    if (model.objective()[c] != 0.0) obj_terms.emplace_back(c, model.objective()[c]);
  }
  if (obj_terms.empty() && !vars.empty()) obj_terms.emplace_back(0, 0.0);
  emit_expr(out, obj_terms, vars);
  out << "\nSubject To\n";
  for (const auto& row : model.constraints()) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (const auto& t : row.terms) terms.emplace_back(t.col, t.coef);
    if (terms.empty()) {
      if (vars.empty()) continue;
      terms.emplace_back(0, 0.0);
    }
    out << " " << lp_name(row.name) << ":";
    emit_expr(out, terms, vars);
    const char* op = row.sense == RowSense::LessEqual ? "<=" : row.sense == RowSense::GreaterEqual ? ">=" : "=";
    out << " " << op << " " << format_number(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const auto& v : vars) {
    if (v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
    const std::string n = lp_name(v.name);
    if (v.lower == v.upper) {
      out << " " << n << " = " << format_number(v.lower) << "\n";
    } else if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << " " << n << " free\n";
    } else {
      const std::string lo = std::isinf(v.lower) ? "-inf" : format_number(v.lower);
      const std::string hi = std::isinf(v.upper) ? "+inf" : format_number(v.upper);
      if (v.lower == 0.0 && std::isinf(v.upper)) continue;
      out << " " << lo << " <= " << n << " <= " << hi << "\n";
    }
  }
  bool any_general = false, any_binary = false;
  for (const auto& v : vars) {
    any_general = any_general || v.kind == VarKind::Integer;
    any_binary = any_binary || v.kind == VarKind::Binary;
  }
  if (any_general) {
    out << "General\n";
    for (const auto& v : vars)
      if (v.kind == VarKind::Integer) out << " " << lp_name(v.name) << "\n";
  }
  if (any_binary) {
    out << "Binary\n";
    for (const auto& v : vars)
      if (v.kind == VarKind::Binary) out << " " << lp_name(v.name) << "\n";
  }
  out << "End\n";
  return out.str();
}

void write_mps(const std::filesystem::path& path, const MilpModel& model) {
  write_text(path, to_mps(model));
}

void write_lp(const std::filesystem::path& path, const MilpModel& model) {
  write_text(path, to_lp(model));
}

namespace {

[[noreturn]] void mps_error(int line, const std::string& why) {
  throw Error(ErrorCode::ParseError, "milp_core.parse_mps",
              "line " + std::to_string(line) + ": " + why);
}

double parse_double(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') mps_error(line, "bad number '" + tok + "'");
  return v;
}

}  // namespace

ParsedMps parse_mps(const std::string& text) {
  ParsedMps out;
  std::unordered_map<std::string, std::size_t> row_index, col_index;
  std::string obj_name;
  enum class Section { None, Rows, Columns, Rhs, Bounds, Done } section = Section::None;
  bool integral = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty() || raw[0] == '*') continue;
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (raw[0] != ' ' && raw[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") out.name = tok.size() > 1 ? tok[1] : "";
      else if (head == "ROWS") section = Section::Rows;
      else if (head == "COLUMNS") section = Section::Columns;
      else if (head == "RHS") section = Section::Rhs;
      else if (head == "BOUNDS") section = Section::Bounds;
      else if (head == "ENDATA") section = Section::Done;
      else mps_error(line_no, "unknown section " + head);
      continue;
    }

    switch (section) {
      case Section::Rows: {
        if (tok.size() != 2) mps_error(line_no, "ROWS entry needs 2 fields");
        if (tok[0] == "N") {
          if (obj_name.empty()) obj_name = tok[1];
          continue;
        }
        RowSense s;
        if (tok[0] == "L") s = RowSense::LessEqual;
        else if (tok[0] == "G") s = RowSense::GreaterEqual;
        else if (tok[0] == "E") s = RowSense::Equal;
        else mps_error(line_no, "bad row type " + tok[0]);
        row_index.emplace(tok[1], out.row_names.size());
        out.row_names.push_back(tok[1]);
        out.row_sense.push_back(s);
        out.rhs.push_back(0.0);
        break;
      }
      case Section::Columns: {
        if (tok.size() == 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") integral = true;
          else if (tok[2] == "'INTEND'") integral = false;
          else mps_error(line_no, "bad marker");
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) mps_error(line_no, "COLUMNS entry needs 3 or 5 fields");
        auto [it, fresh] = col_index.emplace(tok[0], out.col_names.size());
        if (fresh) {
          out.col_names.push_back(tok[0]);
          out.col_integral.push_back(integral);
          out.col_lower.push_back(0.0);
          out.col_upper.push_back(integral ? 1.0 : kInf);
          out.objective.push_back(0.0);
        }
        const std::size_t c = it->second;
        for (std::size_t n = 1; n + 1 < tok.size(); n += 2) {
          const double v = parse_double(tok[n + 1], line_no);
          if (tok[n] == obj_name) {
            out.objective[c] = v;
            continue;
          }
          const auto r = row_index.find(tok[n]);
          if (r == row_index.end()) mps_error(line_no, "unknown row " + tok[n]);
          if (v != 0.0) out.entries[{r->second, c}] = v;
        }
        break;
      }
      case Section::Rhs: {
        if (tok.size() != 3 && tok.size() != 5) mps_error(line_no, "RHS entry needs 3 or 5 fields");
        for (std::size_t n = 1; n + 1 < tok.size(); n += 2) {
          if (tok[n] == obj_name) continue;
          const auto r = row_index.find(tok[n]);
          if (r == row_index.end()) mps_error(line_no, "unknown row " + tok[n]);
          out.rhs[r->second] = parse_double(tok[n + 1], line_no);
        }
        break;
      }
      case Section::Bounds: {
        if (tok.size() < 3) mps_error(line_no, "BOUNDS entry too short");
        const auto ci = col_index.find(tok[2]);
        if (ci == col_index.end()) mps_error(line_no, "unknown column " + tok[2]);
        const std::size_t c = ci->second;
        const std::string& type = tok[0];
        auto value = [&]() {
          if (tok.size() < 4) mps_error(line_no, "bound needs a value");
          return parse_double(tok[3], line_no);
        };
        const bool int_default = out.col_integral[c] && out.col_upper[c] == 1.0;
        if (type == "UP") out.col_upper[c] = value();
        else if (type == "LO") {
          out.col_lower[c] = value();
          if (int_default) out.col_upper[c] = kInf;
        } else if (type == "FX") out.col_lower[c] = out.col_upper[c] = value();
        else if (type == "FR") out.col_lower[c] = -kInf, out.col_upper[c] = kInf;
        else if (type == "MI") out.col_lower[c] = -kInf;
        else if (type == "PL") out.col_upper[c] = kInf;
        else if (type == "BV") out.col_lower[c] = 0.0, out.col_upper[c] = 1.0, out.col_integral[c] = true;
        else mps_error(line_no, "bad bound type " + type);
        break;
      }
      case Section::None:
      case Section::Done:
        mps_error(line_no, "data outside a section");
    }
  }
  if (section != Section::Done) mps_error(line_no, "missing ENDATA");
  return out;
}

ParsedMps read_mps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "milp_core.read_mps", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mps(buf.str());
}

std::string compare_with_model(const ParsedMps& parsed, const MilpModel& model) {
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  if (parsed.col_names.size() != vars.size()) return "column count differs";
  if (parsed.row_names.size() != rows.size()) return "row count differs";
  for (std::size_t c = 0; c < vars.size(); ++c) {
    const auto& v = vars[c];
    if (parsed.col_names[c] != v.name) return "column " + std::to_string(c) + " name differs";
    if (parsed.col_integral[c] != v.is_integral()) return "integrality of " + v.name + " differs";
    if (parsed.col_lower[c] != v.lower || parsed.col_upper[c] != v.upper)
      return "bounds of " + v.name + " differ";
    if (parsed.objective[c] != model.objective()[c]) return "objective of " + v.name + " differs";
  }
  std::size_t nnz = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (parsed.row_names[r] != rows[r].name) return "row " + std::to_string(r) + " name differs";
    if (parsed.row_sense[r] != rows[r].sense) return "sense of " + rows[r].name + " differs";
    if (parsed.rhs[r] != rows[r].rhs) return "rhs of " + rows[r].name + " differs";
    for (const auto& t : rows[r].terms) {
      const auto it = parsed.entries.find({r, t.col});
      if (it == parsed.entries.end() || it->second != t.coef)
        return "coefficient (" + rows[r].name + ", " + vars[t.col].name + ") differs";
      ++nnz;
    }
  }
  if (nnz != parsed.entries.size()) return "nonzero count differs";
  return {};
}

}  // namespace evfleet
