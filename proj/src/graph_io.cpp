#include "qgraph/graph_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace qg {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

[[noreturn]] void fail(const std::string& what, int line) {
  throw InputError(what + ", line " + std::to_string(line));
}

long long parse_int(const std::string& s, const std::string& what, int line) {
  if (s.empty()) fail("missing " + what, line);
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) fail("bad " + what + " '" + s + "'", line);
  for (size_t k = i; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) fail("bad " + what + " '" + s + "'", line);
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    fail(what + " '" + s + "' out of range", line);
  }
}

}  // namespace

Rational parse_rational(const std::string& tok) {
  auto bad = [&]() -> Rational { throw InputError("bad number '" + tok + "'"); };
  if (tok.empty()) return bad();
  auto slash = tok.find('/');
  auto integer = [&](const std::string& s) -> BigInt {
    if (s.empty()) bad();
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) bad();
    for (size_t k = i; k < s.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(s[k]))) bad();
    // strip leading zeros so the digits are not read as octal
    bool neg = s[0] == '-';
    size_t k = i;
    while (k + 1 < s.size() && s[k] == '0') ++k;
    BigInt v(s.substr(k));
    return neg ? BigInt(-v) : v;
  };
  if (slash != std::string::npos) {
    BigInt p = integer(tok.substr(0, slash));
    BigInt q = integer(tok.substr(slash + 1));
    if (q == 0) throw InputError("zero denominator in '" + tok + "'");
    return Rational(p, q);
  }
  // decimal with optional exponent
  std::string mant = tok;
  long exp10 = 0;
  auto epos = tok.find_first_of("eE");
  if (epos != std::string::npos) {
    mant = tok.substr(0, epos);
    exp10 = static_cast<long>(integer(tok.substr(epos + 1)));
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant = mant.substr(1);
  }
  auto dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty()) return bad();
  for (char c : digits)
    if (!std::isdigit(static_cast<unsigned char>(c))) return bad();
  if (exp10 > 400 || exp10 < -400) return bad();
  size_t lead = 0;
  while (lead + 1 < digits.size() && digits[lead] == '0') ++lead;
  BigInt num(digits.substr(lead));
  BigInt den = 1;
  BigInt ten = 10;
  for (long k = 0; k < exp10; ++k) num *= ten;
  for (long k = 0; k < -exp10; ++k) den *= ten;
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

std::string format_rational(const Rational& q) {
  BigInt n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

GraphFile parse_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  int stage = 0;  // 0 header, 1 vertices, 2 body
  long long nv = 0;
  GraphFile out;
  std::vector<std::optional<Rational>> lengths;
  std::vector<std::pair<int, double>> form_lines;
  bool any_form = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tok = split(line);
    if (stage == 0) {
      if (tok.size() != 2 || tok[0] != "qgraph") fail("expected header 'qgraph 1'", lineno);
      if (tok[1] != "1") fail("unsupported format version " + tok[1], lineno);
      stage = 1;
    } else if (stage == 1) {
      if (tok.size() != 2 || tok[0] != "vertices") fail("expected 'vertices <n>'", lineno);
      nv = parse_int(tok[1], "vertex count", lineno);
      if (nv < 0 || nv > 1000000) fail("vertex count " + tok[1] + " out of range", lineno);
      out.graph = Graph(static_cast<int>(nv));
      stage = 2;
    } else if (tok[0] == "edge") {
      if (tok.size() != 4 && tok.size() != 5) fail("expected 'edge <id> <a> <b> [length]'", lineno);
      long long id = parse_int(tok[1], "edge id", lineno);
      if (id != out.graph.edge_count())
        fail("edge id " + tok[1] + " out of order, expected " + std::to_string(out.graph.edge_count()), lineno);
      long long a = parse_int(tok[2], "vertex", lineno);
      long long b = parse_int(tok[3], "vertex", lineno);
      for (long long v : {a, b})
        if (v < 0 || v >= nv) fail("vertex " + std::to_string(v) + " out of range", lineno);
      out.graph.add_edge(static_cast<int>(a), static_cast<int>(b));
      if (tok.size() == 5) {
        Rational q;
        try {
          q = parse_rational(tok[4]);
        } catch (const InputError& e) {
          fail(e.what(), lineno);
        }
        if (q <= 0) fail("nonpositive length " + tok[4], lineno);
        lengths.push_back(q);
      } else {
        lengths.push_back(std::nullopt);
      }
    } else if (tok[0] == "form") {
      if (tok.size() != 3) fail("expected 'form <edge id> <value>'", lineno);
      long long e = parse_int(tok[1], "edge id", lineno);
      Rational v;
      try {
        v = parse_rational(tok[2]);
      } catch (const InputError& err) {
        fail(err.what(), lineno);
      }
      form_lines.push_back({static_cast<int>(e), static_cast<double>(v)});
      if (e < 0) fail("edge " + tok[1] + " out of range", lineno);
      any_form = true;
    } else {
      fail("unknown directive '" + tok[0] + "'", lineno);
    }
  }
  if (stage < 2) fail("incomplete header", lineno);
  const int E = out.graph.edge_count();
  bool all = true, none = true;
  for (auto& l : lengths) (l ? none : all) = false;
  if (!all && !none) throw InputError("either every edge or no edge must carry a length");
  if (all && E > 0) {
    std::vector<Rational> q;
    for (auto& l : lengths) q.push_back(*l);
    out.metric = MetricGraph(out.graph, q);
  } else if (E == 0) {
    out.metric = MetricGraph(out.graph, std::vector<Rational>{});
  }
  if (any_form) {
    OneForm f = zero_form(out.graph);
    for (auto [e, v] : form_lines) {
      if (e >= E) throw InputError("form refers to edge " + std::to_string(e) + " out of range");
      f.a[e] = v;
    }
    out.form = f;
  }
  return out;
}

GraphFile parse_graph_string(const std::string& text) {
  std::istringstream is(text);
  return parse_graph(is);
}

GraphFile parse_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse_graph(in);
}

void write_graph(std::ostream& out, const Graph& g, const std::vector<double>* lengths,
                 const std::vector<Rational>* exact, const OneForm* form) {
  out << "qgraph 1\n";
  out << "vertices " << g.vertex_count() << "\n";
  char buf[64];
  for (int e = 0; e < g.edge_count(); ++e) {
    out << "edge " << e << " " << g.edge(e).a << " " << g.edge(e).b;
    if (exact) {
      out << " " << format_rational((*exact)[e]);
    } else if (lengths) {
      std::snprintf(buf, sizeof buf, "%.17g", (*lengths)[e]);
      out << " " << buf;
    }
    out << "\n";
  }
  if (form)
    for (int e = 0; e < g.edge_count(); ++e)
      if (form->a[e] != 0) {
        std::snprintf(buf, sizeof buf, "%.17g", form->a[e]);
        out << "form " << e << " " << buf << "\n";
      }
}

void write_graph(std::ostream& out, const MetricGraph& g, const OneForm* form) {
  write_graph(out, g.graph, &g.length, g.exact ? &*g.exact : nullptr, form);
}

}  // namespace qg
