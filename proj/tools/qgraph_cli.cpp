// qgraph: command-line front end. Reports are line-oriented text written
// once at the end; exit status 1 = input, 2 = numeric, 3 = inconclusive.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qgraph/bloch_inverse.hpp"
#include "qgraph/graph_io.hpp"
#include "qgraph/isospec.hpp"
#include "qgraph/orbit_trace.hpp"
#include "qgraph/parallel.hpp"

using namespace qg;

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0 ? 0.0 : x);
  return buf;
}

std::string vec(const std::vector<long>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s + "]";
}

MetricGraph load_metric(const GraphFile& f, const std::string& path) {
  if (!f.metric) throw InputError(path + ": every edge needs a length");
  return *f.metric;
}

void gram_lines(std::ostream& out, const std::string& key, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i) {
    out << key;
    for (int j = 0; j < m.cols(); ++j) out << ' ' << num(m(i, j));
    out << '\n';
  }
}

struct Common {
  unsigned seed = 0;
  std::string output;
};

// ------------------------------------------------------------------ spectrum

struct SpectrumArgs {
  std::string file;
  double k_max = 20;
  bool zero_form = false;
};

void run_spectrum(const SpectrumArgs& a, std::ostream& out) {
  auto f = parse_graph_file(a.file);
  MetricGraph g = load_metric(f, a.file);
  OneForm alpha = (f.form && !a.zero_form) ? *f.form : zero_form(g.graph);
  auto s = eigenvalues(g, alpha, a.k_max);
  out << "spectrum kmax " << num(a.k_max) << " vertices " << g.vertex_count() << " edges " << g.edge_count()
      << " total " << num(g.total_length()) << '\n';
  for (size_t i = 0; i < s.k.size(); ++i) out << "k " << num(s.k[i]) << ' ' << s.mult[i] << '\n';
  out << "count " << s.count_upto(a.k_max) << " weyl " << num(weyl_check(s, g.total_length())) << '\n';
}

// ------------------------------------------------------------------ trace

struct TraceArgs {
  std::string file;
  double L_max = 5;
  double sigma = 0;
  double k_max = 0;
  bool geometric_only = false;
};

void run_trace(const TraceArgs& a, std::ostream& out) {
  auto f = parse_graph_file(a.file);
  MetricGraph g = load_metric(f, a.file);
  OneForm alpha = f.form ? *f.form : zero_form(g.graph);
  auto ls = length_spectrum(g, alpha, a.L_max);
  out << "trace Lmax " << num(a.L_max) << " orbits " << ls.orbits.orbits.size() << '\n';
  for (const auto& e : ls.entries) {
    out << "length " << num(e.length);
    if (e.exact_length) out << " exact " << format_rational(*e.exact_length);
    out << " orbits " << e.orbits.size() << " aggregate " << num(e.aggregate(1));
    if (e.constant_exact) out << " zero_flux_exact " << format_rational(*e.constant_exact);
    out << '\n';
  }
  if (a.geometric_only) return;
  double sigma = a.sigma > 0 ? a.sigma : default_trace_window(g, a.L_max);
  double k_max = a.k_max > 0 ? a.k_max : std::sqrt(2 * std::log(1e8)) / sigma + 5;
  auto s = eigenvalues(g, alpha, k_max);
  auto r = trace_check(g, alpha, s, sigma, a.L_max);
  out << "window sigma " << num(sigma) << " kmax " << num(k_max) << '\n';
  for (const auto& p : r.peaks)
    out << "orbitlen " << num(p.length) << " spectral " << num(p.spectral) << " geometric " << num(p.geometric)
        << " relerr " << num(p.relerr) << '\n';
  out << "constant " << num(r.constant) << " V-E " << num(r.euler_ve) << " V-E-1 " << num(r.euler_ve1) << " closer "
      << r.closer << '\n';
  out << "max_relerr " << num(r.max_relerr) << '\n';
}

// ------------------------------------------------------------------ bloch

struct BlochArgs {
  std::string file;
  std::string source = "exact";
  std::string stage = "full";
  std::string emit;
};

void report_frequencies(const RecoveredOracle& o, std::ostream& out) {
  auto t = o.table();
  out << "rank " << t.rank << '\n';
  for (size_t i = 0; i < t.generators.size(); ++i) out << "generator " << i << " mu " << num(t.generators[i]) << '\n';
  for (const auto& e : t.entries)
    out << "entry " << vec(e.coords) << " length " << num(e.length) << " mu " << num(e.mu) << " nu " << num(e.nu)
        << '\n';
}

void report_albanese(const LengthOracle& o, std::ostream& out) {
  auto a = recover_albanese(o);
  for (const auto& b : a.basis) out << "cycle " << vec(b) << '\n';
  gram_lines(out, "gram", a.gram);
  auto c = complexity_equilateral(a.gram);
  out << "det " << num(c.det) << " sqrt " << num(c.root) << '\n';
}

void report_blocks(const LengthOracle& o, std::ostream& out) {
  auto r = recover_blocks(o);
  const auto& s = r.structure;
  out << "blocks " << s.block_count() << " nodes " << s.tree.vertex_count() << '\n';
  for (int b = 0; b < s.block_count(); ++b)
    out << "block " << b << " rank " << s.block_rank[b] << " node " << s.node_of_block(b) << '\n';
  for (int e = 0; e < s.tree.edge_count(); ++e)
    out << "bridge " << s.tree.edge(e).a << ' ' << s.tree.edge(e).b << " length " << num(s.lengths[e]) << '\n';
}

void report_planarity(const LengthOracle& o, std::ostream& out) {
  auto p = recover_planarity(o);
  out << "planar " << (p ? "yes" : "no") << '\n';
  if (p)
    for (const auto& c : p->cycles) out << "cycle " << vec(c) << '\n';
}

void report_dual(const LengthOracle& o, std::ostream& out) {
  auto d = recover_dual(o);
  out << "faces " << d.faces.size() << " outer " << d.outer << '\n';
  for (size_t i = 0; i < d.faces.size(); ++i) out << "face " << i << ' ' << vec(d.faces[i]) << '\n';
  for (const auto& e : d.graph.edges()) out << "dual_edge " << e.a << ' ' << e.b << '\n';
}

void run_bloch(const BlochArgs& a, const Common& c, std::ostream& out) {
  auto f = parse_graph_file(a.file);
  MetricGraph g = load_metric(f, a.file);
  OneForm alpha = f.form ? *f.form : generic_one_form(g, c.seed);
  std::shared_ptr<const BlochSource> src;
  if (a.source == "exact")
    src = std::make_shared<ExactBlochSource>(g, alpha);
  else if (a.source == "numeric")
    src = std::make_shared<NumericBlochSource>(g, alpha);
  else
    throw InputError("unknown source " + a.source);
  auto o = recover_homology_lengths(src);
  out << "bloch source " << a.source << " stage " << a.stage << " total " << num(src->total_length()) << '\n';
  if (a.stage == "frequencies") {
    report_frequencies(*o, out);
  } else if (a.stage == "albanese") {
    report_albanese(*o, out);
  } else if (a.stage == "blocks") {
    report_blocks(*o, out);
  } else if (a.stage == "planarity") {
    report_planarity(*o, out);
  } else if (a.stage == "dual") {
    report_dual(*o, out);
  } else if (a.stage == "full") {
    MetricGraph r = recover_quantum_graph(*o);
    std::ostringstream gs;
    write_graph(gs, r);
    out << gs.str();
    double tol = a.source == "exact" ? 1e-9 : 1e-4;
    out << "isomorphic_to_input " << (metric_isomorphic(r, g, tol) ? "yes" : "no") << '\n';
    if (!a.emit.empty()) {
      std::ofstream e(a.emit);
      if (!e) throw InputError("cannot write " + a.emit);
      e << gs.str();
    }
  } else {
    throw InputError("unknown stage " + a.stage);
  }
}

// ------------------------------------------------------------------ isospec

struct IsospecArgs {
  std::string search;
  std::string seidel;
  std::vector<std::string> bound;
  double k_max = 30;
  std::string resolution = "1/2";
};

void report_family(const Family& fam, size_t idx, std::ostream& out) {
  out << "family " << idx << " size " << fam.members.size() << ' '
      << (fam.confirmed ? "numerically_isospectral" : "unconfirmed") << " same_total " << fam.same_total
      << " same_min_edge " << fam.same_min_edge << " half_combinations " << fam.half_combinations << '\n';
  for (const auto& m : fam.members) {
    out << "  member";
    for (int e = 0; e < m.edge_count(); ++e) {
      out << ' ' << m.graph.edge(e).a << '-' << m.graph.edge(e).b << ':';
      out << (m.exact ? format_rational((*m.exact)[e]) : num(m.length[e]));
    }
    out << '\n';
  }
}

SwitchingScheme read_scheme(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<std::string> parts(1);
  std::string line;
  while (std::getline(in, line)) {
    if (line == "---") {
      parts.emplace_back();
      continue;
    }
    parts.back() += line + '\n';
  }
  if (parts.size() < 2) throw InputError(path + ": expected two graphs separated by ---");
  SwitchingScheme s{parse_graph_string(parts[0]).graph, parse_graph_string(parts[1]).graph, {}};
  if (parts.size() > 2) {
    std::istringstream ps(parts[2]);
    while (std::getline(ps, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<bool> row;
      for (char ch : line) {
        if (ch == '0' || ch == '1')
          row.push_back(ch == '1');
        else if (!std::isspace(static_cast<unsigned char>(ch)))
          throw InputError(path + ": pattern rows hold 0 and 1 only");
      }
      s.pattern.push_back(row);
    }
    return s;
  }
  auto found = find_seidel_scheme(s.g1, s.g2);
  if (!found) throw InputError(path + ": no pattern gives a non-isomorphic pair");
  return *found;
}

void run_isospec(const IsospecArgs& a, std::ostream& out) {
  bool any = false;
  if (!a.bound.empty()) {
    any = true;
    if (a.bound.size() != 2) throw InputError("--bound takes L and chi");
    Rational L = parse_rational(a.bound[0]);
    int chi = std::stoi(a.bound[1]);
    auto b = family_size_bound(L, chi);
    out << "bound L " << format_rational(L) << " chi " << chi << " M " << b.M << '\n';
    out << "bound exact " << format_rational(b.exact) << '\n';
    out << "bound ceiling " << b.ceiling << '\n';
    out << "bound 7LlnL " << num(b.log_simple) << '\n';
  }
  if (!a.seidel.empty()) {
    any = true;
    auto s = read_scheme(a.seidel);
    auto p = seidel_switch(s);
    out << "seidel vertices " << p.g.vertex_count() << " edges " << p.g.edge_count() << '\n';
    for (const auto& row : s.pattern) {
      out << "pattern ";
      for (bool x : row) out << (x ? '1' : '0');
      out << '\n';
    }
    auto x = combinatorial_spectrum(p.g), y = combinatorial_spectrum(p.switched);
    double d = 0;
    for (size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    out << "isomorphic " << (isomorphic(p.g, p.switched) ? "yes" : "no") << '\n';
    out << "combinatorial_maxdiff " << num(d) << '\n';
    auto fam = group_isospectral({equilateral(p.g), equilateral(p.switched)}, a.k_max);
    out << "quantum_isospectral_kmax " << num(a.k_max) << ' ' << (fam.size() == 1 ? "yes" : "no") << '\n';
    std::ostringstream gs;
    write_graph(gs, p.g);
    out << gs.str() << "---\n";
    gs.str("");
    write_graph(gs, p.switched);
    out << gs.str();
  }
  if (!a.search.empty()) {
    any = true;
    SearchOptions o;
    o.k_max = a.k_max;
    o.resolution = parse_rational(a.resolution);
    Rational L = parse_rational(a.search);
    auto r = quantum_isospectral_search(L, o);
    size_t nontrivial = 0;
    for (const auto& f : r.families) nontrivial += f.members.size() > 1;
    out << "search Lmax " << format_rational(L) << " candidates " << r.candidates << " families " << nontrivial
        << '\n';
    size_t idx = 0;
    for (const auto& f : r.families)
      if (f.members.size() > 1) report_family(f, idx++, out);
  }
  if (!any) throw InputError("isospec needs --search, --seidel or --bound");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of magnetic Schroedinger operators on quantum graphs"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Seed for generic one-forms")->capture_default_str();
  app.add_option("-o,--output", common.output, "Write the report here instead of stdout");
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default QGRAPH_THREADS or all cores)");

  SpectrumArgs sa;
  auto* sp = app.add_subcommand("spectrum", "Eigenvalues k with multiplicity up to kmax");
  sp->add_option("file", sa.file, "Graph file")->required();
  sp->add_option("--kmax", sa.k_max, "Largest wavenumber")->capture_default_str();
  sp->add_flag("--zero-form", sa.zero_form, "Ignore form lines");

  TraceArgs ta;
  auto* tr = app.add_subcommand("trace", "Orbit lengths with exact aggregates and the trace-formula check");
  tr->add_option("file", ta.file, "Graph file")->required();
  tr->add_option("--Lmax", ta.L_max, "Largest orbit length")->capture_default_str();
  tr->add_option("--sigma", ta.sigma, "Gaussian window width (default from orbit gaps)");
  tr->add_option("--kmax", ta.k_max, "Spectral cutoff (default from sigma)");
  tr->add_flag("--geometric-only", ta.geometric_only, "Skip the spectral side");

  BlochArgs ba;
  auto* bl = app.add_subcommand("bloch", "Recover the graph from Bloch-spectrum data");
  bl->add_option("file", ba.file, "Graph file")->required();
  bl->add_option("--source", ba.source, "exact or numeric")
      ->check(CLI::IsMember({"exact", "numeric"}))
      ->capture_default_str();
  bl->add_option("--stage", ba.stage, "frequencies, albanese, blocks, planarity, dual or full")
      ->check(CLI::IsMember({"frequencies", "albanese", "blocks", "planarity", "dual", "full"}))
      ->capture_default_str();
  bl->add_option("--emit-graph", ba.emit, "Write the reconstructed graph here");

  // single-stage shortcuts over the exact source
  BlochArgs stage_args[4];
  const char* stage_cmd[4] = {"albanese", "blocks", "planar", "dual"};
  const char* stage_name[4] = {"albanese", "blocks", "planarity", "dual"};
  CLI::App* stage_app[4];
  for (int i = 0; i < 4; ++i) {
    stage_args[i].stage = stage_name[i];
    stage_app[i] = app.add_subcommand(stage_cmd[i], std::string("Bloch stage ") + stage_name[i] + " (exact source)");
    stage_app[i]->add_option("file", stage_args[i].file, "Graph file")->required();
    stage_app[i]
        ->add_option("--source", stage_args[i].source, "exact or numeric")
        ->check(CLI::IsMember({"exact", "numeric"}))
        ->capture_default_str();
  }

  IsospecArgs ia;
  auto* is = app.add_subcommand("isospec", "Seidel pairs, family bounds and small isospectral searches");
  is->add_option("--search", ia.search, "Search graphs up to this total length");
  is->add_option("--seidel", ia.seidel, "Two graphs separated by ---, optional 0/1 pattern block after another ---");
  is->add_option("--bound", ia.bound, "L chi")->expected(2);
  is->add_option("--kmax", ia.k_max, "Spectral cutoff for grouping")->capture_default_str();
  is->add_option("--resolution", ia.resolution, "Length grid step")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (threads > 0) set_thread_count(threads);

  std::ostringstream out;
  try {
    if (*sp) run_spectrum(sa, out);
    if (*tr) run_trace(ta, out);
    if (*bl) run_bloch(ba, common, out);
    for (int i = 0; i < 4; ++i)
      if (*stage_app[i]) run_bloch(stage_args[i], common, out);
    if (*is) run_isospec(ia, out);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const InconclusiveError& e) {
    std::cerr << "inconclusive: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  }
  if (common.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(common.output);
    if (!f) {
      std::cerr << "input error: cannot write " << common.output << '\n';
      return 1;
    }
    f << out.str();
  }
  return 0;
}
