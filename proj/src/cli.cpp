#include "obsrobust/cli.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "obsrobust/experiment.hpp"
#include "obsrobust/generate.hpp"
#include "obsrobust/io.hpp"
#include "obsrobust/minsro.hpp"
#include "obsrobust/oracle.hpp"
#include "obsrobust/report.hpp"
#include "obsrobust/structural.hpp"

namespace obsrobust {

using nlohmann::json;

namespace {

struct Globals {
  double tol_eig = Tolerances{}.tol_eig;
  double tol_rank = Tolerances{}.tol_rank;
  std::uint64_t seed = 1;
  int threads = 1;
  int max_mult = SearchOptions{}.max_multiplicity_cap;
  int max_deficiency = StructuralOptions{}.max_deficiency_cap;

  Tolerances tolerances() const {
    Tolerances t;
    t.tol_eig = tol_eig;
    t.tol_rank = tol_rank;
    t.validate();
    return t;
  }
};

struct InputArgs {
  std::string input;
  std::string a_path;
  std::string c_path;

  void attach(CLI::App* cmd) {
    auto* in = cmd->add_option("-i,--input", input, "JSON system document");
    auto* a = cmd->add_option("--a", a_path, "Matrix Market file for A");
    auto* c = cmd->add_option("--c", c_path, "Matrix Market file for C");
    in->excludes(a)->excludes(c);
    a->needs(c);
    c->needs(a);
  }

  LoadedSystem load() const {
    if (!input.empty()) return load_system(read_file(input));
    if (!a_path.empty()) return load_matrix_market_pair(read_file(a_path), read_file(c_path));
    throw ValidationError("no input: give --input or --a/--c");
  }

  json describe() const {
    if (!input.empty()) return json{{"input", input}};
    return json{{"a", a_path}, {"c", c_path}};
  }
};

const DenseSystem& require_dense(const LoadedSystem& sys, const char* command) {
  if (const auto* d = std::get_if<DenseSystem>(&sys)) return *d;
  throw ValidationError(std::string(command) + " needs a dense system");
}

DedupMode parse_dedup(const std::string& s) {
  if (s == "none") return DedupMode::none;
  if (s == "per_parent") return DedupMode::per_parent;
  return DedupMode::layer;
}

json envelope(const char* command, const Globals& g, json config) {
  config["threads"] = g.threads;
  config["max_mult"] = g.max_mult;
  config["max_deficiency"] = g.max_deficiency;
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"command", command},
              {"seed", g.seed},
              {"tolerances", to_json(g.tolerances())},
              {"config", std::move(config)}};
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << doc.dump(2) << "\n";
  else
    write_file(path, doc.dump(2) + "\n");
}

std::string set_text(const SensorSubset& s) {
  std::string t = "[";
  for (std::size_t i = 0; i < s.size(); ++i) t += (i ? "," : "") + std::to_string(s.one_based()[i]);
  return t + "]";
}

Matrix parse_inline_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    for (char& ch : row)
      if (ch == ',') ch = ' ';
    std::stringstream es(row);
    std::vector<double> vals;
    std::string tok;
    while (es >> tok) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("bad matrix entry: " + tok);
      }
    }
    if (!vals.empty()) rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError("empty matrix");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ParseError("ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Graph parse_edges(int p, const std::string& text) {
  Graph g;
  g.vertices = p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw ParseError("edge must look like u-v: " + item);
    try {
      int u = std::stoi(item.substr(0, dash));
      int v = std::stoi(item.substr(dash + 1));
      g.edges.emplace_back(u - 1, v - 1);
    } catch (const std::exception&) {
      throw ParseError("bad edge: " + item);
    }
  }
  return g;
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeArgs {
  InputArgs in;
  std::string output;
  std::string costs;
  std::string dedup = "layer";
  bool search_conjugates = false;
};

int cmd_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out) {
  LoadedSystem loaded = a.in.load();
  const DenseSystem& sys = require_dense(loaded, "analyze");
  Tolerances tol = g.tolerances();
  SearchOptions opts;
  opts.max_multiplicity_cap = g.max_mult;
  opts.dedup = parse_dedup(a.dedup);
  opts.search_conjugates = a.search_conjugates;
  opts.threads = g.threads;

  EigenStructure es = eigenstructure(sys.a(), tol);
  RobustnessReport rep;
  if (!a.costs.empty())
    rep = minsro_cost(sys, es, load_costs(read_file(a.costs)), tol, opts);
  else
    rep = minsro(sys, es, tol, opts);

  json cfg = a.in.describe();
  cfg["costs"] = a.costs.empty() ? json(nullptr) : json(a.costs);
  cfg["dedup"] = a.dedup;
  cfg["search_conjugates"] = a.search_conjugates;
  json doc = envelope("analyze", g, std::move(cfg));
  doc["system"] = json{{"n", sys.n()}, {"r", sys.r()}, {"max_multiplicity", es.max_multiplicity}};
  doc["result"] = to_json(rep, &es);
  emit(doc, a.output, out);

  if (!rep.observable) {
    if (!a.output.empty()) out << "unobservable r_min=0 s_robust=-1 attack_tolerance=0\n";
    return kExitUnobservable;
  }
  if (!a.output.empty()) {
    out << "r_min=" << rep.r_min << " s_robust=" << rep.s_robust << " attack_tolerance=" << rep.attack_tolerance
        << " F_min=" << set_text(rep.f_min);
    if (rep.r_c_min) out << " r_c_min=" << *rep.r_c_min << " F_c_min=" << set_text(*rep.f_c_min);
    out << "\n";
  }
  return kExitOk;
}

// ---- analyze-structured --------------------------------------------------

struct StructuredArgs {
  InputArgs in;
  std::string output;
  bool dm = false;
};

int cmd_analyze_structured(const StructuredArgs& a, const Globals& g, std::ostream& out) {
  StructuredSystem sys = as_structured(a.in.load());
  StructuralOptions opts;
  opts.max_deficiency_cap = g.max_deficiency;
  StructuralReport rep = minsro_structural(sys, a.dm, opts);

  json cfg = a.in.describe();
  cfg["dm"] = a.dm;
  json doc = envelope("analyze-structured", g, std::move(cfg));
  doc["system"] = json{{"n", sys.n()}, {"r", sys.r()}};
  doc["result"] = to_json(rep);
  emit(doc, a.output, out);

  if (!rep.observable) {
    if (!a.output.empty()) out << "structurally unobservable J_opt_size=0\n";
    return kExitUnobservable;
  }
  if (!a.output.empty()) {
    out << "J_opt_size=" << rep.j_opt.size() << " branch=" << branch_name(rep.branch)
        << " J_opt=" << set_text(rep.j_opt) << " J_re_size=" << rep.j_re.size() << " J_ma_size="
        << (rep.j_ma ? std::to_string(rep.j_ma->size()) : std::string("inf")) << "\n";
  }
  return kExitOk;
}

// ---- oracle --------------------------------------------------------------

struct OracleArgs {
  InputArgs in;
  std::string mode = "numeric";
  std::string costs;
};

int cmd_oracle(const OracleArgs& a, const Globals& g, std::ostream& out) {
  LoadedSystem loaded = a.in.load();
  Tolerances tol = g.tolerances();

  if (a.mode == "structural") {
    StructuredSystem sys = as_structured(loaded);
    StructuralOptions opts;
    opts.max_deficiency_cap = g.max_deficiency;
    OracleResult orc = brute_force_structural(sys);
    StructuralReport plain = minsro_structural(sys, false, opts);
    StructuralReport reduced = minsro_structural(sys, true, opts);
    const int alg = plain.observable ? static_cast<int>(plain.j_opt.size()) : 0;
    const int alg_dm = reduced.observable ? static_cast<int>(reduced.j_opt.size()) : 0;
    const int want = orc.observable ? orc.r_min : 0;
    bool ok = alg == want && alg_dm == want && plain.observable == orc.observable;
    if (ok && plain.observable)
      ok = !structural_check(sys.a(), sys.c().select_rows(plain.j_opt.complement(sys.r()).indices()));
    if (!ok) {
      out << "MISMATCH algorithm=" << alg << " algorithm_dm=" << alg_dm << " oracle=" << want << "\n";
      return kExitMismatch;
    }
    out << "MATCH r_min=" << want << "\n";
    return kExitOk;
  }

  const DenseSystem& sys = require_dense(loaded, "oracle");
  SearchOptions opts;
  opts.max_multiplicity_cap = g.max_mult;
  opts.threads = g.threads;
  if (a.mode == "cost") {
    if (a.costs.empty()) throw ValidationError("--mode cost needs --costs");
    CostVector costs = load_costs(read_file(a.costs));
    OracleResult orc = brute_force_cost(sys, costs);
    RobustnessReport rep = minsro_cost(sys, costs, tol, opts);
    const double alg = rep.r_c_min.value_or(0.0);
    const double want = orc.observable ? orc.cost : 0.0;
    if (rep.observable != orc.observable || std::abs(alg - want) > 1e-9 * (1.0 + std::abs(want))) {
      out << "MISMATCH algorithm=" << alg << " oracle=" << want << "\n";
      return kExitMismatch;
    }
    out << "MATCH r_c_min=" << want << "\n";
    return kExitOk;
  }

  OracleResult orc = brute_force_numeric(sys);
  RobustnessReport rep = minsro(sys, tol, opts);
  const int want = orc.observable ? orc.r_min : 0;
  bool ok = rep.observable == orc.observable && rep.r_min == want;
  if (ok && rep.observable && rep.f_min.size() < static_cast<std::size_t>(sys.r()))
    ok = !kalman_observable(sys.a(), sys.without(rep.f_min).c());
  if (!ok) {
    out << "MISMATCH algorithm=" << rep.r_min << " oracle=" << want << "\n";
    return kExitMismatch;
  }
  out << "MATCH r_min=" << want << "\n";
  return kExitOk;
}

// ---- gen -----------------------------------------------------------------

struct GenErArgs {
  int n = 20;
  double c = 3.0;
  double fraction = 0.4;
  bool no_self_loops = false;
  int mult_filter = 5;
  std::string out;
};

int cmd_gen_er(const GenErArgs& a, const Globals& g, std::ostream& out) {
  ErParams prm;
  prm.n = a.n;
  prm.c = a.c;
  prm.sensor_fraction = a.fraction;
  prm.seed = g.seed;
  prm.self_loops = !a.no_self_loops;
  prm.multiplicity_cap = a.mult_filter;
  ErInstance inst = gen_er_system(prm, g.tolerances());
  write_file(a.out, save_system(inst.sys));
  out << "wrote " << a.out << " n=" << inst.sys.n() << " r=" << inst.sys.r() << " seed=" << g.seed
      << " attempts=" << inst.attempts << " max_multiplicity=" << inst.max_multiplicity << "\n";
  return kExitOk;
}

struct GenDegeneracyArgs {
  std::string x;
  std::string out;
};

int cmd_gen_degeneracy(const GenDegeneracyArgs& a, std::ostream& out) {
  DegeneracyInstance inst = gen_degeneracy_instance(parse_inline_matrix(a.x));
  write_file(a.out, save_system(inst.sys));
  out << "wrote " << a.out << " n=" << inst.sys.n() << " eta=" << inst.eta << "\n";
  return kExitOk;
}

struct GenCliqueArgs {
  int p = 0;
  std::string edges;
  int k = 4;
  std::string out;
};

int cmd_gen_clique(const GenCliqueArgs& a, std::ostream& out) {
  Graph graph = parse_edges(a.p, a.edges);
  StructuredSystem sys = gen_clique_instance(graph, a.k);
  write_file(a.out, save_system(sys));
  const int q = a.k * (a.k - 1) / 2;
  out << "wrote " << a.out << " n=" << sys.n() << " r=" << sys.r() << " q=" << q
      << " clique=" << (has_clique(graph, a.k) ? "yes" : "no") << "\n";
  return kExitOk;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string out;
  std::string summary;
};

int cmd_bench(const BenchArgs& a, const Globals& g, bool seed_set, bool threads_set, bool tol_set,
              std::ostream& out) {
  ExperimentConfig cfg = parse_experiment_config(read_file(a.config));
  if (seed_set) cfg.seed = g.seed;
  if (threads_set) cfg.threads = g.threads;
  if (tol_set) cfg.tol = g.tolerances();
  cfg.validate();

  std::vector<ExperimentRow> rows = run_experiment(cfg);
  write_file(a.out, experiment_csv(rows));
  std::vector<SummaryRow> summary = summarize(rows);
  out << summary_table(summary);

  if (!a.summary.empty()) {
    json cells = json::array();
    for (const auto& s : summary)
      cells.push_back(json{{"n", s.n}, {"c", s.c}, {"method", s.method}, {"ok", s.count}, {"mean_ratio", s.mean_ratio}});
    json doc{{"tool", kToolName},
             {"version", kToolVersion},
             {"command", "bench"},
             {"seed", cfg.seed},
             {"tolerances", to_json(cfg.tol)},
             {"config",
              {{"config_file", a.config},
               {"n_values", cfg.n_values},
               {"c_values", cfg.c_values},
               {"instances_per_cell", cfg.instances_per_cell},
               {"sensor_fraction", cfg.sensor_fraction},
               {"methods", cfg.methods},
               {"multiplicity_cap", cfg.multiplicity_cap},
               {"max_deficiency", cfg.max_deficiency},
               {"timing", cfg.timing},
               {"threads", cfg.threads}}},
             {"summary", std::move(cells)}};
    write_file(a.summary, doc.dump(2) + "\n");
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  if (failed) out << failed << " rows reported errors\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum sensor removal for observability of linear systems", kToolName};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  Globals g;
  auto* o_tol_eig = app.add_option("--tol-eig", g.tol_eig, "Relative eigenvalue clustering radius")
                        ->envname("OBSROBUST_TOL_EIG")->check(CLI::PositiveNumber);
  auto* o_tol_rank = app.add_option("--tol-rank", g.tol_rank, "Relative singular-value cutoff")
                         ->envname("OBSROBUST_TOL_RANK")->check(CLI::PositiveNumber);
  auto* o_seed = app.add_option("--seed", g.seed, "Random seed")->envname("OBSROBUST_SEED");
  auto* o_threads = app.add_option("--threads", g.threads, "Worker thread bound")
                        ->envname("OBSROBUST_THREADS")->check(CLI::PositiveNumber);
  app.add_option("--max-mult", g.max_mult, "Geometric multiplicity cap")
      ->envname("OBSROBUST_MAX_MULT")->check(CLI::PositiveNumber);
  app.add_option("--max-deficiency", g.max_deficiency, "Matching deficiency cap")
      ->envname("OBSROBUST_MAX_DEFICIENCY")->check(CLI::PositiveNumber);

  std::function<int()> action;

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Exact minimum sensor removal for a dense system");
  analyze.in.attach(c_analyze);
  c_analyze->add_option("-o,--output", analyze.output, "Report path (stdout when omitted)");
  c_analyze->add_option("--costs", analyze.costs, "JSON array of r non-negative sensor costs");
  c_analyze->add_option("--dedup", analyze.dedup, "Closure deduplication")
      ->check(CLI::IsMember({"none", "per_parent", "layer"}));
  c_analyze->add_flag("--search-conjugates", analyze.search_conjugates,
                      "Search both members of each conjugate pair");
  c_analyze->callback([&] { action = [&] { return cmd_analyze(analyze, g, out); }; });

  StructuredArgs structured;
  auto* c_struct = app.add_subcommand("analyze-structured", "Generic minimum sensor removal for a pattern");
  structured.in.attach(c_struct);
  c_struct->add_option("-o,--output", structured.output, "Report path (stdout when omitted)");
  c_struct->add_flag("--dm", structured.dm, "Run the matching branch on the DM-reduced system");
  c_struct->callback([&] { action = [&] { return cmd_analyze_structured(structured, g, out); }; });

  OracleArgs oracle;
  auto* c_oracle = app.add_subcommand("oracle", "Compare the algorithm with exhaustive search");
  oracle.in.attach(c_oracle);
  c_oracle->add_option("--mode", oracle.mode, "numeric, structural or cost")
      ->check(CLI::IsMember({"numeric", "structural", "cost"}));
  c_oracle->add_option("--costs", oracle.costs, "Cost file for --mode cost");
  c_oracle->callback([&] { action = [&] { return cmd_oracle(oracle, g, out); }; });

  auto* c_gen = app.add_subcommand("gen", "Generate instances");
  c_gen->require_subcommand(1);
  GenErArgs gen_er;
  auto* c_er = c_gen->add_subcommand("er", "Erdos-Renyi network with dedicated sensors");
  c_er->add_option("--n", gen_er.n, "State dimension")->required();
  c_er->add_option("--c", gen_er.c, "Edge probability numerator (p = c / n)")->required();
  c_er->add_option("--fraction", gen_er.fraction, "Fraction of states with a sensor");
  c_er->add_flag("--no-self-loops", gen_er.no_self_loops, "Forbid self-loops");
  c_er->add_option("--mult-filter", gen_er.mult_filter, "Keep instances with max multiplicity below this");
  c_er->add_option("-o,--out", gen_er.out, "Output system path")->required();
  c_er->callback([&] { action = [&] { return cmd_gen_er(gen_er, g, out); }; });

  GenDegeneracyArgs gen_deg;
  auto* c_deg = c_gen->add_subcommand("degeneracy", "Dense instance from an integral k x n matrix X");
  c_deg->add_option("--x", gen_deg.x, "Rows separated by ';', entries by ','")->required();
  c_deg->add_option("-o,--out", gen_deg.out, "Output system path")->required();
  c_deg->callback([&] { action = [&] { return cmd_gen_degeneracy(gen_deg, out); }; });

  GenCliqueArgs gen_clq;
  auto* c_clq = c_gen->add_subcommand("clique", "Structured instance from an undirected graph");
  c_clq->add_option("--p", gen_clq.p, "Vertex count")->required();
  c_clq->add_option("--edges", gen_clq.edges, "Edges as 1-based u-v pairs, comma separated")->required();
  c_clq->add_option("--k", gen_clq.k, "Clique size");
  c_clq->add_option("-o,--out", gen_clq.out, "Output system path")->required();
  c_clq->callback([&] { action = [&] { return cmd_gen_clique(gen_clq, out); }; });

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Run the removal-ratio experiment");
  c_bench->add_option("--config", bench.config, "key = value experiment file")->required();
  c_bench->add_option("-o,--out", bench.out, "CSV output path")->required();
  c_bench->add_option("--summary", bench.summary, "JSON summary path");
  c_bench->callback([&] {
    action = [&] {
      const bool tol_set = o_tol_eig->count() > 0 || o_tol_rank->count() > 0;
      return cmd_bench(bench, g, o_seed->count() > 0, o_threads->count() > 0, tol_set, out);
    };
  });

  std::vector<const char*> argv{kToolName};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    return action ? action() : kExitError;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace obsrobust
