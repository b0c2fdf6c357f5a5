#include "obsrobust/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "obsrobust/generate.hpp"
#include "obsrobust/minsro.hpp"
#include "obsrobust/structural.hpp"

namespace obsrobust {

std::vector<int> degree_order(const StructuredSystem& sys) {
  std::vector<int> indeg(sys.n(), 0);
  for (auto [i, j] : sys.a().support())
    if (i != j) ++indeg[i];
  struct Key {
    int degree;
    int state;
    int sensor;
  };
  std::vector<Key> keys;
  auto rows = sys.c().row_lists();
  for (int s = 0; s < sys.r(); ++s) {
    Key k{-1, 0, s};
    for (int x : rows[s])
      if (indeg[x] > k.degree) k = Key{indeg[x], x, s};
    keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.degree != b.degree) return a.degree > b.degree;
    if (a.state != b.state) return a.state < b.state;
    return a.sensor < b.sensor;
  });
  std::vector<int> order;
  for (const Key& k : keys) order.push_back(k.sensor);
  return order;
}

int baseline_removal(const DenseSystem& sys, BaselineOrder order, BaselineMode mode, std::uint64_t seed,
                     const Tolerances& tol) {
  const int r = sys.r();
  std::vector<int> seq;
  if (order == BaselineOrder::degree) {
    seq = degree_order(sys.pattern());
  } else {
    seq.resize(r);
    std::iota(seq.begin(), seq.end(), 0);
    Rng rng(seed);
    std::shuffle(seq.begin(), seq.end(), rng);
  }

  EigenStructure es;
  if (mode == BaselineMode::numeric) es = eigenstructure(sys.a(), tol);
  std::vector<bool> removed(r, false);
  for (int step = 0; step < r; ++step) {
    removed[seq[step]] = true;
    if (step + 1 == r) return r;
    std::vector<int> keep;
    for (int j = 0; j < r; ++j)
      if (!removed[j]) keep.push_back(j);
    bool ok;
    if (mode == BaselineMode::numeric) {
      Matrix c(keep.size(), sys.n());
      for (std::size_t k = 0; k < keep.size(); ++k) c.row(k) = sys.c().row(keep[k]);
      ok = is_observable(c, es, tol);
    } else {
      ok = is_structurally_observable(StructuredSystem(sys.pattern().a(), sys.pattern().c().select_rows(keep)));
    }
    if (!ok) return step + 1;
  }
  return r;
}

void ExperimentConfig::validate() const {
  if (n_values.empty() || c_values.empty()) throw ValidationError("n_values and c_values must be nonempty");
  for (int n : n_values)
    if (n < 2) throw ValidationError("every n must be at least 2");
  for (double c : c_values)
    for (int n : n_values)
      if (!(c > 0.0 && c < n)) throw ValidationError("every c must satisfy 0 < c < n");
  if (instances_per_cell < 1) throw ValidationError("instances_per_cell must be at least 1");
  if (!(sensor_fraction > 0.0 && sensor_fraction <= 1.0)) throw ValidationError("sensor_fraction must lie in (0, 1]");
  if (multiplicity_cap < 2) throw ValidationError("multiplicity_cap must be at least 2");
  if (threads < 1) throw ValidationError("threads must be at least 1");
  if (methods.empty()) throw ValidationError("methods must be nonempty");
  static const std::vector<std::string> known{"alg1", "alg3", "alg3_dm", "degree", "random"};
  for (const auto& m : methods)
    if (std::find(known.begin(), known.end(), m) == known.end()) throw ValidationError("unknown method: " + m);
  tol.validate();
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> list_items(const std::string& key, const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw ParseError(key + ": expected a [list]");
  std::vector<std::string> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError(key + ": not a number: " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError(key + ": not an integer: " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError(key + ": expected true or false");
}

std::string format_c(double c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

struct Task {
  int n;
  double c;
  int instance;
  std::uint64_t seed;
};

std::vector<ExperimentRow> run_task(const ExperimentConfig& cfg, const Task& t) {
  std::vector<ExperimentRow> rows;
  auto base = [&](const std::string& method) {
    ExperimentRow row;
    row.n = t.n;
    row.c = t.c;
    row.instance = t.instance;
    row.seed = t.seed;
    row.method = method;
    return row;
  };

  ErParams prm;
  prm.n = t.n;
  prm.c = t.c;
  prm.sensor_fraction = cfg.sensor_fraction;
  prm.seed = t.seed;
  prm.multiplicity_cap = cfg.multiplicity_cap;
  std::optional<ErInstance> inst;
  try {
    inst = gen_er_system(prm, cfg.tol);
  } catch (const Error& e) {
    for (const auto& m : cfg.methods) {
      ExperimentRow row = base(m);
      row.status = "error:" + sanitize(e.what());
      rows.push_back(row);
    }
    return rows;
  }

  const DenseSystem& sys = inst->sys;
  for (const auto& m : cfg.methods) {
    ExperimentRow row = base(m);
    row.total_sensors = sys.r();
    auto start = std::chrono::steady_clock::now();
    try {
      if (m == "alg1") {
        SearchOptions opts;
        opts.max_multiplicity_cap = std::max(opts.max_multiplicity_cap, cfg.multiplicity_cap);
        row.removed = minsro(sys, cfg.tol, opts).r_min;
      } else if (m == "alg3" || m == "alg3_dm") {
        StructuralOptions opts;
        opts.max_deficiency_cap = cfg.max_deficiency;
        row.removed = static_cast<int>(minsro_structural(sys.pattern(), m == "alg3_dm", opts).j_opt.size());
      } else if (m == "degree") {
        row.removed = baseline_removal(sys, BaselineOrder::degree, BaselineMode::numeric, 0, cfg.tol);
      } else {
        row.removed = baseline_removal(sys, BaselineOrder::random, BaselineMode::numeric, mix_seed(t.seed, 7),
                                       cfg.tol);
      }
      row.ratio = static_cast<double>(row.removed) / row.total_sensors;
    } catch (const Error& e) {
      row.status = "error:" + sanitize(e.what());
    }
    if (cfg.timing)
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || (line.front() == '[' && line.find('=') == std::string::npos)) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string val = trim(std::string_view(line).substr(eq + 1));
    if (key == "n_values") {
      cfg.n_values.clear();
      for (const auto& s : list_items(key, val)) cfg.n_values.push_back(static_cast<int>(to_int(key, s)));
    } else if (key == "c_values") {
      cfg.c_values.clear();
      for (const auto& s : list_items(key, val)) cfg.c_values.push_back(to_double(key, s));
    } else if (key == "instances_per_cell") {
      cfg.instances_per_cell = static_cast<int>(to_int(key, val));
    } else if (key == "sensor_fraction") {
      cfg.sensor_fraction = to_double(key, val);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(key, val));
    } else if (key == "methods") {
      cfg.methods = list_items(key, val);
    } else if (key == "multiplicity_cap") {
      cfg.multiplicity_cap = static_cast<int>(to_int(key, val));
    } else if (key == "max_deficiency") {
      cfg.max_deficiency = static_cast<int>(to_int(key, val));
    } else if (key == "timing") {
      cfg.timing = to_bool(key, val);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(to_int(key, val));
    } else if (key == "tol_eig") {
      cfg.tol.tol_eig = to_double(key, val);
    } else if (key == "tol_rank") {
      cfg.tol.tol_rank = to_double(key, val);
    } else {
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Task> tasks;
  for (int n : cfg.n_values)
    for (double c : cfg.c_values)
      for (int i = 0; i < cfg.instances_per_cell; ++i) {
        std::uint64_t salt = static_cast<std::uint64_t>(n) * 1000003ull +
                             static_cast<std::uint64_t>(std::llround(c * 1000.0)) * 1009ull +
                             static_cast<std::uint64_t>(i);
        tasks.push_back(Task{n, c, i, mix_seed(cfg.seed, salt)});
      }

  std::vector<std::vector<ExperimentRow>> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) out[i] = run_task(cfg, tasks[i]);
  };
  const int workers = std::min<int>(cfg.threads, static_cast<int>(tasks.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ExperimentRow> rows;
  for (auto& chunk : out) rows.insert(rows.end(), chunk.begin(), chunk.end());
  auto method_rank = [&](const std::string& m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) - cfg.methods.begin();
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ExperimentRow& a, const ExperimentRow& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.c != b.c) return a.c < b.c;
    if (a.instance != b.instance) return a.instance < b.instance;
    return method_rank(a.method) < method_rank(b.method);
  });
  return rows;
}

std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = "n,c,instance,seed,method,removed,total_sensors,ratio,wall_ms,status\n";
  char buf[64];
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + format_c(r.c) + "," + std::to_string(r.instance) + "," +
           std::to_string(r.seed) + "," + r.method + "," + std::to_string(r.removed) + "," +
           std::to_string(r.total_sensors) + ",";
    std::snprintf(buf, sizeof buf, "%.6f,%.3f,", r.ratio, r.wall_ms);
    out += buf;
    out += r.status + "\n";
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows) {
  std::map<std::tuple<int, double, std::string>, SummaryRow> acc;
  std::vector<std::tuple<int, double, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.n, r.c, r.method);
    auto [it, fresh] = acc.try_emplace(key, SummaryRow{r.n, r.c, r.method, 0, 0.0});
    if (fresh) order.push_back(key);
    if (r.status != "ok") continue;
    it->second.count += 1;
    it->second.mean_ratio += r.ratio;
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    SummaryRow s = acc[key];
    if (s.count > 0) s.mean_ratio /= s.count;
    out.push_back(s);
  }
  return out;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::string out = "    n      c  method      ok  mean_ratio\n";
  char buf[128];
  for (const auto& s : rows) {
    std::snprintf(buf, sizeof buf, "%5d  %5s  %-9s %4d  %10.4f\n", s.n, format_c(s.c).c_str(), s.method.c_str(),
                  s.count, s.mean_ratio);
    out += buf;
  }
  return out;
}

}  // namespace obsrobust
