#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "xreg/errors.hpp"
#include "xreg/io.hpp"

namespace xreg::io {
namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::map<std::string, Entry> tokenize(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    const std::string path = section.empty() ? key : section + "." + key;
    if (entries.count(path)) throw ConfigError(path + ": duplicate key (line " + std::to_string(line_no) + ")");
    entries[path] = Entry{value, line_no};
  }
  return entries;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second.value;
  }

  void text(const std::string& key, std::string& out) {
    if (const auto* v = raw(key)) out = *v;
  }

  void real(const std::string& key, double& out) {
    const auto* v = raw(key);
    if (!v) return;
    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
    if (v->empty() || ec != std::errc() || ptr != v->data() + v->size() || !std::isfinite(parsed)) {
      fail(key, "expected a number, got '" + *v + "'");
    }
    out = parsed;
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    const auto* v = raw(key);
    if (!v) return;
    unsigned long long parsed = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
    if (v->empty() || ec != std::errc() || ptr != v->data() + v->size()) {
      fail(key, "expected a non-negative integer, got '" + *v + "'");
    }
    out = static_cast<Int>(parsed);
  }

  void boolean(const std::string& key, bool& out) {
    const auto* v = raw(key);
    if (!v) return;
    if (*v == "true" || *v == "1" || *v == "yes") {
      out = true;
    } else if (*v == "false" || *v == "0" || *v == "no") {
      out = false;
    } else {
      fail(key, "expected true or false, got '" + *v + "'");
    }
  }

  template <class T>
  void parsed(const std::string& key, T& out, const std::function<T(const std::string&)>& parse) {
    const auto* v = raw(key);
    if (!v) return;
    try {
      out = parse(*v);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(key, e.what());
    }
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) {
        throw ConfigError(key + ": unknown key (line " + std::to_string(entry.line) + ")");
      }
    }
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why);
  }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

std::size_t parse_depth(const std::string& text) {
  if (text == "none") return std::numeric_limits<std::size_t>::max();
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParameterError("expected 'none' or a positive integer, got '" + text + "'");
  }
  return v;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  Reader r(tokenize(text));
  ExperimentConfig cfg;

  // Source: explicit, or inferred from the keys present.
  std::string source;
  r.text("data.source", source);
  if (source.empty()) {
    if (r.has("data.path")) source = "csv";
    else if (r.has("data.model")) source = "simulated";
  }

  SimulatedSource sim_src;
  sim_src.model.kind = sim::ModelKind::Additive;
  sim_src.model.d = 10;
  sim_src.model.xi = 1.0;
  sim_src.model.alpha = 3.0;
  sim_src.model.sigma = 0.1;
  r.parsed<sim::ModelKind>("data.model", sim_src.model.kind, [](const std::string& s) { return sim::parse_model_kind(s); });
  r.integer("data.d", sim_src.model.d);
  r.real("data.xi", sim_src.model.xi);
  r.real("data.alpha", sim_src.model.alpha);
  r.real("data.sigma", sim_src.model.sigma);
  r.integer("data.n_train", sim_src.n_train);
  r.integer("data.n_test", sim_src.n_test);
  if (const auto* beta = r.raw("data.beta")) {
    if (*beta == "uniform") {
      sim_src.random_beta = true;
    } else {
      sim_src.random_beta = false;
      std::vector<double> values;
      for (const auto& item : split_list(*beta)) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
          Reader::fail("data.beta", "expected 'uniform' or a comma-separated list of numbers");
        }
        values.push_back(v);
      }
      sim_src.model.beta = std::move(values);
    }
  }

  CsvSource csv_src;
  r.text("data.path", csv_src.path);
  r.text("data.target", csv_src.target);
  if (const auto* features = r.raw("data.features")) csv_src.features = split_list(*features);
  r.real("data.test_fraction", csv_src.test_fraction);

  if (source == "simulated") {
    cfg.source = sim_src;
  } else if (source == "csv") {
    cfg.source = csv_src;
  } else if (!source.empty()) {
    Reader::fail("data.source", "expected 'simulated' or 'csv', got '" + source + "'");
  }

  r.parsed<KRule>("experiment.k_rule", cfg.k_rule, [](const std::string& s) { return KRule::parse(s); });
  r.parsed<NormKind>("experiment.norm", cfg.norm, [](const std::string& s) { return parse_norm_kind(s); });
  r.integer("experiment.replications", cfg.replications);
  r.integer("experiment.seed", cfg.seed);
  r.integer("experiment.threads", cfg.threads);
  r.parsed<Standardization>("experiment.standardization", cfg.standardization,
                            [](const std::string& s) { return Standardization::parse(s); });
  r.parsed<BaselineScale>("experiment.baseline_scale", cfg.baseline_scale, [](const std::string& s) {
    if (s == "raw") return BaselineScale::Raw;
    if (s == "standardized") return BaselineScale::Standardized;
    throw ParameterError("expected raw or standardized, got '" + s + "'");
  });
  if (const auto* regimes = r.raw("experiment.regimes")) {
    cfg.regimes.clear();
    for (const auto& item : split_list(*regimes)) {
      try {
        cfg.regimes.push_back(parse_regime(item));
      } catch (const std::exception& e) {
        Reader::fail("experiment.regimes", e.what());
      }
    }
  }

  RidgeParams ridge;
  r.real("ridge.lambda", ridge.lambda);
  KnnParams knn;
  r.integer("knn.k_neighbors", knn.k_neighbors);
  TreeParams tree;
  r.parsed<std::size_t>("tree.max_depth", tree.max_depth, parse_depth);
  r.integer("tree.min_samples_split", tree.min_samples_split);
  r.integer("tree.min_samples_leaf", tree.min_samples_leaf);
  ForestParams forest;
  r.integer("forest.n_trees", forest.n_trees);
  r.parsed<std::size_t>("forest.max_features", forest.max_features, [](const std::string& s) {
    return s == "all" ? std::size_t{0} : parse_depth(s);
  });
  r.boolean("forest.bootstrap", forest.bootstrap);
  r.integer("forest.seed", forest.seed);
  r.parsed<std::size_t>("forest.max_depth", forest.tree.max_depth, parse_depth);
  r.integer("forest.min_samples_split", forest.tree.min_samples_split);
  r.integer("forest.min_samples_leaf", forest.tree.min_samples_leaf);
  LinearSvrParams svr;
  r.real("svr.epsilon", svr.epsilon);
  r.real("svr.c_reg", svr.c_reg);
  r.integer("svr.n_epochs", svr.n_epochs);
  r.real("svr.step0", svr.step0);

  if (const auto* regs = r.raw("experiment.regressors")) {
    cfg.regressors.clear();
    for (const auto& item : split_list(*regs)) {
      if (item == "ols") cfg.regressors.emplace_back(OlsParams{});
      else if (item == "ridge") cfg.regressors.emplace_back(ridge);
      else if (item == "knn") cfg.regressors.emplace_back(knn);
      else if (item == "tree") cfg.regressors.emplace_back(tree);
      else if (item == "rf") cfg.regressors.emplace_back(forest);
      else if (item == "svr") cfg.regressors.emplace_back(svr);
      else Reader::fail("experiment.regressors", "unknown regressor '" + item + "' (expected ols, ridge, knn, tree, rf or svr)");
    }
  } else {
    cfg.regressors = {OlsParams{}, knn, tree, forest};
  }

  r.reject_unknown();
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const auto depth = [](std::size_t v) {
    return v == std::numeric_limits<std::size_t>::max() ? std::string("none") : std::to_string(v);
  };
  os << "[data]\n";
  if (const auto* s = std::get_if<SimulatedSource>(&cfg.source)) {
    os << "source = simulated\n"
       << "model = " << sim::to_string(s->model.kind) << '\n'
       << "d = " << s->model.d << '\n'
       << "xi = " << fmt(s->model.xi) << '\n'
       << "alpha = " << fmt(s->model.alpha) << '\n'
       << "sigma = " << fmt(s->model.sigma) << '\n';
    if (s->model.kind != sim::ModelKind::Multiplicative) {
      os << "beta = ";
      if (s->random_beta || !s->model.beta) {
        os << "uniform";
      } else {
        for (std::size_t j = 0; j < s->model.beta->size(); ++j) {
          os << (j ? "," : "") << fmt((*s->model.beta)[j]);
        }
      }
      os << '\n';
    }
    os << "n_train = " << s->n_train << '\n' << "n_test = " << s->n_test << '\n';
  } else if (const auto* c = std::get_if<CsvSource>(&cfg.source)) {
    os << "source = csv\n"
       << "path = " << c->path << '\n'
       << "target = " << c->target << '\n';
    if (!c->features.empty()) {
      os << "features = ";
      for (std::size_t j = 0; j < c->features.size(); ++j) os << (j ? "," : "") << c->features[j];
      os << '\n';
    }
    os << "test_fraction = " << fmt(c->test_fraction) << '\n';
  }

  os << "\n[experiment]\n"
     << "k_rule = " << cfg.k_rule.describe() << '\n'
     << "norm = " << to_string(cfg.norm) << '\n'
     << "replications = " << cfg.replications << '\n'
     << "seed = " << cfg.seed << '\n'
     << "threads = " << cfg.threads << '\n'
     << "standardization = " << cfg.standardization.describe() << '\n'
     << "baseline_scale = " << (cfg.baseline_scale == BaselineScale::Raw ? "raw" : "standardized") << '\n';
  os << "regimes = ";
  for (std::size_t j = 0; j < cfg.regimes.size(); ++j) os << (j ? "," : "") << to_string(cfg.regimes[j]);
  os << "\nregressors = ";
  for (std::size_t j = 0; j < cfg.regressors.size(); ++j) os << (j ? "," : "") << regressor_name(cfg.regressors[j]);
  os << '\n';

  // One section per regressor kind; the format carries one parameter set per kind.
  std::set<std::string> written;
  for (const auto& spec : cfg.regressors) {
    const std::string name = regressor_name(spec);
    if (!written.insert(name).second) continue;
    if (const auto* p = std::get_if<RidgeParams>(&spec)) {
      os << "\n[ridge]\nlambda = " << fmt(p->lambda) << '\n';
    } else if (const auto* p = std::get_if<KnnParams>(&spec)) {
      os << "\n[knn]\nk_neighbors = " << p->k_neighbors << '\n';
    } else if (const auto* p = std::get_if<TreeParams>(&spec)) {
      os << "\n[tree]\nmax_depth = " << depth(p->max_depth) << "\nmin_samples_split = " << p->min_samples_split
         << "\nmin_samples_leaf = " << p->min_samples_leaf << '\n';
    } else if (const auto* p = std::get_if<ForestParams>(&spec)) {
      os << "\n[forest]\nn_trees = " << p->n_trees
         << "\nmax_features = " << (p->max_features == 0 ? std::string("all") : std::to_string(p->max_features))
         << "\nbootstrap = " << (p->bootstrap ? "true" : "false") << "\nseed = " << p->seed
         << "\nmax_depth = " << depth(p->tree.max_depth) << "\nmin_samples_split = " << p->tree.min_samples_split
         << "\nmin_samples_leaf = " << p->tree.min_samples_leaf << '\n';
    } else if (const auto* p = std::get_if<LinearSvrParams>(&spec)) {
      os << "\n[svr]\nepsilon = " << fmt(p->epsilon) << "\nc_reg = " << fmt(p->c_reg)
         << "\nn_epochs = " << p->n_epochs << "\nstep0 = " << fmt(p->step0) << '\n';
    }
  }
  return os.str();
}

}  // namespace xreg::io
