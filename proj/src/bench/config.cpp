#include "asgard/bench/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace asgard::bench {

namespace {

using nlohmann::json;

const std::set<std::string> kAlgorithms = {"asgard", "asgard_old_grad", "asgard_linesearch",
                                           "parallel_asgard", "vu_condat"};

long line_at_offset(const std::string &text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<long>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Line of the first occurrence of "key" at or after `from`, or 1.
long line_of_key(const std::string &text, const std::string &key, std::size_t from = 0) {
  const auto pos = text.find("\"" + key + "\"", from);
  return pos == std::string::npos ? 1 : line_at_offset(text, pos);
}

class Reader {
public:
  explicit Reader(const std::string &text) : text_(text) {}

  [[noreturn]] void fail(const std::string &key, const std::string &msg, std::size_t from = 0) const {
    throw ConfigError("config line " + std::to_string(line_of_key(text_, key, from)) + ": " + msg);
  }

  template <class T>
  T get(const json &obj, const std::string &key, std::size_t from = 0) const {
    if (!obj.contains(key)) fail(key, "missing required field '" + key + "'", from);
    return convert<T>(obj.at(key), key, from);
  }

  template <class T>
  std::optional<T> maybe(const json &obj, const std::string &key, std::size_t from = 0) const {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return convert<T>(obj.at(key), key, from);
  }

  template <class T>
  T convert(const json &v, const std::string &key, std::size_t from) const {
    try {
      if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(key, "field '" + key + "' must be an integer", from);
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(key, "field '" + key + "' must be a number", from);
      }
      return v.get<T>();
    } catch (const json::exception &e) {
      fail(key, "field '" + key + "' has the wrong type (" + e.what() + ")", from);
    }
  }

  // Offset of the n-th algorithm entry, used to point messages at it.
  std::size_t algorithm_offset(std::size_t index) const {
    std::size_t pos = text_.find("\"algorithms\"");
    for (std::size_t i = 0; i <= index && pos != std::string::npos; ++i) {
      pos = text_.find("\"name\"", pos + 1);
    }
    return pos == std::string::npos ? 0 : pos;
  }

private:
  const std::string &text_;
};

InstanceSpec parse_instance(const Reader &r, const json &j) {
  if (!j.is_object()) r.fail("instance", "'instance' must be an object");
  InstanceSpec spec;
  spec.seed = r.maybe<std::uint64_t>(j, "seed").value_or(0);
  const auto kind = r.get<std::string>(j, "kind");
  if (kind == "sparse_tv_ls") {
    SparseTvSpec s{r.get<Index>(j, "n"), r.get<Index>(j, "m"), r.maybe<double>(j, "rho").value_or(0.95)};
    if (s.n < 2) r.fail("n", "sparse_tv_ls needs n > 1");
    if (s.m < 1) r.fail("m", "sparse_tv_ls needs m >= 1");
    if (!(s.rho >= 0.0 && s.rho < 1.0)) r.fail("rho", "rho must lie in [0, 1)");
    spec.kind = s;
  } else if (kind == "basis_pursuit") {
    BasisPursuitSpec s{r.get<Index>(j, "n"), r.get<Index>(j, "m"), r.get<Index>(j, "sparsity")};
    if (s.n < 2 || s.m < 1 || s.m >= s.n) r.fail("m", "basis_pursuit needs 1 <= m < n");
    if (s.sparsity < 0 || s.sparsity > s.n) r.fail("sparsity", "sparsity must lie in [0, n]");
    spec.kind = s;
  } else if (kind == "kernel_l1") {
    KernelL1Spec s{r.get<Index>(j, "n_points"), r.get<Index>(j, "feat_dim"),
                   r.get<double>(j, "sigma_kernel"), r.get<double>(j, "lambda")};
    if (s.n_points < 2) r.fail("n_points", "kernel_l1 needs n_points > 1");
    if (s.feat_dim < 1) r.fail("feat_dim", "kernel_l1 needs feat_dim >= 1");
    if (!(s.sigma_kernel > 0.0)) r.fail("sigma_kernel", "sigma_kernel must be positive");
    if (!(s.lambda >= 0.0 && s.lambda <= 1.0)) r.fail("lambda", "lambda must lie in [0, 1]");
    spec.kind = s;
  } else {
    r.fail("kind", "unknown instance kind '" + kind + "'");
  }
  return spec;
}

AlgorithmConfig parse_algorithm(const Reader &r, const json &j, std::size_t from) {
  if (!j.is_object()) r.fail("algorithms", "each algorithm entry must be an object", from);
  AlgorithmConfig a;
  a.name = r.get<std::string>(j, "name", from);
  if (!kAlgorithms.count(a.name)) r.fail("name", "unknown algorithm '" + a.name + "'", from);
  a.label = r.maybe<std::string>(j, "label", from).value_or(a.name);
  a.beta0 = r.maybe<double>(j, "beta0", from).value_or(a.beta0);
  a.q_restart = r.maybe<long>(j, "q_restart", from);
  a.sigma = r.maybe<double>(j, "sigma", from).value_or(a.sigma);
  a.delta = r.maybe<double>(j, "delta", from).value_or(a.delta);
  a.a = r.maybe<double>(j, "a", from).value_or(a.a);
  a.B0_factor = r.maybe<double>(j, "B0_factor", from).value_or(a.B0_factor);
  a.blocks = r.maybe<int>(j, "blocks", from).value_or(a.blocks);
  a.tau_p = r.maybe<double>(j, "tau_p", from);
  a.sigma_d = r.maybe<double>(j, "sigma_d", from);
  if (!(a.beta0 > 0.0)) r.fail("beta0", "beta0 must be positive", from);
  if (a.q_restart && *a.q_restart < 1) r.fail("q_restart", "q_restart must be >= 1", from);
  if (!(a.delta > 0.0)) r.fail("delta", "delta must be positive", from);
  if (!(a.a > 1.0)) r.fail("a", "line-search factor a must exceed 1", from);
  if (!(a.B0_factor > 0.0 && a.B0_factor <= a.a)) {
    r.fail("B0_factor", "B0_factor must lie in (0, a]", from);
  }
  if (a.blocks < 1) r.fail("blocks", "blocks must be >= 1", from);
  if (a.label.empty() || a.label.find_first_of("/\\") != std::string::npos) {
    r.fail("label", "label must be a non-empty file stem", from);
  }
  return a;
}

} // namespace

ExperimentConfig parse_config(const std::string &text, const std::filesystem::path &base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError("config line " + std::to_string(line_at_offset(text, e.byte)) +
                      ": invalid JSON (" + e.what() + ")");
  }
  const Reader r(text);
  if (!doc.is_object()) throw ConfigError("config line 1: top level must be an object");

  ExperimentConfig cfg;
  if (!doc.contains("instance")) r.fail("instance", "missing required field 'instance'");
  cfg.instance = parse_instance(r, doc.at("instance"));

  if (!doc.contains("algorithms") || !doc.at("algorithms").is_array()) {
    r.fail("algorithms", "'algorithms' must be a list");
  }
  const json &algs = doc.at("algorithms");
  if (algs.empty()) r.fail("algorithms", "at least one algorithm is required");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const std::size_t from = r.algorithm_offset(i);
    cfg.algorithms.push_back(parse_algorithm(r, algs[i], from));
    if (!labels.insert(cfg.algorithms.back().label).second) {
      const char *key = algs[i].contains("label") ? "label" : "name";
      r.fail(key, "duplicate algorithm label '" + cfg.algorithms.back().label + "'", from);
    }
  }

  cfg.max_iter = r.get<long>(doc, "max_iter");
  if (cfg.max_iter < 1) r.fail("max_iter", "max_iter must be >= 1");

  const auto resolve = [&](const std::string &p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  cfg.output_dir = resolve(r.maybe<std::string>(doc, "output_dir").value_or("out"));

  if (doc.contains("oracle") && !doc.at("oracle").is_null()) {
    const json &o = doc.at("oracle");
    if (!o.is_object()) r.fail("oracle", "'oracle' must be an object");
    OracleConfig oc;
    oc.f_star = r.maybe<double>(o, "f_star");
    oc.x_star_path = resolve(r.maybe<std::string>(o, "x_star_path").value_or("oracle_x.json"));
    oc.y_star_path = resolve(r.maybe<std::string>(o, "y_star_path").value_or("oracle_y.json"));
    oc.iters = r.maybe<long>(o, "iters").value_or(oc.iters);
    if (oc.iters < 1) r.fail("iters", "oracle iters must be >= 1");
    cfg.oracle = oc;
  }

  if (auto x0 = r.maybe<std::vector<double>>(doc, "x0")) cfg.x0 = std::move(*x0);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(ss.str(), base);
}

} // namespace asgard::bench
