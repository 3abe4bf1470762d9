#include "hdg/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hdg/errors.hpp"

namespace hdg::harness {

namespace {

using nlohmann::json;

const std::set<std::string> kCommonKeys = {"experiment", "model", "graph", "rule",        "tau", "trials",
                                           "T",          "seed",  "parallelism", "out", "initial"};
const std::set<std::string> kCtiKeys = {"costs", "value"};
const std::set<std::string> kSisKeys = {"gamma", "beta0", "beta1", "lambda_epsilon", "S0", "substeps"};
const std::set<std::string> kGraphKeys = {"kind", "n", "edges"};
const std::set<std::string> kValueKeys = {"kind", "base", "width", "epsilon", "per_firm"};

ExperimentKind parse_kind(const json& v) {
  if (!v.is_string()) throw ConfigError("experiment", "must be one of cti-fig1, sis-fig2, custom");
  const auto s = v.get<std::string>();
  if (s == "cti-fig1") return ExperimentKind::CtiFig1;
  if (s == "sis-fig2") return ExperimentKind::SisFig2;
  if (s == "custom") return ExperimentKind::Custom;
  throw ConfigError("experiment", "unknown experiment '" + s + "'");
}

ModelKind parse_model(const json& v) {
  if (v.is_string() && v.get<std::string>() == "cti") return ModelKind::Cti;
  if (v.is_string() && v.get<std::string>() == "sisgcg") return ModelKind::Sisgcg;
  throw ConfigError("model", "must be cti or sisgcg");
}

double number(const json& doc, const std::string& key, const std::string& path) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

std::uint64_t integer(const json& doc, const std::string& key, const std::string& path) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(path, "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(prefix + k, "unknown key");
  }
}

void merge(json& base, const json& over) {
  for (const auto& [k, v] : over.items()) {
    if (v.is_object() && base.contains(k) && base[k].is_object()) {
      merge(base[k], v);
    } else {
      base[k] = v;
    }
  }
}

Graph build_graph(const json& g) {
  if (!g.is_object()) throw ConfigError("graph", "must be an object");
  reject_unknown(g, kGraphKeys, "graph.");
  if (!g.contains("kind") || !g["kind"].is_string()) throw ConfigError("graph.kind", "must be ring, complete or edge-list");
  const std::string kind = g["kind"];
  if (!g.contains("n")) throw ConfigError("graph.n", "required");
  const auto n = static_cast<std::size_t>(integer(g, "n", "graph.n"));
  if (n < 1) throw ConfigError("graph.n", "must be >= 1");
  if (n > 4096) throw ConfigError("graph.n", "must be <= 4096");
  if (kind == "ring") return Graph::ring(n);
  if (kind == "complete") return Graph::complete(n);
  if (kind != "edge-list") throw ConfigError("graph.kind", "must be ring, complete or edge-list");
  if (!g.contains("edges") || !g["edges"].is_array()) throw ConfigError("graph.edges", "edge-list needs an array of [u, v] pairs");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : g["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
      throw ConfigError("graph.edges", "each edge must be [u, v] with 1-based node numbers");
    }
    const auto u = e[0].get<std::size_t>(), v = e[1].get<std::size_t>();
    if (u < 1 || v < 1 || u > n || v > n) throw ConfigError("graph.edges", "node number out of range");
    if (u == v) throw ConfigError("graph.edges", "self-loop at node " + std::to_string(u));
    edges.emplace_back(u - 1, v - 1);
  }
  return Graph(n, edges);
}

LearningRuleSpec build_rule(const json& doc) {
  const json& r = doc.at("rule");
  if (!r.is_string()) throw ConfigError("rule", "must be log-linear or best-response");
  const double tau = number(doc, "tau", "tau");
  if (!(tau > 0.0)) throw ConfigError("tau", "must be > 0");
  if (r == "log-linear") return LearningRuleSpec::log_linear(tau);
  if (r == "best-response") return LearningRuleSpec::best_response();
  throw ConfigError("rule", "must be log-linear or best-response");
}

CtiConfig build_cti(const json& doc, const Graph& graph) {
  CtiConfig m;
  m.graph = graph;
  const json& c = doc.at("costs");
  if (c.is_number()) {
    m.costs.assign(graph.size(), number(doc, "costs", "costs"));
  } else if (c.is_array()) {
    if (c.size() != graph.size()) throw ConfigError("costs", "needs one entry per node");
    for (const auto& x : c) {
      if (!x.is_number()) throw ConfigError("costs", "entries must be numbers");
      m.costs.push_back(x.get<double>());
    }
  } else {
    throw ConfigError("costs", "must be a number or an array");
  }
  for (double x : m.costs) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("costs", "must be finite and >= 0");
  }

  const json& v = doc.at("value");
  if (!v.is_object()) throw ConfigError("value", "must be an object");
  reject_unknown(v, kValueKeys, "value.");
  if (!v.contains("kind") || !v["kind"].is_string()) throw ConfigError("value.kind", "must be constant or bounded-uniform");
  const std::string kind = v["kind"];
  const double base = number(v, "base", "value.base");
  if (kind == "constant") {
    if (!(base > 0.0)) throw ConfigError("value.base", "constant value must be > 0");
    m.value = ValueProcess::constant(base);
  } else if (kind == "bounded-uniform") {
    const double width = number(v, "width", "value.width");
    const double eps = number(v, "epsilon", "value.epsilon");
    if (!(width >= 0.0)) throw ConfigError("value.width", "must be >= 0");
    if (!(eps >= 0.0)) throw ConfigError("value.epsilon", "must be >= 0");
    if (!(base + eps > 0.0)) throw ConfigError("value.base", "base + epsilon must be > 0");
    if (!v.at("per_firm").is_boolean()) throw ConfigError("value.per_firm", "must be true or false");
    m.value = ValueProcess::bounded_uniform(base, width, eps, 0, v.at("per_firm").get<bool>());
  } else {
    throw ConfigError("value.kind", "must be constant or bounded-uniform");
  }
  return m;
}

SisgcgConfig build_sis(const json& doc, const Graph& graph) {
  SisgcgConfig m;
  m.graph = graph;
  m.gamma = number(doc, "gamma", "gamma");
  m.beta0 = number(doc, "beta0", "beta0");
  m.beta1 = number(doc, "beta1", "beta1");
  m.S0 = number(doc, "S0", "S0");
  const std::uint64_t substeps = integer(doc, "substeps", "substeps");
  if (!(m.gamma > 0.0)) throw ConfigError("gamma", "must be > 0");
  if (!(m.beta1 > 0.0)) throw ConfigError("beta1", "must be > 0");
  if (!(m.beta1 < m.beta0)) throw ConfigError("beta1", "must satisfy 0 < beta1 < beta0");
  if (!(m.S0 >= 0.0 && m.S0 <= 1.0)) throw ConfigError("S0", "must be in [0, 1]");
  if (substeps < 1 || substeps > 1'000'000) throw ConfigError("substeps", "must be in [1, 1000000]");
  m.substeps = static_cast<std::size_t>(substeps);
  m.lambda = sisgcg_lambda(m.gamma, m.beta1, number(doc, "lambda_epsilon", "lambda_epsilon"));
  if (!(m.lambda > 0.0 && m.lambda <= 1.0)) {
    throw ConfigError("lambda_epsilon", "gamma/beta1 + lambda_epsilon must lie in (0, 1]");
  }
  return m;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::CtiFig1:
      return "cti-fig1";
    case ExperimentKind::SisFig2:
      return "sis-fig2";
    case ExperimentKind::Custom:
      return "custom";
  }
  return "custom";
}

json default_document(ExperimentKind kind, ModelKind model) {
  if (kind == ExperimentKind::CtiFig1) model = ModelKind::Cti;
  if (kind == ExperimentKind::SisFig2) model = ModelKind::Sisgcg;
  json d{{"experiment", to_string(kind)}, {"rule", "log-linear"}, {"T", 500}, {"parallelism", 1},
         {"out", "out"},                  {"initial", "uniform"}};
  if (kind == ExperimentKind::Custom) d["model"] = model == ModelKind::Cti ? "cti" : "sisgcg";
  if (model == ModelKind::Cti) {
    d["graph"] = {{"kind", "ring"}, {"n", 10}};
    d["tau"] = 0.1;
    d["trials"] = 25;
    d["costs"] = 0.4;
    d["value"] = {{"kind", "bounded-uniform"}, {"base", 0.4}, {"width", 0.1}, {"epsilon", 0.001}, {"per_firm", false}};
  } else {
    d["graph"] = {{"kind", "ring"}, {"n", 15}};
    d["tau"] = 0.3;
    d["trials"] = 40;
    d["gamma"] = 0.25;
    d["beta0"] = 0.9;
    d["beta1"] = 0.45;
    d["lambda_epsilon"] = 0.001;
    d["S0"] = 0.99;
    d["substeps"] = 100;
  }
  return d;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  if (!doc.contains("experiment")) throw ConfigError("experiment", "required (cti-fig1, sis-fig2 or custom)");
  const ExperimentKind kind = parse_kind(doc["experiment"]);
  ModelKind model = kind == ExperimentKind::SisFig2 ? ModelKind::Sisgcg : ModelKind::Cti;
  if (kind == ExperimentKind::Custom) {
    if (!doc.contains("model")) throw ConfigError("model", "required for custom experiments");
    model = parse_model(doc["model"]);
  } else if (doc.contains("model") && parse_model(doc["model"]) != model) {
    throw ConfigError("model", "does not match the experiment kind");
  }

  std::set<std::string> allowed = kCommonKeys;
  for (const auto& k : model == ModelKind::Cti ? kCtiKeys : kSisKeys) allowed.insert(k);
  reject_unknown(doc, allowed, "");
  if (!doc.contains("seed")) throw ConfigError("seed", "required; runs are never seeded from the clock");

  json merged = default_document(kind, model);
  merge(merged, doc);

  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.model = model;
  const auto seed = integer(merged, "seed", "seed");
  const auto trials = integer(merged, "trials", "trials");
  const auto T = integer(merged, "T", "T");
  const auto parallelism = integer(merged, "parallelism", "parallelism");
  if (trials < 1 || trials > 10'000'000) throw ConfigError("trials", "must be in [1, 10000000]");
  if (T < 1 || T > 100'000'000) throw ConfigError("T", "must be in [1, 100000000]");
  if (parallelism < 1 || parallelism > 1024) throw ConfigError("parallelism", "must be in [1, 1024]");
  if (!merged["out"].is_string() || merged["out"].get<std::string>().empty()) {
    throw ConfigError("out", "must be a nonempty path");
  }
  if (merged["initial"] != "uniform") throw ConfigError("initial", "only \"uniform\" is supported");
  cfg.out = merged["out"];
  const Graph graph = build_graph(merged["graph"]);
  const LearningRuleSpec rule = build_rule(merged);

  if (model == ModelKind::Cti) {
    cfg.cti.model = build_cti(merged, graph);
    cfg.cti.rule = rule;
    cfg.cti.trials = trials;
    cfg.cti.T = T;
    cfg.cti.seed = seed;
    cfg.cti.parallelism = parallelism;
  } else {
    cfg.sis.model = build_sis(merged, graph);
    cfg.sis.rule = rule;
    cfg.sis.trials = trials;
    cfg.sis.T = T;
    cfg.sis.seed = seed;
    cfg.sis.parallelism = parallelism;
  }

  for (const char* key : {"T", "initial"}) {
    if (!doc.contains(key)) cfg.extrapolated.emplace_back(key);
  }
  if (model == ModelKind::Sisgcg && !doc.contains("S0")) cfg.extrapolated.emplace_back("S0");
  cfg.resolved = merged;
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed JSON in " + path + ": " + e.what());
  }
  return parse_config(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::stringstream path(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(path, part, '.')) parts.push_back(part);
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    json& child = (*node)[parts[k]];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError(key, "cannot descend into a non-object");
    node = &child;
  }
  (*node)[parts.back()] = value;
}

}  // namespace hdg::harness
