#include "spillover/sem_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "spillover/error.hpp"

namespace spillover {

namespace {

constexpr const char* kDerivedGain = "D";

// Reverse-edge pairs that may not both carry an effect.
struct ForbiddenPair {
  const char* a_from;
  const char* a_to;
  const char* b_from;
  const char* b_to;
  const char* symbols;
};
constexpr ForbiddenPair kForbiddenPairs[] = {
    {"T2", "T1", "T1", "T2", "(tau, phi)"},
    {"Y1", "Y2", "Y2", "Y1", "(eta, lambda)"},
    {"T2", "Y1", "Y1", "T2", "(kappa, omega)"},
};

const Edge* find_edge(const ModelSpec& spec, std::string_view from, std::string_view to) {
  for (const auto& e : spec.edges)
    if (e.from == from && e.to == to) return &e;
  return nullptr;
}

std::string format_coefficient(double value) { return fmt::format("{}", value); }

} // namespace

std::string_view to_string(VariableKind kind) {
  switch (kind) {
  case VariableKind::exogenous_latent: return "exogenous-latent";
  case VariableKind::exposure: return "exposure";
  case VariableKind::outcome: return "outcome";
  case VariableKind::derived: return "derived";
  }
  return "outcome";
}

VariableKind variable_kind_from_string(std::string_view text) {
  if (text == "exogenous-latent") return VariableKind::exogenous_latent;
  if (text == "exposure") return VariableKind::exposure;
  if (text == "outcome") return VariableKind::outcome;
  if (text == "derived") return VariableKind::derived;
  throw ModelSpecError(fmt::format("unknown variable kind '{}'", text));
}

std::string_view to_string(PathStatus status) {
  switch (status) {
  case PathStatus::open: return "open";
  case PathStatus::closed_by_conditioning: return "closed-by-conditioning";
  case PathStatus::closed_by_collider: return "closed-by-collider";
  }
  return "open";
}

bool PathModel::contains(std::string_view name) const {
  auto it = std::lower_bound(variables_.begin(), variables_.end(), name,
                             [](const Variable& v, std::string_view n) { return v.name < n; });
  return it != variables_.end() && it->name == name;
}

std::size_t PathModel::index_of(std::string_view name) const {
  auto it = std::lower_bound(variables_.begin(), variables_.end(), name,
                             [](const Variable& v, std::string_view n) { return v.name < n; });
  if (it == variables_.end() || it->name != name)
    throw UnknownVariableError(fmt::format("unknown variable '{}'", name));
  return static_cast<std::size_t>(it - variables_.begin());
}

std::optional<double> PathModel::coefficient(std::string_view from, std::string_view to) const {
  if (!contains(from) || !contains(to)) return std::nullopt;
  const auto f = index_of(from);
  const auto t = index_of(to);
  for (const auto& link : children_[f])
    if (link.node == t) return link.coefficient;
  return std::nullopt;
}

std::vector<bool> PathModel::descendants(std::size_t i) const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack{i};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    for (const auto& link : children_[n]) {
      if (!seen[link.node]) {
        seen[link.node] = true;
        stack.push_back(link.node);
      }
    }
  }
  return seen;
}

PathModel build_model(const ModelSpec& spec, const BuildOptions& options) {
  PathModel model;
  model.spec_ = spec;
  model.variables_ = spec.variables;
  std::sort(model.variables_.begin(), model.variables_.end(),
            [](const Variable& a, const Variable& b) { return a.name < b.name; });

  if (model.variables_.size() > options.max_nodes)
    throw ModelSpecError(fmt::format("model has {} variables; the cap is {}",
                                     model.variables_.size(), options.max_nodes));
  for (std::size_t i = 0; i < model.variables_.size(); ++i) {
    const auto& v = model.variables_[i];
    if (v.name.empty()) throw ModelSpecError("variable with empty name");
    if (i > 0 && model.variables_[i - 1].name == v.name)
      throw ModelSpecError(fmt::format("duplicate variable '{}'", v.name));
    if (!std::isfinite(v.noise_variance) || v.noise_variance < 0.0)
      throw ModelSpecError(fmt::format("variable '{}' has invalid noise variance {}", v.name,
                                       v.noise_variance));
    if (v.kind == VariableKind::derived && v.noise_variance != 0.0)
      throw ModelSpecError(fmt::format("derived variable '{}' must have zero noise variance", v.name));
  }

  const auto n = model.variables_.size();
  model.children_.assign(n, {});
  model.parents_.assign(n, {});

  for (const auto& e : spec.edges) {
    const auto from = model.index_of(e.from);
    const auto to = model.index_of(e.to);
    if (from == to) throw CycleError(fmt::format("self-loop on '{}'", e.from));
    if (model.is_derived(from) || model.is_derived(to))
      throw ModelSpecError(fmt::format("edge {} -> {} touches a derived variable; use its definition",
                                       e.from, e.to));
    if (!std::isfinite(e.coefficient))
      throw ModelSpecError(fmt::format("edge {} -> {} has a non-finite coefficient", e.from, e.to));
    for (const auto& link : model.children_[from])
      if (link.node == to) throw ModelSpecError(fmt::format("duplicate edge {} -> {}", e.from, e.to));
    model.children_[from].push_back({to, e.coefficient, e.label, false});
    model.parents_[to].push_back({from, e.coefficient, e.label, false});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = model.variables_[i];
    if (v.kind != VariableKind::derived) continue;
    auto def = spec.derived.find(v.name);
    if (def == spec.derived.end() || def->second.empty())
      throw ModelSpecError(fmt::format("derived variable '{}' has no definition", v.name));
  }
  for (const auto& [name, definition] : spec.derived) {
    const auto d = model.index_of(name);
    if (!model.is_derived(d))
      throw ModelSpecError(fmt::format("'{}' has a definition but is not of kind derived", name));
    if (name == kDerivedGain) {
      const LinearDefinition gain{{"Y1", -1.0}, {"Y2", 1.0}};
      if (definition != gain)
        throw ModelSpecError("the gain score D must be defined as +1*Y2 - 1*Y1");
    }
    for (const auto& [component, weight] : definition) {
      const auto c = model.index_of(component);
      if (model.is_derived(c))
        throw ModelSpecError(fmt::format("derived '{}' refers to derived '{}'", name, component));
      if (!std::isfinite(weight))
        throw ModelSpecError(fmt::format("derived '{}' has a non-finite weight", name));
      const auto label = weight == 1.0 ? "+1" : weight == -1.0 ? "-1" : format_coefficient(weight);
      model.children_[c].push_back({d, weight, label, true});
      model.parents_[d].push_back({c, weight, label, true});
    }
  }

  for (const auto& pair : kForbiddenPairs) {
    const Edge* a = find_edge(spec, pair.a_from, pair.a_to);
    const Edge* b = find_edge(spec, pair.b_from, pair.b_to);
    if (a && b && a->coefficient != 0.0 && b->coefficient != 0.0)
      throw SimultaneityError(fmt::format("both members of {} are nonzero ({} -> {} and {} -> {})",
                                          pair.symbols, pair.a_from, pair.a_to, pair.b_from,
                                          pair.b_to));
  }

  const auto by_node = [](const PathModel::Link& a, const PathModel::Link& b) {
    return a.node < b.node;
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(model.children_[i].begin(), model.children_[i].end(), by_node);
    std::sort(model.parents_[i].begin(), model.parents_[i].end(), by_node);
  }

  // Kahn's algorithm with a min-heap for the canonical tie-break; derived
  // variables are appended afterwards.
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& link : model.parents_[i])
      if (!link.definitional) ++indegree[i];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (!model.is_derived(i) && indegree[i] == 0) ready.push(i);
  while (!ready.empty()) {
    const auto i = ready.top();
    ready.pop();
    model.topo_.push_back(i);
    for (const auto& link : model.children_[i]) {
      if (link.definitional) continue;
      if (--indegree[link.node] == 0) ready.push(link.node);
    }
  }
  std::size_t structural = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!model.is_derived(i)) ++structural;
  if (model.topo_.size() != structural) throw CycleError("structural edges contain a directed cycle");
  for (std::size_t i = 0; i < n; ++i)
    if (model.is_derived(i)) model.topo_.push_back(i);

  return model;
}

std::string Path::to_string() const {
  std::string out = nodes.empty() ? std::string() : nodes.front();
  for (std::size_t k = 0; k < directions.size(); ++k) {
    out += directions[k] == StepDirection::forward ? " -> " : " <- ";
    out += nodes[k + 1];
  }
  return out;
}

namespace {

struct Step {
  std::size_t node;
  StepDirection direction;
  const PathModel::Link* link;
};

Path make_path(const PathModel& model, std::size_t start, const std::vector<Step>& steps,
               const std::vector<bool>& conditioned) {
  Path path;
  path.nodes.push_back(model.name(start));
  int sign = 1;
  std::vector<std::string> factors;
  for (const auto& s : steps) {
    path.nodes.push_back(model.name(s.node));
    path.directions.push_back(s.direction);
    path.coefficient_product *= s.link->coefficient;
    if (s.link->definitional && std::abs(s.link->coefficient) == 1.0) {
      if (s.link->coefficient < 0) sign = -sign;
    } else if (!s.link->label.empty()) {
      factors.push_back(s.link->label);
    } else {
      factors.push_back(format_coefficient(s.link->coefficient));
    }
  }
  path.causal = std::all_of(path.directions.begin(), path.directions.end(),
                            [](StepDirection d) { return d == StepDirection::forward; });

  std::string symbolic;
  for (const auto& f : factors) {
    if (!symbolic.empty()) symbolic += '*';
    symbolic += f;
  }
  if (symbolic.empty()) symbolic = "1";
  path.symbolic_product = (sign < 0 ? "-" : "") + symbolic;

  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    const auto mid = steps[k].node;
    const bool collider = steps[k].direction == StepDirection::forward &&
                          steps[k + 1].direction == StepDirection::backward;
    if (collider) {
      path.has_collider = true;
      if (path.status != PathStatus::open) continue;
      bool activated = conditioned[mid];
      if (!activated) {
        const auto desc = model.descendants(mid);
        for (std::size_t j = 0; j < desc.size() && !activated; ++j)
          activated = desc[j] && conditioned[j];
      }
      if (!activated) {
        path.status = PathStatus::closed_by_collider;
        path.blocking_node = model.name(mid);
      }
    } else if (conditioned[mid] && path.status == PathStatus::open) {
      path.status = PathStatus::closed_by_conditioning;
      path.blocking_node = model.name(mid);
    }
  }
  return path;
}

} // namespace

std::vector<Path> enumerate_paths(const PathModel& model, std::string_view x, std::string_view y,
                                  const PathQuery& query) {
  if (model.size() > query.max_nodes)
    throw PreconditionError(fmt::format("model has {} variables; path enumeration cap is {}",
                                        model.size(), query.max_nodes));
  const auto source = model.index_of(x);
  const auto target = model.index_of(y);
  if (source == target)
    throw PreconditionError(fmt::format("path query needs two distinct variables, got '{}' twice", x));

  std::vector<bool> conditioned(model.size(), false);
  for (const auto& c : query.conditioning) {
    const auto i = model.index_of(c);
    if (i == source || i == target)
      throw PreconditionError(fmt::format("conditioning set may not contain endpoint '{}'", c));
    if (model.is_derived(i) && !query.allow_derived_conditioning)
      throw PreconditionError(
          fmt::format("conditioning on derived variable '{}' requires an explicit opt-in", c));
    conditioned[i] = true;
  }

  // Undirected adjacency in canonical neighbour order.
  std::vector<std::vector<Step>> adjacent(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (const auto& link : model.children(i))
      adjacent[i].push_back({link.node, StepDirection::forward, &link});
    for (const auto& link : model.parents(i))
      adjacent[i].push_back({link.node, StepDirection::backward, &link});
    std::sort(adjacent[i].begin(), adjacent[i].end(),
              [](const Step& a, const Step& b) { return a.node < b.node; });
  }

  std::vector<Path> paths;
  std::vector<Step> steps;
  std::vector<bool> on_path(model.size(), false);
  on_path[source] = true;

  auto visit = [&](auto&& self, std::size_t node) -> void {
    for (const auto& step : adjacent[node]) {
      if (on_path[step.node]) continue;
      steps.push_back(step);
      if (step.node == target) {
        paths.push_back(make_path(model, source, steps, conditioned));
      } else {
        on_path[step.node] = true;
        self(self, step.node);
        on_path[step.node] = false;
      }
      steps.pop_back();
    }
  };
  visit(visit, source);
  return paths;
}

std::vector<Path> collider_free_paths(const std::vector<Path>& paths) {
  std::vector<Path> out;
  std::copy_if(paths.begin(), paths.end(), std::back_inserter(out),
               [](const Path& p) { return !p.has_collider; });
  return out;
}

bool d_separated(const PathModel& model, std::string_view x, std::string_view y,
                 const PathQuery& query) {
  const auto paths = enumerate_paths(model, x, y, query);
  return std::none_of(paths.begin(), paths.end(),
                      [](const Path& p) { return p.status == PathStatus::open; });
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& SiblingParameters::symbols() {
  static const std::vector<std::string> names{"theta", "delta", "psi", "chi",   "gamma", "kappa",
                                              "tau",   "phi",   "omega", "eta", "lambda"};
  return names;
}

double& SiblingParameters::operator[](std::string_view symbol) {
  if (symbol == "theta") return theta;
  if (symbol == "delta") return delta;
  if (symbol == "psi") return psi;
  if (symbol == "chi") return chi;
  if (symbol == "gamma") return gamma;
  if (symbol == "kappa") return kappa;
  if (symbol == "tau") return tau;
  if (symbol == "phi") return phi;
  if (symbol == "omega") return omega;
  if (symbol == "eta") return eta;
  if (symbol == "lambda") return lambda;
  throw ConfigError(fmt::format("unknown structural parameter '{}'", symbol));
}

double SiblingParameters::operator[](std::string_view symbol) const {
  return const_cast<SiblingParameters&>(*this)[symbol];
}

ModelSpec sibling_model_spec(const SiblingParameters& p, const SiblingNoise& noise) {
  ModelSpec spec;
  spec.variables = {
      {"U", VariableKind::exogenous_latent, noise.latent},
      {"T1", VariableKind::exposure, noise.exposure},
      {"T2", VariableKind::exposure, noise.exposure},
      {"Y1", VariableKind::outcome, noise.outcome},
      {"Y2", VariableKind::outcome, noise.outcome},
      {"D", VariableKind::derived, 0.0},
  };
  spec.edges = {
      {"U", "T1", p.chi, "chi"},     {"U", "T2", p.gamma, "gamma"}, {"U", "Y1", p.psi, "psi"},
      {"U", "Y2", p.psi, "psi"},     {"T1", "Y1", p.delta, "delta"}, {"T2", "Y2", p.delta, "delta"},
      {"T1", "Y2", p.theta, "theta"},
  };
  const std::tuple<const char*, const char*, double, const char*> optional[] = {
      {"T2", "Y1", p.kappa, "kappa"}, {"T2", "T1", p.tau, "tau"}, {"T1", "T2", p.phi, "phi"},
      {"Y1", "T2", p.omega, "omega"}, {"Y1", "Y2", p.eta, "eta"}, {"Y2", "Y1", p.lambda, "lambda"},
  };
  for (const auto& [from, to, value, label] : optional)
    if (value != 0.0) spec.edges.push_back({from, to, value, label});
  spec.derived[kDerivedGain] = {{"Y2", 1.0}, {"Y1", -1.0}};
  return spec;
}

PathModel sibling_model(const SiblingParameters& params, const SiblingNoise& noise) {
  return build_model(sibling_model_spec(params, noise));
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    const std::vector<std::string> core{"theta", "delta", "psi", "chi", "gamma"};
    struct Row {
      const char* name;
      PresetFamily family;
      std::vector<std::pair<std::string, double>> extra;
    };
    const std::vector<Row> rows{
        {"fig1a", PresetFamily::one_sided, {}},
        {"fig1b", PresetFamily::one_sided, {{"tau", 0.3}}},
        {"fig1c", PresetFamily::one_sided, {{"phi", 0.3}}},
        {"fig2a", PresetFamily::two_sided, {{"kappa", 0.3}}},
        {"fig2b", PresetFamily::two_sided, {{"kappa", 0.3}, {"tau", 0.3}}},
        {"fig2c", PresetFamily::two_sided, {{"kappa", 0.3}, {"phi", 0.3}}},
        {"fig3a", PresetFamily::outcome_spillover, {{"omega", 0.3}}},
        {"fig3b", PresetFamily::outcome_spillover, {{"eta", 0.3}}},
        {"fig3c", PresetFamily::outcome_spillover, {{"lambda", 0.3}}},
    };
    std::vector<Preset> out;
    for (const auto& row : rows) {
      Preset p{row.name, row.family, SiblingParameters{}, core};
      for (const auto& [symbol, value] : row.extra) {
        p.parameters[symbol] = value;
        p.active_symbols.push_back(symbol);
      }
      out.push_back(std::move(p));
    }
    return out;
  }();
  return all;
}

bool is_preset(std::string_view name) {
  const auto& all = presets();
  return std::any_of(all.begin(), all.end(), [&](const Preset& p) { return p.name == name; });
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ModelSpecError(fmt::format("unknown preset '{}' (expected fig1a ... fig3c)", name));
}

// ---------------------------------------------------------------------------

ModelSpec model_spec_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelSpecError(fmt::format("model specification is not valid JSON: {}", e.what()));
  }
  ModelSpec spec;
  try {
    for (const auto& v : doc.at("variables")) {
      Variable var;
      var.name = v.at("name").get<std::string>();
      var.kind = variable_kind_from_string(v.value("kind", std::string("outcome")));
      var.noise_variance = v.value("noise_variance", var.kind == VariableKind::derived ? 0.0 : 1.0);
      spec.variables.push_back(std::move(var));
    }
    for (const auto& e : doc.value("edges", nlohmann::json::array())) {
      spec.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                            e.at("coefficient").get<double>(), e.value("label", std::string())});
    }
    const auto derived = doc.value("derived", nlohmann::json::object());
    for (const auto& [name, definition] : derived.items()) {
      LinearDefinition def;
      for (const auto& [component, weight] : definition.items()) def[component] = weight.get<double>();
      spec.derived[name] = std::move(def);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ModelSpecError(fmt::format("malformed model specification: {}", e.what()));
  }
  return spec;
}

std::string model_spec_to_json(const ModelSpec& spec) {
  nlohmann::ordered_json doc;
  doc["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : spec.variables)
    doc["variables"].push_back(
        {{"name", v.name}, {"kind", std::string(to_string(v.kind))}, {"noise_variance", v.noise_variance}});
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : spec.edges) {
    nlohmann::ordered_json edge{{"from", e.from}, {"to", e.to}, {"coefficient", e.coefficient}};
    if (!e.label.empty()) edge["label"] = e.label;
    doc["edges"].push_back(std::move(edge));
  }
  doc["derived"] = nlohmann::ordered_json::object();
  for (const auto& [name, definition] : spec.derived) {
    nlohmann::ordered_json def = nlohmann::ordered_json::object();
    for (const auto& [component, weight] : definition) def[component] = weight;
    doc["derived"][name] = std::move(def);
  }
  return doc.dump(2);
}

} // namespace spillover
