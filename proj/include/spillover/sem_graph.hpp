#pragma once

// Coefficient-labelled DAGs for two-sibling linear causal models, with
// simple-path enumeration and d-separation queries.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spillover {

enum class VariableKind { exogenous_latent, exposure, outcome, derived };

std::string_view to_string(VariableKind kind);
VariableKind variable_kind_from_string(std::string_view text);

struct Variable {
  std::string name;
  VariableKind kind = VariableKind::outcome;
  /// Variance of the variable's own independent disturbance.
  double noise_variance = 1.0;
};

struct Edge {
  std::string from;
  std::string to;
  double coefficient = 0.0;
  /// Symbol tag ("theta", "delta", ...). Edges sharing a tag denote one
  /// structural parameter.
  std::string label;
};

/// Signed linear combination defining a derived variable, e.g. D = Y2 - Y1.
using LinearDefinition = std::map<std::string, double>;

/// Unvalidated model description, as read from JSON or assembled in code.
struct ModelSpec {
  std::vector<Variable> variables;
  std::vector<Edge> edges;
  std::map<std::string, LinearDefinition> derived;
};

struct BuildOptions {
  std::size_t max_nodes = 32;
};

/// Validated, immutable model. Variables are stored in canonical
/// (lexicographic) order; definitional links of derived variables are kept
/// apart from structural edges.
class PathModel {
public:
  struct Link {
    std::size_t node;
    double coefficient;
    std::string label;
    bool definitional; // derived-variable definition, not a causal edge
  };

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  const std::string& name(std::size_t i) const { return variables_.at(i).name; }

  bool contains(std::string_view name) const;
  /// Throws UnknownVariableError.
  std::size_t index_of(std::string_view name) const;

  /// Outgoing links (structural and definitional), sorted by target name.
  const std::vector<Link>& children(std::size_t i) const { return children_.at(i); }
  /// Incoming links, sorted by source name.
  const std::vector<Link>& parents(std::size_t i) const { return parents_.at(i); }

  /// Coefficient of the structural or definitional link from -> to, if any.
  std::optional<double> coefficient(std::string_view from, std::string_view to) const;

  /// Topological order, ties broken canonically. Derived variables come last.
  const std::vector<std::size_t>& topological_order() const { return topo_; }

  bool is_derived(std::size_t i) const { return variables_.at(i).kind == VariableKind::derived; }

  /// Node indices reachable from i by directed links, excluding i.
  std::vector<bool> descendants(std::size_t i) const;

  /// The specification this model was built from (edges in input order).
  const ModelSpec& spec() const { return spec_; }

private:
  friend PathModel build_model(const ModelSpec&, const BuildOptions&);

  std::vector<Variable> variables_;
  std::vector<std::vector<Link>> children_;
  std::vector<std::vector<Link>> parents_;
  std::vector<std::size_t> topo_;
  ModelSpec spec_;
};

/// Validates a specification. Throws CycleError, SimultaneityError,
/// UnknownVariableError or ModelSpecError.
PathModel build_model(const ModelSpec& spec, const BuildOptions& options = {});

enum class StepDirection { forward, backward };
enum class PathStatus { open, closed_by_conditioning, closed_by_collider };

std::string_view to_string(PathStatus status);

struct Path {
  std::vector<std::string> nodes;
  std::vector<StepDirection> directions; // one per step, nodes.size() - 1
  PathStatus status = PathStatus::open;
  bool causal = false;
  bool has_collider = false;
  /// Intermediate node responsible for a closed status.
  std::optional<std::string> blocking_node;
  double coefficient_product = 1.0;
  /// Product written with edge labels, e.g. "delta*chi*gamma" or "-psi*chi".
  std::string symbolic_product;

  /// Arrow notation, e.g. "T1 <- U -> T2 -> Y2 -> D".
  std::string to_string() const;
};

struct PathQuery {
  std::set<std::string> conditioning;
  /// Derived variables are analysis constructs and may only be conditioned
  /// on when this is set.
  bool allow_derived_conditioning = false;
  std::size_t max_nodes = 32;
};

/// Every simple path between x and y exactly once, in canonical DFS order.
std::vector<Path> enumerate_paths(const PathModel& model, std::string_view x,
                                  std::string_view y, const PathQuery& query = {});

/// Paths without colliders: the association-carrying routes that a path
/// decomposition lists (open ones plus ones closed by conditioning).
std::vector<Path> collider_free_paths(const std::vector<Path>& paths);

bool d_separated(const PathModel& model, std::string_view x, std::string_view y,
                 const PathQuery& query = {});

// ---------------------------------------------------------------------------
// Two-sibling models

/// Greek structural parameters of the sibling model family.
struct SiblingParameters {
  double theta = 0.5; // T1 -> Y2, the target spillover
  double delta = 1.0; // Tj -> Yj
  double psi = 1.0;   // U -> Yj
  double chi = 2.0;   // U -> T1
  double gamma = 3.0; // U -> T2
  double kappa = 0.0; // T2 -> Y1
  double tau = 0.0;   // T2 -> T1
  double phi = 0.0;   // T1 -> T2
  double omega = 0.0; // Y1 -> T2
  double eta = 0.0;   // Y1 -> Y2
  double lambda = 0.0; // Y2 -> Y1

  /// Lookup by symbol name; throws ConfigError for unknown names.
  double& operator[](std::string_view symbol);
  double operator[](std::string_view symbol) const;

  static const std::vector<std::string>& symbols();
};

struct SiblingNoise {
  double latent = 1.0;
  double exposure = 1.0;
  double outcome = 1.0;
};

/// Builds U, T1, T2, Y1, Y2, D with the core edges always present and the
/// optional spillover edges (kappa, tau, phi, omega, eta, lambda) present
/// when nonzero.
ModelSpec sibling_model_spec(const SiblingParameters& params, const SiblingNoise& noise = {});
PathModel sibling_model(const SiblingParameters& params, const SiblingNoise& noise = {});

enum class PresetFamily { one_sided, two_sided, outcome_spillover };

struct Preset {
  std::string name;
  PresetFamily family;
  SiblingParameters parameters;
  /// Symbols whose edges exist in this topology.
  std::vector<std::string> active_symbols;
};

/// fig1a ... fig3c with the default simulation parameters.
const std::vector<Preset>& presets();
/// Throws ModelSpecError for an unknown name.
const Preset& find_preset(std::string_view name);
bool is_preset(std::string_view name);

// ---------------------------------------------------------------------------
// JSON model specification:
// {"variables":[{"name","kind","noise_variance"}],
//  "edges":[{"from","to","coefficient","label"}],
//  "derived":{"D":{"Y2":1,"Y1":-1}}}

ModelSpec model_spec_from_json(std::string_view text);
std::string model_spec_to_json(const ModelSpec& spec);

} // namespace spillover
