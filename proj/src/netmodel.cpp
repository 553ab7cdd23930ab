#include "coshare/netmodel.hpp"

#include <algorithm>
#include <cmath>

#include "coshare/error.hpp"

namespace coshare {

namespace {

// Rates are in pps; allow for accumulated rounding when comparing sums.
constexpr double kRateSlack = 1e-9;

bool sorted_disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<NodeId> interior(const std::vector<NodeId>& path) {
  if (path.size() <= 2) return {};
  return {path.begin() + 1, path.end() - 1};
}

}  // namespace

const char* to_string(ReservationMode mode) {
  return mode == ReservationMode::kShared ? "shared" : "dedicated";
}

ReservationMode parse_reservation_mode(const std::string& s) {
  if (s == "shared") return ReservationMode::kShared;
  if (s == "dedicated") return ReservationMode::kDedicated;
  throw ConfigError("unknown reservation mode '" + s + "'");
}

const char* to_string(IndependenceRule rule) {
  return rule == IndependenceRule::kFullPath ? "full_path" : "hosting_nodes";
}

IndependenceRule parse_independence_rule(const std::string& s) {
  if (s == "hosting_nodes") return IndependenceRule::kHostingNodes;
  if (s == "full_path") return IndependenceRule::kFullPath;
  throw ConfigError("unknown independence rule '" + s + "'");
}

const char* to_string(InstanceRole role) {
  return role == InstanceRole::kPrimary ? "primary" : "backup";
}

ReservationLedger::ReservationLedger(ReservationMode mode, double capacity)
    : mode_(mode), capacity_(capacity) {}

double ReservationLedger::reserved() const {
  double total = 0.0;
  for (const auto& g : groups_) total += g.rate;
  return total;
}

double ReservationLedger::demand() const {
  double total = 0.0;
  for (const auto& g : groups_) {
    for (double r : g.rates) total += r;
  }
  return total;
}

bool ReservationLedger::contains(FlowIndex f) const {
  for (const auto& g : groups_) {
    if (std::find(g.members.begin(), g.members.end(), f) != g.members.end()) return true;
  }
  return false;
}

std::vector<FlowIndex> ReservationLedger::flows() const {
  std::vector<FlowIndex> out;
  for (const auto& g : groups_) out.insert(out.end(), g.members.begin(), g.members.end());
  return out;
}

std::vector<FlowIndex> ReservationLedger::sharing_with(FlowIndex f) const {
  for (const auto& g : groups_) {
    if (std::find(g.members.begin(), g.members.end(), f) == g.members.end()) continue;
    std::vector<FlowIndex> out;
    for (FlowIndex m : g.members) {
      if (m != f) out.push_back(m);
    }
    return out;
  }
  return {};
}

bool ReservationLedger::fits(double extra) const {
  return extra <= free() + kRateSlack * std::max(1.0, capacity_);
}

std::optional<std::size_t> ReservationLedger::shareable_group(
    FlowIndex f, double rate, const IndependenceFn& independent) const {
  if (mode_ != ReservationMode::kShared) return std::nullopt;
  for (std::size_t k = 0; k < groups_.size(); ++k) {
    const auto& g = groups_[k];
    const bool all_independent = std::all_of(g.members.begin(), g.members.end(),
                                             [&](FlowIndex m) { return independent(f, m); });
    if (all_independent && fits(std::max(0.0, rate - g.rate))) return k;
  }
  return std::nullopt;
}

bool ReservationLedger::can_admit(FlowIndex f, double rate,
                                  const IndependenceFn& independent) const {
  if (contains(f)) return false;
  if (shareable_group(f, rate, independent)) return true;
  return fits(rate);
}

bool ReservationLedger::reserve(FlowIndex f, double rate, const IndependenceFn& independent) {
  if (contains(f)) return false;
  if (auto k = shareable_group(f, rate, independent)) {
    auto& g = groups_[*k];
    g.members.push_back(f);
    g.rates.push_back(rate);
    g.recompute();
    return true;
  }
  if (!fits(rate)) return false;
  SharingGroup g;
  g.members.push_back(f);
  g.rates.push_back(rate);
  g.recompute();
  groups_.push_back(std::move(g));
  return true;
}

void ReservationLedger::release(FlowIndex f) {
  for (auto it = groups_.begin(); it != groups_.end(); ++it) {
    auto pos = std::find(it->members.begin(), it->members.end(), f);
    if (pos == it->members.end()) continue;
    const auto k = pos - it->members.begin();
    it->members.erase(pos);
    it->rates.erase(it->rates.begin() + k);
    if (it->members.empty()) {
      groups_.erase(it);
    } else {
      it->recompute();
    }
    return;
  }
}

bool ReservationLedger::within_capacity() const {
  return reserved() <= capacity_ + kRateSlack * std::max(1.0, capacity_);
}

bool ReservationLedger::groups_independent(const IndependenceFn& independent) const {
  for (const auto& g : groups_) {
    for (std::size_t a = 0; a < g.members.size(); ++a) {
      for (std::size_t b = a + 1; b < g.members.size(); ++b) {
        if (!independent(g.members[a], g.members[b])) return false;
      }
    }
  }
  return true;
}

TypeIndex Model::type_index(const std::string& name) const {
  for (TypeIndex t = 0; t < types.size(); ++t) {
    if (types[t].name == name) return t;
  }
  throw ValidationError("unknown NF type '" + name + "'");
}

std::optional<InstanceIndex> Model::find_instance(const std::string& id) const {
  for (InstanceIndex v = 0; v < instances.size(); ++v) {
    if (instances[v].id == id) return v;
  }
  return std::nullopt;
}

InstanceIndex Model::add_instance(std::string id, TypeIndex type, NodeId host, InstanceRole role,
                                  double avail) {
  if (type >= types.size()) throw ValidationError("instance '" + id + "': unknown NF type");
  if (host >= net.size()) throw ValidationError("instance '" + id + "': unknown host");
  if (net.is_end(host)) {
    throw ValidationError("instance '" + id + "' placed on end node '" + net.name(host) + "'");
  }
  if (!(avail > 0.0 && avail <= 1.0)) {
    throw ValidationError("instance '" + id + "': availability must be in (0,1]");
  }
  NfInstance inst;
  inst.id = std::move(id);
  inst.type = type;
  inst.host = host;
  inst.role = role;
  inst.avail = avail;
  inst.ledger = ReservationLedger(mode, types[type].capacity);
  instances.push_back(std::move(inst));
  return instances.size() - 1;
}

std::vector<NodeId> Model::hosts_of(std::span<const InstanceIndex> chain) const {
  std::vector<NodeId> hosts;
  hosts.reserve(chain.size());
  for (InstanceIndex v : chain) hosts.push_back(instances[v].host);
  return sorted_unique(std::move(hosts));
}

void Model::bind_primary(FlowIndex f, std::vector<InstanceIndex> chain, std::vector<NodeId> path) {
  auto& flow = flows.at(f);
  if (chain.size() != flow.chain.size()) {
    throw ValidationError("flow '" + flow.id + "': primary binding length mismatch");
  }
  for (std::size_t g = 0; g < chain.size(); ++g) {
    if (chain[g] >= instances.size() || instances[chain[g]].type != flow.chain[g]) {
      throw ValidationError("flow '" + flow.id + "': primary instance type mismatch at position " +
                            std::to_string(g));
    }
  }
  PrimaryBinding binding;
  binding.hosts = hosts_of(chain);
  binding.avail = chain_availability(*this, chain);
  binding.instances = std::move(chain);
  binding.path = std::move(path);
  flow.primary = std::move(binding);
}

double chain_availability(const Model& model, std::span<const InstanceIndex> chain) {
  double a = 1.0;
  for (InstanceIndex v : chain) a *= model.instances[v].avail;
  for (NodeId n : model.hosts_of(chain)) a *= model.net.avail(n);
  return a;
}

double service_availability(double primary_avail, std::span<const double> backup_avails) {
  double down = 1.0 - primary_avail;
  for (double b : backup_avails) down *= 1.0 - b;
  return 1.0 - down;
}

bool flows_independent(const FlowSpec& a, const FlowSpec& b, IndependenceRule rule) {
  if (!a.primary || !b.primary) {
    throw ValidationError("flow independence needs bound primaries ('" + a.id + "', '" + b.id +
                          "')");
  }
  if (a.id == b.id) return false;
  if (!sorted_disjoint(a.primary->hosts, b.primary->hosts)) return false;
  if (!sorted_disjoint(sorted_unique(a.primary->instances), sorted_unique(b.primary->instances))) {
    return false;
  }
  if (rule == IndependenceRule::kFullPath) {
    auto nodes_a = a.primary->hosts;
    auto nodes_b = b.primary->hosts;
    for (NodeId n : interior(a.primary->path)) nodes_a.push_back(n);
    for (NodeId n : interior(b.primary->path)) nodes_b.push_back(n);
    if (!sorted_disjoint(sorted_unique(nodes_a), sorted_unique(nodes_b))) return false;
  }
  return true;
}

FlowIndependence::FlowIndependence(const Model& model, IndependenceRule rule)
    : n_(model.flows.size()), table_(n_ * n_, 0) {
  for (FlowIndex a = 0; a < n_; ++a) {
    for (FlowIndex b = a + 1; b < n_; ++b) {
      const unsigned char v = flows_independent(model.flows[a], model.flows[b], rule) ? 1 : 0;
      table_[a * n_ + b] = v;
      table_[b * n_ + a] = v;
    }
  }
}

bool reserve(NfInstance& instance, FlowIndex flow, double rate, const IndependenceFn& independent) {
  return instance.ledger.reserve(flow, rate, independent);
}

double free_capacity(const NfInstance& instance) { return instance.ledger.free(); }

}  // namespace coshare
