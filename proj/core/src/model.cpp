#include "txamp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace txamp::model {

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::SqrtPolicy: return "sqrt";
    case PolicyKind::Aggressive: return "aggressive";
    case PolicyKind::ConstantPeers: return "constant";
  }
  return "unknown";
}

int sqrt_broadcast_count(int peer_count) {
  if (peer_count <= 0) return 0;
  return static_cast<int>(std::llround(std::sqrt(static_cast<double>(peer_count))));
}

void AmplificationParams::validate() const {
  if (tx_size <= 0.0) throw parameter_error("tx_size must be positive");
  if (modified_ratio < 0.0 || modified_ratio > 1.0)
    throw parameter_error("modified_ratio must lie in [0,1]");
  if (total_nodes < 1.0) throw parameter_error("total_nodes must be at least 1");
  if (announce_size < 0.0) throw parameter_error("announce_size must be nonnegative");
  if (modified_connection_count < 1)
    throw parameter_error("modified_connection_count must be at least 1");
  if (max_connections < 1) throw parameter_error("max_connections must be at least 1");
  if (policy.kind == PolicyKind::ConstantPeers &&
      (policy.broadcast_count < 0 || policy.announce_count < 0))
    throw parameter_error("constant-peer counts must be nonnegative");
}

ConnectionDistribution ConnectionDistribution::point_mass(double x) {
  if (x < 0.0) throw parameter_error("point mass must be nonnegative");
  ConnectionDistribution d;
  d.kind_ = Kind::PointMass;
  d.point_ = x;
  return d;
}

ConnectionDistribution ConnectionDistribution::empirical(std::vector<double> samples) {
  if (samples.empty()) throw parameter_error("empirical distribution needs samples");
  for (double s : samples)
    if (s <= 0.0) throw parameter_error("connection samples must be positive");
  ConnectionDistribution d;
  d.kind_ = Kind::Empirical;
  d.samples_ = std::move(samples);
  return d;
}

ConnectionDistribution ConnectionDistribution::smoothed(std::vector<double> density, double step,
                                                        double origin) {
  if (density.size() < 2) throw parameter_error("density table needs at least two points");
  if (step <= 0.0) throw parameter_error("density step must be positive");
  for (double v : density)
    if (v < 0.0 || !std::isfinite(v)) throw parameter_error("density values must be finite and nonnegative");
  ConnectionDistribution d;
  d.kind_ = Kind::Smoothed;
  d.density_ = std::move(density);
  d.step_ = step;
  d.origin_ = origin;
  return d;
}

double ConnectionDistribution::total_mass() const {
  if (kind_ != Kind::Smoothed) return 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < density_.size(); ++i)
    sum += 0.5 * (density_[i] + density_[i + 1]) * step_;
  return sum;
}

double ConnectionDistribution::expect(const std::function<double(double)>& f) const {
  switch (kind_) {
    case Kind::PointMass:
      return f(point_);
    case Kind::Empirical: {
      double sum = 0.0;
      for (double s : samples_) sum += f(s);
      return sum / static_cast<double>(samples_.size());
    }
    case Kind::Smoothed: {
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < density_.size(); ++i) {
        const double x0 = origin_ + step_ * static_cast<double>(i);
        const double x1 = x0 + step_;
        sum += 0.5 * (f(x0) * density_[i] + f(x1) * density_[i + 1]) * step_;
      }
      return sum;
    }
  }
  return 0.0;
}

double ConnectionDistribution::mean() const {
  return expect([](double x) { return x; });
}

double per_connection_waste(const PropagationPolicy& policy, double tx_size,
                            int connection_count, double announce_size) {
  if (tx_size <= 0.0) throw parameter_error("tx_size must be positive");
  if (connection_count < 1) throw parameter_error("connection_count must be at least 1");
  const double c = static_cast<double>(connection_count);
  switch (policy.kind) {
    case PolicyKind::Aggressive:
      return tx_size;
    case PolicyKind::SqrtPolicy: {
      // Single division keeps round(sqrt(50))/50 = 0.14 cases decimal-exact.
      const double k = static_cast<double>(sqrt_broadcast_count(connection_count));
      return (k * tx_size + (c - k) * announce_size) / c;
    }
    case PolicyKind::ConstantPeers: {
      const double b = std::min<double>(policy.broadcast_count, c);
      const double n = std::min<double>(policy.announce_count, c - b);
      // Expected-value extrapolation of the fixed-count policy over c peers.
      return (b * tx_size + n * announce_size) / c;
    }
  }
  throw parameter_error("unknown propagation policy");
}

double node_waste(double x, const AmplificationParams& params) {
  params.validate();
  if (x < 0.0 || x > static_cast<double>(params.max_connections))
    throw parameter_error("connection count outside [0, max_connections]");
  const double per_conn = per_connection_waste(params.policy, params.tx_size,
                                               params.modified_connection_count,
                                               params.announce_size);
  return per_conn * params.modified_ratio * x;
}

double network_waste(const AmplificationParams& params, const ConnectionDistribution& g) {
  params.validate();
  if (g.kind() == ConnectionDistribution::Kind::Smoothed) {
    const double mass = g.total_mass();
    if (std::abs(mass - 1.0) > 1e-6)
      throw integration_error("density integrates to " + std::to_string(mass) +
                              ", expected 1 within 1e-6");
  }
  const double regular_nodes = (1.0 - params.modified_ratio) * params.total_nodes;
  const double expected_waste = g.expect([&](double x) {
    const double clamped = std::clamp(x, 0.0, static_cast<double>(params.max_connections));
    return node_waste(clamped, params);
  });
  return regular_nodes * expected_waste;
}

double expected_node_waste(const AmplificationParams& params, const ConnectionDistribution& g) {
  const double regular_nodes = (1.0 - params.modified_ratio) * params.total_nodes;
  if (regular_nodes <= 0.0) return 0.0;
  return network_waste(params, g) / regular_nodes;
}

double taf(const AmplificationParams& params, const ConnectionDistribution& g) {
  return network_waste(params, g) / params.tx_size;
}

double eaf(double taf_value, double victim_price_usd_per_tb, double attacker_price_usd_per_tb) {
  if (attacker_price_usd_per_tb <= 0.0)
    throw parameter_error("attacker price must be positive");
  return taf_value * victim_price_usd_per_tb / attacker_price_usd_per_tb;
}

double modified_node_waste(double network_waste_bytes, double modified_node_count) {
  if (modified_node_count <= 0.0)
    throw parameter_error("modified node count must be positive");
  return network_waste_bytes / modified_node_count;
}

}  // namespace txamp::model
