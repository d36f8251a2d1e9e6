#pragma once

#include <functional>
#include <vector>

#include "txamp/errors.hpp"

namespace txamp::model {

// How a node pushes a freshly accepted transaction to its peers.
//   SqrtPolicy:    full transaction to round(sqrt(x)) peers, hash to the rest.
//   Aggressive:    full transaction to every peer, no announcements.
//   ConstantPeers: full transaction to a fixed number of peers, hash to a
//                  fixed number of peers, independent of the connection count.
enum class PolicyKind { SqrtPolicy, Aggressive, ConstantPeers };

struct PropagationPolicy {
  PolicyKind kind = PolicyKind::SqrtPolicy;
  int broadcast_count = 3;  // ConstantPeers only
  int announce_count = 6;   // ConstantPeers only

  static PropagationPolicy sqrt_policy() { return {PolicyKind::SqrtPolicy, 0, 0}; }
  static PropagationPolicy aggressive() { return {PolicyKind::Aggressive, 0, 0}; }
  static PropagationPolicy constant_peers(int broadcast = 3, int announce = 6) {
    return {PolicyKind::ConstantPeers, broadcast, announce};
  }
};

const char* to_string(PolicyKind kind);

// Number of peers a sqrt-policy node sends full transactions to. Shared with
// the simulator so the closed form and the event model cannot drift apart.
int sqrt_broadcast_count(int peer_count);

struct AmplificationParams {
  double tx_size = 560.0;        // a, bytes
  double modified_ratio = 0.015; // gamma, fraction of modified nodes
  PropagationPolicy policy = PropagationPolicy::aggressive();
  double total_nodes = 6000.0;   // N
  double announce_size = 32.0;   // bytes carried by a hash announcement
  int modified_connection_count = 50;  // c, peers held by a modified node
  int max_connections = 1000;

  void validate() const;  // throws parameter_error
};

// Distribution of active connection counts, g(x). Three representations:
// a point mass (exact closed form), a raw sample set (empirical mean), or a
// smoothed density tabulated on a uniform grid over [0, max_connections].
class ConnectionDistribution {
 public:
  enum class Kind { PointMass, Empirical, Smoothed };

  static ConnectionDistribution point_mass(double x);
  static ConnectionDistribution empirical(std::vector<double> samples);
  // `density[i]` is g(origin + i*step); the table must integrate to 1 +- 1e-6
  // over its grid (trapezoid rule).
  static ConnectionDistribution smoothed(std::vector<double> density, double step,
                                         double origin = 0.0);

  Kind kind() const { return kind_; }
  bool is_point_mass() const { return kind_ == Kind::PointMass; }
  double point() const { return point_; }
  const std::vector<double>& density() const { return density_; }
  const std::vector<double>& samples() const { return samples_; }
  double step() const { return step_; }
  double origin() const { return origin_; }

  // Trapezoid integral of the smoothed density (1.0 for the other kinds).
  double total_mass() const;
  // E[f(X)]; point mass and empirical forms are exact, smoothed uses the
  // composite trapezoid rule on the stored grid.
  double expect(const std::function<double(double)>& f) const;
  double mean() const;

 private:
  ConnectionDistribution() = default;

  Kind kind_ = Kind::PointMass;
  double point_ = 0.0;
  std::vector<double> samples_;
  std::vector<double> density_;
  double step_ = 1.0;
  double origin_ = 0.0;
};

// Expected bytes one modified-node connection delivers to a node per
// transaction of `tx_size` bytes. The sqrt case uses the integer peer count
// round(sqrt(c)) of c, e.g. 7 of 50 -> 0.14*a + 0.86*32.
double per_connection_waste(const PropagationPolicy& policy, double tx_size,
                            int connection_count, double announce_size = 32.0);

// f(x): bytes a regular node with x active connections receives per invalid
// transaction. Linear in x, gamma and (for Aggressive) the transaction size.
double node_waste(double x, const AmplificationParams& params);

// (1-gamma) * N * E_g[f(X)]: bytes the whole network receives per injected
// invalid transaction.
double network_waste(const AmplificationParams& params, const ConnectionDistribution& g);

// network_waste / ((1-gamma) * N), the expected waste per regular node.
double expected_node_waste(const AmplificationParams& params, const ConnectionDistribution& g);

// Traffic amplification factor: network_waste / tx_size.
double taf(const AmplificationParams& params, const ConnectionDistribution& g);

// Economic amplification factor: taf * victim price / attacker price.
double eaf(double taf_value, double victim_price_usd_per_tb, double attacker_price_usd_per_tb);

// Per-modified-node share of the network waste. The divisor is a parameter:
// gamma*N by default, or an observed modified-node count.
double modified_node_waste(double network_waste_bytes, double modified_node_count);

}  // namespace txamp::model
